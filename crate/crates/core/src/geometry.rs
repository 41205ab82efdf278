//! Disk body, fluid annulus and quadrature.
//!
//! The body is a disk of radius `a` centred at the origin and the fluid
//! occupies `|x| > a`. The boundary normal `n` points out of the fluid, i.e.
//! into the body, and `tau = n^perp`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
/// `m[i][j] = d_j v_i` for a velocity gradient.
pub type Mat2 = [[f64; 2]; 2];

#[inline]
pub fn perp(x: Vec2) -> Vec2 {
    [-x[1], x[0]]
}

#[inline]
pub fn dot(x: Vec2, y: Vec2) -> f64 {
    x[0] * y[0] + x[1] * y[1]
}

#[inline]
pub fn norm(x: Vec2) -> f64 {
    x[0].hypot(x[1])
}

/// Physical constants and geometry of the rigid disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyConfig {
    pub radius: f64,
    pub mass: f64,
    pub inertia: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for BodyConfig {
    fn default() -> Self {
        Self {
            radius: 1.0,
            mass: 1.0,
            inertia: 1.0,
            nu: 0.5,
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

impl BodyConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.radius > 0.0, "radius > 0"),
            (self.mass > 0.0, "mass > 0"),
            (self.inertia > 0.0, "inertia > 0"),
            (self.nu > 0.0, "nu > 0"),
            (self.alpha >= 0.0, "alpha ≥ 0"),
            (self.beta.is_finite(), "beta finite"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::InvalidParameter(what.to_string()));
            }
        }
        Ok(())
    }

    /// `R_0` such that the body lies in `B(0, R_0/2)`.
    pub fn r0(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

/// Unit normal (out of the fluid) and tangent `n^perp` (clockwise about the
/// origin) at angle `theta`.
pub fn normal_tangent(theta: f64) -> (Vec2, Vec2) {
    let n = [-theta.cos(), -theta.sin()];
    (n, perp(n))
}

/// `l + r x^perp`.
#[inline]
pub fn rigid_velocity(l: Vec2, r: f64, x: Vec2) -> Vec2 {
    let xp = perp(x);
    [l[0] + r * xp[0], l[1] + r * xp[1]]
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: Vec2,
    pub r: f64,
    pub theta: f64,
    pub weight: f64,
}

/// Composite Gauss–Legendre (radial) × trapezoid (angular) rule on
/// `a ≤ |x| ≤ r_inf`, plus the trapezoid rule on the circle `|x| = a`.
///
/// Radial panels break at `a·2^k` and at every extra break radius so that
/// piecewise-smooth integrands (cutoffs, truncations) keep spectral accuracy.
/// Nodes are stored ring by ring with increasing radius, which lets
/// compactly supported fields be stored as a prefix of the node list.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub radius: f64,
    pub r_inf: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub breaks: Vec<f64>,
    pub nodes: Vec<Node>,
    pub boundary: Vec<Node>,
}

impl QuadratureGrid {
    pub fn build(radius: f64, n_r: usize, n_theta: usize, r_inf: f64) -> Result<Self> {
        Self::build_with_breaks(radius, n_r, n_theta, r_inf, &[])
    }

    pub fn build_with_breaks(
        radius: f64,
        n_r: usize,
        n_theta: usize,
        r_inf: f64,
        extra_breaks: &[f64],
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("radius > 0".into()));
        }
        if !(r_inf > radius) {
            return Err(Error::InvalidParameter(format!(
                "R_inf = {r_inf} must exceed the body radius {radius}"
            )));
        }
        if !(r_inf > 2.0 * radius) {
            return Err(Error::InvalidParameter(format!(
                "R_inf = {r_inf} must exceed 2a = {}",
                2.0 * radius
            )));
        }
        if n_r < 4 {
            return Err(Error::InvalidParameter("n_r ≥ 4".into()));
        }
        if n_theta < 8 {
            return Err(Error::InvalidParameter("n_theta ≥ 8".into()));
        }

        let mut breaks = vec![radius];
        let mut b = 2.0 * radius;
        while b < r_inf * (1.0 - 1e-12) {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(r_inf);
        for &e in extra_breaks {
            if e > radius && e < r_inf {
                breaks.push(e);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());

        let (gl_x, gl_w) = gauss_legendre(n_r);
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * n_r * n_theta);
        for panel in breaks.windows(2) {
            let (lo, hi) = (panel[0], panel[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&s, &ws) in gl_x.iter().zip(&gl_w) {
                let r = mid + half * s;
                let wr = half * ws * r * dtheta;
                for j in 0..n_theta {
                    let theta = j as f64 * dtheta;
                    nodes.push(Node {
                        x: [r * theta.cos(), r * theta.sin()],
                        r,
                        theta,
                        weight: wr,
                    });
                }
            }
        }
        let boundary = (0..n_theta)
            .map(|j| {
                let theta = j as f64 * dtheta;
                Node {
                    x: [radius * theta.cos(), radius * theta.sin()],
                    r: radius,
                    theta,
                    weight: radius * dtheta,
                }
            })
            .collect();

        Ok(Self {
            radius,
            r_inf,
            n_r,
            n_theta,
            breaks,
            nodes,
            boundary,
        })
    }

    /// Number of leading nodes with `r < support` (all nodes when the support
    /// is unbounded).
    pub fn extent(&self, support: f64) -> usize {
        if !support.is_finite() {
            return self.nodes.len();
        }
        self.nodes.partition_point(|n| n.r < support)
    }

    pub fn integrate_annulus(&self, f: impl Fn(&Node) -> f64) -> f64 {
        sum_fixed(self.nodes.iter().map(|n| n.weight * f(n)))
    }

    pub fn integrate_boundary(&self, f: impl Fn(&Node) -> f64) -> f64 {
        sum_fixed(self.boundary.iter().map(|n| n.weight * f(n)))
    }

    /// Trapezoid rule on the circle `|x| = rho`.
    pub fn integrate_circle(&self, rho: f64, f: impl Fn(Vec2, f64) -> f64) -> f64 {
        let dtheta = 2.0 * PI / self.n_theta as f64;
        sum_fixed((0..self.n_theta).map(|j| {
            let t = j as f64 * dtheta;
            rho * dtheta * f([rho * t.cos(), rho * t.sin()], t)
        }))
    }
}

/// Smallest `a·2^k` beyond which the `pi a^4 / R^2` tail of the slowest
/// decaying far-field integrand (`|grad Phi_i|^2`) drops below `tol`.
pub fn far_field_radius(radius: f64, tol: f64) -> f64 {
    let mut r = 4.0 * radius;
    while PI * radius.powi(4) / (r * r) >= tol {
        r *= 2.0;
    }
    r
}

/// Analytic tail of `∫_{|x|>R} |grad Phi_1|^2 dx` for the disk.
pub fn kirchhoff_tail(radius: f64, r_inf: f64) -> f64 {
    PI * radius.powi(4) / (r_inf * r_inf)
}

/// Neumaier-compensated sum in iteration order.
pub fn sum_fixed(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}
