//! Second-order jets of scalar stream functions and the radial profiles the
//! basis is built from.

use crate::geometry::{Mat2, Vec2};

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec2,
    pub hess: Mat2,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self { value, ..Default::default() }
    }

    /// Cartesian jet of `psi(r, theta)` from its polar partial derivatives.
    #[allow(clippy::too_many_arguments)]
    pub fn from_polar(
        r: f64,
        theta: f64,
        value: f64,
        d_r: f64,
        d_t: f64,
        d_rr: f64,
        d_rt: f64,
        d_tt: f64,
    ) -> Self {
        let (s, c) = theta.sin_cos();
        let ir = 1.0 / r;
        let ir2 = ir * ir;
        let cs = c * s;
        let c2s2 = c * c - s * s;
        let gx = c * d_r - s * ir * d_t;
        let gy = s * d_r + c * ir * d_t;
        let hxx = c * c * d_rr - 2.0 * cs * ir * d_rt + s * s * ir2 * d_tt + s * s * ir * d_r
            + 2.0 * cs * ir2 * d_t;
        let hyy = s * s * d_rr + 2.0 * cs * ir * d_rt + c * c * ir2 * d_tt + c * c * ir * d_r
            - 2.0 * cs * ir2 * d_t;
        let hxy = cs * d_rr + c2s2 * ir * d_rt - cs * ir2 * d_tt - cs * ir * d_r - c2s2 * ir2 * d_t;
        Self {
            value,
            grad: [gx, gy],
            hess: [[hxx, hxy], [hxy, hyy]],
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let (f, g) = (self, other);
        let mut hess = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                hess[i][j] = f.hess[i][j] * g.value
                    + f.grad[i] * g.grad[j]
                    + f.grad[j] * g.grad[i]
                    + f.value * g.hess[i][j];
            }
        }
        Jet {
            value: f.value * g.value,
            grad: [
                f.grad[0] * g.value + f.value * g.grad[0],
                f.grad[1] * g.value + f.value * g.grad[1],
            ],
            hess,
        }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            grad: [c * self.grad[0], c * self.grad[1]],
            hess: [
                [c * self.hess[0][0], c * self.hess[0][1]],
                [c * self.hess[1][0], c * self.hess[1][1]],
            ],
        }
    }

    /// `grad^perp psi = (-psi_y, psi_x)`.
    pub fn velocity(&self) -> Vec2 {
        [-self.grad[1], self.grad[0]]
    }

    /// `g[i][j] = d_j u_i` of `u = grad^perp psi`.
    pub fn velocity_grad(&self) -> Mat2 {
        let h = &self.hess;
        [[-h[0][1], -h[1][1]], [h[0][0], h[0][1]]]
    }
}

/// Polynomial in one variable, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn monomial(deg: usize) -> Self {
        let mut c = vec![0.0; deg + 1];
        c[deg] = 1.0;
        Poly(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    /// `(1 - s)^n`.
    pub fn one_minus_pow(n: usize) -> Poly {
        let mut p = Poly(vec![1.0]);
        for _ in 0..n {
            p = p.mul(&Poly(vec![1.0, -1.0]));
        }
        p
    }

    /// Shifted Legendre polynomial `P_n(2s - 1)`.
    pub fn shifted_legendre(n: usize) -> Poly {
        let x = Poly(vec![-1.0, 2.0]);
        let mut p0 = Poly(vec![1.0]);
        if n == 0 {
            return p0;
        }
        let mut p1 = x.clone();
        for k in 1..n {
            let kf = k as f64;
            let a = x.mul(&p1);
            let mut next = vec![0.0; a.0.len()];
            for (i, v) in a.0.iter().enumerate() {
                next[i] += (2.0 * kf + 1.0) / (kf + 1.0) * v;
            }
            for (i, v) in p0.0.iter().enumerate() {
                next[i] -= kf / (kf + 1.0) * v;
            }
            p0 = p1;
            p1 = Poly(next);
        }
        p1
    }

    /// `(p, p', p'')` at `s`.
    pub fn eval2(&self, s: f64) -> (f64, f64, f64) {
        let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for &c in self.0.iter().rev() {
            d2 = d2 * s + 2.0 * d1;
            d1 = d1 * s + p;
            p = p * s + c;
        }
        (p, d1, d2)
    }
}

/// Septic smoothstep `S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7`: `S(0) = 0`,
/// `S(1) = 1`, first three derivatives vanish at both ends.
pub fn smoothstep() -> Poly {
    Poly(vec![0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0])
}

/// Radial function with `(f, f', f'')` at `r`.
pub trait Radial {
    fn eval(&self, r: f64) -> (f64, f64, f64);
}

/// Polynomial in `s = (r - lo) / (hi - lo)` on `[lo, hi]`, constant outside
/// (`below` for `r < lo`, `above` for `r > hi`).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pub lo: f64,
    pub hi: f64,
    pub poly: Poly,
    pub below: f64,
    pub above: f64,
}

impl Radial for PiecewisePoly {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r < self.lo {
            return (self.below, 0.0, 0.0);
        }
        if r > self.hi {
            return (self.above, 0.0, 0.0);
        }
        let l = self.hi - self.lo;
        let (p, d1, d2) = self.poly.eval2((r - self.lo) / l);
        (p, d1 / l, d2 / (l * l))
    }
}

impl PiecewisePoly {
    /// `1` for `r ≤ rho`, `0` for `r ≥ 2 rho`, `C^3` in between.
    pub fn cutoff(rho: f64) -> Self {
        Self::cutoff_between(rho, 2.0 * rho)
    }

    pub fn cutoff_between(lo: f64, hi: f64) -> Self {
        let s = smoothstep();
        let mut c: Vec<f64> = s.0.iter().map(|v| -v).collect();
        c[0] += 1.0;
        Self { lo, hi, poly: Poly(c), below: 1.0, above: 0.0 }
    }

    /// `0` for `r ≤ lo`, `1` for `r ≥ hi`.
    pub fn ramp(lo: f64, hi: f64) -> Self {
        Self { lo, hi, poly: smoothstep(), below: 0.0, above: 1.0 }
    }
}

/// Angular factor `cos(k theta)` or `sin(k theta)` (`1` when `k = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn eval2(self, k: u32, theta: f64) -> (f64, f64, f64) {
        if k == 0 {
            return match self {
                Parity::Cos => (1.0, 0.0, 0.0),
                Parity::Sin => (0.0, 0.0, 0.0),
            };
        }
        let kf = k as f64;
        let (s, c) = (kf * theta).sin_cos();
        match self {
            Parity::Cos => (c, -kf * s, -kf * kf * c),
            Parity::Sin => (s, kf * c, -kf * kf * s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        }
    }
}

/// Jet of `f(r) T(k theta)`.
pub fn separable_jet(radial: (f64, f64, f64), k: u32, parity: Parity, x: Vec2) -> Jet {
    let r = x[0].hypot(x[1]);
    let theta = x[1].atan2(x[0]);
    let (f, f1, f2) = radial;
    let (t, t1, t2) = parity.eval2(k, theta);
    Jet::from_polar(r, theta, f * t, f1 * t, f * t1, f2 * t, f1 * t1, f * t2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jet(f: impl Fn(Vec2) -> f64, x: Vec2, h: f64) -> (Vec2, Mat2) {
        let e = |i: usize, s: f64| {
            let mut y = x;
            y[i] += s;
            y
        };
        let g = [
            (f(e(0, h)) - f(e(0, -h))) / (2.0 * h),
            (f(e(1, h)) - f(e(1, -h))) / (2.0 * h),
        ];
        let f0 = f(x);
        let hxx = (f(e(0, h)) - 2.0 * f0 + f(e(0, -h))) / (h * h);
        let hyy = (f(e(1, h)) - 2.0 * f0 + f(e(1, -h))) / (h * h);
        let pp = f([x[0] + h, x[1] + h]);
        let pm = f([x[0] + h, x[1] - h]);
        let mp = f([x[0] - h, x[1] + h]);
        let mm = f([x[0] - h, x[1] - h]);
        let hxy = (pp - pm - mp + mm) / (4.0 * h * h);
        (g, [[hxx, hxy], [hxy, hyy]])
    }

    #[test]
    fn polar_conversion_matches_finite_differences() {
        let psi = |x: Vec2| {
            let r = x[0].hypot(x[1]);
            let t = x[1].atan2(x[0]);
            r.powi(3) * (2.0 * t).cos() + r.ln() * t.sin()
        };
        let jet = |x: Vec2| {
            let r = x[0].hypot(x[1]);
            let t = x[1].atan2(x[0]);
            let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
            let (c1, s1) = (t.cos(), t.sin());
            Jet::from_polar(
                r,
                t,
                psi(x),
                3.0 * r * r * c2 + s1 / r,
                -2.0 * r.powi(3) * s2 + r.ln() * c1,
                6.0 * r * c2 - s1 / (r * r),
                -6.0 * r * r * s2 + c1 / r,
                -4.0 * r.powi(3) * c2 - r.ln() * s1,
            )
        };
        for x in [[1.3, 0.4], [-0.7, 1.9], [-2.1, -0.3], [0.2, -1.4]] {
            let j = jet(x);
            let (g, h) = fd_jet(psi, x, 1e-4);
            for i in 0..2 {
                assert!((j.grad[i] - g[i]).abs() < 1e-6, "{x:?} grad {i}");
                for k in 0..2 {
                    assert!((j.hess[i][k] - h[i][k]).abs() < 1e-5, "{x:?} hess {i}{k}");
                }
            }
        }
    }

    #[test]
    fn product_rule() {
        let f = Jet { value: 2.0, grad: [1.0, -1.0], hess: [[0.5, 0.1], [0.1, -0.3]] };
        let g = Jet { value: -1.0, grad: [0.2, 0.7], hess: [[1.0, 0.0], [0.0, 2.0]] };
        let p = f.mul(&g);
        assert_eq!(p.value, -2.0);
        assert!((p.grad[0] - (1.0 * -1.0 + 2.0 * 0.2)).abs() < 1e-15);
        assert!((p.hess[0][1] - (0.1 * -1.0 + 1.0 * 0.7 + -1.0 * 0.2 + 0.0)).abs() < 1e-15);
    }

    #[test]
    fn velocity_is_divergence_free() {
        let j = Jet { value: 0.0, grad: [0.3, 0.4], hess: [[1.2, -0.7], [-0.7, 3.1]] };
        let g = j.velocity_grad();
        assert_eq!(g[0][0] + g[1][1], 0.0);
    }

    #[test]
    fn shifted_legendre_values() {
        for n in 0..6 {
            let p = Poly::shifted_legendre(n);
            let (v1, _, _) = p.eval2(1.0);
            let (v0, _, _) = p.eval2(0.0);
            assert!((v1 - 1.0).abs() < 1e-13);
            assert!((v0 - if n % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-13);
        }
        let p2 = Poly::shifted_legendre(2);
        // P_2(2s-1) = 6s^2 - 6s + 1
        assert!((p2.0[0] - 1.0).abs() < 1e-14 && (p2.0[1] + 6.0).abs() < 1e-14 && (p2.0[2] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn cutoff_is_smooth_at_ends() {
        let c = PiecewisePoly::cutoff(2.5);
        assert_eq!(c.eval(2.0), (1.0, 0.0, 0.0));
        assert_eq!(c.eval(6.0), (0.0, 0.0, 0.0));
        let (v, d1, d2) = c.eval(2.5 + 1e-9);
        assert!((v - 1.0).abs() < 1e-12 && d1.abs() < 1e-12 && d2.abs() < 1e-12);
        let (v, d1, d2) = c.eval(5.0 - 1e-9);
        assert!(v.abs() < 1e-12 && d1.abs() < 1e-12 && d2.abs() < 1e-12);
        let (_, d1, _) = c.eval(3.75);
        assert!(d1 < 0.0);
    }
}
