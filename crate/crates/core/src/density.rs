//! Constructive approximation by smooth rigid-inside fields: stream-function
//! mollification with boundary-constant Poisson solves on a polar grid, the
//! cutoff decomposition `v = u + w + z`, and the trace obstruction for
//! globally smooth fields.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::{normal_tangent, perp, rigid_velocity, sum_fixed, Mat2, Vec2};
use crate::spaces::basis::{audit_element, rigid_mode_with_cutoff, AuditReport, BasisElement, BasisParams};
use crate::spaces::jet::{Jet, PiecewisePoly, Poly, Radial};

/// Annulus `a ≤ r ≤ R` with `ln r` and `theta` uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub inner: f64,
    pub outer: f64,
    /// Number of radial intervals; rings are `0..=n_r`.
    pub n_r: usize,
    pub n_theta: usize,
    pub h_rho: f64,
    pub h_theta: f64,
    pub radii: Vec<f64>,
}

impl PolarGrid {
    pub fn new(inner: f64, outer: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::InvalidParameter("0 < a < R_outer".into()));
        }
        if n_r < 4 || n_theta < 8 {
            return Err(Error::InvalidParameter("n_r ≥ 4 and n_theta ≥ 8".into()));
        }
        let h_rho = (outer / inner).ln() / n_r as f64;
        let mut radii: Vec<f64> = (0..=n_r).map(|i| inner * (i as f64 * h_rho).exp()).collect();
        radii[n_r] = outer;
        Ok(Self { inner, outer, n_r, n_theta, h_rho, h_theta: 2.0 * PI / n_theta as f64, radii })
    }

    pub fn len(&self) -> usize {
        (self.n_r + 1) * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.h_theta
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        let (r, t) = (self.radii[i], self.theta(j));
        [r * t.cos(), r * t.sin()]
    }

    /// Trapezoid area weight `r^2 h_rho h_theta` (halved on the two boundary rings).
    pub fn weight(&self, i: usize) -> f64 {
        let r = self.radii[i];
        let w = r * r * self.h_rho * self.h_theta;
        if i == 0 || i == self.n_r {
            0.5 * w
        } else {
            w
        }
    }

    /// Largest node spacing on the ring `i`.
    pub fn spacing(&self, i: usize) -> f64 {
        self.radii[i] * self.h_rho.max(self.h_theta) * 1.05
    }

    pub fn sample(&self, f: impl Fn(Vec2) -> f64 + Sync) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|p| self.point(p / self.n_theta, p % self.n_theta))
            .map(&f)
            .collect()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        sum_fixed(values.iter().enumerate().map(|(p, v)| self.weight(p / self.n_theta) * v))
    }

    fn d_rho(&self, f: &[f64], i: usize, j: usize) -> f64 {
        let n = self.n_r;
        let at = |k: usize| f[self.idx(k, j)];
        let h = self.h_rho;
        match i {
            0 => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
            i if i == n => (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h),
            i => (at(i + 1) - at(i - 1)) / (2.0 * h),
        }
    }

    fn d_theta(&self, f: &[f64], i: usize, j: usize) -> f64 {
        let m = self.n_theta;
        (f[self.idx(i, (j + 1) % m)] - f[self.idx(i, (j + m - 1) % m)]) / (2.0 * self.h_theta)
    }
}

/// `-Δψ = source` in the annulus, `ψ = inner_value` on `r = a`, `ψ = outer_value` on `r = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamPoissonProblem {
    pub grid: PolarGrid,
    pub source: Vec<f64>,
    pub inner_value: f64,
    pub outer_value: f64,
}

pub const SOLVE_TOL: f64 = 1e-10;

/// Five-point flux-form Laplacian applied at interior nodes.
pub fn discrete_laplacian(grid: &PolarGrid, psi: &[f64]) -> Vec<f64> {
    let (h2r, h2t) = (grid.h_rho * grid.h_rho, grid.h_theta * grid.h_theta);
    let m = grid.n_theta;
    let mut out = vec![0.0; grid.len()];
    for i in 1..grid.n_r {
        let r2 = grid.radii[i] * grid.radii[i];
        for j in 0..m {
            let c = psi[grid.idx(i, j)];
            let rr = (psi[grid.idx(i + 1, j)] - 2.0 * c + psi[grid.idx(i - 1, j)]) / h2r;
            let tt = (psi[grid.idx(i, (j + 1) % m)] - 2.0 * c + psi[grid.idx(i, (j + m - 1) % m)]) / h2t;
            out[grid.idx(i, j)] = (rr + tt) / r2;
        }
    }
    out
}

/// FFT in `theta`, tridiagonal solves in `ln r`.
pub fn solve_stream(problem: &StreamPoissonProblem) -> Result<Vec<f64>> {
    let g = &problem.grid;
    if problem.source.len() != g.len() {
        return Err(Error::InvalidParameter("source length must match the grid".into()));
    }
    let (n, m) = (g.n_r, g.n_theta);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    // spectral right-hand sides, ring by ring
    let mut hat: Vec<Vec<Complex<f64>>> = (0..=n)
        .map(|i| {
            let scale = g.h_rho * g.h_rho * g.radii[i] * g.radii[i];
            let mut row: Vec<Complex<f64>> =
                (0..m).map(|j| Complex::new(scale * problem.source[g.idx(i, j)], 0.0)).collect();
            fwd.process(&mut row);
            row
        })
        .collect();
    let mf = m as f64;
    hat[0] = vec![Complex::new(0.0, 0.0); m];
    hat[n] = vec![Complex::new(0.0, 0.0); m];
    hat[0][0] = Complex::new(problem.inner_value * mf, 0.0);
    hat[n][0] = Complex::new(problem.outer_value * mf, 0.0);
    let ratio = g.h_rho / g.h_theta;
    let mut sol = vec![vec![Complex::new(0.0, 0.0); m]; n + 1];
    for (k, _) in (0..m).enumerate() {
        let lam = 4.0 * ratio * ratio * (PI * k as f64 / mf).sin().powi(2);
        let diag = 2.0 + lam;
        // Thomas sweep on rings 1..n-1 with sub/super diagonals -1
        let mut cp = vec![0.0; n + 1];
        let mut dp = vec![Complex::new(0.0, 0.0); n + 1];
        let lo = hat[0][k];
        let hi = hat[n][k];
        for i in 1..n {
            let mut rhs = hat[i][k];
            if i == 1 {
                rhs += lo;
            }
            if i == n - 1 {
                rhs += hi;
            }
            let denom = if i == 1 { diag } else { diag + cp[i - 1] };
            let prev = if i == 1 { Complex::new(0.0, 0.0) } else { dp[i - 1] };
            cp[i] = -1.0 / denom;
            dp[i] = (rhs + prev) / denom;
        }
        sol[n][k] = hi;
        sol[0][k] = lo;
        let mut next = Complex::new(0.0, 0.0);
        for i in (1..n).rev() {
            let v = if i == n - 1 { dp[i] } else { dp[i] - cp[i] * next };
            sol[i][k] = v;
            next = v;
        }
    }
    let mut psi = vec![0.0; g.len()];
    for (i, row) in sol.iter_mut().enumerate() {
        inv.process(row);
        for j in 0..m {
            psi[g.idx(i, j)] = row[j].re / mf;
        }
    }
    for j in 0..m {
        psi[g.idx(0, j)] = problem.inner_value;
        psi[g.idx(n, j)] = problem.outer_value;
    }
    let lap = discrete_laplacian(g, &psi);
    let scale = problem.source.iter().fold(1.0f64, |s, v| s.max(v.abs()))
        .max(problem.inner_value.abs())
        .max(problem.outer_value.abs());
    let mut residual = 0.0f64;
    for i in 1..n {
        for j in 0..m {
            let p = g.idx(i, j);
            residual = residual.max((lap[p] + problem.source[p]).abs());
        }
    }
    if !(residual <= SOLVE_TOL * scale) {
        return Err(Error::SolverDiverged { residual, tolerance: SOLVE_TOL * scale });
    }
    Ok(psi)
}

fn bump(s2: f64) -> f64 {
    if s2 < 1.0 {
        (-1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// `(chi_{3 eps} omega) * eta_eps`, with the kernel renormalized to unit
/// discrete mass at every target.
pub fn mollify_vorticity(grid: &PolarGrid, omega: &[f64], eps: f64) -> Result<Vec<f64>> {
    let thickness = grid.outer - grid.inner;
    if !(eps > 0.0) || eps > 0.25 * thickness {
        return Err(Error::MollifierRadius { eps, reason: "must lie in (0, thickness / 4]".into() });
    }
    if eps < 2.0 * grid.spacing(0) {
        return Err(Error::MollifierRadius { eps, reason: "kernel not resolved by the grid".into() });
    }
    let m = grid.n_theta;
    let dist = |r: f64| (r - grid.inner).min(grid.outer - r);
    let cut: Vec<f64> = omega
        .iter()
        .enumerate()
        .map(|(p, w)| if dist(grid.radii[p / m]) > 3.0 * eps { *w } else { 0.0 })
        .collect();
    // rings carrying nonzero source
    let active: Vec<bool> = (0..=grid.n_r).map(|i| (0..m).any(|j| cut[grid.idx(i, j)] != 0.0)).collect();
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let (i, j) = (p / m, p % m);
            let r = grid.radii[i];
            if dist(r) <= 2.0 * eps {
                return 0.0;
            }
            let x = grid.point(i, j);
            let lo = grid.radii.partition_point(|q| *q < r - eps);
            let hi = grid.radii.partition_point(|q| *q <= r + eps);
            if !(lo..hi).any(|k| active[k]) {
                return 0.0;
            }
            let span = ((eps / (r - eps)).min(1.0).asin() / grid.h_theta).ceil() as isize + 1;
            let span = span.min(m as isize / 2);
            let (mut num, mut den) = (0.0, 0.0);
            for k in lo..hi {
                let wk = grid.weight(k);
                for dj in -span..=span {
                    let jj = (j as isize + dj).rem_euclid(m as isize) as usize;
                    let y = grid.point(k, jj);
                    let d2 = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)) / (eps * eps);
                    let e = bump(d2) * wk;
                    if e > 0.0 {
                        num += e * cut[grid.idx(k, jj)];
                        den += e;
                    }
                }
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect();
    Ok(out)
}

/// Velocity `grad^perp psi` and its gradient from a grid stream function.
pub fn grid_velocity(grid: &PolarGrid, psi: &[f64]) -> (Vec<Vec2>, Vec<Mat2>) {
    let m = grid.n_theta;
    let vel: Vec<Vec2> = (0..grid.len())
        .map(|p| {
            let (i, j) = (p / m, p % m);
            let r = grid.radii[i];
            let ur = -grid.d_theta(psi, i, j) / r;
            let ut = grid.d_rho(psi, i, j) / r;
            let t = grid.theta(j);
            let (c, s) = (t.cos(), t.sin());
            [ur * c - ut * s, ur * s + ut * c]
        })
        .collect();
    let comp: [Vec<f64>; 2] = [vel.iter().map(|v| v[0]).collect(), vel.iter().map(|v| v[1]).collect()];
    let grad = (0..grid.len())
        .map(|p| {
            let (i, j) = (p / m, p % m);
            let r = grid.radii[i];
            let t = grid.theta(j);
            let (c, s) = (t.cos(), t.sin());
            let mut g = [[0.0; 2]; 2];
            for (k, f) in comp.iter().enumerate() {
                let dr = grid.d_rho(f, i, j) / r;
                let dt = grid.d_theta(f, i, j) / r;
                g[k] = [c * dr - s * dt, s * dr + c * dt];
            }
            g
        })
        .collect();
    (vel, grad)
}

/// Discrete divergence `(D_rho(r u_r) + D_theta(r u_theta)) / r^2` of `grad^perp psi`.
pub fn grid_divergence(grid: &PolarGrid, psi: &[f64]) -> Vec<f64> {
    let m = grid.n_theta;
    let rur: Vec<f64> = (0..grid.len()).map(|p| -grid.d_theta(psi, p / m, p % m)).collect();
    let rut: Vec<f64> = (0..grid.len()).map(|p| grid.d_rho(psi, p / m, p % m)).collect();
    (0..grid.len())
        .map(|p| {
            let (i, j) = (p / m, p % m);
            (grid.d_rho(&rur, i, j) + grid.d_theta(&rut, i, j)) / (grid.radii[i] * grid.radii[i])
        })
        .collect()
}

type StreamFn = Arc<dyn Fn(Vec2) -> Jet + Send + Sync>;

/// A test field given by a fluid stream function and a rigid part.
#[derive(Clone)]
pub struct DensityInput {
    pub label: String,
    pub l: Vec2,
    pub r: f64,
    /// Radius beyond which the fluid part vanishes.
    pub support: f64,
    /// Known member of the smooth class: approximated by itself.
    pub smooth: bool,
    psi: StreamFn,
}

impl std::fmt::Debug for DensityInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityInput")
            .field("label", &self.label)
            .field("l", &self.l)
            .field("r", &self.r)
            .field("support", &self.support)
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl DensityInput {
    pub fn from_element(w: BasisElement) -> Self {
        let (l, r, support, label) = (w.l, w.r, w.support, w.label());
        Self { label, l, r, support, smooth: true, psi: Arc::new(move |x| w.stream_jet(x)) }
    }

    /// Rigid mode `i` cut off by the `C^1` cubic `1 - 3s^2 + 2s^3` between `rho` and `2 rho`.
    pub fn rigid_with_cubic_cutoff(i: usize, rho: f64) -> Result<Self> {
        if !(1..=3).contains(&i) {
            return Err(Error::InvalidIndex { index: i, expected: "1..=3" });
        }
        let cutoff = PiecewisePoly { lo: rho, hi: 2.0 * rho, poly: Poly(vec![1.0, 0.0, -3.0, 2.0]), below: 1.0, above: 0.0 };
        let (l, r) = match i {
            1 => ([1.0, 0.0], 0.0),
            2 => ([0.0, 1.0], 0.0),
            _ => ([0.0, 0.0], 1.0),
        };
        let psi = move |x: Vec2| {
            let rr = x[0].hypot(x[1]);
            let chi = crate::spaces::jet::separable_jet(cutoff.eval(rr), 0, crate::spaces::Parity::Cos, x);
            chi.mul(&rigid_stream(l, r, x))
        };
        Ok(Self { label: format!("rigid_{i}_cubic_cutoff"), l, r, support: 2.0 * rho, smooth: false, psi: Arc::new(psi) })
    }

    /// Fluid-only slip field `g(r) cos(k theta)` with the `C^1` profile
    /// `g = L s (1 - s)^2`, `s = (r - a) / L`.
    pub fn c1_slip(radius: f64, k: u32, width: f64) -> Self {
        let profile = PiecewisePoly {
            lo: radius,
            hi: radius + width,
            poly: Poly(vec![0.0, width, -2.0 * width, width]),
            below: 0.0,
            above: 0.0,
        };
        let psi = move |x: Vec2| {
            let rr = x[0].hypot(x[1]);
            if rr > profile.hi {
                return Jet::default();
            }
            crate::spaces::jet::separable_jet(profile.eval(rr.max(radius)), k, crate::spaces::Parity::Cos, x)
        };
        Self { label: format!("c1_slip_k{k}"), l: [0.0; 2], r: 0.0, support: radius + width, smooth: false, psi: Arc::new(psi) }
    }

    /// `self + other`.
    pub fn plus(self, other: DensityInput) -> Self {
        let (a, b) = (self.psi.clone(), other.psi.clone());
        Self {
            label: format!("{}+{}", self.label, other.label),
            l: [self.l[0] + other.l[0], self.l[1] + other.l[1]],
            r: self.r + other.r,
            support: self.support.max(other.support),
            smooth: self.smooth && other.smooth,
            psi: Arc::new(move |x| {
                let (p, q) = (a(x), b(x));
                Jet {
                    value: p.value + q.value,
                    grad: [p.grad[0] + q.grad[0], p.grad[1] + q.grad[1]],
                    hess: [
                        [p.hess[0][0] + q.hess[0][0], p.hess[0][1] + q.hess[0][1]],
                        [p.hess[1][0] + q.hess[1][0], p.hess[1][1] + q.hess[1][1]],
                    ],
                }
            }),
        }
    }

    pub fn stream(&self, x: Vec2) -> Jet {
        (self.psi)(x)
    }

    /// Membership checks for the energy space with one derivative: finite
    /// support, matching normal trace and finite fluid derivatives.
    pub fn audit(&self, radius: f64) -> Result<()> {
        if !self.support.is_finite() {
            return Err(Error::Audit(format!("{}: unbounded support", self.label)));
        }
        for j in 0..64 {
            let t = 2.0 * PI * j as f64 / 64.0;
            let (n, _) = normal_tangent(t);
            let x = [radius * t.cos(), radius * t.sin()];
            let jet = self.stream(x);
            let v = jet.velocity();
            let s = rigid_velocity(self.l, self.r, x);
            let jump = (v[0] - s[0]) * n[0] + (v[1] - s[1]) * n[1];
            if !(jump.abs() < 1e-10) || jet.hess.iter().flatten().any(|h| !h.is_finite()) {
                return Err(Error::Audit(format!("{}: normal trace mismatch {jump:e}", self.label)));
            }
        }
        Ok(())
    }
}

fn rigid_stream(l: Vec2, r: f64, x: Vec2) -> Jet {
    // psi with grad^perp psi = l + r x^perp
    Jet {
        value: l[1] * x[0] - l[0] * x[1] + 0.5 * r * (x[0] * x[0] + x[1] * x[1]),
        grad: [l[1] + r * x[0], -l[0] + r * x[1]],
        hess: [[r, 0.0], [0.0, r]],
    }
}

/// Truncation and grid for [`approximate_in_y`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySettings {
    /// Cutoff radius `R`; the rigid carrier is cut off at `R / 4`.
    pub truncation: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub eps: Vec<f64>,
}

impl Default for DensitySettings {
    fn default() -> Self {
        Self { truncation: 9.0, n_r: 384, n_theta: 512, eps: vec![0.2, 0.1, 0.05] }
    }
}

/// One approximant `v_eps = u + w_eps + z_eps`.
#[derive(Debug, Clone)]
pub struct Approximant {
    pub eps: f64,
    /// Rigid carrier `u` as rigid modes with coefficients.
    pub carrier: Vec<(f64, BasisElement)>,
    /// Grid stream function of `w_eps`; empty on the identity path.
    pub w_stream: Vec<f64>,
    pub l: Vec2,
    pub r: f64,
    pub error_h: f64,
    pub error_grad: f64,
    pub audit: AuditReport,
}

impl Approximant {
    /// `‖v - v_eps‖_V̲`.
    pub fn error(&self) -> f64 {
        self.error_h + self.error_grad
    }
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    pub label: String,
    pub grid: PolarGrid,
    pub approximants: Vec<Approximant>,
}

impl DensityReport {
    pub fn errors(&self) -> Vec<f64> {
        self.approximants.iter().map(|a| a.error()).collect()
    }
}

/// `1` for `r ≤ R`, `0` for `r ≥ 2R`.
fn cutoff_jet(radius: f64, x: Vec2) -> Jet {
    let r = x[0].hypot(x[1]);
    crate::spaces::jet::separable_jet(PiecewisePoly::cutoff(radius).eval(r), 0, crate::spaces::Parity::Cos, x)
}

/// Audit of a grid stream field in the fluid: discrete divergence, normal
/// trace on `r = a`, constant stream function past `support`.
pub fn audit_grid_stream(grid: &PolarGrid, psi: &[f64], support: f64) -> AuditReport {
    let m = grid.n_theta;
    let div = grid_divergence(grid, psi);
    let (_, grad) = grid_velocity(grid, psi);
    let scale = 1.0 + grad.iter().flatten().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let divergence = div.iter().fold(0.0f64, |s, v| s.max(v.abs())) / scale;
    let normal_jump = (0..m).fold(0.0f64, |s, j| s.max((grid.d_theta(psi, 0, j) / grid.radii[0]).abs()));
    let outside = |p: &usize| grid.radii[p / m] >= support;
    let constant = (0..grid.len()).find(outside).map(|p| psi[p]).unwrap_or(0.0);
    let outside_support = (0..grid.len())
        .filter(outside)
        .fold(0.0f64, |s, p| s.max((psi[p] - constant).abs()));
    AuditReport { divergence, normal_jump, outside_support, rigidity: 0.0 }
}

fn combine(a: AuditReport, b: AuditReport) -> AuditReport {
    AuditReport {
        divergence: a.divergence.max(b.divergence),
        normal_jump: a.normal_jump.max(b.normal_jump),
        outside_support: a.outside_support.max(b.outside_support),
        rigidity: a.rigidity.max(b.rigidity),
    }
}

/// Approximate `v` along the `eps` schedule by fields that are smooth in the
/// fluid and rigid in the body, reporting `‖v - v_eps‖_V̲` on the grid.
pub fn approximate_in_y(v: &DensityInput, radius: f64, settings: &DensitySettings, seed: u64) -> Result<DensityReport> {
    use rand::SeedableRng;
    v.audit(radius)?;
    let big_r = settings.truncation;
    if !(big_r / 4.0 > 2.0 * radius) {
        return Err(Error::InvalidParameter("truncation R with R / 4 > diam of the body".into()));
    }
    if v.support > big_r {
        return Err(Error::InvalidParameter(format!("input support {} exceeds R = {big_r}", v.support)));
    }
    let params = BasisParams::for_radius(radius);
    let mut carrier = Vec::new();
    for (i, c) in [(1, v.l[0]), (2, v.l[1]), (3, v.r)] {
        if c != 0.0 {
            carrier.push((c, rigid_mode_with_cutoff(&params, i, big_r / 4.0)?));
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let carrier_audit = carrier
        .iter()
        .map(|(_, w)| audit_element(w, radius, 50, &mut rng))
        .fold(AuditReport::default(), combine);
    let grid = PolarGrid::new(radius, 4.0 * big_r, settings.n_r, settings.n_theta)?;
    if v.smooth {
        let approximants = settings
            .eps
            .iter()
            .map(|&eps| Approximant {
                eps,
                carrier: carrier.clone(),
                w_stream: Vec::new(),
                l: v.l,
                r: v.r,
                error_h: 0.0,
                error_grad: 0.0,
                audit: carrier_audit,
            })
            .collect();
        return Ok(DensityReport { label: v.label.clone(), grid, approximants });
    }

    // v_1 = v - u: fluid stream function phi, zero rigid part
    let phi = |x: Vec2| -> Jet {
        let mut j = v.stream(x);
        for (c, w) in &carrier {
            let k = w.stream_jet(x).scale(*c);
            j.value -= k.value;
            for a in 0..2 {
                j.grad[a] -= k.grad[a];
                for b in 0..2 {
                    j.hess[a][b] -= k.hess[a][b];
                }
            }
        }
        j
    };
    let target: Vec<Jet> = (0..grid.len())
        .into_par_iter()
        .map(|p| phi(grid.point(p / grid.n_theta, p % grid.n_theta)))
        .collect();
    // w = grad^perp(chi_R phi)
    let w_jets: Vec<Jet> = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            let x = grid.point(p / grid.n_theta, p % grid.n_theta);
            cutoff_jet(big_r, x).mul(&target[p])
        })
        .collect();
    // flux-form curl of the sampled stream function keeps kinks conservative
    let w_values: Vec<f64> = w_jets.iter().map(|j| j.value).collect();
    let omega = discrete_laplacian(&grid, &w_values);
    let boundary_value = w_jets[0].value;
    let m = grid.n_theta;
    let outer_mask: Vec<bool> = (0..grid.len()).map(|p| grid.radii[p / m] >= 2.0 * big_r).collect();
    let outer_area = grid.integrate(&outer_mask.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect::<Vec<_>>());

    let approximants = settings
        .eps
        .iter()
        .map(|&eps| {
            let source: Vec<f64> = mollify_vorticity(&grid, &omega, eps)?.into_iter().map(|w| -w).collect();
            let problem = StreamPoissonProblem { grid: grid.clone(), source, inner_value: boundary_value, outer_value: 0.0 };
            let psi = solve_stream(&problem)?;
            let masked: Vec<f64> = psi.iter().zip(&outer_mask).map(|(p, b)| if *b { *p } else { 0.0 }).collect();
            let mean = grid.integrate(&masked) / outer_area;
            let w_stream: Vec<f64> = (0..grid.len())
                .map(|p| {
                    let x = grid.point(p / m, p % m);
                    cutoff_jet(2.0 * big_r, x).value * (psi[p] - mean)
                })
                .collect();
            let (vel, grad) = grid_velocity(&grid, &w_stream);
            let dh: Vec<f64> = (0..grid.len())
                .map(|p| {
                    let t = target[p].velocity();
                    (t[0] - vel[p][0]).powi(2) + (t[1] - vel[p][1]).powi(2)
                })
                .collect();
            let dg: Vec<f64> = (0..grid.len())
                .map(|p| {
                    let t = target[p].velocity_grad();
                    let g = &grad[p];
                    (0..2).map(|a| (0..2).map(|b| (t[a][b] - g[a][b]).powi(2)).sum::<f64>()).sum::<f64>()
                })
                .collect();
            let audit = combine(carrier_audit, audit_grid_stream(&grid, &w_stream, 4.0 * big_r));
            Ok(Approximant {
                eps,
                carrier: carrier.clone(),
                w_stream,
                l: v.l,
                r: v.r,
                error_h: grid.integrate(&dh).sqrt(),
                error_grad: grid.integrate(&dg).sqrt(),
                audit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport { label: v.label.clone(), grid, approximants })
}

/// The field `f = 0` in the body, `grad^perp(|x|^2 chi)` in the fluid, with
/// `chi = 1` on `B_2` and `0` outside `B_4`.
pub fn counterexample_jet(x: Vec2) -> Jet {
    let r = x[0].hypot(x[1]);
    let chi = crate::spaces::jet::separable_jet(
        PiecewisePoly::cutoff_between(2.0, 4.0).eval(r),
        0,
        crate::spaces::Parity::Cos,
        x,
    );
    let sq = Jet { value: x[0] * x[0] + x[1] * x[1], grad: [2.0 * x[0], 2.0 * x[1]], hess: [[2.0, 0.0], [0.0, 2.0]] };
    chi.mul(&sq)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    /// `max |f(x) - 2 x^perp|` over the boundary nodes.
    pub trace_error: f64,
    /// Finite-difference divergence of `f` at sample points outside `B_1`.
    pub divergence: f64,
    pub l: Vec2,
    pub r: f64,
    /// `(delta, ‖f - f_delta‖_{L^2}, ‖grad(f - f_delta)‖_{L^2})` for fields
    /// `f_delta` that are globally smooth and vanish in the body.
    pub smoothings: Vec<(f64, f64, f64)>,
}

/// Trace of the obstructing field and the failure of smooth approximation in `H^1`.
pub fn counterexample_trace(n_theta: usize, seed: u64) -> Result<CounterexampleReport> {
    use rand::{Rng, SeedableRng};
    if n_theta < 8 {
        return Err(Error::InvalidParameter("n_theta ≥ 8".into()));
    }
    let mut trace_error = 0.0f64;
    for j in 0..n_theta {
        let t = 2.0 * PI * j as f64 / n_theta as f64;
        let x = [t.cos(), t.sin()];
        let f = counterexample_jet(x).velocity();
        let p = perp(x);
        trace_error = trace_error.max((f[0] - 2.0 * p[0]).hypot(f[1] - 2.0 * p[1]));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-3;
    let mut divergence = 0.0f64;
    for _ in 0..200 {
        let r = rng.gen_range(1.001..5.0);
        let t = rng.gen_range(0.0..2.0 * PI);
        let x = [r * t.cos(), r * t.sin()];
        let u = |dx: f64, dy: f64| counterexample_jet([x[0] + dx, x[1] + dy]).velocity();
        let d4 = |f: &dyn Fn(f64) -> f64| (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
        let d = d4(&|s| u(s, 0.0)[0]) + d4(&|s| u(0.0, s)[1]);
        divergence = divergence.max(d.abs());
    }
    let grid = crate::geometry::QuadratureGrid::build_with_breaks(1.0, 24, n_theta.max(16), 8.0, &[1.025, 1.05, 1.1, 1.2, 1.4, 4.0])?;
    let smoothings = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&delta| {
            let ramp = PiecewisePoly::ramp(1.0, 1.0 + delta);
            let (mut l2, mut h1) = (Vec::new(), Vec::new());
            for n in &grid.nodes {
                let f = counterexample_jet(n.x);
                let eta = crate::spaces::jet::separable_jet(ramp.eval(n.r), 0, crate::spaces::Parity::Cos, n.x);
                let shifted = Jet { value: f.value - 1.0, ..f };
                let fd = eta.mul(&shifted);
                let (a, b) = (f.velocity(), fd.velocity());
                let (ga, gb) = (f.velocity_grad(), fd.velocity_grad());
                l2.push(n.weight * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)));
                h1.push(n.weight * (0..2).map(|i| (0..2).map(|k| (ga[i][k] - gb[i][k]).powi(2)).sum::<f64>()).sum::<f64>());
            }
            (delta, sum_fixed(l2).sqrt(), sum_fixed(h1).sqrt())
        })
        .collect();
    Ok(CounterexampleReport { trace_error, divergence, l: [0.0; 2], r: 0.0, smoothings })
}
