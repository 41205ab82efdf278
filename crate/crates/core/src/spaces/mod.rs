//! Fields in the energy space: rigid inside the body, divergence-free
//! stream-function fluid part outside, plus an optional multiple of `H`.

pub mod basis;
pub mod jet;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use basis::{
    audit_element, make_far_field_mode, make_fluid_mode, make_kirchhoff_field, make_rigid_mode,
    make_slip_mode, rigid_mode_with_cutoff, AuditReport, BasisElement, BasisParams, ElementKind,
    StreamBasis,
};
pub use jet::Parity;

use crate::error::{Error, Result};
use crate::geometry::{far_field_radius, rigid_velocity, sum_fixed, BodyConfig, Mat2, QuadratureGrid, Vec2};
use crate::harmonic::HarmonicField;

/// A field sampled at the quadrature nodes.
///
/// Only the first `extent` annulus nodes are stored; the field vanishes on the
/// remaining ones. `trace` holds the fluid-side values on the boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub extent: usize,
    pub vel: Vec<Vec2>,
    pub grad: Vec<Mat2>,
    pub trace: Vec<Vec2>,
    pub l: Vec2,
    pub r: f64,
}

impl Samples {
    pub fn zero(grid: &QuadratureGrid) -> Self {
        Self {
            extent: 0,
            vel: Vec::new(),
            grad: Vec::new(),
            trace: vec![[0.0; 2]; grid.boundary.len()],
            l: [0.0; 2],
            r: 0.0,
        }
    }

    pub fn of_element(w: &BasisElement, grid: &QuadratureGrid) -> Self {
        let extent = grid.extent(w.support);
        let (vel, grad) = grid.nodes[..extent]
            .iter()
            .map(|n| {
                let j = w.stream_jet(n.x);
                (j.velocity(), j.velocity_grad())
            })
            .unzip();
        Self {
            extent,
            vel,
            grad,
            trace: grid.boundary.iter().map(|n| w.velocity(n.x)).collect(),
            l: w.l,
            r: w.r,
        }
    }

    /// `H` on every node, with zero rigid part.
    pub fn harmonic(h: &HarmonicField, grid: &QuadratureGrid) -> Self {
        Self {
            extent: grid.nodes.len(),
            vel: grid.nodes.iter().map(|n| h.eval(n.x)).collect(),
            grad: grid.nodes.iter().map(|n| h.grad(n.x)).collect(),
            trace: grid.boundary.iter().map(|n| h.eval(n.x)).collect(),
            l: [0.0; 2],
            r: 0.0,
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &Samples) {
        if other.extent > self.extent {
            self.vel.resize(other.extent, [0.0; 2]);
            self.grad.resize(other.extent, [[0.0; 2]; 2]);
            self.extent = other.extent;
        }
        for (a, b) in self.vel.iter_mut().zip(&other.vel) {
            a[0] += c * b[0];
            a[1] += c * b[1];
        }
        for (a, b) in self.grad.iter_mut().zip(&other.grad) {
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j] += c * b[i][j];
                }
            }
        }
        for (a, b) in self.trace.iter_mut().zip(&other.trace) {
            a[0] += c * b[0];
            a[1] += c * b[1];
        }
        self.l[0] += c * other.l[0];
        self.l[1] += c * other.l[1];
        self.r += c * other.r;
    }

    pub fn combination(grid: &QuadratureGrid, coeffs: &[f64], table: &[Samples]) -> Self {
        let mut s = Samples::zero(grid);
        for (c, t) in coeffs.iter().zip(table) {
            if *c != 0.0 {
                s.add_scaled(*c, t);
            }
        }
        s
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut s = Samples { extent: 0, vel: vec![], grad: vec![], trace: vec![[0.0; 2]; self.trace.len()], l: [0.0; 2], r: 0.0 };
        s.add_scaled(c, self);
        s
    }
}

/// `(u, v)_ℋ = ∫_F u·v + m l_u·l_v + J r_u r_v`.
pub fn inner_h(u: &Samples, v: &Samples, body: &BodyConfig, grid: &QuadratureGrid) -> f64 {
    let n = u.extent.min(v.extent);
    let fluid = sum_fixed(
        (0..n).map(|p| grid.nodes[p].weight * (u.vel[p][0] * v.vel[p][0] + u.vel[p][1] * v.vel[p][1])),
    );
    fluid + body.mass * (u.l[0] * v.l[0] + u.l[1] * v.l[1]) + body.inertia * u.r * v.r
}

/// `∫_F |u|^2`.
pub fn l2_sq(u: &Samples, grid: &QuadratureGrid) -> f64 {
    sum_fixed((0..u.extent).map(|p| grid.nodes[p].weight * (u.vel[p][0].powi(2) + u.vel[p][1].powi(2))))
}

/// `∫_F |u|^4`.
pub fn l4_pow4(u: &Samples, grid: &QuadratureGrid) -> f64 {
    sum_fixed((0..u.extent).map(|p| grid.nodes[p].weight * (u.vel[p][0].powi(2) + u.vel[p][1].powi(2)).powi(2)))
}

/// `∫_F |grad u|^2 w(x)` with `w = 1` or `w = 1 + |x|^2`.
pub fn grad_l2_sq(u: &Samples, grid: &QuadratureGrid, weighted: bool) -> f64 {
    sum_fixed((0..u.extent).map(|p| {
        let n = &grid.nodes[p];
        let g = &u.grad[p];
        let w = if weighted { 1.0 + n.r * n.r } else { 1.0 };
        n.weight * w * (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2))
    }))
}

pub fn norm_h(u: &Samples, body: &BodyConfig, grid: &QuadratureGrid) -> f64 {
    inner_h(u, u, body, grid).max(0.0).sqrt()
}

/// `‖u‖_ℋ + ‖grad u‖_{L^2(F)}`.
pub fn norm_v_underline(u: &Samples, body: &BodyConfig, grid: &QuadratureGrid) -> f64 {
    norm_h(u, body, grid) + grad_l2_sq(u, grid, false).sqrt()
}

/// `‖u‖_ℋ + (∫_F |grad u|^2 (1 + |y|^2))^{1/2}`.
pub fn norm_v(u: &Samples, body: &BodyConfig, grid: &QuadratureGrid) -> f64 {
    norm_h(u, body, grid) + grad_l2_sq(u, grid, true).sqrt()
}

/// Coefficients over a [`StreamBasis`] plus the circulation weight `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub coeffs: Vec<f64>,
    pub beta: f64,
}

impl Field {
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0.0; n], beta: 0.0 }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self { coeffs, beta: 0.0 }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[i] = 1.0;
        f
    }

    fn finite_energy(&self) -> Result<()> {
        if self.beta != 0.0 {
            return Err(Error::InfiniteEnergy(self.beta));
        }
        Ok(())
    }
}

/// Quadrature resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_inf: f64,
}

impl GridParams {
    pub fn for_radius(radius: f64) -> Self {
        Self { n_r: 16, n_theta: 64, r_inf: far_field_radius(radius, 1e-8) }
    }
}

/// Basis, quadrature grid and the sampled basis/`H` tables they share.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub body: BodyConfig,
    pub basis: StreamBasis,
    pub grid: QuadratureGrid,
    pub table: Vec<Samples>,
    pub harmonic: Samples,
}

impl Discretization {
    pub fn new(body: BodyConfig, basis: StreamBasis, grid: GridParams, extra_breaks: &[f64]) -> Result<Self> {
        body.validate()?;
        let mut breaks = basis.breaks();
        breaks.extend_from_slice(extra_breaks);
        let grid = QuadratureGrid::build_with_breaks(body.radius, grid.n_r, grid.n_theta, grid.r_inf, &breaks)?;
        let table = basis.elements.par_iter().map(|w| Samples::of_element(w, &grid)).collect();
        let harmonic = Samples::harmonic(&HarmonicField::new(body.radius), &grid);
        Ok(Self { body, basis, grid, table, harmonic })
    }

    /// Standard basis of size `n` with default quadrature.
    pub fn standard(body: BodyConfig, n: usize) -> Result<Self> {
        let basis = StreamBasis::standard(BasisParams::for_radius(body.radius), n)?;
        Self::new(body, basis, GridParams::for_radius(body.radius), &[])
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Samples of the finite-energy part `ũ` (the `beta` weight is not included).
    pub fn sample(&self, f: &Field) -> Samples {
        Samples::combination(&self.grid, &f.coeffs, &self.table)
    }

    pub fn sample_element(&self, w: &BasisElement) -> Samples {
        Samples::of_element(w, &self.grid)
    }

    /// Rigid part `(l, r)` of a field.
    pub fn rigid_part(&self, f: &Field) -> (Vec2, f64) {
        let mut l = [0.0; 2];
        let mut r = 0.0;
        for (c, w) in f.coeffs.iter().zip(&self.basis.elements) {
            l[0] += c * w.l[0];
            l[1] += c * w.l[1];
            r += c * w.r;
        }
        (l, r)
    }

    pub fn inner_h(&self, f: &Field, g: &Field) -> Result<f64> {
        f.finite_energy()?;
        g.finite_energy()?;
        Ok(inner_h(&self.sample(f), &self.sample(g), &self.body, &self.grid))
    }

    pub fn norm_v_underline(&self, f: &Field) -> Result<f64> {
        f.finite_energy()?;
        Ok(norm_v_underline(&self.sample(f), &self.body, &self.grid))
    }

    pub fn norm_v(&self, f: &Field) -> Result<f64> {
        f.finite_energy()?;
        Ok(norm_v(&self.sample(f), &self.body, &self.grid))
    }

    /// Velocity of `Σ c_i w_i + beta H` at any point of the plane.
    pub fn realize(&self, f: &Field, x: Vec2) -> Vec2 {
        let inside = x[0].hypot(x[1]) < self.body.radius;
        let mut v = if inside {
            let (l, r) = self.rigid_part(f);
            rigid_velocity(l, r, x)
        } else {
            let mut v = [0.0; 2];
            for (c, w) in f.coeffs.iter().zip(&self.basis.elements) {
                if *c != 0.0 {
                    let u = w.velocity(x);
                    v[0] += c * u[0];
                    v[1] += c * u[1];
                }
            }
            v
        };
        if f.beta != 0.0 {
            let h = HarmonicField::new(self.body.radius).eval(x);
            v[0] += f.beta * h[0];
            v[1] += f.beta * h[1];
        }
        v
    }

    /// Gram matrix `[(w_i, w_j)_ℋ]`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = inner_h(&self.table[i], &self.table[j], &self.body, &self.grid);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}
