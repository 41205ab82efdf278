//! Closed-form harmonic fields of the disk: the unit-circulation field `H`,
//! the Kirchhoff potentials and the added-mass matrix.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{BodyConfig, Mat2, QuadratureGrid, Vec2};

/// `H(x) = x^perp / (2 pi |x|^2)` in the fluid, extended by zero in the body.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicField {
    pub radius: f64,
}

impl HarmonicField {
    pub fn new(radius: f64) -> Self {
        Self { radius }
    }

    pub fn inside(&self, x: Vec2) -> bool {
        // boundary nodes may round to just below r = a
        x[0].hypot(x[1]) < self.radius * (1.0 - 1e-12)
    }

    pub fn eval(&self, x: Vec2) -> Vec2 {
        if self.inside(x) {
            return [0.0, 0.0];
        }
        let r2 = x[0] * x[0] + x[1] * x[1];
        let c = 1.0 / (2.0 * PI * r2);
        [-x[1] * c, x[0] * c]
    }

    /// `g[i][j] = d_j H_i`; zero inside the body.
    pub fn grad(&self, x: Vec2) -> Mat2 {
        if self.inside(x) {
            return [[0.0; 2]; 2];
        }
        let (a, b) = (x[0], x[1]);
        let r2 = a * a + b * b;
        let c = 1.0 / (2.0 * PI * r2 * r2);
        let diag = 2.0 * a * b * c;
        let off = (b * b - a * a) * c;
        [[diag, off], [off, -diag]]
    }
}

/// Kirchhoff potentials of the disk under the inward (into the body) normal:
/// `Phi_i = -a^2 x_i / |x|^2` for `i = 1, 2` and `Phi_3 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct KirchhoffPotentials {
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffValue {
    pub value: f64,
    pub grad: Vec2,
    pub hess: Mat2,
}

impl KirchhoffPotentials {
    pub fn new(radius: f64) -> Self {
        Self { radius }
    }

    /// Potential, gradient and Hessian of `Phi_i`, `i ∈ {1, 2, 3}`.
    pub fn eval(&self, i: usize, x: Vec2) -> Result<KirchhoffValue> {
        let a2 = self.radius * self.radius;
        let (p, q) = match i {
            1 => (x[0], x[1]),
            2 => (x[1], x[0]),
            3 => {
                return Ok(KirchhoffValue {
                    value: 0.0,
                    grad: [0.0; 2],
                    hess: [[0.0; 2]; 2],
                })
            }
            _ => return Err(Error::InvalidIndex { index: i, expected: "1..=3" }),
        };
        // Work in the (p, q) = (x_i, x_other) frame, then swap back.
        let r2 = p * p + q * q;
        let r4 = r2 * r2;
        let r6 = r4 * r2;
        let value = -a2 * p / r2;
        let gp = a2 * (p * p - q * q) / r4;
        let gq = 2.0 * a2 * p * q / r4;
        let hpp = 2.0 * a2 * p * (3.0 * q * q - p * p) / r6;
        let hpq = 2.0 * a2 * q * (q * q - 3.0 * p * p) / r6;
        let hqq = -hpp;
        let (grad, hess) = if i == 1 {
            ([gp, gq], [[hpp, hpq], [hpq, hqq]])
        } else {
            ([gq, gp], [[hqq, hpq], [hpq, hpp]])
        };
        Ok(KirchhoffValue { value, grad, hess })
    }

    /// Neumann data `K_i` at a boundary point with inward normal `n`.
    pub fn neumann_data(i: usize, x: Vec2, n: Vec2) -> Result<f64> {
        match i {
            1 => Ok(n[0]),
            2 => Ok(n[1]),
            3 => Ok(-x[1] * n[0] + x[0] * n[1]),
            _ => Err(Error::InvalidIndex { index: i, expected: "1..=3" }),
        }
    }
}

/// `diag(m, m, J) + [∫ grad Phi_a · grad Phi_b]`.
#[derive(Debug, Clone, Copy)]
pub struct AddedMassMatrix {
    pub matrix: Matrix3<f64>,
    pub fluid: Matrix3<f64>,
}

impl AddedMassMatrix {
    pub fn smallest_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix).eigenvalues.min()
    }

    pub fn solve(&self, rhs: [f64; 3]) -> Result<[f64; 3]> {
        let chol = self
            .matrix
            .cholesky()
            .ok_or_else(|| Error::Singular("added-mass matrix".into()))?;
        let x = chol.solve(&nalgebra::Vector3::from(rhs));
        Ok([x[0], x[1], x[2]])
    }
}

/// Assemble the added-mass matrix by quadrature of the Kirchhoff gradients.
pub fn added_mass(body: &BodyConfig, grid: &QuadratureGrid) -> AddedMassMatrix {
    let kp = KirchhoffPotentials::new(body.radius);
    let mut fluid = Matrix3::zeros();
    for a in 0..3 {
        for b in a..3 {
            let v = grid.integrate_annulus(|n| {
                let ga = kp.eval(a + 1, n.x).expect("index in range").grad;
                let gb = kp.eval(b + 1, n.x).expect("index in range").grad;
                ga[0] * gb[0] + ga[1] * gb[1]
            });
            fluid[(a, b)] = v;
            fluid[(b, a)] = v;
        }
    }
    let mut matrix = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        body.mass,
        body.mass,
        body.inertia,
    ));
    matrix += fluid;
    AddedMassMatrix { matrix, fluid }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{far_field_radius, normal_tangent};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_grad_h(h: &HarmonicField, x: Vec2, step: f64) -> Mat2 {
        let mut g = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += step;
            xm[j] -= step;
            let (up, um) = (h.eval(xp), h.eval(xm));
            for i in 0..2 {
                g[i][j] = (up[i] - um[i]) / (2.0 * step);
            }
        }
        g
    }

    #[test]
    fn h_closed_form_values() {
        let h = HarmonicField::new(1.0);
        let v = h.eval([1.0, 0.0]);
        assert!(v[0].abs() < 1e-16 && (v[1] - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert_eq!(h.eval([0.3, -0.2]), [0.0, 0.0]);
        assert_eq!(h.grad([0.3, -0.2]), [[0.0; 2]; 2]);
    }

    #[test]
    fn h_gradient_matches_finite_differences() {
        let h = HarmonicField::new(1.0);
        let g = h.grad([2.0, 1.0]);
        let fd = fd_grad_h(&h, [2.0, 1.0], 1e-5);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[i][j] - fd[i][j]).abs() < 1e-8);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r: f64 = rng.gen_range(1.1..50.0);
            let t: f64 = rng.gen_range(0.0..2.0 * PI);
            let g = h.grad([r * t.cos(), r * t.sin()]);
            assert!((g[0][0] + g[1][1]).abs() < 1e-15);
            assert!((g[0][1] - g[1][0]).abs() < 1e-15);
        }
    }

    #[test]
    fn h_decay_envelopes() {
        let h = HarmonicField::new(1.0);
        let mut sup_grad = 0.0f64;
        for k in 0..400 {
            let r = 1.0 + 99.0 * k as f64 / 399.0;
            let t = 0.37 * k as f64;
            let x = [r * t.cos(), r * t.sin()];
            let v = h.eval(x);
            assert!(v[0].hypot(v[1]) <= 1.0 / (2.0 * PI * r) * (1.0 + 1e-15));
            let g = h.grad(x);
            let fro = (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2)).sqrt();
            sup_grad = sup_grad.max(r * r * fro);
        }
        // |x|^2 |grad H| = 1/(pi sqrt 2) exactly for the point vortex.
        assert!((sup_grad - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn kirchhoff_neumann_residuals() {
        let kp = KirchhoffPotentials::new(1.0);
        for j in 0..64 {
            let th = 2.0 * PI * j as f64 / 64.0;
            let (n, _) = normal_tangent(th);
            let x = [th.cos(), th.sin()];
            for i in 1..=3 {
                let g = kp.eval(i, x).unwrap().grad;
                let res = g[0] * n[0] + g[1] * n[1]
                    - KirchhoffPotentials::neumann_data(i, x, n).unwrap();
                assert!(res.abs() < 1e-12, "i={i} theta={th}: {res}");
            }
        }
    }

    #[test]
    fn kirchhoff_derivatives_match_finite_differences() {
        let kp = KirchhoffPotentials::new(1.0);
        let x = [3.0, 2.0];
        let h = 1e-4;
        for i in 1..=2 {
            let at = |y: Vec2| kp.eval(i, y).unwrap();
            let k0 = at(x);
            let mut lap = 0.0;
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += h;
                xm[d] -= h;
                let (kpv, kmv) = (at(xp), at(xm));
                lap += (kpv.value - 2.0 * k0.value + kmv.value) / (h * h);
                assert!(((kpv.value - kmv.value) / (2.0 * h) - k0.grad[d]).abs() < 1e-8);
                for c in 0..2 {
                    let fd = (kpv.grad[c] - kmv.grad[c]) / (2.0 * h);
                    assert!((fd - k0.hess[c][d]).abs() < 1e-8);
                }
            }
            assert!(lap.abs() < 1e-6, "laplacian {lap}");
        }
        let k3 = kp.eval(3, [1.7, -0.4]).unwrap();
        assert_eq!(k3.value, 0.0);
        assert!(kp.eval(4, x).is_err());
        assert!(kp.eval(0, x).is_err());
    }

    #[test]
    fn added_mass_disk() {
        let body = BodyConfig::default();
        let r_inf = far_field_radius(1.0, 1e-8);
        let grid = QuadratureGrid::build(1.0, 16, 32, r_inf).unwrap();
        let am = added_mass(&body, &grid);
        let expect = [1.0 + PI, 1.0 + PI, 1.0];
        for a in 0..3 {
            assert!((am.matrix[(a, a)] - expect[a]).abs() < 1e-6);
            for b in 0..3 {
                assert_eq!(am.matrix[(a, b)], am.matrix[(b, a)]);
                if a != b {
                    assert!(am.matrix[(a, b)].abs() < 1e-10);
                }
            }
        }
        assert!(am.smallest_eigenvalue() > 0.0);
    }
}
