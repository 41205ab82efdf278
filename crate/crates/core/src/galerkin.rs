//! Galerkin ODE for the basis coefficients, its RK4 integration and the
//! energy and body-motion diagnostics of the resulting trajectories.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{a_samples, b_samples, dissipation_parts, truncation_floor, Convection, CutoffChi};
use crate::geometry::Vec2;
use crate::harmonic::{added_mass, AddedMassMatrix};
use crate::spaces::{grad_l2_sq, inner_h, l4_pow4, make_kirchhoff_field, norm_v_underline, Discretization, Samples};

/// Tables involving `H`.
#[derive(Debug, Clone)]
pub struct HarmonicTerms {
    /// `a(H, w_j)`.
    pub a_h: DVector<f64>,
    /// `[j, k] = b(H, w_j, w_k)`.
    pub b_h1: DMatrix<f64>,
    /// `[i, j] = b(w_i, w_j, H)`.
    pub b_h3: DMatrix<f64>,
    /// `b(H, w_j, H)`; zero up to quadrature error.
    pub c_hh: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub n: usize,
    pub nu: f64,
    pub truncation: f64,
    /// `[(w_i, w_j)_ℋ]`.
    pub mass: DMatrix<f64>,
    /// `[a(w_i, w_j)]`.
    pub a: DMatrix<f64>,
    /// `b_R(w_i, w_j, w_k)` at `(i * n + j) * n + k`.
    pub b_n: Vec<f64>,
    pub harmonic: Option<HarmonicTerms>,
    chol: Cholesky<f64, Dyn>,
}

impl GalerkinSystem {
    /// Assemble all tables for the basis of `d` with truncation radius `truncation`.
    pub fn assemble(d: &Discretization, truncation: f64) -> Result<Self> {
        let floor = truncation_floor(&d.body);
        if !(truncation > floor) {
            return Err(Error::InvalidParameter(format!("R > R_0 = {floor}")));
        }
        let n = d.len();
        if n == 0 {
            return Err(Error::InvalidParameter("basis size N ≥ 1".into()));
        }
        let (body, grid, t, h) = (&d.body, &d.grid, &d.table, &d.harmonic);
        let mass = d.gram();
        let chol = mass.clone().cholesky().ok_or_else(|| Error::Singular("Gram matrix".into()))?;
        let a = DMatrix::from_fn(n, n, |i, j| a_samples(body, grid, &t[i], &t[j]));
        let conv = Convection::Truncated(CutoffChi::new(truncation)?);
        let b_n: Vec<f64> = (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                b_samples(body, grid, &t[i], &t[j], &t[k], conv)
            })
            .collect();
        let full = Convection::Full;
        let harmonic = HarmonicTerms {
            a_h: DVector::from_fn(n, |j, _| a_samples(body, grid, h, &t[j])),
            b_h1: DMatrix::from_fn(n, n, |j, k| b_samples(body, grid, h, &t[j], &t[k], full)),
            b_h3: DMatrix::from_fn(n, n, |i, j| b_samples(body, grid, &t[i], &t[j], h, full)),
            c_hh: DVector::from_fn(n, |j, _| b_samples(body, grid, h, &t[j], h, full)),
        };
        Ok(Self { n, nu: body.nu, truncation, mass, a, b_n, harmonic: Some(harmonic), chol })
    }

    /// Same system with every `H` table removed.
    pub fn finite_energy(&self) -> Self {
        Self { harmonic: None, ..self.clone() }
    }

    /// Same system with the quadratic term removed.
    pub fn without_convection(&self) -> Self {
        Self { b_n: vec![0.0; self.b_n.len()], ..self.clone() }
    }

    pub fn b_entry(&self, i: usize, j: usize, k: usize) -> f64 {
        self.b_n[(i * self.n + j) * self.n + k]
    }

    /// `[B_N(g, g)]_j = Σ g_i g_k b_R(w_i, w_j, w_k)`.
    pub fn quadratic(&self, g: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if g[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let row = &self.b_n[(i * n + j) * n..(i * n + j + 1) * n];
                let s: f64 = row.iter().zip(g.iter()).map(|(b, gk)| b * gk).sum();
                out[j] += g[i] * s;
            }
        }
        out
    }

    /// Values `f(w_j)` of the right-hand side functional, before inverting `ℳ_N`.
    pub fn functional(&self, g: &DVector<f64>, beta: f64) -> DVector<f64> {
        let two_nu = 2.0 * self.nu;
        let mut f = self.a.tr_mul(g) * two_nu - self.quadratic(g);
        if let (Some(h), true) = (&self.harmonic, beta != 0.0) {
            f += &h.a_h * (two_nu * beta);
            f -= (&h.b_h1 * g) * beta;
            f -= h.b_h3.tr_mul(g) * beta;
            f -= &h.c_hh * (beta * beta);
        }
        f
    }

    /// `G' = ℳ_N^{-1} f(G)`.
    pub fn rhs(&self, g: &DVector<f64>, beta: f64) -> Result<DVector<f64>> {
        if g.len() != self.n {
            return Err(Error::InvalidParameter(format!("coefficient vector of length {} for N = {}", g.len(), self.n)));
        }
        let out = self.chol.solve(&self.functional(g, beta));
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("Galerkin mass solve".into()));
        }
        Ok(out)
    }

    /// One classical RK4 step.
    pub fn step(&self, g: &DVector<f64>, dt: f64, beta: f64) -> Result<DVector<f64>> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter("dt > 0".into()));
        }
        let k1 = self.rhs(g, beta)?;
        let k2 = self.rhs(&(g + &k1 * (0.5 * dt)), beta)?;
        let k3 = self.rhs(&(g + &k2 * (0.5 * dt)), beta)?;
        let k4 = self.rhs(&(g + &k3 * dt), beta)?;
        Ok(g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
    }
}

/// Galerkin initial data: `ℋ`-projection of `u_0` onto the span of the basis.
pub fn project_initial(d: &Discretization, u0: &Samples) -> Result<DVector<f64>> {
    let rhs = DVector::from_iterator(d.len(), d.table.iter().map(|w| inner_h(u0, w, &d.body, &d.grid)));
    let chol = d.gram().cholesky().ok_or_else(|| Error::Singular("Gram matrix".into()))?;
    Ok(chol.solve(&rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dt: f64,
    pub t_final: f64,
    pub beta: f64,
}

impl SimSettings {
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return Err(Error::InvalidParameter("dt > 0 and T ≥ 0".into()));
        }
        Ok((self.t_final / self.dt).round() as usize)
    }
}

/// Quantities computed from the sampled field at one time level.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    /// `½ ‖ũ‖²_ℋ`.
    pub energy: f64,
    /// `2 nu ∫ |D(ũ)|²`.
    pub dissipation: f64,
    /// `2 nu alpha ∮ |ũ - ũ_S|²`.
    pub friction: f64,
    /// `2 nu beta a(H, ũ)`.
    pub forcing: f64,
    /// `-beta b(ũ, ũ, H)`.
    pub convective: f64,
    /// `∫ |grad ũ|²`.
    pub grad_sq: f64,
    /// `∫ |ũ|⁴`.
    pub l4: f64,
    /// `‖ũ‖_V̲`.
    pub norm_v: f64,
}

impl Diagnostics {
    pub fn compute(d: &Discretization, u: &Samples, beta: f64) -> Self {
        let (body, grid) = (&d.body, &d.grid);
        let (bulk, slip) = dissipation_parts(grid, u);
        let two_nu = 2.0 * body.nu;
        let (forcing, convective) = if beta != 0.0 {
            (
                two_nu * beta * a_samples(body, grid, &d.harmonic, u),
                -beta * b_samples(body, grid, u, u, &d.harmonic, Convection::Full),
            )
        } else {
            (0.0, 0.0)
        };
        Self {
            energy: 0.5 * inner_h(u, u, body, grid),
            dissipation: two_nu * bulk,
            friction: two_nu * body.alpha * slip,
            forcing,
            convective,
            grad_sq: grad_l2_sq(u, grid, false),
            l4: l4_pow4(u, grid),
            norm_v: norm_v_underline(u, body, grid),
        }
    }

    /// Right-hand side of the energy identity.
    pub fn power(&self) -> f64 {
        -self.dissipation - self.friction + self.forcing + self.convective
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrajectory {
    pub times: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
    pub rigid: Vec<(Vec2, f64)>,
    pub diagnostics: Vec<Diagnostics>,
    pub beta: f64,
    /// Set when the run stopped early.
    pub blow_up: Option<String>,
}

impl SimTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    pub fn final_observables(&self) -> [f64; 4] {
        let (l, r) = self.rigid[self.len() - 1];
        [self.diagnostics[self.len() - 1].energy, l[0], l[1], r]
    }
}

const BLOW_UP: f64 = 1e12;

/// Integrate from `g0` over `[0, T]`, recording diagnostics at every level.
pub fn simulate(sys: &GalerkinSystem, d: &Discretization, g0: &DVector<f64>, settings: SimSettings) -> Result<SimTrajectory> {
    if g0.len() != sys.n || d.len() != sys.n {
        return Err(Error::InvalidParameter("initial coefficients must match the basis size".into()));
    }
    if g0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial coefficients must be finite".into()));
    }
    let steps = settings.steps()?;
    let mut traj = SimTrajectory {
        times: Vec::with_capacity(steps + 1),
        coeffs: Vec::with_capacity(steps + 1),
        rigid: Vec::with_capacity(steps + 1),
        diagnostics: Vec::with_capacity(steps + 1),
        beta: settings.beta,
        blow_up: None,
    };
    let mut g = g0.clone();
    let beta_h = if sys.harmonic.is_some() { settings.beta } else { 0.0 };
    let record = |traj: &mut SimTrajectory, n: usize, g: &DVector<f64>| {
        let f = crate::spaces::Field::from_coeffs(g.as_slice().to_vec());
        let u = d.sample(&f);
        traj.times.push(n as f64 * settings.dt);
        traj.coeffs.push(f.coeffs.clone());
        traj.rigid.push(d.rigid_part(&f));
        traj.diagnostics.push(Diagnostics::compute(d, &u, beta_h));
    };
    record(&mut traj, 0, &g);
    for n in 1..=steps {
        let next = sys.step(&g, settings.dt, settings.beta);
        match next {
            Ok(v) if v.iter().all(|x| x.is_finite() && x.abs() < BLOW_UP) => g = v,
            _ => {
                traj.blow_up = Some(Error::BlowUp { step: n, time: n as f64 * settings.dt }.to_string());
                return Ok(traj);
            }
        }
        record(&mut traj, n, &g);
    }
    Ok(traj)
}

/// Fourth-order finite-difference derivative of a uniformly sampled series:
/// centered in the interior, one-sided on the two outermost levels.
pub fn derivative(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    if n < 5 {
        return vec![0.0; n];
    }
    let f = values;
    (0..n)
        .map(|k| {
            let s = match k {
                0 => -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4],
                1 => -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4],
                k if k == n - 2 => 3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5],
                k if k == n - 1 => {
                    25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
                }
                k => f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2],
            };
            s / (12.0 * dt)
        })
        .collect()
}

/// Residual of `dE/dt + dissipation + friction - forcing - convective` at every level.
pub fn energy_residual(traj: &SimTrajectory) -> Vec<f64> {
    let e: Vec<f64> = traj.diagnostics.iter().map(|q| q.energy).collect();
    derivative(&e, traj.dt())
        .into_iter()
        .zip(&traj.diagnostics)
        .map(|(de, q)| de - q.power())
        .collect()
}

/// `t e^{tC} (C t / 2 + q_0) + C t + q_0`.
pub fn gronwall_envelope(c: f64, t: f64, q0: f64) -> f64 {
    t * (t * c).exp() * (0.5 * c * t + q0) + c * t + q0
}

/// Smallest `C ≥ 0` such that `‖ũ(t)‖²_ℋ` stays under the envelope.
pub fn fit_gronwall(traj: &SimTrajectory) -> f64 {
    let q: Vec<f64> = traj.diagnostics.iter().map(|d| 2.0 * d.energy).collect();
    let ok = |c: f64| traj.times.iter().zip(&q).all(|(t, qt)| *qt <= gronwall_envelope(c, *t, q[0]));
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Ratio `∫ ‖ũ‖⁴_{L⁴} / (sup ‖ũ‖²_ℋ ∫ ‖grad ũ‖²)` by the trapezoid rule.
pub fn l4_ratio(traj: &SimTrajectory) -> f64 {
    let dt = traj.dt();
    let trap = |f: &dyn Fn(&Diagnostics) -> f64| {
        let v: Vec<f64> = traj.diagnostics.iter().map(f).collect();
        let n = v.len();
        if n < 2 {
            return 0.0;
        }
        dt * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1]))
    };
    let num = trap(&|q| q.l4);
    let sup = traj.diagnostics.iter().fold(0.0f64, |m, q| m.max(2.0 * q.energy));
    let den = sup * trap(&|q| q.grad_sq);
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Dual norm of the right-hand side functional at every level, with `‖ũ‖_V̲`.
pub fn rhs_dual_norms(sys: &GalerkinSystem, d: &Discretization, traj: &SimTrajectory) -> Result<Vec<(f64, f64)>> {
    let stiff = crate::forms::stiffness(d);
    traj.coeffs
        .iter()
        .zip(&traj.diagnostics)
        .map(|(g, q)| {
            let f = sys.functional(&DVector::from_column_slice(g), traj.beta);
            Ok((crate::forms::dual_norm_estimate(&sys.mass, &stiff, f.as_slice())?, q.norm_v))
        })
        .collect()
}

/// Body motion read off the trajectory, with the added-mass cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyMotion {
    pub times: Vec<f64>,
    /// `(l_1, l_2, r)`.
    pub motion: Vec<[f64; 3]>,
    /// Finite-difference derivative of `motion`.
    pub fd_rate: Vec<[f64; 3]>,
    /// `ℳ^{-1} [(∂_t ũ, v_i)_ℋ]`.
    pub kinematic_rate: Vec<[f64; 3]>,
    /// `ℳ^{-1} [f(v_i)]` with the body equation tested by the Kirchhoff fields.
    pub dynamic_rate: Vec<[f64; 3]>,
    pub kinematic_residual: f64,
    pub closure_residual: f64,
    /// `(∫ |q|² + |q'|²)^{1/2}` for `q = (l, r)`.
    pub h1_norm: f64,
}

pub fn body_motion(sys: &GalerkinSystem, d: &Discretization, traj: &SimTrajectory, added: &AddedMassMatrix) -> Result<BodyMotion> {
    let (body, grid, t, h) = (&d.body, &d.grid, &d.table, &d.harmonic);
    let n = sys.n;
    let kirchhoff: Vec<Samples> = (1..=3)
        .map(|i| make_kirchhoff_field(body.radius, i).map(|w| d.sample_element(&w)))
        .collect::<Result<_>>()?;
    let full = Convection::Full;
    let beta = if sys.harmonic.is_some() { traj.beta } else { 0.0 };
    let two_nu = 2.0 * body.nu;
    // (w_j, v_i)_ℋ and the linear pieces of the tested body equation
    let pair = DMatrix::from_fn(n, 3, |j, i| inner_h(&t[j], &kirchhoff[i], body, grid));
    let a_wv = DMatrix::from_fn(n, 3, |j, i| a_samples(body, grid, &t[j], &kirchhoff[i]));
    let a_hv: Vec<f64> = kirchhoff.iter().map(|v| a_samples(body, grid, h, v)).collect();
    let lin_h = DMatrix::from_fn(n, 3, |j, i| {
        b_samples(body, grid, h, &t[j], &kirchhoff[i], full) - b_samples(body, grid, &t[j], &kirchhoff[i], h, full)
    });
    let quad: Vec<DMatrix<f64>> = kirchhoff
        .iter()
        .map(|v| DMatrix::from_fn(n, n, |j, k| b_samples(body, grid, &t[j], &t[k], v, full)))
        .collect();

    let mut motion = Vec::with_capacity(traj.len());
    let mut kinematic = Vec::with_capacity(traj.len());
    let mut dynamic = Vec::with_capacity(traj.len());
    for (g, (l, r)) in traj.coeffs.iter().zip(&traj.rigid) {
        let g = DVector::from_column_slice(g);
        motion.push([l[0], l[1], *r]);
        let rate = sys.rhs(&g, traj.beta)?;
        let proj = pair.tr_mul(&rate);
        kinematic.push(added.solve([proj[0], proj[1], proj[2]])?);
        let mut f = [0.0; 3];
        let aw = a_wv.tr_mul(&g);
        let lh = lin_h.tr_mul(&g);
        for i in 0..3 {
            f[i] = two_nu * aw[i] + g.dot(&(&quad[i] * &g));
            if beta != 0.0 {
                f[i] += two_nu * beta * a_hv[i] + beta * lh[i];
            }
        }
        dynamic.push(added.solve(f)?);
    }
    let dt = traj.dt();
    let comp: Vec<Vec<f64>> = (0..3).map(|c| derivative(&motion.iter().map(|m| m[c]).collect::<Vec<_>>(), dt)).collect();
    let fd_rate: Vec<[f64; 3]> = (0..motion.len()).map(|k| [comp[0][k], comp[1][k], comp[2][k]]).collect();
    let maxdiff = |a: &[[f64; 3]], b: &[[f64; 3]]| {
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| (0..3).fold(m, |m, c| m.max((x[c] - y[c]).abs())))
    };
    let mut h1 = 0.0;
    for k in 0..motion.len() {
        let w = if k == 0 || k + 1 == motion.len() { 0.5 * dt } else { dt };
        h1 += w * motion[k].iter().map(|v| v * v).sum::<f64>();
    }
    for k in 1..motion.len() {
        h1 += dt * (0..3).map(|c| ((motion[k][c] - motion[k - 1][c]) / dt).powi(2)).sum::<f64>();
    }
    Ok(BodyMotion {
        times: traj.times.clone(),
        kinematic_residual: maxdiff(&fd_rate, &kinematic),
        closure_residual: maxdiff(&dynamic, &kinematic),
        motion,
        fd_rate,
        kinematic_rate: kinematic,
        dynamic_rate: dynamic,
        h1_norm: h1.sqrt(),
    })
}

/// Added-mass matrix on the quadrature grid of `d`.
pub fn added_mass_for(d: &Discretization) -> AddedMassMatrix {
    added_mass(&d.body, &d.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BodyConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize) -> (Discretization, GalerkinSystem) {
        let d = Discretization::standard(BodyConfig::default(), n).unwrap();
        let sys = GalerkinSystem::assemble(&d, 8.0).unwrap();
        (d, sys)
    }

    #[test]
    fn assembled_tables() {
        let (_, sys) = setup(6);
        for i in 0..6 {
            assert!(sys.a[(i, i)] <= 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let g: DVector<f64> = DVector::from_fn(6, |_, _| rng.gen_range(-1.0..1.0));
            let scale = g.norm().powi(3);
            assert!(g.dot(&sys.quadratic(&g)).abs() <= 1e-9 * scale);
        }
        let d1 = Discretization::standard(BodyConfig::default(), 1).unwrap();
        let s1 = GalerkinSystem::assemble(&d1, 8.0).unwrap();
        assert!(s1.mass[(0, 0)] > 0.0);
        assert!(GalerkinSystem::assemble(&d1, 2.0).is_err());
    }

    #[test]
    fn rhs_special_cases() {
        let (_, sys) = setup(6);
        let z = DVector::zeros(6);
        assert!(sys.rhs(&z, 0.0).unwrap().iter().all(|v| *v == 0.0));
        let h = sys.harmonic.as_ref().unwrap();
        let forced = sys.rhs(&z, 1.0).unwrap();
        let expect = sys.chol.solve(&(&h.a_h * (2.0 * sys.nu) - &h.c_hh));
        assert!((forced - expect).norm() < 1e-15);
        assert!(sys.rhs(&DVector::zeros(5), 0.0).is_err());
    }

    #[test]
    fn rest_state_is_fixed() {
        let (d, sys) = setup(6);
        let traj = simulate(&sys, &d, &DVector::zeros(6), SimSettings { dt: 0.01, t_final: 0.1, beta: 0.0 }).unwrap();
        assert!(traj.coeffs.iter().flatten().all(|v| *v == 0.0));
        assert!(energy_residual(&traj).iter().all(|v| *v == 0.0));
        let added = added_mass_for(&d);
        let bm = body_motion(&sys, &d, &traj, &added).unwrap();
        assert!(bm.kinematic_rate.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(bm.h1_norm, 0.0);
    }

    #[test]
    fn linear_problem_matches_exponential() {
        let (_, sys) = setup(6);
        let lin = sys.without_convection().finite_energy();
        let g0 = DVector::from_vec(vec![0.5, 0.0, 0.2, 0.3, 0.2, 0.0]);
        // exact solution via the symmetrized generator L^{-1} (2 nu A) L^{-T}
        let l = lin.mass.clone().cholesky().unwrap().l();
        let linv = l.clone().try_inverse().unwrap();
        let s = &linv * (&lin.a * (2.0 * lin.nu)) * linv.transpose();
        let s = (&s + s.transpose()) * 0.5;
        let eig = nalgebra::SymmetricEigen::new(s);
        let t = 1.0;
        let y0 = eig.eigenvectors.transpose() * (l.transpose() * &g0);
        let yt = DVector::from_fn(6, |i, _| y0[i] * (eig.eigenvalues[i] * t).exp());
        let exact = linv.transpose() * (&eig.eigenvectors * yt);
        let mut errs = vec![];
        for steps in [20usize, 40] {
            let dt = t / steps as f64;
            let mut g = g0.clone();
            for _ in 0..steps {
                g = lin.step(&g, dt, 0.0).unwrap();
            }
            errs.push((g - &exact).norm());
        }
        assert!(errs[0] / errs[1] > 14.0, "{errs:?}");
    }
}
