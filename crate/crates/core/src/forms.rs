//! The viscous/friction form `a`, the convective form `b` and its truncation
//! `b_R`, evaluated by quadrature on sampled fields.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{perp, sum_fixed, BodyConfig, QuadratureGrid, Vec2};
use crate::spaces::{Discretization, Field, Samples};

/// `chi_R(x) = x^perp` for `|x| ≤ R`, `(R/|x|) x^perp` beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffChi {
    pub radius: f64,
}

impl CutoffChi {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("cutoff radius R > 0".into()));
        }
        Ok(Self { radius })
    }

    pub fn eval(&self, x: Vec2) -> Vec2 {
        let r = x[0].hypot(x[1]);
        let p = perp(x);
        if r <= self.radius {
            p
        } else {
            let s = self.radius / r;
            [s * p[0], s * p[1]]
        }
    }
}

/// Which rigid velocity enters the first slot of the convective form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convection {
    /// `u_S = l + r x^perp`.
    Full,
    /// `u_S = l + r chi_R`, rigid terms as in `b`.
    Truncated(CutoffChi),
    /// `u_S = l + r chi_R` with the rigid terms `m r_u l_u^perp·l_v^perp + J r_u r_v r_w`.
    Literal(CutoffChi),
}

/// `a(u, v) = -alpha ∮ (u - u_S)·(v - v_S) - ∫ D(u):D(v)`.
pub fn a_samples(body: &BodyConfig, grid: &QuadratureGrid, u: &Samples, v: &Samples) -> f64 {
    let n = u.extent.min(v.extent);
    let bulk = sum_fixed((0..n).map(|p| {
        let (gu, gv) = (&u.grad[p], &v.grad[p]);
        let off_u = 0.5 * (gu[0][1] + gu[1][0]);
        let off_v = 0.5 * (gv[0][1] + gv[1][0]);
        grid.nodes[p].weight * (gu[0][0] * gv[0][0] + gu[1][1] * gv[1][1] + 2.0 * off_u * off_v)
    }));
    let slip = sum_fixed(grid.boundary.iter().enumerate().map(|(j, node)| {
        let xp = perp(node.x);
        let du = [u.trace[j][0] - u.l[0] - u.r * xp[0], u.trace[j][1] - u.l[1] - u.r * xp[1]];
        let dv = [v.trace[j][0] - v.l[0] - v.r * xp[0], v.trace[j][1] - v.l[1] - v.r * xp[1]];
        node.weight * (du[0] * dv[0] + du[1] * dv[1])
    }));
    -body.alpha * slip - bulk
}

/// `b(u, v, w) = ∫ [((u - u_S)·grad) w]·v - r_u v^perp·w - m r_u l_v^perp·l_w`.
///
/// The integrand vanishes wherever `v` or `w` does, so only
/// `min(v.extent, w.extent)` nodes are visited; `u` may be shorter.
pub fn b_samples(
    body: &BodyConfig,
    grid: &QuadratureGrid,
    u: &Samples,
    v: &Samples,
    w: &Samples,
    conv: Convection,
) -> f64 {
    let n = v.extent.min(w.extent);
    let chi = match conv {
        Convection::Full => None,
        Convection::Truncated(c) | Convection::Literal(c) => Some(c),
    };
    let bulk = sum_fixed((0..n).map(|p| {
        let node = &grid.nodes[p];
        let s = match chi {
            None => perp(node.x),
            Some(c) => c.eval(node.x),
        };
        let uf = if p < u.extent { u.vel[p] } else { [0.0; 2] };
        let rel = [uf[0] - u.l[0] - u.r * s[0], uf[1] - u.l[1] - u.r * s[1]];
        let g = &w.grad[p];
        let conv = [rel[0] * g[0][0] + rel[1] * g[0][1], rel[0] * g[1][0] + rel[1] * g[1][1]];
        let (vv, ww) = (v.vel[p], w.vel[p]);
        let vp = perp(vv);
        node.weight * (conv[0] * vv[0] + conv[1] * vv[1] - u.r * (vp[0] * ww[0] + vp[1] * ww[1]))
    }));
    match conv {
        Convection::Literal(_) => {
            let (lu, lv) = (perp(u.l), perp(v.l));
            bulk + body.mass * u.r * (lu[0] * lv[0] + lu[1] * lv[1]) + body.inertia * u.r * v.r * w.r
        }
        _ => {
            let lv = perp(v.l);
            bulk - body.mass * u.r * (lv[0] * w.l[0] + lv[1] * w.l[1])
        }
    }
}

/// `∫ grad u : grad v` over the fluid.
pub fn stiffness_samples(grid: &QuadratureGrid, u: &Samples, v: &Samples) -> f64 {
    let n = u.extent.min(v.extent);
    sum_fixed((0..n).map(|p| {
        let (gu, gv) = (&u.grad[p], &v.grad[p]);
        grid.nodes[p].weight
            * (gu[0][0] * gv[0][0] + gu[0][1] * gv[0][1] + gu[1][0] * gv[1][0] + gu[1][1] * gv[1][1])
    }))
}

/// `∫ |D(u)|^2` and `∮ |u - u_S|^2`.
pub fn dissipation_parts(grid: &QuadratureGrid, u: &Samples) -> (f64, f64) {
    let bulk = sum_fixed((0..u.extent).map(|p| {
        let g = &u.grad[p];
        let off = 0.5 * (g[0][1] + g[1][0]);
        grid.nodes[p].weight * (g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * off * off)
    }));
    let slip = sum_fixed(grid.boundary.iter().enumerate().map(|(j, node)| {
        let xp = perp(node.x);
        let d = [u.trace[j][0] - u.l[0] - u.r * xp[0], u.trace[j][1] - u.l[1] - u.r * xp[1]];
        node.weight * (d[0] * d[0] + d[1] * d[1])
    }));
    (bulk, slip)
}

fn beta_free(f: &Field, slot: &str) -> Result<()> {
    if f.beta != 0.0 {
        return Err(Error::InvalidParameter(format!("{slot} argument must have beta = 0")));
    }
    Ok(())
}

/// `a(u, v)` with `u = ũ + beta H`; `v` must be finite-energy.
pub fn form_a(d: &Discretization, u: &Field, v: &Field) -> Result<f64> {
    beta_free(v, "second")?;
    let (su, sv) = (d.sample(u), d.sample(v));
    let mut out = a_samples(&d.body, &d.grid, &su, &sv);
    if u.beta != 0.0 {
        out += u.beta * a_samples(&d.body, &d.grid, &d.harmonic, &sv);
    }
    Ok(out)
}

fn trilinear(d: &Discretization, u: &Field, v: &Field, w: &Field, conv: Convection) -> Result<f64> {
    beta_free(v, "second")?;
    let (su, sv, sw) = (d.sample(u), d.sample(v), d.sample(w));
    let h = &d.harmonic;
    let b = |x: &Samples, z: &Samples| b_samples(&d.body, &d.grid, x, &sv, z, conv);
    let mut out = b(&su, &sw);
    if u.beta != 0.0 {
        out += u.beta * b(h, &sw);
    }
    if w.beta != 0.0 {
        out += w.beta * b(&su, h);
    }
    if u.beta != 0.0 && w.beta != 0.0 {
        out += u.beta * w.beta * b(h, h);
    }
    Ok(out)
}

/// `b(u, v, w)` with `u, w` possibly carrying `beta H`.
pub fn form_b(d: &Discretization, u: &Field, v: &Field, w: &Field) -> Result<f64> {
    trilinear(d, u, v, w, Convection::Full)
}

/// Radius `R_0` with the body inside `B(0, R_0 / 2)`.
pub fn truncation_floor(body: &BodyConfig) -> f64 {
    body.diameter()
}

/// `b_R(u, v, w)`; `literal` selects the alternative rigid terms.
pub fn form_b_r(d: &Discretization, u: &Field, v: &Field, w: &Field, radius: f64, literal: bool) -> Result<f64> {
    let floor = truncation_floor(&d.body);
    if !(radius > floor) {
        return Err(Error::InvalidParameter(format!("R > R_0 = {floor}")));
    }
    let chi = CutoffChi::new(radius)?;
    let conv = if literal { Convection::Literal(chi) } else { Convection::Truncated(chi) };
    trilinear(d, u, v, w, conv)
}

/// `[∫ grad w_i : grad w_j]`.
pub fn stiffness(d: &Discretization) -> DMatrix<f64> {
    let n = d.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = stiffness_samples(&d.grid, &d.table[i], &d.table[j]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Dual norm of the functional with values `f(w_i)` over the span of the
/// basis, measured in `(‖w‖_ℋ^2 + ‖grad w‖^2)^{1/2}`. This lies within a
/// factor `sqrt 2` of the `V̲` dual norm from above.
pub fn dual_norm_estimate(gram: &DMatrix<f64>, stiff: &DMatrix<f64>, values: &[f64]) -> Result<f64> {
    if values.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let k = gram + stiff;
    let chol = k.cholesky().ok_or_else(|| Error::Singular("Gram plus stiffness".into()))?;
    let f = DVector::from_column_slice(values);
    let y = chol.solve(&f);
    Ok(f.dot(&y).max(0.0).sqrt())
}

/// Smallest `C` with `|b| ≤ C ‖u‖ ‖v‖ ‖w‖` over the given samples.
pub fn continuity_ratio(values: &[(f64, f64)]) -> f64 {
    values.iter().fold(0.0f64, |m, (b, scale)| if *scale > 0.0 { m.max(b.abs() / scale) } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_far_field_mode, make_rigid_mode, BasisParams, GridParams, Parity, StreamBasis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disc(n: usize) -> Discretization {
        Discretization::standard(BodyConfig::default(), n).unwrap()
    }

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Field {
        Field::from_coeffs((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn vnorm(d: &Discretization, f: &Field) -> f64 {
        d.norm_v_underline(&Field { beta: 0.0, ..f.clone() }).unwrap() + f.beta.abs()
    }

    #[test]
    fn chi_is_continuous_and_capped() {
        let c = CutoffChi::new(4.0).unwrap();
        assert_eq!(c.eval([1.0, 2.0]), [-2.0, 1.0]);
        let far = c.eval([30.0, -40.0]);
        assert!((far[0].hypot(far[1]) - 4.0).abs() < 1e-14);
        let (a, b) = (c.eval([4.0, 0.0]), c.eval([4.0 + 1e-12, 0.0]));
        assert!((a[1] - b[1]).abs() < 1e-11);
        assert!(CutoffChi::new(0.0).is_err());
    }

    #[test]
    fn a_is_bilinear_and_dissipative() {
        let d = disc(12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = Field::zero(12);
        for _ in 0..50 {
            let v = random(12, &mut rng);
            let w = random(12, &mut rng);
            assert_eq!(form_a(&d, &zero, &v).unwrap(), 0.0);
            assert!(form_a(&d, &v, &v).unwrap() <= 0.0);
            let (x, y) = (form_a(&d, &v, &w).unwrap(), form_a(&d, &w, &v).unwrap());
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
        assert!(form_a(&d, &zero, &zero.clone().with_beta(1.0)).is_err());
    }

    #[test]
    fn a_of_h_is_refinement_stable() {
        let p = BasisParams::for_radius(1.0);
        let basis = StreamBasis::standard(p, 10).unwrap();
        let body = BodyConfig::default();
        let coarse = Discretization::new(body, basis.clone(), GridParams { n_r: 12, n_theta: 32, r_inf: 64.0 }, &[]).unwrap();
        let fine = Discretization::new(body, basis, GridParams { n_r: 24, n_theta: 96, r_inf: 4096.0 }, &[]).unwrap();
        let h = Field::zero(10).with_beta(1.0);
        for i in 0..10 {
            let e = Field::unit(10, i);
            let (x, y) = (form_a(&coarse, &h, &e).unwrap(), form_a(&fine, &h, &e).unwrap());
            assert!(x.is_finite() && (x - y).abs() < 1e-8, "{i}: {x} vs {y}");
        }
    }

    #[test]
    fn b_cancellation_and_antisymmetry() {
        let d = disc(12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let u = random(12, &mut rng).with_beta(rng.gen_range(-2.0..2.0));
            let v = random(12, &mut rng);
            let w = random(12, &mut rng);
            let nu = vnorm(&d, &u);
            let (nv, nw) = (vnorm(&d, &v), vnorm(&d, &w));
            assert!(form_b(&d, &u, &v, &v).unwrap().abs() <= 1e-9 * nu * nv * nv);
            assert!(form_b_r(&d, &u, &v, &v, 8.0, false).unwrap().abs() <= 1e-9 * nu * nv * nv);
            let anti = form_b(&d, &u, &v, &w).unwrap() + form_b(&d, &u, &w, &v).unwrap();
            assert!(anti.abs() <= 1e-9 * nu * nv * nw);
            let h = Field::zero(12).with_beta(1.0);
            assert!(form_b(&d, &h, &v, &h).unwrap().abs() <= 1e-9 * nv);
        }
    }

    #[test]
    fn b_r_matches_b_without_rotation() {
        let d = disc(10);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let mut u = random(10, &mut rng);
            u.coeffs[2] = 0.0;
            let (v, w) = (random(10, &mut rng), random(10, &mut rng));
            let b = form_b(&d, &u, &v, &w).unwrap();
            for r in [2.5, 4.0, 32.0] {
                assert_eq!(form_b_r(&d, &u, &v, &w, r, false).unwrap(), b);
            }
        }
        let z = Field::zero(10);
        assert!(form_b_r(&d, &z, &z, &z, 2.0, false).is_err());
        assert!(form_b_r(&d, &z, &z, &z, 1.0, false).is_err());
    }

    #[test]
    fn b_r_converges_to_b() {
        let p = BasisParams::for_radius(1.0);
        let els = vec![
            make_rigid_mode(&p, 3).unwrap(),
            make_far_field_mode(1.0, 2, Parity::Cos).unwrap(),
            make_far_field_mode(1.0, 2, Parity::Sin).unwrap(),
        ];
        let d = Discretization::new(BodyConfig::default(), StreamBasis::new(p, els), GridParams::for_radius(1.0), &[4.0, 8.0, 16.0, 32.0]).unwrap();
        let (u, v, w) = (Field::unit(3, 0), Field::unit(3, 1), Field::unit(3, 2));
        let b = form_b(&d, &u, &v, &w).unwrap();
        let gaps: Vec<f64> = [4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&r| (form_b_r(&d, &u, &v, &w, r, false).unwrap() - b).abs())
            .collect();
        assert!(gaps[0] > 0.0);
        for k in 1..4 {
            assert!(gaps[k] < gaps[k - 1], "{gaps:?}");
        }
        assert!(gaps[3] <= 1e-3 * gaps[0], "{gaps:?}");
    }

    #[test]
    fn literal_truncation_differs_only_in_rigid_terms() {
        let d = disc(6);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (u, v, w) = (random(6, &mut rng), random(6, &mut rng), random(6, &mut rng));
        let corrected = form_b_r(&d, &u, &v, &w, 8.0, false).unwrap();
        let literal = form_b_r(&d, &u, &v, &w, 8.0, true).unwrap();
        let (lu, ru) = d.rigid_part(&u);
        let (lv, rv) = d.rigid_part(&v);
        let (lw, rw) = d.rigid_part(&w);
        let b = &d.body;
        let extra = b.mass * ru * (perp(lu)[0] * perp(lv)[0] + perp(lu)[1] * perp(lv)[1]) + b.inertia * ru * rv * rw
            + b.mass * ru * (perp(lv)[0] * lw[0] + perp(lv)[1] * lw[1]);
        assert!((literal - corrected - extra).abs() < 1e-12);
    }

    #[test]
    fn dual_norm_bounds() {
        let d = disc(10);
        let (g, s) = (d.gram(), stiffness(&d));
        assert_eq!(dual_norm_estimate(&g, &s, &[0.0; 10]).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let f = random(10, &mut rng);
            let vals: Vec<f64> = (0..10).map(|i| d.inner_h(&f, &Field::unit(10, i)).unwrap()).collect();
            let dn = dual_norm_estimate(&g, &s, &vals).unwrap();
            assert!(dn <= d.inner_h(&f, &f).unwrap().sqrt() * (1.0 + 1e-10));
        }
    }
}
