//! Stream-function basis elements of the dense class: smooth, divergence-free
//! fields that are rigid inside the body.

use std::f64::consts::PI;

use rand::Rng;

use super::jet::{separable_jet, Jet, Parity, PiecewisePoly, Poly, Radial};
use crate::error::{Error, Result};
use crate::geometry::{dot, normal_tangent, rigid_velocity, Mat2, Vec2};
use crate::harmonic::KirchhoffPotentials;

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    /// `f_j(r) T(k theta)` with `f_j(a) = f_j'(a) = 0`: no slip on the body.
    Bump { k: u32, j: u32, parity: Parity },
    /// `g(r) T(k theta)` with `g(a) = 0`, `g'(a) = 1`: tangential slip on the body.
    Slip { k: u32, parity: Parity },
    /// `grad^perp(chi_rho (-l^perp·x + r |x|^2 / 2))`, the cut-off rigid mode `i`.
    Rigid { i: usize },
    /// `grad Phi_i` in the fluid, rigid inside; not compactly supported.
    Kirchhoff { i: usize },
    /// `h(r) T(k theta) / r^k` with `h` ramping from 0 to 1; decays like `r^{-k-1}`.
    FarField { k: u32, parity: Parity },
}

#[derive(Debug, Clone)]
enum Stream {
    Separable { profile: PiecewisePoly, k: u32, parity: Parity, radius: f64 },
    Rigid { cutoff: PiecewisePoly, i: usize },
    Kirchhoff { kp: KirchhoffPotentials, i: usize },
    FarField { ramp: PiecewisePoly, k: u32, parity: Parity },
}

/// One element `w` of the Galerkin basis.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub kind: ElementKind,
    /// Rigid part `(l, r)`: `w = l + r x^perp` inside the body.
    pub l: Vec2,
    pub r: f64,
    /// Radius beyond which `w ≡ 0` (`f64::INFINITY` if unbounded).
    pub support: f64,
    stream: Stream,
}

impl BasisElement {
    /// Stream-function jet on the fluid side (`|x| ≥ a`).
    pub fn stream_jet(&self, x: Vec2) -> Jet {
        match &self.stream {
            Stream::Separable { profile, k, parity, radius } => {
                let r = x[0].hypot(x[1]);
                // boundary nodes may round to just below r = a
                if r >= profile.hi || r < *radius * (1.0 - 1e-12) {
                    return Jet::default();
                }
                separable_jet(profile.eval(r.max(*radius)), *k, *parity, x)
            }
            Stream::Rigid { cutoff, i } => {
                let r = x[0].hypot(x[1]);
                let chi = separable_jet(cutoff.eval(r), 0, Parity::Cos, x);
                let base = match i {
                    1 => Jet { value: -x[1], grad: [0.0, -1.0], hess: [[0.0; 2]; 2] },
                    2 => Jet { value: x[0], grad: [1.0, 0.0], hess: [[0.0; 2]; 2] },
                    _ => Jet {
                        value: 0.5 * (x[0] * x[0] + x[1] * x[1]),
                        grad: x,
                        hess: [[1.0, 0.0], [0.0, 1.0]],
                    },
                };
                chi.mul(&base)
            }
            Stream::Kirchhoff { kp, i } => {
                // grad Phi_1 = grad^perp Phi_2 and grad Phi_2 = grad^perp(-Phi_1).
                let (idx, sign) = match i {
                    1 => (2, 1.0),
                    2 => (1, -1.0),
                    _ => return Jet::default(),
                };
                let v = kp.eval(idx, x).expect("index in range");
                Jet { value: v.value, grad: v.grad, hess: v.hess }.scale(sign)
            }
            Stream::FarField { ramp, k, parity } => {
                let r = x[0].hypot(x[1]);
                let (h, h1, h2) = ramp.eval(r);
                let kf = *k as f64;
                let p0 = r.powi(-(*k as i32));
                let f = h * p0;
                let f1 = h1 * p0 - kf * h * p0 / r;
                let f2 = h2 * p0 - 2.0 * kf * h1 * p0 / r + kf * (kf + 1.0) * h * p0 / (r * r);
                separable_jet((f, f1, f2), *k, *parity, x)
            }
        }
    }

    /// Radii where the stream function is only finitely smooth.
    pub fn knots(&self) -> Vec<f64> {
        match &self.stream {
            Stream::Separable { profile, radius, .. } => vec![*radius, profile.hi],
            Stream::Rigid { cutoff, .. } => vec![cutoff.lo, cutoff.hi],
            Stream::Kirchhoff { .. } => vec![],
            Stream::FarField { ramp, .. } => vec![ramp.lo, ramp.hi],
        }
    }

    /// Fluid-side velocity `grad^perp psi`.
    pub fn velocity(&self, x: Vec2) -> Vec2 {
        self.stream_jet(x).velocity()
    }

    pub fn velocity_grad(&self, x: Vec2) -> Mat2 {
        self.stream_jet(x).velocity_grad()
    }

    /// Velocity anywhere in the plane: rigid inside the body, fluid part outside.
    pub fn realize(&self, x: Vec2, radius: f64) -> Vec2 {
        if x[0].hypot(x[1]) < radius {
            rigid_velocity(self.l, self.r, x)
        } else {
            self.velocity(x)
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            ElementKind::Bump { k, j, parity } => format!("bump_k{k}_j{j}_{}", parity.name()),
            ElementKind::Slip { k, parity } => format!("slip_k{k}_{}", parity.name()),
            ElementKind::Rigid { i } => format!("rigid_{i}"),
            ElementKind::Kirchhoff { i } => format!("kirchhoff_{i}"),
            ElementKind::FarField { k, parity } => format!("farfield_k{k}_{}", parity.name()),
        }
    }
}

/// Geometric parameters of the standard basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisParams {
    pub radius: f64,
    /// Outer radius of the bump and slip modes.
    pub fluid_support: f64,
    /// Rigid modes equal `e_i` / `x^perp` for `|x| ≤ rigid_cutoff` and vanish
    /// beyond `2 rigid_cutoff`.
    pub rigid_cutoff: f64,
}

impl BasisParams {
    pub fn for_radius(radius: f64) -> Self {
        Self { radius, fluid_support: 4.0 * radius, rigid_cutoff: 2.5 * radius }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fluid_support > self.radius) {
            return Err(Error::InvalidParameter("fluid_support > a".into()));
        }
        if !(self.rigid_cutoff > 2.0 * self.radius) {
            return Err(Error::InvalidParameter(
                "rigid cutoff must exceed the body diameter".into(),
            ));
        }
        Ok(())
    }
}

/// Bump mode `k, j ≥ 1`: `f_j(s) = s^2 (1-s)^3 P_{j-1}(2s-1)`,
/// `s = (r - a)/(R_f - a)`. `f, f'` vanish at `r = a`; `f, f', f''` at `R_f`.
pub fn make_fluid_mode(params: &BasisParams, k: u32, j: u32, parity: Parity) -> Result<BasisElement> {
    if j < 1 {
        return Err(Error::InvalidParameter("radial index j ≥ 1".into()));
    }
    if k == 0 && parity == Parity::Sin {
        return Err(Error::InvalidParameter("k = 0 has no sine mode".into()));
    }
    let poly = Poly::monomial(2)
        .mul(&Poly::one_minus_pow(3))
        .mul(&Poly::shifted_legendre(j as usize - 1));
    Ok(separable(params, poly, ElementKind::Bump { k, j, parity }, k, parity))
}

/// Slip mode: `g(s) = s (1-s)^3` scaled so that `g'(a) = 1`; zero normal and
/// nonzero tangential velocity on the body.
pub fn make_slip_mode(params: &BasisParams, k: u32, parity: Parity) -> Result<BasisElement> {
    if k == 0 && parity == Parity::Sin {
        return Err(Error::InvalidParameter("k = 0 has no sine mode".into()));
    }
    let l = params.fluid_support - params.radius;
    let poly = Poly::monomial(1).mul(&Poly::one_minus_pow(3));
    let poly = Poly(poly.0.iter().map(|c| c * l).collect());
    Ok(separable(params, poly, ElementKind::Slip { k, parity }, k, parity))
}

fn separable(params: &BasisParams, poly: Poly, kind: ElementKind, k: u32, parity: Parity) -> BasisElement {
    BasisElement {
        kind,
        l: [0.0, 0.0],
        r: 0.0,
        support: params.fluid_support,
        stream: Stream::Separable {
            profile: PiecewisePoly {
                lo: params.radius,
                hi: params.fluid_support,
                poly,
                below: 0.0,
                above: 0.0,
            },
            k,
            parity,
            radius: params.radius,
        },
    }
}

/// Rigid mode `i ∈ {1, 2, 3}`: translation `e_1`, `e_2` or rotation `x^perp`
/// near the body, cut off smoothly between `rho` and `2 rho`.
pub fn make_rigid_mode(params: &BasisParams, i: usize) -> Result<BasisElement> {
    rigid_mode_with_cutoff(params, i, params.rigid_cutoff)
}

pub fn rigid_mode_with_cutoff(params: &BasisParams, i: usize, rho: f64) -> Result<BasisElement> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidIndex { index: i, expected: "1..=3" });
    }
    if !(rho > 2.0 * params.radius) {
        return Err(Error::InvalidParameter(
            "rigid cutoff must exceed the body diameter".into(),
        ));
    }
    let (l, r) = match i {
        1 => ([1.0, 0.0], 0.0),
        2 => ([0.0, 1.0], 0.0),
        _ => ([0.0, 0.0], 1.0),
    };
    Ok(BasisElement {
        kind: ElementKind::Rigid { i },
        l,
        r,
        support: 2.0 * rho,
        stream: Stream::Rigid { cutoff: PiecewisePoly::cutoff(rho), i },
    })
}

/// `v_i`: `grad Phi_i` in the fluid, `e_i` (or `x^perp`) in the body.
pub fn make_kirchhoff_field(radius: f64, i: usize) -> Result<BasisElement> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidIndex { index: i, expected: "1..=3" });
    }
    let (l, r) = match i {
        1 => ([1.0, 0.0], 0.0),
        2 => ([0.0, 1.0], 0.0),
        _ => ([0.0, 0.0], 1.0),
    };
    let support = if i == 3 { radius } else { f64::INFINITY };
    Ok(BasisElement {
        kind: ElementKind::Kirchhoff { i },
        l,
        r,
        support,
        stream: Stream::Kirchhoff { kp: KirchhoffPotentials::new(radius), i },
    })
}

/// Far-field multipole `k ≥ 1`, vanishing for `|x| ≤ 2a` and equal to
/// `grad^perp(T(k theta)/r^k)` for `|x| ≥ 4a`.
pub fn make_far_field_mode(radius: f64, k: u32, parity: Parity) -> Result<BasisElement> {
    if k < 1 {
        return Err(Error::InvalidParameter("far-field modes need k ≥ 1".into()));
    }
    Ok(BasisElement {
        kind: ElementKind::FarField { k, parity },
        l: [0.0, 0.0],
        r: 0.0,
        support: f64::INFINITY,
        stream: Stream::FarField { ramp: PiecewisePoly::ramp(2.0 * radius, 4.0 * radius), k, parity },
    })
}

/// Ordered list of basis elements.
#[derive(Debug, Clone)]
pub struct StreamBasis {
    pub params: BasisParams,
    pub elements: Vec<BasisElement>,
}

impl StreamBasis {
    pub fn new(params: BasisParams, elements: Vec<BasisElement>) -> Self {
        Self { params, elements }
    }

    /// First `n` elements of the standard sequence: the three rigid modes,
    /// then fluid modes ordered by `(k + j, |k - 1|, k)` with slip modes at
    /// `j = 0` and cosine before sine. Sizes 6, 10 and 14 end on complete
    /// cos/sin pairs.
    pub fn standard(params: BasisParams, n: usize) -> Result<Self> {
        params.validate()?;
        let mut elements = Vec::with_capacity(n);
        for i in 1..=3 {
            if elements.len() < n {
                elements.push(make_rigid_mode(&params, i)?);
            }
        }
        let mut level = 0u32;
        while elements.len() < n {
            let mut shell: Vec<(u32, u32)> = (0..=level).map(|k| (k, level - k)).collect();
            shell.sort_by_key(|&(k, _)| (k.abs_diff(1), k));
            for (k, j) in shell {
                let parities: &[Parity] = if k == 0 { &[Parity::Cos] } else { &[Parity::Cos, Parity::Sin] };
                for &p in parities {
                    if elements.len() == n {
                        break;
                    }
                    let e = if j == 0 {
                        make_slip_mode(&params, k, p)?
                    } else {
                        make_fluid_mode(&params, k, j, p)?
                    };
                    elements.push(e);
                }
            }
            level += 1;
        }
        Ok(Self { params, elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Radii where basis profiles are only finitely smooth; used as extra
    /// quadrature panel breaks.
    pub fn breaks(&self) -> Vec<f64> {
        let p = &self.params;
        vec![p.fluid_support, p.rigid_cutoff, 2.0 * p.rigid_cutoff, 2.0 * p.radius, 4.0 * p.radius]
    }

    pub fn position(&self, kind: &ElementKind) -> Option<usize> {
        self.elements.iter().position(|e| &e.kind == kind)
    }
}

/// Result of a class-membership audit of one element.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AuditReport {
    /// Max finite-difference divergence at random fluid points.
    pub divergence: f64,
    /// Max `|(w_F - w_S)·n|` on the body boundary.
    pub normal_jump: f64,
    /// Max `|w|` at random points beyond the support radius.
    pub outside_support: f64,
    /// Max deviation from `l + r x^perp` at random points inside the body.
    pub rigidity: f64,
}

impl AuditReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.divergence < tol && self.normal_jump < tol && self.outside_support < tol && self.rigidity < tol
    }
}

/// Check that `w` is divergence-free, rigid inside the body, continuous in
/// normal component across the boundary and compactly supported.
pub fn audit_element(w: &BasisElement, radius: f64, samples: usize, rng: &mut impl Rng) -> AuditReport {
    let h = 1e-3 * radius;
    let knots = w.knots();
    let mut rep = AuditReport::default();
    let outer = match w.support {
        s if !s.is_finite() => 20.0 * radius,
        s if s > 1.01 * radius => s,
        _ => 2.0 * radius,
    };
    for _ in 0..samples {
        // keep the stencil away from the knots
        let r = loop {
            let r = rng.gen_range(radius * 1.001..outer);
            if knots.iter().all(|k| (r - k).abs() > 3.0 * h) {
                break r;
            }
        };
        let t = rng.gen_range(0.0..2.0 * PI);
        let x = [r * t.cos(), r * t.sin()];
        let ux = |d: f64| w.velocity([x[0] + d, x[1]]);
        let uy = |d: f64| w.velocity([x[0], x[1] + d]);
        // fourth-order central stencil
        let d4 = |f: &dyn Fn(f64) -> f64| (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
        let div = d4(&|d| ux(d)[0]) + d4(&|d| uy(d)[1]);
        let scale = 1.0 + w.velocity_grad(x).iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        rep.divergence = rep.divergence.max(div.abs() / scale);

        let rin = rng.gen_range(0.0..radius * 0.999);
        let xin = [rin * t.cos(), rin * t.sin()];
        let v = w.realize(xin, radius);
        let rv = rigid_velocity(w.l, w.r, xin);
        rep.rigidity = rep.rigidity.max((v[0] - rv[0]).hypot(v[1] - rv[1]));

        if w.support.is_finite() {
            let rout = rng.gen_range(w.support..3.0 * w.support);
            let xo = [rout * t.cos(), rout * t.sin()];
            let vo = w.velocity(xo);
            rep.outside_support = rep.outside_support.max(vo[0].hypot(vo[1]));
        }
    }
    for j in 0..64 {
        let t = 2.0 * PI * j as f64 / 64.0;
        let (n, _) = normal_tangent(t);
        let x = [radius * t.cos(), radius * t.sin()];
        let vf = w.velocity(x);
        let vs = rigid_velocity(w.l, w.r, x);
        rep.normal_jump = rep.normal_jump.max(dot([vf[0] - vs[0], vf[1] - vs[1]], n).abs());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> BasisParams {
        BasisParams::for_radius(1.0)
    }

    #[test]
    fn standard_ordering() {
        let b = StreamBasis::standard(params(), 14).unwrap();
        let labels: Vec<String> = b.elements.iter().map(|e| e.label()).collect();
        assert_eq!(
            labels,
            [
                "rigid_1", "rigid_2", "rigid_3", "slip_k0_cos", "slip_k1_cos", "slip_k1_sin",
                "bump_k0_j1_cos", "bump_k1_j1_cos", "bump_k1_j1_sin", "bump_k0_j2_cos",
                "slip_k2_cos", "slip_k2_sin", "bump_k1_j2_cos", "bump_k1_j2_sin",
            ]
        );
        assert_eq!(StreamBasis::standard(params(), 1).unwrap().len(), 1);
    }

    #[test]
    fn fluid_modes_vanish_on_the_body() {
        for (k, j) in [(0, 1), (1, 1), (2, 3), (3, 2)] {
            let w = make_fluid_mode(&params(), k, j, Parity::Cos).unwrap();
            for t in 0..32 {
                let th = t as f64 * 0.2;
                let v = w.velocity([th.cos(), th.sin()]);
                assert!(v[0].hypot(v[1]) < 1e-12);
            }
        }
        assert!(make_fluid_mode(&params(), 1, 0, Parity::Cos).is_err());
    }

    #[test]
    fn slip_modes_are_tangential_on_the_body() {
        let w = make_slip_mode(&params(), 1, Parity::Sin).unwrap();
        for t in 0..32 {
            let th = t as f64 * 0.2;
            let (n, tau) = normal_tangent(th);
            let v = w.velocity([th.cos(), th.sin()]);
            assert!(dot(v, n).abs() < 1e-13);
            // u_theta = g'(a) sin(theta) and tau = -e_theta
            assert!((dot(v, tau) + th.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn rigid_mode_examples() {
        let p = params();
        let w3 = make_rigid_mode(&p, 3).unwrap();
        assert_eq!(w3.realize([0.5, 0.0], 1.0), [0.0, 0.5]);
        let w1 = make_rigid_mode(&p, 1).unwrap();
        let far = w1.velocity([5.1, 0.3]);
        assert_eq!(far, [0.0, 0.0]);
        let near = w1.velocity([1.5, 0.7]);
        assert!((near[0] - 1.0).abs() < 1e-14 && near[1].abs() < 1e-14);
        assert!(make_rigid_mode(&p, 4).is_err());
        assert!(rigid_mode_with_cutoff(&p, 1, 1.9).is_err());
    }

    #[test]
    fn every_element_passes_the_audit() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut all = StreamBasis::standard(p, 20).unwrap().elements;
        for i in 1..=3 {
            all.push(make_kirchhoff_field(1.0, i).unwrap());
        }
        all.push(make_far_field_mode(1.0, 2, Parity::Sin).unwrap());
        for w in &all {
            let rep = audit_element(w, 1.0, 100, &mut rng);
            assert!(rep.passes(1e-8), "{}: {rep:?}", w.label());
        }
        for i in 1..=3 {
            let rep = audit_element(&make_rigid_mode(&p, i).unwrap(), 1.0, 100, &mut rng);
            assert!(rep.divergence < 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn velocity_gradient_matches_finite_differences() {
        let p = params();
        let mut els = StreamBasis::standard(p, 14).unwrap().elements;
        els.push(make_kirchhoff_field(1.0, 2).unwrap());
        els.push(make_far_field_mode(1.0, 3, Parity::Cos).unwrap());
        let h = 1e-5;
        for w in &els {
            for x in [[1.3, 0.4], [-2.2, 1.7], [0.3, -3.1], [4.5, 2.0]] {
                let g = w.velocity_grad(x);
                for d in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[d] += h;
                    xm[d] -= h;
                    let (vp, vm) = (w.velocity(xp), w.velocity(xm));
                    for i in 0..2 {
                        let fd = (vp[i] - vm[i]) / (2.0 * h);
                        assert!((fd - g[i][d]).abs() < 1e-7, "{} at {x:?}", w.label());
                    }
                }
            }
        }
    }
}
