use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use slipflow::cli::output::num;
use slipflow::cli::RunConfig;
use slipflow::forms::{form_a, form_b};
use slipflow::geometry::{normal_tangent, BodyConfig};
use slipflow::harmonic::{HarmonicField, KirchhoffPotentials};
use slipflow::spaces::{Discretization, Field};

const N: usize = 6;

fn disc() -> &'static Discretization {
    static D: OnceLock<Discretization> = OnceLock::new();
    D.get_or_init(|| Discretization::standard(BodyConfig::default(), N).unwrap())
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, N)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_is_azimuthal_with_inverse_radius(r in 1.0f64..50.0, t in 0.0..2.0 * PI, a in 0.5f64..2.0) {
        let h = HarmonicField::new(a);
        let x = [a * r * t.cos(), a * r * t.sin()];
        let v = h.eval(x);
        let rr = a * r;
        prop_assert!((v[0].hypot(v[1]) - 1.0 / (2.0 * PI * rr)).abs() < 1e-14 / rr);
        prop_assert!((v[0] * x[0] + v[1] * x[1]).abs() < 1e-14);
        prop_assert_eq!(h.eval([0.5 * a * t.cos(), 0.5 * a * t.sin()]), [0.0, 0.0]);
    }

    #[test]
    fn kirchhoff_neumann_condition(t in 0.0..2.0 * PI, i in 1usize..=2) {
        let a = 1.0;
        let kp = KirchhoffPotentials::new(a);
        let x = [a * t.cos(), a * t.sin()];
        let (n, _) = normal_tangent(t);
        let g = kp.eval(i, x).unwrap().grad;
        let lhs = g[0] * n[0] + g[1] * n[1];
        prop_assert!((lhs - KirchhoffPotentials::neumann_data(i, x, n).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn convection_cancels_on_the_diagonal(u in coeffs(), v in coeffs()) {
        let d = disc();
        let (u, v) = (Field::from_coeffs(u), Field::from_coeffs(v));
        let scale = d.norm_v(&u).unwrap() * d.norm_v(&v).unwrap().powi(2) + 1e-300;
        prop_assert!(form_b(d, &u, &v, &v).unwrap().abs() <= 1e-9 * scale);
    }

    #[test]
    fn convection_is_antisymmetric(u in coeffs(), v in coeffs(), w in coeffs()) {
        let d = disc();
        let (u, v, w) = (Field::from_coeffs(u), Field::from_coeffs(v), Field::from_coeffs(w));
        let scale = d.norm_v(&u).unwrap() * d.norm_v(&v).unwrap() * d.norm_v(&w).unwrap() + 1e-300;
        let s = form_b(d, &u, &v, &w).unwrap() + form_b(d, &u, &w, &v).unwrap();
        prop_assert!(s.abs() <= 1e-9 * scale);
    }

    #[test]
    fn viscous_form_is_symmetric_and_dissipative(u in coeffs(), v in coeffs()) {
        let d = disc();
        let (u, v) = (Field::from_coeffs(u), Field::from_coeffs(v));
        let (uv, vu) = (form_a(d, &u, &v).unwrap(), form_a(d, &v, &u).unwrap());
        prop_assert!((uv - vu).abs() <= 1e-12 * (uv.abs() + 1.0));
        prop_assert!(form_a(d, &u, &u).unwrap() <= 1e-14);
    }

    #[test]
    fn rigid_part_is_linear(u in coeffs(), v in coeffs(), c in -3.0f64..3.0) {
        let d = disc();
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + c * b).collect();
        let (lu, ru) = d.rigid_part(&Field::from_coeffs(u));
        let (lv, rv) = d.rigid_part(&Field::from_coeffs(v));
        let (lw, rw) = d.rigid_part(&Field::from_coeffs(w));
        prop_assert!((lw[0] - lu[0] - c * lv[0]).abs() < 1e-12);
        prop_assert!((lw[1] - lu[1] - c * lv[1]).abs() < 1e-12);
        prop_assert!((rw - ru - c * rv).abs() < 1e-12);
    }

    #[test]
    fn written_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = num(x).parse().unwrap();
        prop_assert!(back == x);
    }

    #[test]
    fn config_accepts_admissible_material_constants(nu in 1e-3f64..10.0, alpha in 0.0f64..100.0, mass in 1e-2f64..10.0) {
        let text = format!("[body]\nnu = {nu:?}\nalpha = {alpha:?}\nmass = {mass:?}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.body().nu, nu);
        prop_assert_eq!(cfg.body().alpha, alpha);
    }

    #[test]
    fn config_rejects_negative_slip(alpha in -100.0f64..-1e-9) {
        let e = RunConfig::parse(&format!("[body]\nalpha = {alpha:?}\n")).unwrap_err().to_string();
        prop_assert!(e.contains("alpha ≥ 0"));
    }
}
