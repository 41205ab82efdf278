//! Run configuration: a TOML file with the sections `[body]`, `[numerics]`,
//! `[initial]` (with `[[initial.mode]]` entries), `[density]` and `[run]`.
//! Every key is optional; unknown keys are rejected.
//!
//! ```toml
//! [body]
//! radius = 1.0
//! mass = 1.0
//! inertia = 1.0
//! nu = 0.5
//! alpha = 1.0
//!
//! [numerics]
//! n = 10            # basis size
//! truncation = 8.0  # R
//! n_r = 16          # Gauss points per radial panel
//! n_theta = 64
//! # r_inf = 32768.0 (default: far-field tail below 1e-8)
//! dt = 1e-3
//! T = 1.0
//!
//! [initial]
//! beta = 1.0
//! l0 = [0.0, 0.0]
//! r0 = 0.0
//! [[initial.mode]]
//! index = 3
//! coeff = 0.3
//!
//! [density]
//! truncation = 9.0
//! n_r = 384
//! n_theta = 512
//! eps = [0.2, 0.1, 0.05]
//!
//! [run]
//! seed = 0
//! out = "out"
//! samples = 50
//! forms_n = 12
//! suites = ["forms", "energy", "beta"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::DensitySettings;
use crate::error::{Error, Result};
use crate::geometry::{far_field_radius, BodyConfig};
use crate::spaces::GridParams;
use crate::suites::RunSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BodySection {
    pub radius: f64,
    pub mass: f64,
    pub inertia: f64,
    pub nu: f64,
    pub alpha: f64,
}

impl Default for BodySection {
    fn default() -> Self {
        let b = BodyConfig::default();
        Self { radius: b.radius, mass: b.mass, inertia: b.inertia, nu: b.nu, alpha: b.alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub n: usize,
    pub truncation: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub r_inf: Option<f64>,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self { n: 10, truncation: 8.0, n_r: 16, n_theta: 64, r_inf: None, dt: 1e-3, t_final: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub index: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub beta: f64,
    pub l0: [f64; 2],
    pub r0: f64,
    pub mode: Vec<ModeEntry>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { beta: 1.0, l0: [0.0; 2], r0: 0.0, mode: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySection {
    pub truncation: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub eps: Vec<f64>,
}

impl Default for DensitySection {
    fn default() -> Self {
        let d = DensitySettings::default();
        Self { truncation: d.truncation, n_r: d.n_r, n_theta: d.n_theta, eps: d.eps }
    }
}

pub const SUITES: [&str; 4] = ["forms", "energy", "beta", "refinement"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub out: String,
    /// Random triples in the form suite.
    pub samples: usize,
    /// Basis size of the form suite.
    pub forms_n: usize,
    /// Suites run by `verify-forms`.
    pub suites: Vec<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            out: "out".into(),
            samples: 50,
            forms_n: 12,
            suites: vec!["forms".into(), "energy".into(), "beta".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub body: BodySection,
    pub numerics: NumericsSection,
    pub initial: InitialSection,
    pub density: DensitySection,
    pub run: RunSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn invalid(what: impl Into<String>) -> Error {
    Error::Config(format!("invalid configuration: {}", what.into()))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_string();
            match e.span() {
                Some(s) => Error::Config(format!("line {}: {msg}", line_of(text, s.start))),
                None => Error::Config(msg),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn body(&self) -> BodyConfig {
        let b = &self.body;
        BodyConfig { radius: b.radius, mass: b.mass, inertia: b.inertia, nu: b.nu, alpha: b.alpha, beta: self.initial.beta }
    }

    pub fn validate(&self) -> Result<()> {
        let body = self.body();
        body.validate().map_err(|e| match e {
            Error::InvalidParameter(s) => invalid(s),
            other => other,
        })?;
        let n = &self.numerics;
        let checks = [
            (n.n >= 1, "n ≥ 1".to_string()),
            (n.truncation > body.diameter(), format!("truncation > {}", body.diameter())),
            (n.n_r >= 2, "n_r ≥ 2".into()),
            (n.n_theta >= 8, "n_theta ≥ 8".into()),
            (n.r_inf.is_none_or(|r| r > 8.0 * body.radius), format!("r_inf > {}", 8.0 * body.radius)),
            (n.dt > 0.0 && n.dt.is_finite(), "dt > 0".into()),
            (n.t_final >= 0.0 && n.t_final.is_finite(), "T ≥ 0".into()),
            (n.t_final / n.dt <= 1e7, "T / dt ≤ 1e7".into()),
            (self.initial.l0.iter().chain([&self.initial.r0]).all(|v| v.is_finite()), "l0, r0 finite".into()),
            (
                (self.initial.l0 == [0.0; 2] && self.initial.r0 == 0.0) || n.n >= 3,
                "n ≥ 3 when l0 or r0 is set".into(),
            ),
            (self.density.truncation / 4.0 > body.diameter(), format!("density.truncation > {}", 4.0 * body.diameter())),
            (!self.density.eps.is_empty() && self.density.eps.iter().all(|e| *e > 0.0), "density.eps nonempty and positive".into()),
            (self.run.samples >= 1, "samples ≥ 1".into()),
            (self.run.forms_n >= 1, "forms_n ≥ 1".into()),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(invalid(what));
            }
        }
        for m in &self.initial.mode {
            if m.index >= n.n {
                return Err(invalid(format!("initial.mode index {} < n = {}", m.index, n.n)));
            }
            if !m.coeff.is_finite() {
                return Err(invalid(format!("initial.mode {} coefficient finite", m.index)));
            }
        }
        for s in &self.run.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(invalid(format!("unknown suite `{s}`, expected one of {SUITES:?}")));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> RunSpec {
        let body = self.body();
        let n = &self.numerics;
        let mut initial: Vec<(usize, f64)> = Vec::new();
        for (i, c) in [(0, self.initial.l0[0]), (1, self.initial.l0[1]), (2, self.initial.r0)] {
            if c != 0.0 {
                initial.push((i, c));
            }
        }
        initial.extend(self.initial.mode.iter().map(|m| (m.index, m.coeff)));
        RunSpec {
            body,
            n: n.n,
            truncation: n.truncation,
            grid: GridParams { n_r: n.n_r, n_theta: n.n_theta, r_inf: n.r_inf.unwrap_or_else(|| far_field_radius(body.radius, 1e-8)) },
            dt: n.dt,
            t_final: n.t_final,
            initial,
        }
    }

    pub fn density_settings(&self) -> DensitySettings {
        let d = &self.density;
        DensitySettings { truncation: d.truncation, n_r: d.n_r, n_theta: d.n_theta, eps: d.eps.clone() }
    }

    /// Every setting, defaults included, as ordered `key = value` pairs.
    pub fn echo(&self) -> Vec<(String, String)> {
        let spec = self.spec();
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        let b = &self.body;
        put("body.radius", format!("{:?}", b.radius));
        put("body.mass", format!("{:?}", b.mass));
        put("body.inertia", format!("{:?}", b.inertia));
        put("body.nu", format!("{:?}", b.nu));
        put("body.alpha", format!("{:?}", b.alpha));
        let n = &self.numerics;
        put("numerics.n", n.n.to_string());
        put("numerics.truncation", format!("{:?}", n.truncation));
        put("numerics.n_r", n.n_r.to_string());
        put("numerics.n_theta", n.n_theta.to_string());
        put("numerics.r_inf", format!("{:?}", spec.grid.r_inf));
        put("numerics.dt", format!("{:?}", n.dt));
        put("numerics.T", format!("{:?}", n.t_final));
        let i = &self.initial;
        put("initial.beta", format!("{:?}", i.beta));
        put("initial.l0", format!("[{:?}, {:?}]", i.l0[0], i.l0[1]));
        put("initial.r0", format!("{:?}", i.r0));
        for m in &i.mode {
            put(&format!("initial.mode.{}", m.index), format!("{:?}", m.coeff));
        }
        let d = &self.density;
        put("density.truncation", format!("{:?}", d.truncation));
        put("density.n_r", d.n_r.to_string());
        put("density.n_theta", d.n_theta.to_string());
        put("density.eps", format!("{:?}", d.eps));
        let r = &self.run;
        put("run.seed", r.seed.to_string());
        put("run.out", r.out.clone());
        put("run.samples", r.samples.to_string());
        put("run.forms_n", r.forms_n.to_string());
        put("run.suites", format!("{:?}", r.suites));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = RunConfig::parse("[numerics]\nT = 1.0\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let echo = cfg.echo();
        assert!(echo.iter().any(|(k, v)| k == "numerics.T" && v == "1.0"));
        assert!(echo.iter().any(|(k, v)| k == "numerics.r_inf" && v == "32768.0"));
    }

    #[test]
    fn validation_names_the_precondition() {
        let e = RunConfig::parse("[body]\nalpha = -1.0\n").unwrap_err().to_string();
        assert!(e.contains("alpha ≥ 0"), "{e}");
        let e = RunConfig::parse("[numerics]\ntruncation = 2.0\n").unwrap_err().to_string();
        assert!(e.contains("truncation > 2"), "{e}");
        let e = RunConfig::parse("[numerics]\nn = 4\n[[initial.mode]]\nindex = 4\ncoeff = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("index 4"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let e = RunConfig::parse("[body]\nnu = 0.5\nvicosity = 0.5\n").unwrap_err().to_string();
        assert!(e.contains("vicosity") && e.contains("line 3"), "{e}");
        let e = RunConfig::parse("[body]\nnu = \n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn spec_maps_rigid_data_to_rigid_modes() {
        let cfg = RunConfig::parse("[initial]\nl0 = [0.5, 0.0]\nr0 = 0.2\n[[initial.mode]]\nindex = 3\ncoeff = 0.3\n").unwrap();
        let spec = cfg.spec();
        assert_eq!(spec.initial, vec![(0, 0.5), (2, 0.2), (3, 0.3)]);
        assert_eq!(spec.body.beta, 1.0);
    }
}
