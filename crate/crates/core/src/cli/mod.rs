//! Command-line front end. Each command writes its artifacts and a
//! `manifest.txt` to `<out>/<command>/`.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::galerkin::energy_residual;
use crate::suites::{self, SuiteReport};
pub use config::RunConfig;
use output::{num, suite_table, Manifest, Status, Table};

#[derive(Debug, Parser)]
#[command(name = "slipflow", version, about = "Galerkin simulation of a fluid around a rigid disk")]
pub struct Cli {
    /// TOML run configuration; defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root, overrides `run.out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed, overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the Galerkin system and write the trajectory.
    Simulate,
    /// Form identities, continuity envelopes, energy balance and beta structure.
    VerifyForms,
    /// Harmonic field, Kirchhoff potentials and added mass.
    VerifyFields,
    /// Smooth approximation errors and the trace counterexample.
    DensityDemo,
    /// Merge the manifests under the output root.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::VerifyForms => "verify-forms",
            Command::VerifyFields => "verify-fields",
            Command::DensityDemo => "density-demo",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    pub status: Status,
    pub manifest: Manifest,
}

struct Artifacts {
    files: Vec<String>,
    status: Status,
    extra: Vec<(String, String)>,
}

impl Artifacts {
    fn new() -> Self {
        Self { files: Vec::new(), status: Status::Complete, extra: Vec::new() }
    }

    fn table(&mut self, dir: &Path, name: &str, t: &Table) -> Result<()> {
        t.write(&dir.join(name))?;
        self.files.push(name.into());
        Ok(())
    }

    fn suites(&mut self, reports: &[SuiteReport]) {
        for r in reports {
            let fails = r.failures();
            self.extra.push((format!("suite.{}", r.suite), if fails.is_empty() { "pass".into() } else { "fail".into() }));
            if !fails.is_empty() {
                let names: Vec<&str> = fails.iter().map(|c| c.name.as_str()).collect();
                self.extra.push((format!("suite.{}.failed", r.suite), names.join(",")));
                self.status = self.status.worst(Status::Failed);
            }
        }
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.run.out = o.to_string_lossy().into_owned();
    }
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    Ok(cfg)
}

/// Run one command; the manifest is written even when the command fails.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let root = PathBuf::from(&cfg.run.out);
    let dir = root.join(command.name());
    std::fs::create_dir_all(&dir)?;
    let mut manifest = Manifest::default();
    manifest.put("command", command.name());
    manifest.put("version", env!("CARGO_PKG_VERSION"));
    manifest.put("seed", cfg.run.seed.to_string());
    for (k, v) in cfg.echo() {
        if k != "run.out" {
            manifest.put(format!("config.{k}"), v);
        }
    }
    let result = match command {
        Command::Simulate => simulate(cfg, &dir),
        Command::VerifyForms => verify_forms(cfg, &dir),
        Command::VerifyFields => verify_fields(cfg, &dir),
        Command::DensityDemo => density_demo(cfg, &dir),
        Command::Report => report(&root, &dir),
    };
    let status = match &result {
        Ok(a) => {
            manifest.put("artifacts", a.files.join(","));
            for (k, v) in &a.extra {
                manifest.put(k.clone(), v.clone());
            }
            a.status
        }
        Err(e) => {
            manifest.put("artifacts", "");
            manifest.put("error", e.to_string());
            Status::Error
        }
    };
    manifest.put("status", status.as_str());
    manifest.write(&dir)?;
    result?;
    Ok(Outcome { dir, status, manifest })
}

fn simulate(cfg: &RunConfig, dir: &Path) -> Result<Artifacts> {
    let spec = cfg.spec();
    let (_, _, traj) = spec.run()?;
    let res = energy_residual(&traj);
    let mut header: Vec<String> = vec!["t [T]".into()];
    header.extend((0..spec.n).map(|i| format!("g_{i} [1]")));
    header.extend(
        ["l_1 [L/T]", "l_2 [L/T]", "r [1/T]", "energy [M L^2/T^2]", "dissipation [M L^2/T^3]", "friction [M L^2/T^3]", "energy_residual [M L^2/T^3]"]
            .map(String::from),
    );
    let mut t = Table::new(header);
    for k in 0..traj.len() {
        let mut row = vec![num(traj.times[k])];
        row.extend(traj.coeffs[k].iter().map(|c| num(*c)));
        let (l, r) = traj.rigid[k];
        let q = &traj.diagnostics[k];
        row.extend([l[0], l[1], r, q.energy, q.dissipation, q.friction, res[k]].map(num));
        t.push(row);
    }
    let mut a = Artifacts::new();
    a.table(dir, "trajectory.csv", &t)?;
    a.extra.push(("steps".into(), traj.len().saturating_sub(1).to_string()));
    a.extra.push(("max_energy_residual".into(), num(res.iter().fold(0.0f64, |m, x| m.max(x.abs())))));
    if let Some(e) = traj.blow_up {
        a.extra.push(("stopped".into(), e));
        a.status = Status::Partial;
    }
    Ok(a)
}

pub fn refinement_levels(cfg: &RunConfig) -> (Vec<usize>, Vec<f64>) {
    let spec = cfg.spec();
    let ns = [spec.n.saturating_sub(4).max(3), spec.n, spec.n + 4];
    let mut ns: Vec<usize> = ns.to_vec();
    ns.dedup();
    let rs = [0.5, 1.0, 2.0].map(|f| f * spec.truncation).into_iter().filter(|r| *r > spec.body.diameter()).collect();
    (ns, rs)
}

fn verify_forms(cfg: &RunConfig, dir: &Path) -> Result<Artifacts> {
    let spec = cfg.spec();
    let seed = cfg.run.seed;
    let mut reports = Vec::new();
    for s in &cfg.run.suites {
        reports.push(match s.as_str() {
            "forms" => suites::form_suite(&spec.body, cfg.run.forms_n, cfg.run.samples, seed)?,
            "energy" => suites::energy_suite(&spec)?,
            "beta" => suites::beta_suite(&spec, seed)?,
            "refinement" => {
                let (ns, rs) = refinement_levels(cfg);
                suites::refinement_suite(&spec, &ns, &rs)?
            }
            other => return Err(Error::Config(format!("unknown suite `{other}`"))),
        });
    }
    let mut a = Artifacts::new();
    a.table(dir, "checks.csv", &suite_table(&reports))?;
    a.suites(&reports);
    Ok(a)
}

fn verify_fields(cfg: &RunConfig, dir: &Path) -> Result<Artifacts> {
    let rep = suites::field_suite(&cfg.body(), cfg.run.seed)?;
    let mut a = Artifacts::new();
    a.table(dir, "checks.csv", &suite_table(std::slice::from_ref(&rep)))?;
    a.suites(std::slice::from_ref(&rep));
    Ok(a)
}

fn density_demo(cfg: &RunConfig, dir: &Path) -> Result<Artifacts> {
    let seed = cfg.run.seed;
    let (rep, tables) = suites::density_suite(cfg.body.radius, &cfg.density_settings(), seed)?;
    let mut errors = Table::new([
        "input",
        "eps [L]",
        "error_h [L]",
        "error_grad [1]",
        "error_v [1]",
        "audit_divergence [1/T]",
        "audit_normal_trace [L/T]",
        "audit_outside_support [L^2/T]",
        "audit_passed",
    ]);
    for t in &tables {
        for ap in &t.approximants {
            errors.push(vec![
                t.label.clone(),
                num(ap.eps),
                num(ap.error_h),
                num(ap.error_grad),
                num(ap.error()),
                num(ap.audit.divergence),
                num(ap.audit.normal_jump),
                num(ap.audit.outside_support),
                ap.audit.passes(crate::tolerances::AUDIT).to_string(),
            ]);
        }
    }
    let ce = crate::density::counterexample_trace(64, seed)?;
    let mut smooth = Table::new(["delta [L]", "l2_distance [L]", "h1_seminorm_distance [1]"]);
    for (d, l2, h1) in &ce.smoothings {
        smooth.push(vec![num(*d), num(*l2), num(*h1)]);
    }
    let mut a = Artifacts::new();
    a.table(dir, "checks.csv", &suite_table(std::slice::from_ref(&rep)))?;
    a.table(dir, "density_errors.csv", &errors)?;
    a.table(dir, "counterexample.csv", &smooth)?;
    a.suites(std::slice::from_ref(&rep));
    Ok(a)
}

fn report(root: &Path, dir: &Path) -> Result<Artifacts> {
    let mut found: Vec<(String, Manifest)> = Vec::new();
    for entry in std::fs::read_dir(root)? {
        let path = entry?.path();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let file = path.join("manifest.txt");
        if path == dir || !file.is_file() {
            continue;
        }
        found.push((name, Manifest::parse(&std::fs::read_to_string(file)?)));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let mut t = Table::new(["run", "command", "version", "seed", "status", "artifacts", "failed_checks"]);
    let mut a = Artifacts::new();
    for (name, m) in &found {
        let get = |k: &str| m.get(k).unwrap_or("").to_string();
        let failed: Vec<String> = m.entries.iter().filter(|(k, _)| k.ends_with(".failed")).map(|(_, v)| v.clone()).collect();
        let status = get("status");
        if status != "complete" {
            a.status = a.status.worst(if status == "partial" { Status::Partial } else { Status::Failed });
        }
        t.push(vec![name.clone(), get("command"), get("version"), get("seed"), status, get("artifacts"), failed.join(",")]);
    }
    a.table(dir, "summary.csv", &t)?;
    a.extra.push(("runs".into(), found.len().to_string()));
    Ok(a)
}

/// Parse arguments, run, and map the outcome to an exit code: 0 when every
/// check passed, 1 on failed checks or partial artifacts, 2 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(cli.command, &cfg) {
        Ok(o) => {
            println!("{}: {} ({})", cli.command.name(), o.status.as_str(), o.dir.display());
            o.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
