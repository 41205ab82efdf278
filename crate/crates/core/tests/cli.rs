use std::path::Path;

use slipflow::cli::output::Manifest;
use slipflow::cli::{main_with_args, run, Command, RunConfig};

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn cli(dir: &Path, config: &str, command: &str) -> i32 {
    let out = dir.join("out");
    main_with_args(["slipflow", "--config", config, "--out", out.to_str().unwrap(), command])
}

#[test]
fn minimal_config_echoes_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[numerics]\nT = 0.01\n");
    assert_eq!(cli(tmp.path(), &cfg, "simulate"), 0);
    let m = Manifest::parse(&std::fs::read_to_string(tmp.path().join("out/simulate/manifest.txt")).unwrap());
    assert_eq!(m.get("command"), Some("simulate"));
    assert_eq!(m.get("seed"), Some("0"));
    assert_eq!(m.get("config.numerics.T"), Some("0.01"));
    assert_eq!(m.get("config.body.nu"), Some("0.5"));
    assert_eq!(m.get("config.numerics.n"), Some("10"));
    assert_eq!(m.get("status"), Some("complete"));
    assert_eq!(m.entries.last().unwrap().0, "status");
}

#[test]
fn invalid_configs_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[body]\nalpha = -1.0\n");
    assert_eq!(cli(tmp.path(), &cfg, "simulate"), 2);
    let e = RunConfig::load(Path::new(&cfg)).unwrap_err().to_string();
    assert!(e.contains("alpha ≥ 0"), "{e}");
    let cfg = write_config(tmp.path(), "[body]\nvicosity = 0.5\n");
    assert_eq!(cli(tmp.path(), &cfg, "simulate"), 2);
    let e = RunConfig::load(Path::new(&cfg)).unwrap_err().to_string();
    assert!(e.contains("vicosity"), "{e}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn rest_state_stays_at_rest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[numerics]\nT = 0.02\n[initial]\nbeta = 0.0\n");
    assert_eq!(cli(tmp.path(), &cfg, "simulate"), 0);
    let mut rdr = csv::Reader::from_path(tmp.path().join("out/simulate/trajectory.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "t [T]");
    assert!(header.iter().any(|h| h.starts_with("energy_residual")));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        for v in rec.iter().skip(1) {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
        rows += 1;
    }
    assert_eq!(rows, 21);
}

#[test]
fn circulation_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    assert_eq!(cli(tmp.path(), &cfg, "verify-fields"), 0);
    let mut rdr = csv::Reader::from_path(tmp.path().join("out/verify-fields/checks.csv")).unwrap();
    let row = rdr.records().map(|r| r.unwrap()).find(|r| &r[1] == "circulation_rho1").unwrap();
    assert!(row[2].starts_with("1.0") || row[2].starts_with("9.99999999"), "{}", &row[2]);
    assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(&row[5], "true");
}

#[test]
fn same_seed_same_bytes() {
    let read = |seed: u64| {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::parse("[numerics]\nT = 0.02\n[[initial.mode]]\nindex = 4\ncoeff = 0.2\n[run]\nsamples = 5\nsuites = [\"forms\", \"beta\"]\n").unwrap();
        cfg.run.seed = seed;
        cfg.run.out = tmp.path().to_string_lossy().into_owned();
        let mut bytes = Vec::new();
        for c in [Command::Simulate, Command::VerifyForms, Command::VerifyFields] {
            let o = run(c, &cfg).unwrap();
            let mut names: Vec<_> = std::fs::read_dir(&o.dir).unwrap().map(|e| e.unwrap().path()).collect();
            names.sort();
            for p in names {
                bytes.push(std::fs::read(p).unwrap());
            }
        }
        bytes
    };
    let a = read(3);
    assert_eq!(a, read(3));
    assert_ne!(a, read(4));
}

#[test]
fn report_merges_manifests() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[numerics]\nT = 0.01\n");
    assert_eq!(cli(tmp.path(), &cfg, "simulate"), 0);
    assert_eq!(cli(tmp.path(), &cfg, "verify-fields"), 0);
    assert_eq!(cli(tmp.path(), &cfg, "report"), 0);
    let text = std::fs::read_to_string(tmp.path().join("out/report/summary.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("simulate,simulate,") && lines[1].contains(",complete,"));
    assert!(lines[2].starts_with("verify-fields,"));
}

#[test]
fn failed_checks_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[numerics]\ndt = 0.05\nT = 1.0\n[[initial.mode]]\nindex = 3\ncoeff = 0.3\n[run]\nsuites = [\"energy\"]\n",
    );
    assert_eq!(cli(tmp.path(), &cfg, "verify-forms"), 1);
    let m = Manifest::parse(&std::fs::read_to_string(tmp.path().join("out/verify-forms/manifest.txt")).unwrap());
    assert_eq!(m.get("status"), Some("failed"));
    assert!(m.get("suite.energy.failed").unwrap().contains("energy_residual_max"));
}
