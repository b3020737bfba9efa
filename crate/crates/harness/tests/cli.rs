use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pbdw_harness::ExperimentConfig;

fn pbdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbdw")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const TINY: &str = r#"
[mesh]
nodes = 17
[physics]
grid = 7
[assimilation]
n = [1, 2]
xi = "gcv"
noise = [0.0, 0.1]
seeds = [1, 2]
[sensors]
count = 12
[model]
pairs = 8
epochs = 20
[studies.modes]
n = [1, 2, 3]
m = 12
fields_at = [2]
[studies.sensors]
m = [2, 4]
seeds = [1, 2]
[studies.bias]
samples = 2
[studies.cost]
repetitions = 2
"#;

#[test]
fn help_succeeds_and_lists_subcommands() {
    let o = pbdw(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in ["mesh", "snapshots", "pod", "sensors", "assimilate", "dataset", "train", "study", "report"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    assert_eq!(code(&pbdw(&["study", "--help"])), 0);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [&["frobnicate"][..], &[][..], &["study", "weather"][..], &["sensors"][..]] {
        let o = pbdw(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(stderr(&o).contains("Usage"), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    for body in [
        "[mesh]\nnodez = 3\n",
        "[mesh]\nnodes = 1\n",
        "[assimilation]\nxi = \"sometimes\"\n",
        "[sensors]\ncount = \"NN\"\n",
        "seed = \n",
    ] {
        let cfg = write_config(dir.path(), body);
        let o = pbdw(&["--config", cfg.to_str().unwrap(), "--out", out, "mesh"]);
        assert_eq!(code(&o), 2, "{body}: {}", stderr(&o));
    }
    let o = pbdw(&["--config", "/nonexistent/cfg.toml", "mesh"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let out = dir.path().join("out");
    let o = pbdw(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "study", "bias"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("pbdw train"), "{}", stderr(&o));
}

#[test]
fn unobservable_background_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[mesh]\nnodes = 17\n[physics]\ngrid = 7\n[sensors]\ncount = 1\nstrategy = \"random\"\n[assimilation]\nn = [2]\nseeds = [1]\n";
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let o = pbdw(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "assimilate"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn shipped_configs_parse_and_default_matches_builtin() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let default = ExperimentConfig::load(&root.join("default.toml")).unwrap();
    assert_eq!(default, ExperimentConfig::default());
    ExperimentConfig::load(&root.join("quick.toml")).unwrap().validate().unwrap();
}

fn run_pipeline(cfg: &Path, out: &Path) {
    let steps: &[&[&str]] = &[
        &["mesh"],
        &["snapshots"],
        &["pod"],
        // the random placement records its own strategy in the hash, so the
        // configured one runs last
        &["sensors", "random"],
        &["sensors", "place"],
        &["assimilate"],
        &["dataset"],
        &["train"],
        &["study", "modes"],
        &["study", "bias"],
        &["study", "noise"],
        &["study", "sensors"],
        &["study", "cost"],
        &["report"],
    ];
    for step in steps {
        let mut args = vec!["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(step);
        let o = pbdw(&args);
        assert_eq!(code(&o), 0, "{step:?}: {}", stderr(&o));
    }
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn pipeline_writes_every_table_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_pipeline(&cfg, &a);
    run_pipeline(&cfg, &b);

    let tables = csvs(&a);
    let names: Vec<&str> = tables.iter().map(|t| t.0.as_str()).collect();
    for want in [
        "mesh.csv",
        "snapshots.csv",
        "pod.csv",
        "sensors.csv",
        "betas.csv",
        "measurement.csv",
        "results.csv",
        "dataset.csv",
        "loss.csv",
        "modes.csv",
        "bias.csv",
        "noise.csv",
        "noise_summary.csv",
        "sensors_study.csv",
        "cost.csv",
    ] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    let hash = ExperimentConfig::load(&cfg).unwrap().hash();
    for (name, bytes) in &tables {
        let text = String::from_utf8(bytes.clone()).unwrap();
        let mut lines = text.lines();
        let first = lines.next().unwrap();
        assert!(first.starts_with('#') && first.contains(&hash), "{name}: {first} vs {hash}");
        let header = lines.next().unwrap();
        assert!(!header.starts_with('#') && header.contains(','), "{name}: {header}");
    }
    let results = String::from_utf8(tables.iter().find(|t| t.0 == "results.csv").unwrap().1.clone()).unwrap();
    assert_eq!(
        results.lines().nth(1).unwrap(),
        "N,M,xi,delta,seed,e_exact,e_estim,eta_norm,e_svd,beta,orth_residual"
    );
    // 2 modes x 2 noise levels x 2 seeds
    assert_eq!(results.lines().count(), 2 + 8);
    assert_eq!(tables, csvs(&b));
    assert!(a.join("model.json").exists() && a.join("basis.txt").exists() && a.join("report.txt").exists());
}

#[test]
fn seed_override_changes_the_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let mut lines = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(seed);
        let o = pbdw(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed, "mesh"]);
        assert_eq!(code(&o), 0);
        let text = std::fs::read_to_string(out.join("mesh.csv")).unwrap();
        lines.push(text.lines().next().unwrap().to_string());
    }
    assert_ne!(lines[0], lines[1]);
}
