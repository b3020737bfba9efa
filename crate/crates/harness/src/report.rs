//! Gnuplot scripts for the study tables and a run record listing the
//! content hash of every CSV in the output directory.

use std::io::Write;

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::Output;

const PREAMBLE: &str = "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset grid\nset terminal pngcairo size 900,600\n";

fn series(file: &str, method_col: usize, method: &str, x: usize, y: usize) -> String {
    format!("'{file}' using {x}:(strcol({method_col}) eq '{method}' ? ${y} : 1/0) with linespoints title '{method}'")
}

/// `(file name, script body)` for every figure.
pub fn scripts() -> Vec<(&'static str, String)> {
    let noise = ["pbdw", "apbdw", "pbdw-deeponet", "apbdw-deeponet"]
        .iter()
        .map(|m| series("noise_summary.csv", 1, m, 2, 3))
        .collect::<Vec<_>>()
        .join(", \\\n     ");
    let sensors = ["sgreedy", "random"]
        .iter()
        .map(|m| series("sensors_summary.csv", 3, m, 1, 5))
        .collect::<Vec<_>>()
        .join(", \\\n     ");
    vec![
        (
            "pod.gp",
            "set output 'pod.png'\nset logscale y\nset xlabel 'k'\nplot 'pod.csv' using 1:2 with linespoints, \\\n     'pod.csv' using 1:3 with linespoints\n".into(),
        ),
        (
            "modes.gp",
            "set output 'modes.png'\nset logscale y\nset xlabel 'N'\nplot 'modes.csv' using 1:6 with linespoints, \\\n     'modes.csv' using 1:7 with linespoints, \\\n     'modes.csv' using 1:($9**2) with linespoints title 'e_svd^2'\n".into(),
        ),
        (
            "noise.gp",
            format!("set output 'noise.png'\nset xlabel 'delta'\nset ylabel 'relative L2 error'\nplot {noise}\n"),
        ),
        (
            "sensors.gp",
            format!("set output 'sensors.png'\nset logscale xy\nset xlabel 'M'\nset ylabel 'mean relative L2 error'\nplot {sensors}\n"),
        ),
        (
            "betas.gp",
            "set output 'betas.png'\nset xlabel 'M'\nset ylabel 'beta'\nplot 'betas.csv' using 1:3 with linespoints, \\\n     'sensors_study_betas.csv' using 1:3 with linespoints\n".into(),
        ),
        (
            "loss.gp",
            "set output 'loss.png'\nset logscale y\nset xlabel 'epoch'\nplot 'loss.csv' using 1:2 with lines, \\\n     'loss.csv' using 1:3 with lines\n".into(),
        ),
        (
            "bias_curve.gp",
            "set output 'bias_curve.png'\nset xlabel 'sample'\nset ylabel 'relative L2 error'\nplot 'bias_curve.csv' using 1:5 with linespoints, \\\n     'bias_curve.csv' using 1:6 with linespoints, \\\n     'bias_curve.csv' using 1:7 with linespoints\n".into(),
        ),
    ]
}

pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let out = Output::create(cfg)?;
    let io = |e: std::io::Error| HarnessError::Core(e.into());
    for (name, body) in scripts() {
        out.write(name, |w| {
            writeln!(w, "# {}", out.provenance()).map_err(io)?;
            w.write_all(PREAMBLE.as_bytes()).map_err(io)?;
            w.write_all(body.as_bytes()).map_err(io)
        })?;
    }
    let mut csvs: Vec<String> = std::fs::read_dir(out.dir())
        .map_err(io)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    let mut lines = vec![
        format!("# {}", out.provenance()),
        format!("config_hash {}", cfg.hash()),
    ];
    for name in &csvs {
        let bytes = std::fs::read(out.path(name)).map_err(io)?;
        lines.push(format!("{} {name}", hex::encode(Sha256::digest(&bytes))));
    }
    out.write("report.txt", |w| {
        for l in &lines {
            writeln!(w, "{l}").map_err(io)?;
        }
        Ok(())
    })?;
    Ok(())
}
