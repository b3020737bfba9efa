//! Relative error against measurement noise for the classical and hybrid
//! methods, each with and without GCV-tuned regularization.

use std::fmt;

use rayon::prelude::*;

use pbdw::assimilation::{reconstruct, solve_saddle};
use pbdw::neural::{hybrid_reconstruct, sample_forcing};
use pbdw::observation::observe;

use crate::config::{ExperimentConfig, XiMode};
use crate::error::Result;
use crate::output::{ensure_unique, Output, Sci, Table};
use crate::setup::Setup;
use crate::studies::{noise_seed, regularization, relative_l2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pbdw,
    Apbdw,
    PbdwDeepOnet,
    ApbdwDeepOnet,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pbdw => "pbdw",
            Method::Apbdw => "apbdw",
            Method::PbdwDeepOnet => "pbdw-deeponet",
            Method::ApbdwDeepOnet => "apbdw-deeponet",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseRow {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub seed: u64,
    pub xi: f64,
    pub e_exact: f64,
    pub rel_error: f64,
    pub orth_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSummary {
    pub method: Method,
    pub delta: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

pub struct NoiseStudy {
    pub rows: Vec<NoiseRow>,
    pub summary: Vec<NoiseSummary>,
}

impl NoiseStudy {
    pub fn mean(&self, method: Method, delta: f64) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.method == method && s.delta == delta)
            .map(|s| s.mean)
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<NoiseStudy> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let spaces = setup.hybrid_spaces()?;
    // the hybrid methods join whenever a model is configured
    let model = match cfg.model_mode() {
        Some(_) => Some(setup.load_model(&spaces)?),
        None => None,
    };
    let truth_cfg = cfg.truth_config();
    let truth = setup.truth()?;
    let (set, basis) = (&spaces.set, &spaces.basis);
    let b = basis.coupling().expect("bound");
    let v = sample_forcing(set, truth_cfg.mu, &truth_cfg.source);
    let grid = cfg.assimilation.gcv_grid.values();
    let a = &cfg.assimilation;

    let cells: Vec<(f64, u64)> = a.noise.iter().flat_map(|d| a.seeds.iter().map(move |s| (*d, *s))).collect();
    ensure_unique(cells.iter().map(|(d, s)| (d.to_bits(), *s)))?;
    let per_cell = cells
        .par_iter()
        .map(|&(delta, seed)| -> Result<Vec<NoiseRow>> {
            let y = observe(set, &truth, delta, noise_seed(cfg.seed, seed))?.y;
            let gcv = regularization(XiMode::Gcv, set.gram(), b, &y, &grid)?;
            let mut rows = Vec::with_capacity(4);
            for (method, xi) in [(Method::Pbdw, 0.0), (Method::Apbdw, gcv)] {
                let sol = reconstruct(solve_saddle(set.gram(), b, &y, xi)?, basis, set, &y)?;
                rows.push((method, xi, sol));
            }
            if let Some(model) = &model {
                for (method, xi) in [(Method::PbdwDeepOnet, 0.0), (Method::ApbdwDeepOnet, gcv)] {
                    rows.push((method, xi, hybrid_reconstruct(model, set, basis, &y, &v, xi)?));
                }
            }
            Ok(rows
                .into_iter()
                .map(|(method, xi, sol)| NoiseRow {
                    method,
                    n: basis.len(),
                    m: set.len(),
                    delta,
                    seed,
                    xi,
                    e_exact: setup.space.l2_norm_sqr(&truth.sub(&sol.reconstructed)),
                    rel_error: relative_l2(&setup.space, &truth, &sol.reconstructed),
                    orth_residual: sol.diagnostics.orthogonality_residual,
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<NoiseRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|p, q| {
        (p.method, p.delta.to_bits(), p.seed).cmp(&(q.method, q.delta.to_bits(), q.seed))
    });
    ensure_unique(rows.iter().map(|r| (r.n, r.m, r.delta.to_bits(), r.seed, r.method)))?;

    let mut t = Table::new("method,N,M,delta,seed,xi,e_exact,rel_error,orth_residual");
    for r in &rows {
        t.push(&[
            &r.method,
            &r.n,
            &r.m,
            &Sci(r.delta),
            &r.seed,
            &Sci(r.xi),
            &Sci(r.e_exact),
            &Sci(r.rel_error),
            &Sci(r.orth_residual),
        ]);
    }
    out.table("noise.csv", &t)?;

    let mut summary: Vec<NoiseSummary> = Vec::new();
    for chunk in rows.chunk_by(|p, q| p.method == q.method && p.delta == q.delta) {
        let e: Vec<f64> = chunk.iter().map(|r| r.rel_error).collect();
        summary.push(NoiseSummary {
            method: chunk[0].method,
            delta: chunk[0].delta,
            mean: crate::stats::mean(&e),
            std: crate::stats::std_dev(&e),
            count: e.len(),
        });
    }
    let mut t = Table::new("method,delta,mean_rel_error,std_rel_error,count");
    for s in &summary {
        t.push(&[&s.method, &Sci(s.delta), &Sci(s.mean), &Sci(s.std), &s.count]);
    }
    out.table("noise_summary.csv", &t)?;
    Ok(NoiseStudy { rows, summary })
}
