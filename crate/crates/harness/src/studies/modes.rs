//! Error against the number of background modes in the perfect-model
//! setting, with a synthetic in-span check per N.

use rayon::prelude::*;

use pbdw::assimilation::{inf_sup, metrics, reconstruct, solve_saddle, write_results, ResultRow};
use pbdw::field::DiscreteField;
use pbdw::observation::SensorSet;
use pbdw::reduced_basis::{pod, BackgroundBasis};
use pbdw::Cplx;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ensure_unique, Output};
use crate::setup::Setup;

pub struct ModeStudy {
    /// One row per N, reconstructing the truth.
    pub rows: Vec<ResultRow<f64>>,
    /// One row per N, reconstructing a field inside `Z_N`.
    pub in_span: Vec<ResultRow<f64>>,
}

struct Cell {
    row: ResultRow<f64>,
    span_row: ResultRow<f64>,
    panels: Option<[DiscreteField<f64>; 3]>,
}

fn solve_one(
    setup: &Setup,
    basis: &BackgroundBasis<f64>,
    set: &SensorSet<f64>,
    truth: &DiscreteField<f64>,
    n: usize,
) -> Result<(ResultRow<f64>, [DiscreteField<f64>; 3])> {
    let bound = basis.truncate(n)?.bind_sensors(set)?;
    let b = bound.coupling().expect("bound");
    let y = set.apply(truth);
    let sol = reconstruct(solve_saddle(set.gram(), b, &y, 0.0)?, &bound, set, &y)?;
    let row = ResultRow {
        n,
        m: set.len(),
        xi: 0.0,
        delta: 0.0,
        seed: setup.cfg.seed,
        metrics: metrics(&setup.space, &sol, truth, &bound),
        beta: inf_sup(b, set.gram())?.beta,
        orth_residual: sol.diagnostics.orthogonality_residual,
    };
    Ok((row, [sol.reconstructed, sol.background, sol.update]))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ModeStudy> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let st = &cfg.studies.modes;
    ensure_unique(st.n.iter())?;
    let n_max = *st.n.iter().max().expect("validated");
    // perfect model: the background manifold is built from the truth's physics
    let snaps = setup.snapshots(cfg.scenario.truth, st.domain)?;
    let basis = pod(&snaps, &setup.ip, n_max)?;
    let set = setup.place(&basis, st.m)?.set;
    let truth = setup.truth()?;

    let cells = st
        .n
        .par_iter()
        .map(|&n| -> Result<Cell> {
            let (row, panels) = solve_one(&setup, &basis, &set, &truth, n)?;
            let coeffs: Vec<Cplx<f64>> = (0..n)
                .map(|k| Cplx::new(1.0 / (k + 1) as f64, 1.0 / (k + 2) as f64))
                .collect();
            let inside = basis.truncate(n)?.expand(&coeffs)?;
            let (span_row, _) = solve_one(&setup, &basis, &set, &inside, n)?;
            Ok(Cell {
                row,
                span_row,
                panels: st.fields_at.contains(&n).then_some(panels),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    out.field("modes_truth.txt", setup.mesh(), &truth)?;
    let mut rows = Vec::with_capacity(cells.len());
    let mut in_span = Vec::with_capacity(cells.len());
    for c in cells {
        if let Some([u, z, eta]) = &c.panels {
            let n = c.row.n;
            out.field(&format!("modes_N{n:02}_reconstruction.txt"), setup.mesh(), u)?;
            out.field(&format!("modes_N{n:02}_background.txt"), setup.mesh(), z)?;
            out.field(&format!("modes_N{n:02}_update.txt"), setup.mesh(), eta)?;
        }
        rows.push(c.row);
        in_span.push(c.span_row);
    }
    rows.sort_by_key(|r| r.n);
    in_span.sort_by_key(|r| r.n);
    out.write("modes.csv", |w| Ok(write_results(w, Some(out.provenance()), &rows)?))?;
    out.write("modes_in_span.csv", |w| Ok(write_results(w, Some(out.provenance()), &in_span)?))?;
    Ok(ModeStudy { rows, in_span })
}
