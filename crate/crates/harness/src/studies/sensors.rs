//! Greedy against random sensor placement over a range of sensor counts.

use pbdw::placement::{compare_strategies, write_betas, ComparisonRow, StepRecord, Strategy};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{ensure_unique, Output, Sci, Table};
use crate::setup::Setup;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorSummary {
    pub m: usize,
    pub n: usize,
    pub strategy: Strategy,
    pub mean_beta: f64,
    pub mean_error: f64,
    pub count: usize,
}

pub struct SensorStudy {
    pub rows: Vec<ComparisonRow<f64>>,
    pub summary: Vec<SensorSummary>,
    pub greedy_steps: Vec<StepRecord<f64>>,
}

impl SensorStudy {
    pub fn mean_error(&self, m: usize, strategy: Strategy) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.m == m && s.strategy == strategy)
            .map(|s| s.mean_error)
    }
}

fn order(s: Strategy) -> u8 {
    match s {
        Strategy::Sgreedy => 0,
        Strategy::Random => 1,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<SensorStudy> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let st = &cfg.studies.sensors;
    ensure_unique(st.m.iter())?;
    ensure_unique(st.seeds.iter())?;
    let basis = setup.background(st.n)?;
    let truth = setup.truth()?;
    let cmp = compare_strategies(
        &setup.space,
        &basis,
        &st.m,
        &st.seeds,
        cfg.sensors.width,
        &setup.grid(),
        &truth,
    )?;
    let mut rows = cmp.rows;
    rows.sort_by_key(|r| (r.m, order(r.strategy), r.seed));

    let mut t = Table::new("M,N,strategy,seed,beta,rel_error");
    for r in &rows {
        t.push(&[&r.m, &r.n, &r.strategy, &r.seed, &Sci(r.beta), &Sci(r.rel_error)]);
    }
    out.table("sensors_study.csv", &t)?;

    let mut summary = Vec::new();
    for chunk in rows.chunk_by(|p, q| p.m == q.m && p.strategy == q.strategy) {
        let k = chunk.len() as f64;
        summary.push(SensorSummary {
            m: chunk[0].m,
            n: chunk[0].n,
            strategy: chunk[0].strategy,
            mean_beta: chunk.iter().map(|r| r.beta).sum::<f64>() / k,
            mean_error: chunk.iter().map(|r| r.rel_error).sum::<f64>() / k,
            count: chunk.len(),
        });
    }
    let mut t = Table::new("M,N,strategy,mean_beta,mean_rel_error,count");
    for s in &summary {
        t.push(&[&s.m, &s.n, &s.strategy, &Sci(s.mean_beta), &Sci(s.mean_error), &s.count]);
    }
    out.table("sensors_summary.csv", &t)?;
    out.write("sensors_study_betas.csv", |w| {
        Ok(write_betas(w, Some(out.provenance()), &cmp.greedy.steps)?)
    })?;
    Ok(SensorStudy {
        rows,
        summary,
        greedy_steps: cmp.greedy.steps,
    })
}
