//! Online cost structure: which dense factorizations each reconstruction
//! path performs, plus informational wall-clock medians.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use pbdw::assimilation::{reconstruct, solve_saddle};
use pbdw::linalg::cost::track;
use pbdw::linalg::{FactorKind, Factorization};
use pbdw::neural::{hybrid_reconstruct, sample_forcing};

use crate::config::ExperimentConfig;
use crate::error::{config_err, Result};
use crate::output::{Output, Table};
use crate::setup::Setup;

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub m: usize,
    pub n: usize,
    pub classical: Vec<Factorization>,
    pub hybrid: Vec<Factorization>,
    /// Median seconds per reconstruction; machine dependent.
    pub classical_median: f64,
    pub hybrid_median: f64,
}

impl CostReport {
    /// Factorizations of the full saddle-point order `M + N` on a path.
    pub fn full_order(list: &[Factorization], m: usize, n: usize) -> usize {
        list.iter().filter(|f| f.order == m + n).count()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn counts(path: &str, list: &[Factorization], t: &mut Table) {
    let mut c: BTreeMap<(FactorKind, usize), usize> = BTreeMap::new();
    for f in list {
        *c.entry((f.kind, f.order)).or_default() += 1;
    }
    for ((kind, order), k) in c {
        t.push(&[&path, &kind.name(), &order, &k]);
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<CostReport> {
    let n = cfg.model.n;
    let m = cfg.sensors.count.resolve(n)?;
    if m == 0 {
        return Err(config_err("cost study needs at least one sensor"));
    }
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let spaces = setup.hybrid_spaces()?;
    let model = setup.load_model(&spaces)?;
    let (set, basis) = (&spaces.set, &spaces.basis);
    let b = basis.coupling().expect("bound");
    let truth_cfg = cfg.truth_config();
    let y = set.apply(&setup.truth()?);
    let v = sample_forcing(set, truth_cfg.mu, &truth_cfg.source);

    let classical_path = || -> pbdw::Result<()> {
        reconstruct(solve_saddle(set.gram(), b, &y, 0.0)?, basis, set, &y).map(|_| ())
    };
    let hybrid_path = || -> pbdw::Result<()> { hybrid_reconstruct(&model, set, basis, &y, &v, 0.0).map(|_| ()) };
    let (r, classical) = track(classical_path);
    r?;
    let (r, hybrid) = track(hybrid_path);
    r?;

    let time = |f: &dyn Fn() -> pbdw::Result<()>| -> Result<f64> {
        let mut samples = Vec::with_capacity(cfg.studies.cost.repetitions);
        for _ in 0..cfg.studies.cost.repetitions {
            let t0 = Instant::now();
            f()?;
            samples.push(t0.elapsed().as_secs_f64());
        }
        Ok(median(samples))
    };
    let classical_median = time(&classical_path)?;
    let hybrid_median = time(&hybrid_path)?;

    let mut t = Table::new("path,kind,order,count");
    counts("classical", &classical, &mut t);
    counts("hybrid", &hybrid, &mut t);
    out.table("cost.csv", &t)?;
    // timings vary between runs, so they stay out of the CSV outputs
    out.write("cost_timings.txt", |w| {
        let io = |e: std::io::Error| crate::error::HarnessError::Core(e.into());
        writeln!(w, "# {}", out.provenance()).map_err(io)?;
        writeln!(w, "M={m} N={n} repetitions={}", cfg.studies.cost.repetitions).map_err(io)?;
        writeln!(w, "classical_median_seconds={classical_median:.6e}").map_err(io)?;
        writeln!(w, "hybrid_median_seconds={hybrid_median:.6e}").map_err(io)?;
        Ok(())
    })?;
    Ok(CostReport {
        m: set.len(),
        n: basis.len(),
        classical,
        hybrid,
        classical_median,
        hybrid_median,
    })
}

#[cfg(test)]
mod tests {
    use super::median;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(Vec::new()).is_nan());
    }
}
