//! Misspecified-model reconstruction: classical PBDW against the hybrid with
//! a trained update network, on the configured truth and on held-out
//! forcings of the training family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pbdw::assimilation::{reconstruct, solve_saddle, PbdwSolution};
use pbdw::field::{solve_helmholtz, BiasParams, DiscreteField, HelmholtzConfig, SourceModel};
use pbdw::neural::{hybrid_reconstruct, sample_forcing, OperatorModel};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{Output, Sci, Table};
use crate::setup::{HybridSpaces, Setup};
use crate::studies::relative_l2;

/// Relative L2 errors of one reconstruction problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Errors {
    /// Background part of the classical solve alone.
    pub background: f64,
    pub pbdw: f64,
    pub hybrid: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub sample: usize,
    pub params: BiasParams<f64>,
    pub errors: Errors,
}

pub struct BiasReport {
    pub errors: Errors,
    pub curve: Vec<CurvePoint>,
}

struct Solved {
    classical: PbdwSolution<f64>,
    hybrid: PbdwSolution<f64>,
    errors: Errors,
}

fn solve_pair(
    setup: &Setup,
    spaces: &HybridSpaces,
    model: &OperatorModel<f64>,
    truth: &DiscreteField<f64>,
    source: &SourceModel<f64>,
) -> Result<Solved> {
    let (set, basis) = (&spaces.set, &spaces.basis);
    let y = set.apply(truth);
    let b = basis.coupling().expect("bound");
    let classical = reconstruct(solve_saddle(set.gram(), b, &y, 0.0)?, basis, set, &y)?;
    let v = sample_forcing(set, setup.cfg.physics.mu_eval, source);
    let hybrid = hybrid_reconstruct(model, set, basis, &y, &v, 0.0)?;
    let errors = Errors {
        background: relative_l2(&setup.space, truth, &classical.background),
        pbdw: relative_l2(&setup.space, truth, &classical.reconstructed),
        hybrid: relative_l2(&setup.space, truth, &hybrid.reconstructed),
    };
    Ok(Solved {
        classical,
        hybrid,
        errors,
    })
}

/// Seed of the held-out forcings, kept apart from the training stream.
fn curve_seed(run: u64) -> u64 {
    run ^ 0x5EED_B1A5_0000_0000
}

pub fn run(cfg: &ExperimentConfig) -> Result<BiasReport> {
    cfg.require_bias()?;
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let spaces = setup.hybrid_spaces()?;
    let model = setup.load_model(&spaces)?;
    let truth_cfg = cfg.truth_config();
    let truth = solve_helmholtz(setup.mesh(), &truth_cfg)?;
    let main = solve_pair(&setup, &spaces, &model, &truth, &truth_cfg.source)?;

    let mesh = setup.mesh();
    out.field("bias_eta_model.txt", mesh, &main.hybrid.update)?;
    out.field("bias_eta_pbdw.txt", mesh, &main.classical.update)?;
    out.field("bias_z_pbdw.txt", mesh, &main.classical.background)?;
    out.field("bias_u_hybrid.txt", mesh, &main.hybrid.reconstructed)?;
    out.field("bias_u_pbdw.txt", mesh, &main.classical.reconstructed)?;
    out.field("bias_truth.txt", mesh, &truth)?;

    let mut t = Table::new("method,rel_error,e_exact,eta_norm,orth_residual");
    let l2 = |u: &DiscreteField<f64>| setup.space.l2_norm_sqr(u);
    let rows = [
        ("background", &main.classical, main.errors.background, l2(&truth.sub(&main.classical.background))),
        ("pbdw", &main.classical, main.errors.pbdw, l2(&truth.sub(&main.classical.reconstructed))),
        ("hybrid", &main.hybrid, main.errors.hybrid, l2(&truth.sub(&main.hybrid.reconstructed))),
    ];
    for (name, sol, rel, e) in rows {
        let (eta, orth) = if name == "background" {
            (0.0, 0.0)
        } else {
            (l2(&sol.update).sqrt(), sol.diagnostics.orthogonality_residual)
        };
        t.push(&[&name, &Sci(rel), &Sci(e), &Sci(eta), &Sci(orth)]);
    }
    out.table("bias.csv", &t)?;

    let family = cfg.family();
    let mut rng = ChaCha8Rng::seed_from_u64(curve_seed(cfg.seed));
    let params: Vec<BiasParams<f64>> = (0..cfg.studies.bias.samples).map(|_| family.sample(&mut rng)).collect();
    let curve = params
        .par_iter()
        .enumerate()
        .map(|(sample, p)| -> Result<CurvePoint> {
            let source = SourceModel::Family(*p);
            let u = solve_helmholtz(mesh, &HelmholtzConfig { source, ..truth_cfg })?;
            let errors = solve_pair(&setup, &spaces, &model, &u, &source)?.errors;
            Ok(CurvePoint {
                sample,
                params: *p,
                errors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("sample,amplitude,decay,frequency,rel_background,rel_pbdw,rel_hybrid");
    for c in &curve {
        let (p, e) = (&c.params, &c.errors);
        t.push(&[
            &c.sample,
            &Sci(p.amplitude),
            &Sci(p.decay),
            &Sci(p.frequency),
            &Sci(e.background),
            &Sci(e.pbdw),
            &Sci(e.hybrid),
        ]);
    }
    out.table("bias_curve.csv", &t)?;
    Ok(BiasReport {
        errors: main.errors,
        curve,
    })
}
