//! The single-step commands: mesh, snapshots, POD, sensors, one
//! assimilation sweep, the training set and the network.

use rayon::prelude::*;

use pbdw::assimilation::{inf_sup, metrics, reconstruct, solve_saddle, write_results, ResultRow};
use pbdw::neural::{generate_dataset, train, write_loss_csv, write_model, Mode, Normalization, OperatorModel, TrainingSet};
use pbdw::observation::io::{write_measurement, write_sensors};
use pbdw::placement::write_betas;
use pbdw::reduced_basis::io::write_basis;

use crate::config::{ExperimentConfig, StrategyTag};
use crate::error::{config_err, Result};
use crate::output::{ensure_unique, Output, Sci, Table};
use crate::setup::{HybridSpaces, Setup};
use crate::studies::{noise_seed, regularization};

pub fn mesh(cfg: &ExperimentConfig) -> Result<()> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let mesh = setup.mesh();
    let mut t = Table::new("index,x1,x2,boundary");
    for (k, p) in mesh.nodes().iter().enumerate() {
        t.push(&[&k, &Sci(p[0]), &Sci(p[1]), &(mesh.is_boundary(k) as u8)]);
    }
    out.table("mesh.csv", &t)?;
    Ok(())
}

pub fn snapshots(cfg: &ExperimentConfig) -> Result<()> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let snaps = setup.snapshots(cfg.scenario.background, cfg.physics.domain)?;
    let mut t = Table::new("index,mu,norm,file");
    for (k, (mu, u)) in snaps.parameters.iter().zip(&snaps.snapshots).enumerate() {
        let name = format!("snapshots/snapshot_{k:03}.txt");
        out.field(&name, setup.mesh(), u)?;
        t.push(&[&k, &Sci(*mu), &Sci(setup.ip.norm(u)), &name]);
    }
    out.table("snapshots.csv", &t)?;
    Ok(())
}

fn n_max(cfg: &ExperimentConfig) -> usize {
    cfg.assimilation.n.iter().copied().max().expect("validated")
}

pub fn pod(cfg: &ExperimentConfig) -> Result<()> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let basis = setup.background(n_max(cfg))?;
    out.write("basis.txt", |w| Ok(write_basis(w, &basis)?))?;
    let mut t = Table::new("k,sigma,manifold_error");
    for (k, s) in basis.singular_values().iter().enumerate() {
        let e = basis.manifold_error(k + 1).unwrap_or(f64::NAN);
        t.push(&[&(k + 1), &Sci(*s), &Sci(e)]);
    }
    out.table("pod.csv", &t)?;
    Ok(())
}

pub fn sensors(cfg: &ExperimentConfig, strategy: StrategyTag) -> Result<()> {
    let mut cfg = cfg.clone();
    cfg.sensors.strategy = strategy;
    let setup = Setup::new(&cfg)?;
    let out = Output::create(&cfg)?;
    let n = n_max(&cfg);
    let basis = setup.background(n)?;
    let placed = setup.place(&basis, cfg.sensors.count.resolve(n)?)?;
    out.write("sensors.csv", |w| Ok(write_sensors(w, Some(out.provenance()), placed.set.sensors())?))?;
    out.write("betas.csv", |w| Ok(write_betas(w, Some(out.provenance()), &placed.steps)?))?;
    Ok(())
}

pub fn assimilate(cfg: &ExperimentConfig) -> Result<Vec<ResultRow<f64>>> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let n = n_max(cfg);
    let basis = setup.background(n)?;
    let m = cfg.sensors.count.resolve(n)?;
    let set = setup.place(&basis, m)?.set;
    let truth = setup.truth()?;
    let a = &cfg.assimilation;
    let mut cells = Vec::new();
    for &n in &a.n {
        for &delta in &a.noise {
            for &seed in &a.seeds {
                cells.push((n, delta, seed));
            }
        }
    }
    ensure_unique(cells.iter().map(|(n, d, s)| (*n, d.to_bits(), *s)))?;
    let grid = a.gcv_grid.values();
    let solved = cells
        .par_iter()
        .map(|&(n, delta, seed)| -> Result<_> {
            let bound = basis.truncate(n)?.bind_sensors(&set)?;
            let b = bound.coupling().expect("bound");
            let y = pbdw::observation::observe(&set, &truth, delta, noise_seed(cfg.seed, seed))?.y;
            let xi = regularization(cfg.xi_mode(), set.gram(), b, &y, &grid)?;
            let sol = reconstruct(solve_saddle(set.gram(), b, &y, xi)?, &bound, &set, &y)?;
            let beta = inf_sup(b, set.gram())?.beta;
            let row = ResultRow {
                n,
                m,
                xi,
                delta,
                seed,
                metrics: metrics(&setup.space, &sol, &truth, &bound),
                beta,
                orth_residual: sol.diagnostics.orthogonality_residual,
            };
            Ok((row, y, sol.reconstructed))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, y0, u0) = &solved[0];
    out.write("measurement.csv", |w| Ok(write_measurement(w, Some(out.provenance()), y0.as_slice())?))?;
    out.field("assimilate_truth.txt", setup.mesh(), &truth)?;
    out.field("assimilate_reconstruction.txt", setup.mesh(), u0)?;
    let mut rows: Vec<ResultRow<f64>> = solved.into_iter().map(|(r, _, _)| r).collect();
    rows.sort_by(|p, q| (p.n, p.m, p.delta.to_bits(), p.seed).cmp(&(q.n, q.m, q.delta.to_bits(), q.seed)));
    out.write("results.csv", |w| Ok(write_results(w, Some(out.provenance()), &rows)?))?;
    Ok(rows)
}

fn dataset_for(setup: &Setup, spaces: &HybridSpaces) -> Result<TrainingSet<f64>> {
    let cfg = setup.cfg;
    Ok(generate_dataset(
        &setup.space,
        cfg.truth_model(),
        &spaces.set,
        &spaces.basis,
        cfg.model.pairs,
        &cfg.family(),
        cfg.seed,
    )?)
}

pub fn dataset(cfg: &ExperimentConfig) -> Result<()> {
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let spaces = setup.hybrid_spaces()?;
    let data = dataset_for(&setup, &spaces)?;
    let m = data.sensors();
    let mut t = Table::new("sample,amplitude,decay,frequency,m,v,eta_re,eta_im");
    for k in 0..data.len() {
        let f = &data.forcings[k];
        for i in 0..m {
            t.push(&[
                &k,
                &Sci(f.amplitude),
                &Sci(f.decay),
                &Sci(f.frequency),
                &i,
                &Sci(data.inputs[(i, k)]),
                &Sci(data.targets[(i, k)]),
                &Sci(data.targets[(m + i, k)]),
            ]);
        }
    }
    out.table("dataset.csv", &t)?;
    Ok(())
}

/// Trains the configured variant and writes the checkpoint and loss curve.
pub fn train_model(cfg: &ExperimentConfig) -> Result<pbdw::neural::Trained<f64>> {
    let mode = cfg
        .model_mode()
        .ok_or_else(|| config_err("model.mode = \"none\": nothing to train"))?;
    let setup = Setup::new(cfg)?;
    let out = Output::create(cfg)?;
    let spaces = setup.hybrid_spaces()?;
    let data = dataset_for(&setup, &spaces)?;
    let (train_set, test_set) = data.split(cfg.model.split, cfg.seed);
    let norm = Normalization::fit(&train_set);
    let model = match mode {
        Mode::Strong => OperatorModel::strong(&spaces.set, &spaces.basis, cfg.architecture(), norm, cfg.seed)?,
        Mode::Weak => OperatorModel::weak(
            &spaces.set,
            &spaces.basis,
            cfg.architecture(),
            norm,
            cfg.model.loss_weights,
            cfg.seed,
        )?,
    };
    let trained = train(model, &train_set, &test_set, &cfg.train_config())?;
    let path = cfg.checkpoint_path();
    std::fs::create_dir_all(path.parent().unwrap_or(std::path::Path::new(".")))
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let file = std::fs::File::create(&path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    write_model(&mut std::io::BufWriter::new(file), &trained.model)?;
    out.write("loss.csv", |w| Ok(write_loss_csv(w, Some(out.provenance()), &trained.history)?))?;
    Ok(trained)
}
