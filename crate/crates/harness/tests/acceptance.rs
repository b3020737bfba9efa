//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported but do not fail the run;
//! README.md explains why each one is not met.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use pbdw::assimilation::{
    error_bound_check, inf_sup, orthogonality_residual, reconstruct, solve_saddle, solve_two_step,
};
use pbdw::field::{
    BoundaryCondition, DiscreteField, FemSpace, HelmholtzConfig, HelmholtzSolver, InnerProduct, InnerProductKind,
    Mesh, SourceModel,
};
use pbdw::linalg::dense::{CMatrix, CVector};
use pbdw::neural::{
    generate_dataset, train_strong, train_weak, Normalization, OperatorModel, TrainConfig, TrainingSet,
};
use pbdw::observation::{observe, random_placement, SensorSet};
use pbdw::placement::Strategy;
use pbdw::reduced_basis::{generate_snapshots, linspace, pod, BackgroundBasis};
use pbdw::Cplx;
use pbdw_harness::config::{BcTag, SourceTag};
use pbdw_harness::setup::Setup;
use pbdw_harness::stats::spearman;
use pbdw_harness::studies::noise::Method;
use pbdw_harness::studies::{cost, modes, noise, sensors};
use pbdw_harness::{pipeline, ExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[usize] = &[11];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(rng: &mut ChaCha8Rng) -> Cplx<f64> {
    Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn max_abs(v: &CVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Perfect-model background on a 33 x 33 mesh with up to 15 modes.
struct Small {
    space: FemSpace<f64>,
    ip: InnerProduct<f64>,
    basis: BackgroundBasis<f64>,
}

fn perfect(mu: f64) -> HelmholtzConfig<f64> {
    HelmholtzConfig {
        mu,
        epsilon: 0.01,
        bc: BoundaryCondition::Dirichlet,
        source: SourceModel::Perfect,
    }
}

impl Small {
    fn new() -> Self {
        let space = FemSpace::new(Mesh::new(33, 33).unwrap());
        let ip = space.inner_product(InnerProductKind::H1);
        let snaps = generate_snapshots(&space, &linspace(2.0, 10.0, 41), &perfect(1.0)).unwrap();
        let basis = pod(&snaps, &ip, 15).unwrap();
        Small { space, ip, basis }
    }

    fn sensors(&self, m: usize, seed: u64) -> SensorSet<f64> {
        SensorSet::build(self.space.mesh(), &self.ip, random_placement(m, None, 0.02, seed).unwrap()).unwrap()
    }

    fn truth(&self, mu: f64) -> DiscreteField<f64> {
        HelmholtzSolver::new(&self.space, mu, 0.01, BoundaryCondition::Dirichlet)
            .unwrap()
            .solve(&SourceModel::Perfect)
            .unwrap()
    }
}

fn orthogonality(s: &Small) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for case in 0..200u64 {
        let n = rng.random_range(1..=15);
        let m = rng.random_range(n.max(2)..=50);
        let xi = if case % 5 == 0 { 0.0 } else { rng.random_range(0.0..=1.0) };
        let delta = rng.random_range(0.0..=0.3);
        let truth = s.truth(rng.random_range(4.0..8.0));
        let set = s.sensors(m, case);
        let bound = s.basis.truncate(n).unwrap().bind_sensors(&set).unwrap();
        let y = observe(&set, &truth, delta, case).unwrap().y;
        let coef = solve_saddle(set.gram(), bound.coupling().unwrap(), &y, xi).unwrap();
        worst = worst.max(orthogonality_residual(bound.coupling().unwrap(), &coef.eta));
    }
    check(worst <= 1e-9, format!("max |B^H eta|/|eta| = {worst:.2e} over 200 solves (tol 1e-9)"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let m = rng.random_range(1..=50);
        let n = rng.random_range(0..=m.min(15));
        let x = CMatrix::from_fn(m, m, |_, _| c(&mut rng));
        let mut a = x.adjoint() * &x;
        for i in 0..m {
            a[(i, i)] += Cplx::new(0.5, 0.0);
        }
        let b = CMatrix::from_fn(m, n, |_, _| c(&mut rng));
        let y = CVector::from_fn(m, |_, _| c(&mut rng));
        let xi = if k % 4 == 0 { 0.0 } else { rng.random::<f64>() };
        let s = solve_saddle(&a, &b, &y, xi).unwrap();
        let t = solve_two_step(&a, &b, &y, xi).unwrap();
        worst = worst.max(max_abs(&(&s.z - &t.z))).max(max_abs(&(&s.eta - &t.eta)));
    }
    check(worst <= 1e-10, format!("max componentwise gap {worst:.2e} over 100 instances (tol 1e-10)"))
}

fn consistency(s: &Small) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for case in 0..20u64 {
        let n = rng.random_range(1..=15);
        let m = rng.random_range(n.max(2)..=50);
        let set = s.sensors(m, 1000 + case);
        let basis = s.basis.truncate(n).unwrap().bind_sensors(&set).unwrap();
        let z: Vec<Cplx<f64>> = (0..n).map(|_| c(&mut rng)).collect();
        let u = basis.expand(&z).unwrap();
        let y = observe(&set, &u, 0.0, 0).unwrap().y;
        let sol = reconstruct(solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap(), &basis, &set, &y)
            .unwrap();
        worst = worst.max(s.ip.norm(&u.sub(&sol.reconstructed)) / s.ip.norm(&u));
    }
    check(worst <= 1e-8, format!("max relative error {worst:.2e} over 20 in-span cases (tol 1e-8)"))
}

fn a_priori_bound(s: &Small) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut held = 0;
    let mut slack = f64::INFINITY;
    for case in 0..20u64 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(n.max(4)..=50);
        let truth = s.truth(rng.random_range(2.5..9.5));
        let set = s.sensors(m, 2000 + case);
        let basis = s.basis.truncate(n).unwrap().bind_sensors(&set).unwrap();
        let y = observe(&set, &truth, 0.0, 0).unwrap().y;
        let sol = reconstruct(solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap(), &basis, &set, &y)
            .unwrap();
        let beta = inf_sup(basis.coupling().unwrap(), set.gram()).unwrap().beta;
        let chk = error_bound_check(&sol, 0.0, &truth, beta, &basis, &set).unwrap();
        if chk.satisfied {
            held += 1;
        }
        slack = slack.min(chk.rhs / chk.lhs.max(f64::MIN_POSITIVE));
    }
    check(held == 20, format!("bound held in {held}/20 cases, min rhs/lhs {slack:.3}"))
}

fn manufactured_error(n: usize) -> f64 {
    let (mu, eps) = (6.0, 0.01);
    let space = FemSpace::new(Mesh::new(n, n).unwrap());
    let exact = |x: f64, y: f64| (PI * x).sin() * (PI * y).sin();
    let k = Cplx::new(2.0 * PI * PI - mu * mu, eps * mu * 2.0 * PI * PI);
    let load = space.load_vector(|x, y| k * exact(x, y));
    let u = HelmholtzSolver::new(&space, mu, eps, BoundaryCondition::Dirichlet)
        .unwrap()
        .solve_load(load)
        .unwrap();
    let interp = DiscreteField::from_fn(space.mesh(), |x, y| Cplx::new(exact(x, y), 0.0));
    (space.l2_norm_sqr(&u.sub(&interp)) / space.l2_norm_sqr(&interp)).sqrt()
}

fn fem_convergence() -> Outcome {
    let e: Vec<f64> = [17, 33, 65].iter().map(|n| manufactured_error(*n)).collect();
    let rates: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    check(
        rates.iter().all(|r| *r >= 1.8),
        format!("L2 errors {:.2e} {:.2e} {:.2e}, rates {:.3} {:.3} (min 1.8)", e[0], e[1], e[2], rates[0], rates[1]),
    )
}

fn pod_reducibility(cfg: &ExperimentConfig) -> Outcome {
    let setup = Setup::new(cfg).unwrap();
    let e = setup.background(2).unwrap().manifold_error(2).unwrap();
    check((1.7e-3..=1.5e-2).contains(&e), format!("manifold error at N = 2 is {e:.3e} (window [1.7e-3, 1.5e-2])"))
}

fn mode_trends(cfg: &ExperimentConfig) -> Outcome {
    let study = modes::run(cfg).unwrap();
    let rows = &study.rows;
    let head: Vec<f64> = rows.iter().filter(|r| r.n <= 6).map(|r| r.metrics.e_exact).collect();
    let monotone = head.windows(2).all(|w| w[1] <= w[0]);
    let exact: Vec<f64> = rows.iter().map(|r| r.metrics.e_exact).collect();
    let svd: Vec<f64> = rows.iter().map(|r| r.metrics.e_svd).collect();
    let rho = spearman(&exact, &svd);
    // e_exact is a squared norm, e_svd is not
    let below = rows.iter().filter(|r| r.n <= 2).all(|r| r.metrics.e_exact < r.metrics.e_svd.powi(2));
    check(
        monotone && rho >= 0.8 && below,
        format!("nonincreasing for N <= 6: {monotone}, spearman {rho:.3} (min 0.8), below projection at N <= 2: {below}"),
    )
}

fn sgreedy(cfg: &ExperimentConfig) -> Outcome {
    let study = sensors::run(cfg).unwrap();
    let n = cfg.studies.sensors.n;
    // below M = N the early steps see fewer modes, so only full steps compare
    let betas: Vec<f64> = study.greedy_steps.iter().filter(|s| s.n == n).map(|s| s.beta).collect();
    let nondecreasing = betas.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let seeds = cfg.studies.sensors.seeds.len();
    let g = study.mean_error(n, Strategy::Sgreedy).unwrap();
    let r = study.mean_error(n, Strategy::Random).unwrap();
    check(
        nondecreasing && g <= r && seeds >= 10,
        format!(
            "greedy beta {:.3} -> {:.3} nondecreasing: {nondecreasing}; at M = N = {n}: sgreedy {g:.4} vs random {r:.4} over {seeds} seeds",
            betas.first().unwrap(),
            betas.last().unwrap()
        ),
    )
}

/// Hybrid fixture on a 33 x 33 mesh using the configured architecture.
struct Neural {
    set: SensorSet<f64>,
    basis: BackgroundBasis<f64>,
    train: TrainingSet<f64>,
    test: TrainingSet<f64>,
    held_out: TrainingSet<f64>,
}

impl Neural {
    fn new(cfg: &ExperimentConfig) -> Self {
        let space = FemSpace::new(Mesh::new(33, 33).unwrap());
        let ip = space.inner_product(InnerProductKind::H1);
        let bk = HelmholtzConfig {
            mu: 1.0,
            epsilon: 0.01,
            bc: BoundaryCondition::Neumann,
            source: SourceModel::BiasedZero,
        };
        let snaps = generate_snapshots(&space, &linspace(5.85, 6.15, 11), &bk).unwrap();
        let set = SensorSet::build(space.mesh(), &ip, random_placement(20, None, 0.02, 5).unwrap()).unwrap();
        let basis = pod(&snaps, &ip, 2).unwrap().bind_sensors(&set).unwrap();
        let family = cfg.family();
        let data = generate_dataset(&space, cfg.truth_model(), &set, &basis, 30, &family, 3).unwrap();
        let (train, test) = data.split(0.8, 3);
        let held_out = generate_dataset(&space, cfg.truth_model(), &set, &basis, 25, &family, 77).unwrap();
        Neural {
            set,
            basis,
            train,
            test,
            held_out,
        }
    }
}

fn train_cfg(epochs: usize) -> TrainConfig<f64> {
    TrainConfig {
        epochs,
        learning_rate: 1e-3,
        lr_decay: 0.999,
        batch_size: 0,
        seed: 11,
    }
}

fn strong_orthogonality(cfg: &ExperimentConfig, f: &Neural) -> Outcome {
    let arch = cfg.architecture();
    let untrained = OperatorModel::strong(&f.set, &f.basis, arch, Normalization::fit(&f.train), 2).unwrap();
    let trained = train_strong(&f.train, &f.test, &f.set, &f.basis, arch, &train_cfg(300)).unwrap().model;
    let b = f.basis.coupling().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst: f64 = 0.0;
    for model in [&untrained, &trained] {
        let mut inputs: Vec<Vec<f64>> = (0..f.held_out.len())
            .map(|j| f.held_out.inputs.column(j).iter().copied().collect())
            .collect();
        // out of distribution: large random sensor readings
        inputs.extend((0..25).map(|_| (0..f.set.len()).map(|_| 50.0 * rng.random_range(-1.0..1.0)).collect()));
        for v in &inputs {
            let eta = model.predict_update(&f.set, v).unwrap();
            worst = worst.max((b.adjoint() * &eta).norm() / eta.norm().max(1.0));
        }
    }
    let residuals: Vec<f64> = [0.0, 0.1, 1.0, 10.0]
        .iter()
        .map(|w2| {
            let out = train_weak(&f.train, &f.test, &f.set, &f.basis, arch, [1.0, *w2], &cfg.train_config()).unwrap();
            out.history.last().unwrap().orth_residual
        })
        .collect();
    let down = residuals.windows(2).filter(|w| w[1] < w[0]).count();
    check(
        worst <= 1e-10 && down == 3,
        format!(
            "strong |B^H eta| {worst:.2e} on 100 inputs (tol 1e-10); weak residuals {:.2e} {:.2e} {:.2e} {:.2e}, {down}/3 steps decreasing",
            residuals[0], residuals[1], residuals[2], residuals[3]
        ),
    )
}

fn gradient_error(mut model: OperatorModel<f64>, data: &TrainingSet<f64>, seed: u64) -> f64 {
    let x = model.normalization.inputs(&data.inputs);
    let y = model.normalization.targets(&data.targets);
    let (_, g) = model.loss_and_gradient(&x, &y).unwrap();
    let rms = (g.iter().map(|v| v * v).sum::<f64>() / g.len() as f64).sqrt();
    let mut p = model.parameters();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k = rng.random_range(0..p.len());
        let orig = p[k];
        p[k] = orig + 1e-5;
        model.set_parameters(&p).unwrap();
        let up = model.loss(&x, &y).unwrap();
        p[k] = orig - 1e-5;
        model.set_parameters(&p).unwrap();
        let down = model.loss(&x, &y).unwrap();
        p[k] = orig;
        model.set_parameters(&p).unwrap();
        let fd = (up - down) / 2e-5;
        // floor the scale so vanishing derivatives do not divide round-off
        let scale = fd.abs().max(g[k].abs()).max(1e-3 * rms);
        worst = worst.max((fd - g[k]).abs() / scale);
    }
    worst
}

fn gradient_checks(cfg: &ExperimentConfig, f: &Neural) -> Outcome {
    let arch = cfg.architecture();
    let norm = Normalization::fit(&f.train);
    let mut parts = Vec::new();
    for (label, w2) in [("weak w2=0", 0.0), ("weak w2=1", 1.0)] {
        let m = OperatorModel::weak(&f.set, &f.basis, arch, norm.clone(), [1.0, w2], 4).unwrap();
        parts.push((label, gradient_error(m, &f.train, 1)));
    }
    let m = OperatorModel::strong(&f.set, &f.basis, arch, norm, 4).unwrap();
    parts.push(("strong", gradient_error(m, &f.train, 2)));
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let detail: Vec<String> = parts.iter().map(|(l, e)| format!("{l} {e:.1e}")).collect();
    check(worst <= 1e-5, format!("{} on 50 coordinates each (tol 1e-5)", detail.join(", ")))
}

fn noise_verdict(study: &noise::NoiseStudy) -> (bool, String) {
    let mean = |m, d| study.mean(m, d).unwrap();
    let flat = |m| mean(m, 0.1) <= 2.0 * mean(m, 0.0);
    let (p, pd) = (flat(Method::Pbdw), flat(Method::PbdwDeepOnet));
    let reg = mean(Method::Apbdw, 0.3) <= mean(Method::Pbdw, 0.3);
    let hyb = mean(Method::ApbdwDeepOnet, 0.3) <= 1.5 * mean(Method::Apbdw, 0.3);
    let detail = format!(
        "pbdw {:.4}->{:.4} ({p}), pbdw-deeponet {:.4}->{:.4} ({pd}); at 0.3: apbdw {:.5} vs pbdw {:.5} ({reg}), apbdw-deeponet {:.4} ({hyb})",
        mean(Method::Pbdw, 0.0),
        mean(Method::Pbdw, 0.1),
        mean(Method::PbdwDeepOnet, 0.0),
        mean(Method::PbdwDeepOnet, 0.1),
        mean(Method::Apbdw, 0.3),
        mean(Method::Pbdw, 0.3),
        mean(Method::ApbdwDeepOnet, 0.3),
    );
    (p && pd && reg && hyb, detail)
}

fn noise_robustness(cfg: &ExperimentConfig) -> Outcome {
    assert!(cfg.assimilation.seeds.len() >= 5);
    let study = noise::run(cfg).unwrap();
    let (ok, detail) = noise_verdict(&study);
    let stretch = study.mean(Method::ApbdwDeepOnet, 0.3).unwrap();
    println!("info: apbdw-deeponet relative error at 30% noise {stretch:.4} (stretch target 0.037, not gating)");
    check(ok, detail)
}

fn cost_structure(cfg: &ExperimentConfig) -> Outcome {
    let r = cost::run(cfg).unwrap();
    let classical = cost::CostReport::full_order(&r.classical, r.m, r.n);
    let hybrid = cost::CostReport::full_order(&r.hybrid, r.m, r.n);
    println!(
        "info: median online time classical {:.3e} s, hybrid {:.3e} s",
        r.classical_median, r.hybrid_median
    );
    check(
        classical == 1 && hybrid == 0,
        format!("order M+N = {} factorizations: classical {classical}, hybrid {hybrid}", r.m + r.n),
    )
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let key = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(key, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

const SMALL_CONFIG: &str = r#"
seed = 3
[mesh]
nodes = 33
[physics]
grid = 11
[assimilation]
n = [1, 2]
seeds = [1, 2]
[model]
pairs = 12
epochs = 40
[studies.modes]
n = [1, 2, 3, 4]
[studies.sensors]
m = [2, 4, 8]
seeds = [1, 2, 3]
[studies.bias]
samples = 3
[studies.cost]
repetitions = 3
"#;

fn run_all(config: &Path, dir: &Path) -> Vec<i32> {
    let commands: &[&[&str]] = &[
        &["mesh"],
        &["snapshots"],
        &["pod"],
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
    commands
        .iter()
        .map(|cmd| {
            let mut args = vec!["pbdw".to_string(), "--config".into(), config.display().to_string()];
            args.extend(["--out".into(), dir.display().to_string()]);
            args.extend(cmd.iter().map(|s| s.to_string()));
            pbdw_harness::cli::run(args)
        })
        .collect()
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("small.toml");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    let codes: Vec<i32> = run_all(&config, &a).into_iter().chain(run_all(&config, &b)).collect();
    if codes.iter().any(|c| *c != 0) {
        return Err(format!("commands exited with {codes:?}"));
    }
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    let differing: Vec<&String> = fa.keys().filter(|k| fa.get(*k) != fb.get(*k)).collect();
    check(
        fa.len() == fb.len() && differing.is_empty() && !fa.is_empty(),
        format!("{} CSV files compared, {} differ {differing:?}", fa.len(), differing.len()),
    )
}

fn dirichlet_variant(base: &ExperimentConfig, dir: &Path) {
    let mut cfg = base.clone();
    cfg.output = dir.to_path_buf();
    cfg.physics.domain = [5.7, 6.3];
    cfg.scenario.background.bc = BcTag::Dirichlet;
    cfg.scenario.background.source = SourceTag::BiasedZero;
    pipeline::train_model(&cfg).unwrap();
    let (ok, detail) = noise_verdict(&noise::run(&cfg).unwrap());
    println!("info: noise study with a Dirichlet background over [5.7, 6.3]: {} {detail}", if ok { "meets" } else { "misses" });
}

fn main() {
    let started = Instant::now();
    let work = tempfile::tempdir().unwrap();
    let mut defaults = ExperimentConfig::default();
    defaults.output = work.path().join("defaults");

    let small = Small::new();
    let neural = Neural::new(&defaults);
    let mut criteria: Vec<(usize, &str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        (1, "orthogonality", Box::new(|| orthogonality(&small))),
        (2, "oracle equivalence", Box::new(oracle_equivalence)),
        (3, "consistency", Box::new(|| consistency(&small))),
        (4, "a-priori bound", Box::new(|| a_priori_bound(&small))),
        (5, "fem convergence", Box::new(fem_convergence)),
        (6, "pod reducibility", Box::new(|| pod_reducibility(&defaults))),
        (7, "mode-sweep trends", Box::new(|| mode_trends(&defaults))),
        (8, "sgreedy", Box::new(|| sgreedy(&defaults))),
        (9, "strong orthogonality", Box::new(|| strong_orthogonality(&defaults, &neural))),
        (10, "gradient checks", Box::new(|| gradient_checks(&defaults, &neural))),
    ];
    criteria.push((
        11,
        "noise robustness",
        Box::new(|| {
            pipeline::train_model(&defaults).unwrap();
            noise_robustness(&defaults)
        }),
    ));
    criteria.push((12, "cost structure", Box::new(|| cost_structure(&defaults))));
    criteria.push((13, "determinism", Box::new(determinism)));

    let mut unexpected = Vec::new();
    for (k, name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&k);
        match &outcome {
            Ok(d) => println!("PASS {k:>2} {name}: {d} [{secs:.1} s]"),
            Err(d) => println!("FAIL {k:>2} {name}: {d} [{secs:.1} s]{}", if known { " (known)" } else { "" }),
        }
        if outcome.is_err() && !known {
            unexpected.push(k);
        }
    }
    dirichlet_variant(&defaults, &work.path().join("dirichlet"));
    println!("acceptance finished in {:.1} s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
