use std::sync::OnceLock;

use pbdw::assimilation::{
    error_bound_check, gcv_select, inf_sup, metrics, reconstruct, solve_saddle, solve_two_step,
};
use pbdw::field::{
    BoundaryCondition, DiscreteField, FemSpace, HelmholtzConfig, HelmholtzSolver, InnerProduct, InnerProductKind, Mesh,
    SourceModel,
};
use pbdw::linalg::dense::{CMatrix, CVector};
use pbdw::observation::{observe, random_placement, SensorSet};
use pbdw::reduced_basis::{generate_snapshots, linspace, pod, BackgroundBasis};
use pbdw::{Cplx, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(rng: &mut ChaCha8Rng) -> Cplx<f64> {
    Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random Hermitian positive definite A, full-rank B and data y.
fn instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (CMatrix<f64>, CMatrix<f64>, CVector<f64>) {
    let x = CMatrix::from_fn(m, m, |_, _| c(rng));
    let mut a = x.adjoint() * &x;
    for i in 0..m {
        a[(i, i)] += Cplx::new(0.5, 0.0);
    }
    let b = CMatrix::from_fn(m, n, |_, _| c(rng));
    let y = CVector::from_fn(m, |_, _| c(rng));
    (a, b, y)
}

fn max_abs(v: &CVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[test]
fn saddle_and_two_step_agree_and_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..100 {
        let m = rng.random_range(1..=30);
        let n = rng.random_range(0..=m.min(10));
        let (a, b, y) = instance(&mut rng, m, n);
        let xi = if k % 4 == 0 { 0.0 } else { rng.random::<f64>() };
        let s = solve_saddle(&a, &b, &y, xi).unwrap();
        let t = solve_two_step(&a, &b, &y, xi).unwrap();
        assert!(max_abs(&(&s.z - &t.z)) <= 1e-10, "instance {k}");
        assert!(max_abs(&(&s.eta - &t.eta)) <= 1e-10, "instance {k}");
        for eta in [&s.eta, &t.eta] {
            assert!(pbdw::assimilation::orthogonality_residual(&b, eta) <= 1e-10);
        }
    }
}

#[test]
fn empty_background_is_pure_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (a, b, y) = instance(&mut rng, 6, 0);
    let xi = 0.3;
    let t = solve_two_step(&a, &b, &y, xi).unwrap();
    assert_eq!(t.z.len(), 0);
    let mut shifted = a.clone();
    for i in 0..6 {
        shifted[(i, i)] += Cplx::new(6.0 * xi, 0.0);
    }
    let want = shifted.lu().solve(&y).unwrap();
    assert!(max_abs(&(&t.eta - want)) < 1e-12);
}

#[test]
fn damping_shrinks_the_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (a, b, y) = instance(&mut rng, 12, 3);
    let norms: Vec<f64> = [1e-6, 1e-3, 1.0, 1e3]
        .iter()
        .map(|xi| solve_two_step(&a, &b, &y, *xi).unwrap().eta.norm())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
}

#[test]
fn rank_deficient_background_is_unobservable() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (a, mut b, y) = instance(&mut rng, 8, 3);
    let col = b.column(0).into_owned();
    b.set_column(2, &col);
    for r in [solve_saddle(&a, &b, &y, 0.0), solve_two_step(&a, &b, &y, 0.0)] {
        assert!(matches!(r, Err(Error::Unobservable { deficient: 1, columns: 3 })));
    }
    let (a, b, y) = instance(&mut rng, 2, 3);
    assert!(matches!(solve_saddle(&a, &b, &y, 0.0), Err(Error::Unobservable { .. })));
}

struct Fixture {
    space: FemSpace<f64>,
    ip: InnerProduct<f64>,
    basis: BackgroundBasis<f64>,
    truth: DiscreteField<f64>,
}

fn truth_config(mu: f64) -> HelmholtzConfig<f64> {
    HelmholtzConfig {
        mu,
        epsilon: 0.01,
        bc: BoundaryCondition::Dirichlet,
        source: SourceModel::Perfect,
    }
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let space = FemSpace::new(Mesh::new(33, 33).unwrap());
        let ip = space.inner_product(InnerProductKind::H1);
        let snaps = generate_snapshots(&space, &linspace(5.0, 7.0, 21), &truth_config(1.0)).unwrap();
        let basis = pod(&snaps, &ip, 8).unwrap();
        let truth = HelmholtzSolver::new(&space, 6.1, 0.01, BoundaryCondition::Dirichlet)
            .unwrap()
            .solve(&SourceModel::Perfect)
            .unwrap();
        Fixture { space, ip, basis, truth }
    })
}

fn sensors(f: &Fixture, m: usize, seed: u64) -> SensorSet<f64> {
    SensorSet::build(f.space.mesh(), &f.ip, random_placement(m, None, 0.03, seed).unwrap()).unwrap()
}

#[test]
fn truth_in_background_is_recovered_exactly() {
    let f = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..20 {
        let n = 1 + case % 6;
        let basis = f.basis.truncate(n).unwrap();
        let set = sensors(f, 20, case as u64);
        let basis = basis.bind_sensors(&set).unwrap();
        let z: Vec<Cplx<f64>> = (0..n).map(|_| c(&mut rng)).collect();
        let u = basis.expand(&z).unwrap();
        let y = observe(&set, &u, 0.0, 0).unwrap().y;
        let coef = solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap();
        assert!(coef.eta.norm() <= 1e-9 * y.norm());
        for (a, b) in coef.z.iter().zip(&z) {
            assert!((a - b).norm() <= 1e-8);
        }
        let sol = reconstruct(coef, &basis, &set, &y).unwrap();
        let rel = f.ip.norm(&u.sub(&sol.reconstructed)) / f.ip.norm(&u);
        assert!(rel <= 1e-8);
        let m = metrics(&f.space, &sol, &u, &basis);
        assert!(m.e_exact <= 1e-18 * f.space.l2_norm_sqr(&u).max(1.0));
        // the bound degenerates gracefully
        let beta = inf_sup(basis.coupling().unwrap(), set.gram()).unwrap().beta;
        let chk = error_bound_check(&sol, 0.0, &u, beta, &basis, &set).unwrap();
        assert!(chk.lhs <= 1e-9 && chk.rhs >= 0.0);
    }
}

#[test]
fn reconstruction_matches_observations_and_expansion() {
    let f = fixture();
    let set = sensors(f, 25, 9);
    let basis = f.basis.truncate(4).unwrap().bind_sensors(&set).unwrap();
    let y = observe(&set, &f.truth, 0.0, 0).unwrap().y;
    let coef = solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap();
    let sol = reconstruct(coef.clone(), &basis, &set, &y).unwrap();
    let fitted = set.apply(&sol.reconstructed);
    assert!((fitted - &y).norm() <= 1e-8 * y.norm());
    assert!(sol.diagnostics.observation_residual <= 1e-8);
    let mut manual = basis.expand(coef.z.as_slice()).unwrap();
    for (q, e) in set.representers().iter().zip(coef.eta.iter()) {
        manual.axpy(*e, q);
    }
    assert!(manual
        .values()
        .iter()
        .zip(sol.reconstructed.values())
        .all(|(a, b)| (a - b).norm() <= 1e-12));
    // a zero update gives identical error measures
    let mut no_update = coef.clone();
    no_update.eta.fill(Cplx::new(0.0, 0.0));
    let sol0 = reconstruct(no_update, &basis, &set, &y).unwrap();
    let m0 = metrics(&f.space, &sol0, &f.truth, &basis);
    assert_eq!(m0.e_exact, m0.e_estim);
}

#[test]
fn contained_background_has_unit_inf_sup() {
    let f = fixture();
    let set = sensors(f, 10, 2);
    let basis = BackgroundBasis::from_fields(&f.ip, vec![set.representers()[0].clone()])
        .unwrap()
        .bind_sensors(&set)
        .unwrap();
    let r = inf_sup(basis.coupling().unwrap(), set.gram()).unwrap();
    assert!((r.beta - 1.0).abs() <= 1e-10);
}

#[test]
fn inf_sup_monotone_in_n_and_m() {
    let f = fixture();
    let full = sensors(f, 25, 5);
    let mut table = vec![vec![0.0; 5]; 5];
    for (i, n) in [1, 2, 3, 4, 5].into_iter().enumerate() {
        for (j, m) in [5, 10, 15, 20, 25].into_iter().enumerate() {
            let set = full.prefix(m).unwrap();
            let b = f.basis.truncate(n).unwrap().bind_sensors(&set).unwrap();
            table[i][j] = inf_sup(b.coupling().unwrap(), set.gram()).unwrap().beta;
        }
    }
    for i in 0..5 {
        for j in 0..5 {
            assert!((0.0..=1.0 + 1e-12).contains(&table[i][j]));
            if i > 0 {
                assert!(table[i][j] <= table[i - 1][j] + 1e-12);
            }
            if j > 0 {
                assert!(table[i][j] >= table[i][j - 1] - 1e-12);
            }
        }
    }
}

#[test]
fn inf_sup_matches_monte_carlo_envelope() {
    let f = fixture();
    let set = sensors(f, 6, 12);
    let basis = f.basis.truncate(2).unwrap().bind_sensors(&set).unwrap();
    let b = basis.coupling().unwrap();
    let r = inf_sup(b, set.gram()).unwrap();
    let ainv = set.gram().clone().try_inverse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = rand_distr::StandardNormal;
    let mut best = f64::INFINITY;
    for _ in 0..10_000 {
        let mut z = CVector::<f64>::from_fn(2, |_, _| {
            Cplx::new(rand_distr::Distribution::sample(&normal, &mut rng), rand_distr::Distribution::sample(&normal, &mut rng))
        });
        z /= Cplx::new(z.norm(), 0.0);
        let bz = b * &z;
        let proj = (bz.adjoint() * &ainv * &bz)[(0, 0)].re.sqrt();
        best = best.min(proj);
    }
    assert!(best >= r.beta - 1e-12);
    assert!(best - r.beta <= 1e-3, "MC {best} vs {}", r.beta);
    // the reported least-stable mode attains the constant
    let w = &r.least_stable_mode;
    let bw = b * w;
    let at = (bw.adjoint() * &ainv * &bw)[(0, 0)].re.sqrt();
    assert!((at - r.beta).abs() <= 1e-10);
}

#[test]
fn more_modes_than_sensors_is_flagged() {
    let f = fixture();
    let set = sensors(f, 3, 1);
    let b = f.basis.truncate(5).unwrap().bind_sensors(&set).unwrap();
    let r = inf_sup(b.coupling().unwrap(), set.gram()).unwrap();
    assert!(r.unstable && r.beta == 0.0);
    assert_eq!(r.least_stable_mode.len(), 5);
}

#[test]
fn a_priori_bound_holds_on_perfect_model_cases() {
    let f = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..20u64 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(n.max(4)..=30);
        let mu = rng.random_range(5.0..7.0);
        let truth = HelmholtzSolver::new(&f.space, mu, 0.01, BoundaryCondition::Dirichlet)
            .unwrap()
            .solve(&SourceModel::Perfect)
            .unwrap();
        let set = sensors(f, m, 100 + case);
        let basis = f.basis.truncate(n).unwrap().bind_sensors(&set).unwrap();
        let y = observe(&set, &truth, 0.0, 0).unwrap().y;
        let coef = solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap();
        let sol = reconstruct(coef, &basis, &set, &y).unwrap();
        let beta = inf_sup(basis.coupling().unwrap(), set.gram()).unwrap().beta;
        let chk = error_bound_check(&sol, 0.0, &truth, beta, &basis, &set).unwrap();
        assert!(chk.satisfied, "case {case}: {chk:?}");
    }
}

#[test]
fn bound_formula_and_refusals() {
    let f = fixture();
    let set = sensors(f, 10, 2);
    let basis = BackgroundBasis::from_fields(&f.ip, vec![set.representers()[0].clone()])
        .unwrap()
        .bind_sensors(&set)
        .unwrap();
    let y = observe(&set, &f.truth, 0.0, 0).unwrap().y;
    let sol = reconstruct(solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.0).unwrap(), &basis, &set, &y).unwrap();
    let chk = error_bound_check(&sol, 0.0, &f.truth, 1.0, &basis, &set).unwrap();
    assert!((chk.rhs - 2.0 * chk.best_fit).abs() <= 1e-14 * chk.rhs);
    assert!(matches!(
        error_bound_check(&sol, 0.1, &f.truth, 1.0, &basis, &set),
        Err(Error::BoundNotApplicable(_))
    ));
    let reg = reconstruct(solve_saddle(set.gram(), basis.coupling().unwrap(), &y, 0.1).unwrap(), &basis, &set, &y).unwrap();
    assert!(error_bound_check(&reg, 0.0, &f.truth, 1.0, &basis, &set).is_err());
}

#[test]
fn gcv_basic_behaviour() {
    let f = fixture();
    let set = sensors(f, 30, 6);
    let basis = f.basis.truncate(3).unwrap().bind_sensors(&set).unwrap();
    let b = basis.coupling().unwrap();
    let grid: Vec<f64> = (-8..=1).map(|k| 10f64.powi(k)).collect();
    let y = observe(&set, &f.truth, 0.0, 0).unwrap().y;
    let one = gcv_select(set.gram(), b, &y, &[0.01]).unwrap();
    assert_eq!(one.xi, 0.01);
    let clean = gcv_select(set.gram(), b, &y, &grid).unwrap();
    assert!(clean.xi <= grid[1], "noise-free selection {}", clean.xi);
    assert!(gcv_select(set.gram(), b, &y, &[]).is_err());
    assert!(gcv_select(set.gram(), b, &y, &[0.0]).is_err());
}

#[test]
fn gcv_regularization_helps_under_heavy_noise() {
    let f = fixture();
    let set = sensors(f, 30, 6);
    let basis = f.basis.truncate(3).unwrap().bind_sensors(&set).unwrap();
    let b = basis.coupling().unwrap();
    let grid: Vec<f64> = (-8..=2).flat_map(|k| [1.0, 3.0].map(|s| s * 10f64.powi(k))).collect();
    let mut wins = 0;
    for seed in 0..10 {
        let y = observe(&set, &f.truth, 0.3, seed).unwrap().y;
        let err = |xi: f64| {
            let sol = reconstruct(solve_two_step(set.gram(), b, &y, xi).unwrap(), &basis, &set, &y).unwrap();
            metrics(&f.space, &sol, &f.truth, &basis).rel_exact
        };
        let xi = gcv_select(set.gram(), b, &y, &grid).unwrap().xi;
        if err(xi) <= err(0.0) {
            wins += 1;
        }
    }
    assert!(wins >= 8, "regularized error lower in {wins} of 10 seeds");
}
