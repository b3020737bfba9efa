use std::fmt;

use crate::assimilation::{inf_sup, reconstruct, solve_saddle};
use crate::error::{Error, Result};
use crate::field::{DiscreteField, FemSpace};
use crate::observation::{random_placement, SensorSet};
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::sgreedy::{sgreedy, PlacementState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sgreedy,
    Random,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Sgreedy => "sgreedy",
            Strategy::Random => "random",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow<T> {
    pub m: usize,
    pub n: usize,
    pub strategy: Strategy,
    /// Always 0 for the deterministic greedy strategy.
    pub seed: u64,
    pub beta: T,
    /// Relative L2 error of the noise-free, unregularized reconstruction.
    pub rel_error: T,
}

/// Rows of a comparison and the greedy run behind its sgreedy rows.
#[derive(Clone, Debug)]
pub struct Comparison<T: Real> {
    pub rows: Vec<ComparisonRow<T>>,
    pub greedy: PlacementState<T>,
}

fn evaluate<T: Real>(
    space: &FemSpace<T>,
    basis: &BackgroundBasis<T>,
    set: &SensorSet<T>,
    truth: &DiscreteField<T>,
) -> Result<(T, T)> {
    let bound = basis.bind_sensors(set)?;
    let b = bound.coupling().expect("just bound");
    let beta = inf_sup(b, set.gram())?.beta;
    let y = set.apply(truth);
    let coefs = solve_saddle(set.gram(), b, &y, T::zero())?;
    let sol = reconstruct(coefs, &bound, set, &y)?;
    let norm = space.l2_norm_sqr(truth).sqrt().max(T::tiny());
    let err = space.l2_norm_sqr(&truth.sub(&sol.reconstructed)).sqrt() / norm;
    Ok((beta, err))
}

/// Runs SGREEDY once up to the largest requested `M` and random placement
/// once per seed and count, then reconstructs `truth` from exact
/// measurements with every resulting sensor set.
///
/// Counts below the background dimension are skipped since the
/// reconstruction is then ill-posed.
pub fn compare_strategies<T: Real>(
    space: &FemSpace<T>,
    basis: &BackgroundBasis<T>,
    m_list: &[usize],
    seeds: &[u64],
    width: T,
    grid: &[[T; 2]],
    truth: &DiscreteField<T>,
) -> Result<Comparison<T>> {
    if m_list.is_empty() {
        return Err(Error::InvalidParameter("empty list of sensor counts".into()));
    }
    let n = basis.len();
    let mesh = space.mesh();
    let m_max = *m_list.iter().max().expect("nonempty");
    let greedy = sgreedy(mesh, basis, m_max, width, grid)?;
    let mut rows = Vec::new();
    for &m in m_list {
        if m < n || m == 0 {
            continue;
        }
        let set = greedy.set.prefix(m)?;
        let (beta, rel_error) = evaluate(space, basis, &set, truth)?;
        rows.push(ComparisonRow { m, n, strategy: Strategy::Sgreedy, seed: 0, beta, rel_error });
        for &seed in seeds {
            let sensors = random_placement(m, None, width, seed)?;
            let set = SensorSet::build(mesh, basis.inner_product(), sensors)?;
            let (beta, rel_error) = evaluate(space, basis, &set, truth)?;
            rows.push(ComparisonRow { m, n, strategy: Strategy::Random, seed, beta, rel_error });
        }
    }
    Ok(Comparison { rows, greedy })
}
