use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DiscreteField, FemSpace, HelmholtzConfig, HelmholtzSolver};
use crate::scalar::Real;

/// Best-knowledge solutions over a parameter grid.
#[derive(Clone, Debug)]
pub struct SnapshotSet<T: Real> {
    pub parameters: Vec<T>,
    pub snapshots: Vec<DiscreteField<T>>,
    /// Model used for every solve; its `mu` is ignored.
    pub config: HelmholtzConfig<T>,
}

impl<T: Real> SnapshotSet<T> {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// `count` equispaced values covering `[lo, hi]`.
pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(count - 1))
            .collect(),
    }
}

/// One Helmholtz solve per parameter, in parallel; output order follows `grid`.
pub fn generate_snapshots<T: Real>(
    space: &FemSpace<T>,
    grid: &[T],
    cfg: &HelmholtzConfig<T>,
) -> Result<SnapshotSet<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    let snapshots = grid
        .par_iter()
        .map(|&mu| {
            let c = HelmholtzConfig { mu, ..*cfg };
            HelmholtzSolver::from_config(space, &c)?.solve(&c.source)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SnapshotSet {
        parameters: grid.to_vec(),
        snapshots,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(2.0_f64, 10.0, 51);
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 2.0);
        assert_eq!(g[50], 10.0);
        assert!((g[1] - 2.16).abs() < 1e-14);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
    }
}
