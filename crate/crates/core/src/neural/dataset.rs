use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assimilation::solve_saddle;
use crate::error::{Error, Result};
use crate::field::{BiasParams, BoundaryCondition, FemSpace, HelmholtzSolver, SourceModel};
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::realify::realify;

/// Uniform ranges of the perturbation parameters used to draw forcings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingFamily<T> {
    pub amplitude: [T; 2],
    pub decay: [T; 2],
    pub frequency: [T; 2],
}

impl<T: Real> Default for ForcingFamily<T> {
    fn default() -> Self {
        Self {
            amplitude: [T::lit(0.25), T::lit(0.75)],
            decay: [T::lit(2.0), T::lit(4.0)],
            frequency: [T::lit(4.0), T::lit(6.0)],
        }
    }
}

impl<T: Real> ForcingFamily<T> {
    pub fn sample(&self, rng: &mut impl Rng) -> BiasParams<T> {
        let mut draw = |r: [T; 2]| {
            let (lo, hi) = (r[0].as_f64(), r[1].as_f64());
            T::lit(if hi > lo { rng.random_range(lo..hi) } else { lo })
        };
        BiasParams {
            amplitude: draw(self.amplitude),
            decay: draw(self.decay),
            frequency: draw(self.frequency),
        }
    }
}

/// Physics behind the training pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthModel<T> {
    pub mu: T,
    pub epsilon: T,
    pub bc: BoundaryCondition,
}

/// Input/target pairs stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet<T: Real> {
    /// Forcing values at the sensor centers, `M x K`.
    pub inputs: DMatrix<T>,
    /// Realified update coefficients of the classical solve, `2M x K`.
    pub targets: DMatrix<T>,
    pub forcings: Vec<BiasParams<T>>,
    pub seed: u64,
}

impl<T: Real> TrainingSet<T> {
    pub fn len(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.ncols() == 0
    }

    pub fn sensors(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            inputs: self.inputs.select_columns(idx),
            targets: self.targets.select_columns(idx),
            forcings: idx.iter().map(|&k| self.forcings[k]).collect(),
            seed: self.seed,
        }
    }

    /// Seeded shuffle, then the first `ceil(fraction K)` pairs train and the
    /// rest test.
    pub fn split(&self, fraction: f64, seed: u64) -> (Self, Self) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cut = ((self.len() as f64 * fraction).ceil() as usize).clamp(1.min(self.len()), self.len());
        (self.select(&idx[..cut]), self.select(&idx[cut..]))
    }
}

/// Forcing of the family sampled at the sensor centers.
pub fn sample_forcing<T: Real>(set: &SensorSet<T>, mu: T, source: &SourceModel<T>) -> Vec<T> {
    set.sensors().iter().map(|s| source.eval(mu, s.center[0], s.center[1])).collect()
}

/// Solves `count` forced problems and the noise-free, unregularized PBDW
/// problem for each. `basis` must be bound to `set`.
pub fn generate_dataset<T: Real>(
    space: &FemSpace<T>,
    truth: TruthModel<T>,
    set: &SensorSet<T>,
    basis: &BackgroundBasis<T>,
    count: usize,
    family: &ForcingFamily<T>,
    seed: u64,
) -> Result<TrainingSet<T>> {
    if count == 0 {
        return Err(Error::InvalidParameter("dataset needs at least one pair".into()));
    }
    let b = basis
        .coupling()
        .ok_or_else(|| Error::Dimension("basis has no sensors bound".into()))?;
    if basis.bound_sensor_hash() != Some(set.hash().as_str()) {
        return Err(Error::Dimension("basis was bound to a different sensor set".into()));
    }
    let solver = HelmholtzSolver::new(space, truth.mu, truth.epsilon, truth.bc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forcings: Vec<BiasParams<T>> = (0..count).map(|_| family.sample(&mut rng)).collect();
    let pairs = forcings
        .par_iter()
        .map(|p| {
            let source = SourceModel::Family(*p);
            let u = solver.solve(&source)?;
            let y = set.apply(&u);
            let eta = solve_saddle(set.gram(), b, &y, T::zero())?.eta;
            Ok((sample_forcing(set, truth.mu, &source), realify(eta.as_slice())))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = set.len();
    let mut inputs = DMatrix::zeros(m, count);
    let mut targets = DMatrix::zeros(2 * m, count);
    for (k, (v, eta)) in pairs.into_iter().enumerate() {
        inputs.column_mut(k).copy_from_slice(&v);
        targets.column_mut(k).copy_from_slice(&eta);
    }
    Ok(TrainingSet {
        inputs,
        targets,
        forcings,
        seed,
    })
}
