use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::adam::Adam;
use super::dataset::TrainingSet;
use super::model::{Architecture, Normalization, OperatorModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    pub learning_rate: T,
    /// Multiplies the learning rate after every epoch.
    pub lr_decay: T,
    /// Pairs per Adam step; 0 uses the whole training set.
    pub batch_size: usize,
    pub seed: u64,
}

impl<T: Real> TrainConfig<T> {
    pub fn strong_default() -> Self {
        Self {
            epochs: 5000,
            learning_rate: T::lit(1e-3),
            lr_decay: T::lit(0.99),
            batch_size: 0,
            seed: 0,
        }
    }

    pub fn weak_default() -> Self {
        Self {
            epochs: 20000,
            ..Self::strong_default()
        }
    }
}

/// One line of the loss curve. Losses are in normalized units and taken
/// before the epoch's updates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossRecord<T> {
    pub epoch: usize,
    pub train_loss: T,
    pub test_loss: T,
    /// Root mean square of `||B^H eta||` on the test inputs.
    pub orth_residual: T,
}

#[derive(Clone, Debug)]
pub struct Trained<T: Real> {
    pub model: OperatorModel<T>,
    pub history: Vec<LossRecord<T>>,
}

/// Runs Adam on the model loss. Deterministic for a fixed configuration.
pub fn train<T: Real>(
    mut model: OperatorModel<T>,
    train: &TrainingSet<T>,
    test: &TrainingSet<T>,
    cfg: &TrainConfig<T>,
) -> Result<Trained<T>> {
    if train.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    let norm = &model.normalization;
    let (x, y) = (norm.inputs(&train.inputs), norm.targets(&train.targets));
    let (xt, yt) = (norm.inputs(&test.inputs), norm.targets(&test.targets));
    let mut params = model.parameters();
    let mut adam = Adam::new(params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let batch = if cfg.batch_size == 0 { train.len() } else { cfg.batch_size.min(train.len()) };
    let mut lr = cfg.learning_rate;
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let full = batch == train.len();
        let (loss, grad) = if full {
            let (l, g) = model.loss_and_gradient(&x, &y)?;
            (l, Some(g))
        } else {
            (model.loss(&x, &y)?, None)
        };
        let (test_loss, orth) = if test.is_empty() {
            (T::lit(f64::NAN), T::lit(f64::NAN))
        } else {
            (model.loss(&xt, &yt)?, model.penalty_residual(&xt)?)
        };
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        history.push(LossRecord {
            epoch,
            train_loss: loss,
            test_loss,
            orth_residual: orth,
        });
        match grad {
            Some(g) => adam.step(&mut params, &g, lr),
            None => {
                order.shuffle(&mut rng);
                for chunk in order.chunks(batch) {
                    let (_, g) = model.loss_and_gradient(&x.select_columns(chunk), &y.select_columns(chunk))?;
                    adam.step(&mut params, &g, lr);
                    model.set_parameters(&params)?;
                }
            }
        }
        model.set_parameters(&params)?;
        lr *= cfg.lr_decay;
    }
    if !model.branch.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: cfg.epochs });
    }
    Ok(Trained { model, history })
}

/// Penalized variant with a coordinate-input trunk.
#[allow(clippy::too_many_arguments)]
pub fn train_weak<T: Real>(
    train_set: &TrainingSet<T>,
    test_set: &TrainingSet<T>,
    set: &SensorSet<T>,
    basis: &BackgroundBasis<T>,
    arch: Architecture,
    loss_weights: [T; 2],
    cfg: &TrainConfig<T>,
) -> Result<Trained<T>> {
    let model = OperatorModel::weak(set, basis, arch, Normalization::fit(train_set), loss_weights, cfg.seed)?;
    train(model, train_set, test_set, cfg)
}

/// Variant with the trunk fixed to the projected sensor directions.
pub fn train_strong<T: Real>(
    train_set: &TrainingSet<T>,
    test_set: &TrainingSet<T>,
    set: &SensorSet<T>,
    basis: &BackgroundBasis<T>,
    arch: Architecture,
    cfg: &TrainConfig<T>,
) -> Result<Trained<T>> {
    let model = OperatorModel::strong(set, basis, arch, Normalization::fit(train_set), cfg.seed)?;
    train(model, train_set, test_set, cfg)
}

/// Mean squared error of the model on a data set, in normalized units.
pub fn mse<T: Real>(model: &OperatorModel<T>, data: &TrainingSet<T>) -> Result<T> {
    let pred = model.predict_batch(&data.inputs)?;
    let s = model.normalization.output_scale;
    let diff: DMatrix<T> = (pred - &data.targets) / s;
    Ok(diff.norm_squared() / T::from_usize_lossy(diff.len().max(1)))
}
