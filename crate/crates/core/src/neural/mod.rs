//! Operator networks predicting the update coefficients of the classical
//! solve from forcing values at the sensors.
//!
//! Complex coefficients are realified as `[Re; Im]`. The weak variant learns
//! a coordinate trunk and penalizes `B^H eta`; the strong variant fixes the
//! trunk to sensor directions projected out of the background, so every
//! prediction satisfies `B^H eta = 0` up to round-off.

mod adam;
mod checkpoint;
mod dataset;
mod hybrid;
mod mlp;
mod model;
mod realify;
mod train;
mod trunk;

pub use adam::Adam;
pub use checkpoint::{read_model, write_loss_csv, write_model};
pub use dataset::{generate_dataset, sample_forcing, ForcingFamily, TrainingSet, TruthModel};
pub use hybrid::hybrid_reconstruct;
pub use mlp::{Mlp, Tape};
pub use model::{Architecture, Mode, Normalization, OperatorModel, Trunk};
pub use realify::{derealify, realify};
pub use train::{mse, train, train_strong, train_weak, LossRecord, TrainConfig, Trained};
pub use trunk::TrunkBasis;
