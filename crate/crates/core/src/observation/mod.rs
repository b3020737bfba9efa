//! Gaussian observation functionals, their Riesz representers and synthetic
//! measurements.

pub mod io;
mod sensor;
mod set;

pub use sensor::{random_placement, Sensor};
pub use set::{observe, Measurement, SensorSet};
