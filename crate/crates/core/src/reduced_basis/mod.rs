//! Best-knowledge snapshots, POD backgrounds and the sensor coupling matrix.

mod basis;
pub mod io;
mod snapshots;

pub use basis::{pod, pod_fields, BackgroundBasis};
pub use snapshots::{generate_snapshots, linspace, SnapshotSet};
