use crate::assimilation::{background_stage, reconstruct, Coefficients, PbdwSolution};
use crate::error::Result;
use crate::linalg::dense::CVector;
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::model::{coupling_of, OperatorModel};

/// Background coefficients from the regularized least-squares stage of the
/// classical solve, update coefficients from the network.
pub fn hybrid_reconstruct<T: Real>(
    model: &OperatorModel<T>,
    set: &SensorSet<T>,
    basis: &BackgroundBasis<T>,
    y: &CVector<T>,
    v: &[T],
    xi: T,
) -> Result<PbdwSolution<T>> {
    let b = coupling_of(set, basis)?;
    if basis.hash() != model.basis_hash {
        return Err(crate::Error::Dimension("model was trained against a different background".into()));
    }
    let stage = background_stage(set.gram(), &b, y, xi)?;
    let eta = model.predict_update(set, v)?;
    reconstruct(Coefficients { z: stage.z, eta, xi }, basis, set, y)
}
