//! JSON container for trained models. Floating point values are stored as
//! the hex bits of their `f64` value so a round trip is exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::CMatrix;
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::{Cplx, Real};

use super::mlp::Mlp;
use super::model::{Mode, Normalization, OperatorModel, Trunk};
use super::trunk::TrunkBasis;

const FORMAT: &str = "pbdw-model";
const VERSION: u32 = 1;
/// Largest `|<phi_m, zeta_n>|` accepted for a stored strong trunk.
const TRUNK_TOL: f64 = 1e-10;

#[derive(Serialize, Deserialize)]
struct NetworkBlob {
    widths: Vec<usize>,
    seed: u64,
    params: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Container {
    format: String,
    version: u32,
    mode: String,
    sensors: usize,
    sensor_hash: String,
    basis_hash: String,
    loss_weights: Vec<String>,
    input_mean: Vec<String>,
    input_scale: Vec<String>,
    output_scale: String,
    branch: NetworkBlob,
    trunk_network: Option<NetworkBlob>,
    /// Real then imaginary parts, column-major.
    trunk_basis: Option<Vec<String>>,
}

fn enc<T: Real>(v: T) -> String {
    format!("{:016x}", v.as_f64().to_bits())
}

fn dec<T: Real>(s: &str) -> Result<T> {
    u64::from_str_radix(s, 16)
        .map(|b| T::lit(f64::from_bits(b)))
        .map_err(|e| Error::Checkpoint(format!("bad value {s:?}: {e}")))
}

fn enc_all<T: Real>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| enc(*x)).collect()
}

fn dec_all<T: Real>(v: &[String]) -> Result<Vec<T>> {
    v.iter().map(|s| dec(s)).collect()
}

fn blob<T: Real>(net: &Mlp<T>) -> NetworkBlob {
    NetworkBlob {
        widths: net.widths().to_vec(),
        seed: net.seed(),
        params: enc_all(net.parameters()),
    }
}

fn unblob<T: Real>(b: &NetworkBlob) -> Result<Mlp<T>> {
    Mlp::from_parameters(&b.widths, dec_all(&b.params)?, b.seed)
}

pub fn write_model<T: Real, W: Write>(out: &mut W, model: &OperatorModel<T>) -> Result<()> {
    let n = &model.normalization;
    let (trunk_network, trunk_basis) = match &model.trunk {
        Trunk::Network(net) => (Some(blob(net)), None),
        Trunk::Basis(b) => {
            let phi = b.matrix();
            let vals: Vec<T> = phi.iter().map(|z| z.re).chain(phi.iter().map(|z| z.im)).collect();
            (None, Some(enc_all(&vals)))
        }
    };
    let c = Container {
        format: FORMAT.into(),
        version: VERSION,
        mode: model.mode().tag().into(),
        sensors: model.sensors(),
        sensor_hash: model.sensor_hash.clone(),
        basis_hash: model.basis_hash.clone(),
        loss_weights: enc_all(&model.loss_weights),
        input_mean: enc_all(&n.input_mean),
        input_scale: enc_all(&n.input_scale),
        output_scale: enc(n.output_scale),
        branch: blob(&model.branch),
        trunk_network,
        trunk_basis,
    };
    serde_json::to_writer_pretty(&mut *out, &c).map_err(|e| Error::Checkpoint(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Loads a model for the given sensors and bound background, refusing a
/// checkpoint trained against anything else.
pub fn read_model<T: Real, R: Read>(
    input: R,
    set: &SensorSet<T>,
    basis: &BackgroundBasis<T>,
) -> Result<OperatorModel<T>> {
    let c: Container = serde_json::from_reader(input).map_err(|e| Error::Checkpoint(e.to_string()))?;
    if c.format != FORMAT || c.version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported container {} v{}", c.format, c.version)));
    }
    if c.sensor_hash != set.hash() {
        return Err(Error::Checkpoint("sensor set hash does not match".into()));
    }
    if c.basis_hash != basis.hash() {
        return Err(Error::Checkpoint("background basis hash does not match".into()));
    }
    let m = c.sensors;
    let mode = Mode::parse(&c.mode)?;
    let trunk = match (mode, &c.trunk_network, &c.trunk_basis) {
        (Mode::Weak, Some(net), None) => Trunk::Network(unblob(net)?),
        (Mode::Strong, None, Some(vals)) => {
            let vals: Vec<T> = dec_all(vals)?;
            if vals.len() != 2 * m * m {
                return Err(Error::Checkpoint("trunk basis has the wrong size".into()));
            }
            let phi = CMatrix::from_fn(m, m, |i, j| Cplx::new(vals[j * m + i], vals[m * m + j * m + i]));
            Trunk::Basis(TrunkBasis::from_matrix(phi))
        }
        _ => return Err(Error::Checkpoint(format!("trunk payload does not fit mode {}", c.mode))),
    };
    let weights: Vec<T> = dec_all(&c.loss_weights)?;
    if weights.len() != 2 {
        return Err(Error::Checkpoint("expected two loss weights".into()));
    }
    let normalization = Normalization {
        input_mean: dec_all(&c.input_mean)?,
        input_scale: dec_all(&c.input_scale)?,
        output_scale: dec(&c.output_scale)?,
    };
    let model = OperatorModel::assemble(
        set,
        basis,
        unblob(&c.branch)?,
        trunk,
        normalization,
        [weights[0], weights[1]],
    )?;
    if let Trunk::Basis(b) = &model.trunk {
        let r = b.residual(&model.coupling);
        if !(r.as_f64() <= TRUNK_TOL) {
            return Err(Error::Checkpoint(format!("stored trunk is not orthogonal to the background ({r:e})")));
        }
    }
    Ok(model)
}

/// Loss curve CSV with a leading provenance comment.
pub fn write_loss_csv<T: Real, W: Write>(
    out: &mut W,
    comment: Option<&str>,
    history: &[super::train::LossRecord<T>],
) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "epoch,train_loss,test_loss,orth_residual")?;
    for r in history {
        writeln!(
            out,
            "{},{:.10e},{:.10e},{:.10e}",
            r.epoch,
            r.train_loss.as_f64(),
            r.test_loss.as_f64(),
            r.orth_residual.as_f64()
        )?;
    }
    Ok(())
}
