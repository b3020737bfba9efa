use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

use super::StepRecord;

/// Stability trace `M,N,beta`, one row per record.
pub fn write_betas<T: Real, W: Write>(out: &mut W, comment: Option<&str>, steps: &[StepRecord<T>]) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "M,N,beta")?;
    for s in steps {
        writeln!(out, "{},{},{:.10e}", s.m, s.n, s.beta.as_f64())?;
    }
    Ok(())
}
