//! Results CSV, one row per solve:
//! `N,M,xi,delta,seed,e_exact,e_estim,eta_norm,e_svd,beta,orth_residual`.

use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

use super::Metrics;

pub const RESULTS_HEADER: &str = "N,M,xi,delta,seed,e_exact,e_estim,eta_norm,e_svd,beta,orth_residual";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResultRow<T> {
    pub n: usize,
    pub m: usize,
    pub xi: T,
    pub delta: T,
    pub seed: u64,
    pub metrics: Metrics<T>,
    pub beta: T,
    pub orth_residual: T,
}

pub fn write_results<T: Real, W: Write>(out: &mut W, comment: Option<&str>, rows: &[ResultRow<T>]) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.10e},{:.10e},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            r.n,
            r.m,
            r.xi.as_f64(),
            r.delta.as_f64(),
            r.seed,
            r.metrics.e_exact.as_f64(),
            r.metrics.e_estim.as_f64(),
            r.metrics.eta_norm.as_f64(),
            r.metrics.e_svd.as_f64(),
            r.beta.as_f64(),
            r.orth_residual.as_f64()
        )?;
    }
    Ok(())
}
