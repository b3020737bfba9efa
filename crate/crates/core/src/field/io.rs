//! Plain-text field dump.
//!
//! ```text
//! nx ny nodecount
//! x1 x2 re im        (one row per node, row-major, 17 significant digits)
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

use super::discrete::DiscreteField;
use super::mesh::Mesh;

pub fn write_field<T: Real, W: Write>(out: &mut W, mesh: &Mesh<T>, field: &DiscreteField<T>) -> Result<()> {
    if field.mesh_id() != mesh.id() {
        return Err(Error::Dimension("field does not belong to mesh".into()));
    }
    writeln!(out, "{} {} {}", mesh.nx(), mesh.ny(), mesh.node_count())?;
    for (p, v) in mesh.nodes().iter().zip(field.values()) {
        writeln!(
            out,
            "{:.16e} {:.16e} {:.16e} {:.16e}",
            p[0].as_f64(),
            p[1].as_f64(),
            v.re.as_f64(),
            v.im.as_f64()
        )?;
    }
    Ok(())
}

/// Reads a dump, rebuilding the structured mesh it was written on.
pub fn read_field<T: Real, R: BufRead>(input: R) -> Result<(Mesh<T>, DiscreteField<T>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field dump".into()))??;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token `{t}`"))))
        .collect::<Result<_>>()?;
    let [nx, ny, count] = head[..] else {
        return Err(Error::Parse("header must be `nx ny nodecount`".into()));
    };
    let mesh = Mesh::new(nx, ny)?;
    if count != mesh.node_count() {
        return Err(Error::Parse(format!("node count {count} does not match {nx}x{ny}")));
    }
    let mut values = Vec::with_capacity(count);
    for (k, line) in lines.enumerate().take(count) {
        let line = line?;
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("row {k}: bad number `{t}`"))))
            .collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("row {k}: expected 4 columns")));
        }
        values.push(Cplx::new(T::lit(v[2]), T::lit(v[3])));
    }
    if values.len() != count {
        return Err(Error::Parse(format!("expected {count} rows, found {}", values.len())));
    }
    let field = DiscreteField::new(&mesh, values)?;
    Ok((mesh, field))
}
