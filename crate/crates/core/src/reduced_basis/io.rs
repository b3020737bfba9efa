//! Text checkpoint of a background basis. Floating point values are stored
//! as the hexadecimal bit patterns of their `f64` representation, so a
//! round trip is bit-exact.
//!
//! ```text
//! pbdw-basis 1
//! inner_product H1
//! mesh <nx> <ny>
//! modes <N>
//! singular_values <K>
//! <K lines: bits>
//! mode <n>            (repeated N times)
//! <node-count lines: re_bits im_bits>
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::field::{DiscreteField, InnerProduct, InnerProductKind};
use crate::scalar::{Cplx, Real};

use super::basis::BackgroundBasis;

const MAGIC: &str = "pbdw-basis";
const VERSION: u32 = 1;

fn bits<T: Real>(v: T) -> String {
    format!("{:016x}", v.as_f64().to_bits())
}

fn parse_bits<T: Real>(s: &str) -> Result<T> {
    u64::from_str_radix(s, 16)
        .map(|b| T::lit(f64::from_bits(b)))
        .map_err(|_| Error::Checkpoint(format!("bad value `{s}`")))
}

pub fn write_basis<T: Real, W: Write>(out: &mut W, basis: &BackgroundBasis<T>) -> Result<()> {
    let mesh = basis.mesh_id();
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "inner_product {}", basis.inner_product().kind().tag())?;
    writeln!(out, "mesh {} {}", mesh.nx, mesh.ny)?;
    writeln!(out, "modes {}", basis.len())?;
    writeln!(out, "singular_values {}", basis.singular_values().len())?;
    for s in basis.singular_values() {
        writeln!(out, "{}", bits(*s))?;
    }
    for (n, m) in basis.modes().iter().enumerate() {
        writeln!(out, "mode {n}")?;
        for z in m.values() {
            writeln!(out, "{} {}", bits(z.re), bits(z.im))?;
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        self.inner
            .next()
            .ok_or_else(|| Error::Checkpoint("unexpected end of file".into()))?
            .map_err(Error::from)
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<String>> {
        let line = self.next()?;
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(Error::Checkpoint(format!("expected `{key}`, found `{line}`")));
        }
        Ok(it.map(str::to_owned).collect())
    }

    fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let v = self.keyed(key)?;
        v.first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Checkpoint(format!("`{key}` needs a count")))
    }
}

/// Reads a checkpoint written for the mesh and inner product of `ip`.
pub fn read_basis<T: Real, R: BufRead>(input: R, ip: &InnerProduct<T>) -> Result<BackgroundBasis<T>> {
    let mut lines = Lines { inner: input.lines() };
    let head = lines.keyed(MAGIC)?;
    if head.first().map(String::as_str) != Some(&VERSION.to_string()) {
        return Err(Error::Checkpoint(format!("unsupported version {head:?}")));
    }
    let kind = InnerProductKind::parse(
        lines
            .keyed("inner_product")?
            .first()
            .ok_or_else(|| Error::Checkpoint("missing inner product kind".into()))?,
    )?;
    if kind != ip.kind() {
        return Err(Error::Checkpoint(format!(
            "basis built for {} inner product, given {}",
            kind.tag(),
            ip.kind().tag()
        )));
    }
    let mesh = lines.keyed("mesh")?;
    let dims: Vec<usize> = mesh.iter().filter_map(|s| s.parse().ok()).collect();
    let id = ip.mesh_id();
    if dims != [id.nx, id.ny] {
        return Err(Error::Checkpoint(format!("basis mesh {dims:?} does not match {}x{}", id.nx, id.ny)));
    }
    let n = lines.keyed_usize("modes")?;
    let k = lines.keyed_usize("singular_values")?;
    let sigma = (0..k)
        .map(|_| parse_bits(lines.next()?.trim()))
        .collect::<Result<Vec<T>>>()?;
    let nodes = ip.size();
    let mut modes = Vec::with_capacity(n);
    for j in 0..n {
        if lines.keyed_usize("mode")? != j {
            return Err(Error::Checkpoint(format!("mode {j} out of order")));
        }
        let mut vals = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            let line = lines.next()?;
            let mut it = line.split_whitespace();
            let (Some(re), Some(im)) = (it.next(), it.next()) else {
                return Err(Error::Checkpoint(format!("mode {j}: short row")));
            };
            vals.push(Cplx::new(parse_bits(re)?, parse_bits(im)?));
        }
        modes.push(DiscreteField::from_values(id, vals, nodes)?);
    }
    Ok(BackgroundBasis::from_parts(ip, modes, sigma))
}
