//! CSV exchange of sensor lists (`index,x1,x2,r`) and measurements (`index,re,im`).
//!
//! Lines starting with `#` are comments and are skipped on reading.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

use super::Sensor;

fn data_lines<R: BufRead>(input: R, header: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !seen_header {
            if t != header {
                return Err(Error::Parse(format!("expected header `{header}`, found `{t}`")));
            }
            seen_header = true;
            continue;
        }
        let cols: Vec<f64> = t
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad number `{c}`", n + 1)))
            })
            .collect::<Result<_>>()?;
        if cols.len() != header.split(',').count() {
            return Err(Error::Parse(format!("line {}: wrong column count", n + 1)));
        }
        out.push((n + 1, cols));
    }
    if !seen_header {
        return Err(Error::Parse(format!("missing header `{header}`")));
    }
    Ok(out)
}

pub fn write_sensors<T: Real, W: Write>(out: &mut W, comment: Option<&str>, sensors: &[Sensor<T>]) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "index,x1,x2,r")?;
    for (i, s) in sensors.iter().enumerate() {
        writeln!(
            out,
            "{i},{:.16e},{:.16e},{:.16e}",
            s.center[0].as_f64(),
            s.center[1].as_f64(),
            s.width.as_f64()
        )?;
    }
    Ok(())
}

pub fn read_sensors<T: Real, R: BufRead>(input: R) -> Result<Vec<Sensor<T>>> {
    data_lines(input, "index,x1,x2,r")?
        .into_iter()
        .enumerate()
        .map(|(i, (line, c))| {
            if c[0] != i as f64 {
                return Err(Error::Parse(format!("line {line}: index {} out of order", c[0])));
            }
            Sensor::new([T::lit(c[1]), T::lit(c[2])], T::lit(c[3]))
        })
        .collect()
}

pub fn write_measurement<T: Real, W: Write>(out: &mut W, comment: Option<&str>, y: &[Cplx<T>]) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "index,re,im")?;
    for (i, v) in y.iter().enumerate() {
        writeln!(out, "{i},{:.16e},{:.16e}", v.re.as_f64(), v.im.as_f64())?;
    }
    Ok(())
}

pub fn read_measurement<T: Real, R: BufRead>(input: R) -> Result<Vec<Cplx<T>>> {
    Ok(data_lines(input, "index,re,im")?
        .into_iter()
        .map(|(_, c)| Cplx::new(T::lit(c[1]), T::lit(c[2])))
        .collect())
}
