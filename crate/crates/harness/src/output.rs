//! Output directory handling. Every CSV starts with a provenance comment
//! carrying the configuration hash, then its header.

use std::collections::HashSet;
use std::fmt::Display;
use std::fs::File;
use std::hash::Hash;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pbdw::field::{io::write_field, DiscreteField, Mesh};

use crate::config::ExperimentConfig;
use crate::error::{config_err, HarnessError, Result};

pub struct Output {
    dir: PathBuf,
    provenance: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Output {
        path: path.display().to_string(),
        source,
    }
}

impl Output {
    pub fn create(cfg: &ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.output).map_err(io_err(&cfg.output))?;
        Ok(Self {
            dir: cfg.output.clone(),
            provenance: provenance(cfg),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Creates `name` (and its parent directories) and hands a buffered
    /// writer to `f`.
    pub fn write<F>(&self, name: &str, f: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(io_err(&path))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    pub fn table(&self, name: &str, table: &Table) -> Result<PathBuf> {
        self.write(name, |w| {
            table
                .write(w, Some(&self.provenance))
                .map_err(|e| HarnessError::Core(e.into()))
        })
    }

    pub fn field(&self, name: &str, mesh: &Mesh<f64>, field: &DiscreteField<f64>) -> Result<PathBuf> {
        self.write(name, |w| Ok(write_field(w, mesh, field)?))
    }
}

pub fn provenance(cfg: &ExperimentConfig) -> String {
    format!("pbdw-harness config_hash={} seed={}", cfg.hash(), cfg.seed)
}

/// Header plus preformatted rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: String,
    rows: Vec<String>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self {
            header: header.to_owned(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, fields: &[&dyn Display]) {
        let row: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
        debug_assert_eq!(row.len(), self.header.split(',').count());
        self.rows.push(row.join(","));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write<W: Write>(&self, w: &mut W, comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.header)?;
        for r in &self.rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }
}

/// Fixed scientific formatting shared by every table.
pub struct Sci(pub f64);

impl Display for Sci {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.10e}", self.0)
    }
}

/// Rejects a table whose rows repeat a cell key.
pub fn ensure_unique<K: Hash + Eq + std::fmt::Debug>(keys: impl IntoIterator<Item = K>) -> Result<()> {
    let mut seen = HashSet::new();
    for k in keys {
        if seen.contains(&k) {
            return Err(config_err(format!("duplicate result cell {k:?}; check for repeated list entries")));
        }
        seen.insert(k);
    }
    Ok(())
}
