//! Stamped output files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Version of the artifact layouts described in SCHEMA.md.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "dilute";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Stamp {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }

    /// First line of every CSV file.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} {} schema_version={} config_hash={} seed={}",
            self.tool, self.version, self.schema_version, self.config_hash, self.seed
        )
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    kind: &'a str,
    #[serde(flatten)]
    data: &'a T,
}

/// Writes files into one output directory, each stamped with the same run
/// identity.
#[derive(Clone, Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    stamp: Stamp,
}

impl ArtifactWriter {
    pub fn create(dir: &Path, stamp: Stamp) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stamp,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stamp(&self) -> &Stamp {
        &self.stamp
    }

    /// `{schema_version, tool, version, config_hash, seed, kind, ...data}`.
    /// `data` must serialize to a JSON object.
    pub fn json<T: Serialize>(&self, name: &str, kind: &str, data: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let value = Stamped {
            stamp: &self.stamp,
            kind,
            data,
        };
        let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::io(&path, e.into()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Stamp comment line, then a header and one row per record.
    pub fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let io = |e: std::io::Error| CliError::io(&path, e);
        let file = fs::File::create(&path).map_err(io)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{}", self.stamp.csv_comment()).map_err(io)?;
        {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r).map_err(|e| CliError::io(&path, e.into()))?;
            }
            w.flush().map_err(io)?;
        }
        out.flush().map_err(io)?;
        Ok(path)
    }

    /// Raw matrix dump plus a JSON sidecar `<name>.json` with the stamp and
    /// the layout.
    pub fn raw(&self, name: &str, rows: &[Vec<f64>], row_label: &str, col_label: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        dilute_core::trajectories::write_raw(&mut w, rows).map_err(|e| CliError::io(&path, e))?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        #[derive(Serialize)]
        struct Layout<'a> {
            file: &'a str,
            rows: usize,
            cols: usize,
            row_axis: &'a str,
            col_axis: &'a str,
            encoding: &'a str,
        }
        self.json(
            &format!("{name}.json"),
            "raw_layout",
            &Layout {
                file: name,
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
                row_axis: row_label,
                col_axis: col_label,
                encoding: "magic DLTRAJ01, u64 rows, u64 cols, f64 row-major, little-endian",
            },
        )?;
        Ok(path)
    }
}

/// Reads a CSV artifact, skipping the stamp comment.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::io(path, e.into()))?;
    let headers = r
        .headers()
        .map_err(|e| CliError::io(path, e.into()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::io(path, e.into()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((headers, rows))
}
