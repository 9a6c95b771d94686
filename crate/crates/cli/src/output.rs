//! Output directory bookkeeping: CSV and JSON writers and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sgldiff::processes::fmt_real;
use sgldiff::Path as Trajectory;

use crate::error::{CliError, CliResult};

/// Version of the CSV/JSON layouts, recorded in every manifest.
pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// One CSV cell.
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(x) => fmt_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Collects the files written by one run.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn open(&mut self, name: &str) -> CliResult<(PathBuf, BufWriter<File>)> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        if !self.files.iter().any(|n| n == name) {
            self.files.push(name.to_owned());
        }
        Ok((path, BufWriter::new(f)))
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = Vec<Cell>>,
    {
        let (path, mut w) = self.open(name)?;
        let io = |e| CliError::io(&path, e);
        writeln!(w, "{}", header.join(",")).map_err(io)?;
        for row in rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", line.join(",")).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let (path, mut w) = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Runtime(e.to_string()))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
    }

    pub fn trajectory(&mut self, name: &str, traj: &Trajectory, comments: &[(String, String)]) -> CliResult<()> {
        let (path, mut w) = self.open(name)?;
        traj.write_csv(&mut w, comments)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))
    }
}

#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance record written next to the outputs of every run.
#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub experiment: String,
    pub config: serde_json::Value,
    pub wall_time_seconds: f64,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> CliResult<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

impl RunManifest {
    pub fn build(
        outputs: &Outputs,
        experiment: &str,
        config: serde_json::Value,
        wall_time_seconds: f64,
    ) -> CliResult<Self> {
        let files = outputs
            .files()
            .iter()
            .map(|name| {
                let (sha256, bytes) = sha256_file(&outputs.dir().join(name))?;
                Ok(FileEntry {
                    path: name.clone(),
                    sha256,
                    bytes,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Self {
            tool: "sgldiff".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            config,
            wall_time_seconds,
            files,
        })
    }

    /// Re-hashes every listed file and reports the first mismatch.
    pub fn verify(&self, dir: &Path) -> CliResult<()> {
        for f in &self.files {
            let (sha, bytes) = sha256_file(&dir.join(&f.path))?;
            if sha != f.sha256 || bytes != f.bytes {
                return Err(CliError::Runtime(format!("digest mismatch for {}", f.path)));
            }
        }
        Ok(())
    }
}
