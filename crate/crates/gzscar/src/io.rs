//! Output files: CSV tables with a JSON sidecar, and the binary state dump.
//!
//! State dump layout (all little-endian): `u64 L`, `u64 2S`, `u64 dim`, then
//! `dim` pairs of `f64` (re, im), with site 0 the fastest-varying digit of
//! the basis index and local index `a = S - m`.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;
use gzscar_core::ed_oracle::ManyBodyState;
use gzscar_core::C64;

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// A table of already-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    // print -0 as 0
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let wrap = |e: csv::Error| CliError::Io { path: path.to_path_buf(), source: e.into() };
    w.write_record(&table.header).map_err(wrap)?;
    for r in &table.rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Table, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let wrap = |e: csv::Error| CliError::Io { path: path.to_path_buf(), source: e.into() };
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(wrap)?.iter().map(String::from).collect());
    }
    Ok(Table { header, rows })
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub data: String,
    pub summary: serde_json::Value,
}

impl Sidecar {
    pub fn new(config: &RunConfig, data: &Path, summary: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            data: data.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            summary,
        }
    }
}

/// `foo.csv` -> `foo.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(sidecar).expect("sidecar is always serializable");
    s.push('\n');
    fs::write(path, s).map_err(io_err(path))
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar, CliError> {
    let s = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&s).map_err(|e| CliError::Usage(format!("{}: not a sidecar: {e}", path.display())))
}

pub fn write_state(path: &Path, psi: &ManyBodyState) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut put = |b: &[u8]| w.write_all(b).map_err(io_err(path));
    put(&(psi.l as u64).to_le_bytes())?;
    put(&(psi.two_s as u64).to_le_bytes())?;
    put(&(psi.dim() as u64).to_le_bytes())?;
    for z in &psi.amplitudes {
        put(&z.re.to_le_bytes())?;
        put(&z.im.to_le_bytes())?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_state(path: &Path) -> Result<ManyBodyState, CliError> {
    let mut bytes = Vec::new();
    fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(io_err(path))?;
    let bad = |msg: &str| CliError::Usage(format!("{}: {msg}", path.display()));
    if bytes.len() < 24 {
        return Err(bad("truncated header"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    let (l, two_s, dim) = (word(0) as usize, word(1) as u32, word(2) as usize);
    let d = two_s as usize + 1;
    if (d as f64).powi(l as i32) != dim as f64 || bytes.len() != 24 + 16 * dim {
        return Err(bad("header does not match the payload"));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let amplitudes = (0..dim).map(|k| C64::new(f(24 + 16 * k), f(32 + 16 * k))).collect();
    Ok(ManyBodyState { l, two_s, amplitudes })
}
