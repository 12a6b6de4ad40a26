use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("malformed config {path}: {source}")]
    ParseConfig { path: PathBuf, source: toml::de::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{model} (phi = {phi}, u_c = {u_c}): {source}")]
    Solver { model: String, phi: f64, u_c: f64, source: fracture_ls::Error },
}

pub type Result<T> = std::result::Result<T, BenchError>;
