//! Result files are assembled in memory and written only once a run has
//! succeeded, followed by a manifest with their SHA-256 hashes.

use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn json(name: impl Into<String>, value: &impl Serialize) -> Result<Self, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(qpca_core::Error::from)?;
        bytes.push(b'\n');
        Ok(Self { name: name.into(), bytes })
    }

    pub fn csv(name: impl Into<String>, header: &[&str], rows: Vec<Vec<String>>) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(qpca_core::Error::from)?;
        for row in rows {
            writer.write_record(&row).map_err(qpca_core::Error::from)?;
        }
        let bytes = writer.into_inner().map_err(|e| qpca_core::Error::Format(e.to_string()))?;
        Ok(Self { name: name.into(), bytes })
    }
}

/// Seventeen significant digits, enough to read back the same double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct ArtifactEntry<'a> {
    path: &'a str,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Timings {
    total_seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config: &'a ExperimentConfig,
    artifacts: Vec<ArtifactEntry<'a>>,
    timings: Timings,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_run(
    dir: &Path,
    subcommand: &str,
    config: &ExperimentConfig,
    artifacts: &[Artifact],
    elapsed: Duration,
) -> Result<(), CliError> {
    let write = |path: &Path, bytes: &[u8]| {
        fs::write(path, bytes).map_err(|source| CliError::Output { path: path.into(), source })
    };
    fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.into(), source })?;
    for a in artifacts {
        write(&dir.join(&a.name), &a.bytes)?;
    }
    let manifest = Manifest {
        tool: "qpca",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config,
        artifacts: artifacts
            .iter()
            .map(|a| ArtifactEntry { path: &a.name, sha256: sha256_hex(&a.bytes), bytes: a.bytes.len() })
            .collect(),
        timings: Timings { total_seconds: elapsed.as_secs_f64() },
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(qpca_core::Error::from)?;
    bytes.push(b'\n');
    write(&dir.join(MANIFEST), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let a = Artifact::csv("x.csv", &["a", "b"], vec![vec!["1".into(), num(0.5)]]).unwrap();
        assert_eq!(String::from_utf8(a.bytes).unwrap(), "a,b\n1,5.0000000000000000e-1\n");
    }
}
