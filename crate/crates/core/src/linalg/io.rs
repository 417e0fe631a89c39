//! JSON form for matrices and states: `{"dim": d, "entries": [[re, im], ...]}`.
//!
//! Matrices carry `d·d` row-major entries, states carry `d`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::states::{DensityMatrix, PureState};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EntriesJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl EntriesJson {
    fn amplitudes(&self, expected: usize) -> Result<Vec<Complex64>> {
        if self.entries.len() != expected {
            return Err(Error::Format(format!(
                "dim {} needs {expected} entries, found {}",
                self.dim,
                self.entries.len()
            )));
        }
        Ok(self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

fn entries_of(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<EntriesJson> {
    if !m.is_square() {
        return Err(Error::Shape("only square matrices have a JSON form".into()));
    }
    Ok(EntriesJson { dim: m.rows(), entries: entries_of(m.as_slice()) })
}

pub fn matrix_from_json(json: &EntriesJson) -> Result<ComplexMatrix> {
    let d = json.dim;
    ComplexMatrix::new(d, d, json.amplitudes(d * d)?)
}

pub fn state_to_json(s: &PureState) -> EntriesJson {
    EntriesJson { dim: s.dim(), entries: entries_of(s.amplitudes()) }
}

pub fn state_from_json(json: &EntriesJson) -> Result<PureState> {
    PureState::new(json.amplitudes(json.dim)?)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    matrix_from_json(&serde_json::from_str(text)?)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_matrix(path)?)
}

pub fn read_state(path: &Path) -> Result<PureState> {
    let json: EntriesJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    state_from_json(&json)
}

pub fn matrix_json_string(m: &ComplexMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&matrix_to_json(m)?)?)
}

pub fn state_json_string(s: &PureState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&state_to_json(s))?)
}
