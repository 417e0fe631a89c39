//! Classical data as a quantum state.
//!
//! A dataset `{a⃗_i}` becomes the purification `Σ_i |a⃗_i| |i⟩|a_i⟩` (normalized
//! by `Σ|a⃗_i|²`). Its first register is the Gram matrix of the data and its
//! second register is the covariance `Σ_i |a⃗_i|² |a_i⟩⟨a_i|`; both share the
//! same nonzero spectrum.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dimension, hermitian_eig, tol, ComplexMatrix, DensityMatrix, PureState, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    vectors: Vec<Vec<Complex64>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(vectors: Vec<Vec<Complex64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let d = vectors.first().map(Vec::len).unwrap_or(0);
        if d == 0 {
            return Err(Error::Format("dataset has no vectors".into()));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != d) {
            return Err(Error::Format(format!(
                "vector {i} has {} entries, expected {d}",
                vectors[i].len()
            )));
        }
        if vectors.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("dataset contains non-finite entries".into()));
        }
        if vectors.iter().flatten().all(|z| *z == ZERO) {
            return Err(Error::Validation("every vector in the dataset is zero".into()));
        }
        if let Some(l) = &labels {
            if l.len() != vectors.len() {
                return Err(Error::Format(format!("{} labels for {} vectors", l.len(), vectors.len())));
            }
        }
        Ok(Self { vectors, labels })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let vectors = rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::new(vectors, None)
    }

    /// JSON (`{"vectors": [[[re, im], ...], ...], "labels": [...]}`) or, for
    /// a `.csv` extension, one real vector per row without a header.
    pub fn load(path: &Path) -> Result<Self> {
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let text = fs::read_to_string(path)?;
        if is_csv {
            Self::parse_csv(&text)
        } else {
            Self::parse_json(&text)
        }
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: DatasetJson = serde_json::from_str(text)?;
        let vectors = json
            .vectors
            .into_iter()
            .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::new(vectors, json.labels)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut vectors = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let vector = record?
                .iter()
                .map(|field| {
                    field
                        .parse::<f64>()
                        .map(|x| Complex64::new(x, 0.0))
                        .map_err(|_| Error::Format(format!("row {row}: cannot parse {field:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            vectors.push(vector);
        }
        Self::new(vectors, None)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let json = DatasetJson {
            vectors: self.vectors.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect(),
            labels: self.labels.clone(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Vector indices grouped by label, in order of first appearance.
    pub fn groups(&self) -> Result<Vec<(String, Vec<usize>)>> {
        let labels = self.labels.as_ref().ok_or_else(|| Error::Validation("dataset has no labels".into()))?;
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            match groups.iter_mut().find(|(l, _)| l == label) {
                Some((_, members)) => members.push(i),
                None => groups.push((label.clone(), vec![i])),
            }
        }
        Ok(groups)
    }

    /// The data matrix `A` with the vectors as columns.
    pub fn column_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), self.len(), |k, i| self.vectors[i][k])
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|z| z * c).collect()).collect();
        Self::new(vectors, self.labels.clone())
    }
}

#[derive(Clone, Debug)]
pub struct GramEncoding {
    /// Amplitudes `a_{ik}/√Σ|a⃗|²` on (vector index ⊗ feature), vector index major.
    pub purification: PureState,
    /// First register, `m × m`.
    pub gram_density: DensityMatrix,
    /// Second register, `d × d`.
    pub covariance_density: DensityMatrix,
    /// `Σ_i |a⃗_i|²` before normalization.
    pub norm_scale: f64,
    /// Indices of zero vectors left out of the encoding.
    pub dropped: Vec<usize>,
}

impl GramEncoding {
    pub fn vectors_kept(&self) -> usize {
        self.gram_density.dim()
    }
}

pub fn build_encoding(data: &Dataset) -> Result<GramEncoding> {
    let d = data.dim();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (i, v) in data.vectors().iter().enumerate() {
        if v.iter().all(|z| *z == ZERO) {
            log::warn!("vector {i} is zero and is left out of the encoding");
            dropped.push(i);
        } else {
            kept.push(v);
        }
    }
    let m = kept.len();
    check_dimension(m * d)?;
    let norm_scale: f64 = kept.iter().flat_map(|v| v.iter()).map(|z| z.norm_sqr()).sum();
    let amp = norm_scale.sqrt().recip();
    let amplitudes: Vec<Complex64> = kept.iter().flat_map(|v| v.iter().map(move |z| z * amp)).collect();

    let at = |i: usize, k: usize| amplitudes[i * d + k];
    let mut gram = ComplexMatrix::from_fn(m, m, |i, j| (0..d).map(|k| at(i, k) * at(j, k).conj()).sum());
    let mut cov = ComplexMatrix::from_fn(d, d, |k, l| (0..m).map(|i| at(i, k) * at(i, l).conj()).sum());
    gram.hermitize();
    cov.hermitize();

    Ok(GramEncoding {
        purification: PureState::normalized(amplitudes)?,
        gram_density: DensityMatrix::new(gram)?,
        covariance_density: DensityMatrix::new(cov)?,
        norm_scale,
        dropped,
    })
}

#[derive(Clone, Debug)]
pub struct PcaReference {
    pub components: Vec<(f64, PureState)>,
    /// True when a requested component shares its eigenvalue with another.
    pub degenerate: bool,
}

/// Top eigenpairs of the covariance register, computed classically.
pub fn pca_reference(data: &Dataset, top_k: usize) -> Result<PcaReference> {
    if top_k == 0 || top_k > data.dim() {
        return Err(Error::Validation(format!("top_k must be in 1..={}, got {top_k}", data.dim())));
    }
    let enc = build_encoding(data)?;
    let eig = hermitian_eig(enc.covariance_density.matrix())?;
    let vals = eig.eigenvalues();
    let horizon = (top_k + 1).min(vals.len());
    let degenerate = vals[..horizon].windows(2).any(|w| w[0] - w[1] <= tol::DEGENERACY_GAP);
    let components = vals.iter().copied().zip(eig.eigenvectors().iter().cloned()).take(top_k).collect();
    Ok(PcaReference { components, degenerate })
}
