//! On-disk channel descriptions.
//!
//! A spec file is a single JSON document naming either a builtin channel
//! family with its parameters or a raw Kraus list, plus optional subspace,
//! code, seed, and sample-count sections. Complex entries are written as
//! `[re, im]` pairs so files stay hand-editable.

use serde::{Deserialize, Serialize};

use crate::channel::{build_named_channel, KrausChannel, NamedChannel};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, ComplexVector, SubspaceBasis};
use num_complex::Complex64;

/// A complex vector as `[re, im]` pairs.
pub type VectorSpec = Vec<[f64; 2]>;

/// A complex matrix as rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

/// Root document of a channel spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    /// Builtin family descriptor; exactly one of `named`/`raw` must be set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<NamedChannelSpec>,
    /// Raw Kraus list; exactly one of `named`/`raw` must be set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawChannelSpec>,
    /// Vectors spanning the analysis subspace (default: the full space).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<VectorSpec>>,
    /// Codewords for the error-correction commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<Vec<VectorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Builtin channel families, keyed by `family` with `params` payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum NamedChannelSpec {
    Pauli { p: [f64; 4] },
    Depolarizing { p0: f64 },
    CorrelatedPauli2 { p: [f64; 4] },
    PartialReplacement { dim: usize, p: f64 },
    Projective { projectors: Vec<MatrixSpec> },
    UnitaryMixture { p: Vec<f64>, unitaries: Vec<MatrixSpec> },
}

/// A channel given directly by its Kraus operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannelSpec {
    pub dim: usize,
    pub kraus: Vec<MatrixSpec>,
}

/// Errors raised while reading a spec file, before any math runs.
#[derive(Debug, thiserror::Error)]
pub enum SpecFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed spec file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spec must contain exactly one of `named` or `raw`")]
    ChannelChoice,
    #[error("matrix row {row} has {got} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("spec has no `{0}` section, which this command requires")]
    MissingSection(&'static str),
}

pub fn matrix_from_spec(spec: &MatrixSpec) -> std::result::Result<ComplexMatrix, SpecFileError> {
    let rows = spec.len();
    let cols = spec.first().map_or(0, Vec::len);
    for (row, r) in spec.iter().enumerate() {
        if r.len() != cols {
            return Err(SpecFileError::RaggedMatrix {
                row,
                expected: cols,
                got: r.len(),
            });
        }
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(spec[i][j][0], spec[i][j][1])
    }))
}

pub fn vector_from_spec(spec: &VectorSpec) -> ComplexVector {
    ComplexVector::from_iterator(spec.len(), spec.iter().map(|p| Complex64::new(p[0], p[1])))
}

pub fn matrix_to_spec(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn vector_to_spec(v: &ComplexVector) -> VectorSpec {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl ChannelSpecFile {
    pub fn from_str(text: &str) -> std::result::Result<Self, SpecFileError> {
        let spec: ChannelSpecFile = serde_json::from_str(text)?;
        if spec.named.is_some() == spec.raw.is_some() {
            return Err(SpecFileError::ChannelChoice);
        }
        Ok(spec)
    }

    pub fn from_path(path: &std::path::Path) -> std::result::Result<Self, SpecFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str(&text)
    }

    /// Builds the channel this spec describes. Family parameters are checked
    /// by the factory; raw Kraus lists are checked structurally only (run
    /// [`KrausChannel::validate`] afterwards).
    pub fn build_channel(&self) -> std::result::Result<KrausChannel, BuildError> {
        match (&self.named, &self.raw) {
            (Some(named), None) => {
                let descriptor = match named {
                    NamedChannelSpec::Pauli { p } => NamedChannel::Pauli { p: *p },
                    NamedChannelSpec::Depolarizing { p0 } => {
                        NamedChannel::Depolarizing { p0: *p0 }
                    }
                    NamedChannelSpec::CorrelatedPauli2 { p } => {
                        NamedChannel::CorrelatedPauli2 { p: *p }
                    }
                    NamedChannelSpec::PartialReplacement { dim, p } => {
                        NamedChannel::PartialReplacement { dim: *dim, p: *p }
                    }
                    NamedChannelSpec::Projective { projectors } => {
                        let projectors = projectors
                            .iter()
                            .map(|m| matrix_from_spec(m))
                            .collect::<std::result::Result<Vec<_>, _>>()?;
                        NamedChannel::Projective { projectors }
                    }
                    NamedChannelSpec::UnitaryMixture { p, unitaries } => {
                        let unitaries = unitaries
                            .iter()
                            .map(|m| matrix_from_spec(m))
                            .collect::<std::result::Result<Vec<_>, _>>()?;
                        NamedChannel::UnitaryMixture {
                            probabilities: p.clone(),
                            unitaries,
                        }
                    }
                };
                Ok(build_named_channel(&descriptor)?)
            }
            (None, Some(raw)) => {
                let kraus = raw
                    .kraus
                    .iter()
                    .map(|m| matrix_from_spec(m))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(KrausChannel::new(raw.dim, kraus, "raw")?)
            }
            _ => Err(BuildError::Spec(SpecFileError::ChannelChoice)),
        }
    }

    /// The subspace section as a sanitized basis, if present.
    pub fn subspace_basis(&self, ambient_dim: usize) -> Result<Option<SubspaceBasis>> {
        self.basis_section(&self.subspace, ambient_dim)
    }

    /// The code section as a sanitized basis, if present.
    pub fn code_basis(&self, ambient_dim: usize) -> Result<Option<SubspaceBasis>> {
        self.basis_section(&self.code, ambient_dim)
    }

    fn basis_section(
        &self,
        section: &Option<Vec<VectorSpec>>,
        ambient_dim: usize,
    ) -> Result<Option<SubspaceBasis>> {
        match section {
            None => Ok(None),
            Some(vectors) => {
                let raw: Vec<ComplexVector> = vectors.iter().map(|v| vector_from_spec(v)).collect();
                SubspaceBasis::new(ambient_dim, raw).map(Some)
            }
        }
    }
}

/// Failures while turning a parsed spec into a channel.
#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Spec(#[from] SpecFileError),
    #[error(transparent)]
    Channel(#[from] Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DEFAULT_TOL;

    #[test]
    fn parses_named_family() {
        let text = r#"{ "named": { "family": "pauli", "params": { "p": [0.7, 0.1, 0.1, 0.1] } } }"#;
        let spec = ChannelSpecFile::from_str(text).unwrap();
        let t = spec.build_channel().unwrap();
        assert_eq!(t.dim(), 2);
        assert!(t.validate(DEFAULT_TOL).passes);
    }

    #[test]
    fn parses_raw_kraus_list() {
        let text = r#"{
            "raw": {
                "dim": 2,
                "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]
            }
        }"#;
        let spec = ChannelSpecFile::from_str(text).unwrap();
        let t = spec.build_channel().unwrap();
        assert_eq!(t.dim(), 2);
        assert!(t.validate(DEFAULT_TOL).passes);
    }

    #[test]
    fn rejects_both_or_neither_channel_section() {
        let neither = r#"{ "seed": 4 }"#;
        assert!(matches!(
            ChannelSpecFile::from_str(neither),
            Err(SpecFileError::ChannelChoice)
        ));
        let both = r#"{
            "named": { "family": "depolarizing", "params": { "p0": 0.5 } },
            "raw": { "dim": 2, "kraus": [] }
        }"#;
        assert!(matches!(
            ChannelSpecFile::from_str(both),
            Err(SpecFileError::ChannelChoice)
        ));
    }

    #[test]
    fn rejects_malformed_json_and_ragged_matrices() {
        assert!(matches!(
            ChannelSpecFile::from_str("{ not json"),
            Err(SpecFileError::Json(_))
        ));
        let ragged = r#"{
            "raw": { "dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0]]]] }
        }"#;
        let spec = ChannelSpecFile::from_str(ragged).unwrap();
        assert!(matches!(
            spec.build_channel(),
            Err(BuildError::Spec(SpecFileError::RaggedMatrix { .. }))
        ));
    }

    #[test]
    fn subspace_section_round_trips() {
        let s = 1.0 / 2.0_f64.sqrt();
        let text = format!(
            r#"{{
                "named": {{ "family": "pauli", "params": {{ "p": [0.5, 0.5, 0, 0] }} }},
                "subspace": [[[{s}, 0], [{s}, 0]]],
                "seed": 11
            }}"#
        );
        let spec = ChannelSpecFile::from_str(&text).unwrap();
        let basis = spec.subspace_basis(2).unwrap().unwrap();
        assert_eq!(basis.dim(), 1);
        assert_eq!(spec.seed, Some(11));
        // serialize → reparse keeps the same structure
        let json = serde_json::to_string(&spec).unwrap();
        let again = ChannelSpecFile::from_str(&json).unwrap();
        assert_eq!(again.seed, Some(11));
        assert!(again.subspace.is_some());
    }
}
