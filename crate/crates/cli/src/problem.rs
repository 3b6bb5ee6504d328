//! Problem-file ingestion: JSON schema, validation, normalization, and the
//! canonical form that reports digest.

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use paretax::frontier::Budget;
use paretax::geometry::DEFAULT_RANK_TOLERANCE;
use paretax::{CapabilitySet, Direction};

use crate::error::CliError;

/// Norm deviation from 1 beyond which ingestion warns before normalizing.
const NORM_WARNING_TOLERANCE: f64 = 1e-6;

/// The problem file as written: one safety vector (or two for conflict
/// analyses), named capability vectors, a budget radius, and an optional
/// Fisher matrix given as a diagonal or a dense matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub dim: usize,
    pub safety: SafetyField,
    pub capabilities: IndexMap<String, Vec<f64>>,
    pub budget_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fisher: Option<FisherField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SafetyField {
    Single(Vec<f64>),
    Pair(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FisherField {
    Diagonal(Vec<f64>),
    Dense(Vec<Vec<f64>>),
}

/// A validated problem with normalized directions and the canonical echo
/// of the raw input.
#[derive(Debug)]
pub struct Problem {
    pub dim: usize,
    pub safety: Direction,
    pub safety2: Option<Direction>,
    pub names: Vec<String>,
    pub capabilities: CapabilitySet,
    pub budget: Budget,
    /// Canonical re-serialization of the raw input; value precision is
    /// preserved (shortest round-trip decimal). Reports digest this form,
    /// so whitespace and key order do not affect reproducibility.
    #[allow(dead_code)]
    pub canonical: String,
    /// Hex SHA-256 of the canonical form.
    pub digest: String,
}

impl Problem {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let raw: RawProblem = serde_json::from_str(text).map_err(classify_json_error)?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawProblem) -> Result<Self, CliError> {
        if raw.dim == 0 {
            return Err(CliError::Schema("dim must be at least 1".into()));
        }
        if raw.budget_radius.is_nan() || raw.budget_radius <= 0.0 {
            return Err(CliError::Schema(format!(
                "budget_radius must be positive, got {}",
                raw.budget_radius
            )));
        }
        if raw.capabilities.is_empty() {
            return Err(CliError::Schema(
                "capabilities must contain at least one entry".into(),
            ));
        }

        let (safety_raw, safety2_raw) = match &raw.safety {
            SafetyField::Single(v) => (v.clone(), None),
            SafetyField::Pair(vs) => {
                if vs.len() != 2 {
                    return Err(CliError::Schema(format!(
                        "safety given as a list of {} vectors; exactly 2 are allowed",
                        vs.len()
                    )));
                }
                (vs[0].clone(), Some(vs[1].clone()))
            }
        };

        let safety = ingest_direction("safety", &safety_raw, raw.dim)?;
        let safety2 = safety2_raw
            .as_ref()
            .map(|v| ingest_direction("safety[1]", v, raw.dim))
            .transpose()?;

        let mut names = Vec::with_capacity(raw.capabilities.len());
        let mut members = Vec::with_capacity(raw.capabilities.len());
        for (name, coords) in &raw.capabilities {
            names.push(name.clone());
            members.push(ingest_direction(
                &format!("capability \"{name}\""),
                coords,
                raw.dim,
            )?);
        }
        let capabilities = CapabilitySet::from_directions(members, DEFAULT_RANK_TOLERANCE)?;

        let budget = match &raw.fisher {
            None => Budget::isotropic(raw.budget_radius)?,
            Some(FisherField::Diagonal(diag)) => {
                if diag.len() != raw.dim {
                    return Err(CliError::Core(paretax::Error::DimensionMismatch {
                        expected: raw.dim,
                        got: diag.len(),
                    }));
                }
                let fisher = DMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
                Budget::anisotropic(raw.budget_radius, fisher)?
            }
            Some(FisherField::Dense(rows)) => {
                if rows.len() != raw.dim {
                    return Err(CliError::Core(paretax::Error::DimensionMismatch {
                        expected: raw.dim,
                        got: rows.len(),
                    }));
                }
                let mut fisher = DMatrix::zeros(raw.dim, raw.dim);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != raw.dim {
                        return Err(CliError::Core(paretax::Error::DimensionMismatch {
                            expected: raw.dim,
                            got: row.len(),
                        }));
                    }
                    for (j, &x) in row.iter().enumerate() {
                        fisher[(i, j)] = x;
                    }
                }
                Budget::anisotropic(raw.budget_radius, fisher)?
            }
        };

        let canonical = serde_json::to_string(&raw).expect("raw problem always serializes");
        let digest = hex_digest(canonical.as_bytes());

        Ok(Self {
            dim: raw.dim,
            safety,
            safety2,
            names,
            capabilities,
            budget,
            canonical,
            digest,
        })
    }

    /// Index of a capability by name.
    pub fn capability_index(&self, name: &str) -> Result<usize, CliError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::Schema(format!("unknown capability \"{name}\"")))
    }

    /// The second safety direction, required by conflict analyses.
    pub fn safety_pair(&self) -> Result<(&Direction, &Direction), CliError> {
        match &self.safety2 {
            Some(v2) => Ok((&self.safety, v2)),
            None => Err(CliError::Schema(
                "this analysis needs two safety vectors; give \"safety\" as a list of two".into(),
            )),
        }
    }
}

fn classify_json_error(e: serde_json::Error) -> CliError {
    if e.is_syntax() || e.is_eof() {
        CliError::Parse(e)
    } else {
        CliError::Schema(e.to_string())
    }
}

fn ingest_direction(label: &str, coords: &[f64], dim: usize) -> Result<Direction, CliError> {
    if coords.len() != dim {
        return Err(CliError::Core(paretax::Error::DimensionMismatch {
            expected: dim,
            got: coords.len(),
        }));
    }
    let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm.is_finite() && norm > 0.0 && (norm - 1.0).abs() > NORM_WARNING_TOLERANCE {
        eprintln!("warning: {label} has norm {norm}; normalizing");
    }
    Ok(Direction::new(coords.to_vec())?)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
