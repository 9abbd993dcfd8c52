//! On-disk formats: `MatrixFile` for single operators and `ReportFile` for
//! compatibility reports, shared decompositions and witness states.
//!
//! Both are JSON with complex numbers as explicit `[re, im]` pairs. Floats
//! are written with 17 significant digits and parsed with correct rounding,
//! so a write/read cycle reproduces every value bit for bit.

mod json;

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::CompatReport;
use crate::linalg::{ComplexMatrix, Subspace, Tolerances};
use crate::states::PureState;
use crate::witness::{RoundTrip, SharedDecomposition, WitnessState};

pub use json::{format_g17, to_json_string};

pub const SCHEMA_VERSION: &str = "qcompat-1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("malformed file at line {line}, column {column}: {message}")]
    MalformedFile {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema version {found:?} (expected \"{SCHEMA_VERSION}\")")]
    SchemaVersionUnsupported { found: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid content: {0}")]
    InvalidContent(String),
    #[error("missing section {0:?}")]
    MissingSection(&'static str),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl IoError {
    fn malformed(e: serde_json::Error) -> Self {
        IoError::MalformedFile {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn to_pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

fn from_pair(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn vector_to_pairs(v: &[Complex64]) -> Vec<Pair> {
    v.iter().map(to_pair).collect()
}

fn pairs_to_vector(v: &[Pair]) -> Vec<Complex64> {
    v.iter().map(from_pair).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub schema_version: String,
    pub dim: usize,
    pub entries: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<&str>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            dim: m.rows(),
            entries: (0..m.rows()).map(|i| vector_to_pairs(m.row(i))).collect(),
            label: label.map(str::to_owned),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        if self.dim == 0 {
            return Err(IoError::ShapeMismatch("dim must be positive".into()));
        }
        if self.entries.len() != self.dim {
            return Err(IoError::ShapeMismatch(format!(
                "dim is {} but entries has {} rows",
                self.dim,
                self.entries.len()
            )));
        }
        if let Some((i, row)) = self
            .entries
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.dim)
        {
            return Err(IoError::ShapeMismatch(format!(
                "dim is {} but row {i} has {} entries",
                self.dim,
                row.len()
            )));
        }
        let data = self
            .entries
            .iter()
            .flat_map(|r| pairs_to_vector(r))
            .collect();
        ComplexMatrix::new(self.dim, self.dim, data)
            .map_err(|e| IoError::InvalidContent(e.to_string()))
    }
}

/// Parses JSON text and checks `schema_version` before the typed decode, so
/// a file from another schema is reported as such rather than as malformed.
fn parse_versioned<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, IoError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(IoError::malformed)?;
    match value.get("schema_version") {
        Some(serde_json::Value::String(v)) if v == SCHEMA_VERSION => {}
        Some(serde_json::Value::String(v)) => {
            return Err(IoError::SchemaVersionUnsupported { found: v.clone() })
        }
        Some(other) => {
            return Err(IoError::SchemaVersionUnsupported {
                found: other.to_string(),
            })
        }
        None => {
            return Err(IoError::MalformedFile {
                line: 1,
                column: 1,
                message: "missing field `schema_version`".into(),
            })
        }
    }
    // Re-parse from text: the typed decode reports line/column positions.
    serde_json::from_str(text).map_err(IoError::malformed)
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|e| IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses a `MatrixFile` document into a matrix and its optional label.
pub fn parse_matrix(text: &str) -> Result<(ComplexMatrix, Option<String>), IoError> {
    let file: MatrixFile = parse_versioned(text)?;
    Ok((file.to_matrix()?, file.label))
}

pub fn read_matrix(path: &Path) -> Result<(ComplexMatrix, Option<String>), IoError> {
    parse_matrix(&read_text(path)?)
}

pub fn serialize_matrix(m: &ComplexMatrix, label: Option<&str>) -> String {
    to_json_string(&MatrixFile::from_matrix(m, label))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub verdict_bfm: bool,
    pub verdict_pi: bool,
    pub verdict_pii: bool,
    pub intersection_dim: usize,
    pub ambient_dim: usize,
    pub intersection_basis: Vec<Vec<Pair>>,
    pub commutator_norm: f64,
    pub product_norm: f64,
    pub observers: usize,
    /// Set when PI/PII aggregate over more than one pair.
    pub pairwise_aggregated: bool,
    pub tolerances_used: Tolerances,
}

impl From<&CompatReport> for ReportSection {
    fn from(r: &CompatReport) -> Self {
        Self {
            verdict_bfm: r.verdict_bfm,
            verdict_pi: r.verdict_pi,
            verdict_pii: r.verdict_pii,
            intersection_dim: r.intersection_dim,
            ambient_dim: r.intersection_basis.ambient_dim(),
            intersection_basis: r
                .intersection_basis
                .basis()
                .iter()
                .map(|v| vector_to_pairs(v))
                .collect(),
            commutator_norm: r.commutator_norm,
            product_norm: r.product_norm,
            observers: r.observers,
            pairwise_aggregated: r.pairwise_aggregated,
            tolerances_used: r.tolerances_used,
        }
    }
}

impl TryFrom<&ReportSection> for CompatReport {
    type Error = IoError;

    fn try_from(s: &ReportSection) -> Result<Self, IoError> {
        let basis = s
            .intersection_basis
            .iter()
            .map(|v| pairs_to_vector(v))
            .collect();
        let intersection_basis = Subspace::new(s.ambient_dim, basis)
            .map_err(|e| IoError::InvalidContent(e.to_string()))?;
        if intersection_basis.dim() != s.intersection_dim {
            return Err(IoError::ShapeMismatch(format!(
                "intersection_dim is {} but basis has {} vectors",
                s.intersection_dim,
                intersection_basis.dim()
            )));
        }
        if s.verdict_bfm != (s.intersection_dim > 0) {
            return Err(IoError::InvalidContent(
                "verdict_bfm disagrees with intersection_dim".into(),
            ));
        }
        Ok(CompatReport {
            verdict_bfm: s.verdict_bfm,
            verdict_pi: s.verdict_pi,
            verdict_pii: s.verdict_pii,
            intersection_dim: s.intersection_dim,
            intersection_basis,
            commutator_norm: s.commutator_norm,
            product_norm: s.product_norm,
            observers: s.observers,
            pairwise_aggregated: s.pairwise_aggregated,
            tolerances_used: s.tolerances_used,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedState {
    pub weight: f64,
    pub state: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSection {
    pub chi: Vec<Pair>,
    pub p0: f64,
    pub q0: f64,
    pub rest_a: Vec<WeightedState>,
    pub rest_b: Vec<WeightedState>,
}

fn weighted_to_section(rest: &[(f64, PureState)]) -> Vec<WeightedState> {
    rest.iter()
        .map(|(w, s)| WeightedState {
            weight: *w,
            state: vector_to_pairs(s.amplitudes()),
        })
        .collect()
}

fn pure_from_pairs(v: &[Pair]) -> Result<PureState, IoError> {
    PureState::new(pairs_to_vector(v)).map_err(|e| IoError::InvalidContent(e.to_string()))
}

impl From<&SharedDecomposition> for DecompositionSection {
    fn from(d: &SharedDecomposition) -> Self {
        Self {
            chi: vector_to_pairs(d.chi.amplitudes()),
            p0: d.p0,
            q0: d.q0,
            rest_a: weighted_to_section(&d.rest_a),
            rest_b: weighted_to_section(&d.rest_b),
        }
    }
}

impl TryFrom<&DecompositionSection> for SharedDecomposition {
    type Error = IoError;

    fn try_from(s: &DecompositionSection) -> Result<Self, IoError> {
        let rest = |v: &[WeightedState]| {
            v.iter()
                .map(|w| Ok((w.weight, pure_from_pairs(&w.state)?)))
                .collect::<Result<Vec<_>, IoError>>()
        };
        let d = SharedDecomposition {
            chi: pure_from_pairs(&s.chi)?,
            p0: s.p0,
            q0: s.q0,
            rest_a: rest(&s.rest_a)?,
            rest_b: rest(&s.rest_b)?,
        };
        d.validate()
            .map_err(|e| IoError::InvalidContent(e.to_string()))?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSection {
    /// `[dim_A, dim_B, dim_S]`.
    pub dims: [usize; 3],
    pub normalization: f64,
    pub amplitudes: Vec<Pair>,
}

impl From<&WitnessState> for WitnessSection {
    fn from(w: &WitnessState) -> Self {
        Self {
            dims: w.dims,
            normalization: w.normalization,
            amplitudes: vector_to_pairs(w.amplitudes.amplitudes()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub alice_error: f64,
    pub bob_error: f64,
    pub joint_fidelity: f64,
    pub max_deviation: f64,
    pub prob_alice: f64,
    pub prob_bob: f64,
    pub prob_joint: f64,
    pub passed: bool,
}

impl SimulationSection {
    pub fn new(rt: &RoundTrip, probabilities: [f64; 3]) -> Self {
        Self {
            alice_error: rt.alice_error,
            bob_error: rt.bob_error,
            joint_fidelity: rt.joint_fidelity,
            max_deviation: rt.max_deviation(),
            prob_alice: probabilities[0],
            prob_bob: probabilities[1],
            prob_joint: probabilities[2],
            passed: rt.passes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema_version: String,
    pub inputs: Vec<String>,
    pub report: ReportSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    pub tolerances_used: Tolerances,
}

impl ReportFile {
    pub fn new(inputs: Vec<String>, report: &CompatReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            inputs,
            report: report.into(),
            decomposition: None,
            witness: None,
            simulation: None,
            tolerances_used: report.tolerances_used,
        }
    }

    pub fn with_decomposition(mut self, d: &SharedDecomposition) -> Self {
        self.decomposition = Some(d.into());
        self
    }

    pub fn with_witness(mut self, w: &WitnessState) -> Self {
        self.decomposition = Some((&w.decomposition).into());
        self.witness = Some(w.into());
        self
    }

    pub fn compat_report(&self) -> Result<CompatReport, IoError> {
        CompatReport::try_from(&self.report)
    }

    /// Rebuilds the witness from the `witness` and `decomposition` sections.
    pub fn witness_state(&self) -> Result<WitnessState, IoError> {
        let w = self
            .witness
            .as_ref()
            .ok_or(IoError::MissingSection("witness"))?;
        let d = self
            .decomposition
            .as_ref()
            .ok_or(IoError::MissingSection("decomposition"))?;
        let decomposition = SharedDecomposition::try_from(d)?;
        let amplitudes = pure_from_pairs(&w.amplitudes)?;
        WitnessState::from_parts(w.dims, amplitudes, w.normalization, decomposition)
            .map_err(|e| IoError::InvalidContent(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

pub fn parse_report(text: &str) -> Result<ReportFile, IoError> {
    parse_versioned(text)
}

pub fn read_report(path: &Path) -> Result<ReportFile, IoError> {
    parse_report(&read_text(path)?)
}
