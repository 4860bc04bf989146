//! Machine-readable run report emitted by the CLI with `--output json`.

use serde::{Deserialize, Serialize};

use crate::cgt::CgtDiagnostics;
use crate::featureset::FeatureSet;
use crate::games::ComplianceReport;
use crate::ranking::{BatchSummary, Comparison, LabelledScores};

/// The explanation problem a report was computed for. Rationals are kept
/// in their canonical `p/q` text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub model_kind: String,
    pub features: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instance: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<String>,
    pub similarity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    pub universe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationList {
    pub kind: String,
    pub sets: Vec<FeatureSet>,
    /// True when the prediction is constant over the universe.
    #[serde(default)]
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceComparison {
    pub instance: Vec<String>,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub problem: ProblemSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant: Option<FeatureSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanations: Option<ExplanationList>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scores: Vec<LabelledScores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cgt: Option<CgtDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compliance: Option<ComplianceReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<InstanceComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<BatchSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds; only present when timing was requested, so
    /// reports are otherwise reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, problem: ProblemSummary) -> Self {
        RunReport {
            command: command.into(),
            problem,
            valid: None,
            relevant: None,
            explanations: None,
            scores: Vec::new(),
            cgt: None,
            compliance: None,
            comparisons: Vec::new(),
            batch: None,
            warnings: Vec::new(),
            elapsed_ms: None,
        }
    }
}
