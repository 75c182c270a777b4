//! Report documents. Every section repeats the parameters it was computed
//! with, and section order is fixed by the field order of [`Results`].

use serde::{Deserialize, Serialize};
use symdyn::krieger::DimQ;
use symdyn::subshift::CountingMethod;
use symdyn::tracespace::SignReport;

use crate::input::InputDoc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub input_echo: InputDoc,
    pub results: Results,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Results {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kms: Option<KmsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parry: Option<ParrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub krieger: Option<KriegerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variational: Option<VariationalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolvent: Option<ResolventSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    pub max_n: usize,
    pub depth: usize,
    pub samples: usize,
    pub reducible_mode: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySection {
    pub n_max: usize,
    pub method: CountingMethod,
    /// Word counts `θ_1, …, θ_{n_max}` as decimal strings (they exceed u64).
    pub theta: Vec<String>,
    pub log_rates: Vec<f64>,
    pub extrapolated: f64,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KmsKind {
    CuntzKrieger,
    Bimodule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsSection {
    pub kind: KmsKind,
    pub tol: f64,
    pub depth: usize,
    pub reducible_mode: bool,
    pub lambda: f64,
    pub beta: f64,
    pub uniqueness_flag: bool,
    pub bracket: Option<(f64, f64)>,
    /// Levels `t_0, …, t_R` of the KMS eigen-sequence.
    pub eigen_sequence: Option<Vec<Vec<f64>>>,
    pub max_residual: Option<f64>,
    pub sign: SignReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParrySection {
    pub tol: f64,
    pub lambda: f64,
    pub log_lambda: f64,
    pub p: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KriegerSection {
    pub l_max: usize,
    pub depth: usize,
    pub sofic_detected: bool,
    /// Class counts for `l = 1..=l_max`.
    pub counts: Vec<usize>,
    pub stabilized: Vec<bool>,
    pub depths: Vec<usize>,
    pub length_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSection {
    pub n_max: usize,
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub bounded: bool,
    pub correction_sequence: Vec<f64>,
    pub dims: Vec<DimQ>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalSection {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub log_radius: f64,
    pub parry_entropy: f64,
    pub violations: usize,
    pub max_sample_entropy: f64,
    pub max_entropy: f64,
    pub gap: f64,
    pub strict_dominance: bool,
    pub sample_entropies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventPoint {
    pub t: f64,
    pub a_t: Vec<f64>,
    pub pairing: f64,
    /// `‖a_t/Σa_t − v/Σv‖₁`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSection {
    pub tol: f64,
    pub lambda: f64,
    /// Left Perron vector scaled to `Σ v = 1`.
    pub v_normalized: Vec<f64>,
    pub points: Vec<ResolventPoint>,
    pub monotone: bool,
}
