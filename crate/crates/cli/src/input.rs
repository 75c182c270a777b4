//! Input documents.
//!
//! ```json
//! {"type": "full", "alphabet": 3}
//! {"type": "sft", "matrix": [[1, 1], [1, 0]]}
//! {"type": "forbidden", "alphabet": 2, "words": [[1, 1]]}
//! {"type": "beta", "beta": 1.8392867552, "digit_depth": 64}
//! {"type": "matrix", "matrix": [[0, 2], [3, 0]]}
//! ```
//!
//! Symbols are 1-based. Fields are checked one at a time so that every
//! diagnostic names the field it is about.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use symdyn::{NonnegativeMatrix, SubshiftSpec, Word, ZeroOneMatrix};

use crate::CliError;

pub const DEFAULT_DIGIT_DEPTH: usize = 64;

/// Canonical form of an input document, echoed back in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputDoc {
    Full { alphabet: usize },
    Sft { matrix: Vec<Vec<u8>> },
    Forbidden { alphabet: usize, words: Vec<Vec<usize>> },
    Beta { beta: f64, digit_depth: usize },
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone)]
pub enum Target {
    Subshift(SubshiftSpec),
    /// A general nonnegative coefficient matrix.
    Matrix(NonnegativeMatrix),
}

#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub doc: InputDoc,
    pub target: Target,
}

impl ParsedInput {
    /// The 0/1 transition matrix, for `full` and `sft` inputs.
    pub fn transition_matrix(&self) -> Option<ZeroOneMatrix> {
        match &self.target {
            Target::Subshift(spec) => spec.transition_matrix(),
            Target::Matrix(_) => None,
        }
    }

    pub fn subshift(&self) -> Option<&SubshiftSpec> {
        match &self.target {
            Target::Subshift(spec) => Some(spec),
            Target::Matrix(_) => None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, name: &str) -> Result<T, CliError> {
    let value = obj.get(name).ok_or_else(|| bad(format!("{name}: missing field")))?;
    serde_json::from_value(value.clone()).map_err(|e| bad(format!("{name}: {e}")))
}

fn optional<T: DeserializeOwned>(obj: &Map<String, Value>, name: &str) -> Result<Option<T>, CliError> {
    match obj.get(name) {
        None => Ok(None),
        Some(_) => field(obj, name).map(Some),
    }
}

fn only(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), CliError> {
    for key in obj.keys() {
        if key != "type" && !allowed.contains(&key.as_str()) {
            return Err(bad(format!("{key}: unknown field, expected one of {allowed:?}")));
        }
    }
    Ok(())
}

pub fn parse_spec(text: &str) -> Result<ParsedInput, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| bad(format!("document is not valid JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| bad("document must be a JSON object"))?;
    let kind: String = field(obj, "type")?;
    let doc = match kind.as_str() {
        "full" => {
            only(obj, &["alphabet"])?;
            InputDoc::Full {
                alphabet: field(obj, "alphabet")?,
            }
        }
        "sft" => {
            only(obj, &["matrix"])?;
            InputDoc::Sft {
                matrix: field(obj, "matrix")?,
            }
        }
        "forbidden" => {
            only(obj, &["alphabet", "words"])?;
            InputDoc::Forbidden {
                alphabet: field(obj, "alphabet")?,
                words: field(obj, "words")?,
            }
        }
        "beta" => {
            only(obj, &["beta", "digit_depth"])?;
            InputDoc::Beta {
                beta: field(obj, "beta")?,
                digit_depth: optional(obj, "digit_depth")?.unwrap_or(DEFAULT_DIGIT_DEPTH),
            }
        }
        "matrix" => {
            only(obj, &["matrix"])?;
            InputDoc::Matrix {
                matrix: field(obj, "matrix")?,
            }
        }
        other => {
            return Err(bad(format!(
                "type: unknown input type {other:?}, expected full, sft, forbidden, beta or matrix"
            )))
        }
    };
    let target = build(&doc)?;
    Ok(ParsedInput { doc, target })
}

fn build(doc: &InputDoc) -> Result<Target, CliError> {
    let spec = match doc {
        InputDoc::Full { alphabet } => SubshiftSpec::full(*alphabet).map_err(|e| bad(format!("alphabet: {e}")))?,
        InputDoc::Sft { matrix } => {
            let m = ZeroOneMatrix::new(matrix.clone()).map_err(|e| bad(format!("matrix: {e}")))?;
            SubshiftSpec::sft(m).map_err(|e| bad(format!("matrix: {e}")))?
        }
        InputDoc::Forbidden { alphabet, words } => {
            if *alphabet == 0 {
                return Err(bad("alphabet: must be at least 1"));
            }
            for (i, w) in words.iter().enumerate() {
                if w.is_empty() {
                    return Err(bad(format!("words[{i}]: forbidden words must be nonempty")));
                }
                if let Some(&s) = w.iter().find(|&&s| s == 0 || s > *alphabet) {
                    return Err(bad(format!(
                        "words[{i}]: symbol {s} is outside the alphabet 1..={alphabet}"
                    )));
                }
            }
            let words = words.iter().map(|w| Word::new(w.clone())).collect();
            SubshiftSpec::forbidden(*alphabet, words).map_err(|e| bad(format!("words: {e}")))?
        }
        InputDoc::Beta { beta, digit_depth } => {
            if !(beta.is_finite() && *beta > 1.0) {
                return Err(bad(format!("beta: must be a finite number greater than 1, got {beta}")));
            }
            if *digit_depth == 0 {
                return Err(bad("digit_depth: must be at least 1"));
            }
            SubshiftSpec::beta(*beta, *digit_depth).map_err(|e| bad(format!("beta: {e}")))?
        }
        InputDoc::Matrix { matrix } => {
            let m = NonnegativeMatrix::new(matrix.clone()).map_err(|e| bad(format!("matrix: {e}")))?;
            return Ok(Target::Matrix(m));
        }
    };
    Ok(Target::Subshift(spec))
}
