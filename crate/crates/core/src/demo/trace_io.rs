use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::pddl::{parse_atom, Atom, Ident};

use super::{DemonstrationTrace, Provenance, TraceStep};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TraceIoError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: parallel hand activities are not supported; record one activity per step")]
    ParallelActivities { line: usize },
    #[error("line {line}: step deletes atom {atom} that is not in the current state")]
    DeleteOfAbsentAtom { line: usize, atom: String },
    #[error("line {line}: step adds atom {atom} that is already in the current state")]
    AddOfPresentAtom { line: usize, atom: String },
    #[error("trace has no header record")]
    MissingHeader,
}

fn atom_list(value: &Value, key: &str, line: usize) -> Result<Vec<Atom>, TraceIoError> {
    let Some(raw) = value.get(key) else { return Ok(Vec::new()) };
    let items = raw.as_array().ok_or_else(|| TraceIoError::Malformed {
        line,
        message: format!("`{key}` must be an array of atom strings"),
    })?;
    items
        .iter()
        .map(|item| {
            let text = item.as_str().ok_or_else(|| TraceIoError::Malformed {
                line,
                message: format!("`{key}` entries must be strings"),
            })?;
            parse_atom(text).map_err(|e| TraceIoError::Malformed {
                line,
                message: format!("bad atom `{text}`: {e}"),
            })
        })
        .collect()
}

/// Reads the line-oriented trace format: a header record `{"init": [...]}`
/// followed by one record per step with `label`, `touched`, `adds` and
/// `dels`; pre/post states are reconstructed by folding the deltas.
pub fn read_trace(text: &str) -> Result<DemonstrationTrace, TraceIoError> {
    let mut initial: Option<BTreeSet<Atom>> = None;
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut current: BTreeSet<Atom> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: Value = serde_json::from_str(trimmed).map_err(|e| TraceIoError::Malformed {
            line,
            message: format!("invalid JSON: {e}"),
        })?;
        if value.get("parallel").is_some() {
            return Err(TraceIoError::ParallelActivities { line });
        }
        if initial.is_none() {
            let init = atom_list(&value, "init", line)?;
            if value.get("init").is_none() {
                return Err(TraceIoError::MissingHeader);
            }
            current = init.into_iter().collect();
            initial = Some(current.clone());
            continue;
        }

        let label = value
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| TraceIoError::Malformed {
                line,
                message: "step record needs a `label` string".into(),
            })?;
        let label = Ident::new(label).map_err(|m| TraceIoError::Malformed { line, message: m })?;
        let touched = value
            .get("touched")
            .map(|t| -> Result<Vec<Ident>, TraceIoError> {
                let arr = t.as_array().ok_or_else(|| TraceIoError::Malformed {
                    line,
                    message: "`touched` must be an array".into(),
                })?;
                arr.iter()
                    .map(|o| {
                        let s = o.as_str().ok_or_else(|| TraceIoError::Malformed {
                            line,
                            message: "`touched` entries must be strings".into(),
                        })?;
                        Ident::new(s).map_err(|m| TraceIoError::Malformed { line, message: m })
                    })
                    .collect()
            })
            .transpose()?
            .unwrap_or_default();
        let adds = atom_list(&value, "adds", line)?;
        let dels = atom_list(&value, "dels", line)?;

        let pre = current.clone();
        for atom in &dels {
            if !current.remove(atom) {
                return Err(TraceIoError::DeleteOfAbsentAtom { line, atom: atom.to_string() });
            }
        }
        for atom in &adds {
            if !current.insert(atom.clone()) {
                return Err(TraceIoError::AddOfPresentAtom { line, atom: atom.to_string() });
            }
        }
        if label.as_str() == "idle" && pre != current {
            return Err(TraceIoError::Malformed {
                line,
                message: "idle step must not change the state".into(),
            });
        }
        steps.push(TraceStep { label, touched, pre, post: current.clone() });
    }

    let initial = initial.ok_or(TraceIoError::MissingHeader)?;
    Ok(DemonstrationTrace::new(initial, steps, Provenance::ReplayFile))
}

/// Writes the line-oriented trace format; `read_trace` inverts it.
pub fn write_trace(trace: &DemonstrationTrace) -> String {
    let mut out = String::new();
    let init: Vec<String> = trace.initial.iter().map(|a| a.to_string()).collect();
    out.push_str(&json!({ "init": init }).to_string());
    out.push('\n');
    for step in &trace.steps {
        let adds: Vec<String> = step.adds().iter().map(|a| a.to_string()).collect();
        let dels: Vec<String> = step.dels().iter().map(|a| a.to_string()).collect();
        let touched: Vec<String> = step.touched.iter().map(|o| o.to_string()).collect();
        out.push_str(
            &json!({
                "label": step.label.to_string(),
                "touched": touched,
                "adds": adds,
                "dels": dels,
            })
            .to_string(),
        );
        out.push('\n');
    }
    out
}
