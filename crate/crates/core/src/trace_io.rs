//! JSON encoding of derivation traces.
//!
//! ```json
//! {
//!   "mode": "co-sres",
//!   "goal": "(q(X), {})",
//!   "steps": [
//!     {"index": 0, "rule": "rewriting", "selected": 0, "clause": 1,
//!      "generation": 1, "unifier": ["X_1 = X"],
//!      "next_goal": "(p(X), {q(X)}), (r(X), {q(X)})"}
//!   ],
//!   "computed": ["X = s(X)"]
//! }
//! ```
//!
//! Clause numbers count from zero in program order. Bindings use the
//! recursive-equation syntax, and the empty goal is the empty string.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{DerivationTrace, Goal, GoalItem, Mode, Rule, StepLabel};
use crate::subst::Substitution;
use crate::syntax::{self, Binding, SyntaxError};

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("malformed trace file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Syntax {
        context: String,
        #[source]
        source: SyntaxError,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    mode: String,
    goal: String,
    steps: Vec<StepRecord>,
    computed: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    index: usize,
    rule: String,
    selected: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clause: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generation: Option<u32>,
    unifier: Vec<String>,
    next_goal: String,
}

fn bindings(s: &Substitution) -> Vec<String> {
    s.iter()
        .map(|(v, t)| Binding::new(v, t).to_string())
        .collect()
}

pub fn to_json(t: &DerivationTrace) -> String {
    let file = TraceFile {
        mode: t.mode.name().to_string(),
        goal: t.initial().to_string(),
        steps: t
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| StepRecord {
                index: i,
                rule: s.rule.name().to_string(),
                selected: s.selected,
                clause: s.clause,
                generation: s.generation,
                unifier: bindings(&s.unifier),
                next_goal: t.goals[i + 1].to_string(),
            })
            .collect(),
        computed: bindings(&t.computed),
    };
    serde_json::to_string_pretty(&file).expect("trace serializes")
}

fn goal(text: &str, context: impl Fn() -> String) -> Result<Goal, TraceIoError> {
    let items = syntax::parse_goal(text).map_err(|source| TraceIoError::Syntax {
        context: context(),
        source,
    })?;
    Ok(Goal::new(
        items
            .into_iter()
            .map(|(atom, hyps)| GoalItem::with_hypotheses(atom, hyps))
            .collect(),
    ))
}

fn substitution(
    list: &[String],
    context: impl Fn() -> String,
) -> Result<Substitution, TraceIoError> {
    syntax::parse_substitution(list.iter().map(String::as_str)).map_err(|source| {
        TraceIoError::Syntax {
            context: context(),
            source,
        }
    })
}

/// Reads a trace written by [`to_json`]. Only the encoding is checked;
/// use `verify_trace` to check the derivation itself.
pub fn from_json(text: &str) -> Result<DerivationTrace, TraceIoError> {
    let file: TraceFile = serde_json::from_str(text)?;
    let mode: Mode = file.mode.parse().map_err(TraceIoError::Invalid)?;
    let mut goals = vec![goal(&file.goal, || "initial goal".to_string())?];
    let mut steps = Vec::with_capacity(file.steps.len());
    for (i, record) in file.steps.iter().enumerate() {
        if record.index != i {
            return Err(TraceIoError::Invalid(format!(
                "step {i} is numbered {}",
                record.index
            )));
        }
        let rule: Rule = record.rule.parse().map_err(TraceIoError::Invalid)?;
        steps.push(StepLabel {
            rule,
            selected: record.selected,
            clause: record.clause,
            generation: record.generation,
            unifier: substitution(&record.unifier, || format!("unifier of step {i}"))?,
        });
        goals.push(goal(&record.next_goal, || format!("goal after step {i}"))?);
    }
    let computed = substitution(&file.computed, || "computed substitution".to_string())?;
    Ok(DerivationTrace {
        mode,
        goals,
        steps,
        computed,
        provenance: None,
    })
}
