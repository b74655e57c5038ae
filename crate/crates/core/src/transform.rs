//! From co-inductive structural refutations to co-SLD refutations.
//!
//! A co-S refutation of `G` with computed substitution `σ` is rewritten into
//! a co-rewriting-id refutation of `Gσ` whose computed substitution is `ε`.
//! Removing its identity steps then leaves a co-SLD refutation of `Gσ`.

use std::fmt;

use thiserror::Error;

use crate::engine::{
    computed_substitution, verify_trace, DerivationTrace, Goal, Mode, Rule, StepLabel, VerifyError,
};
use crate::program::Program;
use crate::subst::Substitution;

/// `σ_k = θ_k θ_{k+1} ⋯ θ_m θ_{m+1}` for `k = 1..m+1`, with `θ_{m+1} = ε`.
///
/// Stored zero-based: `sigmas[0]` is `σ_1` and the last entry is `ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixCompositions {
    pub sigmas: Vec<Substitution>,
}

impl SuffixCompositions {
    /// `σ_k` with the one-based index used in derivations.
    pub fn sigma(&self, k: usize) -> &Substitution {
        &self.sigmas[k - 1]
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }
}

pub fn suffix_compositions(thetas: &[Substitution]) -> SuffixCompositions {
    let mut sigmas = vec![Substitution::new()];
    for theta in thetas.iter().rev() {
        let next = theta.compose(sigmas.last().expect("never empty"));
        sigmas.push(next);
    }
    sigmas.reverse();
    SuffixCompositions { sigmas }
}

/// Which stage of the soundness pipeline rejected a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Input,
    CoRewritingId,
    CoSld,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Input => "input trace",
            Stage::CoRewritingId => "co-rewriting-id trace",
            Stage::CoSld => "co-SLD trace",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{stage}: {error}")]
pub struct TransformError {
    pub stage: Stage,
    pub error: VerifyError,
}

impl TransformError {
    /// Index of the offending step in the trace of `stage`.
    pub fn step(&self) -> Option<usize> {
        self.error.step
    }

    fn new(stage: Stage, step: Option<usize>, reason: impl Into<String>) -> TransformError {
        TransformError {
            stage,
            error: VerifyError {
                step,
                reason: reason.into(),
            },
        }
    }
}

/// Builds the co-rewriting-id refutation of `G_0σ_1` from a co-S
/// refutation and re-verifies it.
///
/// Rewriting steps keep their clause with the matcher `γσ_x` cut down to
/// the clause variables. Substitution steps become identity steps and
/// loop detection steps carry `ε`; both move on to the next `σ`.
pub fn transform(p: &Program, t: &DerivationTrace) -> Result<DerivationTrace, TransformError> {
    if t.mode != Mode::CoSRes {
        return Err(TransformError::new(
            Stage::Input,
            None,
            format!("expected a co-sres trace, found {}", t.mode),
        ));
    }
    verify_trace(p, t).map_err(|error| TransformError {
        stage: Stage::Input,
        error,
    })?;
    let thetas: Vec<Substitution> = t.unifiers().into_iter().cloned().collect();
    let sigmas = suffix_compositions(&thetas);

    let mut x = 0;
    let mut goals = vec![t.goals[0].apply(&sigmas.sigmas[0])];
    let mut steps = Vec::with_capacity(t.steps.len());
    for (i, label) in t.steps.iter().enumerate() {
        let sigma = &sigmas.sigmas[x];
        let (rule, unifier) = match label.rule {
            Rule::Rewriting => {
                let clause = label
                    .clause
                    .and_then(|id| p.clause(id))
                    .zip(label.generation)
                    .map(|(c, g)| c.rename_apart(g))
                    .ok_or_else(|| {
                        TransformError::new(Stage::Input, Some(i), "rewriting step without clause")
                    })?;
                (
                    Rule::Rewriting,
                    label.unifier.compose(sigma).restrict(&clause.vars()),
                )
            }
            Rule::Substitution => {
                x += 1;
                (Rule::Identity, Substitution::new())
            }
            Rule::LoopDetection => {
                x += 1;
                (Rule::LoopDetection, Substitution::new())
            }
            other => {
                return Err(TransformError::new(
                    Stage::Input,
                    Some(i),
                    format!("rule {other} cannot occur in a co-sres trace"),
                ))
            }
        };
        goals.push(t.goals[i + 1].apply(&sigmas.sigmas[x]));
        steps.push(StepLabel {
            rule,
            selected: label.selected,
            clause: if rule == Rule::Rewriting {
                label.clause
            } else {
                None
            },
            generation: if rule == Rule::Rewriting {
                label.generation
            } else {
                None
            },
            unifier,
        });
    }
    let mut out = DerivationTrace {
        mode: Mode::CoRewId,
        goals,
        steps,
        computed: Substitution::new(),
        provenance: Some((0..t.steps.len()).collect()),
    };
    out.computed = computed_substitution(&out);
    verify_trace(p, &out).map_err(|error| TransformError {
        stage: Stage::CoRewritingId,
        error,
    })?;
    Ok(out)
}

/// Drops identity steps together with their target goals, which repeat
/// the goal before them. The result is read as a co-SLD trace.
pub fn strip_identity(t: &DerivationTrace) -> DerivationTrace {
    let origin = |i: usize| t.provenance.as_ref().map_or(i, |p| p[i]);
    let mut goals = vec![t.goals[0].clone()];
    let mut steps = Vec::new();
    let mut provenance = Vec::new();
    for (i, label) in t.steps.iter().enumerate() {
        if label.rule == Rule::Identity {
            continue;
        }
        goals.push(t.goals[i + 1].clone());
        steps.push(label.clone());
        provenance.push(origin(i));
    }
    let mut out = DerivationTrace {
        mode: Mode::CoSld,
        goals,
        steps,
        computed: Substitution::new(),
        provenance: Some(provenance),
    };
    out.computed = computed_substitution(&out);
    out
}

/// Outcome of a successful soundness check.
#[derive(Clone, Debug)]
pub struct SoundnessReport {
    /// Computed substitution of the input refutation.
    pub sigma: Substitution,
    /// The instantiated goal `Gσ` that the co-SLD refutation proves.
    pub instance: Goal,
    pub co_rewriting_id: DerivationTrace,
    pub co_sld: DerivationTrace,
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "computed substitution: {}", self.sigma)?;
        writeln!(f, "instance: {}", self.instance)?;
        writeln!(
            f,
            "co-rewriting-id refutation: {} steps, verified",
            self.co_rewriting_id.steps.len()
        )?;
        write!(
            f,
            "co-SLD refutation: {} steps, verified, computed substitution {}",
            self.co_sld.steps.len(),
            self.co_sld.computed
        )
    }
}

/// Runs the whole pipeline on a co-S refutation: recomputes `σ`,
/// transforms, strips identities, and verifies each result.
pub fn soundness_check(
    p: &Program,
    t: &DerivationTrace,
) -> Result<SoundnessReport, TransformError> {
    let co_rewriting_id = transform(p, t)?;
    let sigma = computed_substitution(t);
    if sigma != t.computed {
        return Err(TransformError::new(
            Stage::Input,
            None,
            format!(
                "recorded computed substitution {} differs from {sigma}",
                t.computed
            ),
        ));
    }
    if !co_rewriting_id.computed.is_empty() {
        return Err(TransformError::new(
            Stage::CoRewritingId,
            None,
            format!(
                "computed substitution {} is not empty",
                co_rewriting_id.computed
            ),
        ));
    }
    let co_sld = strip_identity(&co_rewriting_id);
    verify_trace(p, &co_sld).map_err(|error| TransformError {
        stage: Stage::CoSld,
        error,
    })?;
    if !co_sld.computed.is_empty() {
        return Err(TransformError::new(
            Stage::CoSld,
            None,
            format!("computed substitution {} is not empty", co_sld.computed),
        ));
    }
    Ok(SoundnessReport {
        instance: t.initial().apply(&sigma),
        sigma,
        co_rewriting_id,
        co_sld,
    })
}
