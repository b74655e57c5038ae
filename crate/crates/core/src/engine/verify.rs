//! Independent re-checking of derivation traces.
//!
//! Every step is recomputed from the program and the labelled witness; the
//! search code is not consulted.

use std::collections::BTreeSet;
use std::fmt;

use crate::program::{Clause, Program};
use crate::subst::Substitution;
use crate::term::{Term, Var};
use crate::unify::{match_term, unify};

use super::step::{discharge, extended_hypotheses, splice};
use super::{computed_substitution, DerivationTrace, Goal, Mode, Rule, StepLabel};

/// Why a trace was rejected. `step` is the index of the offending step,
/// absent for whole-trace problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyError {
    pub step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

impl std::error::Error for VerifyError {}

fn fail<T>(step: Option<usize>, reason: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError {
        step,
        reason: reason.into(),
    })
}

/// Checks that `t` is a refutation of its initial goal under the rules of
/// its mode, with the recorded computed substitution.
pub fn verify_trace(p: &Program, t: &DerivationTrace) -> Result<(), VerifyError> {
    if t.goals.len() != t.steps.len() + 1 {
        return fail(
            None,
            format!("{} goals for {} steps", t.goals.len(), t.steps.len()),
        );
    }
    if t.initial().has_hypotheses() {
        return fail(None, "initial goal has non-empty hypothesis sets");
    }
    let mut previous: Option<Rule> = None;
    for (i, label) in t.steps.iter().enumerate() {
        let at = Some(i);
        if !t.mode.allows(label.rule) {
            return fail(at, format!("rule {} is not part of {}", label.rule, t.mode));
        }
        if previous.is_some() && previous == t.mode.non_repeating().filter(|r| *r == label.rule) {
            return fail(at, format!("two consecutive {} steps", label.rule));
        }
        previous = Some(label.rule);
        let (g, next) = (&t.goals[i], &t.goals[i + 1]);
        if !t.mode.is_coinductive() && next.has_hypotheses() {
            return fail(at, "hypothesis sets must stay empty");
        }
        check_step(p, t.mode, g, label, next).or_else(|reason| fail(at, reason))?;
    }
    if !t.last().is_empty() {
        return fail(None, "final goal not empty");
    }
    let expected = computed_substitution(t);
    if expected != t.computed {
        return fail(
            None,
            format!(
                "computed substitution {} differs from {expected}",
                t.computed
            ),
        );
    }
    Ok(())
}

fn check_step(
    p: &Program,
    mode: Mode,
    g: &Goal,
    label: &StepLabel,
    next: &Goal,
) -> Result<(), String> {
    let k = label.selected;
    let item = g
        .items
        .get(k)
        .ok_or_else(|| format!("selected position {k} outside a goal of {} items", g.len()))?;
    let theta = &label.unifier;
    let expected = match label.rule {
        Rule::Identity => {
            if !theta.is_empty() || label.clause.is_some() {
                return Err("identity steps carry no clause and the empty substitution".into());
            }
            g.clone()
        }
        Rule::LoopDetection => {
            if label.clause.is_some() {
                return Err("loop detection uses no clause".into());
            }
            let found = item
                .hypotheses
                .iter()
                .any(|b| most_general(&item.atom, b, theta));
            if !found {
                return Err(format!(
                    "{theta} is not a most general unifier of {} with any hypothesis",
                    item.atom
                ));
            }
            discharge(g, k, theta)
        }
        Rule::Sld => {
            let fresh = renamed_clause(p, label, &item.atom)?;
            require_fresh(&fresh, g)?;
            if !most_general(&fresh.head, &item.atom, theta) {
                return Err(format!(
                    "{theta} is not a most general unifier of {} and {}",
                    fresh.head, item.atom
                ));
            }
            let hyps = extended_hypotheses(item, mode.is_coinductive());
            splice(g, k, &fresh.body, &Substitution::new(), &hyps).apply(theta)
        }
        Rule::Rewriting => {
            let fresh = renamed_clause(p, label, &item.atom)?;
            let clause_vars = fresh.vars();
            let goal_vars = g.vars();
            for v in theta.domain() {
                if !clause_vars.contains(&v) {
                    return Err(format!("matcher binds {v}, which is not a clause variable"));
                }
                if goal_vars.contains(&v) {
                    return Err(format!("matcher binds goal variable {v}"));
                }
            }
            if fresh.head.apply(theta) != item.atom {
                return Err(format!(
                    "{} instantiated by {theta} is not {}",
                    fresh.head, item.atom
                ));
            }
            let hyps = extended_hypotheses(item, mode.is_coinductive());
            splice(g, k, &fresh.body, theta, &hyps)
        }
        Rule::Substitution => {
            let fresh = renamed_clause(p, label, &item.atom)?;
            require_fresh(&fresh, g)?;
            if match_term(&fresh.head, &item.atom).is_some() {
                return Err(format!(
                    "{} matches {}; rewriting applies",
                    fresh.head, item.atom
                ));
            }
            if !most_general(&fresh.head, &item.atom, theta) {
                return Err(format!(
                    "{theta} is not a most general unifier of {} and {}",
                    fresh.head, item.atom
                ));
            }
            g.apply(theta)
        }
    };
    if expected.same_as(next) {
        Ok(())
    } else {
        Err(format!("expected goal `{expected}`, trace has `{next}`"))
    }
}

fn renamed_clause(p: &Program, label: &StepLabel, atom: &Term) -> Result<Clause, String> {
    let id = label.clause.ok_or("step needs a clause")?;
    let generation = label.generation.ok_or("step needs a renaming generation")?;
    let clause = p
        .clause(id)
        .ok_or_else(|| format!("no clause {id} in the program"))?;
    if clause.head.functor() != atom.functor() {
        return Err(format!(
            "clause {id} does not define the predicate of {atom}"
        ));
    }
    Ok(clause.rename_apart(generation))
}

fn require_fresh(clause: &Clause, g: &Goal) -> Result<(), String> {
    match clause.vars().intersection(&g.vars()).next() {
        Some(v) => Err(format!("renamed clause shares variable {v} with the goal")),
        None => Ok(()),
    }
}

/// `theta` unifies `a` and `b` and is as general as a computed mgu.
fn most_general(a: &Term, b: &Term, theta: &Substitution) -> bool {
    if a.apply(theta) != b.apply(theta) {
        return false;
    }
    let Ok(mgu) = unify(a, b) else {
        return false;
    };
    let pair = Term::app("=", vec![a.clone(), b.clone()]);
    variant(&pair.apply(theta), &pair.apply(&mgu))
}

/// Equal up to a bijective renaming of variables.
fn variant(a: &Term, b: &Term) -> bool {
    let apart = b.map_vars(|v| Var::with_generation(format!("{v}'"), v.generation()));
    let (Some(ab), Some(ba)) = (match_term(a, &apart), match_term(&apart, a)) else {
        return false;
    };
    let renaming = |s: &Substitution| {
        let images: BTreeSet<&Var> = s.iter().filter_map(|(_, t)| t.as_var()).collect();
        images.len() == s.len()
    };
    renaming(&ab) && renaming(&ba)
}
