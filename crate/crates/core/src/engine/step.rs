//! Single-step successors for each strategy.
//!
//! Each function takes the generation used to rename clauses apart and
//! returns successors in the order the search tries them.

use crate::program::{Clause, Program};
use crate::subst::Substitution;
use crate::term::Term;
use crate::unify::{match_term, unify};

use super::{Goal, GoalItem, Mode, Rule, StepLabel};

/// A successor goal together with the label of the step producing it.
#[derive(Clone, Debug)]
pub struct Successor {
    pub goal: Goal,
    pub label: StepLabel,
}

/// Successors of `g` at position `k` under `mode`. The co-rewriting-id
/// system only describes transformed traces and has no successors here.
pub fn step(mode: Mode, g: &Goal, p: &Program, k: usize, generation: u32) -> Vec<Successor> {
    match mode {
        Mode::Sld => step_sld(g, p, k, generation),
        Mode::CoSld => step_co_sld(g, p, k, generation),
        Mode::SRes => step_sres(g, p, k, generation),
        Mode::CoSRes => step_co_sres(g, p, k, generation),
        Mode::CoRewId => Vec::new(),
    }
}

pub fn step_sld(g: &Goal, p: &Program, k: usize, generation: u32) -> Vec<Successor> {
    resolution(g, p, k, generation, false)
}

pub fn step_co_sld(g: &Goal, p: &Program, k: usize, generation: u32) -> Vec<Successor> {
    let mut out = loop_detection(g, k);
    out.extend(resolution(g, p, k, generation, true));
    out
}

pub fn step_sres(g: &Goal, p: &Program, k: usize, generation: u32) -> Vec<Successor> {
    structural(g, p, k, generation, false)
}

pub fn step_co_sres(g: &Goal, p: &Program, k: usize, generation: u32) -> Vec<Successor> {
    let mut out = loop_detection(g, k);
    out.extend(structural(g, p, k, generation, true));
    out
}

/// The hypothesis set of new body items: `S_k ∪ {A_k}`, or nothing for the
/// inductive strategies.
pub(crate) fn extended_hypotheses(item: &GoalItem, coinductive: bool) -> Vec<Term> {
    if !coinductive {
        return Vec::new();
    }
    let mut hyps = Vec::with_capacity(item.hypotheses.len() + 1);
    hyps.push(item.atom.clone());
    hyps.extend(item.hypotheses.iter().cloned());
    hyps
}

/// `prefix, (B_1θ, S'), ..., (B_mθ, S'), suffix` with prefix and suffix
/// left as they are.
pub(crate) fn splice(
    g: &Goal,
    k: usize,
    body: &[Term],
    theta: &Substitution,
    hyps: &[Term],
) -> Goal {
    let mut items = Vec::with_capacity(g.len() + body.len());
    items.extend(g.items[..k].iter().cloned());
    items.extend(
        body.iter()
            .map(|b| GoalItem::with_hypotheses(b.apply(theta), hyps.to_vec())),
    );
    items.extend(g.items[k + 1..].iter().cloned());
    Goal::new(items)
}

/// The goal without item `k`, instantiated by `theta`.
pub(crate) fn discharge(g: &Goal, k: usize, theta: &Substitution) -> Goal {
    let items = g
        .items
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, item)| item.apply(theta))
        .collect();
    Goal::new(items)
}

/// The goal reached from `g` by the step `label`, rebuilt from its witness
/// without searching.
pub(crate) fn replay(p: &Program, mode: Mode, g: &Goal, label: &StepLabel) -> Option<Goal> {
    let k = label.selected;
    let item = g.items.get(k)?;
    let theta = &label.unifier;
    let fresh = || {
        let clause = p.clause(label.clause?)?;
        Some(clause.rename_apart(label.generation?))
    };
    let hyps = || extended_hypotheses(item, mode.is_coinductive());
    Some(match label.rule {
        Rule::Identity => g.clone(),
        Rule::LoopDetection => discharge(g, k, theta),
        Rule::Substitution => g.apply(theta),
        Rule::Rewriting => splice(g, k, &fresh()?.body, theta, &hyps()),
        Rule::Sld => splice(g, k, &fresh()?.body, &Substitution::new(), &hyps()).apply(theta),
    })
}

fn label(
    rule: Rule,
    k: usize,
    clause: Option<&Clause>,
    generation: Option<u32>,
    theta: Substitution,
) -> StepLabel {
    StepLabel {
        rule,
        selected: k,
        clause: clause.map(|c| c.id),
        generation,
        unifier: theta,
    }
}

fn resolution(
    g: &Goal,
    p: &Program,
    k: usize,
    generation: u32,
    coinductive: bool,
) -> Vec<Successor> {
    let item = &g.items[k];
    let hyps = extended_hypotheses(item, coinductive);
    p.clauses_for(&item.atom)
        .filter_map(|clause| {
            let fresh = clause.rename_apart(generation);
            let theta = unify(&fresh.head, &item.atom).ok()?;
            let goal = splice(g, k, &fresh.body, &Substitution::new(), &hyps).apply(&theta);
            Some(Successor {
                goal,
                label: label(Rule::Sld, k, Some(clause), Some(generation), theta),
            })
        })
        .collect()
}

fn loop_detection(g: &Goal, k: usize) -> Vec<Successor> {
    let item = &g.items[k];
    item.hypotheses
        .iter()
        .filter_map(|b| {
            let theta = unify(&item.atom, b).ok()?;
            Some(Successor {
                goal: discharge(g, k, &theta),
                label: label(Rule::LoopDetection, k, None, None, theta),
            })
        })
        .collect()
}

/// Rewriting successors for every matching clause, then substitution
/// successors for every clause that unifies without matching.
fn structural(
    g: &Goal,
    p: &Program,
    k: usize,
    generation: u32,
    coinductive: bool,
) -> Vec<Successor> {
    let item = &g.items[k];
    let hyps = extended_hypotheses(item, coinductive);
    let mut rewriting = Vec::new();
    let mut substitution = Vec::new();
    for clause in p.clauses_for(&item.atom) {
        let fresh = clause.rename_apart(generation);
        if let Some(matcher) = match_term(&fresh.head, &item.atom) {
            rewriting.push(Successor {
                goal: splice(g, k, &fresh.body, &matcher, &hyps),
                label: label(Rule::Rewriting, k, Some(clause), Some(generation), matcher),
            });
        } else if let Ok(theta) = unify(&fresh.head, &item.atom) {
            substitution.push(Successor {
                goal: g.apply(&theta),
                label: label(Rule::Substitution, k, Some(clause), Some(generation), theta),
            });
        }
    }
    rewriting.extend(substitution);
    rewriting
}
