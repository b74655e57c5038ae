//! Derivations under SLD, co-SLD, structural resolution and co-inductive
//! structural resolution.
//!
//! All strategies work on goals of `(atom, hypotheses)` items. The
//! inductive strategies (SLD, structural resolution) keep every hypothesis
//! set empty.

mod search;
mod step;
mod verify;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::subst::Substitution;
use crate::term::{Term, Var};

pub use search::{derive, Derivations, SearchError, SearchOptions, Selection};
pub use step::{step, step_co_sld, step_co_sres, step_sld, step_sres, Successor};
pub use verify::{verify_trace, VerifyError};

/// Resolution strategy, plus the intermediate co-rewriting-id system that
/// only appears in transformed traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Sld,
    CoSld,
    SRes,
    CoSRes,
    CoRewId,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sld => "sld",
            Mode::CoSld => "co-sld",
            Mode::SRes => "sres",
            Mode::CoSRes => "co-sres",
            Mode::CoRewId => "co-rew-id",
        }
    }

    /// Whether items carry hypothesis sets.
    pub fn is_coinductive(self) -> bool {
        matches!(self, Mode::CoSld | Mode::CoSRes | Mode::CoRewId)
    }

    /// Rules a derivation in this mode may use.
    pub fn allows(self, rule: Rule) -> bool {
        use Rule::*;
        match self {
            Mode::Sld => rule == Sld,
            // a rewriting step is a special case of a co-SLD resolution step
            Mode::CoSld => matches!(rule, Sld | LoopDetection | Rewriting),
            Mode::SRes => matches!(rule, Rewriting | Substitution),
            Mode::CoSRes => matches!(rule, Rewriting | Substitution | LoopDetection),
            Mode::CoRewId => matches!(rule, Rewriting | Identity | LoopDetection),
        }
    }

    /// Rules whose unifiers make up the computed substitution. Matchers
    /// never contribute.
    pub fn contributes(self, rule: Rule) -> bool {
        use Rule::*;
        match self {
            Mode::Sld | Mode::CoSld => matches!(rule, Sld | LoopDetection),
            Mode::SRes => rule == Substitution,
            Mode::CoSRes => matches!(rule, Substitution | LoopDetection),
            Mode::CoRewId => rule == LoopDetection,
        }
    }

    /// The rule that may not be used twice in a row, if any.
    pub fn non_repeating(self) -> Option<Rule> {
        match self {
            Mode::SRes | Mode::CoSRes => Some(Rule::Substitution),
            Mode::CoRewId => Some(Rule::Identity),
            Mode::Sld | Mode::CoSld => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        Ok(match s {
            "sld" => Mode::Sld,
            "co-sld" => Mode::CoSld,
            "sres" => Mode::SRes,
            "co-sres" => Mode::CoSRes,
            "co-rew-id" => Mode::CoRewId,
            other => return Err(format!("unknown mode `{other}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Resolution with a unifying clause head.
    Sld,
    /// Rewriting reduction: the clause head matches the atom.
    Rewriting,
    /// Substitution reduction: the head unifies but does not match.
    Substitution,
    LoopDetection,
    Identity,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::Sld,
        Rule::Rewriting,
        Rule::Substitution,
        Rule::LoopDetection,
        Rule::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Sld => "sld",
            Rule::Rewriting => "rewriting",
            Rule::Substitution => "substitution",
            Rule::LoopDetection => "loop_detection",
            Rule::Identity => "identity",
        }
    }

    pub fn uses_clause(self) -> bool {
        matches!(self, Rule::Sld | Rule::Rewriting | Rule::Substitution)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// An atom with its hypothesis set (the atoms it was derived from).
///
/// Hypotheses are kept newest first and compared as a set.
#[derive(Clone, Debug)]
pub struct GoalItem {
    pub atom: Term,
    pub hypotheses: Vec<Term>,
}

impl GoalItem {
    pub fn new(atom: Term) -> GoalItem {
        GoalItem {
            atom,
            hypotheses: Vec::new(),
        }
    }

    pub fn with_hypotheses(atom: Term, hypotheses: Vec<Term>) -> GoalItem {
        GoalItem {
            atom,
            hypotheses: dedup(hypotheses),
        }
    }

    pub fn apply(&self, s: &Substitution) -> GoalItem {
        GoalItem {
            atom: self.atom.apply(s),
            hypotheses: dedup(self.hypotheses.iter().map(|h| h.apply(s)).collect()),
        }
    }

    /// Equal atoms and equal hypothesis sets.
    pub fn same_as(&self, other: &GoalItem) -> bool {
        self.atom == other.atom && same_set(&self.hypotheses, &other.hypotheses)
    }
}

fn dedup(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn same_set(a: &[Term], b: &[Term]) -> bool {
    a.iter().all(|x| b.contains(x)) && b.iter().all(|y| a.contains(y))
}

/// A goal `← (A_1, S_1), ..., (A_n, S_n)`; the empty goal is a refutation.
#[derive(Clone, Debug, Default)]
pub struct Goal {
    pub items: Vec<GoalItem>,
}

impl Goal {
    pub fn new(items: Vec<GoalItem>) -> Goal {
        Goal { items }
    }

    /// An initial goal: every hypothesis set empty.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Term>) -> Goal {
        Goal {
            items: atoms.into_iter().map(GoalItem::new).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Term> {
        self.items.iter().map(|i| &i.atom)
    }

    /// Variables of every atom and every hypothesis.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for item in &self.items {
            out.extend(item.atom.vars());
            for h in &item.hypotheses {
                out.extend(h.vars());
            }
        }
        out
    }

    pub fn apply(&self, s: &Substitution) -> Goal {
        if s.is_empty() {
            return self.clone();
        }
        Goal {
            items: self.items.iter().map(|i| i.apply(s)).collect(),
        }
    }

    /// Item-wise equality with hypothesis sets compared as sets.
    pub fn same_as(&self, other: &Goal) -> bool {
        self.items.len() == other.items.len()
            && self
                .items
                .iter()
                .zip(&other.items)
                .all(|(a, b)| a.same_as(b))
    }

    pub fn has_hypotheses(&self) -> bool {
        self.items.iter().any(|i| !i.hypotheses.is_empty())
    }

    /// The same atoms with every hypothesis set emptied.
    pub fn without_hypotheses(&self) -> Goal {
        Goal::from_atoms(self.atoms().cloned())
    }

    pub fn max_generation(&self) -> u32 {
        self.items
            .iter()
            .flat_map(|i| std::iter::once(&i.atom).chain(&i.hypotheses))
            .map(Term::max_generation)
            .max()
            .unwrap_or(0)
    }
}

/// Renders as `(q(X), {}), (r(X), {q(X)})`; the empty goal renders as the
/// empty string.
impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {{", item.atom)?;
            for (j, h) in item.hypotheses.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{h}")?;
            }
            f.write_str("})")?;
        }
        Ok(())
    }
}

/// What a single derivation step did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepLabel {
    pub rule: Rule,
    /// Position of the selected item in the goal before the step.
    pub selected: usize,
    pub clause: Option<usize>,
    /// Generation used to rename the clause apart.
    pub generation: Option<u32>,
    /// Unifier, or matcher for rewriting steps; `ε` for identity steps.
    pub unifier: Substitution,
}

/// A derivation `G_0, ..., G_n` with its `n` step labels.
#[derive(Clone, Debug)]
pub struct DerivationTrace {
    pub mode: Mode,
    pub goals: Vec<Goal>,
    pub steps: Vec<StepLabel>,
    pub computed: Substitution,
    /// For transformed traces: the input step each output step came from.
    pub provenance: Option<Vec<usize>>,
}

impl DerivationTrace {
    pub fn initial(&self) -> &Goal {
        &self.goals[0]
    }

    pub fn last(&self) -> &Goal {
        self.goals.last().expect("a trace has at least one goal")
    }

    pub fn is_refutation(&self) -> bool {
        self.last().is_empty()
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    /// The unifiers that make up the computed substitution, in order.
    pub fn unifiers(&self) -> Vec<&Substitution> {
        self.steps
            .iter()
            .filter(|s| self.mode.contributes(s.rule))
            .map(|s| &s.unifier)
            .collect()
    }

    /// The bindings of `vars` under the computed substitution.
    pub fn answer(&self, vars: &BTreeSet<Var>) -> Substitution {
        self.computed.restrict(vars)
    }
}

/// Composition, in step order, of the unifiers the trace's mode counts.
pub fn computed_substitution(trace: &DerivationTrace) -> Substitution {
    trace
        .unifiers()
        .into_iter()
        .fold(Substitution::new(), |acc, th| acc.compose(th))
}
