//! Depth-first backtracking search for refutations.

use std::rc::Rc;

use thiserror::Error;

use crate::program::Program;
use crate::term::Term;

use super::step::{replay, step, Successor};
use super::{computed_substitution, DerivationTrace, Goal, Mode, Rule, StepLabel};

/// Which goal item is reduced next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Selection {
    #[default]
    Leftmost,
    Rightmost,
}

impl Selection {
    fn pick(self, g: &Goal) -> usize {
        match self {
            Selection::Leftmost => 0,
            Selection::Rightmost => g.len() - 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Node expansions allowed before the search gives up.
    pub max_steps: usize,
    /// Longest derivation explored; deeper branches are cut off.
    pub max_depth: Option<usize>,
    pub max_solutions: usize,
    pub selection: Selection,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            max_steps: 10_000,
            max_depth: None,
            max_solutions: 1,
            selection: Selection::Leftmost,
        }
    }
}

/// The search stopped without deciding whether more refutations exist.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("step budget of {steps} exhausted")]
    BudgetExhausted { steps: usize },
    #[error("derivations were cut off at depth {depth}")]
    DepthLimitReached { depth: usize },
}

/// Steps taken so far, shared between sibling branches. Goals are not
/// kept; they are replayed from the labels when a refutation is found.
struct Link {
    step: Option<(StepLabel, Rc<Link>)>,
}

// Long chains would otherwise be dropped recursively.
impl Drop for Link {
    fn drop(&mut self) {
        let mut next = self.step.take();
        while let Some((_, rc)) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut link) => next = link.step.take(),
                Err(_) => break,
            }
        }
    }
}

struct Node {
    goal: Goal,
    link: Rc<Link>,
    depth: usize,
    generation: u32,
    last: Option<Rule>,
}

/// Iterator over refutations. Finite failure ends the iteration; an error
/// item means the search stopped undecided and is always the last item.
pub struct Derivations<'p> {
    program: &'p Program,
    mode: Mode,
    initial: Goal,
    options: SearchOptions,
    stack: Vec<Node>,
    expansions: usize,
    found: usize,
    cut_off: bool,
    done: bool,
}

impl Derivations<'_> {
    /// Node expansions so far.
    pub fn steps(&self) -> usize {
        self.expansions
    }
}

/// Enumerates refutations of `query` in program order by depth-first search.
pub fn derive<'p>(
    program: &'p Program,
    query: &[Term],
    mode: Mode,
    options: SearchOptions,
) -> Derivations<'p> {
    let goal = Goal::from_atoms(query.iter().cloned());
    let base = program.max_generation().max(goal.max_generation()) + 1;
    Derivations {
        program,
        mode,
        initial: goal.clone(),
        options,
        stack: vec![Node {
            goal,
            link: Rc::new(Link { step: None }),
            depth: 0,
            generation: base,
            last: None,
        }],
        expansions: 0,
        found: 0,
        cut_off: false,
        done: false,
    }
}

impl Iterator for Derivations<'_> {
    type Item = Result<DerivationTrace, SearchError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.found >= self.options.max_solutions {
            return None;
        }
        while let Some(node) = self.stack.pop() {
            if node.goal.is_empty() {
                self.found += 1;
                return Some(Ok(self.trace(&node.link)));
            }
            if self.options.max_depth.is_some_and(|d| node.depth >= d) {
                self.cut_off = true;
                continue;
            }
            if self.expansions >= self.options.max_steps {
                self.done = true;
                return Some(Err(SearchError::BudgetExhausted {
                    steps: self.expansions,
                }));
            }
            self.expansions += 1;
            self.expand(node);
        }
        self.done = true;
        match self.options.max_depth {
            Some(depth) if self.cut_off => Some(Err(SearchError::DepthLimitReached { depth })),
            _ => None,
        }
    }
}

impl Derivations<'_> {
    fn expand(&mut self, node: Node) {
        let goal = &node.goal;
        let k = self.options.selection.pick(goal);
        let banned = self.mode.non_repeating().filter(|r| node.last == Some(*r));
        let successors: Vec<Successor> = step(self.mode, goal, self.program, k, node.generation)
            .into_iter()
            .filter(|s| Some(s.label.rule) != banned)
            .collect();
        for s in successors.into_iter().rev() {
            let generation = if s.label.rule.uses_clause() {
                node.generation + 1
            } else {
                node.generation
            };
            let last = Some(s.label.rule);
            self.stack.push(Node {
                goal: s.goal,
                link: Rc::new(Link {
                    step: Some((s.label, Rc::clone(&node.link))),
                }),
                depth: node.depth + 1,
                generation,
                last,
            });
        }
    }

    fn trace(&self, end: &Rc<Link>) -> DerivationTrace {
        let mut steps = Vec::new();
        let mut cur = end;
        while let Some((label, prev)) = &cur.step {
            steps.push(label.clone());
            cur = prev;
        }
        steps.reverse();
        let mut goals = Vec::with_capacity(steps.len() + 1);
        goals.push(self.initial.clone());
        for label in &steps {
            let next = replay(self.program, self.mode, goals.last().unwrap(), label)
                .expect("labels produced by the search replay");
            goals.push(next);
        }
        let mut trace = DerivationTrace {
            mode: self.mode,
            goals,
            steps,
            computed: Default::default(),
            provenance: None,
        };
        trace.computed = computed_substitution(&trace);
        trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_program, parse_query};
    use crate::syntax::parse_term;
    use crate::term::{term_equal, Var};

    const EXAMPLE: &str = "p(s(X)) :- q(X).\nq(X) :- p(X), r(X).\nr(X).";

    fn first(program: &str, query: &str, mode: Mode) -> Result<DerivationTrace, SearchError> {
        let p = parse_program(program).unwrap();
        let q = parse_query(query).unwrap();
        derive(&p, &q, mode, SearchOptions::default())
            .next()
            .expect("a refutation or an error")
    }

    #[test]
    fn co_sres_example_trace() {
        let t = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();
        use Rule::*;
        assert_eq!(
            t.rules(),
            [Rewriting, Substitution, Rewriting, LoopDetection, Rewriting]
        );
        let s = parse_term("mu A. s(A)").unwrap();
        assert!(term_equal(t.computed.get(&Var::new("X")).unwrap(), &s));
        assert!(term_equal(t.computed.get(&Var::parse("X_2")).unwrap(), &s));
        assert_eq!(t.computed.len(), 2);
        assert_eq!(
            t.goals[3].to_string(),
            "(q(X_2), {p(s(X_2)), q(s(X_2))}), (r(s(X_2)), {q(s(X_2))})"
        );
    }

    #[test]
    fn sres_pqr_trace() {
        let t = first(
            "p(f(X)) :- q(X).\nq(a).\nr(f(a)).",
            "p(X), r(X)",
            Mode::SRes,
        )
        .unwrap();
        use Rule::*;
        assert_eq!(
            t.rules(),
            [Substitution, Rewriting, Substitution, Rewriting, Rewriting]
        );
        assert_eq!(t.computed.to_string(), "{X = f(a), X_1 = a}");
    }

    #[test]
    fn empty_query_is_refuted() {
        let t = first("q(a).", "", Mode::CoSRes).unwrap();
        assert!(t.steps.is_empty());
        assert!(t.computed.is_empty());
    }

    #[test]
    fn finite_failure_ends_iteration() {
        let p = parse_program("").unwrap();
        let q = parse_query("p(X)").unwrap();
        assert!(derive(&p, &q, Mode::Sld, SearchOptions::default())
            .next()
            .is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = first(
            "bit(0).\nbit(1).\nbs(cons(X, Xs)) :- bit(X), bs(Xs).",
            "bs(Xs)",
            Mode::SRes,
        );
        assert_eq!(
            r.unwrap_err(),
            SearchError::BudgetExhausted { steps: 10_000 }
        );
    }

    #[test]
    fn depth_limit_is_reported() {
        let p = parse_program("n(s(X)) :- n(X).").unwrap();
        let q = parse_query("n(X)").unwrap();
        let opts = SearchOptions {
            max_depth: Some(20),
            ..SearchOptions::default()
        };
        let r: Vec<_> = derive(&p, &q, Mode::Sld, opts).collect();
        assert_eq!(r.len(), 1);
        assert_eq!(
            r[0].clone().unwrap_err(),
            SearchError::DepthLimitReached { depth: 20 }
        );
    }

    #[test]
    fn all_solutions_in_program_order() {
        let p = parse_program("r(a).\nr(b).\nr(c).").unwrap();
        let q = parse_query("r(X)").unwrap();
        let opts = SearchOptions {
            max_solutions: usize::MAX,
            ..SearchOptions::default()
        };
        let answers: Vec<String> = derive(&p, &q, Mode::Sld, opts)
            .map(|t| t.unwrap().computed.to_string())
            .collect();
        assert_eq!(answers, ["{X = a}", "{X = b}", "{X = c}"]);
    }

    #[test]
    fn bit_stream_under_co_sld() {
        let prog = "bit(0).\nbit(1).\nbit_stream(cons(X, Xs)) :- bit(X), bit_stream(Xs).";
        for mode in [Mode::CoSld, Mode::CoSRes] {
            let t = first(prog, "bit_stream(cons(0, Xs))", mode).unwrap();
            let xs = t.computed.get(&Var::new("Xs")).unwrap();
            assert!(
                term_equal(xs, &parse_term("mu A. cons(0, A)").unwrap()),
                "{mode}"
            );
        }
    }
}
