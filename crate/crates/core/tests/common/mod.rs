//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use cosres::engine::{derive, DerivationTrace, GoalItem, Mode, SearchError, SearchOptions};
use cosres::term::{FiniteTree, TermBuilder};
use cosres::{
    match_term, parse_program, parse_query, parse_term, Goal, Program, Substitution, Term, Var,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE: &str = include_str!("../../examples/programs/example.pl");
pub const PQR: &str = include_str!("../../examples/programs/pqr.pl");
pub const BIT_STREAM: &str = include_str!("../../examples/programs/bit_stream.pl");

pub fn t(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn first(program: &str, query: &str, mode: Mode) -> Result<DerivationTrace, SearchError> {
    let p = parse_program(program).unwrap();
    let q = parse_query(query).unwrap();
    derive(&p, &q, mode, SearchOptions::default())
        .next()
        .expect("refutation or undecided search")
}

/// Item built from an atom and hypotheses written as text.
pub fn item(atom: &str, hyps: &[&str]) -> GoalItem {
    GoalItem::with_hypotheses(t(atom), hyps.iter().map(|h| t(h)).collect())
}

// ---------------------------------------------------------------------------
// Oracles

/// Equality of the depth-`d` unfoldings.
pub fn unfold_equal(a: &Term, b: &Term, depth: usize) -> bool {
    a.unfold(depth) == b.unfold(depth)
}

enum Cell {
    Var,
    Bottom,
    App(String, Vec<usize>),
}

/// Looks for a functor mismatch forced by identifying the depth-`d`
/// unfoldings of `a` and `b`, with shared variables identified and
/// truncation points left unconstrained. Returns the clashing functors.
pub fn unfolding_clash(a: &Term, b: &Term, depth: usize) -> Option<(String, String)> {
    let mut cells: Vec<Cell> = Vec::new();
    let mut vars: HashMap<Var, usize> = HashMap::new();
    fn flatten(t: &FiniteTree, cells: &mut Vec<Cell>, vars: &mut HashMap<Var, usize>) -> usize {
        match t {
            FiniteTree::Var(v) => *vars.entry(v.clone()).or_insert_with(|| {
                cells.push(Cell::Var);
                cells.len() - 1
            }),
            FiniteTree::Bottom => {
                cells.push(Cell::Bottom);
                cells.len() - 1
            }
            FiniteTree::App(f, args) => {
                let kids = args.iter().map(|x| flatten(x, cells, vars)).collect();
                cells.push(Cell::App(f.to_string(), kids));
                cells.len() - 1
            }
        }
    }
    let ra = flatten(&a.unfold(depth), &mut cells, &mut vars);
    let rb = flatten(&b.unfold(depth), &mut cells, &mut vars);
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut work = vec![(ra, rb)];
    while let Some((x, y)) = work.pop() {
        let (x, y) = (find(&mut parent, x), find(&mut parent, y));
        if x == y {
            continue;
        }
        match (&cells[x], &cells[y]) {
            (Cell::App(f, xs), Cell::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Some((f.clone(), g.clone()));
                }
                work.extend(xs.iter().copied().zip(ys.iter().copied()));
                parent[y] = x;
            }
            (Cell::App(..), _) => parent[y] = x,
            _ => parent[x] = y,
        }
    }
    None
}

/// Answer tuple for `vars` with variables renamed by first occurrence, so
/// that variants compare equal.
pub fn canonical_answer(vars: &[Var], s: &Substitution) -> Term {
    let tuple = Term::app(
        "ans",
        vars.iter().map(|v| Term::var(v.clone()).apply(s)).collect(),
    );
    let mut names: HashMap<Var, Var> = HashMap::new();
    for n in tuple.nodes() {
        if let cosres::term::Node::Var(v) = n {
            let next = Var::new(format!("V{}", names.len()));
            names.entry(v.clone()).or_insert(next);
        }
    }
    tuple.map_vars(|v| names[v].clone())
}

/// Keeps the most general answers, one per variant class.
pub fn most_general(answers: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for a in answers {
        let strictly_more_general = |b: &Term| {
            // a and b use the same canonical names; rename b apart first
            let b = b.map_vars(|v| Var::new(format!("{v}'")));
            match_term(&b, a).is_some() && match_term(a, &b).is_none()
        };
        if answers.iter().any(strictly_more_general) {
            continue;
        }
        if !out.iter().any(|o| o == a) {
            out.push(a.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Generators

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Gen {
    pub rng: ChaCha8Rng,
}

/// Predicates with fixed arities.
pub const PREDICATES: [(&str, usize); 3] = [("p", 1), ("q", 1), ("r", 2)];

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: rng(seed) }
    }

    /// Finite term of function depth at most `depth` over `s/1`, `f/2`,
    /// `a`, `b` and the given variables.
    pub fn term(&mut self, depth: usize, vars: &[&str]) -> Term {
        let roll: u32 = self.rng.gen_range(0..100);
        if depth == 0 || roll < 50 {
            if !vars.is_empty() && self.rng.gen_bool(0.6) {
                return Term::var(Var::parse(vars.choose(&mut self.rng).unwrap()));
            }
            return Term::constant(if self.rng.gen_bool(0.5) { "a" } else { "b" });
        }
        if roll < 75 {
            Term::app("s", vec![self.term(depth - 1, vars)])
        } else {
            Term::app(
                "f",
                vec![self.term(depth - 1, vars), self.term(depth - 1, vars)],
            )
        }
    }

    pub fn atom(&mut self, depth: usize, vars: &[&str]) -> Term {
        let (name, arity) = *PREDICATES.choose(&mut self.rng).unwrap();
        self.atom_of(name, arity, depth, vars)
    }

    pub fn atom_of(&mut self, name: &str, arity: usize, depth: usize, vars: &[&str]) -> Term {
        Term::app(name, (0..arity).map(|_| self.term(depth, vars)).collect())
    }

    /// At most four clauses over `p/1`, `q/1`, `r/2`, bodies of up to two
    /// atoms, function depth at most two.
    pub fn program(&mut self) -> Program {
        let vars = ["X", "Y", "Z"];
        let n = self.rng.gen_range(1..=4);
        let clauses = (0..n)
            .map(|_| {
                let head = self.atom(2, &vars);
                let body_len = self.rng.gen_range(0..=2);
                let body = (0..body_len).map(|_| self.atom(1, &vars)).collect();
                (head, body)
            })
            .collect();
        Program::new(clauses)
    }

    pub fn query(&mut self) -> Vec<Term> {
        let n = self.rng.gen_range(1..=2);
        (0..n).map(|_| self.atom(1, &["A", "B"])).collect()
    }

    /// A rational term given as a random graph of up to `size` nodes,
    /// cycles allowed.
    pub fn rational(&mut self, size: usize, vars: &[&str]) -> Term {
        let n = self.rng.gen_range(1..=size);
        let mut b = TermBuilder::new();
        let ids: Vec<usize> = (0..n).map(|_| b.reserve()).collect();
        for &id in &ids {
            let roll: u32 = self.rng.gen_range(0..100);
            if roll < 25 && !vars.is_empty() {
                let v = b.var(Var::parse(vars.choose(&mut self.rng).unwrap()));
                b.define_app(id, "g", vec![v]);
            } else if roll < 40 {
                b.define_app(id, if roll < 32 { "a" } else { "b" }, vec![]);
            } else if roll < 70 {
                let c = self.child(&ids, vars, &mut b);
                b.define_app(id, "s", vec![c]);
            } else {
                let c1 = self.child(&ids, vars, &mut b);
                let c2 = self.child(&ids, vars, &mut b);
                b.define_app(id, "f", vec![c1, c2]);
            }
        }
        b.build(ids[0]).expect("every node defined")
    }

    fn child(&mut self, ids: &[usize], vars: &[&str], b: &mut TermBuilder) -> usize {
        if !vars.is_empty() && self.rng.gen_bool(0.35) {
            b.var(Var::parse(vars.choose(&mut self.rng).unwrap()))
        } else {
            *ids.choose(&mut self.rng).unwrap()
        }
    }

    /// A solved substitution binding a random part of `candidates`. Range
    /// terms use the unbound candidates and `extra`.
    pub fn substitution(&mut self, candidates: &BTreeSet<Var>, extra: &[&str]) -> Substitution {
        let domain: Vec<Var> = candidates
            .iter()
            .filter(|_| self.rng.gen_bool(0.6))
            .cloned()
            .collect();
        let free: Vec<String> = candidates
            .iter()
            .filter(|v| !domain.contains(v))
            .map(|v| v.to_string())
            .chain(extra.iter().map(|s| s.to_string()))
            .collect();
        let free: Vec<&str> = free.iter().map(String::as_str).collect();
        let pairs: Vec<(Var, Term)> = domain
            .into_iter()
            .map(|v| {
                let t = if self.rng.gen_bool(0.2) {
                    self.rational(3, &free)
                } else {
                    self.term(2, &free)
                };
                (v, t)
            })
            .collect();
        Substitution::from_bindings(pairs).expect("ranges avoid the domain")
    }

    /// Non-recursive program in three layers; every derivation is finite.
    pub fn layered_program(&mut self) -> (Program, Vec<(&'static str, usize)>) {
        let layers: [&[(&str, usize)]; 3] = [
            &[("e", 1), ("d", 2)],
            &[("m", 1), ("n", 2)],
            &[("top", 1), ("pair", 2)],
        ];
        let vars = ["X", "Y", "Z"];
        let mut clauses = Vec::new();
        for (level, preds) in layers.iter().enumerate() {
            for &(name, arity) in preds.iter() {
                let count = self.rng.gen_range(1..=3);
                for _ in 0..count {
                    let head = self.atom_of(name, arity, 2, &vars);
                    let body = if level == 0 {
                        Vec::new()
                    } else {
                        let len = self.rng.gen_range(0..=2);
                        (0..len)
                            .map(|_| {
                                let lower = self.rng.gen_range(0..level);
                                let &(b, ar) = layers[lower].choose(&mut self.rng).unwrap();
                                self.atom_of(b, ar, 1, &vars)
                            })
                            .collect()
                    };
                    clauses.push((head, body));
                }
            }
        }
        (Program::new(clauses), layers[2].to_vec())
    }
}

/// Goal items over random atoms with random hypothesis sets.
pub fn random_goal(g: &mut Gen, len: usize, vars: &[&str]) -> Goal {
    Goal::new(
        (0..len)
            .map(|_| {
                let atom = g.atom(2, vars);
                let hyps = (0..g.rng.gen_range(0..=2))
                    .map(|_| g.atom(2, vars))
                    .collect();
                GoalItem::with_hypotheses(atom, hyps)
            })
            .collect(),
    )
}
