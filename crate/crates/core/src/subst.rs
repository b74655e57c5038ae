//! Substitutions in solved form: no domain variable occurs in a range term.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::term::{Node, Term, Var};
use crate::unify::EquationSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("variable {0} is bound twice")]
    Duplicate(Var),
    #[error("domain variable {var} occurs in the binding of {binding}")]
    NotSolved { var: Var, binding: Var },
}

/// A finite mapping from variables to rational terms.
///
/// The empty substitution is the identity `ε`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    /// Validates solved form. Identity bindings `X/X` are dropped.
    pub fn from_bindings(
        bindings: impl IntoIterator<Item = (Var, Term)>,
    ) -> Result<Substitution, SubstError> {
        let mut map = BTreeMap::new();
        for (v, t) in bindings {
            if t.as_var() == Some(&v) {
                continue;
            }
            if map.insert(v.clone(), t).is_some() {
                return Err(SubstError::Duplicate(v));
            }
        }
        for (binding, t) in &map {
            if let Some(var) = t.vars().into_iter().find(|v| map.contains_key(v)) {
                return Err(SubstError::NotSolved {
                    var,
                    binding: binding.clone(),
                });
            }
        }
        Ok(Substitution { bindings: map })
    }

    /// Caller guarantees solved form.
    pub(crate) fn from_solved(bindings: BTreeMap<Var, Term>) -> Substitution {
        let bindings = bindings
            .into_iter()
            .filter(|(v, t)| t.as_var() != Some(v))
            .collect();
        let s = Substitution { bindings };
        debug_assert!(s.is_solved(), "not in solved form: {s}");
        s
    }

    pub fn single(v: Var, t: Term) -> Substitution {
        Substitution::from_bindings([(v, t)]).expect("single binding must not mention its variable")
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.bindings.contains_key(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.bindings.keys().cloned().collect()
    }

    /// Variables occurring in the range terms.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        self.bindings.values().flat_map(|t| t.vars()).collect()
    }

    pub fn is_solved(&self) -> bool {
        self.bindings
            .values()
            .all(|t| t.vars().iter().all(|v| !self.bindings.contains_key(v)))
    }

    /// The bindings for variables in `vars` only.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    /// `self` followed by `other`: `t.apply(&s1.compose(&s2)) == t.apply(&s1).apply(&s2)`.
    ///
    /// The law needs the usual derivation condition that `other` does not
    /// mention variables of `self`'s domain in its range. When that fails no
    /// solved substitution satisfies it; the bindings are then read as a
    /// system of equations and the rational solution is returned.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut out = BTreeMap::new();
        for (x, t) in &self.bindings {
            let t2 = t.apply(other);
            if t2.as_var() != Some(x) {
                out.insert(x.clone(), t2);
            }
        }
        for (y, u) in &other.bindings {
            if !self.bindings.contains_key(y) {
                out.insert(y.clone(), u.clone());
            }
        }
        let candidate = Substitution { bindings: out };
        if candidate.is_solved() {
            return candidate;
        }
        let system = EquationSystem::new(
            candidate
                .bindings
                .into_iter()
                .map(|(v, t)| (Term::var(v), t))
                .collect(),
        );
        system
            .reduce()
            .ok()
            .and_then(|r| r.solve())
            .expect("bindings of variables always reduce without clash")
    }
}

impl Term {
    /// Replaces every occurrence of a domain variable of `s` by its binding.
    pub fn apply(&self, s: &Substitution) -> Term {
        let hit = |n: &Node| matches!(n, Node::Var(v) if s.contains(v));
        if s.is_empty() || !self.nodes().iter().any(hit) {
            return self.clone();
        }
        let nodes = self.nodes();
        let mut target = vec![usize::MAX; nodes.len()];
        let mut kept = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if !hit(n) {
                target[i] = kept.len();
                kept.push(i);
            }
        }
        // Each bound variable's term is embedded once after the kept nodes.
        let mut next = kept.len();
        let mut embedded: HashMap<&Var, usize> = HashMap::new();
        let mut tails: Vec<(usize, &Term)> = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Var(v) = n {
                if let Some(b) = s.get(v) {
                    let off = *embedded.entry(v).or_insert_with(|| {
                        let off = next;
                        next += b.len();
                        tails.push((off, b));
                        off
                    });
                    target[i] = off;
                }
            }
        }
        let mut out = Vec::with_capacity(next);
        for &i in &kept {
            out.push(match &nodes[i] {
                Node::Var(v) => Node::Var(v.clone()),
                Node::App { functor, args } => Node::App {
                    functor: functor.clone(),
                    args: args.iter().map(|&c| target[c]).collect(),
                },
            });
        }
        for (off, b) in tails {
            for n in b.nodes() {
                out.push(match n {
                    Node::Var(v) => Node::Var(v.clone()),
                    Node::App { functor, args } => Node::App {
                        functor: functor.clone(),
                        args: args.iter().map(|&c| c + off).collect(),
                    },
                });
            }
        }
        Term::from_nodes(out, target[0], true)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", crate::syntax::Binding::new(v, t))?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
