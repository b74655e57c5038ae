//! Rational-tree unification (no occurs check), one-way matching, and the
//! equation-system pipeline (`reduce`, then `solve`).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::subst::Substitution;
use crate::term::{Node, Term, UnionFind, Var};

/// The two terms denote different trees under every substitution.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot unify {}/{} with {}/{} at argument path {path:?}", left.0, left.1, right.0, right.1)]
pub struct ClashError {
    pub left: (Arc<str>, usize),
    pub right: (Arc<str>, usize),
    /// Argument positions leading from the roots to the clash, as far as the
    /// clash was reached by descending from the roots.
    pub path: Vec<usize>,
}

/// Most general unifier of two rational terms.
///
/// Both graphs are placed in one arena and node classes are merged with a
/// union-find. A class holding only variables keeps one of them free,
/// preferring a variable of `b`; every other variable is bound.
pub fn unify(a: &Term, b: &Term) -> Result<Substitution, ClashError> {
    let offset = a.len();
    let arena: Vec<&Node> = a.nodes().iter().chain(b.nodes()).collect();
    let child = |i: usize, j: usize| -> usize {
        let c = arena[i].children()[j];
        if i < offset {
            c
        } else {
            c + offset
        }
    };
    let mut uf = UnionFind::new(arena.len());
    // compound node carried by each class root
    let mut structure: Vec<Option<usize>> = arena
        .iter()
        .enumerate()
        .map(|(i, n)| matches!(n, Node::App { .. }).then_some(i))
        .collect();

    let mut first_node: HashMap<&Var, usize> = HashMap::new();
    for (i, n) in arena.iter().enumerate() {
        if let Node::Var(v) = n {
            match first_node.get(v) {
                Some(&j) => {
                    uf.union(j, i);
                }
                None => {
                    first_node.insert(v, i);
                }
            }
        }
    }

    let mut work: Vec<(usize, usize, Vec<usize>)> = vec![(0, offset, Vec::new())];
    while let Some((x, y, path)) = work.pop() {
        let (rx, ry) = (uf.find(x), uf.find(y));
        if rx == ry {
            continue;
        }
        match (structure[rx], structure[ry]) {
            (Some(sx), Some(sy)) => {
                let (
                    Node::App {
                        functor: f,
                        args: fa,
                    },
                    Node::App {
                        functor: g,
                        args: ga,
                    },
                ) = (arena[sx], arena[sy])
                else {
                    unreachable!("structure nodes are compound")
                };
                if f != g || fa.len() != ga.len() {
                    return Err(ClashError {
                        left: (f.clone(), fa.len()),
                        right: (g.clone(), ga.len()),
                        path,
                    });
                }
                let r = uf.union(rx, ry);
                structure[r] = Some(sx);
                for j in 0..fa.len() {
                    let mut p = path.clone();
                    p.push(j);
                    work.push((child(sx, j), child(sy, j), p));
                }
            }
            (sx, sy) => {
                let r = uf.union(rx, ry);
                structure[r] = sx.or(sy);
            }
        }
    }

    // Free representative of each variable-only class: first variable of `b`,
    // otherwise first of `a`.
    let mut free_rep: HashMap<usize, &Var> = HashMap::new();
    for i in (offset..arena.len()).chain(0..offset) {
        if let Node::Var(v) = arena[i] {
            let r = uf.find(i);
            if structure[r].is_none() {
                free_rep.entry(r).or_insert(v);
            }
        }
    }

    let mut bindings = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (i, n) in arena.iter().enumerate() {
        let Node::Var(v) = n else { continue };
        if !seen.insert(v) {
            continue;
        }
        let r = uf.find(i);
        match structure[r] {
            Some(_) => {
                bindings.insert(
                    v.clone(),
                    extract(&arena, offset, &mut uf, &structure, &free_rep, r),
                );
            }
            None => {
                let rep = free_rep[&r];
                if rep != v {
                    bindings.insert(v.clone(), Term::var(rep.clone()));
                }
            }
        }
    }
    Ok(Substitution::from_solved(bindings))
}

/// Reads the term denoted by class `root` out of the unification arena.
fn extract(
    arena: &[&Node],
    offset: usize,
    uf: &mut UnionFind,
    structure: &[Option<usize>],
    free_rep: &HashMap<usize, &Var>,
    root: usize,
) -> Term {
    let mut out: Vec<Node> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut pending = vec![root];
    index.insert(root, 0);
    out.push(Node::Var(Var::new("")));
    while let Some(class) = pending.pop() {
        let slot = index[&class];
        out[slot] = match structure[class] {
            None => Node::Var(free_rep[&class].clone()),
            Some(s) => {
                let Node::App { functor, args } = arena[s] else {
                    unreachable!()
                };
                let shift = if s < offset { 0 } else { offset };
                let mut kids = Vec::with_capacity(args.len());
                for &c in args.iter() {
                    let cr = uf.find(c + shift);
                    let id = *index.entry(cr).or_insert_with(|| {
                        out.push(Node::Var(Var::new("")));
                        pending.push(cr);
                        out.len() - 1
                    });
                    kids.push(id);
                }
                Node::App {
                    functor: functor.clone(),
                    args: kids.into_boxed_slice(),
                }
            }
        };
    }
    Term::from_nodes(out, 0, true)
}

/// One-way matching: `σ` with `a.apply(σ) == b`, binding only variables of
/// `a`. Returns `None` when `a` does not subsume `b`.
///
/// Variables of `a` that also occur in `b` can only be matched to
/// themselves, since a solved `σ` never leaves a domain variable in `b`.
pub fn match_term(a: &Term, b: &Term) -> Option<Substitution> {
    let b = b.minimize();
    let b_vars = b.vars();
    let mut assigned: HashMap<&Var, usize> = HashMap::new();
    let mut visited: HashSet<(usize, usize)> = HashSet::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((x, y)) = stack.pop() {
        if !visited.insert((x, y)) {
            continue;
        }
        match a.node(x) {
            Node::Var(v) => {
                if b_vars.contains(v) {
                    if !matches!(b.node(y), Node::Var(w) if w == v) {
                        return None;
                    }
                } else {
                    // minimal graph: equal subterms share a node
                    match assigned.get(v) {
                        Some(&m) if m != y => return None,
                        Some(_) => {}
                        None => {
                            assigned.insert(v, y);
                        }
                    }
                }
            }
            Node::App { functor, args } => match b.node(y) {
                Node::App {
                    functor: g,
                    args: bargs,
                } if functor == g && args.len() == bargs.len() => {
                    stack.extend(args.iter().copied().zip(bargs.iter().copied()));
                }
                _ => return None,
            },
        }
    }
    let bindings = assigned
        .into_iter()
        .map(|(v, y)| (v.clone(), b.subterm(y)))
        .collect();
    Some(Substitution::from_solved(bindings))
}

/// True when `a` subsumes `b` (`a ≺ b`).
pub fn subsumes(a: &Term, b: &Term) -> bool {
    match_term(a, b).is_some()
}

/// A system of term equations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquationSystem {
    pub equations: Vec<(Term, Term)>,
}

impl EquationSystem {
    pub fn new(equations: Vec<(Term, Term)>) -> EquationSystem {
        EquationSystem { equations }
    }

    /// Reduced form: every left-hand side is a variable, and no variable is
    /// the left-hand side of two equations.
    pub fn is_reduced(&self) -> bool {
        let mut lhs = HashSet::new();
        self.equations
            .iter()
            .all(|(l, _)| l.as_var().is_some_and(|v| lhs.insert(v.clone())))
    }

    /// Transforms the system to reduced form over rational trees.
    ///
    /// Rules: drop `X = X`, orient `t = X` to `X = t`, decompose
    /// `f(s..) = f(t..)` (each compound pair once, so cyclic terms terminate),
    /// and merge two equations for the same variable into one plus an
    /// equation between their right-hand sides. Variable-to-variable
    /// equations are chased so no cycle of variables is created.
    pub fn reduce(&self) -> Result<EquationSystem, ClashError> {
        let mut store: Vec<(Var, Term)> = Vec::new();
        let mut slot: HashMap<Var, usize> = HashMap::new();
        let mut decomposed: HashSet<(Term, Term)> = HashSet::new();
        let mut work: Vec<(Term, Term)> = self.equations.iter().rev().cloned().collect();

        let chase = |store: &Vec<(Var, Term)>, slot: &HashMap<Var, usize>, mut v: Var| -> Var {
            while let Some(&i) = slot.get(&v) {
                match store[i].1.as_var() {
                    Some(w) => v = w.clone(),
                    None => break,
                }
            }
            v
        };

        while let Some((s, t)) = work.pop() {
            match (s.as_var().cloned(), t.as_var().cloned()) {
                (Some(x), Some(y)) => {
                    let x = chase(&store, &slot, x);
                    let y = chase(&store, &slot, y);
                    if x == y {
                        continue;
                    }
                    match (slot.get(&x).copied(), slot.get(&y).copied()) {
                        (None, _) => {
                            slot.insert(x.clone(), store.len());
                            store.push((x, Term::var(y)));
                        }
                        (Some(_), None) => {
                            slot.insert(y.clone(), store.len());
                            store.push((y, Term::var(x)));
                        }
                        (Some(i), Some(j)) => {
                            work.push((store[i].1.clone(), store[j].1.clone()));
                            store[j].1 = Term::var(x);
                        }
                    }
                }
                (Some(x), None) => {
                    let x = chase(&store, &slot, x);
                    match slot.get(&x) {
                        None => {
                            slot.insert(x.clone(), store.len());
                            store.push((x, t));
                        }
                        Some(&i) => work.push((store[i].1.clone(), t)),
                    }
                }
                (None, Some(_)) => work.push((t, s)),
                (None, None) => {
                    let (f, fa) = s.functor().expect("compound");
                    let (g, ga) = t.functor().expect("compound");
                    if f != g || fa != ga {
                        return Err(ClashError {
                            left: (f.into(), fa),
                            right: (g.into(), ga),
                            path: Vec::new(),
                        });
                    }
                    if decomposed.insert((s.clone(), t.clone())) {
                        for pair in s.args().into_iter().zip(t.args()).rev() {
                            work.push(pair);
                        }
                    }
                }
            }
        }
        Ok(EquationSystem {
            equations: store.into_iter().map(|(v, t)| (Term::var(v), t)).collect(),
        })
    }

    /// Solves a reduced system over rational trees. Cyclic equations give
    /// cyclic graphs. Returns `None` if the system is not reduced.
    pub fn solve(&self) -> Option<Substitution> {
        if !self.is_reduced() {
            return None;
        }
        // All right-hand sides in one arena; variable nodes naming a
        // left-hand side are aliases of that equation's root.
        let mut arena: Vec<Node> = Vec::new();
        let mut root_of: HashMap<Var, usize> = HashMap::new();
        let mut order = Vec::new();
        for (l, r) in &self.equations {
            let v = l.as_var().expect("reduced").clone();
            let off = arena.len();
            for n in r.nodes() {
                arena.push(match n {
                    Node::Var(v) => Node::Var(v.clone()),
                    Node::App { functor, args } => Node::App {
                        functor: functor.clone(),
                        args: args.iter().map(|&c| c + off).collect(),
                    },
                });
            }
            root_of.insert(v.clone(), off);
            order.push(v);
        }

        // Resolve alias chains; a pure variable cycle keeps its least
        // variable free.
        let mut resolved: HashMap<usize, usize> = HashMap::new();
        let mut free_in_cycle: HashSet<Var> = HashSet::new();
        for start in 0..arena.len() {
            let mut path = Vec::new();
            let mut cur = start;
            let end = loop {
                if let Some(&r) = resolved.get(&cur) {
                    break r;
                }
                match &arena[cur] {
                    Node::Var(v) if root_of.contains_key(v) && !free_in_cycle.contains(v) => {
                        if path.contains(&cur) {
                            let cycle_vars: Vec<&Var> = path
                                .iter()
                                .skip_while(|&&p| p != cur)
                                .filter_map(|&p| match &arena[p] {
                                    Node::Var(v) => Some(v),
                                    _ => None,
                                })
                                .collect();
                            let least =
                                (*cycle_vars.iter().min().expect("non-empty cycle")).clone();
                            free_in_cycle.insert(least);
                            path.clear();
                            cur = start;
                            continue;
                        }
                        path.push(cur);
                        cur = root_of[v];
                    }
                    _ => break cur,
                }
            };
            for p in path {
                resolved.insert(p, end);
            }
            resolved.insert(start, end);
        }

        let mut bindings = BTreeMap::new();
        for v in order {
            if free_in_cycle.contains(&v) {
                continue;
            }
            let root = resolved[&root_of[&v]];
            let nodes: Vec<Node> = arena
                .iter()
                .map(|n| match n {
                    Node::Var(v) => Node::Var(v.clone()),
                    Node::App { functor, args } => Node::App {
                        functor: functor.clone(),
                        args: args.iter().map(|c| resolved[c]).collect(),
                    },
                })
                .collect();
            bindings.insert(v, Term::from_nodes(nodes, root, true));
        }
        Some(Substitution::from_solved(bindings))
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, r)) in self.equations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} = {r}")?;
        }
        f.write_str("}")
    }
}
