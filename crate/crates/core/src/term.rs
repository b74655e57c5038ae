//! Rational terms stored as finite, possibly cyclic, term graphs.
//!
//! A [`Term`] is an immutable node table whose node `0` is the root. Children
//! are node indices, so back-edges give cycles and a finite table denotes a
//! possibly infinite tree with finitely many distinct subtrees. Two terms are
//! equal when their rooted graphs are bisimilar, i.e. they unfold to the same
//! tree.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// A logic variable, identified by its name and the renaming generation.
///
/// Generation `0` is a variable as written in source text. Renamed clause
/// variables carry the generation of the renaming and print as `Name_gen`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Arc<str>,
    generation: u32,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>) -> Var {
        Var {
            name: name.into(),
            generation: 0,
        }
    }

    pub fn with_generation(name: impl Into<Arc<str>>, generation: u32) -> Var {
        Var {
            name: name.into(),
            generation,
        }
    }

    /// Reads the printed form back: a trailing `_N` with `N > 0` and no
    /// leading zero is the generation.
    pub fn parse(text: &str) -> Var {
        if let Some(pos) = text.rfind('_') {
            let (prefix, suffix) = (&text[..pos], &text[pos + 1..]);
            if !prefix.is_empty()
                && !suffix.is_empty()
                && !suffix.starts_with('0')
                && suffix.bytes().all(|b| b.is_ascii_digit())
            {
                if let Ok(generation) = suffix.parse::<u32>() {
                    return Var::with_generation(prefix, generation);
                }
            }
        }
        Var::new(text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    /// The variant of this variable used by a renaming at `generation`.
    ///
    /// The whole printed name is kept, so `X` and `X_1` stay apart after
    /// renaming (`X_5` and `X_1_5`).
    pub fn renamed(&self, generation: u32) -> Var {
        Var::with_generation(self.to_string(), generation)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generation == 0 {
            f.write_str(&self.name)
        } else {
            write!(f, "{}_{}", self.name, self.generation)
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One node of a term graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(Var),
    App {
        functor: Arc<str>,
        args: Box<[usize]>,
    },
}

impl Node {
    pub fn children(&self) -> &[usize] {
        match self {
            Node::Var(_) => &[],
            Node::App { args, .. } => args,
        }
    }

    fn same_label(&self, other: &Node) -> bool {
        match (self, other) {
            (Node::Var(a), Node::Var(b)) => a == b,
            (
                Node::App {
                    functor: f,
                    args: a,
                },
                Node::App {
                    functor: g,
                    args: b,
                },
            ) => f == g && a.len() == b.len(),
            _ => false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("node {0} was reserved but never defined")]
    Undefined(usize),
    #[error("node {node} refers to missing child {child}")]
    DanglingChild { node: usize, child: usize },
    #[error("root {0} is not a node of the graph")]
    BadRoot(usize),
}

/// A rational term: a rooted finite graph, root at node `0`.
#[derive(Clone)]
pub struct Term {
    nodes: Arc<[Node]>,
    // Set when the graph is bisimulation-minimal and numbered in depth-first
    // order, which makes the node table a canonical form.
    minimal: bool,
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term {
            nodes: Arc::from(vec![Node::Var(v)]),
            minimal: true,
        }
    }

    pub fn constant(name: impl Into<Arc<str>>) -> Term {
        Term::app(name, Vec::new())
    }

    /// `functor(args...)`; the result is minimized.
    pub fn app(functor: impl Into<Arc<str>>, args: Vec<Term>) -> Term {
        let mut nodes = Vec::with_capacity(1 + args.iter().map(|a| a.len()).sum::<usize>());
        nodes.push(Node::Var(Var::new("")));
        let mut offsets = Vec::with_capacity(args.len());
        for arg in &args {
            let off = nodes.len();
            offsets.push(off);
            nodes.extend(arg.nodes.iter().map(|n| shift(n, off)));
        }
        nodes[0] = Node::App {
            functor: functor.into(),
            args: offsets.into_boxed_slice(),
        };
        Term::from_nodes(nodes, 0, true)
    }

    /// The fixed point `mu var. body`: occurrences of `var` in `body` become
    /// back-edges to the root. Returns `None` for the non-contractive `mu X. X`.
    pub fn mu(var: &Var, body: &Term) -> Option<Term> {
        if body.as_var() == Some(var) {
            return None;
        }
        let nodes: Vec<Node> = body
            .nodes
            .iter()
            .map(|n| match n {
                Node::App { functor, args } => Node::App {
                    functor: functor.clone(),
                    args: args
                        .iter()
                        .map(|&c| match &body.nodes[c] {
                            Node::Var(v) if v == var => 0,
                            _ => c,
                        })
                        .collect(),
                },
                other => other.clone(),
            })
            .collect();
        Some(Term::from_nodes(nodes, 0, true))
    }

    /// Builds a term from an arbitrary node table. Nodes unreachable from
    /// `root` are dropped; the graph is minimized when `minimize` is set.
    pub(crate) fn from_nodes(nodes: Vec<Node>, root: usize, minimize: bool) -> Term {
        let raw = compact(&nodes, root);
        if minimize {
            canonicalize(&raw)
        } else {
            Term {
                nodes: Arc::from(raw),
                minimal: false,
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self.root() {
            Node::Var(v) => Some(v),
            Node::App { .. } => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.as_var().is_some()
    }

    /// Functor name and arity of the root, `None` for a variable.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self.root() {
            Node::Var(_) => None,
            Node::App { functor, args } => Some((functor, args.len())),
        }
    }

    pub fn args(&self) -> Vec<Term> {
        self.root()
            .children()
            .iter()
            .map(|&c| self.subterm(c))
            .collect()
    }

    /// The term rooted at node `id`.
    pub fn subterm(&self, id: usize) -> Term {
        if id == 0 {
            return self.clone();
        }
        let nodes = compact(&self.nodes, id);
        if self.minimal {
            // Sub-graphs of a minimal graph are minimal; only renumbering is needed.
            canonicalize_minimal(&nodes)
        } else {
            Term {
                nodes: Arc::from(nodes),
                minimal: false,
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, Node::Var(w) if w == v))
    }

    pub fn is_ground(&self) -> bool {
        self.nodes.iter().all(|n| !matches!(n, Node::Var(_)))
    }

    /// True when the graph has no cycle, i.e. the denoted tree is finite.
    pub fn is_finite(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        let mut stack = vec![(0usize, 0usize)];
        state[0] = 1;
        while let Some(&mut (n, ref mut next)) = stack.last_mut() {
            let children = self.nodes[n].children();
            if *next < children.len() {
                let c = children[*next];
                *next += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                state[n] = 2;
                stack.pop();
            }
        }
        true
    }

    pub fn max_generation(&self) -> u32 {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(v) => Some(v.generation()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Replaces every variable by `f(var)`.
    pub fn map_vars(&self, mut f: impl FnMut(&Var) -> Var) -> Term {
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Var(v) => Node::Var(f(v)),
                other => other.clone(),
            })
            .collect();
        Term::from_nodes(nodes, 0, true)
    }

    /// Bisimulation-minimal form with canonical depth-first numbering.
    pub fn minimize(&self) -> Term {
        if self.minimal {
            self.clone()
        } else {
            canonicalize(&self.nodes)
        }
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// The depth-`depth` truncation of the denoted tree.
    ///
    /// Compound subterms that would start at depth `depth` are replaced by
    /// [`FiniteTree::Bottom`]; constants and variables are kept at every
    /// depth, so `unfold(a, 0)` is `a`.
    pub fn unfold(&self, depth: usize) -> FiniteTree {
        self.unfold_node(0, depth)
    }

    fn unfold_node(&self, id: usize, depth: usize) -> FiniteTree {
        match &self.nodes[id] {
            Node::Var(v) => FiniteTree::Var(v.clone()),
            Node::App { functor, args } if args.is_empty() => {
                FiniteTree::App(functor.clone(), Vec::new())
            }
            Node::App { .. } if depth == 0 => FiniteTree::Bottom,
            Node::App { functor, args } => FiniteTree::App(
                functor.clone(),
                args.iter()
                    .map(|&c| self.unfold_node(c, depth - 1))
                    .collect(),
            ),
        }
    }

    /// Pairwise non-bisimilar subterms, root first.
    pub fn distinct_subterms(&self) -> Vec<Term> {
        let min = self.minimize();
        (0..min.len()).map(|i| min.subterm(i)).collect()
    }
}

/// Equality of the denoted trees, decided by a bisimulation check on the two
/// rooted graphs (union-find over node pairs).
pub fn term_equal(a: &Term, b: &Term) -> bool {
    let offset = a.len();
    let mut uf = UnionFind::new(offset + b.len());
    let node = |i: usize| -> &Node {
        if i < offset {
            &a.nodes[i]
        } else {
            &b.nodes[i - offset]
        }
    };
    let mut work = vec![(0usize, offset)];
    while let Some((x, y)) = work.pop() {
        let (rx, ry) = (uf.find(x), uf.find(y));
        if rx == ry {
            continue;
        }
        let (nx, ny) = (node(x), node(y));
        if !nx.same_label(ny) {
            return false;
        }
        uf.union(rx, ry);
        let shift_y = if y < offset { 0 } else { offset };
        let shift_x = if x < offset { 0 } else { offset };
        for (&cx, &cy) in nx.children().iter().zip(ny.children()) {
            work.push((cx + shift_x, cy + shift_y));
        }
    }
    true
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if self.minimal && other.minimal {
            self.nodes == other.nodes
        } else {
            term_equal(self, other)
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if self.minimal {
            self.nodes.hash(state)
        } else {
            self.minimize().nodes.hash(state)
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite tree, the result of [`Term::unfold`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FiniteTree {
    Var(Var),
    App(Arc<str>, Vec<FiniteTree>),
    /// Truncation marker; not a program symbol.
    Bottom,
}

impl FiniteTree {
    /// Truncates at `depth` using the same convention as [`Term::unfold`].
    pub fn truncate(&self, depth: usize) -> FiniteTree {
        match self {
            FiniteTree::App(f, args) if !args.is_empty() => {
                if depth == 0 {
                    FiniteTree::Bottom
                } else {
                    FiniteTree::App(
                        f.clone(),
                        args.iter().map(|a| a.truncate(depth - 1)).collect(),
                    )
                }
            }
            other => other.clone(),
        }
    }
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteTree::Var(v) => write!(f, "{v}"),
            FiniteTree::Bottom => f.write_str("⊥"),
            FiniteTree::App(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Incremental construction of term graphs with explicit cycles.
///
/// ```
/// use cosres::term::{TermBuilder, Var};
/// let mut b = TermBuilder::new();
/// let root = b.reserve();
/// b.define_app(root, "s", vec![root]);
/// let t = b.build(root).unwrap();
/// assert_eq!(t.to_string(), "mu _M0. s(_M0)");
/// ```
#[derive(Default)]
pub struct TermBuilder {
    nodes: Vec<Option<Node>>,
}

impl TermBuilder {
    pub fn new() -> TermBuilder {
        TermBuilder::default()
    }

    pub fn var(&mut self, v: Var) -> usize {
        self.nodes.push(Some(Node::Var(v)));
        self.nodes.len() - 1
    }

    pub fn app(&mut self, functor: impl Into<Arc<str>>, args: Vec<usize>) -> usize {
        self.nodes.push(Some(Node::App {
            functor: functor.into(),
            args: args.into_boxed_slice(),
        }));
        self.nodes.len() - 1
    }

    /// A placeholder node to be defined later, for back-edges.
    pub fn reserve(&mut self) -> usize {
        self.nodes.push(None);
        self.nodes.len() - 1
    }

    pub fn define_app(&mut self, id: usize, functor: impl Into<Arc<str>>, args: Vec<usize>) {
        self.nodes[id] = Some(Node::App {
            functor: functor.into(),
            args: args.into_boxed_slice(),
        });
    }

    /// Embeds an existing term, returning the id of its root.
    pub fn embed(&mut self, t: &Term) -> usize {
        let off = self.nodes.len();
        self.nodes
            .extend(t.nodes.iter().map(|n| Some(shift(n, off))));
        off
    }

    fn finish(self, root: usize) -> Result<Vec<Node>, TermError> {
        if root >= self.nodes.len() {
            return Err(TermError::BadRoot(root));
        }
        let len = self.nodes.len();
        let mut out = Vec::with_capacity(len);
        for (i, n) in self.nodes.into_iter().enumerate() {
            let n = n.ok_or(TermError::Undefined(i))?;
            if let Some(&child) = n.children().iter().find(|&&c| c >= len) {
                return Err(TermError::DanglingChild { node: i, child });
            }
            out.push(n);
        }
        Ok(out)
    }

    /// The minimized term rooted at `root`.
    pub fn build(self, root: usize) -> Result<Term, TermError> {
        Ok(Term::from_nodes(self.finish(root)?, root, true))
    }

    /// The term rooted at `root` without minimization; only unreachable nodes
    /// are dropped.
    pub fn build_raw(self, root: usize) -> Result<Term, TermError> {
        Ok(Term::from_nodes(self.finish(root)?, root, false))
    }
}

fn shift(n: &Node, off: usize) -> Node {
    match n {
        Node::Var(v) => Node::Var(v.clone()),
        Node::App { functor, args } => Node::App {
            functor: functor.clone(),
            args: args.iter().map(|&c| c + off).collect(),
        },
    }
}

/// Nodes reachable from `root`, renumbered in depth-first preorder with the
/// root at `0`.
fn compact(nodes: &[Node], root: usize) -> Vec<Node> {
    let mut index = vec![usize::MAX; nodes.len()];
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if index[n] != usize::MAX {
            continue;
        }
        index[n] = order.len();
        order.push(n);
        for &c in nodes[n].children().iter().rev() {
            if index[c] == usize::MAX {
                stack.push(c);
            }
        }
    }
    order
        .iter()
        .map(|&n| match &nodes[n] {
            Node::Var(v) => Node::Var(v.clone()),
            Node::App { functor, args } => Node::App {
                functor: functor.clone(),
                args: args.iter().map(|&c| index[c]).collect(),
            },
        })
        .collect()
}

/// Partition refinement: nodes start in blocks by label and are split by
/// the blocks of their children until stable.
/// Bisimulation classes of the nodes of a graph.
///
/// Nodes that reach no cycle denote finite trees and are hash-consed bottom
/// up. The remaining nodes are split by partition refinement, with the
/// finite classes held fixed.
fn minimal_blocks(nodes: &[Node]) -> Vec<usize> {
    #[derive(PartialEq, Eq, Hash)]
    enum Label<'a> {
        Var(&'a Var),
        App(&'a str, usize),
    }
    fn label(n: &Node) -> Label<'_> {
        match n {
            Node::Var(v) => Label::Var(v),
            Node::App { functor, args } => Label::App(functor, args.len()),
        }
    }

    // Peel off finite nodes leaves first.
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut pending: Vec<usize> = nodes.iter().map(|n| n.children().len()).collect();
    for (i, n) in nodes.iter().enumerate() {
        for &c in n.children() {
            parents[c].push(i);
        }
    }
    let mut finite: Vec<usize> = (0..nodes.len()).filter(|&i| pending[i] == 0).collect();
    let mut next = 0;
    while next < finite.len() {
        let n = finite[next];
        next += 1;
        for &p in &parents[n] {
            pending[p] -= 1;
            if pending[p] == 0 {
                finite.push(p);
            }
        }
    }

    const UNSET: usize = usize::MAX;
    let mut block = vec![UNSET; nodes.len()];
    let mut shapes: HashMap<(Label<'_>, Vec<usize>), usize> = HashMap::new();
    for &i in &finite {
        let key = (
            label(&nodes[i]),
            nodes[i].children().iter().map(|&c| block[c]).collect(),
        );
        let id = shapes.len();
        block[i] = *shapes.entry(key).or_insert(id);
    }
    let base = shapes.len();
    let infinite: Vec<usize> = (0..nodes.len()).filter(|&i| block[i] == UNSET).collect();
    if infinite.is_empty() {
        return block;
    }

    let mut ids: HashMap<Label<'_>, usize> = HashMap::new();
    for &i in &infinite {
        let id = base + ids.len();
        block[i] = *ids.entry(label(&nodes[i])).or_insert(id);
    }
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let refined: Vec<usize> = infinite
            .iter()
            .map(|&i| {
                let sig = (
                    block[i],
                    nodes[i].children().iter().map(|&c| block[c]).collect(),
                );
                let id = base + sigs.len();
                *sigs.entry(sig).or_insert(id)
            })
            .collect();
        for (&i, b) in infinite.iter().zip(refined) {
            block[i] = b;
        }
        if sigs.len() == count {
            return block;
        }
        count = sigs.len();
    }
}

fn canonicalize(nodes: &[Node]) -> Term {
    let block = minimal_blocks(nodes);
    // One representative node per block; the quotient graph then gets the
    // canonical depth-first numbering from `compact`.
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for (i, &b) in block.iter().enumerate() {
        rep.entry(b).or_insert(i);
    }
    let quotient: Vec<Node> = nodes
        .iter()
        .map(|n| match n {
            Node::Var(v) => Node::Var(v.clone()),
            Node::App { functor, args } => Node::App {
                functor: functor.clone(),
                args: args.iter().map(|&c| rep[&block[c]]).collect(),
            },
        })
        .collect();
    Term {
        nodes: Arc::from(compact(&quotient, rep[&block[0]])),
        minimal: true,
    }
}

fn canonicalize_minimal(compacted: &[Node]) -> Term {
    Term {
        nodes: Arc::from(compacted.to_vec()),
        minimal: true,
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Makes `b`'s root point at `a`'s root; returns the surviving root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
        ra
    }
}

/// Targets of back-edges in a depth-first search from `start`. Every cycle
/// reachable from `start` contains at least one back-edge, so naming these
/// nodes is enough to print any rational term finitely.
pub(crate) fn cycle_entries(t: &Term, start: usize) -> HashSet<usize> {
    let mut out = HashSet::new();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; t.len()];
    let mut stack = vec![(start, 0usize)];
    state[start] = 1;
    while let Some(&mut (n, ref mut next)) = stack.last_mut() {
        let children = t.node(n).children();
        if *next < children.len() {
            let c = children[*next];
            *next += 1;
            match state[c] {
                0 => {
                    state[c] = 1;
                    stack.push((c, 0));
                }
                1 => {
                    out.insert(c);
                }
                _ => {}
            }
        } else {
            state[n] = 2;
            stack.pop();
        }
    }
    out
}
