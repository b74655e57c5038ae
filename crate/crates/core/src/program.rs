//! Definite programs: clauses in source order with a predicate index.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{self, SyntaxError};
use crate::term::{Term, Var};

/// `head :- body.` A fact has an empty body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub id: usize,
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vars = self.head.vars();
        for b in &self.body {
            vars.extend(b.vars());
        }
        vars
    }

    /// A variant whose variables all carry `generation`.
    ///
    /// Generations handed out by one derivation are distinct and above every
    /// generation in the program and query, so two renamings never share a
    /// variable.
    pub fn rename_apart(&self, generation: u32) -> Clause {
        let rename = |v: &Var| v.renamed(generation);
        Clause {
            id: self.id,
            head: self.head.map_vars(rename),
            body: self.body.iter().map(|b| b.map_vars(rename)).collect(),
        }
    }

    pub fn max_generation(&self) -> u32 {
        std::iter::once(&self.head)
            .chain(&self.body)
            .map(Term::max_generation)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// Predicate key: functor name and arity.
pub type Predicate = (Arc<str>, usize);

#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<Predicate, Vec<usize>>,
}

impl Program {
    pub fn new(clauses: Vec<(Term, Vec<Term>)>) -> Program {
        let mut program = Program::default();
        for (head, body) in clauses {
            program.push(head, body);
        }
        program
    }

    fn push(&mut self, head: Term, body: Vec<Term>) {
        let id = self.clauses.len();
        if let Some((name, arity)) = head.functor() {
            self.index.entry((name.into(), arity)).or_default().push(id);
        }
        self.clauses.push(Clause { id, head, body });
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, id: usize) -> Option<&Clause> {
        self.clauses.get(id)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Clauses whose head has the predicate of `atom`, in program order.
    pub fn clauses_for(&self, atom: &Term) -> impl Iterator<Item = &Clause> {
        let ids = atom
            .functor()
            .and_then(|(name, arity)| self.index.get(&(Arc::from(name), arity)))
            .map_or(&[][..], |v| v.as_slice());
        ids.iter().map(|&i| &self.clauses[i])
    }

    pub fn max_generation(&self) -> u32 {
        self.clauses
            .iter()
            .map(Clause::max_generation)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let raw = syntax::parse_clauses(text)?;
    Ok(Program::new(
        raw.into_iter().map(|c| (c.head, c.body)).collect(),
    ))
}

pub use crate::syntax::parse_query;
