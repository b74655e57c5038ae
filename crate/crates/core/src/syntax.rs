//! Textual syntax for terms, clauses, queries, equations and goals.
//!
//! ```text
//! term     ::= VAR | IDENT [ "(" term { "," term } ")" ] | "mu" VAR "." term
//! clause   ::= term [ ":-" term { "," term } ] "."
//! equation ::= VAR "=" term
//! goal     ::= item { "," item }          item ::= "(" term "," "{" [ term { "," term } ] "}" ")"
//! ```
//!
//! Identifiers start with a lowercase letter or a digit; variables with an
//! uppercase letter or `_`. A hyphen inside an identifier is read as `_`.
//! `%` starts a line comment. Cyclic terms print in `mu` notation, and
//! bindings print as recursive equations such as `X = s(X)`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::subst::Substitution;
use crate::term::{cycle_entries, Node, Term, Var};
use crate::unify::EquationSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Neck,
    Eq,
    Query,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Query => f.write_str("`?-`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| SyntaxError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            ':' if chars.get(i + 1) == Some(&'-') => push(Tok::Neck, 2, &mut i, &mut col),
            '?' if chars.get(i + 1) == Some(&'-') => push(Tok::Query, 2, &mut i, &mut col),
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                let mut word = String::new();
                while i < chars.len() {
                    let d = chars[i];
                    if d.is_alphanumeric() || d == '_' {
                        word.push(d);
                    } else if d == '-'
                        && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
                        && !word.is_empty()
                    {
                        word.push('_');
                    } else {
                        break;
                    }
                    i += 1;
                }
                col += i - start;
                let first = word.chars().next().expect("non-empty word");
                let tok = if first.is_uppercase() || first == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    column: c0,
                });
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

/// Variable name given to the `n`-th anonymous `_` of a clause or query.
fn anonymous(n: u32) -> Var {
    Var::with_generation("_", n)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    anon: u32,
    // active `mu` binders, innermost last
    binders: Vec<(String, Var)>,
    binder_count: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, SyntaxError> {
        let toks = lex(text)?;
        let lines = text.split('\n').count().max(1);
        let last_col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            toks,
            pos: 0,
            end: (lines, last_col),
            anon: 0,
            binders: Vec::new(),
            binder_count: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.column));
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Var(name)) => {
                self.pos += 1;
                if name == "_" {
                    self.anon += 1;
                    return Ok(Term::var(anonymous(self.anon)));
                }
                if let Some((_, v)) = self.binders.iter().rev().find(|(n, _)| *n == name) {
                    return Ok(Term::var(v.clone()));
                }
                Ok(Term::var(Var::parse(&name)))
            }
            Some(Tok::Ident(name))
                if name == "mu" && matches!(self.peek_at(1), Some(Tok::Var(_))) =>
            {
                self.pos += 1;
                let Some(Tok::Var(bound)) = self.peek().cloned() else {
                    unreachable!()
                };
                self.pos += 1;
                self.expect(Tok::Dot, "`.` after the `mu` binder")?;
                self.binder_count += 1;
                // not lexable, so never clashes with a program variable
                let placeholder = Var::with_generation("μ", self.binder_count);
                self.binders.push((bound.clone(), placeholder.clone()));
                let at = self.pos;
                let body = self.term();
                self.binders.pop();
                let body = body?;
                Term::mu(&placeholder, &body).ok_or_else(|| {
                    let s = &self.toks[at];
                    SyntaxError {
                        line: s.line,
                        column: s.column,
                        message: format!("`mu {bound}. {bound}` does not denote a term"),
                    }
                })
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RParen, "`,` or `)`")?;
                        break;
                    }
                }
                Ok(Term::app(name, args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let at = self.pos;
        let t = self.term()?;
        if t.is_var() {
            self.pos = at;
            return Err(self.error("a variable cannot be used as an atom"));
        }
        Ok(t)
    }

    fn atoms(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut out = vec![self.atom()?];
        while self.eat(&Tok::Comma) {
            out.push(self.atom()?);
        }
        Ok(out)
    }
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

/// A parsed clause before it is numbered into a program.
pub(crate) struct RawClause {
    pub head: Term,
    pub body: Vec<Term>,
}

pub(crate) fn parse_clauses(text: &str) -> Result<Vec<RawClause>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at_end() {
        p.anon = 0;
        let head = p.atom()?;
        let body = if p.eat(&Tok::Neck) {
            p.atoms()?
        } else {
            Vec::new()
        };
        p.expect(Tok::Dot, "`.` at the end of the clause")?;
        out.push(RawClause { head, body });
    }
    Ok(out)
}

/// Parses a comma-separated conjunction of atoms. An optional leading `?-`
/// and trailing `.` are accepted; empty text is the empty goal.
pub fn parse_query(text: &str) -> Result<Vec<Term>, SyntaxError> {
    let mut p = Parser::new(text)?;
    p.eat(&Tok::Query);
    if p.at_end() || p.peek() == Some(&Tok::Dot) {
        p.eat(&Tok::Dot);
        if !p.at_end() {
            return Err(p.unexpected("end of input"));
        }
        return Ok(Vec::new());
    }
    let atoms = p.atoms()?;
    p.eat(&Tok::Dot);
    if !p.at_end() {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(atoms)
}

/// Parses `X = t, Y = u, ...` into an equation system.
pub fn parse_equations(text: &str) -> Result<EquationSystem, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut equations = Vec::new();
    if p.at_end() {
        return Ok(EquationSystem::default());
    }
    loop {
        let lhs = match p.peek() {
            Some(Tok::Var(_)) => p.term()?,
            _ => return Err(p.unexpected("a variable")),
        };
        p.expect(Tok::Eq, "`=`")?;
        let rhs = p.term()?;
        equations.push((lhs, rhs));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    if !p.at_end() {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(EquationSystem::new(equations))
}

/// Parses one binding written as recursive equations, e.g. `X = s(X)` or
/// `X = f(_E0), _E0 = g(_E0)`. The first equation names the bound variable.
pub fn parse_binding(text: &str) -> Result<(Var, Term), SyntaxError> {
    let system = parse_equations(text)?;
    let no_binding = || SyntaxError {
        line: 1,
        column: 1,
        message: format!("`{text}` is not a binding"),
    };
    let var = system
        .equations
        .first()
        .and_then(|(l, _)| l.as_var().cloned())
        .ok_or_else(no_binding)?;
    let solved = system
        .reduce()
        .ok()
        .and_then(|r| r.solve())
        .ok_or_else(|| SyntaxError {
            line: 1,
            column: 1,
            message: format!("equations `{text}` have no solution"),
        })?;
    let term = solved
        .get(&var)
        .cloned()
        .unwrap_or_else(|| Term::var(var.clone()));
    Ok((var, term))
}

/// Parses a list of bindings into a substitution.
pub fn parse_substitution<'a>(
    bindings: impl IntoIterator<Item = &'a str>,
) -> Result<Substitution, SyntaxError> {
    let pairs = bindings
        .into_iter()
        .map(parse_binding)
        .collect::<Result<Vec<_>, _>>()?;
    Substitution::from_bindings(pairs).map_err(|e| SyntaxError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })
}

/// One goal item: an atom and its hypothesis set, in parsed form.
pub type ParsedItem = (Term, Vec<Term>);

/// Parses a rendered goal `(a, {h1, h2}), (b, {})`. Empty text is the
/// empty goal.
pub fn parse_goal(text: &str) -> Result<Vec<ParsedItem>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut items = Vec::new();
    if p.at_end() {
        return Ok(items);
    }
    loop {
        p.expect(Tok::LParen, "`(`")?;
        let atom = p.atom()?;
        p.expect(Tok::Comma, "`,`")?;
        p.expect(Tok::LBrace, "`{`")?;
        let mut hyps = Vec::new();
        if !p.eat(&Tok::RBrace) {
            hyps = p.atoms()?;
            p.expect(Tok::RBrace, "`}`")?;
        }
        p.expect(Tok::RParen, "`)`")?;
        items.push((atom, hyps));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    if !p.at_end() {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(items)
}

// ---------------------------------------------------------------------------
// printing

/// Fresh names `{prefix}0`, `{prefix}1`, ... avoiding `taken`.
fn fresh_names(prefix: &str, count: usize, taken: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let name = format!("{prefix}{i}");
        if !taken.contains(&name) {
            out.push(name);
        }
        i += 1;
    }
    out
}

fn taken_names(t: &Term) -> BTreeSet<String> {
    t.vars().iter().map(|v| v.to_string()).collect()
}

/// Writes node `n`. A named node prints as its name when `mu_style` is off
/// or when it is already on the current path; otherwise it opens a binder.
fn write_node(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    n: usize,
    names: &HashMap<usize, String>,
    mu_style: bool,
    on_path: &mut HashSet<usize>,
) -> fmt::Result {
    if let Some(name) = names.get(&n) {
        if !mu_style || on_path.contains(&n) {
            return f.write_str(name);
        }
        write!(f, "mu {name}. ")?;
    }
    match t.node(n) {
        Node::Var(v) => write!(f, "{v}"),
        Node::App { functor, args } => {
            f.write_str(functor)?;
            if !args.is_empty() {
                on_path.insert(n);
                f.write_str("(")?;
                for (i, &c) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_node(f, t, c, names, mu_style, on_path)?;
                }
                f.write_str(")")?;
                on_path.remove(&n);
            }
            Ok(())
        }
    }
}

/// Prints in `mu` notation: `mu _M0. s(_M0)`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = cycle_entries(self, 0);
        let mut sorted: Vec<usize> = entries.into_iter().collect();
        sorted.sort_unstable();
        let names: HashMap<usize, String> = sorted
            .iter()
            .copied()
            .zip(fresh_names("_M", sorted.len(), &taken_names(self)))
            .collect();
        write_node(f, self, 0, &names, true, &mut HashSet::new())
    }
}

/// A variable binding printed as recursive equations: the bound variable
/// names the root when the root lies on a cycle, and other cycle entry
/// points get auxiliary variables `_E0`, `_E1`, ... defined by further
/// equations, e.g. `X = f(_E0), _E0 = g(_E0)`.
pub struct Binding<'a> {
    var: &'a Var,
    term: &'a Term,
    mu: bool,
}

impl<'a> Binding<'a> {
    pub fn new(var: &'a Var, term: &'a Term) -> Binding<'a> {
        Binding {
            var,
            term,
            mu: false,
        }
    }

    /// Prints `X = mu X. s(X)` style instead.
    pub fn mu(var: &'a Var, term: &'a Term) -> Binding<'a> {
        Binding {
            var,
            term,
            mu: true,
        }
    }
}

impl fmt::Display for Binding<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.term;
        let mut entries: Vec<usize> = cycle_entries(t, 0).into_iter().collect();
        entries.sort_unstable();
        let mut taken = taken_names(t);
        taken.insert(self.var.to_string());
        let others: Vec<usize> = entries.iter().copied().filter(|&n| n != 0).collect();
        let prefix = if self.mu { "_M" } else { "_E" };
        let mut names: HashMap<usize, String> = others
            .iter()
            .copied()
            .zip(fresh_names(prefix, others.len(), &taken))
            .collect();
        if entries.first() == Some(&0) {
            names.insert(0, self.var.to_string());
        }
        write!(f, "{} = ", self.var)?;
        if self.mu {
            return write_node(f, t, 0, &names, true, &mut HashSet::new());
        }
        write_node_eq(f, t, 0, &names)?;
        for &n in &others {
            write!(f, ", {} = ", names[&n])?;
            write_node_eq(f, t, n, &names)?;
        }
        Ok(())
    }
}

/// Writes the definition of node `n`: its own label, with children printed
/// up to the next named node.
fn write_node_eq(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    n: usize,
    names: &HashMap<usize, String>,
) -> fmt::Result {
    match t.node(n) {
        Node::Var(v) => write!(f, "{v}"),
        Node::App { functor, args } => {
            f.write_str(functor)?;
            if !args.is_empty() {
                f.write_str("(")?;
                for (i, &c) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_node(f, t, c, names, false, &mut HashSet::new())?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}
