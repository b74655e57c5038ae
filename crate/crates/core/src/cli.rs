//! The `cosres` command line: `run`, `repl` and `check-trace`.
//!
//! Exit codes: 0 when a refutation was found or a trace checked out, 1 on
//! failure, exhausted budget or a rejected trace, 2 on usage and parse
//! errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::engine::{
    derive, verify_trace, DerivationTrace, Mode, Rule, SearchError, SearchOptions,
};
use crate::program::{parse_program, Program};
use crate::syntax::{parse_query, Binding};
use crate::term::{Term, Var};
use crate::trace_io;
use crate::transform::soundness_check;

#[derive(Parser, Debug)]
#[command(name = "cosres", version, about = "Resolution over rational terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one query against a program.
    Run(RunArgs),
    /// Interactive query loop.
    Repl {
        /// Program file.
        program: PathBuf,
    },
    /// Verify a JSON trace; co-sres traces also go through the soundness pipeline.
    CheckTrace { program: PathBuf, trace: PathBuf },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::CoSres)]
    mode: ModeArg,
    /// Maximum number of search steps.
    #[arg(long, default_value_t = 10_000)]
    depth: usize,
    /// Stop after this many refutations.
    #[arg(long, default_value_t = 1)]
    max_solutions: usize,
    /// Print each derivation.
    #[arg(long)]
    trace: bool,
    /// Write the first refutation as JSON.
    #[arg(long, value_name = "PATH")]
    json_trace: Option<PathBuf>,
    /// Also show infinite answers cut off at this depth.
    #[arg(long, value_name = "N")]
    unfold_depth: Option<usize>,
    /// Print answers in mu-notation.
    #[arg(long)]
    mu: bool,
    /// Comma-separated atoms, e.g. "p(X), r(X)".
    #[arg(long, short)]
    query: String,
    /// Program file.
    program: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sld,
    CoSld,
    Sres,
    CoSres,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sld => Mode::Sld,
            ModeArg::CoSld => Mode::CoSld,
            ModeArg::Sres => Mode::SRes,
            ModeArg::CoSres => Mode::CoSRes,
        }
    }
}

/// How answers are rendered.
#[derive(Clone, Copy, Debug, Default)]
pub struct Presentation {
    pub mu: bool,
    pub unfold_depth: Option<usize>,
    pub trace: bool,
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(&args, out),
        Command::Repl { program } => match load(&program) {
            Ok(p) => {
                let stdin = io::stdin();
                repl(&p, &mut stdin.lock(), out)
            }
            Err(msg) => Err((2, msg)),
        },
        Command::CheckTrace { program, trace } => check_trace(&program, &trace, out),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

type Outcome = Result<i32, (i32, String)>;

fn load(path: &Path) -> Result<Program, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_program(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(args: &RunArgs, out: &mut dyn Write) -> Outcome {
    let program = load(&args.program).map_err(|m| (2, m))?;
    let query = parse_query(&args.query).map_err(|e| (2, format!("query:{e}")))?;
    let options = SearchOptions {
        max_steps: args.depth,
        max_solutions: args.max_solutions.max(1),
        ..SearchOptions::default()
    };
    let show = Presentation {
        mu: args.mu,
        unfold_depth: args.unfold_depth,
        trace: args.trace,
    };
    let io_err = |e: io::Error| (2, e.to_string());
    let mut found = 0;
    for item in derive(&program, &query, args.mode.into(), options) {
        match item {
            Ok(trace) => {
                if found == 0 {
                    if let Some(path) = &args.json_trace {
                        fs::write(path, trace_io::to_json(&trace))
                            .map_err(|e| (2, format!("{}: {e}", path.display())))?;
                    }
                } else {
                    writeln!(out).map_err(io_err)?;
                }
                found += 1;
                write_answer(out, &query, &trace, show).map_err(io_err)?;
            }
            Err(e) => {
                writeln!(out, "% {}", exhausted_notice(&e)).map_err(io_err)?;
            }
        }
    }
    if found == 0 {
        writeln!(out, "no refutation").map_err(io_err)?;
        return Ok(1);
    }
    Ok(0)
}

fn exhausted_notice(e: &SearchError) -> String {
    format!("search stopped undecided: {e}")
}

/// Query variables in order of first occurrence, without anonymous ones.
pub fn query_vars(query: &[Term]) -> Vec<Var> {
    let mut seen = BTreeSet::new();
    let mut vars = Vec::new();
    for atom in query {
        for n in atom.nodes() {
            if let crate::term::Node::Var(v) = n {
                if !v.name().starts_with('_') && seen.insert(v.clone()) {
                    vars.push(v.clone());
                }
            }
        }
    }
    vars
}

/// Prints the bindings of the query variables, then a statistics line.
pub fn write_answer(
    out: &mut dyn Write,
    query: &[Term],
    trace: &DerivationTrace,
    show: Presentation,
) -> io::Result<()> {
    if show.trace {
        write_trace(out, trace)?;
    }
    let vars = query_vars(query);
    let mut printed = 0;
    for v in &vars {
        let Some(t) = trace.computed.get(v) else {
            continue;
        };
        // bound to a variable the user never named: still free
        if t.as_var().is_some_and(|w| !vars.contains(w)) {
            continue;
        }
        if show.mu {
            writeln!(out, "{}", Binding::mu(v, t))?;
        } else {
            writeln!(out, "{}", Binding::new(v, t))?;
        }
        if let Some(d) = show.unfold_depth {
            if !t.is_finite() {
                writeln!(out, "% {v} unfolds to {}", t.unfold(d))?;
            }
        }
        printed += 1;
    }
    if printed == 0 {
        writeln!(out, "true")?;
    }
    writeln!(out, "% {}", statistics(trace))
}

/// `N steps (rule: count, ...)` over the rules that occur.
pub fn statistics(trace: &DerivationTrace) -> String {
    let mut counts: BTreeMap<Rule, usize> = BTreeMap::new();
    for s in &trace.steps {
        *counts.entry(s.rule).or_default() += 1;
    }
    let histogram: Vec<String> = counts.iter().map(|(r, n)| format!("{r}: {n}")).collect();
    let n = trace.steps.len();
    let unit = if n == 1 { "step" } else { "steps" };
    if histogram.is_empty() {
        format!("{n} {unit}")
    } else {
        format!("{n} {unit} ({})", histogram.join(", "))
    }
}

pub fn write_trace(out: &mut dyn Write, trace: &DerivationTrace) -> io::Result<()> {
    writeln!(out, "% G0: {}", trace.goals[0])?;
    for (i, s) in trace.steps.iter().enumerate() {
        let clause = s
            .clause
            .map(|c| format!(" with clause {c}"))
            .unwrap_or_default();
        writeln!(
            out,
            "%   {} on item {}{clause} {}",
            s.rule, s.selected, s.unifier
        )?;
        let g = &trace.goals[i + 1];
        if g.is_empty() {
            writeln!(out, "% G{}: []", i + 1)?;
        } else {
            writeln!(out, "% G{}: {g}", i + 1)?;
        }
    }
    Ok(())
}

fn check_trace(program: &Path, trace: &Path, out: &mut dyn Write) -> Outcome {
    let p = load(program).map_err(|m| (2, m))?;
    let text = fs::read_to_string(trace).map_err(|e| (2, format!("{}: {e}", trace.display())))?;
    let t = trace_io::from_json(&text).map_err(|e| (2, format!("{}: {e}", trace.display())))?;
    let io_err = |e: io::Error| (2, e.to_string());
    if t.mode == Mode::CoSRes {
        match soundness_check(&p, &t) {
            Ok(report) => {
                writeln!(out, "pass").map_err(io_err)?;
                writeln!(out, "{report}").map_err(io_err)?;
                Ok(0)
            }
            Err(e) => {
                writeln!(out, "fail: {e}").map_err(io_err)?;
                Ok(1)
            }
        }
    } else {
        match verify_trace(&p, &t) {
            Ok(()) => {
                writeln!(
                    out,
                    "pass: {} refutation of {} steps",
                    t.mode,
                    t.steps.len()
                )
                .map_err(io_err)?;
                Ok(0)
            }
            Err(e) => {
                writeln!(out, "fail: {e}").map_err(io_err)?;
                Ok(1)
            }
        }
    }
}

/// Interactive loop reading queries from `input`.
///
/// Answers are shown one at a time; `;` asks for the next one. Session
/// commands: `:mode NAME`, `:depth N`, `:trace`, `:quit`.
pub fn repl(program: &Program, input: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    let io_err = |e: io::Error| (2, e.to_string());
    let mut mode = Mode::CoSRes;
    let mut depth = 10_000;
    let mut show = Presentation::default();
    let mut line = String::new();
    loop {
        write!(out, "?- ").map_err(io_err)?;
        out.flush().map_err(io_err)?;
        line.clear();
        if input.read_line(&mut line).map_err(io_err)? == 0 {
            writeln!(out).map_err(io_err)?;
            return Ok(0);
        }
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(cmd) = text.strip_prefix(':') {
            let mut words = cmd.split_whitespace();
            match (words.next(), words.next()) {
                (Some("quit" | "q"), _) => return Ok(0),
                (Some("mode"), Some(name)) => match name.parse::<Mode>() {
                    Ok(Mode::CoRewId) | Err(_) => {
                        writeln!(
                            out,
                            "unknown mode `{name}`; use sld, co-sld, sres or co-sres"
                        )
                    }
                    Ok(m) => {
                        mode = m;
                        writeln!(out, "mode {m}")
                    }
                },
                (Some("mode"), None) => writeln!(out, "mode {mode}"),
                (Some("depth"), Some(n)) => match n.parse() {
                    Ok(n) => {
                        depth = n;
                        writeln!(out, "depth {depth}")
                    }
                    Err(_) => writeln!(out, "`{n}` is not a number"),
                },
                (Some("depth"), None) => writeln!(out, "depth {depth}"),
                (Some("trace"), _) => {
                    show.trace = !show.trace;
                    writeln!(out, "trace {}", if show.trace { "on" } else { "off" })
                }
                _ => writeln!(out, "commands: :mode NAME, :depth N, :trace, :quit"),
            }
            .map_err(io_err)?;
            continue;
        }
        let query = match parse_query(text) {
            Ok(q) => q,
            Err(e) => {
                writeln!(out, "syntax error at {e}").map_err(io_err)?;
                continue;
            }
        };
        let options = SearchOptions {
            max_steps: depth,
            max_solutions: usize::MAX,
            ..SearchOptions::default()
        };
        let mut found = 0;
        let mut stopped = false;
        let mut undecided = false;
        for item in derive(program, &query, mode, options) {
            match item {
                Ok(trace) => {
                    found += 1;
                    write_answer(out, &query, &trace, show).map_err(io_err)?;
                    write!(out, "more? ").map_err(io_err)?;
                    out.flush().map_err(io_err)?;
                    line.clear();
                    input.read_line(&mut line).map_err(io_err)?;
                    if line.trim() != ";" {
                        stopped = true;
                        break;
                    }
                }
                Err(e) => {
                    writeln!(out, "% {}", exhausted_notice(&e)).map_err(io_err)?;
                    undecided = true;
                }
            }
        }
        if !stopped && !undecided {
            let verdict = if found == 0 {
                "no"
            } else {
                "no more refutations"
            };
            writeln!(out, "{verdict}").map_err(io_err)?;
        }
    }
}
