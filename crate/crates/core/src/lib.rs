//! Rational terms, unification without occurs check, and resolution
//! engines for SLD, co-SLD, structural resolution and co-inductive
//! structural resolution, with trace verification and the transformation
//! of co-inductive structural refutations into co-SLD refutations.

pub mod cli;
pub mod engine;
pub mod program;
pub mod subst;
pub mod syntax;
pub mod term;
pub mod trace_io;
pub mod transform;
pub mod unify;

pub use engine::{
    computed_substitution, derive, verify_trace, DerivationTrace, Goal, GoalItem, Mode, Rule,
    SearchError, SearchOptions, StepLabel,
};
pub use program::{parse_program, Clause, Program};
pub use subst::Substitution;
pub use syntax::{parse_query, parse_term, Binding, SyntaxError};
pub use term::{term_equal, FiniteTree, Term, Var};
pub use transform::{
    soundness_check, strip_identity, suffix_compositions, transform, SoundnessReport,
    TransformError,
};
pub use unify::{match_term, unify, ClashError, EquationSystem};
