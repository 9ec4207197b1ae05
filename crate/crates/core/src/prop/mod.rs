//! A propositional natural-deduction calculus with `have` conjectures.
//!
//! Sequents carry labelled hypotheses. Primitive tactics are `exact`,
//! `intro`, `apply`, `split`, `left`, `right` and `cases`; `have c : F` is
//! the only goal-proposing action. [`check_proof`] replays scripts
//! independently of the engine, and [`oracle_solve`] finds shortest
//! `have`-free proofs by exhaustive search.

mod checker;
mod corpus;
mod env;
mod formula;
mod moves;
mod oracle;
mod state;
mod tactic;

pub use checker::check_proof;
pub use corpus::{
    generate_corpus, parse_corpus, read_corpus, write_corpus, CorpusError, DifficultyProfile, TaskRecord,
};
pub use env::{parse_hypothesis, PropEnv, Task};
pub use formula::{parse_formula, Atom, Formula, ParseError};
pub use moves::{applicable_tactics, conjecture_statements, conjecture_tactics, plausible, MAX_CONJECTURES};
pub use oracle::{oracle_solve, successors, OracleError, MAX_ORACLE_DEPTH};
pub use state::{Frame, Goal, Hypothesis, ProofState, Sequent, TacticError};
pub use tactic::{is_binder_label, is_reference_label, normalize_action, parse_tactic, Tactic};
