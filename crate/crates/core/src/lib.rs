//! Self-generated goal-conditioned MDPs and a conjecture-aware Monte Carlo
//! tree search prover.
//!
//! - [`mdp`]: goal stacks, the four-case transition function and shaped
//!   rewards, generic over an [`mdp::Environment`].
//! - [`search`]: MCTS over that transition function.
//! - [`prop`]: a propositional calculus environment with an independent
//!   checker and a brute-force oracle.
//! - [`policy`]: candidate-action generators (enumeration, seeded
//!   stochastic, remote completion service).

pub mod mdp;
pub mod policy;
pub mod prop;
pub mod search;
