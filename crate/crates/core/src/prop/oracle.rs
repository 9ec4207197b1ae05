//! Exhaustive breadth-first prover over `have`-free tactic scripts.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use super::env::Task;
use super::formula::Formula;
use super::moves::applicable_tactics;
use super::state::Sequent;
use super::tactic::Tactic;

/// Largest depth bound the oracle accepts.
pub const MAX_ORACLE_DEPTH: usize = 8;
/// Upper limit on distinct states explored in one call.
pub const MAX_ORACLE_STATES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("depth bound {0} exceeds the tractability guard of {MAX_ORACLE_DEPTH}")]
    DepthTooLarge(usize),
    #[error("explored more than {MAX_ORACLE_STATES} states")]
    BudgetExceeded,
}

/// Goals remaining: the first sequent is active.
type Node = Vec<Sequent>;

/// States equal up to hypothesis labels, order and duplicates prove the
/// same things in the same number of steps.
fn canonical(node: &Node) -> Vec<(Vec<Formula>, Formula)> {
    node.iter()
        .map(|s| {
            let mut ctx: Vec<Formula> = s.context.iter().map(|h| h.formula.clone()).collect();
            ctx.sort();
            ctx.dedup();
            (ctx, s.target.clone())
        })
        .collect()
}

/// Tactics available at `node`: the canonical applicable list of its
/// active sequent.
pub fn successors(node: &[Sequent]) -> Vec<(Tactic, Vec<Sequent>)> {
    let Some(active) = node.first() else {
        return Vec::new();
    };
    applicable_tactics(active)
        .into_iter()
        .filter_map(|t| {
            let replacement = active.refine(&t).ok()?;
            let mut next = replacement;
            next.extend_from_slice(&node[1..]);
            Some((t, next))
        })
        .collect()
}

/// A shortest `have`-free proof of at most `depth_bound` tactics, if one
/// exists.
pub fn oracle_solve(task: &Task, depth_bound: usize) -> Result<Option<Vec<Tactic>>, OracleError> {
    if depth_bound > MAX_ORACLE_DEPTH {
        return Err(OracleError::DepthTooLarge(depth_bound));
    }
    // arena of (node, parent index, tactic that produced it, depth)
    let mut arena: Vec<(Node, usize, Option<Tactic>, usize)> = vec![(vec![task.sequent()], 0, None, 0)];
    let mut seen = HashSet::new();
    seen.insert(canonical(&arena[0].0));
    let mut queue = VecDeque::from([0usize]);

    while let Some(i) = queue.pop_front() {
        let depth = arena[i].3;
        if arena[i].0.is_empty() {
            let mut proof = Vec::new();
            let mut j = i;
            while let Some(t) = arena[j].2.clone() {
                proof.push(t);
                j = arena[j].1;
            }
            proof.reverse();
            return Ok(Some(proof));
        }
        if depth == depth_bound {
            continue;
        }
        for (tactic, next) in successors(&arena[i].0) {
            if seen.insert(canonical(&next)) {
                if seen.len() > MAX_ORACLE_STATES {
                    return Err(OracleError::BudgetExceeded);
                }
                arena.push((next, i, Some(tactic), depth + 1));
                queue.push_back(arena.len() - 1);
            }
        }
    }
    Ok(None)
}
