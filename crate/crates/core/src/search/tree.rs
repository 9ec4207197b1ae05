use serde::{Deserialize, Serialize};

use super::config::{ucb_score, SearchConfig};
use super::SearchError;
use crate::mdp::{GoalStack, TransitionCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Open,
    ExpansionExhausted,
    ChildrenFull,
    Terminal,
}

/// Tree node. Nodes live in an arena and refer to each other by index;
/// a child always has a larger index than its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode<S, G> {
    pub parent: Option<usize>,
    /// Normalized text of the action leading here.
    pub action: Option<String>,
    pub case: Option<TransitionCase>,
    pub state: S,
    pub goals: GoalStack<G>,
    pub visits: u64,
    pub value: f64,
    pub children: Vec<usize>,
    /// Failed trials of the latest expansion attempt.
    pub failed_trials: u32,
    pub status: NodeStatus,
    pub depth: u32,
    pub solved_conjectures: u32,
}

impl<S, G> SearchNode<S, G> {
    pub fn root(state: S, goals: GoalStack<G>) -> Self {
        let status = if goals.is_empty() {
            NodeStatus::Terminal
        } else {
            NodeStatus::Open
        };
        SearchNode {
            parent: None,
            action: None,
            case: None,
            state,
            goals,
            visits: 0,
            value: 0.0,
            children: Vec::new(),
            failed_trials: 0,
            status,
            depth: 0,
            solved_conjectures: 0,
        }
    }

    /// `W / N`, defined once the node has been visited.
    pub fn mean_value(&self) -> Option<f64> {
        (self.visits > 0).then(|| self.value / self.visits as f64)
    }
}

/// Nodes whose subtree holds no `Open` node.
fn dead_nodes<S, G>(nodes: &[SearchNode<S, G>]) -> Vec<bool> {
    let mut dead = vec![false; nodes.len()];
    for i in (0..nodes.len()).rev() {
        let n = &nodes[i];
        dead[i] = n.status != NodeStatus::Open && n.children.iter().all(|&c| dead[c]);
    }
    dead
}

/// Path from the root (index 0) to the first `Open` node reached by
/// following the best-scoring child that still leads to an `Open` node.
/// Ties go to the earliest child.
pub fn select<S, G>(nodes: &[SearchNode<S, G>], config: &SearchConfig) -> Result<Vec<usize>, SearchError> {
    let dead = dead_nodes(nodes);
    if nodes.is_empty() || dead[0] {
        return Err(SearchError::NoSelectableNode);
    }
    let mut path = vec![0];
    let mut at = 0;
    while nodes[at].status != NodeStatus::Open {
        let parent = &nodes[at];
        let mut best: Option<(usize, f64)> = None;
        for &c in parent.children.iter().filter(|&&c| !dead[c]) {
            let child = &nodes[c];
            let mean = child
                .mean_value()
                .ok_or_else(|| SearchError::Domain(format!("node {c} has no visits")))?;
            let score = ucb_score(mean, child.visits, parent.visits, config.exploration_c, config.ucb_variant)?;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        let (next, _) = best.ok_or(SearchError::NoSelectableNode)?;
        path.push(next);
        at = next;
    }
    Ok(path)
}

/// Adds one visit and `reward` to every node on `path`.
pub fn backpropagate<S, G>(nodes: &mut [SearchNode<S, G>], path: &[usize], reward: f64) {
    for &i in path {
        nodes[i].visits += 1;
        nodes[i].value += reward;
    }
}

/// Actions along the root-to-`node` path.
pub fn extract_proof<S, G>(nodes: &[SearchNode<S, G>], node: usize) -> Result<Vec<String>, SearchError> {
    if !nodes[node].goals.is_empty() {
        return Err(SearchError::NotTerminal(node));
    }
    let mut actions = Vec::new();
    let mut at = Some(node);
    while let Some(i) = at {
        if let Some(a) = &nodes[i].action {
            actions.push(a.clone());
        }
        at = nodes[i].parent;
    }
    actions.reverse();
    Ok(actions)
}
