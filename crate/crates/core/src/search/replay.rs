//! Rebuilds tree bookkeeping from a trace alone and checks it.

use thiserror::Error;

use super::config::SearchConfig;
use super::trace::TraceRecord;
use super::tree::NodeStatus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayViolation {
    #[error("iteration {iter}: path does not start at the root or skips a parent link")]
    BrokenPath { iter: u32 },
    #[error("iteration {iter}: expanded node {node} was {status:?}")]
    ExcludedExpanded { iter: u32, node: usize, status: NodeStatus },
    #[error("iteration {iter}: descended through open node {node}")]
    PassedOpenNode { iter: u32, node: usize },
    #[error("iteration {iter}: child index {got} where {want} was next")]
    ChildIndex { iter: u32, got: usize, want: usize },
    #[error("iteration {iter}: node {node} has {count} children, limit {limit}")]
    TooManyChildren { iter: u32, node: usize, count: usize, limit: usize },
    #[error("iteration {iter}: root totals ({n}, {w}) disagree with the replay ({rn}, {rw})")]
    RootTotals { iter: u32, n: u64, w: f64, rn: u64, rw: f64 },
    #[error("iteration {iter}: node {node} violates visit or value conservation")]
    Conservation { iter: u32, node: usize },
    #[error("samples {used} exceed budget {budget}")]
    Budget { used: u64, budget: u64 },
    #[error("iteration {iter}: record is out of sequence")]
    Sequence { iter: u32 },
}

/// Per-node totals reconstructed by [`replay_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayedNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub visits: u64,
    pub value: f64,
    /// Value assigned when the node was created.
    pub estimate: f64,
    pub status: NodeStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub nodes: Vec<ReplayedNode>,
    pub samples: u64,
    pub iterations: u32,
}

const TOLERANCE: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// Replays `trace` from a root with status `root_status`, checking after
/// every record that
/// * each path starts at the root, follows parent links, and descends only
///   through non-open nodes to an open one;
/// * new children take the next arena index and no node exceeds
///   `max_children`;
/// * the root totals match the record, and for every node `N` is one plus
///   the children's visits and `W` is the creation estimate plus the
///   children's values (the root has no creation term);
/// * total samples stay within the budget.
pub fn replay_trace(
    trace: &[TraceRecord],
    config: &SearchConfig,
    root_status: NodeStatus,
) -> Result<Replay, ReplayViolation> {
    let mut nodes = vec![ReplayedNode {
        parent: None,
        children: Vec::new(),
        visits: 0,
        value: 0.0,
        estimate: 0.0,
        status: root_status,
    }];
    let mut samples = 0u64;
    for (i, rec) in trace.iter().enumerate() {
        let iter = rec.iter;
        if iter as usize != i + 1 {
            return Err(ReplayViolation::Sequence { iter });
        }
        let path = &rec.selected_path;
        if path.first() != Some(&0) || path.iter().any(|&n| n >= nodes.len()) {
            return Err(ReplayViolation::BrokenPath { iter });
        }
        if path.windows(2).any(|w| nodes[w[1]].parent != Some(w[0])) {
            return Err(ReplayViolation::BrokenPath { iter });
        }
        if let Some(&n) = path[..path.len() - 1].iter().find(|&&n| nodes[n].status == NodeStatus::Open) {
            return Err(ReplayViolation::PassedOpenNode { iter, node: n });
        }
        let target = *path.last().unwrap();
        if nodes[target].status != NodeStatus::Open {
            return Err(ReplayViolation::ExcludedExpanded { iter, node: target, status: nodes[target].status });
        }
        if let (Some(child), Some(reward)) = (rec.child, rec.reward) {
            if child != nodes.len() {
                return Err(ReplayViolation::ChildIndex { iter, got: child, want: nodes.len() });
            }
            nodes.push(ReplayedNode {
                parent: Some(target),
                children: Vec::new(),
                visits: 0,
                value: 0.0,
                estimate: reward,
                status: NodeStatus::Open,
            });
            nodes[target].children.push(child);
            for &n in path.iter().chain(std::iter::once(&child)) {
                nodes[n].visits += 1;
                nodes[n].value += reward;
            }
        }
        for change in &rec.status_changes {
            if change.node >= nodes.len() {
                return Err(ReplayViolation::BrokenPath { iter });
            }
            nodes[change.node].status = change.status;
        }
        if let Some((node, n)) = nodes.iter().enumerate().find(|(_, n)| n.children.len() > config.max_children) {
            return Err(ReplayViolation::TooManyChildren {
                iter,
                node,
                count: n.children.len(),
                limit: config.max_children,
            });
        }
        let root = &nodes[0];
        if root.visits != rec.n_root || !close(root.value, rec.w_root) {
            return Err(ReplayViolation::RootTotals {
                iter,
                n: rec.n_root,
                w: rec.w_root,
                rn: root.visits,
                rw: root.value,
            });
        }
        for (id, n) in nodes.iter().enumerate() {
            let own = u64::from(id != 0);
            let visits: u64 = own + n.children.iter().map(|&c| nodes[c].visits).sum::<u64>();
            let value: f64 = n.estimate + n.children.iter().map(|&c| nodes[c].value).sum::<f64>();
            if visits != n.visits || !close(value, n.value) {
                return Err(ReplayViolation::Conservation { iter, node: id });
            }
        }
        samples += rec.samples;
        if let Some(budget) = config.sample_budget {
            if samples > budget {
                return Err(ReplayViolation::Budget { used: samples, budget });
            }
        }
    }
    Ok(Replay {
        nodes,
        samples,
        iterations: trace.len() as u32,
    })
}
