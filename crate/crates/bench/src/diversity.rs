use std::collections::{BTreeSet, HashMap};

use sgmdp::prop::{check_proof, Task};
use sgmdp::search::{NodeStatus, TraceRecord};

/// Action sequences leading to the nodes a trace marks terminal.
pub fn proofs_in_trace(trace: &[TraceRecord]) -> Vec<Vec<String>> {
    let mut nodes: HashMap<usize, (usize, String)> = HashMap::new();
    let mut proofs = Vec::new();
    for rec in trace {
        if let (Some(child), Some(action), Some(&parent)) = (rec.child, &rec.action_text, rec.selected_path.last()) {
            nodes.insert(child, (parent, action.clone()));
        }
        for change in rec.status_changes.iter().filter(|c| c.status == NodeStatus::Terminal) {
            let mut actions = Vec::new();
            let mut at = change.node;
            while let Some((parent, action)) = nodes.get(&at) {
                actions.push(action.clone());
                at = *parent;
            }
            actions.reverse();
            proofs.push(actions);
        }
    }
    proofs
}

fn normalize(action: &str) -> String {
    action.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Distinct checker-verified proofs of `task` across `traces`. Sequences
/// are compared after whitespace normalization of each action.
pub fn count_distinct_proofs(task: &Task, traces: &[Vec<TraceRecord>]) -> usize {
    let mut seen = BTreeSet::new();
    for proof in traces.iter().flat_map(|t| proofs_in_trace(t)) {
        let proof: Vec<String> = proof.iter().map(|a| normalize(a)).collect();
        if !seen.contains(&proof) && check_proof(task, &proof) {
            seen.insert(proof);
        }
    }
    seen.len()
}
