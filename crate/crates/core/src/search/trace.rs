use serde::{Deserialize, Serialize};

use super::tree::NodeStatus;
use crate::mdp::TransitionCase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusChange {
    pub node: usize,
    pub status: NodeStatus,
}

/// One line of the search log. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: u32,
    pub selected_path: Vec<usize>,
    pub action_text: Option<String>,
    pub child: Option<usize>,
    pub case: Option<TransitionCase>,
    pub reward: Option<f64>,
    #[serde(rename = "N_root")]
    pub n_root: u64,
    #[serde(rename = "W_root")]
    pub w_root: f64,
    pub status_changes: Vec<StatusChange>,
    /// Candidates drawn from the policy during this iteration.
    pub samples: u64,
    pub policy_errors: u32,
}

/// Line-delimited JSON rendering of a trace.
pub fn trace_to_jsonl(trace: &[TraceRecord]) -> String {
    let mut out = String::new();
    for rec in trace {
        out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order() {
        let rec = TraceRecord {
            iter: 1,
            selected_path: vec![0],
            action_text: Some("exact h".into()),
            child: Some(1),
            case: Some(TransitionCase::GoalSolved),
            reward: Some(1.5),
            n_root: 1,
            w_root: 1.5,
            status_changes: vec![StatusChange { node: 1, status: NodeStatus::Terminal }],
            samples: 1,
            policy_errors: 0,
        };
        let line = trace_to_jsonl(std::slice::from_ref(&rec));
        assert_eq!(
            line,
            "{\"iter\":1,\"selected_path\":[0],\"action_text\":\"exact h\",\"child\":1,\
             \"case\":\"GoalSolved\",\"reward\":1.5,\"N_root\":1,\"W_root\":1.5,\
             \"status_changes\":[{\"node\":1,\"status\":\"terminal\"}],\"samples\":1,\"policy_errors\":0}\n"
        );
        assert_eq!(parse_trace(&line).unwrap(), vec![rec]);
    }
}
