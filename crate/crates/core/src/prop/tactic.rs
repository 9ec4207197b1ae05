//! Tactic text forms.

use std::fmt;

use super::formula::{parse_formula, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tactic {
    Exact(String),
    Intro(String),
    Apply(String),
    Split,
    Left,
    Right,
    Cases(String),
    Have(String, Formula),
}

impl Tactic {
    pub fn is_have(&self) -> bool {
        matches!(self, Tactic::Have(..))
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Exact(l) => write!(f, "exact {l}"),
            Tactic::Intro(l) => write!(f, "intro {l}"),
            Tactic::Apply(l) => write!(f, "apply {l}"),
            Tactic::Split => f.write_str("split"),
            Tactic::Left => f.write_str("left"),
            Tactic::Right => f.write_str("right"),
            Tactic::Cases(l) => write!(f, "cases {l}"),
            Tactic::Have(l, g) => write!(f, "have {l} : {g}"),
        }
    }
}

/// A label that can be bound by `intro`, `have`, or a task hypothesis:
/// a lowercase letter followed by letters, digits, `_` or `'`.
pub fn is_binder_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A label that can be referenced: a binder label optionally followed by
/// `.1` / `.2` projections produced by `cases` on a conjunction.
pub fn is_reference_label(s: &str) -> bool {
    let mut parts = s.split('.');
    let head = parts.next().unwrap_or_default();
    is_binder_label(head) && parts.all(|p| p == "1" || p == "2")
}

/// Collapse runs of whitespace and trim.
pub fn normalize_action(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parse a tactic; `None` when the text is not a well-formed tactic.
pub fn parse_tactic(text: &str) -> Option<Tactic> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("have") {
        if !rest.starts_with(char::is_whitespace) {
            return None;
        }
        let (label, formula) = rest.split_once(':')?;
        let label = label.trim();
        if !is_binder_label(label) {
            return None;
        }
        let formula = parse_formula(formula).ok()?;
        return Some(Tactic::Have(label.to_string(), formula));
    }
    let words: Vec<&str> = text.split_whitespace().collect();
    let labelled = |ctor: fn(String) -> Tactic, binder: bool| {
        let ok = if binder {
            is_binder_label(words[1])
        } else {
            is_reference_label(words[1])
        };
        ok.then(|| ctor(words[1].to_string()))
    };
    match words.as_slice() {
        ["split"] => Some(Tactic::Split),
        ["left"] => Some(Tactic::Left),
        ["right"] => Some(Tactic::Right),
        ["exact", _] => labelled(Tactic::Exact, false),
        ["apply", _] => labelled(Tactic::Apply, false),
        ["cases", _] => labelled(Tactic::Cases, false),
        ["intro", _] => labelled(Tactic::Intro, true),
        _ => None,
    }
}
