//! Decision-policy contracts consumed by every planner, plus non-LLM
//! implementations used for testing and ablation: a breadth-first-search
//! oracle, a scripted replayer, and a seeded random policy.

mod oracle;
mod random;
mod scripted;

pub use oracle::OraclePolicy;
pub use random::RandomPolicy;
pub use scripted::ScriptedPolicy;

use std::fmt;

use thiserror::Error;

use crate::pddl::{GroundAction, State};
use crate::world::{ErrorFeedback, Trajectory};

/// Per-domain context block injected verbatim into every prompt of a run.
#[derive(Debug, Clone)]
pub struct WorldContext {
    pub domain_description: String,
    /// Includes its own header line (e.g. "The actions are formatted as follows:").
    pub action_format_notes: String,
}

impl WorldContext {
    pub fn new(description: impl Into<String>, notes: impl Into<String>) -> Self {
        WorldContext {
            domain_description: description.into(),
            action_format_notes: notes.into(),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "{}\n\n{}",
            self.domain_description, self.action_format_notes
        )
    }
}

/// Three-way judgement of a state's promise, totally ordered for beam sorting.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum RatingValue {
    Impossible,
    Maybe,
    Certain,
}

impl RatingValue {
    pub fn canonical_label(self) -> &'static str {
        match self {
            RatingValue::Certain => "sure",
            RatingValue::Maybe => "maybe",
            RatingValue::Impossible => "impossible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rating {
    pub value: RatingValue,
    /// The label text as emitted by whichever policy produced it.
    pub raw_label: String,
}

impl Rating {
    pub fn canonical(value: RatingValue) -> Self {
        Rating {
            value,
            raw_label: value.canonical_label().to_string(),
        }
    }

    /// Map a response label to a rating; case-insensitive.
    pub fn from_label(label: &str) -> Option<Self> {
        let value = match label.trim().to_lowercase().as_str() {
            "sure" => RatingValue::Certain,
            "maybe" => RatingValue::Maybe,
            "impossible" => RatingValue::Impossible,
            _ => return None,
        };
        Some(Rating {
            value,
            raw_label: label.trim().to_string(),
        })
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw_label)
    }
}

/// One record of a policy's exchange with the world.
#[derive(Debug, Clone)]
pub enum HistoryEntry {
    /// A single (state, action) query and the world's answer.
    Query {
        state: State,
        action: GroundAction,
        next_state: Option<State>,
        error: Option<ErrorFeedback>,
    },
    /// A whole-plan attempt: the proposed plan, the executed prefix, and the
    /// failure that ended it.
    PlanAttempt {
        plan: Vec<GroundAction>,
        trajectory: Trajectory,
        error: ErrorFeedback,
    },
    /// Out-of-band feedback injected by a planner (e.g. cycle resets).
    Reflection { note: String },
}

/// Append-only, chronological record of policy/world exchanges.
#[derive(Debug, Clone, Default)]
pub struct InteractionHistory {
    entries: Vec<HistoryEntry>,
}

impl InteractionHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: HistoryEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last_error(&self) -> Option<&ErrorFeedback> {
        self.entries.iter().rev().find_map(|e| match e {
            HistoryEntry::Query { error, .. } => error.as_ref(),
            HistoryEntry::PlanAttempt { error, .. } => Some(error),
            HistoryEntry::Reflection { .. } => None,
        })
    }
}

/// Inputs for one action-proposal call.
#[derive(Debug, Clone)]
pub struct ProposalRequest {
    pub state: State,
    pub k: usize,
    /// The applicable subset at `state`; proposals must come from here.
    pub valid_actions: Vec<GroundAction>,
    pub feedback: Option<String>,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    /// Raised after a policy exhausts its malformed-output retries, or has
    /// nothing left to replay. Ends the run as a failure.
    #[error("policy failure: {0}")]
    Failure(String),
}

impl PolicyError {
    pub fn failure(msg: impl Into<String>) -> Self {
        PolicyError::Failure(msg.into())
    }
}

/// LLM accounting carried by a policy; non-LLM policies report zeros.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolicyDiagnostics {
    pub llm_calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub malformed_actions: u64,
    pub history_truncated: bool,
}

pub trait PolicyInfo {
    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics::default()
    }
}

/// Proposes up to `k` distinct actions from the request's valid set.
pub trait ActionProposer: PolicyInfo {
    fn propose_actions(
        &mut self,
        req: &ProposalRequest,
        ctx: &WorldContext,
    ) -> Result<Vec<GroundAction>, PolicyError>;
}

/// Rates a state's promise of reaching the goal.
pub trait StateEvaluator: PolicyInfo {
    fn evaluate_state(
        &mut self,
        state: &State,
        goal: &State,
        ctx: &WorldContext,
    ) -> Result<Rating, PolicyError>;
}

/// Produces a whole action sequence intended to reach the goal from `start`.
pub trait PlanGenerator: PolicyInfo {
    fn generate_plan(
        &mut self,
        start: &State,
        ctx: &WorldContext,
        history: &InteractionHistory,
        valid_at_start: &[GroundAction],
    ) -> Result<Vec<GroundAction>, PolicyError>;
}

/// Produces one action from the current state; it may be inapplicable — the
/// world model adjudicates.
pub trait Reactor: PolicyInfo {
    fn next_action(
        &mut self,
        state: &State,
        ctx: &WorldContext,
        history: &InteractionHistory,
    ) -> Result<GroundAction, PolicyError>;
}

/// Chooses both which visited state to act from and the action to try there.
pub trait QuerySelector: PolicyInfo {
    fn select_query(
        &mut self,
        ctx: &WorldContext,
        history: &InteractionHistory,
        visited: &[State],
    ) -> Result<(usize, GroundAction), PolicyError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rating_order_is_total() {
        assert!(RatingValue::Impossible < RatingValue::Maybe);
        assert!(RatingValue::Maybe < RatingValue::Certain);
        let mut v = vec![
            RatingValue::Certain,
            RatingValue::Impossible,
            RatingValue::Maybe,
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                RatingValue::Impossible,
                RatingValue::Maybe,
                RatingValue::Certain
            ]
        );
    }

    #[test]
    fn rating_labels_round_trip() {
        assert_eq!(
            Rating::from_label("sure").unwrap().value,
            RatingValue::Certain
        );
        assert_eq!(
            Rating::from_label("MAYBE").unwrap().value,
            RatingValue::Maybe
        );
        let r = Rating::from_label("Impossible").unwrap();
        assert_eq!(r.value, RatingValue::Impossible);
        assert_eq!(r.raw_label, "Impossible");
        assert!(Rating::from_label("7/10").is_none());
    }
}
