//! Budget-aware planning loops over the policy contracts and the metered
//! world model: beam and depth-first tree search driven by an action proposer
//! and state evaluator, a generative replanning loop, one-action-at-a-time
//! baselines, single-shot variants, and a cycle-resetting variant.

mod boomerang;
mod io;
mod react;
mod toi;

pub use boomerang::run_boomerang;
pub use io::{run_io, IoVariant};
pub use react::{run_react, run_react_select, run_reflexion};
pub use toi::{
    run_toi_bfs, run_toi_dfs, update_beam, NodeArena, SearchNode, ToiBfsParams, ToiDfsParams,
};

use serde::{Deserialize, Serialize};

use crate::pddl::GroundAction;
use crate::policy::{PolicyDiagnostics, PolicyInfo, RatingValue};
use crate::world::WorldModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    BudgetExhausted,
    StepLimit,
    PolicyFailure,
    Unsolvable,
    /// Single-shot runs whose plan contained an inapplicable action.
    InvalidActions,
    /// Single-shot runs whose plan executed fully without reaching the goal.
    SearchFailure,
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailureReason::BudgetExhausted => "budget_exhausted",
            FailureReason::StepLimit => "step_limit",
            FailureReason::PolicyFailure => "policy_failure",
            FailureReason::Unsolvable => "unsolvable",
            FailureReason::InvalidActions => "invalid_actions",
            FailureReason::SearchFailure => "search_failure",
        };
        f.write_str(s)
    }
}

/// Cheap per-run observability: beam widths after every update, and the
/// rating each expanded node carried when it was expanded.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub beam_sizes: Vec<usize>,
    pub expanded_ratings: Vec<Option<RatingValue>>,
    pub iterations: usize,
}

/// What one planner run produced, with query and LLM accounting.
#[derive(Debug, Clone)]
pub struct PlannerOutcome {
    pub success: bool,
    pub plan: Option<Vec<GroundAction>>,
    pub wmq_used: u64,
    pub llm_calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub malformed_actions: u64,
    pub failure_reason: Option<FailureReason>,
    pub history_truncated: bool,
    pub trace: SearchTrace,
}

impl PlannerOutcome {
    pub fn plan_length(&self) -> Option<usize> {
        self.plan.as_ref().map(Vec::len)
    }
}

/// Snapshot taken at run entry so a run reports deltas even on a shared world.
pub(crate) struct RunScope {
    wmq_start: u64,
    diag_start: PolicyDiagnostics,
}

impl RunScope {
    pub(crate) fn begin<P: PolicyInfo + ?Sized>(world: &WorldModel, policy: &P) -> Self {
        RunScope {
            wmq_start: world.ledger().used,
            diag_start: policy.diagnostics(),
        }
    }

    pub(crate) fn success<P: PolicyInfo + ?Sized>(
        self,
        world: &WorldModel,
        policy: &P,
        plan: Vec<GroundAction>,
        trace: SearchTrace,
    ) -> PlannerOutcome {
        self.finish(world, policy, true, Some(plan), None, trace)
    }

    pub(crate) fn failure<P: PolicyInfo + ?Sized>(
        self,
        world: &WorldModel,
        policy: &P,
        reason: FailureReason,
        trace: SearchTrace,
    ) -> PlannerOutcome {
        self.finish(world, policy, false, None, Some(reason), trace)
    }

    /// Loop exhaustion counts as a budget failure when the ledger is dry:
    /// failed runs are capped at the query budget, so they always land in the
    /// cap bin regardless of which limit tripped first.
    pub(crate) fn exhausted_reason(&self, world: &WorldModel) -> FailureReason {
        if world.ledger().exhausted() {
            FailureReason::BudgetExhausted
        } else {
            FailureReason::StepLimit
        }
    }

    fn finish<P: PolicyInfo + ?Sized>(
        self,
        world: &WorldModel,
        policy: &P,
        success: bool,
        plan: Option<Vec<GroundAction>>,
        failure_reason: Option<FailureReason>,
        trace: SearchTrace,
    ) -> PlannerOutcome {
        let diag = policy.diagnostics();
        PlannerOutcome {
            success,
            plan,
            wmq_used: world.ledger().used - self.wmq_start,
            llm_calls: diag.llm_calls - self.diag_start.llm_calls,
            prompt_tokens: diag.prompt_tokens - self.diag_start.prompt_tokens,
            completion_tokens: diag.completion_tokens - self.diag_start.completion_tokens,
            malformed_actions: diag.malformed_actions - self.diag_start.malformed_actions,
            failure_reason,
            history_truncated: diag.history_truncated,
            trace,
        }
    }
}
