//! Single-shot planners: one plan generation, one verification, no second
//! chance. Failures are classed by what went wrong — an inapplicable action
//! versus a valid sequence that never reached the goal.

use crate::policy::{InteractionHistory, PlanGenerator, PolicyError, WorldContext};
use crate::world::{ErrorKind, WorldModel};

use super::{FailureReason, PlannerOutcome, RunScope, SearchTrace};

/// Prompt flavor for single-shot runs. The plain variants emit the plan
/// directly (optionally after chain-of-thought text); the `P` variants add
/// the prompt-engineering changes: relaxed pick-up/put-down wording, state
/// tracking, and goal restating. LLM-backed policies must be configured with
/// the matching prompt kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum IoVariant {
    Io,
    IoCot,
    IoP,
    IoCotP,
}

impl std::fmt::Display for IoVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IoVariant::Io => "io",
            IoVariant::IoCot => "io_cot",
            IoVariant::IoP => "io_p",
            IoVariant::IoCotP => "io_cot_p",
        };
        f.write_str(s)
    }
}

pub fn run_io<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    _variant: IoVariant,
) -> PlannerOutcome
where
    P: PlanGenerator + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let goal = world.goal().clone();
    let valid_at_start = world.valid_actions(&s0);
    let plan = match policy.generate_plan(&s0, ctx, &InteractionHistory::new(), &valid_at_start) {
        Ok(plan) if plan.is_empty() => {
            return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
        }
        Ok(plan) => plan,
        Err(PolicyError::Failure(_)) => {
            return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
        }
    };
    let result = world.verify_plan(&s0, &plan, &goal);
    if result.reached_goal {
        return scope.success(world, policy, plan, trace);
    }
    if result.budget_exhausted {
        return scope.failure(world, policy, FailureReason::BudgetExhausted, trace);
    }
    let reason = match result.error.as_ref().map(|e| e.kind) {
        Some(ErrorKind::InvalidAction) => FailureReason::InvalidActions,
        _ => FailureReason::SearchFailure,
    };
    scope.failure(world, policy, reason, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{parse_action_string, parse_pddl, GroundedProblem};
    use crate::policy::{OraclePolicy, ScriptedPolicy};

    fn grounded() -> GroundedProblem {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        GroundedProblem::new(p).unwrap()
    }

    fn ctx() -> WorldContext {
        WorldContext::new("t", "t")
    }

    #[test]
    fn oracle_single_shot_pays_plan_length() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let mut policy = OraclePolicy::new(&g);
        let outcome = run_io(&mut world, &mut policy, &ctx(), IoVariant::Io);
        assert!(outcome.success);
        assert_eq!(outcome.wmq_used, outcome.plan_length().unwrap() as u64);
    }

    #[test]
    fn invalid_action_at_step_two_is_classed_invalid_actions() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let plan: Vec<_> = ["unstack(a,b)", "pick-up(b)"]
            .iter()
            .map(|n| parse_action_string(n, &g.actions).unwrap().clone())
            .collect();
        let mut policy = ScriptedPolicy::new().with_plans(vec![plan]);
        let outcome = run_io(&mut world, &mut policy, &ctx(), IoVariant::IoCot);
        assert!(!outcome.success);
        assert_eq!(outcome.wmq_used, 2);
        assert_eq!(outcome.failure_reason, Some(FailureReason::InvalidActions));
    }

    #[test]
    fn valid_plan_missing_goal_is_classed_search_failure() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let plan: Vec<_> = ["unstack(a,b)", "put-down(a)"]
            .iter()
            .map(|n| parse_action_string(n, &g.actions).unwrap().clone())
            .collect();
        let mut policy = ScriptedPolicy::new().with_plans(vec![plan]);
        let outcome = run_io(&mut world, &mut policy, &ctx(), IoVariant::Io);
        assert!(!outcome.success);
        assert_eq!(outcome.failure_reason, Some(FailureReason::SearchFailure));
    }
}
