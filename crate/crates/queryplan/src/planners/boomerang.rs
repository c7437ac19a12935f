//! Generative replanning loop: propose a whole plan, verify it lazily against
//! the world model, feed the failing trajectory and error back, and replan.
//! Query reuse makes resubmitted prefixes free.

use crate::policy::{HistoryEntry, InteractionHistory, PlanGenerator, PolicyError, WorldContext};
use crate::world::WorldModel;

use super::{FailureReason, PlannerOutcome, RunScope, SearchTrace};

pub fn run_boomerang<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    t_max: usize,
) -> PlannerOutcome
where
    P: PlanGenerator + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let goal = world.goal().clone();
    let valid_at_start = world.valid_actions(&s0);
    let mut history = InteractionHistory::new();

    for _ in 1..=t_max {
        trace.iterations += 1;
        let plan = match policy.generate_plan(&s0, ctx, &history, &valid_at_start) {
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
        let error = result.error.expect("failed verification carries feedback");
        history.push(HistoryEntry::PlanAttempt {
            plan,
            trajectory: result.trajectory,
            error,
        });
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{parse_action_string, parse_pddl, GroundAction, GroundedProblem};
    use crate::policy::{OraclePolicy, ScriptedPolicy};

    fn grounded() -> GroundedProblem {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        GroundedProblem::new(p).unwrap()
    }

    fn ctx() -> WorldContext {
        WorldContext::new("t", "t")
    }

    fn plan(g: &GroundedProblem, names: &[&str]) -> Vec<GroundAction> {
        names
            .iter()
            .map(|n| parse_action_string(n, &g.actions).unwrap().clone())
            .collect()
    }

    #[test]
    fn oracle_succeeds_first_iteration_at_optimal_cost() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let mut policy = OraclePolicy::new(&g);
        let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 20);
        assert!(outcome.success);
        assert_eq!(outcome.plan_length(), Some(4));
        assert_eq!(outcome.wmq_used, 4);
        assert_eq!(outcome.trace.iterations, 1);
    }

    #[test]
    fn failed_prefix_is_reused_by_the_next_plan() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        // Plan 1 fails at its third action; plan 2 shares the 2-step prefix.
        let p1 = plan(&g, &["unstack(a,b)", "put-down(a)", "unstack(a,b)"]);
        let p2 = plan(
            &g,
            &["unstack(a,b)", "put-down(a)", "pick-up(b)", "stack(b,c)"],
        );
        let p2_len = p2.len() as u64;
        let mut policy = ScriptedPolicy::new().with_plans(vec![p1, p2]);
        let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 20);
        assert!(outcome.success);
        assert_eq!(outcome.wmq_used, 3 + (p2_len - 2));
        assert_eq!(outcome.trace.iterations, 2);
    }

    #[test]
    fn identical_failing_plan_stops_charging_after_first_iteration() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let failing = plan(&g, &["unstack(a,b)", "put-down(a)"]);
        let mut policy = ScriptedPolicy::new().with_plans(vec![failing]).looping();
        let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 5);
        assert!(!outcome.success);
        assert_eq!(outcome.failure_reason, Some(FailureReason::StepLimit));
        assert_eq!(outcome.wmq_used, 2, "all later iterations hit the cache");
        assert_eq!(outcome.trace.iterations, 5);
    }

    #[test]
    fn empty_plan_is_a_policy_failure() {
        let g = grounded();
        let mut world = WorldModel::new(&g, Some(20));
        let mut policy = ScriptedPolicy::new().with_plans(vec![vec![]]);
        let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 5);
        assert!(!outcome.success);
        assert_eq!(outcome.failure_reason, Some(FailureReason::PolicyFailure));
    }
}
