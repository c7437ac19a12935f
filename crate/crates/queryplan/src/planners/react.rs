//! One-action-at-a-time planners: act from the current state, act from any
//! previously visited state, or act with cycle-triggered resets to the start.

use std::collections::{HashMap, HashSet};

use crate::pddl::{GroundAction, State};
use crate::policy::{
    HistoryEntry, InteractionHistory, PolicyError, QuerySelector, Reactor, WorldContext,
};
use crate::world::WorldModel;

use super::{FailureReason, PlannerOutcome, RunScope, SearchTrace};

/// Step the current state with one proposed action per iteration. Invalid
/// actions are charged, leave the agent in place, and land in the history as
/// feedback.
pub fn run_react<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    t_max: usize,
) -> PlannerOutcome
where
    P: Reactor + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let mut current = s0;
    let mut accepted: Vec<GroundAction> = Vec::new();
    let mut history = InteractionHistory::new();

    for _ in 1..=t_max {
        trace.iterations += 1;
        let action = match policy.next_action(&current, ctx, &history) {
            Ok(a) => a,
            Err(PolicyError::Failure(_)) => {
                return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
            }
        };
        let step = match world.step(&current, &action) {
            Ok(s) => s,
            Err(_) => return scope.failure(world, policy, FailureReason::BudgetExhausted, trace),
        };
        history.push(HistoryEntry::Query {
            state: current.clone(),
            action: action.clone(),
            next_state: step.next_state.clone(),
            error: step.error.clone(),
        });
        if let Some(next) = step.next_state {
            current = next;
            accepted.push(action);
            if world.goal_reached(&current) {
                return scope.success(world, policy, accepted, trace);
            }
        }
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}

/// Like [`run_react`], but each step picks both a previously visited state
/// and an action to try there; success plans are rebuilt from parent links.
pub fn run_react_select<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    t_max: usize,
) -> PlannerOutcome
where
    P: QuerySelector + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let mut visited: Vec<State> = vec![s0.clone()];
    let mut parents: Vec<Option<(usize, GroundAction)>> = vec![None];
    let mut index_of: HashMap<State, usize> = HashMap::new();
    index_of.insert(s0, 0);
    let mut history = InteractionHistory::new();

    let rebuild = |parents: &[Option<(usize, GroundAction)>], mut at: usize| {
        let mut plan = Vec::new();
        while let Some((parent, action)) = &parents[at] {
            plan.push(action.clone());
            at = *parent;
        }
        plan.reverse();
        plan
    };

    for _ in 1..=t_max {
        trace.iterations += 1;
        let (idx, action) = match policy.select_query(ctx, &history, &visited) {
            Ok(sel) => sel,
            Err(PolicyError::Failure(_)) => {
                return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
            }
        };
        if idx >= visited.len() {
            return scope.failure(world, policy, FailureReason::PolicyFailure, trace);
        }
        let state = visited[idx].clone();
        let step = match world.step(&state, &action) {
            Ok(s) => s,
            Err(_) => return scope.failure(world, policy, FailureReason::BudgetExhausted, trace),
        };
        history.push(HistoryEntry::Query {
            state,
            action: action.clone(),
            next_state: step.next_state.clone(),
            error: step.error.clone(),
        });
        if let Some(next) = step.next_state {
            if world.goal_reached(&next) {
                let mut plan = rebuild(&parents, idx);
                plan.push(action);
                return scope.success(world, policy, plan, trace);
            }
            if !index_of.contains_key(&next) {
                index_of.insert(next.clone(), visited.len());
                visited.push(next);
                parents.push(Some((idx, action)));
            }
        }
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}

/// ReAct with episodic resets: revisiting any state within the current
/// episode teleports the agent back to the start and injects a reflection
/// note into the history. Cached transitions make the re-walk free.
pub fn run_reflexion<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    t_max: usize,
) -> PlannerOutcome
where
    P: Reactor + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let mut current = s0.clone();
    let mut episode_visited: HashSet<State> = HashSet::new();
    episode_visited.insert(s0.clone());
    let mut episode_actions: Vec<GroundAction> = Vec::new();
    let mut history = InteractionHistory::new();

    for _ in 1..=t_max {
        trace.iterations += 1;
        let action = match policy.next_action(&current, ctx, &history) {
            Ok(a) => a,
            Err(PolicyError::Failure(_)) => {
                return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
            }
        };
        let step = match world.step(&current, &action) {
            Ok(s) => s,
            Err(_) => return scope.failure(world, policy, FailureReason::BudgetExhausted, trace),
        };
        history.push(HistoryEntry::Query {
            state: current.clone(),
            action: action.clone(),
            next_state: step.next_state.clone(),
            error: step.error.clone(),
        });
        if let Some(next) = step.next_state {
            if world.goal_reached(&next) {
                episode_actions.push(action);
                return scope.success(world, policy, episode_actions, trace);
            }
            if episode_visited.contains(&next) {
                history.push(HistoryEntry::Reflection {
                    note: format!(
                        "cycling occurred: action {} revisited state {}; reset to the starting state",
                        action.display_name,
                        next.canonical_key()
                    ),
                });
                current = s0.clone();
                episode_visited.clear();
                episode_visited.insert(s0.clone());
                episode_actions.clear();
            } else {
                episode_visited.insert(next.clone());
                episode_actions.push(action);
                current = next;
            }
        }
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}
