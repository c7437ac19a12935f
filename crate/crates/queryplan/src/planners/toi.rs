//! Tree-search planners driven by an action proposer and a three-way state
//! evaluator: a beam-search variant and a depth-first variant with a value
//! threshold. Every expansion is a charged world-model step.

use std::collections::HashMap;

use crate::pddl::{GroundAction, State};
use crate::policy::{
    ActionProposer, PolicyError, ProposalRequest, Rating, RatingValue, StateEvaluator, WorldContext,
};
use crate::world::WorldModel;

use super::{FailureReason, PlannerOutcome, RunScope, SearchTrace};

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: State,
    pub parent: Option<usize>,
    pub incoming_action: Option<GroundAction>,
    pub depth: usize,
    pub rating: Option<Rating>,
}

/// Flat node store; parent chains terminate at the root (node 0).
#[derive(Debug, Default)]
pub struct NodeArena {
    nodes: Vec<SearchNode>,
}

impl NodeArena {
    pub fn with_root(state: State) -> Self {
        NodeArena {
            nodes: vec![SearchNode {
                state,
                parent: None,
                incoming_action: None,
                depth: 0,
                rating: None,
            }],
        }
    }

    pub fn push_child(&mut self, parent: usize, action: GroundAction, state: State) -> usize {
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(SearchNode {
            state,
            parent: Some(parent),
            incoming_action: Some(action),
            depth,
            rating: None,
        });
        self.nodes.len() - 1
    }

    pub fn get(&self, id: usize) -> &SearchNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Walk the parent chain back to the root and return the action sequence.
    pub fn backtrack(&self, mut id: usize) -> Vec<GroundAction> {
        let mut plan = Vec::new();
        while let Some(parent) = self.nodes[id].parent {
            plan.push(
                self.nodes[id]
                    .incoming_action
                    .clone()
                    .expect("non-root nodes have incoming actions"),
            );
            id = parent;
        }
        plan.reverse();
        plan
    }
}

pub type RateFn<'a> = dyn FnMut(&State) -> Result<Rating, PolicyError> + 'a;

/// Beam update: rate unrated candidates once, drop `impossible` ones,
/// collapse duplicate states onto the first-created node, and keep the top
/// `b` by (rating desc, depth desc, canonical key asc).
pub fn update_beam(
    arena: &mut NodeArena,
    candidates: &[usize],
    rate: &mut RateFn<'_>,
    b: usize,
) -> Result<Vec<usize>, PolicyError> {
    let mut ids: Vec<usize> = candidates.to_vec();
    ids.sort_unstable();
    ids.dedup();
    // Duplicate states collapse onto the first-created (lowest-id) node.
    let mut first_for_state: HashMap<State, usize> = HashMap::new();
    let mut kept: Vec<usize> = Vec::new();
    for id in ids {
        let state = arena.get(id).state.clone();
        if !first_for_state.contains_key(&state) {
            first_for_state.insert(state, id);
            kept.push(id);
        }
    }
    for &id in &kept {
        if arena.nodes[id].rating.is_none() {
            let rating = rate(&arena.nodes[id].state)?;
            arena.nodes[id].rating = Some(rating);
        }
    }
    let mut survivors: Vec<usize> = kept
        .into_iter()
        .filter(|&id| {
            arena.nodes[id]
                .rating
                .as_ref()
                .map(|r| r.value > RatingValue::Impossible)
                .unwrap_or(false)
        })
        .collect();
    // State id order coincides with canonical-key order, so comparing states
    // directly gives the canonical-key-ascending tie-break.
    survivors.sort_by(|&x, &y| {
        let nx = &arena.nodes[x];
        let ny = &arena.nodes[y];
        let rx = nx
            .rating
            .as_ref()
            .map(|r| r.value)
            .unwrap_or(RatingValue::Impossible);
        let ry = ny
            .rating
            .as_ref()
            .map(|r| r.value)
            .unwrap_or(RatingValue::Impossible);
        ry.cmp(&rx)
            .then_with(|| ny.depth.cmp(&nx.depth))
            .then_with(|| nx.state.cmp(&ny.state))
    });
    survivors.truncate(b);
    Ok(survivors)
}

#[derive(Debug, Clone, Copy)]
pub struct ToiBfsParams {
    pub t_max: usize,
    pub k: usize,
    pub b: usize,
}

impl Default for ToiBfsParams {
    fn default() -> Self {
        ToiBfsParams {
            t_max: 20,
            k: 2,
            b: 2,
        }
    }
}

/// Beam-search planning loop: for each beam state, propose up to `k` actions,
/// query the world for their successors, stop as soon as an expansion reaches
/// the goal, and re-select the beam from old beam plus expansions.
pub fn run_toi_bfs<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    params: ToiBfsParams,
) -> PlannerOutcome
where
    P: ActionProposer + StateEvaluator + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let goal = world.goal().clone();
    let mut arena = NodeArena::with_root(s0);
    let mut beam: Vec<usize> = vec![0];
    let mut rating_cache: HashMap<State, Rating> = HashMap::new();

    for _ in 1..=params.t_max {
        trace.iterations += 1;
        let mut expansions: Vec<usize> = Vec::new();
        for &node_id in &beam {
            trace
                .expanded_ratings
                .push(arena.get(node_id).rating.as_ref().map(|r| r.value));
            let state = arena.get(node_id).state.clone();
            let valid = world.valid_actions(&state);
            if valid.is_empty() {
                continue;
            }
            let req = ProposalRequest {
                state: state.clone(),
                k: params.k,
                valid_actions: valid,
                feedback: None,
            };
            let proposals = match policy.propose_actions(&req, ctx) {
                Ok(p) => p,
                Err(PolicyError::Failure(_)) => {
                    return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
                }
            };
            for action in proposals {
                let step = match world.step(&state, &action) {
                    Ok(s) => s,
                    Err(_) => {
                        return scope.failure(world, policy, FailureReason::BudgetExhausted, trace)
                    }
                };
                if let Some(next) = step.next_state {
                    let child = arena.push_child(node_id, action, next.clone());
                    if world.goal_reached(&next) {
                        let plan = arena.backtrack(child);
                        return scope.success(world, policy, plan, trace);
                    }
                    expansions.push(child);
                }
            }
        }
        let mut candidates = beam.clone();
        candidates.extend(expansions);
        let mut rate = |state: &State| -> Result<Rating, PolicyError> {
            if let Some(hit) = rating_cache.get(state) {
                return Ok(hit.clone());
            }
            let rating = policy.evaluate_state(state, &goal, ctx)?;
            rating_cache.insert(state.clone(), rating.clone());
            Ok(rating)
        };
        beam = match update_beam(&mut arena, &candidates, &mut rate, params.b) {
            Ok(next) => next,
            Err(PolicyError::Failure(_)) => {
                return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
            }
        };
        trace.beam_sizes.push(beam.len());
        if beam.is_empty() {
            return scope.failure(world, policy, FailureReason::Unsolvable, trace);
        }
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}

#[derive(Debug, Clone, Copy)]
pub struct ToiDfsParams {
    pub t_max: usize,
    pub k: usize,
    /// Minimum rating a child needs to enter the stack.
    pub v_min: RatingValue,
}

impl Default for ToiDfsParams {
    fn default() -> Self {
        ToiDfsParams {
            t_max: 20,
            k: 2,
            v_min: RatingValue::Maybe,
        }
    }
}

/// Depth-first planning loop: pop the most promising state, propose up to
/// `k` actions, query the world, and push unseen children rated at or above
/// the threshold so the highest-rated is popped next.
pub fn run_toi_dfs<P>(
    world: &mut WorldModel,
    policy: &mut P,
    ctx: &WorldContext,
    params: ToiDfsParams,
) -> PlannerOutcome
where
    P: ActionProposer + StateEvaluator + ?Sized,
{
    let scope = RunScope::begin(world, policy);
    let mut trace = SearchTrace::default();
    let s0 = world.initial_state();
    if world.goal_reached(&s0) {
        return scope.success(world, policy, Vec::new(), trace);
    }
    let goal = world.goal().clone();
    let mut arena = NodeArena::with_root(s0.clone());
    let mut stack: Vec<usize> = vec![0];
    let mut visited: std::collections::HashSet<State> = std::collections::HashSet::new();
    visited.insert(s0);
    let mut rating_cache: HashMap<State, Rating> = HashMap::new();

    for _ in 1..=params.t_max {
        trace.iterations += 1;
        let node_id = match stack.pop() {
            Some(id) => id,
            None => return scope.failure(world, policy, FailureReason::Unsolvable, trace),
        };
        trace
            .expanded_ratings
            .push(arena.get(node_id).rating.as_ref().map(|r| r.value));
        let state = arena.get(node_id).state.clone();
        let valid = world.valid_actions(&state);
        if valid.is_empty() {
            continue;
        }
        let req = ProposalRequest {
            state: state.clone(),
            k: params.k,
            valid_actions: valid,
            feedback: None,
        };
        let proposals = match policy.propose_actions(&req, ctx) {
            Ok(p) => p,
            Err(PolicyError::Failure(_)) => {
                return scope.failure(world, policy, FailureReason::PolicyFailure, trace)
            }
        };
        let mut children: Vec<usize> = Vec::new();
        for action in proposals {
            let step = match world.step(&state, &action) {
                Ok(s) => s,
                Err(_) => {
                    return scope.failure(world, policy, FailureReason::BudgetExhausted, trace)
                }
            };
            if let Some(next) = step.next_state {
                if world.goal_reached(&next) {
                    let child = arena.push_child(node_id, action, next);
                    let plan = arena.backtrack(child);
                    return scope.success(world, policy, plan, trace);
                }
                if visited.contains(&next) {
                    continue;
                }
                let child = arena.push_child(node_id, action, next.clone());
                let rating = match rating_cache.get(&next) {
                    Some(hit) => hit.clone(),
                    None => match policy.evaluate_state(&next, &goal, ctx) {
                        Ok(r) => {
                            rating_cache.insert(next.clone(), r.clone());
                            r
                        }
                        Err(PolicyError::Failure(_)) => {
                            return scope.failure(
                                world,
                                policy,
                                FailureReason::PolicyFailure,
                                trace,
                            )
                        }
                    },
                };
                arena.nodes[child].rating = Some(rating.clone());
                if rating.value >= params.v_min {
                    visited.insert(next);
                    children.push(child);
                }
            }
        }
        // Highest-rated child pops next; proposal order breaks rating ties,
        // since the proposer already ranked the actions.
        children.sort_by(|&x, &y| {
            let rx = arena.get(x).rating.as_ref().map(|r| r.value).unwrap();
            let ry = arena.get(y).rating.as_ref().map(|r| r.value).unwrap();
            ry.cmp(&rx)
        });
        stack.extend(children.into_iter().rev());
        if stack.is_empty() {
            return scope.failure(world, policy, FailureReason::Unsolvable, trace);
        }
    }
    let reason = scope.exhausted_reason(world);
    scope.failure(world, policy, reason, trace)
}
