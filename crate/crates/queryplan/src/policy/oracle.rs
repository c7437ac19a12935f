//! Exhaustive-search oracle policy: exact goal distances via uncharged
//! breadth-first search over the reachable state space. Used as the
//! best-possible policy in ablations and as ground truth in tests.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::pddl::{
    applicable_actions, apply_action, satisfies_goal, ApplyOutcome, GroundAction, GroundedProblem,
    State,
};

use super::{
    ActionProposer, InteractionHistory, PlanGenerator, PolicyError, PolicyInfo, ProposalRequest,
    QuerySelector, Rating, RatingValue, Reactor, StateEvaluator, WorldContext,
};

pub const DEFAULT_ORACLE_STATE_CAP: usize = 200_000;
const DEFAULT_SURE_DISTANCE: u32 = 2;

/// Policy backed by exact breadth-first-search distances to the goal.
///
/// Construction enumerates the state space reachable from the initial state
/// (up to `state_cap`) and runs a reverse multi-source BFS from every
/// goal-satisfying state. States outside that enumeration fall back to a
/// memoized forward search.
pub struct OraclePolicy {
    grounded: GroundedProblem,
    dist: HashMap<State, u32>,
    enumerated: HashSet<State>,
    complete: bool,
    fallback: HashMap<State, Option<u32>>,
    /// Distance at or below which a state is rated `sure`.
    pub d_sure: u32,
}

impl OraclePolicy {
    pub fn new(grounded: &GroundedProblem) -> Self {
        Self::with_cap(grounded, DEFAULT_ORACLE_STATE_CAP)
    }

    pub fn with_cap(grounded: &GroundedProblem, state_cap: usize) -> Self {
        let goal = grounded.problem.goal.clone();
        let s0 = grounded.problem.init.clone();
        let actions = &grounded.actions;

        // Forward enumeration of the reachable space with successor edges.
        let mut index: HashMap<State, usize> = HashMap::new();
        let mut states: Vec<State> = Vec::new();
        let mut preds: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(s0.clone(), 0);
        states.push(s0);
        preds.push(Vec::new());
        queue.push_back(0usize);
        let mut complete = true;
        while let Some(i) = queue.pop_front() {
            let here = states[i].clone();
            for action in applicable_actions(&here, actions) {
                if let ApplyOutcome::Applied(next) = apply_action(&here, action) {
                    let j = match index.get(&next) {
                        Some(&j) => j,
                        None => {
                            if states.len() >= state_cap {
                                complete = false;
                                continue;
                            }
                            let j = states.len();
                            index.insert(next.clone(), j);
                            states.push(next);
                            preds.push(Vec::new());
                            queue.push_back(j);
                            j
                        }
                    };
                    preds[j].push(i);
                }
            }
        }

        // Reverse BFS from every goal-satisfying state.
        let mut dist_by_index: Vec<Option<u32>> = vec![None; states.len()];
        let mut queue = VecDeque::new();
        for (i, s) in states.iter().enumerate() {
            if satisfies_goal(s, &goal) {
                dist_by_index[i] = Some(0);
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            let d = dist_by_index[i].expect("queued states have distances");
            for &p in &preds[i] {
                if dist_by_index[p].is_none() {
                    dist_by_index[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }

        let mut dist = HashMap::new();
        let mut enumerated = HashSet::new();
        for (i, s) in states.into_iter().enumerate() {
            if let Some(d) = dist_by_index[i] {
                dist.insert(s.clone(), d);
            }
            enumerated.insert(s);
        }
        OraclePolicy {
            grounded: grounded.clone(),
            dist,
            enumerated,
            complete,
            fallback: HashMap::new(),
            d_sure: DEFAULT_SURE_DISTANCE,
        }
    }

    /// Exact optimal distance from `state` to the goal, `None` if unreachable.
    pub fn distance(&mut self, state: &State) -> Option<u32> {
        if let Some(&d) = self.dist.get(state) {
            return Some(d);
        }
        if self.complete && self.enumerated.contains(state) {
            return None;
        }
        if let Some(&cached) = self.fallback.get(state) {
            return cached;
        }
        let d = self.search_from(state);
        self.fallback.insert(state.clone(), d);
        d
    }

    fn search_from(&self, start: &State) -> Option<u32> {
        let goal = &self.grounded.problem.goal;
        if satisfies_goal(start, goal) {
            return Some(0);
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back((start.clone(), 0u32));
        while let Some((here, d)) = queue.pop_front() {
            // Reuse the table when the frontier re-enters the enumerated space.
            if let Some(&known) = self.dist.get(&here) {
                return Some(d + known);
            }
            if self.complete && self.enumerated.contains(&here) {
                continue;
            }
            for action in applicable_actions(&here, &self.grounded.actions) {
                if let ApplyOutcome::Applied(next) = apply_action(&here, action) {
                    if satisfies_goal(&next, goal) {
                        return Some(d + 1);
                    }
                    if seen.len() >= DEFAULT_ORACLE_STATE_CAP {
                        return None;
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back((next, d + 1));
                    }
                }
            }
        }
        None
    }

    /// Applicable actions at `state` ranked by successor distance, nearest
    /// first; display name breaks ties.
    fn ranked_actions(&mut self, state: &State) -> Vec<(GroundAction, Option<u32>)> {
        let applicable: Vec<GroundAction> = applicable_actions(state, &self.grounded.actions)
            .into_iter()
            .cloned()
            .collect();
        let mut ranked: Vec<(GroundAction, Option<u32>)> = applicable
            .into_iter()
            .map(|a| {
                let d = match apply_action(state, &a) {
                    ApplyOutcome::Applied(next) => self.distance(&next),
                    ApplyOutcome::Inapplicable(_) => None,
                };
                (a, d)
            })
            .collect();
        ranked.sort_by(|(a, da), (b, db)| {
            let ka = da.unwrap_or(u32::MAX);
            let kb = db.unwrap_or(u32::MAX);
            ka.cmp(&kb)
                .then_with(|| a.display_name.cmp(&b.display_name))
        });
        ranked
    }

    fn optimal_plan_from(&mut self, start: &State) -> Result<Vec<GroundAction>, PolicyError> {
        let mut d = self
            .distance(start)
            .ok_or_else(|| PolicyError::failure("goal unreachable from start state"))?;
        let mut plan = Vec::with_capacity(d as usize);
        let mut here = start.clone();
        while d > 0 {
            let ranked = self.ranked_actions(&here);
            let (action, next_d) = ranked
                .into_iter()
                .find(|(_, nd)| *nd == Some(d - 1))
                .map(|(a, nd)| (a, nd.expect("matched Some")))
                .ok_or_else(|| PolicyError::failure("no distance-decreasing action"))?;
            match apply_action(&here, &action) {
                ApplyOutcome::Applied(next) => here = next,
                ApplyOutcome::Inapplicable(_) => {
                    return Err(PolicyError::failure("ranked action was inapplicable"))
                }
            }
            plan.push(action);
            d = next_d;
        }
        Ok(plan)
    }
}

impl PolicyInfo for OraclePolicy {}

impl ActionProposer for OraclePolicy {
    fn propose_actions(
        &mut self,
        req: &ProposalRequest,
        _ctx: &WorldContext,
    ) -> Result<Vec<GroundAction>, PolicyError> {
        if req.valid_actions.is_empty() {
            return Err(PolicyError::failure("no valid actions to propose from"));
        }
        let valid: HashSet<&str> = req
            .valid_actions
            .iter()
            .map(|a| a.display_name.as_str())
            .collect();
        let picks: Vec<GroundAction> = self
            .ranked_actions(&req.state)
            .into_iter()
            .filter(|(a, _)| valid.contains(a.display_name.as_str()))
            .take(req.k)
            .map(|(a, _)| a)
            .collect();
        Ok(picks)
    }
}

impl StateEvaluator for OraclePolicy {
    fn evaluate_state(
        &mut self,
        state: &State,
        _goal: &State,
        _ctx: &WorldContext,
    ) -> Result<Rating, PolicyError> {
        let value = match self.distance(state) {
            Some(d) if d <= self.d_sure => RatingValue::Certain,
            Some(_) => RatingValue::Maybe,
            None => RatingValue::Impossible,
        };
        Ok(Rating::canonical(value))
    }
}

impl PlanGenerator for OraclePolicy {
    fn generate_plan(
        &mut self,
        start: &State,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
        _valid_at_start: &[GroundAction],
    ) -> Result<Vec<GroundAction>, PolicyError> {
        let plan = self.optimal_plan_from(start)?;
        if plan.is_empty() {
            return Err(PolicyError::failure(
                "goal already satisfied, nothing to plan",
            ));
        }
        Ok(plan)
    }
}

impl Reactor for OraclePolicy {
    fn next_action(
        &mut self,
        state: &State,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
    ) -> Result<GroundAction, PolicyError> {
        let d = self
            .distance(state)
            .ok_or_else(|| PolicyError::failure("goal unreachable from current state"))?;
        if d == 0 {
            return Err(PolicyError::failure("goal already satisfied"));
        }
        self.ranked_actions(state)
            .into_iter()
            .find(|(_, nd)| *nd == Some(d - 1))
            .map(|(a, _)| a)
            .ok_or_else(|| PolicyError::failure("no distance-decreasing action"))
    }
}

impl QuerySelector for OraclePolicy {
    fn select_query(
        &mut self,
        ctx: &WorldContext,
        history: &InteractionHistory,
        visited: &[State],
    ) -> Result<(usize, GroundAction), PolicyError> {
        if visited.is_empty() {
            return Err(PolicyError::failure("no visited states to select from"));
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, s) in visited.iter().enumerate() {
            if let Some(d) = self.distance(s) {
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
        }
        let (idx, _) =
            best.ok_or_else(|| PolicyError::failure("goal unreachable from every visited state"))?;
        let action = self.next_action(&visited[idx], ctx, history)?;
        Ok((idx, action))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::parse_pddl;

    fn grounded() -> GroundedProblem {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        GroundedProblem::new(p).unwrap()
    }

    fn ctx() -> WorldContext {
        WorldContext::new("test", "test")
    }

    #[test]
    fn distance_from_start_is_four() {
        let g = grounded();
        let mut o = OraclePolicy::new(&g);
        assert_eq!(o.distance(&g.problem.init), Some(4));
    }

    #[test]
    fn generated_plan_is_optimal_and_executes() {
        let g = grounded();
        let mut o = OraclePolicy::new(&g);
        let plan = o
            .generate_plan(&g.problem.init, &ctx(), &InteractionHistory::new(), &[])
            .unwrap();
        assert_eq!(plan.len(), 4);
        let mut s = g.problem.init.clone();
        for a in &plan {
            match apply_action(&s, a) {
                ApplyOutcome::Applied(next) => s = next,
                other => panic!("oracle plan step failed: {other:?}"),
            }
        }
        assert!(satisfies_goal(&s, &g.problem.goal));
    }

    #[test]
    fn proposals_are_ranked_prefix_of_valid_actions() {
        let g = grounded();
        let mut o = OraclePolicy::new(&g);
        let valid: Vec<GroundAction> = applicable_actions(&g.problem.init, &g.actions)
            .into_iter()
            .cloned()
            .collect();
        let req = ProposalRequest {
            state: g.problem.init.clone(),
            k: 2,
            valid_actions: valid.clone(),
            feedback: None,
        };
        let picks = o.propose_actions(&req, &ctx()).unwrap();
        assert_eq!(picks.len(), 2);
        // First pick starts an optimal plan.
        assert_eq!(picks[0].display_name, "unstack(a:default,b:default)");
        for p in &picks {
            assert!(valid.iter().any(|v| v == p));
        }
        // Clamps to the valid set when k exceeds it.
        let req = ProposalRequest {
            state: g.problem.init.clone(),
            k: 99,
            valid_actions: valid.clone(),
            feedback: None,
        };
        assert_eq!(o.propose_actions(&req, &ctx()).unwrap().len(), valid.len());
    }

    #[test]
    fn ratings_follow_the_distance_band() {
        let g = grounded();
        let mut o = OraclePolicy::new(&g);
        let goal = g.problem.goal.clone();
        // Start is 4 away: maybe.
        assert_eq!(
            o.evaluate_state(&g.problem.init, &goal, &ctx())
                .unwrap()
                .value,
            RatingValue::Maybe
        );
        // A goal-satisfying state rates sure.
        let done = g
            .problem
            .state_from_atoms(&[
                crate::pddl::Atom::new("on", vec!["b".into(), "c".into()]),
                crate::pddl::Atom::new("ontable", vec!["c".into()]),
                crate::pddl::Atom::new("ontable", vec!["a".into()]),
                crate::pddl::Atom::new("clear", vec!["a".into()]),
                crate::pddl::Atom::new("clear", vec!["b".into()]),
                crate::pddl::Atom::new("handempty", vec![]),
            ])
            .unwrap();
        assert_eq!(
            o.evaluate_state(&done, &goal, &ctx()).unwrap().value,
            RatingValue::Certain
        );
    }

    #[test]
    fn unreachable_goal_rates_impossible() {
        // A one-way domain: burning a block destroys it for good.
        let domain = "(define (domain burny) (:requirements :strips)
            (:predicates (fresh ?x) (burned ?x))
            (:action burn :parameters (?x)
              :precondition (fresh ?x)
              :effect (and (not (fresh ?x)) (burned ?x))))";
        let problem = "(define (problem b1) (:domain burny)
            (:objects x) (:init (fresh x)) (:goal (fresh x)))";
        let p = parse_pddl(domain, problem).unwrap();
        let g = GroundedProblem::new(p).unwrap();
        let mut o = OraclePolicy::new(&g);
        let burned = g
            .problem
            .state_from_atoms(&[crate::pddl::Atom::new("burned", vec!["x".into()])])
            .unwrap();
        assert_eq!(
            o.evaluate_state(&burned, &g.problem.goal, &ctx())
                .unwrap()
                .value,
            RatingValue::Impossible
        );
    }

    #[test]
    fn select_query_prefers_the_closest_visited_state() {
        let g = grounded();
        let mut o = OraclePolicy::new(&g);
        let s0 = g.problem.init.clone();
        let mid = {
            let a = crate::pddl::parse_action_string("unstack(a,b)", &g.actions).unwrap();
            match apply_action(&s0, a) {
                ApplyOutcome::Applied(next) => next,
                _ => unreachable!(),
            }
        };
        let visited = vec![s0, mid];
        let (idx, action) = o
            .select_query(&ctx(), &InteractionHistory::new(), &visited)
            .unwrap();
        assert_eq!(idx, 1);
        assert_eq!(action.display_name, "put-down(a:default)");
    }
}
