//! Deterministic replay policy: every operation pops the next scripted
//! answer. With the same script, a whole planner run is byte-reproducible.

use crate::pddl::{GroundAction, State};

use super::{
    ActionProposer, InteractionHistory, PlanGenerator, PolicyError, PolicyInfo, ProposalRequest,
    QuerySelector, Rating, Reactor, StateEvaluator, WorldContext,
};

#[derive(Debug)]
struct Queue<T> {
    items: Vec<T>,
    next: usize,
}

impl<T> Default for Queue<T> {
    fn default() -> Self {
        Queue {
            items: Vec::new(),
            next: 0,
        }
    }
}

impl<T: Clone> Queue<T> {
    fn pop(&mut self, looped: bool, what: &str) -> Result<T, PolicyError> {
        if self.items.is_empty() {
            return Err(PolicyError::failure(format!(
                "script has no {what} entries"
            )));
        }
        if self.next >= self.items.len() {
            if !looped {
                return Err(PolicyError::failure(format!(
                    "script ran out of {what} entries"
                )));
            }
            self.next = 0;
        }
        let item = self.items[self.next].clone();
        self.next += 1;
        Ok(item)
    }
}

/// Plays back pre-recorded decisions, one queue per operation kind.
///
/// With `looping` enabled, exhausted queues restart from the top, which is
/// how cycling policies are scripted.
#[derive(Debug, Default)]
pub struct ScriptedPolicy {
    plans: Queue<Vec<GroundAction>>,
    actions: Queue<GroundAction>,
    proposals: Queue<Vec<GroundAction>>,
    ratings: Queue<Rating>,
    selections: Queue<(usize, GroundAction)>,
    looping: bool,
}

impl ScriptedPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Restart each queue from the top when it runs out.
    pub fn looping(mut self) -> Self {
        self.looping = true;
        self
    }

    pub fn with_plans(mut self, plans: Vec<Vec<GroundAction>>) -> Self {
        self.plans.items = plans;
        self
    }

    pub fn with_actions(mut self, actions: Vec<GroundAction>) -> Self {
        self.actions.items = actions;
        self
    }

    pub fn with_proposals(mut self, proposals: Vec<Vec<GroundAction>>) -> Self {
        self.proposals.items = proposals;
        self
    }

    pub fn with_ratings(mut self, ratings: Vec<Rating>) -> Self {
        self.ratings.items = ratings;
        self
    }

    pub fn with_selections(mut self, selections: Vec<(usize, GroundAction)>) -> Self {
        self.selections.items = selections;
        self
    }
}

impl PolicyInfo for ScriptedPolicy {}

impl PlanGenerator for ScriptedPolicy {
    fn generate_plan(
        &mut self,
        _start: &State,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
        _valid_at_start: &[GroundAction],
    ) -> Result<Vec<GroundAction>, PolicyError> {
        self.plans.pop(self.looping, "plan")
    }
}

impl Reactor for ScriptedPolicy {
    fn next_action(
        &mut self,
        _state: &State,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
    ) -> Result<GroundAction, PolicyError> {
        self.actions.pop(self.looping, "action")
    }
}

impl ActionProposer for ScriptedPolicy {
    fn propose_actions(
        &mut self,
        _req: &ProposalRequest,
        _ctx: &WorldContext,
    ) -> Result<Vec<GroundAction>, PolicyError> {
        self.proposals.pop(self.looping, "proposal")
    }
}

impl StateEvaluator for ScriptedPolicy {
    fn evaluate_state(
        &mut self,
        _state: &State,
        _goal: &State,
        _ctx: &WorldContext,
    ) -> Result<Rating, PolicyError> {
        self.ratings.pop(self.looping, "rating")
    }
}

impl QuerySelector for ScriptedPolicy {
    fn select_query(
        &mut self,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
        visited: &[State],
    ) -> Result<(usize, GroundAction), PolicyError> {
        let (idx, action) = self.selections.pop(self.looping, "selection")?;
        if idx >= visited.len() {
            return Err(PolicyError::failure(format!(
                "scripted selection references state {idx}, only {} visited",
                visited.len()
            )));
        }
        Ok((idx, action))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{parse_action_string, parse_pddl, GroundedProblem};

    #[test]
    fn replay_is_ordered_and_exhaustible() {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        let g = GroundedProblem::new(p).unwrap();
        let a1 = parse_action_string("unstack(a,b)", &g.actions)
            .unwrap()
            .clone();
        let a2 = parse_action_string("put-down(a)", &g.actions)
            .unwrap()
            .clone();
        let mut s = ScriptedPolicy::new().with_actions(vec![a1.clone(), a2.clone()]);
        let ctx = WorldContext::new("t", "t");
        let h = InteractionHistory::new();
        assert_eq!(s.next_action(&g.problem.init, &ctx, &h).unwrap(), a1);
        assert_eq!(s.next_action(&g.problem.init, &ctx, &h).unwrap(), a2);
        assert!(s.next_action(&g.problem.init, &ctx, &h).is_err());

        let mut looped = ScriptedPolicy::new()
            .with_actions(vec![a1.clone(), a2.clone()])
            .looping();
        for _ in 0..3 {
            assert_eq!(looped.next_action(&g.problem.init, &ctx, &h).unwrap(), a1);
            assert_eq!(looped.next_action(&g.problem.init, &ctx, &h).unwrap(), a2);
        }
    }
}
