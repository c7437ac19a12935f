//! Seeded random policy: uniform choices over the ground action set.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pddl::{GroundAction, GroundedProblem, State};

use super::{
    ActionProposer, InteractionHistory, PolicyError, PolicyInfo, ProposalRequest, Rating,
    RatingValue, Reactor, StateEvaluator, WorldContext,
};

pub struct RandomPolicy {
    grounded: GroundedProblem,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(grounded: &GroundedProblem, seed: u64) -> Self {
        RandomPolicy {
            grounded: grounded.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PolicyInfo for RandomPolicy {}

impl Reactor for RandomPolicy {
    /// A pseudo-random member of the whole ground set; the world model
    /// adjudicates applicability.
    fn next_action(
        &mut self,
        _state: &State,
        _ctx: &WorldContext,
        _history: &InteractionHistory,
    ) -> Result<GroundAction, PolicyError> {
        self.grounded
            .actions
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| PolicyError::failure("empty ground action set"))
    }
}

impl ActionProposer for RandomPolicy {
    fn propose_actions(
        &mut self,
        req: &ProposalRequest,
        _ctx: &WorldContext,
    ) -> Result<Vec<GroundAction>, PolicyError> {
        if req.valid_actions.is_empty() {
            return Err(PolicyError::failure("no valid actions to propose from"));
        }
        let mut pool = req.valid_actions.clone();
        pool.shuffle(&mut self.rng);
        pool.truncate(req.k);
        Ok(pool)
    }
}

impl StateEvaluator for RandomPolicy {
    fn evaluate_state(
        &mut self,
        _state: &State,
        _goal: &State,
        _ctx: &WorldContext,
    ) -> Result<Rating, PolicyError> {
        let value = match self.rng.random_range(0..3u8) {
            0 => RatingValue::Impossible,
            1 => RatingValue::Maybe,
            _ => RatingValue::Certain,
        };
        Ok(Rating::canonical(value))
    }
}
