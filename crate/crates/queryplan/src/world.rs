//! The metered world model: every distinct (state, action) evaluation charges
//! one world-model query (WMQ) against a per-run budget; repeats are served
//! from a cache for free. Plans are verified lazily, stopping at the first
//! invalid action with structured feedback. Goal checks are predicate tests on
//! states already in hand and cost nothing.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::pddl::{
    applicable_actions, apply_action, satisfies_goal, ApplyOutcome, GroundAction, GroundedProblem,
    ProblemInstance, State,
};

/// Raised when an uncached query would exceed the budget. Terminal for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("world model query budget exhausted")]
pub struct BudgetExhausted;

pub const DEFAULT_BUDGET: u32 = 20;

/// Monotone counters for a single run. `used` never exceeds the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLedger {
    pub budget: Option<u32>,
    pub used: u64,
    pub cache_hits: u64,
}

impl QueryLedger {
    pub fn new(budget: Option<u32>) -> Self {
        QueryLedger {
            budget,
            used: 0,
            cache_hits: 0,
        }
    }

    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| u64::from(b).saturating_sub(self.used))
    }

    pub fn exhausted(&self) -> bool {
        self.remaining() == Some(0)
    }

    fn charge(&mut self) -> Result<(), BudgetExhausted> {
        if self.exhausted() {
            return Err(BudgetExhausted);
        }
        self.used += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ErrorKind {
    InvalidAction,
    UnknownAction,
    GoalNotReached,
}

/// Structured feedback from the world, rendered through fixed templates so
/// identical failures produce byte-identical text across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorFeedback {
    pub kind: ErrorKind,
    /// Zero-based position in the submitted plan, when one applies.
    pub action_index: Option<usize>,
    pub detail: String,
}

impl ErrorFeedback {
    fn invalid(action: &GroundAction, index: Option<usize>, missing: &[String]) -> Self {
        let atoms = missing.join(", ");
        let detail = match index {
            Some(i) => format!(
                "invalid action {} at step {}: unsatisfied precondition(s): {}",
                action.display_name,
                i + 1,
                atoms
            ),
            None => format!(
                "invalid action {}: unsatisfied precondition(s): {}",
                action.display_name, atoms
            ),
        };
        ErrorFeedback {
            kind: ErrorKind::InvalidAction,
            action_index: index,
            detail,
        }
    }

    pub fn unknown_action(text: &str) -> Self {
        ErrorFeedback {
            kind: ErrorKind::UnknownAction,
            action_index: None,
            detail: format!("unknown action '{text}'"),
        }
    }

    fn goal_not_reached(missing: &[String]) -> Self {
        ErrorFeedback {
            kind: ErrorKind::GoalNotReached,
            action_index: None,
            detail: format!(
                "plan executed fully but goal not reached; unsatisfied goal atom(s): {}",
                missing.join(", ")
            ),
        }
    }
}

impl fmt::Display for ErrorFeedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)
    }
}

/// One transition query's answer: the next state, or feedback on why not.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub next_state: Option<State>,
    pub error: Option<ErrorFeedback>,
    /// False when the answer came from the cache.
    pub charged: bool,
}

/// Executed prefix of a plan: `states[0]` is the start, and
/// `states[i+1] = apply(states[i], actions[i])` for every step taken.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub actions: Vec<GroundAction>,
}

impl Trajectory {
    pub fn start(s0: State) -> Self {
        Trajectory {
            states: vec![s0],
            actions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn last_state(&self) -> &State {
        self.states.last().expect("trajectory has a start state")
    }
}

/// Result of rolling a plan through the world model.
#[derive(Debug, Clone)]
pub struct VerificationResult {
    pub trajectory: Trajectory,
    pub reached_goal: bool,
    pub error: Option<ErrorFeedback>,
    /// Queries charged by this verification (cached prefixes are free).
    pub new_queries: u64,
    /// True when the rollout stopped because the budget ran out mid-plan.
    pub budget_exhausted: bool,
}

#[derive(Clone)]
enum Cached {
    Next(State),
    Missing(Arc<[String]>),
}

/// A metered, caching transition oracle for one problem run.
///
/// Planners only touch the ledger through [`WorldModel::step`] and
/// [`WorldModel::verify_plan`]; [`WorldModel::valid_actions`] and goal checks
/// are free predicate tests on states the planner already holds.
pub struct WorldModel {
    problem: Arc<ProblemInstance>,
    ground: Arc<Vec<GroundAction>>,
    ledger: QueryLedger,
    cache: HashMap<(State, u32), Cached>,
}

impl WorldModel {
    pub fn new(grounded: &GroundedProblem, budget: Option<u32>) -> Self {
        WorldModel {
            problem: Arc::clone(&grounded.problem),
            ground: Arc::clone(&grounded.actions),
            ledger: QueryLedger::new(budget),
            cache: HashMap::new(),
        }
    }

    pub fn problem(&self) -> &Arc<ProblemInstance> {
        &self.problem
    }

    pub fn initial_state(&self) -> State {
        self.problem.init.clone()
    }

    pub fn goal(&self) -> &State {
        &self.problem.goal
    }

    pub fn ground_actions(&self) -> &[GroundAction] {
        &self.ground
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn goal_reached(&self, state: &State) -> bool {
        satisfies_goal(state, &self.problem.goal)
    }

    /// Applicable subset of the ground set at `state`. Uncharged: this is a
    /// precondition test on a state already in hand, not a transition query.
    pub fn valid_actions(&self, state: &State) -> Vec<GroundAction> {
        applicable_actions(state, &self.ground)
            .into_iter()
            .cloned()
            .collect()
    }

    /// Evaluate one transition. A cache miss charges one WMQ and stores the
    /// outcome (inapplicable outcomes included); a hit charges nothing.
    pub fn step(
        &mut self,
        state: &State,
        action: &GroundAction,
    ) -> Result<StepResult, BudgetExhausted> {
        self.step_indexed(state, action, None)
    }

    fn step_indexed(
        &mut self,
        state: &State,
        action: &GroundAction,
        plan_index: Option<usize>,
    ) -> Result<StepResult, BudgetExhausted> {
        let key = (state.clone(), action.index);
        let (cached, charged) = match self.cache.get(&key) {
            Some(hit) => {
                self.ledger.cache_hits += 1;
                (hit.clone(), false)
            }
            None => {
                self.ledger.charge()?;
                let outcome = match apply_action(state, action) {
                    ApplyOutcome::Applied(next) => Cached::Next(next),
                    ApplyOutcome::Inapplicable(missing) => Cached::Missing(
                        missing.iter().map(|a| a.plain()).collect::<Vec<_>>().into(),
                    ),
                };
                self.cache.insert(key, outcome.clone());
                (outcome, true)
            }
        };
        Ok(match cached {
            Cached::Next(next) => StepResult {
                next_state: Some(next),
                error: None,
                charged,
            },
            Cached::Missing(missing) => StepResult {
                next_state: None,
                error: Some(ErrorFeedback::invalid(action, plan_index, &missing)),
                charged,
            },
        })
    }

    /// Roll a plan out from `s0`, stopping at the first invalid action. The
    /// returned trajectory is the verified prefix; cached prefixes charge
    /// nothing, and the goal check is free.
    pub fn verify_plan(
        &mut self,
        s0: &State,
        plan: &[GroundAction],
        goal: &State,
    ) -> VerificationResult {
        let mut trajectory = Trajectory::start(s0.clone());
        let mut new_queries = 0u64;
        for (i, action) in plan.iter().enumerate() {
            let current = trajectory.last_state().clone();
            match self.step_indexed(&current, action, Some(i)) {
                Ok(result) => {
                    if result.charged {
                        new_queries += 1;
                    }
                    match result.next_state {
                        Some(next) => {
                            trajectory.actions.push(action.clone());
                            trajectory.states.push(next);
                        }
                        None => {
                            return VerificationResult {
                                trajectory,
                                reached_goal: false,
                                error: result.error,
                                new_queries,
                                budget_exhausted: false,
                            }
                        }
                    }
                }
                Err(BudgetExhausted) => {
                    return VerificationResult {
                        trajectory,
                        reached_goal: false,
                        error: None,
                        new_queries,
                        budget_exhausted: true,
                    }
                }
            }
        }
        let final_state = trajectory.last_state();
        if satisfies_goal(final_state, goal) {
            VerificationResult {
                trajectory,
                reached_goal: true,
                error: None,
                new_queries,
                budget_exhausted: false,
            }
        } else {
            let missing: Vec<String> = goal
                .atoms()
                .filter(|a| !final_state.contains(a))
                .map(|a| a.plain())
                .collect();
            VerificationResult {
                trajectory,
                reached_goal: false,
                error: Some(ErrorFeedback::goal_not_reached(&missing)),
                new_queries,
                budget_exhausted: false,
            }
        }
    }
}
