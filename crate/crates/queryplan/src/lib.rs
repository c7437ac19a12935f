//! Query-budgeted planning over STRIPS domains.
//!
//! Everything here revolves around a metered world model: a deterministic
//! transition oracle that charges one world-model query (WMQ) per distinct
//! (state, action) evaluation, serves repeats from a cache for free, and
//! enforces a hard per-run budget. On top of it sit two families of planners —
//! policies that drive a search tree (beam and depth-first variants with an
//! action proposer and a three-way state evaluator) and generative planners
//! that propose whole action sequences and replan from structured feedback —
//! plus single-shot baselines, classical heuristic search with the same query
//! accounting, and a lazy posterior-sampling shortest-path testbed with regret
//! instrumentation.
//!
//! The `bench` module adds problem generation, an exact optimality oracle,
//! suite execution, and CSV/JSONL metrics; the `llm` module turns policy
//! needs into chat prompts for any OpenAI-compatible endpoint and records
//! transcripts so whole runs replay deterministically offline.
//!
//! See the crate examples for one runnable entry point per capability, and
//! the `queryplan` binary for the command-line harness.

pub mod bench;
pub mod classical;
pub mod llm;
pub mod pddl;
pub mod planners;
pub mod policy;
pub mod world;

/// Checked-in PDDL fixtures for the three bundled domains.
pub mod fixtures {
    pub const BLOCKSWORLD_DOMAIN: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/blocksworld/domain.pddl"
    ));
    pub const BLOCKS3_PROBLEM: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/blocksworld/p3.pddl"
    ));
    pub const GRIPPERS_DOMAIN: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/grippers/domain.pddl"
    ));
    pub const GRIPPERS_P1: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/grippers/p1.pddl"
    ));
    pub const LOGISTICS_DOMAIN: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/logistics/domain.pddl"
    ));
    pub const LOGISTICS_P1: &str = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/logistics/p1.pddl"
    ));
}

pub use pddl::{
    applicable_actions, apply_action, ground_problem, parse_action_string, parse_pddl,
    satisfies_goal, ApplyOutcome, Atom, GroundAction, GroundedProblem, PddlError, ProblemInstance,
    State,
};
pub use planners::{FailureReason, PlannerOutcome};
pub use world::{ErrorFeedback, ErrorKind, QueryLedger, StepResult, Trajectory, WorldModel};
