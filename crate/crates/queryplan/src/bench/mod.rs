//! Benchmark harness: problem generation, an exact optimality oracle, suite
//! execution over (problem, planner, seed) triples, and metric outputs as
//! line-delimited JSON and fixed-column CSV.

mod generator;
mod oracle;
mod suite;
mod summary;

pub use generator::{gen_blocksworld, gen_blocksworld_pddl};
pub use oracle::{optimal_length_oracle, DEFAULT_STATE_CAP};
pub use suite::{
    context_for_problem, run_suite, run_suite_with_client, GeneratorConfig, PlannerConfig,
    PlannerKind, PolicyKind, SuiteConfig, SuiteError, SuiteMode, SuiteResult, SuiteSection,
};
pub use summary::{
    histogram_csv, records_csv, records_jsonl, summarize, summary_csv, PlannerSummary,
    SuiteSummary, WmqHistogram,
};

use serde::{Deserialize, Serialize};

use crate::planners::FailureReason;

/// Per-run benchmark outcome. Wall time is recorded for observability only;
/// it is deliberately excluded from the CSV so replayed suites are
/// byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem_id: String,
    pub planner_id: String,
    pub seed: u64,
    pub success: bool,
    /// Present only when the optimality oracle resolved this problem.
    pub optimal: Option<bool>,
    pub wmq_used: u64,
    pub plan_length: Option<usize>,
    pub optimal_length: Option<usize>,
    pub llm_calls: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub malformed_actions: u64,
    #[serde(default)]
    pub history_truncated: bool,
    pub failure_reason: Option<FailureReason>,
    pub wall_time_ms: u64,
}
