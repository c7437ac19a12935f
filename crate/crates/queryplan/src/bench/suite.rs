//! Suite execution: every (problem, planner, seed) triple runs with a fresh
//! world model and ledger; records stream to line-delimited JSON and fixed
//! CSVs. Per-run failures are recorded, never fatal; configuration errors
//! abort before any run starts.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use crate::classical::{run_best_first, HeuristicContext, HeuristicKind};
use crate::llm::{LlmClient, LlmConfig, LlmPolicy, LlmPolicyConfig, PromptKind, TranscriptWriter};
use crate::pddl::{parse_pddl, GroundedProblem};
use crate::planners::{
    run_boomerang, run_io, run_react, run_react_select, run_reflexion, run_toi_bfs, run_toi_dfs,
    IoVariant, PlannerOutcome, ToiBfsParams, ToiDfsParams,
};
use crate::policy::{OraclePolicy, RandomPolicy, RatingValue, WorldContext};
use crate::world::WorldModel;

use super::{optimal_length_oracle, summarize, RunRecord, SuiteSummary, DEFAULT_STATE_CAP};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Pddl(#[from] crate::pddl::PddlError),
    #[error(transparent)]
    Llm(#[from] crate::llm::LlmError),
}

fn config_err(msg: impl Into<String>) -> SuiteError {
    SuiteError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteMode {
    /// Non-LLM policies only; no network, no transcript.
    Offline,
    /// LLM policies answered from a transcript; network is unreachable.
    Replay,
    /// LLM policies served over HTTP; exchanges optionally recorded.
    Live,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GeneratorConfig {
    pub family: String,
    pub n_blocks: usize,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    ToiBfs,
    ToiDfs,
    Boomerang,
    React,
    ReactSelect,
    Reflexion,
    Io,
    IoCot,
    IoP,
    IoCotP,
    Astar,
    Wastar,
    Gbfs,
}

impl PlannerKind {
    fn is_classical(self) -> bool {
        matches!(
            self,
            PlannerKind::Astar | PlannerKind::Wastar | PlannerKind::Gbfs
        )
    }

    fn io_variant(self) -> Option<IoVariant> {
        match self {
            PlannerKind::Io => Some(IoVariant::Io),
            PlannerKind::IoCot => Some(IoVariant::IoCot),
            PlannerKind::IoP => Some(IoVariant::IoP),
            PlannerKind::IoCotP => Some(IoVariant::IoCotP),
            _ => None,
        }
    }

    fn plan_prompt_kind(self) -> PromptKind {
        match self {
            PlannerKind::Io => PromptKind::Io,
            PlannerKind::IoCot => PromptKind::IoCot,
            PlannerKind::IoP => PromptKind::IoP,
            PlannerKind::IoCotP => PromptKind::IoCotP,
            _ => PromptKind::BoomerangPlan,
        }
    }

    fn react_prompt_kind(self) -> PromptKind {
        match self {
            PlannerKind::Reflexion => PromptKind::Reflexion,
            _ => PromptKind::ReactStep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[default]
    Oracle,
    Random,
    Llm,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PlannerConfig {
    pub kind: PlannerKind,
    #[serde(default)]
    pub policy: PolicyKind,
    pub t_max: Option<usize>,
    pub k: Option<usize>,
    pub b: Option<usize>,
    /// Minimum rating for depth-first expansion: "maybe" or "sure".
    pub v_min: Option<String>,
    pub heuristic: Option<HeuristicKind>,
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SuiteSection {
    pub domain: Option<PathBuf>,
    #[serde(default)]
    pub problems: Vec<PathBuf>,
    pub generator: Option<GeneratorConfig>,
    /// World-model query budget per run; 0 means unlimited.
    #[serde(default = "default_budget")]
    pub budget: u32,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_mode")]
    pub mode: SuiteMode,
    /// Replay source, or recording sink in live mode.
    pub transcript: Option<PathBuf>,
    pub records_jsonl: Option<PathBuf>,
    pub records_csv: Option<PathBuf>,
    pub summary_csv: Option<PathBuf>,
    pub histogram_csv: Option<PathBuf>,
    #[serde(default = "default_state_cap")]
    pub optimal_state_cap: usize,
    /// Translate states to natural language through the model.
    #[serde(default)]
    pub translate_states: bool,
}

fn default_budget() -> u32 {
    crate::world::DEFAULT_BUDGET
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_mode() -> SuiteMode {
    SuiteMode::Offline
}

fn default_state_cap() -> usize {
    DEFAULT_STATE_CAP
}

#[derive(Debug, Clone, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteSection,
    pub llm: Option<LlmConfig>,
    #[serde(default)]
    pub planners: BTreeMap<String, PlannerConfig>,
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, SuiteError> {
        toml::from_str(text).map_err(|e| config_err(format!("TOML parse: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, SuiteError> {
        let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), SuiteError> {
        if self.planners.is_empty() {
            return Err(config_err("planner list is empty"));
        }
        if self.suite.seeds.is_empty() {
            return Err(config_err("seeds list is empty"));
        }
        let has_files = !self.suite.problems.is_empty();
        let has_gen = self.suite.generator.is_some();
        if has_files == has_gen {
            return Err(config_err(
                "exactly one of suite.problems or suite.generator must be set",
            ));
        }
        if has_files && self.suite.domain.is_none() {
            return Err(config_err("suite.domain is required with suite.problems"));
        }
        let any_llm = self.planners.values().any(|p| p.policy == PolicyKind::Llm);
        match self.suite.mode {
            SuiteMode::Offline => {
                if any_llm {
                    return Err(config_err(
                        "llm policies require mode = \"replay\" or \"live\"",
                    ));
                }
            }
            SuiteMode::Replay => {
                if self.suite.transcript.is_none() {
                    return Err(config_err("replay mode requires suite.transcript"));
                }
            }
            SuiteMode::Live => {}
        }
        for (id, planner) in &self.planners {
            if planner.kind.is_classical() && planner.policy == PolicyKind::Llm {
                return Err(config_err(format!(
                    "planner '{id}': classical kinds take no llm policy"
                )));
            }
            if let Some(v) = &planner.v_min {
                parse_v_min(v).ok_or_else(|| {
                    config_err(format!("planner '{id}': v_min must be 'maybe' or 'sure'"))
                })?;
            }
        }
        Ok(())
    }

    fn budget_opt(&self) -> Option<u32> {
        if self.suite.budget == 0 {
            None
        } else {
            Some(self.suite.budget)
        }
    }
}

fn parse_v_min(text: &str) -> Option<RatingValue> {
    match text.to_lowercase().as_str() {
        "maybe" => Some(RatingValue::Maybe),
        "sure" | "certain" => Some(RatingValue::Certain),
        _ => None,
    }
}

/// Minimal glob support: a literal path, or one `*` in the file name.
fn expand_glob(pattern: &Path) -> Result<Vec<PathBuf>, SuiteError> {
    let name = pattern
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    if !name.contains('*') {
        return Ok(vec![pattern.to_path_buf()]);
    }
    let (prefix, suffix) = name.split_once('*').expect("checked");
    let dir = pattern.parent().unwrap_or_else(|| Path::new("."));
    let mut matches = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|source| SuiteError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| SuiteError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let file_name = entry.file_name();
        let file_name = file_name.to_string_lossy();
        if file_name.starts_with(prefix) && file_name.ends_with(suffix) {
            matches.push(entry.path());
        }
    }
    matches.sort();
    Ok(matches)
}

fn load_problems(cfg: &SuiteConfig) -> Result<Vec<(String, GroundedProblem)>, SuiteError> {
    if let Some(generator) = &cfg.suite.generator {
        if generator.family != "blocksworld" {
            return Err(config_err(format!(
                "unknown generator family '{}'",
                generator.family
            )));
        }
        let mut out = Vec::new();
        for i in 0..generator.count {
            let seed = generator.seed + i as u64;
            let problem = super::gen_blocksworld(generator.n_blocks, seed);
            let id = problem.name.clone();
            out.push((id, GroundedProblem::new(problem)?));
        }
        return Ok(out);
    }
    let domain_path = cfg.suite.domain.as_ref().expect("validated");
    let domain_text = std::fs::read_to_string(domain_path).map_err(|source| SuiteError::Io {
        path: domain_path.clone(),
        source,
    })?;
    let mut out = Vec::new();
    for pattern in &cfg.suite.problems {
        for path in expand_glob(pattern)? {
            let text = std::fs::read_to_string(&path).map_err(|source| SuiteError::Io {
                path: path.clone(),
                source,
            })?;
            let problem = parse_pddl(&domain_text, &text)?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| problem.name.clone());
            out.push((id, GroundedProblem::new(problem)?));
        }
    }
    if out.is_empty() {
        return Err(config_err("no problem files matched"));
    }
    Ok(out)
}

/// Per-domain prompt context. The bundled blocksworld text is used for that
/// domain; anything else gets a generic block built from the schema names.
pub fn context_for_problem(grounded: &GroundedProblem) -> WorldContext {
    let domain = &grounded.problem.domain;
    if domain.name == "blocksworld" {
        return WorldContext::new(
            "The 4-operator version of the classic Blocksworld. This domain consists of a set of blocks, a table and a robot hand. The blocks can be on top of other blocks or on the table; a block that has nothing on it is clear; and the robot hand can hold one block or be empty. The goal is to find a plan to move from one configuration of blocks to another.",
            "The actions are formatted as follows:\n- put-down(x:default) where x is the block to put down\n- pick-up(x:default) where x is the block to pick up\n- stack(x:default,y:default) where x is stacked on top of y\n- unstack(x:default,y:default) where x is unstacked from the top of y",
        );
    }
    let mut notes = String::from("The actions are formatted as follows:");
    for schema in &domain.schemas {
        let params: Vec<String> = schema
            .params
            .iter()
            .map(|(var, ty)| format!("{var}:{ty}"))
            .collect();
        notes.push_str(&format!("\n- {}({})", schema.name, params.join(",")));
    }
    WorldContext::new(
        format!(
            "A planning domain named '{}'. Apply the listed actions to transform the initial state into one satisfying the goal.",
            domain.name
        ),
        notes,
    )
}

#[derive(Debug)]
pub struct SuiteResult {
    pub records: Vec<RunRecord>,
    pub summary: SuiteSummary,
}

fn dispatch(
    world: &mut WorldModel,
    ctx: &WorldContext,
    planner: &PlannerConfig,
    policy: &mut PolicyHolder,
    hctx: &HeuristicContext,
) -> PlannerOutcome {
    let t_max = planner.t_max.unwrap_or(20);
    let k = planner.k.unwrap_or(2);
    let b = planner.b.unwrap_or(2);
    let v_min = planner
        .v_min
        .as_deref()
        .and_then(parse_v_min)
        .unwrap_or(RatingValue::Maybe);
    match planner.kind {
        PlannerKind::ToiBfs => match policy {
            PolicyHolder::Oracle(p) => run_toi_bfs(world, p, ctx, ToiBfsParams { t_max, k, b }),
            PolicyHolder::Random(p) => run_toi_bfs(world, p, ctx, ToiBfsParams { t_max, k, b }),
            PolicyHolder::Llm(p) => run_toi_bfs(world, p, ctx, ToiBfsParams { t_max, k, b }),
            PolicyHolder::None => unreachable!("validated"),
        },
        PlannerKind::ToiDfs => {
            let params = ToiDfsParams { t_max, k, v_min };
            match policy {
                PolicyHolder::Oracle(p) => run_toi_dfs(world, p, ctx, params),
                PolicyHolder::Random(p) => run_toi_dfs(world, p, ctx, params),
                PolicyHolder::Llm(p) => run_toi_dfs(world, p, ctx, params),
                PolicyHolder::None => unreachable!("validated"),
            }
        }
        PlannerKind::Boomerang => match policy {
            PolicyHolder::Oracle(p) => run_boomerang(world, p, ctx, t_max),
            PolicyHolder::Llm(p) => run_boomerang(world, p, ctx, t_max),
            _ => unreachable!("validated"),
        },
        PlannerKind::React => match policy {
            PolicyHolder::Oracle(p) => run_react(world, p, ctx, t_max),
            PolicyHolder::Random(p) => run_react(world, p, ctx, t_max),
            PolicyHolder::Llm(p) => run_react(world, p, ctx, t_max),
            PolicyHolder::None => unreachable!("validated"),
        },
        PlannerKind::ReactSelect => match policy {
            PolicyHolder::Oracle(p) => run_react_select(world, p, ctx, t_max),
            PolicyHolder::Llm(p) => run_react_select(world, p, ctx, t_max),
            _ => unreachable!("validated"),
        },
        PlannerKind::Reflexion => match policy {
            PolicyHolder::Oracle(p) => run_reflexion(world, p, ctx, t_max),
            PolicyHolder::Random(p) => run_reflexion(world, p, ctx, t_max),
            PolicyHolder::Llm(p) => run_reflexion(world, p, ctx, t_max),
            PolicyHolder::None => unreachable!("validated"),
        },
        PlannerKind::Io | PlannerKind::IoCot | PlannerKind::IoP | PlannerKind::IoCotP => {
            let variant = planner.kind.io_variant().expect("io kinds");
            match policy {
                PolicyHolder::Oracle(p) => run_io(world, p, ctx, variant),
                PolicyHolder::Llm(p) => run_io(world, p, ctx, variant),
                _ => unreachable!("validated"),
            }
        }
        PlannerKind::Astar => run_best_first(
            world,
            hctx,
            planner.heuristic.unwrap_or(HeuristicKind::GoalCount),
            1.0,
        ),
        PlannerKind::Wastar => run_best_first(
            world,
            hctx,
            planner.heuristic.unwrap_or(HeuristicKind::GoalCount),
            planner.weight.unwrap_or(3.0),
        ),
        PlannerKind::Gbfs => run_best_first(
            world,
            hctx,
            planner.heuristic.unwrap_or(HeuristicKind::GoalCount),
            f64::INFINITY,
        ),
    }
}

enum PolicyHolder {
    Oracle(OraclePolicy),
    Random(RandomPolicy),
    Llm(LlmPolicy),
    None,
}

/// Run the whole suite per the config, constructing the LLM client from the
/// `[llm]` section when a planner needs one.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult, SuiteError> {
    run_suite_with_client(cfg, None)
}

/// Like [`run_suite`], with an injectable client (tests plug in scripted
/// backends here; live runs can pass a pre-built recording client).
pub fn run_suite_with_client(
    cfg: &SuiteConfig,
    client_override: Option<LlmClient>,
) -> Result<SuiteResult, SuiteError> {
    cfg.validate()?;
    let problems = load_problems(cfg)?;
    let budget = cfg.budget_opt();
    let any_llm = cfg.planners.values().any(|p| p.policy == PolicyKind::Llm);
    let client: Option<Rc<RefCell<LlmClient>>> = match client_override {
        Some(client) => Some(Rc::new(RefCell::new(client))),
        None if any_llm => {
            let llm_cfg = cfg.llm.clone().unwrap_or_default();
            let built = match cfg.suite.mode {
                SuiteMode::Replay => {
                    let path = cfg.suite.transcript.as_ref().expect("validated");
                    LlmClient::replay(&llm_cfg, path)?
                }
                SuiteMode::Live => {
                    let mut client = LlmClient::live(llm_cfg)?;
                    if let Some(path) = &cfg.suite.transcript {
                        client = client.record_to(Arc::new(TranscriptWriter::create(path)?));
                    }
                    client
                }
                SuiteMode::Offline => unreachable!("validated"),
            };
            Some(Rc::new(RefCell::new(built)))
        }
        None => None,
    };

    let mut records = Vec::new();
    for (problem_id, grounded) in &problems {
        let ctx = context_for_problem(grounded);
        let hctx = HeuristicContext::new(grounded);
        let optimal_length = optimal_length_oracle(grounded, cfg.suite.optimal_state_cap);
        for (planner_id, planner) in &cfg.planners {
            for &seed in &cfg.suite.seeds {
                let run_id = format!("{problem_id}__{planner_id}__{seed}");
                if let Some(client) = &client {
                    client.borrow_mut().set_run(run_id.clone());
                }
                let mut world = WorldModel::new(grounded, budget);
                let mut policy = match (planner.kind.is_classical(), planner.policy) {
                    (true, _) => PolicyHolder::None,
                    (false, PolicyKind::Oracle) => {
                        PolicyHolder::Oracle(OraclePolicy::new(grounded))
                    }
                    (false, PolicyKind::Random) => {
                        PolicyHolder::Random(RandomPolicy::new(grounded, seed))
                    }
                    (false, PolicyKind::Llm) => {
                        let client = client.as_ref().expect("validated").clone();
                        let config = LlmPolicyConfig {
                            plan_kind: planner.kind.plan_prompt_kind(),
                            react_kind: planner.kind.react_prompt_kind(),
                            translate_states: cfg.suite.translate_states,
                            ..Default::default()
                        };
                        PolicyHolder::Llm(LlmPolicy::new(client, grounded, config))
                    }
                };
                let started = Instant::now();
                let outcome = dispatch(&mut world, &ctx, planner, &mut policy, &hctx);
                let wall_time_ms = started.elapsed().as_millis() as u64;
                let optimal = match (outcome.success, outcome.plan_length(), optimal_length) {
                    (true, Some(len), Some(best)) => Some(len == best),
                    (false, _, Some(_)) => Some(false),
                    _ => None,
                };
                records.push(RunRecord {
                    problem_id: problem_id.clone(),
                    planner_id: planner_id.clone(),
                    seed,
                    success: outcome.success,
                    optimal,
                    wmq_used: outcome.wmq_used,
                    plan_length: outcome.plan_length(),
                    optimal_length,
                    llm_calls: outcome.llm_calls,
                    prompt_tokens: outcome.prompt_tokens,
                    completion_tokens: outcome.completion_tokens,
                    malformed_actions: outcome.malformed_actions,
                    history_truncated: outcome.history_truncated,
                    failure_reason: outcome.failure_reason,
                    wall_time_ms,
                });
            }
        }
    }
    let summary = summarize(&records, budget);
    write_outputs(cfg, &records, &summary)?;
    Ok(SuiteResult { records, summary })
}

fn write_outputs(
    cfg: &SuiteConfig,
    records: &[RunRecord],
    summary: &SuiteSummary,
) -> Result<(), SuiteError> {
    let write = |path: &Option<PathBuf>, content: String| -> Result<(), SuiteError> {
        if let Some(path) = path {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|source| SuiteError::Io {
                        path: parent.to_path_buf(),
                        source,
                    })?;
                }
            }
            std::fs::write(path, content).map_err(|source| SuiteError::Io {
                path: path.clone(),
                source,
            })?;
        }
        Ok(())
    };
    write(&cfg.suite.records_jsonl, super::records_jsonl(records))?;
    write(&cfg.suite.records_csv, super::records_csv(records))?;
    write(&cfg.suite.summary_csv, super::summary_csv(summary))?;
    write(&cfg.suite.histogram_csv, super::histogram_csv(summary))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(planners: &str) -> SuiteConfig {
        let text = format!(
            r#"
[suite]
budget = 20
seeds = [0]

[suite.generator]
family = "blocksworld"
n_blocks = 3
count = 4
seed = 10

{planners}
"#
        );
        SuiteConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn empty_planner_list_is_a_config_error() {
        let cfg = base_config("");
        match run_suite(&cfg) {
            Err(SuiteError::Config(msg)) => assert!(msg.contains("planner list")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn oracle_suite_produces_records_and_summary() {
        let cfg = base_config(
            r#"
[planners.boomerang_oracle]
kind = "boomerang"
policy = "oracle"

[planners.react_oracle]
kind = "react"
policy = "oracle"

[planners.astar_goal_count]
kind = "astar"
heuristic = "goal_count"
"#,
        );
        let result = run_suite(&cfg).unwrap();
        assert_eq!(result.records.len(), 12, "4 problems x 3 planners");
        // Oracle boomerang pays exactly the optimal length per instance.
        for record in result
            .records
            .iter()
            .filter(|r| r.planner_id == "boomerang_oracle")
        {
            assert!(record.success);
            assert_eq!(record.wmq_used, record.optimal_length.unwrap() as u64);
            assert_eq!(record.optimal, Some(true));
        }
        let hist: &crate::bench::WmqHistogram = &result
            .summary
            .histograms
            .iter()
            .find(|h| h.planner_id == "boomerang_oracle")
            .unwrap();
        assert_eq!(hist.counts.iter().sum::<u64>(), 4);
    }

    #[test]
    fn llm_policy_requires_non_offline_mode() {
        let cfg = base_config(
            r#"
[planners.boomerang_llm]
kind = "boomerang"
policy = "llm"
"#,
        );
        match run_suite(&cfg) {
            Err(SuiteError::Config(msg)) => assert!(msg.contains("replay")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn run_isolation_budget_never_leaks() {
        let cfg = base_config(
            r#"
[planners.react_random]
kind = "react"
policy = "random"
"#,
        );
        let result = run_suite(&cfg).unwrap();
        for record in &result.records {
            assert!(record.wmq_used <= 20);
        }
    }
}
