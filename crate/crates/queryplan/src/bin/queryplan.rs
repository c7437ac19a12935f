//! Command-line harness: generate benchmark problems, solve single
//! instances, run configured suites, and summarize record files.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use queryplan::bench::{
    context_for_problem, gen_blocksworld_pddl, optimal_length_oracle, run_suite, summarize,
    RunRecord, SuiteConfig, DEFAULT_STATE_CAP,
};
use queryplan::classical::{run_best_first, HeuristicContext, HeuristicKind};
use queryplan::fixtures;
use queryplan::llm::{
    LlmClient, LlmConfig, LlmPolicy, LlmPolicyConfig, PromptKind, TranscriptWriter,
};
use queryplan::pddl::{parse_pddl, GroundedProblem};
use queryplan::planners::{
    run_boomerang, run_io, run_react, run_react_select, run_reflexion, run_toi_bfs, run_toi_dfs,
    IoVariant, PlannerOutcome, ToiBfsParams, ToiDfsParams,
};
use queryplan::policy::{OraclePolicy, RandomPolicy, RatingValue};
use queryplan::world::WorldModel;

#[derive(Parser)]
#[command(
    name = "queryplan",
    version,
    about = "Query-budgeted planning over STRIPS domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured benchmark suite.
    Run {
        /// TOML config with [suite], [llm], and [planners.*] sections.
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate benchmark problems as PDDL files.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Solve one problem with one planner and print the run record.
    Solve(Box<SolveArgs>),
    /// Aggregate a records JSONL file into summary and histogram CSVs.
    Summarize {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Histogram CSV output path.
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Budget cap used for failure binning (0 = uncapped).
        #[arg(long, default_value_t = 20)]
        budget: u32,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Random solvable block-rearrangement instances.
    Blocksworld {
        /// Blocks per instance (2..=8).
        #[arg(long)]
        n: usize,
        /// Number of instances.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Base seed; instance i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for domain.pddl and problem files.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    /// Planner spec `<kind>[:<policy-or-heuristic>]`, e.g. boomerang:oracle,
    /// react:llm, astar:goal_count, wastar:h_ff, gbfs:h_add.
    #[arg(long)]
    planner: String,
    /// World-model query budget; 0 = unlimited.
    #[arg(long, default_value_t = 20)]
    budget: u32,
    /// Step limit for iterative planners.
    #[arg(long, default_value_t = 20)]
    t_max: usize,
    /// Actions proposed per expansion (tree-search planners).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Beam width (beam-search planner).
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Seed for stochastic policies.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Answer LLM calls from this transcript instead of the network.
    #[arg(long, conflicts_with = "live")]
    replay: Option<PathBuf>,
    /// Allow live LLM calls (requires QUERYPLAN_API_KEY).
    #[arg(long)]
    live: bool,
    /// Record live exchanges to this transcript file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// OpenAI-compatible endpoint base URL for live mode.
    #[arg(long, default_value = "https://api.openai.com/v1")]
    base_url: String,
    /// Model name for live mode.
    #[arg(long, default_value = "gpt-4-turbo")]
    model: String,
    /// Sampling temperature for live mode.
    #[arg(long, default_value_t = 0.7)]
    temperature: f64,
    /// Translate states to natural language through the model.
    #[arg(long)]
    translate: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config } => {
            let cfg = SuiteConfig::load(&config)?;
            let result = run_suite(&cfg)?;
            let successes = result.records.iter().filter(|r| r.success).count();
            println!("{} runs, {} successes", result.records.len(), successes);
            for planner in &result.summary.planners {
                println!(
                    "{}: success {:.2} +/- {:.2}, mean WMQ {:.2}",
                    planner.planner_id, planner.success_rate, planner.success_se, planner.mean_wmq
                );
            }
            Ok(())
        }
        Command::Gen { family } => match family {
            GenFamily::Blocksworld {
                n,
                count,
                seed,
                out,
            } => {
                std::fs::create_dir_all(&out)
                    .with_context(|| format!("creating {}", out.display()))?;
                let domain_path = out.join("domain.pddl");
                std::fs::write(&domain_path, fixtures::BLOCKSWORLD_DOMAIN)?;
                for i in 0..count {
                    let s = seed + i as u64;
                    let text = gen_blocksworld_pddl(n, s);
                    let path = out.join(format!("blocks-{n}-{s}.pddl"));
                    std::fs::write(&path, text)?;
                    println!("wrote {}", path.display());
                }
                println!("wrote {}", domain_path.display());
                Ok(())
            }
        },
        Command::Solve(args) => solve(*args),
        Command::Summarize {
            records,
            out,
            histogram,
            budget,
        } => {
            let text = std::fs::read_to_string(&records)
                .with_context(|| format!("reading {}", records.display()))?;
            let mut parsed: Vec<RunRecord> = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                parsed.push(
                    serde_json::from_str(line)
                        .with_context(|| format!("parsing record on line {}", i + 1))?,
                );
            }
            let cap = if budget == 0 { None } else { Some(budget) };
            let summary = summarize(&parsed, cap);
            std::fs::write(&out, queryplan::bench::summary_csv(&summary))?;
            println!("wrote {}", out.display());
            if let Some(path) = histogram {
                std::fs::write(&path, queryplan::bench::histogram_csv(&summary))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

enum Holder {
    Oracle(OraclePolicy),
    Random(RandomPolicy),
    Llm(Box<LlmPolicy>),
}

fn solve(args: SolveArgs) -> Result<()> {
    let domain_text = std::fs::read_to_string(&args.domain)
        .with_context(|| format!("reading {}", args.domain.display()))?;
    let problem_text = std::fs::read_to_string(&args.problem)
        .with_context(|| format!("reading {}", args.problem.display()))?;
    let problem = parse_pddl(&domain_text, &problem_text)?;
    let problem_name = problem.name.clone();
    let grounded = GroundedProblem::new(problem)?;
    let budget = if args.budget == 0 {
        None
    } else {
        Some(args.budget)
    };
    let mut world = WorldModel::new(&grounded, budget);
    let ctx = context_for_problem(&grounded);

    let (kind, flavor) = match args.planner.split_once(':') {
        Some((kind, flavor)) => (kind, flavor),
        None => (args.planner.as_str(), "oracle"),
    };

    let outcome: PlannerOutcome = if matches!(kind, "astar" | "wastar" | "gbfs") {
        let heuristic = match flavor {
            "goal_count" | "oracle" => HeuristicKind::GoalCount,
            "h_add" => HeuristicKind::HAdd,
            "h_ff" => HeuristicKind::HFf,
            other => bail!("unknown heuristic '{other}' (goal_count, h_add, h_ff)"),
        };
        let w = match kind {
            "astar" => 1.0,
            "wastar" => 3.0,
            _ => f64::INFINITY,
        };
        let hctx = HeuristicContext::new(&grounded);
        run_best_first(&mut world, &hctx, heuristic, w)
    } else {
        let plan_kind = match kind {
            "io" => PromptKind::Io,
            "io_cot" => PromptKind::IoCot,
            "io_p" => PromptKind::IoP,
            "io_cot_p" => PromptKind::IoCotP,
            _ => PromptKind::BoomerangPlan,
        };
        let react_kind = if kind == "reflexion" {
            PromptKind::Reflexion
        } else {
            PromptKind::ReactStep
        };
        let mut policy = match flavor {
            "oracle" => Holder::Oracle(OraclePolicy::new(&grounded)),
            "random" => Holder::Random(RandomPolicy::new(&grounded, args.seed)),
            "llm" => {
                let llm_cfg = LlmConfig {
                    base_url: args.base_url.clone(),
                    model: args.model.clone(),
                    temperature: args.temperature,
                    ..Default::default()
                };
                let mut client = if let Some(path) = &args.replay {
                    LlmClient::replay(&llm_cfg, path)?
                } else if args.live {
                    let mut c = LlmClient::live(llm_cfg)?;
                    if let Some(path) = &args.record {
                        c = c.record_to(std::sync::Arc::new(TranscriptWriter::create(path)?));
                    }
                    c
                } else {
                    bail!("llm policy needs --replay <transcript> or --live");
                };
                client.set_run(format!("{problem_name}__{kind}__{}", args.seed));
                let config = LlmPolicyConfig {
                    plan_kind,
                    react_kind,
                    translate_states: args.translate,
                    ..Default::default()
                };
                Holder::Llm(Box::new(LlmPolicy::new(
                    std::rc::Rc::new(std::cell::RefCell::new(client)),
                    &grounded,
                    config,
                )))
            }
            other => bail!("unknown policy '{other}' (oracle, random, llm)"),
        };
        match kind {
            "boomerang" => match &mut policy {
                Holder::Oracle(p) => run_boomerang(&mut world, p, &ctx, args.t_max),
                Holder::Llm(p) => run_boomerang(&mut world, p.as_mut(), &ctx, args.t_max),
                Holder::Random(_) => {
                    bail!("boomerang needs a plan-generating policy (oracle or llm)")
                }
            },
            "react" => match &mut policy {
                Holder::Oracle(p) => run_react(&mut world, p, &ctx, args.t_max),
                Holder::Random(p) => run_react(&mut world, p, &ctx, args.t_max),
                Holder::Llm(p) => run_react(&mut world, p.as_mut(), &ctx, args.t_max),
            },
            "react_select" => match &mut policy {
                Holder::Oracle(p) => run_react_select(&mut world, p, &ctx, args.t_max),
                Holder::Llm(p) => run_react_select(&mut world, p.as_mut(), &ctx, args.t_max),
                Holder::Random(_) => bail!("react_select needs oracle or llm policy"),
            },
            "reflexion" => match &mut policy {
                Holder::Oracle(p) => run_reflexion(&mut world, p, &ctx, args.t_max),
                Holder::Random(p) => run_reflexion(&mut world, p, &ctx, args.t_max),
                Holder::Llm(p) => run_reflexion(&mut world, p.as_mut(), &ctx, args.t_max),
            },
            "toi_bfs" => {
                let params = ToiBfsParams {
                    t_max: args.t_max,
                    k: args.k,
                    b: args.b,
                };
                match &mut policy {
                    Holder::Oracle(p) => run_toi_bfs(&mut world, p, &ctx, params),
                    Holder::Random(p) => run_toi_bfs(&mut world, p, &ctx, params),
                    Holder::Llm(p) => run_toi_bfs(&mut world, p.as_mut(), &ctx, params),
                }
            }
            "toi_dfs" => {
                let params = ToiDfsParams {
                    t_max: args.t_max,
                    k: args.k,
                    v_min: RatingValue::Maybe,
                };
                match &mut policy {
                    Holder::Oracle(p) => run_toi_dfs(&mut world, p, &ctx, params),
                    Holder::Random(p) => run_toi_dfs(&mut world, p, &ctx, params),
                    Holder::Llm(p) => run_toi_dfs(&mut world, p.as_mut(), &ctx, params),
                }
            }
            "io" | "io_cot" | "io_p" | "io_cot_p" => {
                let variant = match kind {
                    "io" => IoVariant::Io,
                    "io_cot" => IoVariant::IoCot,
                    "io_p" => IoVariant::IoP,
                    _ => IoVariant::IoCotP,
                };
                match &mut policy {
                    Holder::Oracle(p) => run_io(&mut world, p, &ctx, variant),
                    Holder::Llm(p) => run_io(&mut world, p.as_mut(), &ctx, variant),
                    Holder::Random(_) => bail!("io variants need oracle or llm policy"),
                }
            }
            other => bail!("unknown planner kind '{other}'"),
        }
    };

    let optimal_length = optimal_length_oracle(&grounded, DEFAULT_STATE_CAP);
    let record = RunRecord {
        problem_id: problem_name,
        planner_id: args.planner.clone(),
        seed: args.seed,
        success: outcome.success,
        optimal: match (outcome.success, outcome.plan_length(), optimal_length) {
            (true, Some(len), Some(best)) => Some(len == best),
            (false, _, Some(_)) => Some(false),
            _ => None,
        },
        wmq_used: outcome.wmq_used,
        plan_length: outcome.plan_length(),
        optimal_length,
        llm_calls: outcome.llm_calls,
        prompt_tokens: outcome.prompt_tokens,
        completion_tokens: outcome.completion_tokens,
        malformed_actions: outcome.malformed_actions,
        history_truncated: outcome.history_truncated,
        failure_reason: outcome.failure_reason,
        wall_time_ms: 0,
    };
    println!("{}", serde_json::to_string_pretty(&record)?);
    if let Some(plan) = &outcome.plan {
        println!("plan:");
        for action in plan {
            println!("  {action}");
        }
    }
    Ok(())
}
