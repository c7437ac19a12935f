//! Acceptance gate: one test per criterion, each printing a pass line with
//! its runtime. Run with `cargo test --test acceptance -- --nocapture` to see
//! every line; the live smoke test is ignored by default and needs an
//! endpoint plus QUERYPLAN_API_KEY.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{all_configs, config_pddl, naive_apply, SyntheticBackend};
use queryplan::bench::{
    gen_blocksworld, optimal_length_oracle, run_suite_with_client, summarize, RunRecord,
    SuiteConfig,
};
use queryplan::classical::run_best_first;
use queryplan::classical::{
    gen_belief_world, gen_chain_world_seeded, parse_graph, run_graph_astar, run_lazysp_psrl,
    run_random_proposer, HeuristicContext, HeuristicKind,
};
use queryplan::fixtures;
use queryplan::llm::{
    build_prompt, parse_action_sequence, parse_rating, LlmClient, LlmConfig, PromptInputs,
    PromptKind, TranscriptWriter,
};
use queryplan::pddl::{
    applicable_actions, apply_action, parse_action_string, parse_pddl, ApplyOutcome,
    GroundedProblem, State,
};
use queryplan::planners::{
    run_boomerang, run_react, run_toi_bfs, run_toi_dfs, FailureReason, ToiBfsParams, ToiDfsParams,
};
use queryplan::policy::{OraclePolicy, RandomPolicy, RatingValue, ScriptedPolicy, WorldContext};
use queryplan::world::WorldModel;

fn gate<F: FnOnce()>(name: &str, limit: Duration, body: F) {
    let started = Instant::now();
    body();
    let elapsed = started.elapsed();
    assert!(
        elapsed <= limit,
        "{name} exceeded its time limit: {elapsed:?} > {limit:?}"
    );
    println!("{name}: PASS ({} ms)", elapsed.as_millis());
}

fn grounded_from(problem_text: &str) -> GroundedProblem {
    let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, problem_text).unwrap();
    GroundedProblem::new(p).unwrap()
}

fn canonical3() -> GroundedProblem {
    grounded_from(fixtures::BLOCKS3_PROBLEM)
}

fn ctx() -> WorldContext {
    WorldContext::new("t", "t")
}

/// Transition semantics agree with an independent naive interpreter on every
/// (state, action) pair within depth 3 of every initial configuration of up
/// to 4 blocks. Exhaustive, zero mismatches.
#[test]
fn criterion_01_strips_oracle_equivalence() {
    gate(
        "criterion 01 (exact transition semantics)",
        Duration::from_secs(10),
        || {
            let mut checked = 0u64;
            for n in 1..=4 {
                let configs = all_configs(n);
                // Sanity on the enumeration itself: 1, 3, 13, 73 configurations.
                let expected = [1usize, 3, 13, 73][n - 1];
                assert_eq!(configs.len(), expected, "{n}-block configuration count");
                let base = grounded_from(&config_pddl(n, &configs[0], &[]));
                for init in &configs {
                    let text = config_pddl(n, init, &[]);
                    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, &text).unwrap();
                    let grounded = base.with_states(problem.init.clone(), problem.goal.clone());
                    // Breadth-first to depth 3, checking every ground action at
                    // every visited state against the naive interpreter.
                    let mut frontier = vec![grounded.problem.init.clone()];
                    let mut seen: BTreeSet<State> = frontier.iter().cloned().collect();
                    for _depth in 0..=3 {
                        let mut next_frontier = Vec::new();
                        for state in &frontier {
                            let plain: BTreeSet<String> = state.plain_atoms().into_iter().collect();
                            for action in grounded.actions.iter() {
                                checked += 1;
                                let fast = apply_action(state, action);
                                let naive = naive_apply(&grounded.problem, &plain, action);
                                match (&fast, &naive) {
                                    (ApplyOutcome::Applied(next), Some(expected)) => {
                                        let got: BTreeSet<String> =
                                            next.plain_atoms().into_iter().collect();
                                        assert_eq!(&got, expected, "{action} at {state}");
                                        if seen.insert(next.clone()) {
                                            next_frontier.push(next.clone());
                                        }
                                    }
                                    (ApplyOutcome::Inapplicable(_), None) => {}
                                    other => panic!(
                                        "semantics disagree for {action} at {state}: {other:?}"
                                    ),
                                }
                            }
                        }
                        frontier = next_frontier;
                    }
                }
            }
            assert!(checked > 10_000, "exhaustive check covered {checked} pairs");
        },
    );
}

/// A* with the admissible unmet-goal-count heuristic matches the
/// breadth-first oracle's optimum on every 2-4 block instance and on 20
/// seeded 5-6 block instances.
#[test]
fn criterion_02_astar_optimality() {
    gate(
        "criterion 02 (A* optimality vs oracle)",
        Duration::from_secs(60),
        || {
            for n in 2..=4 {
                let configs = all_configs(n);
                let base = grounded_from(&config_pddl(n, &configs[0], &configs[0]));
                let hctx = HeuristicContext::new(&base);
                for init in &configs {
                    for goal in &configs {
                        let text = config_pddl(n, init, goal);
                        let parsed = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, &text).unwrap();
                        let instance = base.with_states(parsed.init.clone(), parsed.goal.clone());
                        let best = optimal_length_oracle(&instance, 100_000)
                            .expect("blocksworld is always solvable");
                        let mut world = WorldModel::new(&instance, None);
                        let outcome =
                            run_best_first(&mut world, &hctx, HeuristicKind::GoalCount, 1.0);
                        assert!(outcome.success, "{n} blocks: {text}");
                        assert_eq!(
                            outcome.plan_length(),
                            Some(best),
                            "suboptimal plan for {text}"
                        );
                    }
                }
            }
            for (n, seeds) in [(5usize, 0..10u64), (6, 0..10)] {
                for seed in seeds {
                    let instance = GroundedProblem::new(gen_blocksworld(n, seed)).unwrap();
                    let hctx = HeuristicContext::new(&instance);
                    let best = optimal_length_oracle(&instance, 200_000).expect("solvable");
                    let mut world = WorldModel::new(&instance, None);
                    let outcome = run_best_first(&mut world, &hctx, HeuristicKind::GoalCount, 1.0);
                    assert!(outcome.success);
                    assert_eq!(outcome.plan_length(), Some(best), "n={n} seed={seed}");
                }
            }
        },
    );
}

/// The constructed chain world: eager perfect-heuristic search pays exactly
/// 15 edge evaluations, lazy evaluation with a truthful prior exactly 5.
#[test]
fn criterion_03_laziness_constructed_case() {
    gate(
        "criterion 03 (lazy vs eager, constructed)",
        Duration::from_secs(1),
        || {
            let text = std::fs::read_to_string(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/fixtures/graphs/chain5.graph"
            ))
            .unwrap();
            let g = parse_graph(&text).unwrap();
            let astar = run_graph_astar(&g);
            assert_eq!(astar.path_len, Some(5));
            assert_eq!(astar.edge_evaluations, 15);
            let lazy = run_lazysp_psrl(&g, 10, 0).unwrap();
            assert!(lazy.path.is_some());
            assert_eq!(lazy.wmq_used, 5);
            assert_eq!(lazy.trace.deltas[0], 0);
        },
    );
}

/// Lazy evaluation never pays more than the eager perfect-heuristic search
/// across 50 randomized chain worlds.
#[test]
fn criterion_04_lazy_dominance_randomized() {
    gate(
        "criterion 04 (lazy dominance, randomized)",
        Duration::from_secs(10),
        || {
            let mut wins = 0;
            for seed in 0..50u64 {
                let g = gen_chain_world_seeded(seed);
                assert!(g.n_vertices <= 50);
                let astar = run_graph_astar(&g);
                let lazy = run_lazysp_psrl(&g, 20, seed).unwrap();
                assert!(astar.path_len.is_some() && lazy.path.is_some());
                if lazy.wmq_used <= astar.edge_evaluations {
                    wins += 1;
                }
            }
            assert_eq!(wins, 50, "lazy must dominate on every generated graph");
        },
    );
}

/// Posterior-sampling regret: per-iteration regret shrinks from the first
/// quartile to the last, and the sampler beats a random path proposer on at
/// least 45 of 50 seeded graphs.
#[test]
fn criterion_05_psrl_regret() {
    gate(
        "criterion 05 (posterior-sampling regret)",
        Duration::from_secs(30),
        || {
            const T: usize = 40;
            let mut first_quartile_sum = 0.0;
            let mut last_quartile_sum = 0.0;
            let mut psrl_beats_random = 0;
            for seed in 0..50u64 {
                let g = gen_belief_world(seed, 0.8);
                let psrl = run_lazysp_psrl(&g, T, seed ^ 0xABCD).unwrap();
                let random = run_random_proposer(&g, T, seed ^ 0xABCD).unwrap();
                assert_eq!(psrl.trace.deltas.len(), T);
                let quarter = T / 4;
                first_quartile_sum += psrl.trace.deltas[..quarter]
                    .iter()
                    .map(|&d| d as f64)
                    .sum::<f64>();
                last_quartile_sum += psrl.trace.deltas[T - quarter..]
                    .iter()
                    .map(|&d| d as f64)
                    .sum::<f64>();
                if psrl.trace.total() < random.trace.total() {
                    psrl_beats_random += 1;
                }
            }
            assert!(
                last_quartile_sum < first_quartile_sum,
                "regret must shrink: first quartile {first_quartile_sum}, last {last_quartile_sum}"
            );
            assert!(
                psrl_beats_random >= 45,
                "posterior sampling beat the random proposer on only {psrl_beats_random}/50 graphs"
            );
        },
    );
}

/// With an exhaustive-search oracle policy, the replanning loop verifies an
/// optimal plan on the first try: queries equal optimal length exactly.
#[test]
fn criterion_06_boomerang_oracle_ceiling() {
    gate(
        "criterion 06 (generative-planner oracle ceiling)",
        Duration::from_secs(30),
        || {
            let cases: Vec<(usize, u64)> = (0..7u64)
                .map(|s| (3usize, s))
                .chain((0..7u64).map(|s| (4usize, s)))
                .chain((0..6u64).map(|s| (5usize, s)))
                .collect();
            assert_eq!(cases.len(), 20);
            for (n, seed) in cases {
                let instance = GroundedProblem::new(gen_blocksworld(n, seed)).unwrap();
                let best = optimal_length_oracle(&instance, 200_000).expect("solvable") as u64;
                let mut world = WorldModel::new(&instance, None);
                let mut policy = OraclePolicy::new(&instance);
                let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 20);
                assert!(outcome.success, "n={n} seed={seed}");
                assert_eq!(outcome.wmq_used, best, "n={n} seed={seed}");
            }
        },
    );
}

/// Query reuse: a plan failing at its third action charges 3; a second plan
/// sharing the 2-step prefix charges only its fresh suffix.
#[test]
fn criterion_07_query_reuse() {
    gate(
        "criterion 07 (query reuse across plans)",
        Duration::from_secs(1),
        || {
            let g = canonical3();
            let mut world = WorldModel::new(&g, Some(20));
            let plan = |names: &[&str]| -> Vec<_> {
                names
                    .iter()
                    .map(|n| parse_action_string(n, &g.actions).unwrap().clone())
                    .collect()
            };
            let p1 = plan(&["unstack(a,b)", "put-down(a)", "unstack(a,b)"]);
            let p2 = plan(&["unstack(a,b)", "put-down(a)", "pick-up(b)", "stack(b,c)"]);
            let p2_len = p2.len() as u64;
            let mut policy = ScriptedPolicy::new().with_plans(vec![p1, p2]);
            let outcome = run_boomerang(&mut world, &mut policy, &ctx(), 20);
            assert!(outcome.success);
            assert_eq!(world.ledger().used, 3 + (p2_len - 2));
            assert_eq!(outcome.wmq_used, 5);
        },
    );
}

/// Budget enforcement: a policy cycling through distinct wasted queries
/// charges exactly the budget, fails as budget-exhausted, and the histogram
/// puts the run in the cap bin.
#[test]
fn criterion_08_budget_enforcement() {
    gate(
        "criterion 08 (hard budget and cap bin)",
        Duration::from_secs(5),
        || {
            let instance = GroundedProblem::new(gen_blocksworld(5, 3)).unwrap();
            let s0 = instance.problem.init.clone();
            let wasted: Vec<_> = instance
                .actions
                .iter()
                .filter(|a| matches!(apply_action(&s0, a), ApplyOutcome::Inapplicable(_)))
                .cloned()
                .collect();
            assert!(wasted.len() >= 20);
            let mut world = WorldModel::new(&instance, Some(20));
            let mut policy = ScriptedPolicy::new().with_actions(wasted).looping();
            let outcome = run_react(&mut world, &mut policy, &ctx(), 20);
            assert!(!outcome.success);
            assert_eq!(outcome.wmq_used, 20);
            assert_eq!(outcome.failure_reason, Some(FailureReason::BudgetExhausted));
            assert_eq!(world.ledger().used, 20);

            let record = RunRecord {
                problem_id: instance.problem.name.clone(),
                planner_id: "react_cycler".into(),
                seed: 0,
                success: false,
                optimal: Some(false),
                wmq_used: outcome.wmq_used,
                plan_length: None,
                optimal_length: optimal_length_oracle(&instance, 200_000),
                llm_calls: 0,
                prompt_tokens: 0,
                completion_tokens: 0,
                malformed_actions: 0,
                history_truncated: false,
                failure_reason: outcome.failure_reason,
                wall_time_ms: 0,
            };
            let summary = summarize(&[record], Some(20));
            let histogram = &summary.histograms[0];
            assert_eq!(histogram.counts[20], 1, "failure lands in the cap bin");
            assert_eq!(histogram.counts.iter().sum::<u64>(), 1);
        },
    );
}

/// Search discipline under 200 randomized runs: the beam never exceeds its
/// width, and depth-first never expands a node rated below the threshold.
#[test]
fn criterion_09_beam_stack_discipline() {
    gate(
        "criterion 09 (beam and stack discipline)",
        Duration::from_secs(30),
        || {
            for i in 0..100u64 {
                let n = 3 + (i % 2) as usize;
                let instance = GroundedProblem::new(gen_blocksworld(n, 1000 + i)).unwrap();
                let b = 1 + (i % 3) as usize;
                let mut world = WorldModel::new(&instance, Some(20));
                let mut policy = RandomPolicy::new(&instance, i);
                let outcome = run_toi_bfs(
                    &mut world,
                    &mut policy,
                    &ctx(),
                    ToiBfsParams { t_max: 20, k: 2, b },
                );
                for &size in &outcome.trace.beam_sizes {
                    assert!(size <= b, "beam grew to {size} with b={b} on run {i}");
                }
            }
            for i in 0..100u64 {
                let n = 3 + (i % 2) as usize;
                let instance = GroundedProblem::new(gen_blocksworld(n, 2000 + i)).unwrap();
                let mut world = WorldModel::new(&instance, Some(20));
                let mut policy = RandomPolicy::new(&instance, i);
                let outcome = run_toi_dfs(
                    &mut world,
                    &mut policy,
                    &ctx(),
                    ToiDfsParams {
                        t_max: 20,
                        k: 2,
                        v_min: RatingValue::Maybe,
                    },
                );
                for rating in outcome.trace.expanded_ratings.iter().flatten() {
                    assert!(
                        *rating >= RatingValue::Maybe,
                        "expanded a node rated {rating:?} on run {i}"
                    );
                }
            }
        },
    );
}

/// Replay closure: a recorded suite of 3 LLM-backed planners over 5 problems
/// replays to byte-identical records CSV, twice.
#[test]
fn criterion_10_replay_closure() {
    gate(
        "criterion 10 (deterministic replay)",
        Duration::from_secs(30),
        || {
            let dir = tempfile::tempdir().unwrap();
            let transcript = dir.path().join("transcript.jsonl");
            let records_csv = dir.path().join("records.csv");
            let config_text = format!(
                r#"
[suite]
budget = 20
seeds = [0]
mode = "replay"
transcript = "{transcript}"
records_csv = "{records}"

[suite.generator]
family = "blocksworld"
n_blocks = 3
count = 5
seed = 77

[llm]
base_url = "unused"
model = "synthetic"
temperature = 0.7

[planners.boomerang_llm]
kind = "boomerang"
policy = "llm"

[planners.react_llm]
kind = "react"
policy = "llm"

[planners.toi_bfs_llm]
kind = "toi_bfs"
policy = "llm"
"#,
                transcript = transcript.display(),
                records = records_csv.display(),
            );
            let cfg = SuiteConfig::from_toml(&config_text).unwrap();

            // Recording pass: synthetic backend answers, transcript captures.
            let llm_cfg = cfg.llm.clone().unwrap();
            let writer = Arc::new(TranscriptWriter::create(&transcript).unwrap());
            let recording_client =
                LlmClient::with_backend(&llm_cfg, Box::new(SyntheticBackend)).record_to(writer);
            run_suite_with_client(&cfg, Some(recording_client)).unwrap();
            let recorded_csv = std::fs::read(&records_csv).unwrap();

            // Two replay passes, client built from the config.
            run_suite_with_client(&cfg, None).unwrap();
            let replay_one = std::fs::read(&records_csv).unwrap();
            run_suite_with_client(&cfg, None).unwrap();
            let replay_two = std::fs::read(&records_csv).unwrap();
            assert_eq!(replay_one, replay_two, "replays must be byte-identical");
            assert_eq!(recorded_csv, replay_one, "replay matches the recording run");
            assert!(!replay_one.is_empty());
        },
    );
}

/// Built prompts match the checked-in golden files byte-for-byte, and the
/// goldens carry the response-format markers the parsers rely on.
#[test]
fn criterion_11_prompt_fidelity() {
    gate(
        "criterion 11 (prompt golden files)",
        Duration::from_secs(5),
        || {
            let g = canonical3();
            let world_ctx = queryplan::bench::context_for_problem(&g);
            let state_text = g.problem.init.typed_atoms().join(", ");
            let goal_text = g.problem.goal.typed_atoms().join(", ");
            let valid: Vec<String> = applicable_actions(&g.problem.init, &g.actions)
                .iter()
                .map(|a| a.display_name.clone())
                .collect();
            let history = "Attempt 1:\nunstack(a:default,b:default): clear(b), holding(a), ontable(b), ontable(c)\nError: plan executed fully but goal not reached; unsatisfied goal atom(s): on(b,c)";
            let update = std::env::var("QUERYPLAN_UPDATE_GOLDEN").is_ok();
            for kind in PromptKind::ALL {
                let history_text = match kind {
                PromptKind::BoomerangPlan | PromptKind::ReactStep | PromptKind::Reflexion => {
                    Some(history)
                }
                PromptKind::ReactSelect => Some(
                    "State 0:\nclear(a:default), clear(c:default), handempty(), on(a:default,b:default), ontable(b:default), ontable(c:default)\nValid Actions:\n- pick-up(c:default)\n- unstack(a:default,b:default)",
                ),
                _ => None,
            };
                let inputs = PromptInputs {
                    state_text: Some(&state_text),
                    goal_text: Some(&goal_text),
                    valid_actions: Some(&valid),
                    history_text,
                    feedback: None,
                    k: Some(2),
                    example: None,
                };
                let (system, user) = build_prompt(kind, &world_ctx, &inputs).unwrap();
                let combined = format!("{system}\n======== user ========\n{user}\n");
                let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                    .join("tests/golden")
                    .join(format!("{}.golden", kind.name()));
                if update {
                    std::fs::write(&path, &combined).unwrap();
                    continue;
                }
                let golden = std::fs::read_to_string(&path)
                    .unwrap_or_else(|e| panic!("missing golden for {kind}: {e}"));
                assert_eq!(combined, golden, "prompt drift for kind {kind}");
            }
            if update {
                return;
            }
            // The markers the parsers scan for are pinned inside the goldens.
            let read = |name: &str| {
                std::fs::read_to_string(
                    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                        .join("tests/golden")
                        .join(format!("{name}.golden")),
                )
                .unwrap()
            };
            assert!(read("toi_propose").contains("Number of Actions:"));
            assert!(read("boomerang_plan")
                .contains("Action Sequence: <action1>, <action2>, ..., <actionN>"));
            assert!(read("toi_evaluate").contains("Rating: <sure/maybe/impossible>"));
            assert!(read("react_select").contains("Selection: state <index>, <action>"));
        },
    );
}

/// Parser totality on a 100-case malformed corpus, and the bundled sample
/// response parses to exactly 8 actions.
#[test]
fn criterion_12_parser_robustness() {
    gate(
        "criterion 12 (parser robustness)",
        Duration::from_secs(5),
        || {
            use rand::{Rng, SeedableRng};
            let g = canonical3();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
            let fragments = [
                "Action Sequence:",
                "Actions:",
                "Rating:",
                "Selection:",
                "state",
                "pick-up(",
                "))))((((",
                ",,,,",
                "\u{1F916}\u{45}\u{0}",
                "Rating: 7/10",
                "Action Sequence: teleport(z), ",
                "\n\n\n",
                ":::",
                "sure maybe impossible",
            ];
            for case in 0..100 {
                let mut text = String::new();
                let pieces = rng.random_range(0..8);
                for _ in 0..pieces {
                    match rng.random_range(0..3u8) {
                        0 => text.push_str(fragments[rng.random_range(0..fragments.len())]),
                        1 => {
                            let len = rng.random_range(0..12);
                            for _ in 0..len {
                                text.push(
                                    char::from_u32(rng.random_range(1..0x2FF)).unwrap_or('?'),
                                );
                            }
                        }
                        _ => text.push('\n'),
                    }
                }
                // Totality: structured results, never a panic.
                let _ = parse_action_sequence(&text, &g.actions);
                let _ = parse_rating(&text);
                let _ = queryplan::llm::parse_actions_line(&text, &g.actions);
                let _ = queryplan::llm::parse_selection(&text, &g.actions);
                let _ = case;
            }

            // The bundled sample response against its 8-block instance.
            let eight = "(define (problem blocks-8)
            (:domain blocksworld)
            (:objects a b c d e f g h)
            (:init (ontable a) (ontable c) (ontable e)
                   (on f c) (on b f) (on g b) (on d g)
                   (on h e)
                   (clear a) (clear d) (clear h) (handempty))
            (:goal (and (on a g) (on b f) (on e a) (on h e))))";
            let instance = grounded_from(eight);
            let response = std::fs::read_to_string(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/tests/fixtures/sample_plan_response.txt"
            ))
            .unwrap();
            let plan = parse_action_sequence(&response, &instance.actions).unwrap();
            assert_eq!(plan.len(), 8);
            assert_eq!(plan[0].display_name, "unstack(d:default,g:default)");
            assert_eq!(plan[7].display_name, "stack(h:default,e:default)");
        },
    );
}

/// Live-protocol smoke: needs a reachable OpenAI-compatible endpoint and
/// QUERYPLAN_API_KEY; run explicitly with `--ignored`. Non-gating.
#[test]
#[ignore = "requires network access and QUERYPLAN_API_KEY"]
fn criterion_13_live_protocol_smoke() {
    let base_url =
        std::env::var("QUERYPLAN_BASE_URL").unwrap_or_else(|_| "https://api.openai.com/v1".into());
    let model = std::env::var("QUERYPLAN_MODEL").unwrap_or_else(|_| "gpt-4-turbo".into());
    let g = canonical3();
    let cfg = LlmConfig {
        base_url,
        model,
        ..Default::default()
    };
    let client = LlmClient::live(cfg).expect("QUERYPLAN_API_KEY must be set");
    let policy_cfg = queryplan::llm::LlmPolicyConfig::default();
    let mut policy = queryplan::llm::LlmPolicy::new(
        std::rc::Rc::new(std::cell::RefCell::new(client)),
        &g,
        policy_cfg,
    );
    let world_ctx = queryplan::bench::context_for_problem(&g);
    let mut world = WorldModel::new(&g, Some(20));
    let outcome = run_boomerang(&mut world, &mut policy, &world_ctx, 20);
    assert!(outcome.llm_calls > 0);
    assert!(
        outcome.prompt_tokens > 0 && outcome.completion_tokens > 0,
        "live run must report token usage"
    );
    println!(
        "criterion 13 (live smoke): PASS (success={}, wmq={}, llm_calls={})",
        outcome.success, outcome.wmq_used, outcome.llm_calls
    );
}
