//! Live-protocol run against any OpenAI-compatible endpoint: a chat-backed
//! generative planner on a three-block instance, recording the transcript.
//!
//! Needs QUERYPLAN_API_KEY; optional QUERYPLAN_BASE_URL and QUERYPLAN_MODEL.
//! Exits quietly when no key is configured, so it is safe to run everywhere.

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use queryplan::bench::context_for_problem;
use queryplan::fixtures;
use queryplan::llm::{
    LlmClient, LlmConfig, LlmPolicy, LlmPolicyConfig, TranscriptWriter, API_KEY_ENV,
};
use queryplan::pddl::{parse_pddl, GroundedProblem};
use queryplan::planners::run_boomerang;
use queryplan::world::WorldModel;

fn main() -> anyhow::Result<()> {
    if std::env::var(API_KEY_ENV).is_err() {
        println!("{API_KEY_ENV} is not set; skipping the live run.");
        return Ok(());
    }
    let cfg = LlmConfig {
        base_url: std::env::var("QUERYPLAN_BASE_URL")
            .unwrap_or_else(|_| "https://api.openai.com/v1".into()),
        model: std::env::var("QUERYPLAN_MODEL").unwrap_or_else(|_| "gpt-4-turbo".into()),
        ..Default::default()
    };
    println!("endpoint {} model {}", cfg.base_url, cfg.model);

    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM)?;
    let grounded = GroundedProblem::new(problem)?;
    let ctx = context_for_problem(&grounded);
    let transcript = std::env::temp_dir().join("queryplan-live-transcript.jsonl");
    let mut client =
        LlmClient::live(cfg)?.record_to(Arc::new(TranscriptWriter::create(&transcript)?));
    client.set_run("live-demo");
    let mut policy = LlmPolicy::new(
        Rc::new(RefCell::new(client)),
        &grounded,
        LlmPolicyConfig {
            translate_states: true,
            ..Default::default()
        },
    );
    let mut world = WorldModel::new(&grounded, Some(20));
    let outcome = run_boomerang(&mut world, &mut policy, &ctx, 20);
    println!(
        "success={} wmq={} llm_calls={} tokens={}+{} malformed={}",
        outcome.success,
        outcome.wmq_used,
        outcome.llm_calls,
        outcome.prompt_tokens,
        outcome.completion_tokens,
        outcome.malformed_actions
    );
    if let Some(plan) = &outcome.plan {
        for action in plan {
            println!("  {action}");
        }
    }
    println!("transcript recorded at {}", transcript.display());
    Ok(())
}
