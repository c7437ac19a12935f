//! Deterministic record/replay: run a chat-backed planner against a scripted
//! backend while recording the transcript, then replay the transcript twice
//! and confirm the outcomes are identical, with zero network involved.

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use queryplan::bench::context_for_problem;
use queryplan::fixtures;
use queryplan::llm::{
    Backend, LlmClient, LlmConfig, LlmError, LlmPolicy, LlmPolicyConfig, RawCompletion,
    TranscriptWriter,
};
use queryplan::pddl::{parse_pddl, GroundedProblem};
use queryplan::planners::run_boomerang;
use queryplan::world::WorldModel;

/// A stand-in model: reads the valid actions out of the prompt and proposes
/// the known four-step plan on its second attempt.
struct TwoAttemptPlanner {
    calls: usize,
}

impl Backend for TwoAttemptPlanner {
    fn complete(&mut self, _system: &str, _user: &str) -> Result<RawCompletion, LlmError> {
        self.calls += 1;
        let response = if self.calls == 1 {
            "Reflect: first try\nThink: hope this works\nAction Sequence: unstack(a:default,b:default), put-down(a:default)"
        } else {
            "Reflect: the goal was not reached\nThink: finish the job\nAction Sequence: unstack(a:default,b:default), put-down(a:default), pick-up(b:default), stack(b:default,c:default)"
        };
        Ok(RawCompletion {
            response_text: response.to_string(),
            prompt_tokens: 420,
            completion_tokens: 40,
        })
    }
}

fn run_once(client: LlmClient, grounded: &GroundedProblem) -> queryplan::PlannerOutcome {
    let ctx = context_for_problem(grounded);
    let mut world = WorldModel::new(grounded, Some(20));
    let mut policy = LlmPolicy::new(
        Rc::new(RefCell::new(client)),
        grounded,
        LlmPolicyConfig::default(),
    );
    run_boomerang(&mut world, &mut policy, &ctx, 20)
}

fn main() -> anyhow::Result<()> {
    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM)?;
    let grounded = GroundedProblem::new(problem)?;
    let dir = std::env::temp_dir().join(format!("queryplan-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let transcript = dir.join("transcript.jsonl");
    let _ = std::fs::remove_file(&transcript);
    let cfg = LlmConfig::default();

    // Recording pass against the scripted backend.
    let writer = Arc::new(TranscriptWriter::create(&transcript)?);
    let mut recorder =
        LlmClient::with_backend(&cfg, Box::new(TwoAttemptPlanner { calls: 0 })).record_to(writer);
    recorder.set_run("record");
    let recorded = run_once(recorder, &grounded);
    println!(
        "recorded:  success={} wmq={} llm_calls={} tokens={}+{}",
        recorded.success,
        recorded.wmq_used,
        recorded.llm_calls,
        recorded.prompt_tokens,
        recorded.completion_tokens
    );

    // Two replay passes; a replay client cannot touch the network at all.
    for pass in 1..=2 {
        let mut replay = LlmClient::replay(&cfg, &transcript)?;
        replay.set_run(format!("replay-{pass}"));
        let outcome = run_once(replay, &grounded);
        println!(
            "replay {pass}:  success={} wmq={} llm_calls={} tokens={}+{}",
            outcome.success,
            outcome.wmq_used,
            outcome.llm_calls,
            outcome.prompt_tokens,
            outcome.completion_tokens
        );
        assert_eq!(outcome.success, recorded.success);
        assert_eq!(outcome.wmq_used, recorded.wmq_used);
        assert_eq!(outcome.prompt_tokens, recorded.prompt_tokens);
    }
    println!("transcript: {}", transcript.display());
    Ok(())
}
