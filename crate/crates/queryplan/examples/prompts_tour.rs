//! Tour of the prompt templates and response parsers: build each prompt
//! kind for the same instance, then parse well-formed responses back into
//! structured decisions.

use queryplan::bench::context_for_problem;
use queryplan::fixtures;
use queryplan::llm::{
    build_prompt, parse_action_sequence, parse_actions_line, parse_rating, parse_selection,
    PromptInputs, PromptKind,
};
use queryplan::pddl::{applicable_actions, parse_pddl, GroundedProblem};

fn main() -> anyhow::Result<()> {
    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM)?;
    let grounded = GroundedProblem::new(problem)?;
    let ctx = context_for_problem(&grounded);
    let state_text = grounded.problem.init.typed_atoms().join(", ");
    let goal_text = grounded.problem.goal.typed_atoms().join(", ");
    let valid: Vec<String> = applicable_actions(&grounded.problem.init, &grounded.actions)
        .iter()
        .map(|a| a.display_name.clone())
        .collect();

    for kind in PromptKind::ALL {
        let inputs = PromptInputs {
            state_text: Some(&state_text),
            goal_text: Some(&goal_text),
            valid_actions: Some(&valid),
            history_text: if kind == PromptKind::ReactSelect {
                Some("State 0:\nthe start\nValid Actions:\n- unstack(a:default,b:default)")
            } else {
                None
            },
            feedback: None,
            k: Some(2),
            example: None,
        };
        let (system, user) = build_prompt(kind, &ctx, &inputs)?;
        println!(
            "{kind:<14} system {:>5} bytes, user {:>4} bytes",
            system.len(),
            user.len()
        );
    }

    println!("\nparsing structured responses:");
    let plan = parse_action_sequence(
        "Reflect: ok\nThink: ok\nAction Sequence: unstack(a:default,b:default), put-down(a:default)",
        &grounded.actions,
    )?;
    println!("  plan of {} actions, first {}", plan.len(), plan[0]);
    let picks = parse_actions_line(
        "Think: both\nActions: pick-up(c), unstack(a,b)",
        &grounded.actions,
    )?;
    println!("  proposal of {} actions", picks.len());
    let rating = parse_rating("Think: close\nRating: maybe")?;
    println!("  rating {rating}");
    let (idx, action) = parse_selection("Selection: state 0, pick-up(c)", &grounded.actions)?;
    println!("  selection: state {idx}, {action}");

    // Malformed text comes back as a structured error, never a crash.
    let err = parse_rating("Rating: 7/10").unwrap_err();
    println!("  malformed rating -> {err}");
    Ok(())
}
