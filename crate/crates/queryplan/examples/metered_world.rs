//! The metered oracle in action: budget charging, the query cache, and lazy
//! plan verification with structured feedback.

use queryplan::fixtures;
use queryplan::pddl::{parse_action_string, parse_pddl, GroundedProblem};
use queryplan::world::WorldModel;

fn main() -> anyhow::Result<()> {
    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM)?;
    let grounded = GroundedProblem::new(problem)?;
    let mut world = WorldModel::new(&grounded, Some(20));
    let s0 = world.initial_state();
    let goal = world.goal().clone();
    let plan = |names: &[&str]| -> Vec<_> {
        names
            .iter()
            .map(|n| parse_action_string(n, &grounded.actions).unwrap().clone())
            .collect()
    };

    // A plan that fails at its third action: the first verification charges
    // three queries and reports exactly which preconditions failed.
    let failing = plan(&["unstack(a,b)", "put-down(a)", "unstack(a,b)"]);
    let result = world.verify_plan(&s0, &failing, &goal);
    println!(
        "attempt 1: reached_goal={} new_queries={}",
        result.reached_goal, result.new_queries
    );
    println!("  feedback: {}", result.error.unwrap());
    println!(
        "  ledger: used={} cache_hits={}",
        world.ledger().used,
        world.ledger().cache_hits
    );

    // Resubmitting the identical plan is free: every step is cached.
    let again = world.verify_plan(&s0, &failing, &goal);
    println!("attempt 2 (same plan): new_queries={}", again.new_queries);

    // A corrected plan sharing the two-step prefix pays only for its suffix.
    let fixed = plan(&["unstack(a,b)", "put-down(a)", "pick-up(b)", "stack(b,c)"]);
    let done = world.verify_plan(&s0, &fixed, &goal);
    println!(
        "attempt 3 (shared prefix): reached_goal={} new_queries={}",
        done.reached_goal, done.new_queries
    );
    println!(
        "final ledger: used={} cache_hits={} remaining={:?}",
        world.ledger().used,
        world.ledger().cache_hits,
        world.ledger().remaining()
    );
    Ok(())
}
