//! The generative replanning loop with scripted and oracle policies: whole
//! plans are verified lazily, failures feed back, and cached prefixes make
//! replans cheap.

use queryplan::bench::{context_for_problem, gen_blocksworld, optimal_length_oracle};
use queryplan::pddl::{parse_action_string, GroundedProblem};
use queryplan::planners::run_boomerang;
use queryplan::policy::{OraclePolicy, ScriptedPolicy};
use queryplan::world::WorldModel;

fn main() -> anyhow::Result<()> {
    // Oracle policy: the first generated plan is optimal, so the query bill
    // equals the optimal plan length exactly.
    for seed in 0..5u64 {
        let grounded = GroundedProblem::new(gen_blocksworld(4, seed))?;
        let ctx = context_for_problem(&grounded);
        let optimal = optimal_length_oracle(&grounded, 200_000).unwrap();
        let mut world = WorldModel::new(&grounded, Some(20));
        let mut policy = OraclePolicy::new(&grounded);
        let outcome = run_boomerang(&mut world, &mut policy, &ctx, 20);
        println!(
            "{}: success={} wmq={} optimal={} iterations={}",
            grounded.problem.name,
            outcome.success,
            outcome.wmq_used,
            optimal,
            outcome.trace.iterations
        );
        assert_eq!(outcome.wmq_used, optimal as u64);
    }

    // Scripted policy: plan one fails at step three, plan two shares the
    // two-step prefix, so the run charges 3 + (len2 - 2).
    let grounded = GroundedProblem::new(queryplan::pddl::parse_pddl(
        queryplan::fixtures::BLOCKSWORLD_DOMAIN,
        queryplan::fixtures::BLOCKS3_PROBLEM,
    )?)?;
    let ctx = context_for_problem(&grounded);
    let plan = |names: &[&str]| -> Vec<_> {
        names
            .iter()
            .map(|n| parse_action_string(n, &grounded.actions).unwrap().clone())
            .collect()
    };
    let mut world = WorldModel::new(&grounded, Some(20));
    let mut scripted = ScriptedPolicy::new().with_plans(vec![
        plan(&["unstack(a,b)", "put-down(a)", "unstack(a,b)"]),
        plan(&["unstack(a,b)", "put-down(a)", "pick-up(b)", "stack(b,c)"]),
    ]);
    let outcome = run_boomerang(&mut world, &mut scripted, &ctx, 20);
    println!(
        "\nscripted replan: success={} wmq={} (3 for the failed attempt + 2 fresh)",
        outcome.success, outcome.wmq_used
    );
    Ok(())
}
