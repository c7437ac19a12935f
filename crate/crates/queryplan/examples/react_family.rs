//! The one-action-at-a-time planners side by side: plain stepping, stepping
//! with free choice of which visited state to act from, and stepping with
//! cycle-triggered resets.

use queryplan::bench::{context_for_problem, gen_blocksworld};
use queryplan::pddl::GroundedProblem;
use queryplan::planners::{run_react, run_react_select, run_reflexion};
use queryplan::policy::{OraclePolicy, RandomPolicy};
use queryplan::world::WorldModel;

fn main() -> anyhow::Result<()> {
    let grounded = GroundedProblem::new(gen_blocksworld(4, 11))?;
    let ctx = context_for_problem(&grounded);
    println!("instance: {}", grounded.problem.name);

    let mut world = WorldModel::new(&grounded, Some(20));
    let mut oracle = OraclePolicy::new(&grounded);
    let react = run_react(&mut world, &mut oracle, &ctx, 20);
    println!(
        "react/oracle:        success={} wmq={} plan={:?}",
        react.success,
        react.wmq_used,
        react.plan_length()
    );

    let mut world = WorldModel::new(&grounded, Some(20));
    let mut oracle = OraclePolicy::new(&grounded);
    let select = run_react_select(&mut world, &mut oracle, &ctx, 20);
    println!(
        "react-select/oracle: success={} wmq={} plan={:?}",
        select.success,
        select.wmq_used,
        select.plan_length()
    );

    let mut world = WorldModel::new(&grounded, Some(20));
    let mut oracle = OraclePolicy::new(&grounded);
    let reflexion = run_reflexion(&mut world, &mut oracle, &ctx, 20);
    println!(
        "reflexion/oracle:    success={} wmq={} plan={:?}",
        reflexion.success,
        reflexion.wmq_used,
        reflexion.plan_length()
    );

    // A random policy burns the budget on wasted queries; the ledger caps it.
    let mut world = WorldModel::new(&grounded, Some(20));
    let mut random = RandomPolicy::new(&grounded, 7);
    let chaotic = run_react(&mut world, &mut random, &ctx, 20);
    println!(
        "react/random(7):     success={} wmq={} failure={:?}",
        chaotic.success, chaotic.wmq_used, chaotic.failure_reason
    );
    Ok(())
}
