//! Policy-guided tree search: beam search and depth-first search driven by
//! an action proposer and a three-way state evaluator, with every expansion
//! charged against the query budget.

use queryplan::bench::{context_for_problem, gen_blocksworld};
use queryplan::pddl::GroundedProblem;
use queryplan::planners::{run_toi_bfs, run_toi_dfs, ToiBfsParams, ToiDfsParams};
use queryplan::policy::OraclePolicy;
use queryplan::world::WorldModel;

fn main() -> anyhow::Result<()> {
    println!(
        "{:<14} {:>7} {:>9} {:>8} {:>6}",
        "instance", "planner", "success", "wmq", "plan"
    );
    for seed in 0..6u64 {
        let grounded = GroundedProblem::new(gen_blocksworld(4, seed))?;
        let ctx = context_for_problem(&grounded);

        let mut bfs_world = WorldModel::new(&grounded, Some(20));
        let mut bfs_policy = OraclePolicy::new(&grounded);
        let bfs = run_toi_bfs(
            &mut bfs_world,
            &mut bfs_policy,
            &ctx,
            ToiBfsParams::default(),
        );
        println!(
            "{:<14} {:>7} {:>9} {:>8} {:>6}",
            grounded.problem.name,
            "beam",
            bfs.success,
            bfs.wmq_used,
            bfs.plan_length().map(|l| l.to_string()).unwrap_or_default()
        );

        let mut dfs_world = WorldModel::new(&grounded, Some(20));
        let mut dfs_policy = OraclePolicy::new(&grounded);
        let dfs = run_toi_dfs(
            &mut dfs_world,
            &mut dfs_policy,
            &ctx,
            ToiDfsParams::default(),
        );
        println!(
            "{:<14} {:>7} {:>9} {:>8} {:>6}",
            "",
            "dfs",
            dfs.success,
            dfs.wmq_used,
            dfs.plan_length().map(|l| l.to_string()).unwrap_or_default()
        );
        if bfs.success {
            // Beam widths after every update stay within b.
            assert!(bfs.trace.beam_sizes.iter().all(|&s| s <= 2));
        }
    }
    Ok(())
}
