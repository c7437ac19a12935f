//! A whole benchmark suite from a config: generated problems, several
//! planners, per-run records, and the aggregated summary with the query
//! histogram.

use queryplan::bench::{run_suite, SuiteConfig};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join(format!("queryplan-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config_text = format!(
        r#"
[suite]
budget = 20
seeds = [0]
records_jsonl = "{dir}/records.jsonl"
records_csv = "{dir}/records.csv"
summary_csv = "{dir}/summary.csv"
histogram_csv = "{dir}/histogram.csv"

[suite.generator]
family = "blocksworld"
n_blocks = 4
count = 10
seed = 100

[planners.boomerang_oracle]
kind = "boomerang"
policy = "oracle"

[planners.react_oracle]
kind = "react"
policy = "oracle"

[planners.react_random]
kind = "react"
policy = "random"

[planners.toi_bfs_oracle]
kind = "toi_bfs"
policy = "oracle"
k = 2
b = 2

[planners.astar_goal_count]
kind = "astar"
heuristic = "goal_count"
"#,
        dir = dir.display()
    );
    let cfg = SuiteConfig::from_toml(&config_text)?;
    let result = run_suite(&cfg)?;

    println!(
        "{:<18} {:>5} {:>9} {:>9} {:>9} {:>11}",
        "planner", "runs", "success", "+/- se", "mean wmq", "optimality"
    );
    for p in &result.summary.planners {
        println!(
            "{:<18} {:>5} {:>9.2} {:>9.2} {:>9.2} {:>11.2}",
            p.planner_id, p.runs, p.success_rate, p.success_se, p.mean_wmq, p.optimality_rate
        );
    }
    println!("\nwmq histogram bins (0..=20):");
    for h in &result.summary.histograms {
        let rendered: Vec<String> = h.counts.iter().map(|c| c.to_string()).collect();
        println!("  {:<18} [{}]", h.planner_id, rendered.join(" "));
    }
    println!("\noutputs under {}", dir.display());
    Ok(())
}
