//! Why laziness wins on query count: on a chain world with dummy branches,
//! eager expansion with a perfect heuristic pays degree-times-path-length,
//! while lazy path evaluation pays the path length alone.

use queryplan::classical::{gen_chain_world, parse_graph, run_graph_astar, run_lazysp_psrl};

fn main() -> anyhow::Result<()> {
    // The checked-in fixture: a five-edge chain, two dummy branches per
    // chain vertex, all edges valid with prior 1.
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/graphs/chain5.graph"
    ))?;
    let g = parse_graph(&text)?;
    let eager = run_graph_astar(&g);
    let lazy = run_lazysp_psrl(&g, 10, 0)?;
    println!("chain of 5 with 2 dummies per vertex:");
    println!("  eager edge evaluations: {}", eager.edge_evaluations);
    println!("  lazy queries:           {}", lazy.wmq_used);
    println!(
        "  ratio:                  {}x",
        eager.edge_evaluations / lazy.wmq_used
    );

    println!("\nsweep over branch factors (chain length 6):");
    println!("{:>8} {:>8} {:>8}", "dummies", "eager", "lazy");
    for dummies in 1..=4 {
        let g = gen_chain_world(6, dummies);
        let eager = run_graph_astar(&g);
        let lazy = run_lazysp_psrl(&g, 10, 0)?;
        println!(
            "{:>8} {:>8} {:>8}",
            dummies, eager.edge_evaluations, lazy.wmq_used
        );
    }
    Ok(())
}
