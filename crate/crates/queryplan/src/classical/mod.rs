//! LLM-free baselines and the query-efficiency testbed: best-first search
//! with world-model accounting, delete-relaxation heuristics, and a lazy
//! posterior-sampling shortest-path planner with regret instrumentation.

mod best_first;
mod graph;
mod heuristics;

pub use best_first::run_best_first;
pub use graph::{
    gen_belief_world, gen_chain_world, gen_chain_world_seeded, parse_graph, render_graph,
    run_graph_astar, run_lazysp_psrl, run_random_proposer, EdgeBelief, GraphAstarOutcome,
    GraphEdge, GraphError, GraphWorld, LazySpOutcome, RegretTrace,
};
pub use heuristics::{HeuristicContext, HeuristicKind};
