//! Explicit-graph testbed for query-efficient search: edges have hidden
//! validity and a prior; a lazy posterior-sampling planner evaluates only the
//! edges on currently proposed paths and tracks per-iteration regret, while
//! an eager perfect-heuristic search pays for every out-edge it expands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no source-target path exists: the graph is disconnected and all candidate edges are exhausted")]
    NoPathExists,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    /// Prior probability that the edge is traversable, in (0, 1].
    pub prior_p: f64,
    /// Hidden ground truth, revealed only by evaluation.
    pub true_valid: bool,
}

#[derive(Debug, Clone)]
pub struct GraphWorld {
    pub n_vertices: usize,
    pub edges: Vec<GraphEdge>,
    pub source: usize,
    pub target: usize,
}

impl GraphWorld {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.from].push(i);
        }
        adj
    }

    /// True-graph shortest distances (in hops) to the target; `None` where
    /// the target is unreachable over valid edges.
    fn true_distances_to_target(&self) -> Vec<Option<u64>> {
        let mut rev = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            if e.true_valid {
                rev[e.to].push(e.from);
            }
        }
        let mut dist = vec![None; self.n_vertices];
        let mut queue = std::collections::VecDeque::new();
        dist[self.target] = Some(0);
        queue.push_back(self.target);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &p in &rev[v] {
                if dist[p].is_none() {
                    dist[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
        dist
    }
}

/// Belief about one edge. Known states are absorbing: the world is
/// deterministic, so one observation collapses the posterior for good.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeBelief {
    Unknown(f64),
    KnownValid,
    KnownInvalid,
}

/// Per-iteration regret: the number of infeasible edges discovered on each
/// proposed path, plus the running total. Iterations after a confirmed path
/// contribute zero.
#[derive(Debug, Clone, Default)]
pub struct RegretTrace {
    pub deltas: Vec<u64>,
    pub cumulative: Vec<u64>,
}

impl RegretTrace {
    fn push(&mut self, delta: u64) {
        let total = self.cumulative.last().copied().unwrap_or(0) + delta;
        self.deltas.push(delta);
        self.cumulative.push(total);
    }

    pub fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct LazySpOutcome {
    /// Edge indices of the confirmed path, when one was found.
    pub path: Option<Vec<usize>>,
    pub wmq_used: u64,
    pub trace: RegretTrace,
    /// Iteration (1-based) at which the path was confirmed.
    pub confirmed_at: Option<usize>,
}

/// Breadth-first shortest path by hop count over the edge subset for which
/// `include` holds. Deterministic: neighbors expand in edge-index order.
fn shortest_path(
    g: &GraphWorld,
    adj: &[Vec<usize>],
    include: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    if g.source == g.target {
        return Some(Vec::new());
    }
    let mut parent_edge: Vec<Option<usize>> = vec![None; g.n_vertices];
    let mut seen = vec![false; g.n_vertices];
    let mut queue = std::collections::VecDeque::new();
    seen[g.source] = true;
    queue.push_back(g.source);
    while let Some(v) = queue.pop_front() {
        for &ei in &adj[v] {
            if !include(ei) {
                continue;
            }
            let to = g.edges[ei].to;
            if seen[to] {
                continue;
            }
            seen[to] = true;
            parent_edge[to] = Some(ei);
            if to == g.target {
                let mut path = Vec::new();
                let mut at = to;
                while let Some(ei) = parent_edge[at] {
                    path.push(ei);
                    at = g.edges[ei].from;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(to);
        }
    }
    None
}

fn evaluate_path(g: &GraphWorld, beliefs: &mut [EdgeBelief], path: &[usize], wmq: &mut u64) -> u64 {
    let mut invalid = 0;
    for &ei in path {
        if let EdgeBelief::Unknown(_) = beliefs[ei] {
            *wmq += 1;
            beliefs[ei] = if g.edges[ei].true_valid {
                EdgeBelief::KnownValid
            } else {
                invalid += 1;
                EdgeBelief::KnownInvalid
            };
        }
    }
    invalid
}

fn path_confirmed(beliefs: &[EdgeBelief], path: &[usize]) -> bool {
    path.iter().all(|&ei| beliefs[ei] == EdgeBelief::KnownValid)
}

/// A sampled world can disconnect source from target; the planner always
/// proposes something (as a generative planner does), so it redraws up to
/// this many times before conceding the iteration.
const SAMPLE_ATTEMPTS: usize = 16;

/// Lazy shortest path with posterior sampling.
///
/// Each iteration samples a world from the edge beliefs (unknown edges are
/// valid with their prior probability, known edges are fixed), plans a
/// shortest path in the sample, evaluates the path's unknown edges (one
/// query each), collapses the beliefs, and records the number of infeasible
/// edges found as that iteration's regret. Terminates when a fully valid
/// source-to-target path is confirmed; later iterations pad the trace with
/// zero regret. An iteration whose samples all come up pathless records the
/// maximal single-path regret (vertex count minus one).
pub fn run_lazysp_psrl(
    g: &GraphWorld,
    t_max: usize,
    seed: u64,
) -> Result<LazySpOutcome, GraphError> {
    let adj = g.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut beliefs: Vec<EdgeBelief> = g
        .edges
        .iter()
        .map(|e| EdgeBelief::Unknown(e.prior_p))
        .collect();
    let mut wmq = 0u64;
    let mut trace = RegretTrace::default();
    let mut confirmed: Option<Vec<usize>> = None;
    let mut confirmed_at = None;

    for t in 1..=t_max {
        if confirmed.is_some() {
            trace.push(0);
            continue;
        }
        // If even the optimistic graph (known-valid plus unknown edges) is
        // disconnected, no path can exist.
        let optimistic = shortest_path(g, &adj, |ei| beliefs[ei] != EdgeBelief::KnownInvalid);
        if optimistic.is_none() {
            return Err(GraphError::NoPathExists);
        }
        let mut proposed = None;
        for _ in 0..SAMPLE_ATTEMPTS {
            let sample: Vec<bool> = beliefs
                .iter()
                .map(|b| match b {
                    EdgeBelief::KnownValid => true,
                    EdgeBelief::KnownInvalid => false,
                    EdgeBelief::Unknown(p) => rng.random::<f64>() < *p,
                })
                .collect();
            if let Some(path) = shortest_path(g, &adj, |ei| sample[ei]) {
                proposed = Some(path);
                break;
            }
        }
        match proposed {
            None => trace.push(g.n_vertices.saturating_sub(1) as u64),
            Some(path) => {
                let invalid = evaluate_path(g, &mut beliefs, &path, &mut wmq);
                trace.push(invalid);
                if invalid == 0 && path_confirmed(&beliefs, &path) {
                    confirmed = Some(path);
                    confirmed_at = Some(t);
                }
            }
        }
    }
    Ok(LazySpOutcome {
        path: confirmed,
        wmq_used: wmq,
        trace,
        confirmed_at,
    })
}

/// Baseline proposer for regret comparisons: each iteration walks a random
/// simple path through the optimistic graph (uniformly shuffled neighbor
/// order), evaluates it, and updates beliefs the same way the lazy planner
/// does.
pub fn run_random_proposer(
    g: &GraphWorld,
    t_max: usize,
    seed: u64,
) -> Result<LazySpOutcome, GraphError> {
    let adj = g.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut beliefs: Vec<EdgeBelief> = g
        .edges
        .iter()
        .map(|e| EdgeBelief::Unknown(e.prior_p))
        .collect();
    let mut wmq = 0u64;
    let mut trace = RegretTrace::default();
    let mut confirmed: Option<Vec<usize>> = None;
    let mut confirmed_at = None;

    for t in 1..=t_max {
        if confirmed.is_some() {
            trace.push(0);
            continue;
        }
        let path = random_path(g, &adj, &beliefs, &mut rng);
        match path {
            None => {
                // Optimistic graph disconnected: nothing left to try.
                if shortest_path(g, &adj, |ei| beliefs[ei] != EdgeBelief::KnownInvalid).is_none() {
                    return Err(GraphError::NoPathExists);
                }
                trace.push(g.n_vertices.saturating_sub(1) as u64);
            }
            Some(path) => {
                let invalid = evaluate_path(g, &mut beliefs, &path, &mut wmq);
                trace.push(invalid);
                if invalid == 0 && path_confirmed(&beliefs, &path) {
                    confirmed = Some(path);
                    confirmed_at = Some(t);
                }
            }
        }
    }
    Ok(LazySpOutcome {
        path: confirmed,
        wmq_used: wmq,
        trace,
        confirmed_at,
    })
}

/// Randomized depth-first walk to the target over non-invalid edges.
fn random_path(
    g: &GraphWorld,
    adj: &[Vec<usize>],
    beliefs: &[EdgeBelief],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut on_path = vec![false; g.n_vertices];
    let mut path: Vec<usize> = Vec::new();
    fn walk(
        g: &GraphWorld,
        adj: &[Vec<usize>],
        beliefs: &[EdgeBelief],
        rng: &mut ChaCha8Rng,
        at: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
    ) -> bool {
        if at == g.target {
            return true;
        }
        on_path[at] = true;
        let mut out: Vec<usize> = adj[at]
            .iter()
            .copied()
            .filter(|&ei| beliefs[ei] != EdgeBelief::KnownInvalid && !on_path[g.edges[ei].to])
            .collect();
        // Fisher-Yates with the run's seeded generator.
        for i in (1..out.len()).rev() {
            let j = rng.random_range(0..=i);
            out.swap(i, j);
        }
        for ei in out {
            path.push(ei);
            if walk(g, adj, beliefs, rng, g.edges[ei].to, on_path, path) {
                return true;
            }
            path.pop();
        }
        on_path[at] = false;
        false
    }
    if walk(g, adj, beliefs, rng, g.source, &mut on_path, &mut path) {
        Some(path)
    } else {
        None
    }
}

#[derive(Debug, Clone)]
pub struct GraphAstarOutcome {
    pub path_len: Option<u64>,
    /// One query per out-edge evaluated during vertex expansion.
    pub edge_evaluations: u64,
}

/// Eager search with a perfect heuristic: expands vertices in true-distance
/// order, and every expansion evaluates all of the vertex's out-edges. The
/// query-count contrast with [`run_lazysp_psrl`] is the point: even perfect
/// information pays degree-times-path-length here.
pub fn run_graph_astar(g: &GraphWorld) -> GraphAstarOutcome {
    let adj = g.adjacency();
    let h = g.true_distances_to_target();
    let mut evaluations = 0u64;
    if h[g.source].is_none() {
        return GraphAstarOutcome {
            path_len: None,
            edge_evaluations: 0,
        };
    }
    let mut best_g: Vec<Option<u64>> = vec![None; g.n_vertices];
    let mut closed = vec![false; g.n_vertices];
    let mut open: std::collections::BinaryHeap<std::cmp::Reverse<(u64, u64, usize)>> =
        std::collections::BinaryHeap::new();
    let mut seq = 0u64;
    best_g[g.source] = Some(0);
    open.push(std::cmp::Reverse((h[g.source].unwrap(), seq, g.source)));
    while let Some(std::cmp::Reverse((_, _, v))) = open.pop() {
        if closed[v] {
            continue;
        }
        if v == g.target {
            return GraphAstarOutcome {
                path_len: best_g[v],
                edge_evaluations: evaluations,
            };
        }
        closed[v] = true;
        let gv = best_g[v].unwrap();
        for &ei in &adj[v] {
            evaluations += 1;
            if !g.edges[ei].true_valid {
                continue;
            }
            let to = g.edges[ei].to;
            let g_next = gv + 1;
            if best_g[to].map_or(true, |cur| g_next < cur) {
                best_g[to] = Some(g_next);
                if let Some(ht) = h[to] {
                    seq += 1;
                    open.push(std::cmp::Reverse((g_next + ht, seq, to)));
                }
            }
        }
    }
    GraphAstarOutcome {
        path_len: None,
        edge_evaluations: evaluations,
    }
}

/// Backbone chain from source to target with valid dummy out-edges hanging
/// off every chain vertex, all priors 1.0. The structural case where lazy
/// evaluation pays exactly the chain length while eager expansion pays the
/// full out-degree at every chain vertex.
pub fn gen_chain_world(chain_len: usize, dummies_per_vertex: usize) -> GraphWorld {
    let mut edges = Vec::new();
    let mut n = chain_len + 1;
    for v in 0..chain_len {
        edges.push(GraphEdge {
            from: v,
            to: v + 1,
            prior_p: 1.0,
            true_valid: true,
        });
        for _ in 0..dummies_per_vertex {
            edges.push(GraphEdge {
                from: v,
                to: n,
                prior_p: 1.0,
                true_valid: true,
            });
            n += 1;
        }
    }
    GraphWorld {
        n_vertices: n,
        edges,
        source: 0,
        target: chain_len,
    }
}

/// Randomized chain world: length 3..=8, 1..=3 dummies per chain vertex.
pub fn gen_chain_world_seeded(seed: u64) -> GraphWorld {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(3..=8);
    let dummies = rng.random_range(1..=3);
    gen_chain_world(len, dummies)
}

/// Random belief-world: `n` vertices, out-degree 2..=4, every edge truly
/// valid with probability `prior` and carrying that same prior. Retries
/// derived seeds until the true graph connects source to target at least
/// `MIN_TRUE_DISTANCE` hops apart, so instances are solvable by construction
/// and never trivially close.
const MIN_TRUE_DISTANCE: u64 = 8;

pub fn gen_belief_world(seed: u64, prior: f64) -> GraphWorld {
    for attempt in 0..512u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(attempt),
        );
        let n = rng.random_range(30..=50);
        let mut edges = Vec::new();
        for v in 0..n {
            let degree = rng.random_range(2..=4usize);
            let mut targets = Vec::new();
            while targets.len() < degree {
                let to = rng.random_range(0..n);
                if to != v && !targets.contains(&to) {
                    targets.push(to);
                }
            }
            for to in targets {
                edges.push(GraphEdge {
                    from: v,
                    to,
                    prior_p: prior,
                    true_valid: rng.random::<f64>() < prior,
                });
            }
        }
        let g = GraphWorld {
            n_vertices: n,
            edges,
            source: 0,
            target: n - 1,
        };
        if let Some(d) = g.true_distances_to_target()[g.source] {
            if d >= MIN_TRUE_DISTANCE {
                return g;
            }
        }
    }
    // With out-degree >= 2 and priors near one this is unreachable in
    // practice; fall back to a trivially solvable chain.
    gen_chain_world(MIN_TRUE_DISTANCE as usize, 2)
}

/// Parse the checked-in fixture format:
///
/// ```text
/// # comment
/// vertices N
/// source S
/// target T
/// edge FROM TO PRIOR valid|invalid
/// ```
pub fn parse_graph(text: &str) -> Result<GraphWorld, GraphError> {
    let mut n_vertices = None;
    let mut source = None;
    let mut target = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_usize = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("expected a number, got '{s}'"),
            })
        };
        match fields[0] {
            "vertices" if fields.len() == 2 => n_vertices = Some(parse_usize(fields[1])?),
            "source" if fields.len() == 2 => source = Some(parse_usize(fields[1])?),
            "target" if fields.len() == 2 => target = Some(parse_usize(fields[1])?),
            "edge" if fields.len() == 5 => {
                let prior_p: f64 = fields[3].parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    message: format!("bad prior '{}'", fields[3]),
                })?;
                if !(prior_p > 0.0 && prior_p <= 1.0) {
                    return Err(GraphError::Parse {
                        line: line_no,
                        message: format!("prior {prior_p} outside (0, 1]"),
                    });
                }
                let true_valid = match fields[4] {
                    "valid" => true,
                    "invalid" => false,
                    other => {
                        return Err(GraphError::Parse {
                            line: line_no,
                            message: format!("expected valid|invalid, got '{other}'"),
                        })
                    }
                };
                edges.push(GraphEdge {
                    from: parse_usize(fields[1])?,
                    to: parse_usize(fields[2])?,
                    prior_p,
                    true_valid,
                });
            }
            other => {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: format!("unrecognized directive '{other}'"),
                })
            }
        }
    }
    let n_vertices = n_vertices.ok_or(GraphError::Parse {
        line: 0,
        message: "missing 'vertices' line".into(),
    })?;
    let source = source.ok_or(GraphError::Parse {
        line: 0,
        message: "missing 'source' line".into(),
    })?;
    let target = target.ok_or(GraphError::Parse {
        line: 0,
        message: "missing 'target' line".into(),
    })?;
    for (i, e) in edges.iter().enumerate() {
        if e.from >= n_vertices || e.to >= n_vertices {
            return Err(GraphError::Parse {
                line: 0,
                message: format!("edge {i} references a vertex outside 0..{n_vertices}"),
            });
        }
    }
    Ok(GraphWorld {
        n_vertices,
        edges,
        source,
        target,
    })
}

pub fn render_graph(g: &GraphWorld) -> String {
    let mut out = String::new();
    out.push_str(&format!("vertices {}\n", g.n_vertices));
    out.push_str(&format!("source {}\n", g.source));
    out.push_str(&format!("target {}\n", g.target));
    for e in &g.edges {
        out.push_str(&format!(
            "edge {} {} {} {}\n",
            e.from,
            e.to,
            e.prior_p,
            if e.true_valid { "valid" } else { "invalid" }
        ));
    }
    out
}
