//! Delete-relaxation heuristics over the grounded problem: unmet-goal
//! counting, additive cost propagation, and relaxed-plan extraction from the
//! best-supporter graph.

use crate::pddl::{GroundedProblem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    GoalCount,
    HAdd,
    HFf,
}

impl std::fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HeuristicKind::GoalCount => "goal_count",
            HeuristicKind::HAdd => "h_add",
            HeuristicKind::HFf => "h_ff",
        };
        f.write_str(s)
    }
}

/// Precomputed id-level action sets for fast repeated evaluation.
pub struct HeuristicContext {
    n_atoms: usize,
    /// (pre, add) id lists per ground action, in display-name order.
    actions: Vec<(Vec<u32>, Vec<u32>)>,
}

impl HeuristicContext {
    pub fn new(grounded: &GroundedProblem) -> Self {
        let actions = grounded
            .actions
            .iter()
            .map(|a| (a.pre.to_vec(), a.add.to_vec()))
            .collect();
        HeuristicContext {
            n_atoms: grounded.problem.atom_table().len(),
            actions,
        }
    }

    /// Heuristic estimate of the cost to reach `goal` from `state`;
    /// `None` means the goal is unreachable even in the delete relaxation.
    pub fn value(&self, kind: HeuristicKind, state: &State, goal: &State) -> Option<u64> {
        match kind {
            HeuristicKind::GoalCount => Some(self.goal_count(state, goal)),
            HeuristicKind::HAdd => {
                let costs = self.additive_costs(state);
                goal.ids()
                    .iter()
                    .try_fold(0u64, |acc, &g| costs[g as usize].map(|c| acc + c))
            }
            HeuristicKind::HFf => self.relaxed_plan(state, goal).map(|p| p.len() as u64),
        }
    }

    fn goal_count(&self, state: &State, goal: &State) -> u64 {
        goal.ids()
            .iter()
            .filter(|id| state.ids().binary_search(id).is_err())
            .count() as u64
    }

    /// Fixed-point additive costs: atoms in `state` cost 0; an action costs
    /// one plus the sum of its precondition costs and offers that price to
    /// everything it adds.
    fn additive_costs(&self, state: &State) -> Vec<Option<u64>> {
        let mut costs: Vec<Option<u64>> = vec![None; self.n_atoms];
        for &id in state.ids() {
            costs[id as usize] = Some(0);
        }
        loop {
            let mut changed = false;
            for (pre, add) in &self.actions {
                let mut total = 1u64;
                let mut reachable = true;
                for &p in pre {
                    match costs[p as usize] {
                        Some(c) => total += c,
                        None => {
                            reachable = false;
                            break;
                        }
                    }
                }
                if !reachable {
                    continue;
                }
                for &q in add {
                    if costs[q as usize].map_or(true, |c| total < c) {
                        costs[q as usize] = Some(total);
                        changed = true;
                    }
                }
            }
            if !changed {
                return costs;
            }
        }
    }

    /// Relaxed plan via best supporters: for each needed atom take the
    /// cheapest achiever (ties broken by action order, i.e. display name),
    /// then recurse on its unsatisfied preconditions. Returns action indices.
    pub fn relaxed_plan(&self, state: &State, goal: &State) -> Option<Vec<usize>> {
        let costs = self.additive_costs(state);
        for &g in goal.ids() {
            costs[g as usize]?;
        }
        // Best supporter per atom, derived after convergence so the
        // lowest-cost-then-lexicographic rule is exact.
        let mut supporter: Vec<Option<(u64, usize)>> = vec![None; self.n_atoms];
        for (idx, (pre, add)) in self.actions.iter().enumerate() {
            let mut total = 1u64;
            let mut reachable = true;
            for &p in pre {
                match costs[p as usize] {
                    Some(c) => total += c,
                    None => {
                        reachable = false;
                        break;
                    }
                }
            }
            if !reachable {
                continue;
            }
            for &q in add {
                let better = match supporter[q as usize] {
                    None => true,
                    Some((best, _)) => total < best,
                };
                if better {
                    supporter[q as usize] = Some((total, idx));
                }
            }
        }
        let in_state = |id: u32| state.ids().binary_search(&id).is_ok();
        let mut chosen: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        let mut pending: Vec<u32> = goal
            .ids()
            .iter()
            .copied()
            .filter(|&g| !in_state(g))
            .collect();
        let mut satisfied: std::collections::HashSet<u32> = std::collections::HashSet::new();
        while let Some(atom) = pending.pop() {
            if satisfied.contains(&atom) || in_state(atom) {
                continue;
            }
            satisfied.insert(atom);
            let (_, action) = supporter[atom as usize].expect("finite-cost atom has a supporter");
            if chosen.insert(action) {
                for &p in &self.actions[action].0 {
                    if !in_state(p) && !satisfied.contains(&p) {
                        pending.push(p);
                    }
                }
            }
        }
        Some(chosen.into_iter().collect())
    }
}
