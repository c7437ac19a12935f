//! Exact optimal plan length by uncharged breadth-first search. The oracle
//! sits outside the metered world model: it never touches a ledger.

use std::collections::{HashSet, VecDeque};

use crate::pddl::{
    applicable_actions, apply_action, satisfies_goal, ApplyOutcome, GroundedProblem,
};

pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Optimal plan length for the instance, or `None` when the reachable state
/// space exceeds `state_cap` before the goal is seen (unknown, not failure).
pub fn optimal_length_oracle(grounded: &GroundedProblem, state_cap: usize) -> Option<usize> {
    let goal = &grounded.problem.goal;
    let start = grounded.problem.init.clone();
    if satisfies_goal(&start, goal) {
        return Some(0);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back((start, 0usize));
    while let Some((state, depth)) = queue.pop_front() {
        for action in applicable_actions(&state, &grounded.actions) {
            if let ApplyOutcome::Applied(next) = apply_action(&state, action) {
                if satisfies_goal(&next, goal) {
                    return Some(depth + 1);
                }
                if seen.len() >= state_cap {
                    return None;
                }
                if seen.insert(next.clone()) {
                    queue.push_back((next, depth + 1));
                }
            }
        }
    }
    // Exhausted the reachable space without finding the goal.
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::parse_pddl;

    #[test]
    fn three_block_instance_needs_four_steps() {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        let g = GroundedProblem::new(p).unwrap();
        assert_eq!(optimal_length_oracle(&g, DEFAULT_STATE_CAP), Some(4));
    }

    #[test]
    fn satisfied_goal_is_zero() {
        let p = parse_pddl(
            fixtures::BLOCKSWORLD_DOMAIN,
            "(define (problem done) (:domain blocksworld)
             (:objects a) (:init (ontable a) (clear a) (handempty)) (:goal (ontable a)))",
        )
        .unwrap();
        let g = GroundedProblem::new(p).unwrap();
        assert_eq!(optimal_length_oracle(&g, DEFAULT_STATE_CAP), Some(0));
    }

    #[test]
    fn tiny_cap_reports_unknown() {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        let g = GroundedProblem::new(p).unwrap();
        assert_eq!(optimal_length_oracle(&g, 2), None);
    }
}
