//! Property tests over the core invariants: action-string round-trips, frame
//! preservation, goal monotonicity, query conservation, and parser totality.

use std::collections::HashSet;

use proptest::prelude::*;

use queryplan::bench::gen_blocksworld;
use queryplan::llm::{parse_action_sequence, parse_rating};
use queryplan::pddl::{
    applicable_actions, apply_action, parse_action_string, satisfies_goal, ApplyOutcome,
    GroundedProblem,
};
use queryplan::world::WorldModel;

fn instance(n: usize, seed: u64) -> GroundedProblem {
    GroundedProblem::new(gen_blocksworld(n, seed)).unwrap()
}

/// Walk `steps` random applicable actions from the initial state.
fn random_walk(
    g: &GroundedProblem,
    mut pick: impl FnMut(usize) -> usize,
    steps: usize,
) -> queryplan::pddl::State {
    let mut state = g.problem.init.clone();
    for _ in 0..steps {
        let valid = applicable_actions(&state, &g.actions);
        if valid.is_empty() {
            break;
        }
        let action = valid[pick(valid.len())];
        if let ApplyOutcome::Applied(next) = apply_action(&state, action) {
            state = next;
        }
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every ground action's display name resolves back to the same action.
    #[test]
    fn action_display_round_trips(n in 2usize..=5, seed in 0u64..500) {
        let g = instance(n, seed);
        for action in g.actions.iter() {
            let parsed = parse_action_string(&action.display_name, &g.actions).unwrap();
            prop_assert_eq!(parsed, action);
        }
    }

    /// Atoms outside an action's add and delete sets survive application.
    #[test]
    fn frame_property(n in 2usize..=5, seed in 0u64..500, walk in 0usize..6) {
        let g = instance(n, seed);
        let mut chooser_seed = seed;
        let state = random_walk(&g, |len| { chooser_seed = chooser_seed.wrapping_mul(6364136223846793005).wrapping_add(1); (chooser_seed >> 33) as usize % len }, walk);
        let table = g.problem.atom_table();
        let _ = table;
        for action in applicable_actions(&state, &g.actions) {
            if let ApplyOutcome::Applied(next) = apply_action(&state, action) {
                let adds: HashSet<String> = action
                    .add_effects(g.problem.atom_table())
                    .map(|a| a.plain())
                    .collect();
                let dels: HashSet<String> = action
                    .delete_effects(g.problem.atom_table())
                    .map(|a| a.plain())
                    .collect();
                for atom in state.plain_atoms() {
                    if !adds.contains(&atom) && !dels.contains(&atom) {
                        prop_assert!(next.plain_atoms().contains(&atom), "lost {atom}");
                    }
                }
                for atom in next.plain_atoms() {
                    if !adds.contains(&atom) {
                        prop_assert!(state.plain_atoms().contains(&atom), "conjured {atom}");
                    }
                }
            }
        }
    }

    /// A satisfied goal stays satisfied in any superset state.
    #[test]
    fn goal_monotonicity(n in 2usize..=4, seed in 0u64..500) {
        let g = instance(n, seed);
        let goal = &g.problem.goal;
        // Build a superset of a goal-satisfying state by adding arbitrary
        // atoms from the vocabulary.
        let satisfied = {
            let mut state = g.problem.init.clone();
            // March toward the goal with a greedy oracle walk; blocksworld is
            // always solvable so this terminates.
            let mut oracle = queryplan::policy::OraclePolicy::new(&g);
            let ctx = queryplan::policy::WorldContext::new("t", "t");
            if !satisfies_goal(&state, goal) {
                let plan = queryplan::policy::PlanGenerator::generate_plan(
                    &mut oracle,
                    &state,
                    &ctx,
                    &queryplan::policy::InteractionHistory::new(),
                    &[],
                ).unwrap();
                for action in &plan {
                    if let ApplyOutcome::Applied(next) = apply_action(&state, action) {
                        state = next;
                    }
                }
            }
            state
        };
        prop_assert!(satisfies_goal(&satisfied, goal));
        let mut augmented: Vec<queryplan::pddl::Atom> = satisfied.atoms().cloned().collect();
        augmented.push(queryplan::pddl::Atom::new("holding", vec!["a".to_string()]));
        let superset = g.problem.state_from_atoms(&augmented).unwrap();
        prop_assert!(satisfies_goal(&superset, goal));
    }

    /// Ledger conservation: charged queries equal the number of distinct
    /// (state, action) pairs ever evaluated, no matter how often they repeat.
    #[test]
    fn query_conservation(seed in 0u64..200, picks in proptest::collection::vec(0usize..64, 1..30)) {
        let g = instance(3, seed);
        let mut world = WorldModel::new(&g, None);
        let mut distinct: HashSet<(String, String)> = HashSet::new();
        let mut state = world.initial_state();
        for (i, pick) in picks.iter().enumerate() {
            let action = g.actions[pick % g.actions.len()].clone();
            distinct.insert((state.canonical_key(), action.display_name.clone()));
            let result = world.step(&state, &action).unwrap();
            if let Some(next) = result.next_state {
                state = next;
            }
            // Every third step replays from the start to force cache hits.
            if i % 3 == 2 {
                state = world.initial_state();
            }
        }
        prop_assert_eq!(world.ledger().used, distinct.len() as u64);
    }

    /// Re-verifying any plan a second time charges nothing.
    #[test]
    fn verification_idempotence(seed in 0u64..200, picks in proptest::collection::vec(0usize..64, 1..8)) {
        let g = instance(3, seed);
        let mut world = WorldModel::new(&g, None);
        let plan: Vec<_> = picks.iter().map(|p| g.actions[p % g.actions.len()].clone()).collect();
        let s0 = world.initial_state();
        let goal = world.goal().clone();
        let first = world.verify_plan(&s0, &plan, &goal);
        let used_after_first = world.ledger().used;
        let second = world.verify_plan(&s0, &plan, &goal);
        prop_assert_eq!(second.new_queries, 0);
        prop_assert_eq!(world.ledger().used, used_after_first);
        prop_assert_eq!(first.reached_goal, second.reached_goal);
    }

    /// Response parsers are total over arbitrary text.
    #[test]
    fn parsers_never_panic(text in ".{0,300}") {
        let g = instance(2, 0);
        let _ = parse_action_sequence(&text, &g.actions);
        let _ = parse_rating(&text);
        let _ = queryplan::llm::parse_actions_line(&text, &g.actions);
        let _ = queryplan::llm::parse_selection(&text, &g.actions);
    }

    /// Oracle proposals always come from the valid set, even with odd k.
    #[test]
    fn proposal_containment(n in 2usize..=4, seed in 0u64..200, k in 1usize..6) {
        let g = instance(n, seed);
        let mut oracle = queryplan::policy::OraclePolicy::new(&g);
        let ctx = queryplan::policy::WorldContext::new("t", "t");
        let valid: Vec<_> = applicable_actions(&g.problem.init, &g.actions).into_iter().cloned().collect();
        let req = queryplan::policy::ProposalRequest {
            state: g.problem.init.clone(),
            k,
            valid_actions: valid.clone(),
            feedback: None,
        };
        let picks = queryplan::policy::ActionProposer::propose_actions(&mut oracle, &req, &ctx).unwrap();
        prop_assert!(picks.len() <= k);
        prop_assert!(picks.len() == k.min(valid.len()));
        for pick in &picks {
            prop_assert!(valid.iter().any(|v| v == pick));
        }
        let names: HashSet<_> = picks.iter().map(|p| p.display_name.clone()).collect();
        prop_assert_eq!(names.len(), picks.len(), "proposals are distinct");
    }
}
