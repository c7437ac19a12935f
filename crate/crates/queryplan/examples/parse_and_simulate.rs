//! Parse the bundled domains, ground a problem, and step exact semantics:
//! applicability, effects, canonical state keys, and goal checks.

use queryplan::fixtures;
use queryplan::pddl::{
    apply_action, parse_action_string, parse_pddl, satisfies_goal, ApplyOutcome, GroundedProblem,
};

fn main() -> anyhow::Result<()> {
    let problem = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM)?;
    let grounded = GroundedProblem::new(problem)?;
    println!("domain: {}", grounded.problem.domain.name);
    println!(
        "predicates: {}, schemas: {}, ground actions: {}",
        grounded.problem.domain.predicates.len(),
        grounded.problem.domain.schemas.len(),
        grounded.actions.len()
    );
    let mut state = grounded.problem.init.clone();
    println!("\ninitial state: {}", state.canonical_key());

    for name in [
        "pick-up(b)",
        "unstack(a,b)",
        "put-down(a)",
        "pick-up(b)",
        "stack(b,c)",
    ] {
        let action = parse_action_string(name, &grounded.actions)?;
        match apply_action(&state, action) {
            ApplyOutcome::Applied(next) => {
                println!("{name:>16} -> {}", next.canonical_key());
                state = next;
            }
            ApplyOutcome::Inapplicable(missing) => {
                let atoms: Vec<String> = missing.iter().map(|a| a.plain()).collect();
                println!("{name:>16} -> inapplicable, missing: {}", atoms.join(", "));
            }
        }
    }
    println!(
        "\ngoal {} reached: {}",
        grounded.problem.goal.canonical_key(),
        satisfies_goal(&state, &grounded.problem.goal)
    );

    // The typed domains parse too.
    let grippers = parse_pddl(fixtures::GRIPPERS_DOMAIN, fixtures::GRIPPERS_P1)?;
    let logistics = parse_pddl(fixtures::LOGISTICS_DOMAIN, fixtures::LOGISTICS_P1)?;
    println!(
        "\ngrippers parses with {} objects; logistics with {} schemas and a type tree",
        grippers.objects.len(),
        logistics.domain.schemas.len()
    );
    Ok(())
}
