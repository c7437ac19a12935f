//! Shared support for the integration suites: an independent STRIPS
//! interpreter, exhaustive blocksworld configuration enumeration, and a
//! deterministic synthetic chat backend.

use std::collections::BTreeSet;

use queryplan::llm::{Backend, LlmError, RawCompletion};
use queryplan::pddl::{GroundAction, ProblemInstance};

/// Naive STRIPS interpreter: re-evaluates schema templates against the
/// action's binding from scratch, over plain string atom sets. Exists to
/// cross-check the id-based semantics through a completely separate path.
pub fn naive_apply(
    problem: &ProblemInstance,
    state: &BTreeSet<String>,
    action: &GroundAction,
) -> Option<BTreeSet<String>> {
    let schema = problem
        .domain
        .schemas
        .iter()
        .find(|s| s.name == action.schema_name)
        .expect("ground action references a schema");
    let substitute = |template: &queryplan::pddl::TemplateAtom| -> String {
        let args: Vec<&str> = template
            .args
            .iter()
            .map(|&i| action.binding[i].1.as_str())
            .collect();
        if args.is_empty() {
            format!("{}()", template.predicate)
        } else {
            format!("{}({})", template.predicate, args.join(","))
        }
    };
    for pre in &schema.preconditions {
        if !state.contains(&substitute(pre)) {
            return None;
        }
    }
    let mut next = state.clone();
    for del in &schema.delete_effects {
        next.remove(&substitute(del));
    }
    for add in &schema.add_effects {
        next.insert(substitute(add));
    }
    Some(next)
}

/// All set partitions of `0..n`.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for item in 0..n {
        let mut next = Vec::new();
        for partition in &out {
            for i in 0..partition.len() {
                let mut grown = partition.clone();
                grown[i].push(item);
                next.push(grown);
            }
            let mut fresh = partition.clone();
            fresh.push(vec![item]);
            next.push(fresh);
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Every blocksworld configuration of `n` blocks (hand empty): all set
/// partitions with every ordering of each tower, bottom to top.
pub fn all_configs(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for partition in set_partitions(n) {
        let per_tower: Vec<Vec<Vec<usize>>> =
            partition.iter().map(|tower| permutations(tower)).collect();
        let mut stack = vec![Vec::new()];
        for options in &per_tower {
            let mut next = Vec::new();
            for prefix in &stack {
                for option in options {
                    let mut grown: Vec<Vec<usize>> = prefix.clone();
                    grown.push(option.clone());
                    next.push(grown);
                }
            }
            stack = next;
        }
        out.extend(stack);
    }
    out
}

fn block_name(i: usize) -> char {
    (b'a' + i as u8) as char
}

/// Render a problem over `n` blocks with the given initial towers and a goal
/// of the goal configuration's `on` atoms (empty goal if none).
pub fn config_pddl(n: usize, init: &[Vec<usize>], goal: &[Vec<usize>]) -> String {
    let objects: Vec<String> = (0..n).map(|i| block_name(i).to_string()).collect();
    let mut init_atoms = Vec::new();
    for tower in init {
        init_atoms.push(format!("(ontable {})", block_name(tower[0])));
        for pair in tower.windows(2) {
            init_atoms.push(format!(
                "(on {} {})",
                block_name(pair[1]),
                block_name(pair[0])
            ));
        }
        init_atoms.push(format!("(clear {})", block_name(*tower.last().unwrap())));
    }
    init_atoms.push("(handempty)".to_string());
    let mut goal_atoms = Vec::new();
    for tower in goal {
        for pair in tower.windows(2) {
            goal_atoms.push(format!(
                "(on {} {})",
                block_name(pair[1]),
                block_name(pair[0])
            ));
        }
    }
    format!
        ("(define (problem cfg-{n})\n  (:domain blocksworld)\n  (:objects {})\n  (:init {})\n  (:goal (and {})))\n",
        objects.join(" "),
        init_atoms.join(" "),
        goal_atoms.join(" "),
    )
}

/// Deterministic stand-in for a chat model: answers every prompt kind with a
/// well-formed response derived from the prompt text itself.
pub struct SyntheticBackend;

fn section<'a>(text: &'a str, header: &str) -> Option<&'a str> {
    let start = text.find(header)? + header.len();
    let rest = &text[start..];
    let end = rest.find("\nGoal State:").unwrap_or(rest.len());
    Some(&rest[..end])
}

fn listed_actions(block: &str) -> Vec<String> {
    block
        .lines()
        .filter_map(|line| line.trim().strip_prefix("- "))
        .map(|s| s.to_string())
        .collect()
}

impl Backend for SyntheticBackend {
    fn complete(&mut self, system: &str, user: &str) -> Result<RawCompletion, LlmError> {
        let response = if system.contains("summarizes PDDL predicates") {
            let line = user
                .lines()
                .find(|l| l.starts_with("Predicates:") || l.starts_with("Goal:"))
                .unwrap_or("nothing");
            format!("The listed facts hold: {line}")
        } else if system.contains("Rating: <sure/maybe/impossible>") {
            "Think: plausible progress\nRating: maybe".to_string()
        } else if system.contains("Number of Actions") {
            let k: usize = user
                .lines()
                .find_map(|l| l.strip_prefix("Number of Actions: "))
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(1);
            let valid = listed_actions(section(user, "Valid Actions:").unwrap_or(""));
            let picks: Vec<String> = valid.into_iter().take(k).collect();
            format!("Think: expanding\nActions: {}", picks.join(", "))
        } else if system.contains("Selection: state <index>, <action>") {
            let after_state0 = user.split("State 0:").nth(1).unwrap_or("");
            let action = listed_actions(after_state0)
                .into_iter()
                .next()
                .unwrap_or_else(|| "noop()".to_string());
            format!("Think: revisiting\nSelection: state 0, {action}")
        } else if system.contains("Action Sequence: <action1>") {
            let valid = listed_actions(section(user, "Valid Actions:").unwrap_or(""));
            let first = valid
                .first()
                .cloned()
                .unwrap_or_else(|| "noop()".to_string());
            format!("Reflect: noted\nThink: stepping\nAction Sequence: {first}")
        } else {
            // Single-action prompts end with "Actions: <action>".
            let valid = listed_actions(section(user, "Valid Actions:").unwrap_or(""));
            let first = valid
                .first()
                .cloned()
                .unwrap_or_else(|| "noop()".to_string());
            format!("Think: stepping\nActions: {first}")
        };
        Ok(RawCompletion {
            prompt_tokens: ((system.len() + user.len()) / 4) as u64,
            completion_tokens: (response.len() / 4) as u64,
            response_text: response,
        })
    }
}
