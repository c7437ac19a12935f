//! Schema instantiation over typed objects.

use std::sync::Arc;

use super::{ActionSchema, Atom, AtomId, GroundAction, PddlError, ProblemInstance};

pub const DEFAULT_GROUND_CAP: usize = 1_000_000;

fn instantiate(template_args: &[usize], predicate: &str, binding: &[(String, String)]) -> Atom {
    let args = template_args
        .iter()
        .map(|&i| binding[i].1.clone())
        .collect();
    Atom::new(predicate.to_string(), args)
}

fn ground_schema(
    problem: &ProblemInstance,
    schema: &ActionSchema,
    out: &mut Vec<GroundAction>,
    cap: usize,
) -> Result<(), PddlError> {
    let candidates: Vec<Vec<&(String, String)>> = schema
        .params
        .iter()
        .map(|(_, want)| {
            problem
                .objects
                .iter()
                .filter(|(_, ty)| problem.domain.type_conforms(ty, want))
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) && !candidates.is_empty() {
        return Ok(());
    }
    let mut stack = vec![0usize; candidates.len()];
    'tuples: loop {
        let binding: Vec<(String, String)> = schema
            .params
            .iter()
            .zip(stack.iter().zip(&candidates))
            .map(|((var, _), (&i, objs))| (var.clone(), objs[i].0.clone()))
            .collect();
        let lookup = |template: &super::TemplateAtom| -> AtomId {
            let atom = instantiate(&template.args, &template.predicate, &binding);
            problem
                .table
                .lookup(&atom)
                .expect("grounded atom was enumerated at parse time")
        };
        let mut pre: Vec<AtomId> = schema.preconditions.iter().map(lookup).collect();
        let mut add: Vec<AtomId> = schema.add_effects.iter().map(lookup).collect();
        let mut del: Vec<AtomId> = schema.delete_effects.iter().map(lookup).collect();
        pre.sort_unstable();
        pre.dedup();
        add.sort_unstable();
        add.dedup();
        del.sort_unstable();
        del.dedup();
        let display_args: Vec<String> = binding
            .iter()
            .map(|(_, obj)| {
                let ty = problem
                    .object_types
                    .get(obj)
                    .map(String::as_str)
                    .unwrap_or("default");
                format!("{obj}:{ty}")
            })
            .collect();
        let display_name = format!("{}({})", schema.name, display_args.join(","));
        out.push(GroundAction {
            index: 0,
            schema_name: schema.name.clone(),
            binding,
            pre: pre.into(),
            add: add.into(),
            del: del.into(),
            display_name,
        });
        if out.len() > cap {
            return Err(PddlError::GroundingExplosion {
                count: out.len(),
                cap,
            });
        }
        if candidates.is_empty() {
            break;
        }
        for slot in (0..stack.len()).rev() {
            stack[slot] += 1;
            if stack[slot] < candidates[slot].len() {
                continue 'tuples;
            }
            stack[slot] = 0;
        }
        break;
    }
    Ok(())
}

/// All type-consistent instantiations of every schema, ordered by display
/// name. Repeated-variable bindings (e.g. the same block twice) are kept;
/// the semantics render them inapplicable where the domain precludes them.
pub fn ground_problem(problem: &ProblemInstance) -> Result<Vec<GroundAction>, PddlError> {
    ground_problem_with_cap(problem, DEFAULT_GROUND_CAP)
}

pub fn ground_problem_with_cap(
    problem: &ProblemInstance,
    cap: usize,
) -> Result<Vec<GroundAction>, PddlError> {
    let mut out = Vec::new();
    for schema in &problem.domain.schemas {
        ground_schema(problem, schema, &mut out, cap)?;
    }
    out.sort_by(|a, b| a.display_name.cmp(&b.display_name));
    for (i, action) in out.iter_mut().enumerate() {
        action.index = i as u32;
    }
    Ok(out)
}

/// Shared instance bundle: the parsed problem plus its ground action set.
#[derive(Debug, Clone)]
pub struct GroundedProblem {
    pub problem: Arc<ProblemInstance>,
    pub actions: Arc<Vec<GroundAction>>,
}

impl GroundedProblem {
    pub fn new(problem: ProblemInstance) -> Result<Self, PddlError> {
        let actions = ground_problem(&problem)?;
        Ok(GroundedProblem {
            problem: Arc::new(problem),
            actions: Arc::new(actions),
        })
    }

    /// Same domain and objects with a different initial state and goal; the
    /// atom table and ground set are shared, so this is cheap.
    pub fn with_states(
        &self,
        init: crate::pddl::State,
        goal: crate::pddl::State,
    ) -> GroundedProblem {
        let mut problem = (*self.problem).clone();
        problem.init = init;
        problem.goal = goal;
        GroundedProblem {
            problem: Arc::new(problem),
            actions: Arc::clone(&self.actions),
        }
    }
}
