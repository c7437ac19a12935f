//! STRIPS-subset PDDL: parsing, grounding, and exact action semantics.
//!
//! The supported grammar is `:strips` plus `:typing`: positive preconditions,
//! add/delete effects, and conjunctive positive goals. Everything else
//! (negative preconditions, conditional effects, fluents, axioms) is rejected
//! with [`PddlError::Unsupported`].
//!
//! All ground atoms of a problem are interned into an [`AtomTable`] at parse
//! time, with ids assigned in lexicographic order of the atom's plain
//! rendering. States are sorted id slices, so set operations are cheap merges
//! and two states are equal exactly when their canonical keys are equal.

mod ground;
mod parse;

pub use ground::{ground_problem, ground_problem_with_cap, GroundedProblem, DEFAULT_GROUND_CAP};
pub use parse::parse_pddl;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PddlError {
    #[error("parse error at {line}:{column}: {message} (near '{token}')")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
    #[error("unsupported feature at {line}:{column}: {feature}")]
    Unsupported {
        line: usize,
        column: usize,
        feature: String,
    },
    #[error("grounding explosion: {count} instantiations exceed cap {cap}")]
    GroundingExplosion { count: usize, cap: usize },
    #[error("unknown action '{0}'")]
    UnknownAction(String),
}

/// Declared predicate: name plus the parameter types it takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSig {
    pub name: String,
    pub param_types: Vec<String>,
}

impl PredicateSig {
    pub fn arity(&self) -> usize {
        self.param_types.len()
    }
}

/// A ground atom: predicate applied to object names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// `pred(arg1,...,argN)` without type annotations.
    pub fn plain(&self) -> String {
        if self.args.is_empty() {
            format!("{}()", self.predicate)
        } else {
            format!("{}({})", self.predicate, self.args.join(","))
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.plain())
    }
}

/// One argument slot of a schema template: a parameter reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateAtom {
    pub predicate: String,
    /// Indices into the schema's parameter list.
    pub args: Vec<usize>,
}

/// Lifted action: typed parameters, positive preconditions, add/delete effects.
#[derive(Debug, Clone)]
pub struct ActionSchema {
    pub name: String,
    /// Ordered `(variable, type)` pairs. Variable names keep their `?`-less form.
    pub params: Vec<(String, String)>,
    pub preconditions: Vec<TemplateAtom>,
    pub add_effects: Vec<TemplateAtom>,
    pub delete_effects: Vec<TemplateAtom>,
}

pub(crate) type AtomId = u32;

/// Interned vocabulary of every ground atom a problem can mention.
///
/// Ids are assigned in lexicographic order of the plain rendering, so a state
/// sorted by id renders in canonical order without re-sorting.
#[derive(Debug)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    plain: Vec<String>,
    typed: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub(crate) fn build(atoms: Vec<Atom>, object_types: &HashMap<String, String>) -> Self {
        let mut keyed: Vec<(String, Atom)> = atoms.into_iter().map(|a| (a.plain(), a)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let mut table = AtomTable {
            atoms: Vec::with_capacity(keyed.len()),
            plain: Vec::with_capacity(keyed.len()),
            typed: Vec::with_capacity(keyed.len()),
            index: HashMap::with_capacity(keyed.len()),
        };
        for (id, (plain, atom)) in keyed.into_iter().enumerate() {
            let typed = render_typed(&atom, object_types);
            table.index.insert(plain.clone(), id as AtomId);
            table.atoms.push(atom);
            table.plain.push(plain);
            table.typed.push(typed);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub(crate) fn lookup(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(&atom.plain()).copied()
    }

    pub(crate) fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id as usize]
    }

    pub(crate) fn plain(&self, id: AtomId) -> &str {
        &self.plain[id as usize]
    }

    pub(crate) fn typed(&self, id: AtomId) -> &str {
        &self.typed[id as usize]
    }
}

fn render_typed(atom: &Atom, object_types: &HashMap<String, String>) -> String {
    if atom.args.is_empty() {
        return format!("{}()", atom.predicate);
    }
    let args: Vec<String> = atom
        .args
        .iter()
        .map(|obj| match object_types.get(obj) {
            Some(ty) => format!("{obj}:{ty}"),
            None => obj.clone(),
        })
        .collect();
    format!("{}({})", atom.predicate, args.join(","))
}

/// A set of ground atoms with canonical, platform-stable identity.
///
/// Two states compare equal exactly when their atom sets are equal; ordering
/// and hashing go through the sorted id slice. Also used for (partial) goals,
/// which share the subset semantics.
#[derive(Clone)]
pub struct State {
    ids: Arc<[AtomId]>,
    table: Arc<AtomTable>,
}

impl State {
    pub(crate) fn from_ids(mut ids: Vec<AtomId>, table: Arc<AtomTable>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        State {
            ids: ids.into(),
            table,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.ids.iter().map(|&id| self.table.atom(id))
    }

    pub(crate) fn ids(&self) -> &[AtomId] {
        &self.ids
    }

    pub(crate) fn table(&self) -> &Arc<AtomTable> {
        &self.table
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        match self.table.lookup(atom) {
            Some(id) => self.ids.binary_search(&id).is_ok(),
            None => false,
        }
    }

    /// Deterministic total-order serialization: plain atom strings joined by `|`.
    pub fn canonical_key(&self) -> String {
        let parts: Vec<&str> = self.ids.iter().map(|&id| self.table.plain(id)).collect();
        parts.join("|")
    }

    /// Plain renderings in canonical order.
    pub fn plain_atoms(&self) -> Vec<String> {
        self.ids
            .iter()
            .map(|&id| self.table.plain(id).to_string())
            .collect()
    }

    /// Typed renderings (`pred(obj:type,...)`) in canonical order.
    pub fn typed_atoms(&self) -> Vec<String> {
        self.ids
            .iter()
            .map(|&id| self.table.typed(id).to_string())
            .collect()
    }

    pub(crate) fn is_superset_of(&self, other: &[AtomId]) -> bool {
        let mut it = self.ids.iter().peekable();
        'outer: for want in other {
            while let Some(&&have) = it.peek() {
                if have == *want {
                    continue 'outer;
                }
                if have > *want {
                    return false;
                }
                it.next();
            }
            return false;
        }
        true
    }

    pub(crate) fn missing_from(&self, required: &[AtomId]) -> Vec<AtomId> {
        required
            .iter()
            .copied()
            .filter(|id| self.ids.binary_search(id).is_err())
            .collect()
    }

    /// `(self \ del) ∪ add`, delete applied before add.
    pub(crate) fn apply_effects(&self, del: &[AtomId], add: &[AtomId]) -> State {
        let mut out: Vec<AtomId> = Vec::with_capacity(self.ids.len() + add.len());
        for &id in self.ids.iter() {
            if del.binary_search(&id).is_err() {
                out.push(id);
            }
        }
        for &id in add {
            out.push(id);
        }
        State::from_ids(out, Arc::clone(&self.table))
    }
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ids.cmp(&other.ids)
    }
}

impl std::hash::Hash for State {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ids.hash(state);
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State({})", self.canonical_key())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_key())
    }
}

/// Fully instantiated action with materialized precondition/effect sets.
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub(crate) index: u32,
    pub schema_name: String,
    /// `(parameter, object)` pairs in schema parameter order.
    pub binding: Vec<(String, String)>,
    pub(crate) pre: Arc<[AtomId]>,
    pub(crate) add: Arc<[AtomId]>,
    pub(crate) del: Arc<[AtomId]>,
    /// `name(obj:type,...)` — round-trips through [`parse_action_string`].
    pub display_name: String,
}

impl GroundAction {
    pub fn preconditions<'a>(&'a self, table: &'a AtomTable) -> impl Iterator<Item = &'a Atom> {
        self.pre.iter().map(move |&id| table.atom(id))
    }

    pub fn add_effects<'a>(&'a self, table: &'a AtomTable) -> impl Iterator<Item = &'a Atom> {
        self.add.iter().map(move |&id| table.atom(id))
    }

    pub fn delete_effects<'a>(&'a self, table: &'a AtomTable) -> impl Iterator<Item = &'a Atom> {
        self.del.iter().map(move |&id| table.atom(id))
    }
}

impl PartialEq for GroundAction {
    fn eq(&self, other: &Self) -> bool {
        self.display_name == other.display_name
    }
}

impl Eq for GroundAction {}

impl std::hash::Hash for GroundAction {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.display_name.hash(state);
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name)
    }
}

/// Parsed domain: types, predicates, and action schemas.
#[derive(Debug, Clone)]
pub struct Domain {
    pub name: String,
    pub typed: bool,
    /// `type -> parent` for every declared type; the implicit roots are
    /// `object` (typed domains) and `default` (untyped domains).
    pub type_parents: HashMap<String, String>,
    pub predicates: Vec<PredicateSig>,
    pub schemas: Vec<ActionSchema>,
}

impl Domain {
    /// Whether an object of `obj_type` can fill a slot declared as `want`.
    pub fn type_conforms(&self, obj_type: &str, want: &str) -> bool {
        if obj_type == want {
            return true;
        }
        let root = if self.typed { "object" } else { "default" };
        if want == root {
            return true;
        }
        let mut cur = obj_type;
        while let Some(parent) = self.type_parents.get(cur) {
            if parent == want {
                return true;
            }
            if parent == cur {
                break;
            }
            cur = parent;
        }
        false
    }
}

/// A parsed problem: domain, typed objects, initial state, and goal.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub domain: Domain,
    /// `(object, type)` pairs in declaration order.
    pub objects: Vec<(String, String)>,
    pub init: State,
    pub goal: State,
    pub(crate) object_types: HashMap<String, String>,
    pub(crate) table: Arc<AtomTable>,
}

impl ProblemInstance {
    pub fn atom_table(&self) -> &Arc<AtomTable> {
        &self.table
    }

    /// Build a state from plain atoms; every atom must be in the problem's vocabulary.
    pub fn state_from_atoms(&self, atoms: &[Atom]) -> Result<State, PddlError> {
        let mut ids = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match self.table.lookup(atom) {
                Some(id) => ids.push(id),
                None => {
                    return Err(PddlError::Parse {
                        line: 0,
                        column: 0,
                        token: atom.plain(),
                        message: "atom not in problem vocabulary".into(),
                    })
                }
            }
        }
        Ok(State::from_ids(ids, Arc::clone(&self.table)))
    }
}

/// Outcome of applying one ground action to a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyOutcome {
    Applied(State),
    /// Every unsatisfied precondition atom, in canonical order.
    Inapplicable(Vec<Atom>),
}

/// Exact STRIPS semantics: if `pre ⊆ s` then `(s \ del) ∪ add`, with delete
/// applied before add; otherwise the full set of missing preconditions.
pub fn apply_action(state: &State, action: &GroundAction) -> ApplyOutcome {
    let missing = state.missing_from(&action.pre);
    if missing.is_empty() {
        ApplyOutcome::Applied(state.apply_effects(&action.del, &action.add))
    } else {
        let table = state.table();
        ApplyOutcome::Inapplicable(
            missing
                .into_iter()
                .map(|id| table.atom(id).clone())
                .collect(),
        )
    }
}

/// True iff every goal atom holds in `state`.
pub fn satisfies_goal(state: &State, goal: &State) -> bool {
    state.is_superset_of(goal.ids())
}

/// Actions whose preconditions hold in `state`, in ground-set order.
pub fn applicable_actions<'a>(state: &State, ground: &'a [GroundAction]) -> Vec<&'a GroundAction> {
    ground
        .iter()
        .filter(|a| state.is_superset_of(&a.pre))
        .collect()
}

/// Normalize an action string for matching: lowercase, strip whitespace and
/// trailing punctuation, drop `:type` annotations.
pub(crate) fn normalize_action_text(text: &str) -> String {
    let trimmed = text.trim().trim_end_matches('.').trim();
    let mut out = String::with_capacity(trimmed.len());
    let mut in_type = false;
    for ch in trimmed.chars() {
        match ch {
            c if c.is_whitespace() => continue,
            ':' => in_type = true,
            ',' | ')' => {
                in_type = false;
                out.push(ch);
            }
            _ if in_type => continue,
            _ => out.extend(ch.to_lowercase()),
        }
    }
    out
}

/// Resolve an action string against a problem's ground set.
///
/// Matching is exact after normalization: whitespace is ignored, `:type`
/// annotations are optional, and the name is case-insensitive. The error text
/// is stable because it is fed back to a proposing policy verbatim.
pub fn parse_action_string<'a>(
    text: &str,
    ground_set: &'a [GroundAction],
) -> Result<&'a GroundAction, PddlError> {
    let wanted = normalize_action_text(text);
    if !wanted.is_empty() {
        // Ground actions' normalized display includes the `()` even for
        // zero-arity actions, but a bare name should match too.
        for action in ground_set {
            let norm = normalize_action_text(&action.display_name);
            if norm == wanted || norm.trim_end_matches("()") == wanted {
                return Ok(action);
            }
        }
    }
    Err(PddlError::UnknownAction(text.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn blocks3() -> (ProblemInstance, Vec<GroundAction>) {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        let g = ground_problem(&p).unwrap();
        (p, g)
    }

    fn atom(s: &str) -> Atom {
        let open = s.find('(').unwrap();
        let pred = &s[..open];
        let inner = &s[open + 1..s.len() - 1];
        let args = if inner.is_empty() {
            vec![]
        } else {
            inner.split(',').map(|a| a.to_string()).collect()
        };
        Atom::new(pred, args)
    }

    fn find<'a>(ground: &'a [GroundAction], name: &str) -> &'a GroundAction {
        parse_action_string(name, ground).unwrap()
    }

    #[test]
    fn three_block_pick_up_from_table() {
        let (p, g) = blocks3();
        let s = p
            .state_from_atoms(&[
                atom("ontable(a)"),
                atom("ontable(b)"),
                atom("clear(a)"),
                atom("clear(b)"),
                atom("handempty()"),
            ])
            .unwrap();
        match apply_action(&s, find(&g, "pick-up(a)")) {
            ApplyOutcome::Applied(next) => {
                let expect = p
                    .state_from_atoms(&[atom("ontable(b)"), atom("clear(b)"), atom("holding(a)")])
                    .unwrap();
                assert_eq!(next, expect);
            }
            other => panic!("expected applied, got {other:?}"),
        }
    }

    #[test]
    fn stack_onto_clear_block() {
        let (p, g) = blocks3();
        let s = p
            .state_from_atoms(&[atom("holding(a)"), atom("ontable(b)"), atom("clear(b)")])
            .unwrap();
        match apply_action(&s, find(&g, "stack(a,b)")) {
            ApplyOutcome::Applied(next) => {
                let expect = p
                    .state_from_atoms(&[
                        atom("ontable(b)"),
                        atom("on(a,b)"),
                        atom("clear(a)"),
                        atom("handempty()"),
                    ])
                    .unwrap();
                assert_eq!(next, expect);
            }
            other => panic!("expected applied, got {other:?}"),
        }
    }

    #[test]
    fn pick_up_with_full_hand_reports_missing_preconditions() {
        let (p, g) = blocks3();
        let s = p
            .state_from_atoms(&[atom("holding(a)"), atom("ontable(b)"), atom("clear(b)")])
            .unwrap();
        match apply_action(&s, find(&g, "pick-up(b)")) {
            ApplyOutcome::Inapplicable(missing) => {
                assert_eq!(missing, vec![atom("handempty()")]);
            }
            other => panic!("expected inapplicable, got {other:?}"),
        }
    }

    #[test]
    fn goal_subset_semantics() {
        let (p, _) = blocks3();
        let goal = p.state_from_atoms(&[atom("on(b,c)")]).unwrap();
        let exact = p.state_from_atoms(&[atom("on(b,c)")]).unwrap();
        assert!(satisfies_goal(&exact, &goal));
        let with_extras = p
            .state_from_atoms(&[atom("on(b,c)"), atom("ontable(c)"), atom("clear(b)")])
            .unwrap();
        assert!(satisfies_goal(&with_extras, &goal));
        let swapped = p.state_from_atoms(&[atom("on(c,b)")]).unwrap();
        assert!(!satisfies_goal(&swapped, &goal));
    }

    #[test]
    fn action_string_round_trip_whole_ground_set() {
        let (_, g) = blocks3();
        for action in &g {
            let parsed = parse_action_string(&action.display_name, &g).unwrap();
            assert_eq!(parsed, action);
        }
    }

    #[test]
    fn action_string_normalization() {
        let (_, g) = blocks3();
        assert_eq!(
            parse_action_string("unstack(a:default,b:default)", &g).unwrap(),
            find(&g, "unstack(a,b)")
        );
        assert_eq!(
            parse_action_string("  Pick-Up( a ) ", &g).unwrap(),
            find(&g, "pick-up(a)")
        );
        match parse_action_string("teleport(a)", &g) {
            Err(PddlError::UnknownAction(t)) => assert_eq!(t, "teleport(a)"),
            other => panic!("expected unknown action, got {other:?}"),
        }
    }

    #[test]
    fn canonical_key_is_insertion_order_independent() {
        let (p, _) = blocks3();
        let a = p
            .state_from_atoms(&[atom("ontable(a)"), atom("clear(a)"), atom("handempty()")])
            .unwrap();
        let b = p
            .state_from_atoms(&[atom("handempty()"), atom("ontable(a)"), atom("clear(a)")])
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key(), "clear(a)|handempty()|ontable(a)");
    }

    #[test]
    fn delete_before_add_when_effects_overlap() {
        // A self-looping toggle: the action deletes and re-adds the same atom,
        // so the atom must survive (add wins).
        let domain = "(define (domain toggle)
            (:requirements :strips)
            (:predicates (lit ?x))
            (:action flick :parameters (?x)
              :precondition (lit ?x)
              :effect (and (not (lit ?x)) (lit ?x))))";
        let problem = "(define (problem t1) (:domain toggle)
            (:objects bulb) (:init (lit bulb)) (:goal (lit bulb)))";
        let p = parse_pddl(domain, problem).unwrap();
        let g = ground_problem(&p).unwrap();
        match apply_action(&p.init, &g[0]) {
            ApplyOutcome::Applied(next) => assert_eq!(next, p.init),
            other => panic!("expected applied, got {other:?}"),
        }
    }
}
