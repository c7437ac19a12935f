//! S-expression reader for the supported PDDL subset.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{
    ActionSchema, Atom, AtomTable, Domain, PddlError, PredicateSig, ProblemInstance, State,
    TemplateAtom,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
enum Sexpr {
    Sym(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    fn pos(&self) -> Pos {
        match self {
            Sexpr::Sym(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexpr::List(items, _) => items.first().and_then(|s| match s {
                Sexpr::Sym(sym, _) => Some(sym.as_str()),
                _ => None,
            }),
            _ => None,
        }
    }
}

fn err(pos: Pos, token: impl Into<String>, message: impl Into<String>) -> PddlError {
    PddlError::Parse {
        line: pos.line,
        column: pos.column,
        token: token.into(),
        message: message.into(),
    }
}

fn unsupported(pos: Pos, feature: impl Into<String>) -> PddlError {
    PddlError::Unsupported {
        line: pos.line,
        column: pos.column,
        feature: feature.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

#[derive(Debug)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Sym(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.chars.next()?;
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    fn tokens(mut self) -> Vec<Token> {
        let mut out = Vec::new();
        while let Some(&ch) = self.chars.peek() {
            let pos = Pos {
                line: self.line,
                column: self.column,
            };
            match ch {
                ';' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '(' => {
                    self.bump();
                    out.push(Token::LParen(pos));
                }
                ')' => {
                    self.bump();
                    out.push(Token::RParen(pos));
                }
                _ => {
                    let mut sym = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                            break;
                        }
                        sym.push(c);
                        self.bump();
                    }
                    out.push(Token::Sym(sym.to_lowercase(), pos));
                }
            }
        }
        out
    }
}

fn read_sexpr(text: &str) -> Result<Sexpr, PddlError> {
    let tokens = Lexer::new(text).tokens();
    let mut stack: Vec<(Vec<Sexpr>, Pos)> = Vec::new();
    let mut top: Option<Sexpr> = None;
    for token in tokens {
        if top.is_some() {
            let pos = match token {
                Token::LParen(p) | Token::RParen(p) | Token::Sym(_, p) => p,
            };
            return Err(err(pos, "", "trailing content after top-level form"));
        }
        match token {
            Token::LParen(pos) => stack.push((Vec::new(), pos)),
            Token::RParen(pos) => {
                let (items, open_pos) = stack
                    .pop()
                    .ok_or_else(|| err(pos, ")", "unbalanced closing parenthesis"))?;
                let expr = Sexpr::List(items, open_pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(expr),
                    None => top = Some(expr),
                }
            }
            Token::Sym(sym, pos) => match stack.last_mut() {
                Some((parent, _)) => parent.push(Sexpr::Sym(sym, pos)),
                None => return Err(err(pos, sym, "symbol outside any form")),
            },
        }
    }
    if let Some((_, pos)) = stack.last() {
        return Err(err(*pos, "(", "unclosed parenthesis"));
    }
    top.ok_or_else(|| {
        err(
            Pos { line: 1, column: 1 },
            "",
            "empty input, expected (define ...)",
        )
    })
}

/// Split `name name - type name ...` runs into `(name, type)` pairs.
/// Untyped entries get `fallback`.
fn read_typed_list(
    items: &[Sexpr],
    fallback: &str,
) -> Result<Vec<(String, String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match &items[i] {
            Sexpr::Sym(sym, pos) if sym == "-" => {
                let ty = match items.get(i + 1) {
                    Some(Sexpr::Sym(ty, _)) => ty.clone(),
                    _ => return Err(err(*pos, "-", "expected a type name after '-'")),
                };
                for (name, p) in pending.drain(..) {
                    out.push((name, ty.clone(), p));
                }
                i += 2;
            }
            Sexpr::Sym(sym, pos) => {
                pending.push((sym.clone(), *pos));
                i += 1;
            }
            other => return Err(err(other.pos(), "(", "expected a symbol in typed list")),
        }
    }
    for (name, p) in pending {
        out.push((name, fallback.to_string(), p));
    }
    Ok(out)
}

fn atom_items(expr: &Sexpr) -> Result<(&str, &[Sexpr], Pos), PddlError> {
    match expr {
        Sexpr::List(items, pos) => match items.first() {
            Some(Sexpr::Sym(head, _)) => Ok((head.as_str(), &items[1..], *pos)),
            _ => Err(err(*pos, "(", "expected a predicate name")),
        },
        Sexpr::Sym(sym, pos) => Err(err(*pos, sym.clone(), "expected a parenthesized atom")),
    }
}

const SUPPORTED_REQUIREMENTS: [&str; 2] = [":strips", ":typing"];
const PRECONDITION_REJECTS: [&str; 8] = ["not", "or", "forall", "exists", "when", "=", "<", ">"];

struct DomainReader {
    name: String,
    typed: bool,
    type_parents: HashMap<String, String>,
    predicates: Vec<PredicateSig>,
    schemas: Vec<ActionSchema>,
}

impl DomainReader {
    fn read(text: &str) -> Result<Domain, PddlError> {
        let top = read_sexpr(text)?;
        let items = match &top {
            Sexpr::List(items, pos) => {
                match items.first() {
                    Some(Sexpr::Sym(head, _)) if head == "define" => {}
                    _ => return Err(err(*pos, "(", "expected (define (domain ...) ...)")),
                }
                items
            }
            Sexpr::Sym(sym, pos) => return Err(err(*pos, sym.clone(), "expected (define ...)")),
        };
        let mut reader = DomainReader {
            name: String::new(),
            typed: false,
            type_parents: HashMap::new(),
            predicates: Vec::new(),
            schemas: Vec::new(),
        };
        for section in &items[1..] {
            let head = section
                .head()
                .ok_or_else(|| err(section.pos(), "", "expected a domain section"))?;
            match head {
                "domain" => {
                    if let Sexpr::List(inner, pos) = section {
                        match inner.get(1) {
                            Some(Sexpr::Sym(name, _)) => reader.name = name.clone(),
                            _ => return Err(err(*pos, "domain", "expected a domain name")),
                        }
                    }
                }
                ":requirements" => reader.requirements(section)?,
                ":types" => reader.types(section)?,
                ":predicates" => reader.predicates(section)?,
                ":action" => reader.action(section)?,
                ":constants" => {
                    return Err(unsupported(section.pos(), ":constants"));
                }
                ":functions" => {
                    return Err(unsupported(section.pos(), ":functions (numeric fluents)"));
                }
                other => {
                    return Err(unsupported(
                        section.pos(),
                        format!("domain section {other}"),
                    ));
                }
            }
        }
        if reader.name.is_empty() {
            return Err(err(top.pos(), "define", "domain has no name"));
        }
        Ok(Domain {
            name: reader.name,
            typed: reader.typed,
            type_parents: reader.type_parents,
            predicates: reader.predicates,
            schemas: reader.schemas,
        })
    }

    fn requirements(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        if let Sexpr::List(items, _) = section {
            for item in &items[1..] {
                match item {
                    Sexpr::Sym(req, pos) => {
                        if !SUPPORTED_REQUIREMENTS.contains(&req.as_str()) {
                            return Err(unsupported(*pos, format!("requirement {req}")));
                        }
                        if req == ":typing" {
                            self.typed = true;
                        }
                    }
                    other => return Err(err(other.pos(), "(", "expected a requirement flag")),
                }
            }
        }
        Ok(())
    }

    fn types(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        self.typed = true;
        if let Sexpr::List(items, _) = section {
            for (ty, parent, _) in read_typed_list(&items[1..], "object")? {
                self.type_parents.insert(ty, parent);
            }
        }
        Ok(())
    }

    fn predicates(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        let items = match section {
            Sexpr::List(items, _) => &items[1..],
            _ => return Ok(()),
        };
        let fallback = if self.typed { "object" } else { "default" };
        for decl in items {
            let (name, args, pos) = atom_items(decl)?;
            if self.predicates.iter().any(|p| p.name == name) {
                return Err(err(pos, name, "duplicate predicate declaration"));
            }
            let params = read_typed_list(args, fallback)?;
            for (var, _, vpos) in &params {
                if !var.starts_with('?') {
                    return Err(err(
                        *vpos,
                        var.clone(),
                        "predicate parameters must be variables",
                    ));
                }
            }
            self.predicates.push(PredicateSig {
                name: name.to_string(),
                param_types: params.into_iter().map(|(_, ty, _)| ty).collect(),
            });
        }
        Ok(())
    }

    fn action(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        let items = match section {
            Sexpr::List(items, _) => items,
            _ => unreachable!("head() checked"),
        };
        let pos = section.pos();
        let name = match items.get(1) {
            Some(Sexpr::Sym(name, _)) => name.clone(),
            _ => return Err(err(pos, ":action", "expected an action name")),
        };
        let fallback = if self.typed { "object" } else { "default" };
        let mut params: Option<Vec<(String, String)>> = None;
        let mut preconditions = Vec::new();
        let mut add_effects = Vec::new();
        let mut delete_effects = Vec::new();
        let mut i = 2;
        while i < items.len() {
            let key = match &items[i] {
                Sexpr::Sym(sym, _) => sym.clone(),
                other => {
                    return Err(err(
                        other.pos(),
                        "(",
                        "expected :parameters/:precondition/:effect",
                    ))
                }
            };
            let value = items
                .get(i + 1)
                .ok_or_else(|| err(pos, key.clone(), "section is missing its body"))?;
            match key.as_str() {
                ":parameters" => {
                    let list = match value {
                        Sexpr::List(list, _) => list,
                        Sexpr::Sym(sym, p) => {
                            return Err(err(*p, sym.clone(), "expected a parameter list"))
                        }
                    };
                    let typed = read_typed_list(list, fallback)?;
                    let mut seen = HashSet::new();
                    let mut out = Vec::new();
                    for (var, ty, vpos) in typed {
                        let var = var
                            .strip_prefix('?')
                            .ok_or_else(|| err(vpos, var.clone(), "parameters must start with ?"))?
                            .to_string();
                        if !seen.insert(var.clone()) {
                            return Err(err(vpos, var, "duplicate parameter"));
                        }
                        out.push((var, ty));
                    }
                    params = Some(out);
                }
                ":precondition" => {
                    let p = params
                        .as_ref()
                        .ok_or_else(|| err(pos, name.clone(), ":parameters must come first"))?;
                    preconditions = self.template_conjunction(value, p, false)?;
                }
                ":effect" => {
                    let p = params
                        .as_ref()
                        .ok_or_else(|| err(pos, name.clone(), ":parameters must come first"))?;
                    let (add, del) = self.effect_conjunction(value, p)?;
                    add_effects = add;
                    delete_effects = del;
                }
                other => {
                    return Err(unsupported(
                        items[i].pos(),
                        format!("action section {other}"),
                    ))
                }
            }
            i += 2;
        }
        let params = params.ok_or_else(|| err(pos, name.clone(), "action has no :parameters"))?;
        self.schemas.push(ActionSchema {
            name,
            params,
            preconditions,
            add_effects,
            delete_effects,
        });
        Ok(())
    }

    fn template_atom(
        &self,
        expr: &Sexpr,
        params: &[(String, String)],
    ) -> Result<TemplateAtom, PddlError> {
        let (name, args, pos) = atom_items(expr)?;
        let sig = self
            .predicates
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| err(pos, name, "unknown predicate"))?;
        if sig.arity() != args.len() {
            return Err(err(
                pos,
                name,
                format!(
                    "predicate takes {} argument(s), got {}",
                    sig.arity(),
                    args.len()
                ),
            ));
        }
        let mut indices = Vec::with_capacity(args.len());
        for arg in args {
            match arg {
                Sexpr::Sym(sym, apos) => {
                    let var = sym.strip_prefix('?').ok_or_else(|| {
                        unsupported(*apos, format!("constant '{sym}' in action body"))
                    })?;
                    let idx = params
                        .iter()
                        .position(|(p, _)| p == var)
                        .ok_or_else(|| err(*apos, sym.clone(), "variable not in :parameters"))?;
                    indices.push(idx);
                }
                other => return Err(err(other.pos(), "(", "expected a variable")),
            }
        }
        Ok(TemplateAtom {
            predicate: name.to_string(),
            args: indices,
        })
    }

    fn template_conjunction(
        &self,
        expr: &Sexpr,
        params: &[(String, String)],
        _allow_empty: bool,
    ) -> Result<Vec<TemplateAtom>, PddlError> {
        match expr.head() {
            Some("and") => {
                let items = match expr {
                    Sexpr::List(items, _) => &items[1..],
                    _ => unreachable!(),
                };
                items
                    .iter()
                    .map(|item| self.checked_positive(item, params))
                    .collect()
            }
            _ => Ok(vec![self.checked_positive(expr, params)?]),
        }
    }

    fn checked_positive(
        &self,
        expr: &Sexpr,
        params: &[(String, String)],
    ) -> Result<TemplateAtom, PddlError> {
        if let Some(head) = expr.head() {
            if PRECONDITION_REJECTS.contains(&head) {
                let what = if head == "not" {
                    "negative precondition".to_string()
                } else {
                    format!("'{head}' in precondition")
                };
                return Err(unsupported(expr.pos(), what));
            }
        }
        self.template_atom(expr, params)
    }

    fn effect_conjunction(
        &self,
        expr: &Sexpr,
        params: &[(String, String)],
    ) -> Result<(Vec<TemplateAtom>, Vec<TemplateAtom>), PddlError> {
        let items: Vec<&Sexpr> = match expr.head() {
            Some("and") => match expr {
                Sexpr::List(items, _) => items[1..].iter().collect(),
                _ => unreachable!(),
            },
            _ => vec![expr],
        };
        let mut add = Vec::new();
        let mut del = Vec::new();
        for item in items {
            match item.head() {
                Some("not") => {
                    let inner = match item {
                        Sexpr::List(list, pos) => list
                            .get(1)
                            .ok_or_else(|| err(*pos, "not", "expected an atom inside (not ...)"))?,
                        _ => unreachable!(),
                    };
                    del.push(self.template_atom(inner, params)?);
                }
                Some("when") | Some("forall") => {
                    return Err(unsupported(item.pos(), "conditional effect"));
                }
                Some("increase") | Some("decrease") | Some("assign") => {
                    return Err(unsupported(item.pos(), "numeric effect"));
                }
                _ => add.push(self.template_atom(item, params)?),
            }
        }
        Ok((add, del))
    }
}

struct ProblemReader<'d> {
    domain: &'d Domain,
    name: String,
    objects: Vec<(String, String)>,
    init: Vec<Atom>,
    goal: Vec<Atom>,
}

impl<'d> ProblemReader<'d> {
    fn read(domain: &'d Domain, text: &str) -> Result<Self, PddlError> {
        let top = read_sexpr(text)?;
        let items = match &top {
            Sexpr::List(items, pos) => {
                match items.first() {
                    Some(Sexpr::Sym(head, _)) if head == "define" => {}
                    _ => return Err(err(*pos, "(", "expected (define (problem ...) ...)")),
                }
                items
            }
            Sexpr::Sym(sym, pos) => return Err(err(*pos, sym.clone(), "expected (define ...)")),
        };
        let mut reader = ProblemReader {
            domain,
            name: String::new(),
            objects: Vec::new(),
            init: Vec::new(),
            goal: Vec::new(),
        };
        for section in &items[1..] {
            let head = section
                .head()
                .ok_or_else(|| err(section.pos(), "", "expected a problem section"))?;
            match head {
                "problem" => {
                    if let Sexpr::List(inner, pos) = section {
                        match inner.get(1) {
                            Some(Sexpr::Sym(name, _)) => reader.name = name.clone(),
                            _ => return Err(err(*pos, "problem", "expected a problem name")),
                        }
                    }
                }
                ":domain" => {
                    if let Sexpr::List(inner, pos) = section {
                        match inner.get(1) {
                            Some(Sexpr::Sym(name, _)) => {
                                if name != &domain.name {
                                    return Err(err(
                                        *pos,
                                        name.clone(),
                                        format!("problem targets domain '{name}', parsed domain is '{}'", domain.name),
                                    ));
                                }
                            }
                            _ => return Err(err(*pos, ":domain", "expected a domain name")),
                        }
                    }
                }
                ":objects" => reader.objects(section)?,
                ":init" => reader.init(section)?,
                ":goal" => reader.goal(section)?,
                ":metric" => return Err(unsupported(section.pos(), ":metric")),
                other => {
                    return Err(unsupported(
                        section.pos(),
                        format!("problem section {other}"),
                    ));
                }
            }
        }
        Ok(reader)
    }

    fn objects(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        let items = match section {
            Sexpr::List(items, _) => &items[1..],
            _ => return Ok(()),
        };
        let fallback = if self.domain.typed {
            "object"
        } else {
            "default"
        };
        let mut seen = HashSet::new();
        for (name, ty, pos) in read_typed_list(items, fallback)? {
            if !seen.insert(name.clone()) {
                return Err(err(pos, name, "duplicate object"));
            }
            if self.domain.typed
                && ty != "object"
                && !self.domain.type_parents.contains_key(&ty)
                && !self.domain.type_parents.values().any(|p| p == &ty)
            {
                return Err(err(pos, ty.clone(), "object uses an undeclared type"));
            }
            self.objects.push((name, ty));
        }
        Ok(())
    }

    fn ground_atom(&self, expr: &Sexpr) -> Result<Atom, PddlError> {
        let (name, args, pos) = atom_items(expr)?;
        let sig = self
            .domain
            .predicates
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| err(pos, name, "unknown predicate"))?;
        if sig.arity() != args.len() {
            return Err(err(
                pos,
                name,
                format!(
                    "predicate takes {} argument(s), got {}",
                    sig.arity(),
                    args.len()
                ),
            ));
        }
        let mut out = Vec::with_capacity(args.len());
        for (arg, want) in args.iter().zip(&sig.param_types) {
            match arg {
                Sexpr::Sym(obj, apos) => {
                    let ty = self
                        .objects
                        .iter()
                        .find(|(name, _)| name == obj)
                        .map(|(_, ty)| ty.clone())
                        .ok_or_else(|| err(*apos, obj.clone(), "undeclared object"))?;
                    if !self.domain.type_conforms(&ty, want) {
                        return Err(err(
                            *apos,
                            obj.clone(),
                            format!("object type '{ty}' does not conform to '{want}'"),
                        ));
                    }
                    out.push(obj.clone());
                }
                other => return Err(err(other.pos(), "(", "expected an object name")),
            }
        }
        Ok(Atom::new(name, out))
    }

    fn init(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        let items = match section {
            Sexpr::List(items, _) => &items[1..],
            _ => return Ok(()),
        };
        for item in items {
            if item.head() == Some("=") {
                return Err(unsupported(item.pos(), "numeric initial value"));
            }
            self.init.push(self.ground_atom(item)?);
        }
        Ok(())
    }

    fn goal(&mut self, section: &Sexpr) -> Result<(), PddlError> {
        let items = match section {
            Sexpr::List(items, pos) => {
                if items.len() != 2 {
                    return Err(err(*pos, ":goal", "expected exactly one goal form"));
                }
                &items[1]
            }
            _ => return Ok(()),
        };
        let conjuncts: Vec<&Sexpr> = match items.head() {
            Some("and") => match items {
                Sexpr::List(list, _) => list[1..].iter().collect(),
                _ => unreachable!(),
            },
            Some("not") | Some("or") | Some("forall") | Some("exists") => {
                return Err(unsupported(items.pos(), "non-conjunctive goal"));
            }
            _ => vec![items],
        };
        for item in conjuncts {
            if let Some(head) = item.head() {
                if head == "not" || head == "or" {
                    return Err(unsupported(
                        item.pos(),
                        "negative or disjunctive goal literal",
                    ));
                }
            }
            self.goal.push(self.ground_atom(item)?);
        }
        Ok(())
    }
}

const ATOM_CAP: usize = 2_000_000;

/// Enumerate every type-consistent instantiation of every predicate.
fn enumerate_atoms(domain: &Domain, objects: &[(String, String)]) -> Result<Vec<Atom>, PddlError> {
    let mut atoms = Vec::new();
    for sig in &domain.predicates {
        let candidates: Vec<Vec<&String>> = sig
            .param_types
            .iter()
            .map(|want| {
                objects
                    .iter()
                    .filter(|(_, ty)| domain.type_conforms(ty, want))
                    .map(|(name, _)| name)
                    .collect()
            })
            .collect();
        if candidates.iter().any(|c| c.is_empty()) && !candidates.is_empty() {
            continue;
        }
        let mut stack: Vec<usize> = vec![0; candidates.len()];
        'tuples: loop {
            let args: Vec<String> = stack
                .iter()
                .zip(&candidates)
                .map(|(&i, c)| c[i].clone())
                .collect();
            atoms.push(Atom::new(sig.name.clone(), args));
            if atoms.len() > ATOM_CAP {
                return Err(PddlError::GroundingExplosion {
                    count: atoms.len(),
                    cap: ATOM_CAP,
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
    }
    Ok(atoms)
}

/// Parse a domain and problem pair into a fully resolved [`ProblemInstance`].
///
/// Requirement flags beyond `:strips`/`:typing` are rejected, as are negative
/// preconditions, conditional effects, and numeric fluents.
pub fn parse_pddl(domain_text: &str, problem_text: &str) -> Result<ProblemInstance, PddlError> {
    let domain = DomainReader::read(domain_text)?;
    let reader = {
        let r = ProblemReader::read(&domain, problem_text)?;
        (r.name, r.objects, r.init, r.goal)
    };
    let (name, objects, init_atoms, goal_atoms) = reader;
    let object_types: HashMap<String, String> = objects.iter().cloned().collect();
    let atoms = enumerate_atoms(&domain, &objects)?;
    let table = Arc::new(AtomTable::build(atoms, &object_types));
    let init_ids = init_atoms
        .iter()
        .map(|a| table.lookup(a).expect("init atom enumerated"))
        .collect();
    let goal_ids = goal_atoms
        .iter()
        .map(|a| table.lookup(a).expect("goal atom enumerated"))
        .collect();
    let init = State::from_ids(init_ids, Arc::clone(&table));
    let goal = State::from_ids(goal_ids, Arc::clone(&table));
    Ok(ProblemInstance {
        name,
        domain,
        objects,
        init,
        goal,
        object_types,
        table,
    })
}
