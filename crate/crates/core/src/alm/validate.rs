//! Static checks for parsed system descriptions.
//!
//! Validation is pure and order-independent: it never mutates the program and
//! reports every finding it can, in declaration order. Programs are expected
//! to have their imports resolved first; a leftover import is itself an
//! error.

use super::ast::*;
use super::sorts::{SortTable, ACTIONS};
use crate::diag::Diagnostic;
use std::collections::{BTreeMap, BTreeSet};

pub fn validate(program: &Program, lib_sorts: &SortTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let ctx = Context::build(program, lib_sorts, &mut diags);
    check_axioms(program, &ctx, &mut diags);
    check_structure(program, &ctx, &mut diags);
    check_directives(program, &ctx, &mut diags);
    diags
}

struct Context<'p> {
    sorts: SortTable,
    fluents: BTreeMap<&'p str, &'p FluentDecl>,
    /// Attribute name to (owner sort, declaration); a name may be declared on
    /// several sorts.
    attributes: BTreeMap<&'p str, Vec<(&'p str, &'p AttributeDecl)>>,
    /// Instance name to declared sort.
    instances: BTreeMap<&'p str, &'p str>,
}

impl<'p> Context<'p> {
    fn build(program: &'p Program, lib_sorts: &SortTable, diags: &mut Vec<Diagnostic>) -> Self {
        if !program.theory.imports.is_empty() {
            diags.push(Diagnostic::error(format!(
                "unresolved import {}; resolve imports against a library before validating",
                program.theory.imports[0].path
            )));
        }

        let mut module_names = BTreeSet::new();
        for m in program.modules() {
            if !module_names.insert(m.name.as_str()) {
                diags.push(Diagnostic::error(format!(
                    "module `{}` is declared more than once",
                    m.name
                )));
            }
        }

        let mut sorts = lib_sorts.clone();
        let mut fluents: BTreeMap<&str, &FluentDecl> = BTreeMap::new();
        let mut attributes: BTreeMap<&str, Vec<(&str, &AttributeDecl)>> = BTreeMap::new();

        for m in program.modules() {
            for sd in &m.sort_decls {
                for name in &sd.names {
                    if !sorts.insert(name.clone(), sd.parents.clone()) {
                        diags.push(Diagnostic::error(format!(
                            "sort `{name}` is already defined (module `{}`)",
                            m.name
                        )));
                    }
                }
                let mut attr_names = BTreeSet::new();
                for attr in &sd.attributes {
                    if !attr_names.insert(attr.name.as_str()) {
                        diags.push(Diagnostic::error(format!(
                            "attribute `{}` is declared twice on sort `{}`",
                            attr.name,
                            sd.names.join(", ")
                        )));
                    }
                    for owner in &sd.names {
                        attributes
                            .entry(attr.name.as_str())
                            .or_default()
                            .push((owner.as_str(), attr));
                    }
                }
            }
            for fd in &m.fluent_decls {
                if fluents.insert(fd.name.as_str(), fd).is_some() {
                    diags.push(Diagnostic::error(format!(
                        "fluent `{}` is declared more than once",
                        fd.name
                    )));
                }
            }
        }

        for name in fluents.keys() {
            if attributes.contains_key(name) {
                diags.push(Diagnostic::error(format!(
                    "`{name}` is declared both as a fluent and as an attribute"
                )));
            }
        }

        // Parent references and acyclicity over the combined hierarchy.
        for m in program.modules() {
            for sd in &m.sort_decls {
                for parent in &sd.parents {
                    if !sorts.contains(parent) {
                        diags.push(Diagnostic::error(format!(
                            "unknown parent sort `{parent}` for `{}`",
                            sd.names.join(", ")
                        )));
                    }
                }
            }
        }
        for name in sorts.cycle_members() {
            diags.push(Diagnostic::error(format!(
                "sort `{name}` is its own ancestor"
            )));
        }

        for m in program.modules() {
            for sd in &m.sort_decls {
                for attr in &sd.attributes {
                    for s in &attr.arg_sorts {
                        if !sorts.contains(s) {
                            diags.push(Diagnostic::error(format!(
                                "unknown sort `{s}` in attribute `{}`",
                                attr.name
                            )));
                        }
                    }
                }
            }
            for fd in &m.fluent_decls {
                for s in &fd.arg_sorts {
                    if !sorts.contains(s) {
                        diags.push(Diagnostic::error(format!(
                            "unknown sort `{s}` in fluent `{}`",
                            fd.name
                        )));
                    }
                }
            }
        }

        let mut instances: BTreeMap<&str, &str> = BTreeMap::new();
        for inst in &program.structure.instances {
            for name in &inst.names {
                if instances.insert(name.as_str(), inst.sort.as_str()).is_some() {
                    diags.push(Diagnostic::error(format!(
                        "instance `{name}` is declared more than once"
                    )));
                }
            }
        }

        Context {
            sorts,
            fluents,
            attributes,
            instances,
        }
    }

    /// Whether the declared sort of `instance` lies at or below `sort`.
    fn instance_in_sort(&self, instance: &str, sort: &str) -> bool {
        self.instances
            .get(instance)
            .is_some_and(|declared| self.sorts.descends_from(declared, sort))
    }
}

fn check_axioms(program: &Program, ctx: &Context, diags: &mut Vec<Diagnostic>) {
    for m in program.modules() {
        for path in &m.depends_on {
            let known = program.modules().any(|other| other.name == path.module);
            if !known {
                diags.push(Diagnostic::warning(format!(
                    "module `{}` depends on `{path}`, which is not part of this program",
                    m.name
                )));
            }
        }
        for axiom in &m.axioms {
            check_axiom(axiom, &m.name, ctx, diags);
        }
    }
}

fn check_axiom(axiom: &Axiom, module: &str, ctx: &Context, diags: &mut Vec<Diagnostic>) {
    let where_ = format!("in module `{module}`");

    // Heads resolve against the declared vocabulary.
    match axiom {
        Axiom::DynamicCausal(law) => {
            if ctx.fluents.contains_key(law.head.function.as_str()) {
                check_arity(
                    &law.head,
                    ctx.fluents[law.head.function.as_str()].arg_sorts.len(),
                    &where_,
                    diags,
                );
            } else {
                diags.push(Diagnostic::error(format!(
                    "dynamic causal law head `{}` is not a declared fluent {where_}",
                    law.head.function
                )));
            }
        }
        Axiom::StateConstraint(sc) => {
            if let Some(fd) = ctx.fluents.get(sc.head.function.as_str()) {
                check_arity(&sc.head, fd.arg_sorts.len(), &where_, diags);
            } else if let Some(decls) = ctx.attributes.get(sc.head.function.as_str()) {
                // Attribute heads define static facts: the owner argument is
                // implicit, so arity is declared arity plus one.
                check_arity(&sc.head, decls[0].1.arg_sorts.len() + 1, &where_, diags);
                if !sc.head.positive {
                    diags.push(Diagnostic::error(format!(
                        "state constraint head `-{}` negates an attribute {where_}; attribute facts can only be derived positively",
                        sc.head.function
                    )));
                }
                for cond in &sc.body {
                    if let Condition::Literal(lit) = cond {
                        if ctx.fluents.contains_key(lit.function.as_str()) {
                            diags.push(Diagnostic::error(format!(
                                "attribute constraint `{}` depends on fluent `{}` {where_}; attribute facts cannot change over time",
                                sc.head.function, lit.function
                            )));
                        }
                    }
                }
            } else {
                diags.push(Diagnostic::error(format!(
                    "state constraint head `{}` is neither a fluent nor an attribute {where_}",
                    sc.head.function
                )));
            }
        }
        Axiom::Executability(ex) => {
            let constrained = ex.body.iter().any(|c| {
                matches!(c, Condition::Instance { term: Term::Var(v), .. } if v == &ex.action_var)
            });
            if !constrained {
                diags.push(Diagnostic::error(format!(
                    "executability condition does not constrain `{}` with an instance(...) condition {where_}",
                    ex.action_var
                )));
            }
        }
    }

    // Body literals resolve; terms are well-formed.
    for cond in axiom.body() {
        match cond {
            Condition::Literal(lit) => {
                if let Some(fd) = ctx.fluents.get(lit.function.as_str()) {
                    check_arity(lit, fd.arg_sorts.len(), &where_, diags);
                } else if let Some(decls) = ctx.attributes.get(lit.function.as_str()) {
                    check_arity(lit, decls[0].1.arg_sorts.len() + 1, &where_, diags);
                } else {
                    diags.push(Diagnostic::error(format!(
                        "unknown function `{}` {where_}",
                        lit.function
                    )));
                }
            }
            Condition::Instance { sort, .. } => {
                if !ctx.sorts.contains(sort) {
                    diags.push(Diagnostic::error(format!(
                        "unknown sort `{sort}` in instance condition {where_}"
                    )));
                }
            }
            Condition::Equal(..) | Condition::NotEqual(..) => {}
        }
    }

    // Constants must name declared instances.
    let mut constants: Vec<&Ident> = Vec::new();
    if let Axiom::DynamicCausal(law) = axiom {
        constants.extend(law.head.args.iter().filter_map(const_name));
    }
    if let Axiom::StateConstraint(sc) = axiom {
        constants.extend(sc.head.args.iter().filter_map(const_name));
    }
    for cond in axiom.body() {
        constants.extend(condition_terms(cond).into_iter().filter_map(const_name));
    }
    for c in constants {
        if !ctx.instances.contains_key(c.as_str()) {
            diags.push(Diagnostic::error(format!(
                "constant `{c}` {where_} does not name a declared instance"
            )));
        }
    }

    // Range restriction: every variable needs a binding occurrence, which is
    // a positive literal, an instance condition, or the occurs(...) variable.
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    if let Some(v) = axiom.action_var() {
        bound.insert(v.as_str());
    }
    for cond in axiom.body() {
        match cond {
            Condition::Literal(lit) if lit.positive => {
                bound.extend(lit.args.iter().filter_map(var_name));
            }
            Condition::Instance {
                term: Term::Var(v), ..
            } => {
                bound.insert(v.as_str());
            }
            _ => {}
        }
    }
    let mut mentioned: Vec<&str> = Vec::new();
    for v in axiom.head_vars() {
        mentioned.push(v.as_str());
    }
    for cond in axiom.body() {
        mentioned.extend(condition_vars(cond).into_iter().map(Ident::as_str));
    }
    let mut reported = BTreeSet::new();
    for v in mentioned {
        if !bound.contains(v) && reported.insert(v) {
            diags.push(Diagnostic::error(format!(
                "variable `{v}` {where_} is not bound by a positive condition"
            )));
        }
    }
}

fn check_arity(lit: &Literal, expected: usize, where_: &str, diags: &mut Vec<Diagnostic>) {
    if lit.args.len() != expected {
        diags.push(Diagnostic::error(format!(
            "`{}` takes {expected} argument{} but got {} {where_}",
            lit.function,
            if expected == 1 { "" } else { "s" },
            lit.args.len()
        )));
    }
}

fn const_name(term: &Term) -> Option<&Ident> {
    match term {
        Term::Const(c) => Some(c),
        Term::Var(_) => None,
    }
}

fn var_name(term: &Term) -> Option<&str> {
    match term {
        Term::Var(v) => Some(v.as_str()),
        Term::Const(_) => None,
    }
}

fn check_structure(program: &Program, ctx: &Context, diags: &mut Vec<Diagnostic>) {
    // (attribute, instance, args) -> value, for contradiction detection.
    let mut assigned: BTreeMap<(&str, &str, Vec<&str>), bool> = BTreeMap::new();

    for inst in &program.structure.instances {
        if !ctx.sorts.contains(&inst.sort) {
            diags.push(Diagnostic::error(format!(
                "instance{} `{}` declared in unknown sort `{}`",
                if inst.names.len() == 1 { "" } else { "s" },
                inst.names.join(", "),
                inst.sort
            )));
            continue;
        }
        for assignment in &inst.assignments {
            let decl = ctx
                .attributes
                .get(assignment.attribute.as_str())
                .into_iter()
                .flatten()
                .find(|(owner, _)| ctx.sorts.descends_from(&inst.sort, owner));
            let Some((_, decl)) = decl else {
                diags.push(Diagnostic::error(format!(
                    "attribute `{}` is not declared on sort `{}` or its ancestors",
                    assignment.attribute, inst.sort
                )));
                continue;
            };
            if assignment.args.len() != decl.arg_sorts.len() {
                diags.push(Diagnostic::error(format!(
                    "attribute `{}` takes {} argument{} but got {}",
                    assignment.attribute,
                    decl.arg_sorts.len(),
                    if decl.arg_sorts.len() == 1 { "" } else { "s" },
                    assignment.args.len()
                )));
                continue;
            }
            for (arg, sort) in assignment.args.iter().zip(&decl.arg_sorts) {
                if !ctx.instances.contains_key(arg.as_str()) {
                    diags.push(Diagnostic::error(format!(
                        "attribute argument `{arg}` does not name a declared instance"
                    )));
                } else if !ctx.instance_in_sort(arg, sort) {
                    diags.push(Diagnostic::error(format!(
                        "attribute argument `{arg}` is not in sort `{sort}` (attribute `{}`)",
                        assignment.attribute
                    )));
                }
            }
            for name in &inst.names {
                let key = (
                    assignment.attribute.as_str(),
                    name.as_str(),
                    assignment.args.iter().map(Ident::as_str).collect(),
                );
                match assigned.get(&key) {
                    Some(&prev) if prev != assignment.value => {
                        diags.push(Diagnostic::error(format!(
                            "attribute `{}({})` of `{name}` is assigned both true and false",
                            assignment.attribute,
                            assignment.args.join(","),
                        )));
                    }
                    Some(_) => diags.push(Diagnostic::warning(format!(
                        "duplicate assignment of `{}({})` on `{name}`",
                        assignment.attribute,
                        assignment.args.join(","),
                    ))),
                    None => {
                        assigned.insert(key, assignment.value);
                    }
                }
            }
        }
    }
}

fn check_directives(program: &Program, ctx: &Context, diags: &mut Vec<Diagnostic>) {
    match program.max_steps {
        Some(0) => diags.push(Diagnostic::error("max steps must be at least 1")),
        None if program.temporal_projection => {
            diags.push(Diagnostic::error(
                "temporal projection requires a max steps directive",
            ));
        }
        _ => {}
    }
    for occ in &program.history {
        if !ctx.instances.contains_key(occ.event.as_str()) {
            diags.push(Diagnostic::error(format!(
                "history event `{}` is not a declared instance",
                occ.event
            )));
        } else if !ctx.instance_in_sort(&occ.event, ACTIONS) {
            diags.push(Diagnostic::error(format!(
                "history event `{}` is not an action instance",
                occ.event
            )));
        }
        if let Some(n) = program.max_steps {
            if occ.time >= n {
                diags.push(Diagnostic::error(format!(
                    "history time {} is outside 0..{n}",
                    occ.time
                )));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::parser::parse_program;
    use crate::diag::has_errors;

    fn check(src: &str) -> Vec<Diagnostic> {
        validate(&parse_program(src).unwrap(), &SortTable::minimal())
    }

    const OK: &str = "
system description demo
  theory demo_theory
    module demo
      sort declarations
        agents :: universe
        places :: universe
        move :: actions
          attributes
            actor : agents -> booleans
            destination : places -> booleans
      function declarations
        fluents
          basic
            loc_in : agents * places -> booleans
      axioms
        dynamic causal laws
          occurs(X) causes loc_in(A,D) if instance(X,move), actor(X,A), destination(X,D).
        state constraints
          -loc_in(A,P2) if loc_in(A,P1), instance(P2,places), P1 != P2.
        executability conditions
          impossible occurs(X) if instance(X,move), actor(X,A), destination(X,D), loc_in(A,D).
  structure demo_structure
    instances
      bob in agents
      hall, porch in places
      a1 in move
        actor(bob) = true
        destination(hall) = true
  temporal projection
  max steps 2
  history
    happened(a1, 0).
";

    #[test]
    fn clean_program_validates() {
        assert_eq!(check(OK), Vec::new());
    }

    #[test]
    fn idempotent_and_stable_under_round_trip() {
        let p = parse_program(OK).unwrap();
        let table = SortTable::minimal();
        let once = validate(&p, &table);
        let twice = validate(&p, &table);
        assert_eq!(once, twice);
        let rendered = crate::alm::render::render_program(&p);
        let reparsed = parse_program(&rendered).unwrap();
        assert_eq!(validate(&reparsed, &table), once);
    }

    #[test]
    fn unknown_parent_sort() {
        let diags = check(&OK.replace("move :: actions", "move :: gestures"));
        assert!(diags.iter().any(|d| d.message.contains("gestures")));
    }

    #[test]
    fn sort_cycle_is_an_error() {
        let src = OK.replace("places :: universe", "places :: move\n        gestures :: places");
        let diags = check(&src.replace("move :: actions", "move :: gestures"));
        assert!(diags.iter().any(|d| d.message.contains("own ancestor")));
    }

    #[test]
    fn unbound_head_variable() {
        let diags = check(&OK.replace(
            "causes loc_in(A,D) if instance(X,move), actor(X,A), destination(X,D).",
            "causes loc_in(A,D) if instance(X,move), actor(X,A).",
        ));
        assert!(diags.iter().any(|d| d.message.contains("`D`")));
    }

    #[test]
    fn inequality_does_not_bind() {
        let diags = check(&OK.replace(
            "-loc_in(A,P2) if loc_in(A,P1), instance(P2,places), P1 != P2.",
            "-loc_in(A,P2) if loc_in(A,P1), P1 != P2.",
        ));
        assert!(diags.iter().any(|d| d.message.contains("`P2`")));
    }

    #[test]
    fn contradictory_assignment() {
        let diags = check(&OK.replace(
            "actor(bob) = true",
            "actor(bob) = true\n        actor(bob) = false",
        ));
        assert!(diags.iter().any(|d| d.message.contains("both true and false")));
    }

    #[test]
    fn history_event_must_be_an_action() {
        let diags = check(&OK.replace("happened(a1, 0).", "happened(bob, 0)."));
        assert!(diags.iter().any(|d| d.message.contains("not an action")));
    }

    #[test]
    fn history_time_must_fit_max_steps() {
        let diags = check(&OK.replace("happened(a1, 0).", "happened(a1, 2)."));
        assert!(diags.iter().any(|d| d.message.contains("outside")));
    }

    #[test]
    fn temporal_projection_needs_max_steps() {
        let diags = check(&OK.replace("  max steps 2\n", ""));
        assert!(has_errors(&diags));
    }

    #[test]
    fn unresolved_import_is_flagged() {
        let src = OK.replace(
            "theory demo_theory\n",
            "theory demo_theory\n    import t_x.m_y from somewhere\n",
        );
        let diags = check(&src);
        assert!(diags.iter().any(|d| d.message.contains("unresolved import")));
    }

    #[test]
    fn attribute_argument_sort_mismatch() {
        let diags = check(&OK.replace("actor(bob) = true", "actor(hall) = true"));
        assert!(diags
            .iter()
            .any(|d| d.message.contains("`hall`") && d.message.contains("agents")));
    }
}
