//! Grounding: instantiate every axiom of a flattened program over all
//! sort-consistent substitutions, pre-evaluating the static parts (instance
//! tests, equalities, attribute literals) so that only fluent conditions
//! remain.

use super::symbols::{InstanceId, SymbolTable};
use crate::alm::ast::condition_terms;
use crate::alm::{Axiom, Condition, Ident, Literal, Occurrence, Program, Term};
use crate::diag::Diagnostic;
use std::collections::{BTreeMap, BTreeSet};

pub type AtomId = u32;

/// A ground fluent atom, e.g. loc_in(r1, r2).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub fluent: Ident,
    pub args: Vec<InstanceId>,
}

/// A signed reference to a ground atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lit {
    pub atom: AtomId,
    pub positive: bool,
}

impl Lit {
    pub fn positive(atom: AtomId) -> Lit {
        Lit { atom, positive: true }
    }

    pub fn complement(self) -> Lit {
        Lit {
            atom: self.atom,
            positive: !self.positive,
        }
    }
}

/// occurs(event) causes head if body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundLaw {
    pub event: InstanceId,
    pub head: Lit,
    pub body: Vec<Lit>,
}

/// head if body, within a single state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Lit,
    pub body: Vec<Lit>,
}

/// impossible occurs(event) if body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundExec {
    pub event: InstanceId,
    pub body: Vec<Lit>,
    /// Module the condition came from, for diagnostics.
    pub module: Ident,
}

#[derive(Debug, Clone)]
pub struct GroundProgram {
    pub symbols: SymbolTable,
    pub atoms: Vec<GroundAtom>,
    atom_ids: BTreeMap<GroundAtom, AtomId>,
    pub causal: Vec<GroundLaw>,
    pub constraints: Vec<GroundRule>,
    pub execs: Vec<GroundExec>,
    pub max_steps: Option<u32>,
    pub history: Vec<Occurrence<InstanceId>>,
}

impl GroundProgram {
    pub fn atom_id(&self, fluent: &str, args: &[InstanceId]) -> Option<AtomId> {
        self.atom_ids
            .get(&GroundAtom {
                fluent: fluent.to_string(),
                args: args.to_vec(),
            })
            .copied()
    }

    pub fn atom_text(&self, atom: AtomId) -> String {
        let a = &self.atoms[atom as usize];
        let args: Vec<&str> = a.args.iter().map(|&id| self.symbols.name(id)).collect();
        format!("{}({})", a.fluent, args.join(","))
    }

    pub fn lit_text(&self, lit: Lit) -> String {
        if lit.positive {
            self.atom_text(lit.atom)
        } else {
            format!("-{}", self.atom_text(lit.atom))
        }
    }

    pub fn law_text(&self, law: &GroundLaw) -> String {
        let mut s = format!(
            "occurs({}) causes {}",
            self.symbols.name(law.event),
            self.lit_text(law.head)
        );
        if !law.body.is_empty() {
            let conds: Vec<String> = law.body.iter().map(|&l| self.lit_text(l)).collect();
            s.push_str(&format!(" if {}", conds.join(", ")));
        }
        s
    }
}

pub const DEFAULT_GROUNDING_CAP: usize = 1_000_000;

pub fn ground(program: &Program) -> Result<GroundProgram, Diagnostic> {
    ground_with_cap(program, DEFAULT_GROUNDING_CAP)
}

pub fn ground_with_cap(program: &Program, cap: usize) -> Result<GroundProgram, Diagnostic> {
    let symbols = SymbolTable::build(program)?;

    // Fluent declarations; names are globally unique in a valid program.
    let mut fluents: BTreeMap<Ident, Vec<Ident>> = BTreeMap::new();
    let mut atoms = Vec::new();
    let mut atom_ids = BTreeMap::new();
    for m in program.modules() {
        for decl in &m.fluent_decls {
            fluents.insert(decl.name.clone(), decl.arg_sorts.clone());
            let mut args = vec![0usize; decl.arg_sorts.len()];
            enumerate_atoms(&symbols, &decl.name, &decl.arg_sorts, &mut args, 0, &mut |atom| {
                if !atom_ids.contains_key(&atom) {
                    atom_ids.insert(atom.clone(), atoms.len() as AtomId);
                    atoms.push(atom);
                }
            });
        }
    }

    let mut grounder = Grounder {
        symbols: &symbols,
        fluents: &fluents,
        atom_ids: &atom_ids,
        budget: cap,
    };

    let mut causal = BTreeSet::new();
    let mut constraints = BTreeSet::new();
    let mut execs = BTreeSet::new();
    for m in program.modules() {
        for axiom in &m.axioms {
            match axiom {
                Axiom::DynamicCausal(law) => {
                    grounder.ground_axiom(
                        Some(&law.action_var),
                        Some(&law.head),
                        &law.body,
                        &m.name,
                        &mut |event, head, body| {
                            causal.insert(GroundLaw {
                                event: event.expect("causal law has an action variable"),
                                head: head.expect("causal law has a head"),
                                body,
                            });
                        },
                    )?;
                }
                Axiom::StateConstraint(sc) => {
                    if symbols.is_attribute(&sc.head.function) {
                        continue; // consumed by the attribute valuation
                    }
                    grounder.ground_axiom(None, Some(&sc.head), &sc.body, &m.name, &mut |_, head, body| {
                        constraints.insert(GroundRule {
                            head: head.expect("state constraint has a head"),
                            body,
                        });
                    })?;
                }
                Axiom::Executability(e) => {
                    let module = m.name.clone();
                    grounder.ground_axiom(
                        Some(&e.action_var),
                        None,
                        &e.body,
                        &m.name,
                        &mut |event, _, body| {
                            execs.insert(GroundExec {
                                event: event.expect("executability names an action variable"),
                                body,
                                module: module.clone(),
                            });
                        },
                    )?;
                }
            }
        }
    }

    let mut history = Vec::new();
    for occ in &program.history {
        let Some(event) = symbols.id(&occ.event) else {
            return Err(Diagnostic::error(format!(
                "history names undeclared event {}",
                occ.event
            )));
        };
        history.push(Occurrence {
            event,
            time: occ.time,
        });
    }

    Ok(GroundProgram {
        symbols,
        atoms,
        atom_ids,
        causal: causal.into_iter().collect(),
        constraints: constraints.into_iter().collect(),
        execs: execs.into_iter().collect(),
        max_steps: program.max_steps,
        history,
    })
}

fn enumerate_atoms(
    symbols: &SymbolTable,
    fluent: &str,
    arg_sorts: &[Ident],
    args: &mut Vec<InstanceId>,
    pos: usize,
    push: &mut dyn FnMut(GroundAtom),
) {
    if pos == arg_sorts.len() {
        push(GroundAtom {
            fluent: fluent.to_string(),
            args: args.clone(),
        });
        return;
    }
    for &id in symbols.members(&arg_sorts[pos]) {
        args[pos] = id;
        enumerate_atoms(symbols, fluent, arg_sorts, args, pos + 1, push);
    }
}

struct Grounder<'a> {
    symbols: &'a SymbolTable,
    fluents: &'a BTreeMap<Ident, Vec<Ident>>,
    atom_ids: &'a BTreeMap<GroundAtom, AtomId>,
    budget: usize,
}

impl<'a> Grounder<'a> {
    /// Instantiates one axiom, calling `emit` for every substitution whose
    /// static conditions hold. The emitted body contains the surviving
    /// fluent conditions only.
    fn ground_axiom(
        &mut self,
        action_var: Option<&Ident>,
        head: Option<&Literal>,
        body: &[Condition],
        module: &str,
        emit: &mut dyn FnMut(Option<InstanceId>, Option<Lit>, Vec<Lit>),
    ) -> Result<(), Diagnostic> {
        // Variables in first-occurrence order, the action variable first.
        let mut vars: Vec<Ident> = Vec::new();
        if let Some(v) = action_var {
            vars.push(v.clone());
        }
        let mut collect = |t: &Term| {
            if let Term::Var(v) = t {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        };
        if let Some(h) = head {
            for arg in &h.args {
                collect(arg);
            }
        }
        for cond in body {
            for term in condition_terms(cond) {
                collect(term);
            }
        }

        // Ranges: every instance, narrowed by sorts that must hold.
        let mut ranges: BTreeMap<Ident, Vec<InstanceId>> = vars
            .iter()
            .map(|v| (v.clone(), (0..self.symbols.len()).collect()))
            .collect();
        if let Some(v) = action_var {
            let events: BTreeSet<InstanceId> = self.symbols.events().iter().copied().collect();
            ranges.get_mut(v).unwrap().retain(|id| events.contains(id));
        }
        if let Some(h) = head {
            self.narrow_literal(h, &mut ranges);
        }
        for cond in body {
            match cond {
                Condition::Instance { term: Term::Var(v), sort } => {
                    ranges
                        .get_mut(v)
                        .unwrap()
                        .retain(|&id| self.symbols.is_member(id, sort));
                }
                Condition::Literal(l) if l.positive => self.narrow_literal(l, &mut ranges),
                _ => {}
            }
        }

        // Conditions are checked as soon as all their variables are bound.
        let depth_of = |terms: Vec<&Term>| -> usize {
            terms
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(vars.iter().position(|x| x == v).unwrap() + 1),
                    Term::Const(_) => None,
                })
                .max()
                .unwrap_or(0)
        };
        let mut static_conds: Vec<(usize, &Condition)> = Vec::new();
        let mut fluent_conds: Vec<&Literal> = Vec::new();
        for cond in body {
            match cond {
                Condition::Literal(l) if self.fluents.contains_key(&l.function) => {
                    fluent_conds.push(l);
                }
                _ => static_conds.push((depth_of(condition_terms(cond)), cond)),
            }
        }

        let mut subst: BTreeMap<Ident, InstanceId> = BTreeMap::new();
        self.recurse(
            0,
            &vars,
            &ranges,
            &static_conds,
            &fluent_conds,
            action_var,
            head,
            module,
            &mut subst,
            emit,
        )
    }

    fn narrow_literal(&self, literal: &Literal, ranges: &mut BTreeMap<Ident, Vec<InstanceId>>) {
        if let Some(arg_sorts) = self.fluents.get(&literal.function) {
            for (term, sort) in literal.args.iter().zip(arg_sorts) {
                if let Term::Var(v) = term {
                    ranges
                        .get_mut(v)
                        .unwrap()
                        .retain(|&id| self.symbols.is_member(id, sort));
                }
            }
            return;
        }
        let decls = self.symbols.attr_decls(&literal.function);
        if decls.is_empty() {
            return;
        }
        for (pos, term) in literal.args.iter().enumerate() {
            if let Term::Var(v) = term {
                ranges.get_mut(v).unwrap().retain(|&id| {
                    decls.iter().any(|(owner, arg_sorts)| {
                        let sort = if pos == 0 {
                            Some(owner)
                        } else {
                            arg_sorts.get(pos - 1)
                        };
                        sort.is_some_and(|s| self.symbols.is_member(id, s))
                    })
                });
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        depth: usize,
        vars: &[Ident],
        ranges: &BTreeMap<Ident, Vec<InstanceId>>,
        static_conds: &[(usize, &Condition)],
        fluent_conds: &[&Literal],
        action_var: Option<&Ident>,
        head: Option<&Literal>,
        module: &str,
        subst: &mut BTreeMap<Ident, InstanceId>,
        emit: &mut dyn FnMut(Option<InstanceId>, Option<Lit>, Vec<Lit>),
    ) -> Result<(), Diagnostic> {
        if self.budget == 0 {
            return Err(Diagnostic::error(format!(
                "grounding module `{module}` exceeds the substitution cap; \
                 shrink the structure or raise the limit"
            )));
        }
        self.budget -= 1;

        for (d, cond) in static_conds {
            if *d == depth && !self.condition_holds(cond, subst) {
                return Ok(());
            }
        }

        if depth == vars.len() {
            let mut lits = Vec::new();
            for l in fluent_conds {
                let Some(atom) = self.literal_atom(l, subst) else {
                    return Ok(()); // outside the atom universe: never holds
                };
                let lit = Lit {
                    atom,
                    positive: l.positive,
                };
                if lits.contains(&lit.complement()) {
                    return Ok(()); // unsatisfiable body
                }
                if !lits.contains(&lit) {
                    lits.push(lit);
                }
            }
            lits.sort_unstable();
            let head_lit = match head {
                Some(h) => {
                    let Some(atom) = self.literal_atom(h, subst) else {
                        return Ok(());
                    };
                    Some(Lit {
                        atom,
                        positive: h.positive,
                    })
                }
                None => None,
            };
            let event = action_var.map(|v| subst[v]);
            emit(event, head_lit, lits);
            return Ok(());
        }

        let var = &vars[depth];
        for &id in &ranges[var] {
            subst.insert(var.clone(), id);
            self.recurse(
                depth + 1,
                vars,
                ranges,
                static_conds,
                fluent_conds,
                action_var,
                head,
                module,
                subst,
                emit,
            )?;
        }
        subst.remove(var);
        Ok(())
    }

    fn literal_atom(&self, l: &Literal, subst: &BTreeMap<Ident, InstanceId>) -> Option<AtomId> {
        let args: Vec<InstanceId> = l
            .args
            .iter()
            .map(|t| self.term_id(t, subst))
            .collect::<Option<Vec<_>>>()?;
        self.atom_ids
            .get(&GroundAtom {
                fluent: l.function.clone(),
                args,
            })
            .copied()
    }

    fn term_id(&self, term: &Term, subst: &BTreeMap<Ident, InstanceId>) -> Option<InstanceId> {
        match term {
            Term::Var(v) => subst.get(v).copied(),
            Term::Const(c) => self.symbols.id(c),
        }
    }

    fn condition_holds(&self, cond: &Condition, subst: &BTreeMap<Ident, InstanceId>) -> bool {
        match cond {
            Condition::Instance { term, sort } => self
                .term_id(term, subst)
                .is_some_and(|id| self.symbols.is_member(id, sort)),
            Condition::Equal(a, b) => self.term_id(a, subst) == self.term_id(b, subst),
            Condition::NotEqual(a, b) => self.term_id(a, subst) != self.term_id(b, subst),
            Condition::Literal(l) => {
                let Some(owner) = self.term_id(&l.args[0], subst) else {
                    return false;
                };
                let Some(args) = l.args[1..]
                    .iter()
                    .map(|t| self.term_id(t, subst))
                    .collect::<Option<Vec<_>>>()
                else {
                    return false;
                };
                self.symbols.attr_true(&l.function, owner, &args) == l.positive
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::parse_program;
    use crate::library::builtin_library;

    const JS: &str = "
system description js_discourse
  theory js_discourse_theory
    import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library
    module js_discourse
      depends on t_run_51_3_2.m_run_51_3_2_1
      sorts declarations
        john :: living_entity
        hallway :: spatial_entity
        sandra :: living_entity
  structure js_discourse_structure
    instances
      r1 in john
      r2 in hallway
      r3 in sandra
      e1 in run_51_3_2_1
        vn_theme(r1) = true
        vn_destination(r2) = true
      e2 in run_51_3_2_1
        vn_theme(r3) = true
        vn_destination(r2) = true
  temporal projection
  max steps 3
  history
    happened(e1, 0).
    happened(e2, 1).
";

    fn js_ground() -> GroundProgram {
        let program = parse_program(JS).unwrap();
        let flat = builtin_library().resolve_imports(&program).unwrap();
        ground(&flat).unwrap()
    }

    #[test]
    fn atoms_cover_declared_argument_sorts() {
        let gp = js_ground();
        // loc_in over {r1,r2,r3} x {r2}; holding over {r1,r3} x {r1,r2,r3}.
        let loc = gp.atoms.iter().filter(|a| a.fluent == "loc_in").count();
        let hold = gp.atoms.iter().filter(|a| a.fluent == "holding").count();
        assert_eq!(loc, 3);
        assert_eq!(hold, 6);
    }

    #[test]
    fn causal_laws_instantiate_per_event() {
        let gp = js_ground();
        let texts: Vec<String> = gp.causal.iter().map(|l| gp.law_text(l)).collect();
        assert!(
            texts.contains(&"occurs(e1) causes loc_in(r1,r2)".to_string()),
            "laws: {texts:?}"
        );
        assert!(texts.contains(&"occurs(e2) causes loc_in(r3,r2)".to_string()));
        // The actor attribute is static, so the direct movement law is only
        // instantiated for the event's own actor. (The carried-object law
        // still mentions other entities, guarded by a holding condition.)
        assert!(!texts.contains(&"occurs(e1) causes loc_in(r3,r2)".to_string()));
        assert!(texts
            .contains(&"occurs(e1) causes loc_in(r3,r2) if holding(r1,r3)".to_string()));
    }

    #[test]
    fn executability_keeps_only_fluent_conditions() {
        let gp = js_ground();
        // impossible occurs(e1) if loc_in(r1,r2): the P = D instantiation.
        let r1 = gp.symbols.id("r1").unwrap();
        let r2 = gp.symbols.id("r2").unwrap();
        let e1 = gp.symbols.id("e1").unwrap();
        let atom = gp.atom_id("loc_in", &[r1, r2]).unwrap();
        assert!(gp
            .execs
            .iter()
            .any(|e| e.event == e1 && e.body == vec![Lit::positive(atom)]));
    }

    #[test]
    fn functional_location_constraint_grounds_with_negative_head() {
        let gp = js_ground();
        let r1 = gp.symbols.id("r1").unwrap();
        let r2 = gp.symbols.id("r2").unwrap();
        let atom = gp.atom_id("loc_in", &[r1, r2]).unwrap();
        // Only one place exists, so P1 != P2 never holds: no constraint
        // instance may conclude -loc_in(r1,r2).
        assert!(!gp
            .constraints
            .iter()
            .any(|c| c.head == Lit { atom, positive: false }));
    }

    #[test]
    fn grounding_cap_aborts_with_a_sizing_error() {
        let program = parse_program(JS).unwrap();
        let flat = builtin_library().resolve_imports(&program).unwrap();
        let err = ground_with_cap(&flat, 10).unwrap_err();
        assert!(err.message.contains("cap"));
    }

    #[test]
    fn history_is_resolved_to_instance_ids() {
        let gp = js_ground();
        assert_eq!(gp.history.len(), 2);
        assert_eq!(gp.symbols.name(gp.history[0].event), "e1");
        assert_eq!(gp.history[0].time, 0);
        assert_eq!(gp.max_steps, Some(3));
    }
}
