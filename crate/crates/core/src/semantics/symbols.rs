//! Instance symbols of a flattened program: sort membership closure and the
//! static attribute valuation.
//!
//! Attributes are rigid (time-independent). Their valuation combines the
//! structure's explicit assignments with a least fixpoint over the
//! attribute-headed state constraints (the mechanism wrapper modules use to
//! tie vn_* role attributes to core action attributes). Attributes are
//! closed-world: anything not assigned or derived is false.

use crate::alm::{
    sorts, Axiom, Condition, Ident, Literal, Program, SortTable, StateConstraint, Term,
};
use crate::diag::Diagnostic;
use std::collections::BTreeMap;

pub type InstanceId = usize;

type AttrKey = (Ident, InstanceId, Vec<InstanceId>);

fn narrow<F>(ranges: &mut BTreeMap<Ident, Vec<InstanceId>>, term: &Term, allowed: F)
where
    F: Fn(InstanceId) -> bool,
{
    if let Term::Var(v) = term {
        ranges.get_mut(v).unwrap().retain(|&id| allowed(id));
    }
}

#[derive(Debug, Clone)]
pub struct SymbolTable {
    /// Instance names in declaration order; the index is the instance id.
    instances: Vec<Ident>,
    ids: BTreeMap<Ident, InstanceId>,
    sorts: SortTable,
    /// Sorted member ids per sort, closed upward over the hierarchy.
    members: BTreeMap<Ident, Vec<InstanceId>>,
    /// (attribute, owner, args) -> value; absent means false.
    attrs: BTreeMap<AttrKey, bool>,
    /// Declared argument sorts per attribute name: (owner sort, arg sorts).
    attr_decls: BTreeMap<Ident, Vec<(Ident, Vec<Ident>)>>,
}

impl SymbolTable {
    /// Builds the symbol table of a validated, import-free program.
    pub fn build(program: &Program) -> Result<SymbolTable, Diagnostic> {
        let mut table = SymbolTable {
            instances: Vec::new(),
            ids: BTreeMap::new(),
            sorts: SortTable::minimal(),
            members: BTreeMap::new(),
            attrs: BTreeMap::new(),
            attr_decls: BTreeMap::new(),
        };

        for m in program.modules() {
            for decl in &m.sort_decls {
                for name in &decl.names {
                    table.sorts.insert(name, decl.parents.clone());
                    for attr in &decl.attributes {
                        table
                            .attr_decls
                            .entry(attr.name.clone())
                            .or_default()
                            .push((name.clone(), attr.arg_sorts.clone()));
                    }
                }
            }
        }

        for decl in &program.structure.instances {
            for name in &decl.names {
                let id = *table.ids.entry(name.clone()).or_insert_with(|| {
                    table.instances.push(name.clone());
                    table.instances.len() - 1
                });
                for ancestor in table.sorts.ancestors(&decl.sort) {
                    let members = table.members.entry(ancestor).or_default();
                    if !members.contains(&id) {
                        members.push(id);
                    }
                }
            }
        }
        for members in table.members.values_mut() {
            members.sort_unstable();
        }

        // Explicit attribute assignments.
        for decl in &program.structure.instances {
            for name in &decl.names {
                let owner = table.ids[name];
                for assignment in &decl.assignments {
                    let args: Vec<InstanceId> = assignment
                        .args
                        .iter()
                        .map(|a| table.ids[a])
                        .collect();
                    table
                        .attrs
                        .insert((assignment.attribute.clone(), owner, args), assignment.value);
                }
            }
        }

        table.derive_attributes(program)?;
        Ok(table)
    }

    /// Least fixpoint over attribute-headed state constraints.
    fn derive_attributes(&mut self, program: &Program) -> Result<(), Diagnostic> {
        let attr_constraints: Vec<&StateConstraint> = program
            .modules()
            .flat_map(|m| &m.axioms)
            .filter_map(|ax| match ax {
                Axiom::StateConstraint(sc) if self.attr_decls.contains_key(&sc.head.function) => {
                    Some(sc)
                }
                _ => None,
            })
            .collect();

        loop {
            let mut derived: Vec<AttrKey> = Vec::new();
            for sc in &attr_constraints {
                self.derive_from(sc, &mut derived);
            }
            let mut changed = false;
            for key in derived {
                match self.attrs.get(&key) {
                    Some(true) => {}
                    Some(false) => {
                        return Err(Diagnostic::error(format!(
                            "attribute {}({}) is assigned false but derived true",
                            key.0,
                            self.describe_owner_args(key.1, &key.2),
                        )));
                    }
                    None => {
                        self.attrs.insert(key, true);
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn describe_owner_args(&self, owner: InstanceId, args: &[InstanceId]) -> String {
        let mut parts = vec![self.name(owner).to_string()];
        parts.extend(args.iter().map(|&a| self.name(a).to_string()));
        parts.join(", ")
    }

    /// Enumerates the groundings of one attribute-headed constraint whose
    /// body holds, collecting the head keys.
    fn derive_from(&self, sc: &StateConstraint, out: &mut Vec<AttrKey>) {
        let mut vars: Vec<Ident> = Vec::new();
        let mut collect = |t: &Term| {
            if let Term::Var(v) = t {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        };
        for arg in &sc.head.args {
            collect(arg);
        }
        for cond in &sc.body {
            for term in crate::alm::ast::condition_terms(cond) {
                collect(term);
            }
        }

        let mut ranges: BTreeMap<Ident, Vec<InstanceId>> = vars
            .iter()
            .map(|v| (v.clone(), (0..self.instances.len()).collect()))
            .collect();
        self.narrow_by_attr(&sc.head, &mut ranges);
        for cond in &sc.body {
            match cond {
                Condition::Instance { term, sort } => {
                    narrow(&mut ranges, term, |id| self.is_member(id, sort));
                }
                Condition::Literal(l) if l.positive => {
                    self.narrow_by_attr(l, &mut ranges);
                }
                _ => {}
            }
        }

        let mut subst: BTreeMap<Ident, InstanceId> = BTreeMap::new();
        self.enumerate(sc, &vars, &ranges, &mut subst, out);
    }

    /// Narrows a literal's variable ranges by the declared argument sorts of
    /// its attribute (union over same-named declarations).
    fn narrow_by_attr(&self, literal: &Literal, ranges: &mut BTreeMap<Ident, Vec<InstanceId>>) {
        let Some(decls) = self.attr_decls.get(&literal.function) else {
            return;
        };
        for (pos, term) in literal.args.iter().enumerate() {
            narrow(ranges, term, |id| {
                decls.iter().any(|(owner, arg_sorts)| {
                    let sort = if pos == 0 {
                        Some(owner)
                    } else {
                        arg_sorts.get(pos - 1)
                    };
                    sort.is_some_and(|s| self.is_member(id, s))
                })
            });
        }
    }

    fn enumerate(
        &self,
        sc: &StateConstraint,
        vars: &[Ident],
        ranges: &BTreeMap<Ident, Vec<InstanceId>>,
        subst: &mut BTreeMap<Ident, InstanceId>,
        out: &mut Vec<AttrKey>,
    ) {
        let Some(var) = vars.first() else {
            if sc.body.iter().all(|c| self.condition_holds(c, subst)) {
                let owner = self.term_id(&sc.head.args[0], subst);
                let args = sc.head.args[1..]
                    .iter()
                    .map(|t| self.term_id(t, subst))
                    .collect();
                out.push((sc.head.function.clone(), owner, args));
            }
            return;
        };
        for &id in &ranges[var] {
            subst.insert(var.clone(), id);
            self.enumerate(sc, &vars[1..], ranges, subst, out);
        }
        subst.remove(var);
    }

    fn term_id(&self, term: &Term, subst: &BTreeMap<Ident, InstanceId>) -> InstanceId {
        match term {
            Term::Var(v) => subst[v],
            Term::Const(c) => self.ids[c],
        }
    }

    fn condition_holds(&self, cond: &Condition, subst: &BTreeMap<Ident, InstanceId>) -> bool {
        match cond {
            Condition::Instance { term, sort } => self.is_member(self.term_id(term, subst), sort),
            Condition::Equal(a, b) => self.term_id(a, subst) == self.term_id(b, subst),
            Condition::NotEqual(a, b) => self.term_id(a, subst) != self.term_id(b, subst),
            Condition::Literal(l) => {
                let owner = self.term_id(&l.args[0], subst);
                let args: Vec<InstanceId> =
                    l.args[1..].iter().map(|t| self.term_id(t, subst)).collect();
                self.attr_true(&l.function, owner, &args) == l.positive
            }
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn name(&self, id: InstanceId) -> &str {
        &self.instances[id]
    }

    pub fn id(&self, name: &str) -> Option<InstanceId> {
        self.ids.get(name).copied()
    }

    pub fn members(&self, sort: &str) -> &[InstanceId] {
        self.members.get(sort).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_member(&self, id: InstanceId, sort: &str) -> bool {
        self.members(sort).binary_search(&id).is_ok()
    }

    /// Instances that can occur: everything under the actions sort.
    pub fn events(&self) -> &[InstanceId] {
        self.members(sorts::ACTIONS)
    }

    /// Closed-world attribute lookup: unassigned means false.
    pub fn attr_true(&self, attr: &str, owner: InstanceId, args: &[InstanceId]) -> bool {
        self.attrs
            .get(&(attr.to_string(), owner, args.to_vec()))
            .copied()
            .unwrap_or(false)
    }

    pub fn is_attribute(&self, name: &str) -> bool {
        self.attr_decls.contains_key(name)
    }

    pub fn attr_decls(&self, name: &str) -> &[(Ident, Vec<Ident>)] {
        self.attr_decls.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sorts(&self) -> &SortTable {
        &self.sorts
    }
}
