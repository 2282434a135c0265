//! Resolved sort hierarchy shared by validation, the knowledge library, and
//! grounding.

use super::ast::Ident;
use std::collections::{BTreeMap, BTreeSet};

/// Sort name to declared parents. `universe` is the root; `actions` is the
/// predefined root of all action sorts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortTable {
    parents: BTreeMap<Ident, Vec<Ident>>,
}

pub const UNIVERSE: &str = "universe";
pub const ACTIONS: &str = "actions";

impl SortTable {
    /// Just the predefined sorts: `universe` and `actions`.
    pub fn minimal() -> Self {
        let mut t = SortTable::default();
        t.parents.insert(UNIVERSE.to_string(), Vec::new());
        t.parents.insert(ACTIONS.to_string(), vec![UNIVERSE.to_string()]);
        t
    }

    /// Records a sort. Returns false when the name was already present (the
    /// existing entry is kept).
    pub fn insert(&mut self, name: impl Into<Ident>, parents: Vec<Ident>) -> bool {
        use std::collections::btree_map::Entry;
        match self.parents.entry(name.into()) {
            Entry::Occupied(_) => false,
            Entry::Vacant(v) => {
                v.insert(parents);
                true
            }
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parents.contains_key(name)
    }

    pub fn parents(&self, name: &str) -> &[Ident] {
        self.parents.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Ident> {
        self.parents.keys()
    }

    /// Reflexive-transitive ancestor set; cycle-safe.
    pub fn ancestors(&self, name: &str) -> BTreeSet<Ident> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![name.to_string()];
        while let Some(s) = stack.pop() {
            if seen.insert(s.clone()) {
                for p in self.parents(&s) {
                    stack.push(p.clone());
                }
            }
        }
        seen
    }

    /// True when `sort` equals `ancestor` or lies below it.
    pub fn descends_from(&self, sort: &str, ancestor: &str) -> bool {
        self.ancestors(sort).contains(ancestor)
    }

    /// Names of sorts participating in a parent cycle, if any.
    pub fn cycle_members(&self) -> Vec<Ident> {
        let mut cyclic = Vec::new();
        for name in self.parents.keys() {
            // A sort is cyclic when it is reachable from one of its parents.
            let above_parents: BTreeSet<Ident> = self
                .parents(name)
                .iter()
                .flat_map(|p| self.ancestors(p))
                .collect();
            if above_parents.contains(name) {
                cyclic.push(name.clone());
            }
        }
        cyclic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancestors_are_reflexive_and_transitive() {
        let mut t = SortTable::minimal();
        t.insert("entity", vec![UNIVERSE.to_string()]);
        t.insert("spatial_entity", vec!["entity".to_string()]);
        t.insert("place", vec!["spatial_entity".to_string()]);
        assert!(t.descends_from("place", "place"));
        assert!(t.descends_from("place", "entity"));
        assert!(t.descends_from("place", UNIVERSE));
        assert!(!t.descends_from("entity", "place"));
    }

    #[test]
    fn detects_cycles() {
        let mut t = SortTable::minimal();
        t.insert("a", vec!["b".to_string()]);
        t.insert("b", vec!["a".to_string()]);
        let cyclic = t.cycle_members();
        assert_eq!(cyclic, vec!["a".to_string(), "b".to_string()]);
        // Cycle-safe traversal still terminates.
        assert!(t.descends_from("a", "b"));
    }

    #[test]
    fn duplicate_insert_is_rejected() {
        let mut t = SortTable::minimal();
        assert!(t.insert("entity", vec![UNIVERSE.to_string()]));
        assert!(!t.insert("entity", vec![ACTIONS.to_string()]));
        assert_eq!(t.parents("entity"), [UNIVERSE.to_string()]);
    }
}
