//! Program generation: translate a discourse representation into a system
//! description against the knowledge library.
//!
//! Every referent becomes its own sort (named after its surface form) under
//! the strongest parent its thematic roles justify, plus an instance of that
//! sort. Every event becomes an instance of its verb class with one
//! attribute assignment per role. The history replays the events in time
//! order.

use crate::alm::{
    AttributeAssignment, Import, InstanceDecl, ModuleDecl, Occurrence, Program, SortDecl,
    Structure, Theory,
};
use crate::diag::Diagnostic;
use crate::drs::Drs;
use crate::library::{normalize_role, Library, RoleSortTable};
use std::collections::{BTreeMap, BTreeSet};

pub fn generate_program(
    drs: &Drs,
    name: &str,
    library: &Library,
    roles: &RoleSortTable,
) -> Result<Program, Diagnostic> {
    // One wrapper module per distinct verb class, in first-appearance order.
    let mut imports = Vec::new();
    let mut depends_on = Vec::new();
    let mut class_sorts: BTreeMap<String, String> = BTreeMap::new();
    for class in drs.classes() {
        let Some(wrapper) = library.class_module(class) else {
            return Err(Diagnostic::error(format!(
                "the library provides no module for class {class}"
            )));
        };
        imports.push(Import {
            path: wrapper.path.clone(),
            library: wrapper.library.to_string(),
        });
        depends_on.push(wrapper.path.clone());
        class_sorts.insert(class.to_string(), wrapper.sort.to_string());
    }

    // Sort names must not collide with the library or with each other.
    let mut used: BTreeSet<String> = library.sorts().sorts().cloned().collect();
    for entity in &drs.entities {
        used.insert(entity.id.clone());
    }
    for event in &drs.events {
        used.insert(event.id.clone());
    }

    let mut sort_decls = Vec::new();
    let mut instances = Vec::new();
    for entity in &drs.entities {
        let Some(surface) = entity.name.as_deref() else {
            return Err(Diagnostic::error(format!(
                "unnamed referent {} cannot be translated",
                entity.id
            )));
        };
        let sort = fresh_sort_name(surface, &mut used)?;
        let parent = roles.parent_sort_for_roles(drs.roles_of(&entity.id));
        sort_decls.push(SortDecl {
            names: vec![sort.clone()],
            parents: vec![parent.to_string()],
            attributes: Vec::new(),
        });
        instances.push(InstanceDecl {
            names: vec![entity.id.clone()],
            sort,
            assignments: Vec::new(),
        });
    }

    let mut timed: Vec<(&str, u32)> = Vec::new();
    for event in &drs.events {
        let wrapper = library
            .class_module(&event.class_id)
            .expect("classes were resolved above");
        let mut assignments = Vec::new();
        for (role, referent) in &event.args {
            let attribute = format!("vn_{}", normalize_role(role));
            let declared = wrapper
                .module
                .sort_decls
                .iter()
                .flat_map(|d| &d.attributes)
                .any(|a| a.name == attribute);
            if !declared {
                return Err(Diagnostic::error(format!(
                    "module {} has no attribute for role {role}",
                    wrapper.path
                )));
            }
            assignments.push(AttributeAssignment {
                attribute,
                args: vec![referent.clone()],
                value: true,
            });
        }
        instances.push(InstanceDecl {
            names: vec![event.id.clone()],
            sort: class_sorts[event.class_id.as_str()].clone(),
            assignments,
        });
        timed.push((&event.id, event.time));
    }

    // Replay in time order, compacted to consecutive steps from zero.
    timed.sort_by_key(|&(_, t)| t);
    let history: Vec<Occurrence> = timed
        .iter()
        .enumerate()
        .map(|(step, &(event, _))| Occurrence {
            event: event.to_string(),
            time: step as u32,
        })
        .collect();

    Ok(Program {
        name: name.to_string(),
        theory: Theory {
            name: format!("{name}_theory"),
            imports,
            modules: vec![ModuleDecl {
                name: name.to_string(),
                depends_on,
                sort_decls,
                fluent_decls: Vec::new(),
                axioms: Vec::new(),
            }],
        },
        structure: Structure {
            name: format!("{name}_structure"),
            instances,
        },
        temporal_projection: true,
        max_steps: Some(drs.events.len() as u32 + 1),
        history,
    })
}

/// Derives a sort name from a surface form: lowercased, spaces to
/// underscores, everything else outside [a-z0-9_] dropped, then made unique
/// against `used` with a numeric suffix.
fn fresh_sort_name(surface: &str, used: &mut BTreeSet<String>) -> Result<String, Diagnostic> {
    let mut base = String::new();
    for c in surface.chars() {
        let c = if c == ' ' { '_' } else { c.to_ascii_lowercase() };
        if c.is_ascii_lowercase() || c == '_' || (c.is_ascii_digit() && !base.is_empty()) {
            base.push(c);
        }
    }
    let base = base.trim_matches('_').to_string();
    if base.is_empty() || !base.starts_with(|c: char| c.is_ascii_lowercase()) {
        return Err(Diagnostic::error(format!(
            "cannot derive a sort name from \"{surface}\""
        )));
    }
    let name = if used.contains(&base) {
        (2..)
            .map(|i| format!("{base}{i}"))
            .find(|candidate| !used.contains(candidate))
            .unwrap()
    } else {
        base
    };
    used.insert(name.clone());
    Ok(name)
}
