//! Models: the positive answer set of a trajectory, rendered with surface
//! names and queryable by pattern.

use super::ground::GroundProgram;
use super::project::Trajectory;
use crate::diag::Diagnostic;
use std::collections::BTreeMap;

/// A time-stamped positive fluent atom over surface names, e.g.
/// loc_in(John, hallway, 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelAtom {
    pub fluent: String,
    pub args: Vec<String>,
    pub time: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    /// The narrative's occurrences, by surface event name.
    pub happened: Vec<(String, u32)>,
    /// Every positive fluent atom of every state, sorted by
    /// (fluent, args, time).
    pub atoms: Vec<ModelAtom>,
}

/// Maps a trajectory back to surface names. `names` must cover every
/// instance that appears in a positive atom; event names fall through
/// unchanged when unmapped.
pub fn extract_model(
    gp: &GroundProgram,
    trajectory: &Trajectory,
    names: &BTreeMap<String, String>,
) -> Result<Model, Diagnostic> {
    let mut happened: Vec<(String, u32)> = trajectory
        .occurrences
        .iter()
        .map(|occ| {
            let id = gp.symbols.name(occ.event);
            let name = names.get(id).map(String::as_str).unwrap_or(id);
            (name.to_string(), occ.time)
        })
        .collect();
    happened.sort();
    happened.dedup();
    happened.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

    let mut atoms = Vec::new();
    for state in &trajectory.states {
        for lit in state.literals().filter(|l| l.positive) {
            let atom = &gp.atoms[lit.atom as usize];
            let mut args = Vec::with_capacity(atom.args.len());
            for &id in &atom.args {
                let internal = gp.symbols.name(id);
                let Some(name) = names.get(internal) else {
                    return Err(Diagnostic::error(format!(
                        "unnamed referent {internal} appears in the trajectory"
                    )));
                };
                args.push(name.clone());
            }
            atoms.push(ModelAtom {
                fluent: atom.fluent.clone(),
                args,
                time: state.time,
            });
        }
    }
    atoms.sort();
    atoms.dedup();
    Ok(Model { happened, atoms })
}

/// Renders a model in fact form: happened lines first, then atoms.
pub fn render_model(model: &Model) -> String {
    let mut out = String::new();
    for (event, time) in &model.happened {
        out.push_str(&format!("happened({event},{time}).\n"));
    }
    for atom in &model.atoms {
        out.push_str(&format!(
            "{}({},{}).\n",
            atom.fluent,
            atom.args.join(","),
            atom.time
        ));
    }
    out
}

/// A query against a model: fixed fluent, each argument either a required
/// name (matched case-insensitively) or a wildcard, and an optional time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPattern {
    pub fluent: String,
    pub args: Vec<Option<String>>,
    pub time: Option<u32>,
}

impl AtomPattern {
    pub fn matches(&self, atom: &ModelAtom) -> bool {
        if atom.fluent != self.fluent || atom.args.len() != self.args.len() {
            return false;
        }
        if self.time.is_some_and(|t| t != atom.time) {
            return false;
        }
        self.args.iter().zip(&atom.args).all(|(want, got)| {
            want.as_ref()
                .is_none_or(|w| w.eq_ignore_ascii_case(got))
        })
    }
}

/// Returns the matching atoms in model order.
pub fn query<'m>(model: &'m Model, pattern: &AtomPattern) -> Vec<&'m ModelAtom> {
    model.atoms.iter().filter(|a| pattern.matches(a)).collect()
}

/// True when the model holds `fluent(args, time)` for some matching atom.
pub fn holds_at(model: &Model, pattern: &AtomPattern) -> bool {
    model.atoms.iter().any(|a| pattern.matches(a))
}
