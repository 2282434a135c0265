//! Temporal projection: compute the trajectory of states a ground program
//! describes, one state per time step.
//!
//! States are three-valued: a fluent literal is in the state, its complement
//! is, or neither is and the fluent is unknown. Each transition first
//! collects the direct effects of the events occurring at that step, closes
//! them under the state constraints, and only then carries over literals
//! from the previous state whose complement was not derived. Closing before
//! carrying is what lets a derived -loc_in(e, p1) displace a stale
//! loc_in(e, p1) instead of clashing with it.

use super::ground::{GroundExec, GroundProgram, GroundRule, Lit};
use crate::alm::Occurrence;
use crate::diag::Diagnostic;
use crate::semantics::InstanceId;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionErrorKind {
    /// The history or directives are malformed.
    Input,
    /// The program admits no consistent trajectory.
    Inconsistent,
}

#[derive(Debug, Clone)]
pub struct ProjectionError {
    pub kind: ProjectionErrorKind,
    pub message: String,
}

impl ProjectionError {
    fn input(message: impl Into<String>) -> Self {
        ProjectionError {
            kind: ProjectionErrorKind::Input,
            message: message.into(),
        }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        ProjectionError {
            kind: ProjectionErrorKind::Inconsistent,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ProjectionError {}

/// The set of fluent literals known to hold at one time step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub time: u32,
    lits: BTreeSet<Lit>,
}

impl State {
    pub fn holds(&self, lit: Lit) -> bool {
        self.lits.contains(&lit)
    }

    pub fn literals(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied()
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// One state per time step, `states[t].time == t`.
    pub states: Vec<State>,
    /// The occurrences that were projected, sorted by time.
    pub occurrences: Vec<Occurrence<InstanceId>>,
    /// Executability warnings gathered in permissive mode.
    pub diagnostics: Vec<Diagnostic>,
}

/// Closes `base` under the state constraints: whenever a rule's body holds,
/// its head is added, until nothing changes. Returns the first literal whose
/// complement was also derived, as the error.
pub fn closure(base: BTreeSet<Lit>, constraints: &[GroundRule]) -> Result<BTreeSet<Lit>, Lit> {
    let mut state = base;
    loop {
        let mut added = false;
        for rule in constraints {
            if state.contains(&rule.head) {
                continue;
            }
            if rule.body.iter().all(|l| state.contains(l)) {
                if state.contains(&rule.head.complement()) {
                    return Err(rule.head);
                }
                state.insert(rule.head);
                added = true;
            }
        }
        if !added {
            return Ok(state);
        }
    }
}

pub fn project(
    gp: &GroundProgram,
    history: &[Occurrence<InstanceId>],
    max_steps: u32,
    strict_exec: bool,
) -> Result<Trajectory, ProjectionError> {
    if max_steps == 0 {
        return Err(ProjectionError::input("max steps must be positive"));
    }
    let mut occurrences: Vec<Occurrence<InstanceId>> = history.to_vec();
    occurrences.sort_by_key(|o| o.time);
    for occ in &occurrences {
        if occ.time + 1 >= max_steps {
            return Err(ProjectionError::input(format!(
                "event {} occurs at time {}, but its effects fall outside the \
                 trajectory; raise max steps to at least {}",
                gp.symbols.name(occ.event),
                occ.time,
                occ.time + 2,
            )));
        }
    }

    let mut diagnostics = Vec::new();
    let initial = closure(BTreeSet::new(), &gp.constraints).map_err(|lit| {
        ProjectionError::inconsistent(format!(
            "state constraints contradict each other on {} in the initial state",
            gp.lit_text(lit)
        ))
    })?;
    let mut states = vec![State {
        time: 0,
        lits: initial,
    }];

    for t in 0..max_steps - 1 {
        let current = &states[t as usize];
        let events: BTreeSet<InstanceId> = occurrences
            .iter()
            .filter(|o| o.time == t)
            .map(|o| o.event)
            .collect();

        for &event in &events {
            for exec in gp.execs.iter().filter(|e| e.event == event) {
                if exec.body.iter().all(|&l| current.holds(l)) {
                    let message = impossible_message(gp, exec, t);
                    if strict_exec {
                        return Err(ProjectionError::inconsistent(message));
                    }
                    diagnostics.push(Diagnostic::warning(message));
                }
            }
        }

        // Direct effects of the events at t.
        let mut caused: BTreeSet<Lit> = BTreeSet::new();
        for law in gp.causal.iter().filter(|law| events.contains(&law.event)) {
            if law.body.iter().all(|&l| current.holds(l)) {
                if caused.contains(&law.head.complement()) {
                    return Err(ProjectionError::inconsistent(format!(
                        "events at time {t} directly cause both {} and {}",
                        gp.lit_text(law.head.complement()),
                        gp.lit_text(law.head),
                    )));
                }
                caused.insert(law.head);
            }
        }

        let derived = closure(caused, &gp.constraints).map_err(|lit| {
            ProjectionError::inconsistent(format!(
                "state constraints contradict the effects at time {} on {}",
                t + 1,
                gp.lit_text(lit)
            ))
        })?;

        // Inertia: keep what the new effects did not overrule.
        let mut next = derived.clone();
        for lit in current.literals() {
            if !derived.contains(&lit.complement()) {
                next.insert(lit);
            }
        }
        let next = closure(next, &gp.constraints).map_err(|lit| {
            ProjectionError::inconsistent(format!(
                "carrying inertia into time {} contradicts {}",
                t + 1,
                gp.lit_text(lit)
            ))
        })?;

        states.push(State {
            time: t + 1,
            lits: next,
        });
    }

    Ok(Trajectory {
        states,
        occurrences,
        diagnostics,
    })
}

impl GroundProgram {
    /// Projects the program's own history over its declared step count.
    pub fn project(&self, strict_exec: bool) -> Result<Trajectory, ProjectionError> {
        let Some(max_steps) = self.max_steps else {
            return Err(ProjectionError::input(
                "the program declares no max steps directive",
            ));
        };
        project(self, &self.history, max_steps, strict_exec)
    }
}

fn impossible_message(gp: &GroundProgram, exec: &GroundExec, time: u32) -> String {
    let conds: Vec<String> = exec.body.iter().map(|&l| gp.lit_text(l)).collect();
    format!(
        "event {} is impossible at time {}: {} (module {})",
        gp.symbols.name(exec.event),
        time,
        conds.join(", "),
        exec.module,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::parse_program;
    use crate::library::builtin_library;
    use crate::semantics::ground::ground;

    /// A self-contained travel domain in the style of a hand-written
    /// program: two agents, one destination, no state constraints.
    const TRAVELERS: &str = "
system description travelers
  theory travelers_theory
    module travelers
      sort declarations
        agents, points :: universe
        jump :: actions
          attributes
            actor : agents -> booleans
            destination : points -> booleans
      function declarations
        fluents
          basic
            loc_in : agents * points -> booleans
      axioms
        dynamic causal laws
          occurs(X) causes loc_in(A, D) if instance(X, jump), actor(X, A), destination(X, D).
        executability conditions
          impossible occurs(X) if instance(X, jump), actor(X, A), destination(X, D), loc_in(A, D).
  structure travelers_structure
    instances
      jn, sa in agents
      hw in points
      ajin in jump
        actor(jn) = true
        destination(hw) = true
      asin in jump
        actor(sa) = true
        destination(hw) = true
  temporal projection
  max steps 3
  history
    happened(ajin, 0).
    happened(asin, 1).
";

    fn travelers() -> GroundProgram {
        ground(&parse_program(TRAVELERS).unwrap()).unwrap()
    }

    fn positive_texts(gp: &GroundProgram, t: &Trajectory) -> Vec<String> {
        let mut out = Vec::new();
        for state in &t.states {
            for lit in state.literals().filter(|l| l.positive) {
                out.push(format!("{}@{}", gp.atom_text(lit.atom), state.time));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn effects_appear_one_step_later_and_persist() {
        let gp = travelers();
        let t = gp.project(false).unwrap();
        assert_eq!(t.states.len(), 3);
        assert_eq!(
            positive_texts(&gp, &t),
            vec![
                "loc_in(jn,hw)@1",
                "loc_in(jn,hw)@2",
                "loc_in(sa,hw)@2",
            ]
        );
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn initial_state_is_empty_without_defaults() {
        let gp = travelers();
        let t = gp.project(false).unwrap();
        assert_eq!(t.states[0].literals().count(), 0);
    }

    #[test]
    fn empty_history_changes_nothing() {
        let gp = travelers();
        let t = project(&gp, &[], 3, false).unwrap();
        for state in &t.states {
            assert_eq!(state.literals().count(), 0);
        }
    }

    #[test]
    fn occurrence_at_the_last_state_is_rejected() {
        let gp = travelers();
        let err = project(&gp, &gp.history, 2, false).unwrap_err();
        assert_eq!(err.kind, ProjectionErrorKind::Input);
        assert!(err.message.contains("asin"), "{}", err.message);
    }

    #[test]
    fn violated_executability_warns_or_errors() {
        let gp = travelers();
        // Jumping to the hallway twice: the second jump starts there.
        let jn_jump = gp.symbols.id("ajin").unwrap();
        let history = vec![
            Occurrence { event: jn_jump, time: 0 },
            Occurrence { event: jn_jump, time: 1 },
        ];
        let t = project(&gp, &history, 3, false).unwrap();
        assert_eq!(t.diagnostics.len(), 1);
        assert!(t.diagnostics[0].message.contains("ajin"));
        assert!(t.diagnostics[0].message.contains("time 1"));

        let err = project(&gp, &history, 3, true).unwrap_err();
        assert_eq!(err.kind, ProjectionErrorKind::Inconsistent);
    }

    /// Relocation through the functional-location constraint: moving
    /// somewhere new retracts the old location instead of clashing with it.
    #[test]
    fn derived_negation_displaces_a_carried_literal() {
        let source = "
system description wanderer
  theory wanderer_theory
    import t_run_51_3_2.m_run_51_3_2_1 from VN_class_library
    module wanderer
      depends on t_run_51_3_2.m_run_51_3_2_1
      sorts declarations
        mary :: living_entity
        kitchen :: spatial_entity
        garden :: spatial_entity
  structure wanderer_structure
    instances
      r1 in mary
      r2 in kitchen
      r3 in garden
      e1 in run_51_3_2_1
        vn_theme(r1) = true
        vn_destination(r2) = true
      e2 in run_51_3_2_1
        vn_theme(r1) = true
        vn_destination(r3) = true
  temporal projection
  max steps 3
  history
    happened(e1, 0).
    happened(e2, 1).
";
        let program = parse_program(source).unwrap();
        let flat = builtin_library().resolve_imports(&program).unwrap();
        let gp = ground(&flat).unwrap();
        let t = gp.project(false).unwrap();
        let texts = positive_texts(&gp, &t);
        assert!(texts.contains(&"loc_in(r1,r2)@1".to_string()));
        assert!(texts.contains(&"loc_in(r1,r3)@2".to_string()));
        assert!(!texts.contains(&"loc_in(r1,r2)@2".to_string()));
        // The displaced location is known false afterwards, not unknown.
        let r1 = gp.symbols.id("r1").unwrap();
        let r2 = gp.symbols.id("r2").unwrap();
        let atom = gp.atom_id("loc_in", &[r1, r2]).unwrap();
        assert!(t.states[2].holds(Lit { atom, positive: false }));
    }

    #[test]
    fn conflicting_direct_effects_are_an_error() {
        let source = "
system description tug
  theory tug_theory
    module tug
      sort declarations
        coin :: universe
        flip :: actions
          attributes
            subject : coin -> booleans
        fix :: actions
          attributes
            subject : coin -> booleans
      function declarations
        fluents
          basic
            up : coin -> booleans
      axioms
        dynamic causal laws
          occurs(X) causes up(C) if instance(X, flip), subject(X, C).
          occurs(X) causes -up(C) if instance(X, fix), subject(X, C).
  structure tug_structure
    instances
      c in coin
      a1 in flip
        subject(c) = true
      a2 in fix
        subject(c) = true
  temporal projection
  max steps 2
  history
    happened(a1, 0).
    happened(a2, 0).
";
        let gp = ground(&parse_program(source).unwrap()).unwrap();
        let err = gp.project(false).unwrap_err();
        assert_eq!(err.kind, ProjectionErrorKind::Inconsistent);
        assert!(err.message.contains("up(c)"), "{}", err.message);
    }

    #[test]
    fn closure_adds_heads_and_reports_conflicts() {
        let gp = travelers();
        let jn = gp.symbols.id("jn").unwrap();
        let sa = gp.symbols.id("sa").unwrap();
        let hw = gp.symbols.id("hw").unwrap();
        let a = gp.atom_id("loc_in", &[jn, hw]).unwrap();
        let b = gp.atom_id("loc_in", &[sa, hw]).unwrap();
        let rules = vec![GroundRule {
            head: Lit::positive(b),
            body: vec![Lit::positive(a)],
        }];

        let out = closure(BTreeSet::from([Lit::positive(a)]), &rules).unwrap();
        assert!(out.contains(&Lit::positive(b)));

        let conflict = closure(
            BTreeSet::from([Lit::positive(a), Lit::positive(b).complement()]),
            &rules,
        )
        .unwrap_err();
        assert_eq!(conflict, Lit::positive(b));
    }
}
