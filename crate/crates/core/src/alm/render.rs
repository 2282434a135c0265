//! Pretty-printer for system descriptions. Output re-parses to an equal
//! program; token streams survive a parse/render round trip.

use super::ast::*;
use std::fmt::Write;

pub fn render_program(p: &Program) -> String {
    let mut out = String::new();
    let w = &mut out;
    wln(w, 0, &format!("system description {}", p.name));
    render_theory(w, &p.theory);
    render_structure(w, &p.structure);
    if p.temporal_projection {
        wln(w, 1, "temporal projection");
    }
    if let Some(n) = p.max_steps {
        wln(w, 1, &format!("max steps {n}"));
    }
    if !p.history.is_empty() {
        wln(w, 1, "history");
        for occ in &p.history {
            wln(w, 2, &format!("happened({}, {}).", occ.event, occ.time));
        }
    }
    out
}

fn render_theory(w: &mut String, t: &Theory) {
    wln(w, 1, &format!("theory {}", t.name));
    for import in &t.imports {
        wln(
            w,
            2,
            &format!("import {} from {}", import.path, import.library),
        );
    }
    for m in &t.modules {
        render_module(w, m);
    }
}

fn render_module(w: &mut String, m: &ModuleDecl) {
    wln(w, 2, &format!("module {}", m.name));
    if !m.depends_on.is_empty() {
        let paths: Vec<String> = m.depends_on.iter().map(|p| p.to_string()).collect();
        wln(w, 3, &format!("depends on {}", paths.join(", ")));
    }
    if !m.sort_decls.is_empty() {
        wln(w, 3, "sort declarations");
        for sd in &m.sort_decls {
            wln(
                w,
                4,
                &format!("{} :: {}", sd.names.join(", "), sd.parents.join(", ")),
            );
            if !sd.attributes.is_empty() {
                wln(w, 5, "attributes");
                for a in &sd.attributes {
                    wln(w, 6, &typed_decl(&a.name, &a.arg_sorts));
                }
            }
        }
    }
    if !m.fluent_decls.is_empty() {
        wln(w, 3, "function declarations");
        wln(w, 4, "fluents");
        wln(w, 5, "basic");
        for fd in &m.fluent_decls {
            wln(w, 6, &typed_decl(&fd.name, &fd.arg_sorts));
        }
    }
    if !m.axioms.is_empty() {
        wln(w, 3, "axioms");
        let dcls: Vec<_> = m
            .axioms
            .iter()
            .filter_map(|a| match a {
                Axiom::DynamicCausal(law) => Some(law),
                _ => None,
            })
            .collect();
        let scs: Vec<_> = m
            .axioms
            .iter()
            .filter_map(|a| match a {
                Axiom::StateConstraint(sc) => Some(sc),
                _ => None,
            })
            .collect();
        let execs: Vec<_> = m
            .axioms
            .iter()
            .filter_map(|a| match a {
                Axiom::Executability(ex) => Some(ex),
                _ => None,
            })
            .collect();
        if !dcls.is_empty() {
            wln(w, 4, "dynamic causal laws");
            for law in dcls {
                wln(
                    w,
                    5,
                    &format!(
                        "occurs({}) causes {} if {}.",
                        law.action_var,
                        literal(&law.head),
                        conditions(&law.body)
                    ),
                );
            }
        }
        if !scs.is_empty() {
            wln(w, 4, "state constraints");
            for sc in scs {
                wln(
                    w,
                    5,
                    &format!("{} if {}.", literal(&sc.head), conditions(&sc.body)),
                );
            }
        }
        if !execs.is_empty() {
            wln(w, 4, "executability conditions");
            for ex in execs {
                wln(
                    w,
                    5,
                    &format!(
                        "impossible occurs({}) if {}.",
                        ex.action_var,
                        conditions(&ex.body)
                    ),
                );
            }
        }
    }
}

fn render_structure(w: &mut String, s: &Structure) {
    wln(w, 1, &format!("structure {}", s.name));
    wln(w, 2, "instances");
    for inst in &s.instances {
        wln(w, 3, &format!("{} in {}", inst.names.join(", "), inst.sort));
        for a in &inst.assignments {
            wln(
                w,
                4,
                &format!(
                    "{}({}) = {}",
                    a.attribute,
                    a.args.join(","),
                    if a.value { "true" } else { "false" }
                ),
            );
        }
    }
}

fn typed_decl(name: &str, arg_sorts: &[Ident]) -> String {
    format!("{name} : {} -> booleans", arg_sorts.join(" * "))
}

fn literal(lit: &Literal) -> String {
    let args: Vec<&str> = lit.args.iter().map(Term::name).collect();
    format!(
        "{}{}({})",
        if lit.positive { "" } else { "-" },
        lit.function,
        args.join(",")
    )
}

fn conditions(conds: &[Condition]) -> String {
    let parts: Vec<String> = conds
        .iter()
        .map(|c| match c {
            Condition::Literal(lit) => literal(lit),
            Condition::Instance { term, sort } => {
                format!("instance({},{})", term.name(), sort)
            }
            Condition::Equal(a, b) => format!("{} = {}", a.name(), b.name()),
            Condition::NotEqual(a, b) => format!("{} != {}", a.name(), b.name()),
        })
        .collect();
    parts.join(", ")
}

fn wln(w: &mut String, indent: usize, text: &str) {
    let _ = writeln!(w, "{:indent$}{text}", "", indent = indent * 2);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::parser::parse_program;

    #[test]
    fn render_parse_round_trip() {
        let src = "
system description demo
  theory demo_theory
    import t_motion.m_move from core
    module demo
      depends on t_motion.m_move
      sort declarations
        agents :: universe
        sprint :: move
          attributes
            actor : agents -> booleans
      function declarations
        fluents
          basic
            rested : agents -> booleans
      axioms
        dynamic causal laws
          occurs(X) causes -rested(A) if instance(X,sprint), actor(X,A).
        state constraints
          -rested(A) if tired(A), instance(A,agents).
        executability conditions
          impossible occurs(X) if instance(X,sprint), actor(X,A), -rested(A).
  structure demo_structure
    instances
      bob, alice in agents
      s1 in sprint
        actor(bob) = true
        actor(alice) = false
  temporal projection
  max steps 3
  history
    happened(s1, 0).
    happened(s1, 1).
";
        let parsed = parse_program(src).unwrap();
        let rendered = render_program(&parsed);
        let reparsed = parse_program(&rendered).unwrap();
        assert_eq!(parsed, reparsed);
    }
}
