//! Discourse representation structures: the fact format that records a
//! narrative's entities, typed events, event times, and role-labeled
//! arguments.
//!
//! ```text
//! entity(r1).
//! property(r1, "John").
//!
//! event(e1).
//! eventType(e1, "run-51.3.2-1").
//! eventTime(e1, 0).
//! eventArgument(e1, "Theme", r1).
//! ```

use crate::diag::{Diagnostic, Location};
use std::collections::BTreeSet;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Drs {
    /// Referents in declaration order.
    pub entities: Vec<DrsEntity>,
    /// Events in declaration order.
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrsEntity {
    pub id: String,
    /// Surface name from a property fact; kept verbatim (case preserved).
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub id: String,
    /// VerbNet class text, e.g. "run-51.3.2-1".
    pub class_id: String,
    pub time: u32,
    /// (thematic role, referent id) in declaration order.
    pub args: Vec<(String, String)>,
}

impl Drs {
    pub fn entity_name(&self, id: &str) -> Option<&str> {
        self.entities
            .iter()
            .find(|e| e.id == id)
            .and_then(|e| e.name.as_deref())
    }

    /// Every thematic role the referent plays across all events.
    pub fn roles_of(&self, referent: &str) -> BTreeSet<&str> {
        self.events
            .iter()
            .flat_map(|ev| ev.args.iter())
            .filter(|(_, r)| r == referent)
            .map(|(role, _)| role.as_str())
            .collect()
    }

    /// Distinct class ids in order of first appearance.
    pub fn classes(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for ev in &self.events {
            if seen.insert(ev.class_id.as_str()) {
                out.push(ev.class_id.as_str());
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Id(String),
    Nat(u32),
    Str(String),
}

struct Fact {
    name: String,
    args: Vec<Value>,
    loc: Location,
}

pub fn parse_drs(source: &str) -> Result<Drs, Diagnostic> {
    let facts = scan_facts(source)?;
    assemble(facts)
}

fn scan_facts(source: &str) -> Result<Vec<Fact>, Diagnostic> {
    let mut facts = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }
    macro_rules! skip_ws {
        () => {
            while matches!(chars.peek(), Some(' ' | '\t' | '\r' | '\n')) {
                bump!();
            }
        };
    }

    loop {
        skip_ws!();
        let Some(&c) = chars.peek() else { break };
        let loc = Location { line, col };
        if !c.is_ascii_alphabetic() {
            return Err(Diagnostic::error_at(
                loc,
                format!("expected a fact name, found `{c}`"),
            ));
        }
        let mut name = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                bump!();
            } else {
                break;
            }
        }
        skip_ws!();
        if chars.peek() != Some(&'(') {
            return Err(Diagnostic::error_at(
                Location { line, col },
                format!("expected `(` after `{name}`"),
            ));
        }
        bump!();
        let mut args = Vec::new();
        loop {
            skip_ws!();
            let arg_loc = Location { line, col };
            match chars.peek() {
                Some(&ch) if ch.is_ascii_alphabetic() || ch == '_' => {
                    let mut id = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            id.push(c);
                            bump!();
                        } else {
                            break;
                        }
                    }
                    args.push(Value::Id(id));
                }
                Some(&ch) if ch.is_ascii_digit() => {
                    let mut digits = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_ascii_digit() {
                            digits.push(c);
                            bump!();
                        } else {
                            break;
                        }
                    }
                    let n = digits.parse::<u32>().map_err(|_| {
                        Diagnostic::error_at(arg_loc, format!("number out of range: {digits}"))
                    })?;
                    args.push(Value::Nat(n));
                }
                Some('"') => {
                    bump!();
                    let mut s = String::new();
                    loop {
                        match bump!() {
                            Some('"') => break,
                            Some('\n') | None => {
                                return Err(Diagnostic::error_at(
                                    arg_loc,
                                    "unterminated string".to_string(),
                                ));
                            }
                            Some(c) => s.push(c),
                        }
                    }
                    args.push(Value::Str(s));
                }
                other => {
                    return Err(Diagnostic::error_at(
                        arg_loc,
                        format!(
                            "expected an argument, found {}",
                            other.map_or("end of input".to_string(), |c| format!("`{c}`"))
                        ),
                    ));
                }
            }
            skip_ws!();
            match chars.peek() {
                Some(',') => {
                    bump!();
                }
                Some(')') => {
                    bump!();
                    break;
                }
                other => {
                    return Err(Diagnostic::error_at(
                        Location { line, col },
                        format!(
                            "expected `,` or `)`, found {}",
                            other.map_or("end of input".to_string(), |c| format!("`{c}`"))
                        ),
                    ));
                }
            }
        }
        skip_ws!();
        if chars.peek() != Some(&'.') {
            return Err(Diagnostic::error_at(
                Location { line, col },
                format!("expected `.` after fact `{name}`"),
            ));
        }
        bump!();
        facts.push(Fact { name, args, loc });
    }
    Ok(facts)
}

fn assemble(facts: Vec<Fact>) -> Result<Drs, Diagnostic> {
    let mut drs = Drs::default();

    let err = |loc: Location, msg: String| Err(Diagnostic::error_at(loc, msg));

    // First pass: declarations, so facts may arrive in any order.
    for f in &facts {
        match f.name.as_str() {
            "entity" => {
                let [Value::Id(id)] = f.args.as_slice() else {
                    return err(f.loc, "entity takes one referent id".to_string());
                };
                if drs.entities.iter().any(|e| &e.id == id) {
                    return err(f.loc, format!("duplicate entity {id}"));
                }
                drs.entities.push(DrsEntity {
                    id: id.clone(),
                    name: None,
                });
            }
            "event" => {
                let [Value::Id(id)] = f.args.as_slice() else {
                    return err(f.loc, "event takes one event id".to_string());
                };
                if drs.events.iter().any(|e| &e.id == id) {
                    return err(f.loc, format!("duplicate event {id}"));
                }
                drs.events.push(EventRecord {
                    id: id.clone(),
                    class_id: String::new(),
                    time: u32::MAX,
                    args: Vec::new(),
                });
            }
            "property" | "eventType" | "eventTime" | "eventArgument" => {}
            other => return err(f.loc, format!("unknown fact name `{other}`")),
        }
    }

    // Second pass: attachments.
    for f in &facts {
        match f.name.as_str() {
            "entity" | "event" => {}
            "property" => {
                let [Value::Id(id), Value::Str(name)] = f.args.as_slice() else {
                    return err(f.loc, "property takes a referent id and a quoted name".to_string());
                };
                let Some(e) = drs.entities.iter_mut().find(|e| &e.id == id) else {
                    return err(f.loc, format!("property of undeclared referent {id}"));
                };
                if e.name.is_some() {
                    return err(f.loc, format!("duplicate property for {id}"));
                }
                e.name = Some(name.clone());
            }
            "eventType" => {
                let [Value::Id(id), Value::Str(class)] = f.args.as_slice() else {
                    return err(f.loc, "eventType takes an event id and a quoted class".to_string());
                };
                let Some(ev) = drs.events.iter_mut().find(|e| &e.id == id) else {
                    return err(f.loc, format!("eventType for undeclared event {id}"));
                };
                if !ev.class_id.is_empty() {
                    return err(f.loc, format!("duplicate eventType for {id}"));
                }
                ev.class_id = class.clone();
            }
            "eventTime" => {
                let [Value::Id(id), Value::Nat(t)] = f.args.as_slice() else {
                    return err(f.loc, "eventTime takes an event id and a number".to_string());
                };
                let Some(ev) = drs.events.iter_mut().find(|e| &e.id == id) else {
                    return err(f.loc, format!("eventTime for undeclared event {id}"));
                };
                if ev.time != u32::MAX {
                    return err(f.loc, format!("duplicate eventTime for {id}"));
                }
                ev.time = *t;
            }
            "eventArgument" => {
                let [Value::Id(id), Value::Str(role), Value::Id(referent)] = f.args.as_slice()
                else {
                    return err(
                        f.loc,
                        "eventArgument takes an event id, a quoted role, and a referent id"
                            .to_string(),
                    );
                };
                if !drs.entities.iter().any(|e| &e.id == referent) {
                    return err(f.loc, format!("undeclared referent {referent}"));
                }
                let Some(ev) = drs.events.iter_mut().find(|e| &e.id == id) else {
                    return err(f.loc, format!("eventArgument for undeclared event {id}"));
                };
                if ev.args.iter().any(|(r, _)| r == role) {
                    return err(f.loc, format!("duplicate role \"{role}\" for {id}"));
                }
                ev.args.push((role.clone(), referent.clone()));
            }
            _ => unreachable!("first pass rejected unknown facts"),
        }
    }

    // Completeness and the shared-time check.
    for f in &facts {
        if f.name != "event" {
            continue;
        }
        let Value::Id(id) = &f.args[0] else { unreachable!() };
        let ev = drs.events.iter().find(|e| &e.id == id).unwrap();
        if ev.class_id.is_empty() {
            return err(f.loc, format!("event {id} has no eventType"));
        }
        if ev.time == u32::MAX {
            return err(f.loc, format!("event {id} has no eventTime"));
        }
    }
    let mut seen_times = BTreeSet::new();
    for f in &facts {
        if f.name != "eventTime" {
            continue;
        }
        let Value::Nat(t) = &f.args[1] else { unreachable!() };
        if !seen_times.insert(*t) {
            return err(f.loc, format!("two events share time {t}"));
        }
    }

    Ok(drs)
}

// ---------------------------------------------------------------------------
// Serialization

pub fn serialize_drs(d: &Drs) -> String {
    let mut out = String::new();
    for e in &d.entities {
        let _ = writeln!(out, "entity({}).", e.id);
    }
    for e in &d.entities {
        if let Some(name) = &e.name {
            let _ = writeln!(out, "property({}, \"{}\").", e.id, name);
        }
    }
    for ev in &d.events {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "event({}).", ev.id);
        let _ = writeln!(out, "eventType({}, \"{}\").", ev.id, ev.class_id);
        let _ = writeln!(out, "eventTime({}, {}).", ev.id, ev.time);
        for (role, referent) in &ev.args {
            let _ = writeln!(out, "eventArgument({}, \"{role}\", {referent}).", ev.id);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Validation

pub fn validate_drs(d: &Drs) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut entity_ids = BTreeSet::new();
    for e in &d.entities {
        if !entity_ids.insert(e.id.as_str()) {
            diags.push(Diagnostic::error(format!("duplicate referent {}", e.id)));
        }
        if e.name.is_none() {
            diags.push(Diagnostic::error(format!("unnamed referent {}", e.id)));
        }
    }
    let mut event_ids = BTreeSet::new();
    for ev in &d.events {
        if !event_ids.insert(ev.id.as_str()) {
            diags.push(Diagnostic::error(format!("duplicate event {}", ev.id)));
        }
        if entity_ids.contains(ev.id.as_str()) {
            diags.push(Diagnostic::error(format!(
                "id {} used for both an entity and an event",
                ev.id
            )));
        }
        if ev.class_id.is_empty() {
            diags.push(Diagnostic::error(format!("event {} has no class", ev.id)));
        }
        let mut roles = BTreeSet::new();
        for (role, referent) in &ev.args {
            if !roles.insert(role.as_str()) {
                diags.push(Diagnostic::error(format!(
                    "duplicate role \"{role}\" for {}",
                    ev.id
                )));
            }
            if !entity_ids.contains(referent.as_str()) {
                diags.push(Diagnostic::error(format!("undeclared referent {referent}")));
            }
        }
    }

    // Times: distinct, aligned with declaration order, contiguous from 0.
    let times: Vec<u32> = d.events.iter().map(|e| e.time).collect();
    let mut seen = BTreeSet::new();
    for (ev, &t) in d.events.iter().zip(&times) {
        if !seen.insert(t) {
            diags.push(Diagnostic::error(format!(
                "two events share time {t} (second is {})",
                ev.id
            )));
        }
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        diags.push(Diagnostic::error("event times out of order"));
    } else if !times.is_empty() && (times[0] != 0 || times.windows(2).any(|w| w[1] != w[0] + 1)) {
        diags.push(Diagnostic::warning("non-contiguous event times"));
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::{has_errors, Severity};

    const TWO_TRAVELERS: &str = r#"
entity(r1).           entity(r2).               entity(r3).
property(r1, "John"). property(r2, "hallway").  property(r3, "Sandra").

event(e1).                             event(e2).
eventType(e1, "run-51.3.2-1").         eventType(e2, "run-51.3.2-1").
eventTime(e1, 0).                      eventTime(e2, 1).
eventArgument(e1, "Theme", r1).        eventArgument(e2, "Theme", r3).
eventArgument(e1, "Destination", r2).  eventArgument(e2, "Destination", r2).
"#;

    #[test]
    fn parses_interleaved_facts() {
        let d = parse_drs(TWO_TRAVELERS).unwrap();
        assert_eq!(d.entities.len(), 3);
        assert_eq!(d.entity_name("r1"), Some("John"));
        assert_eq!(d.entity_name("r2"), Some("hallway"));
        assert_eq!(d.entity_name("r3"), Some("Sandra"));
        assert_eq!(d.events.len(), 2);
        let e1 = &d.events[0];
        assert_eq!(e1.class_id, "run-51.3.2-1");
        assert_eq!(e1.time, 0);
        assert_eq!(
            e1.args,
            vec![
                ("Theme".to_string(), "r1".to_string()),
                ("Destination".to_string(), "r2".to_string()),
            ]
        );
        assert_eq!(d.events[1].time, 1);
        assert_eq!(validate_drs(&d), Vec::new());
    }

    #[test]
    fn empty_input_is_an_empty_drs() {
        let d = parse_drs("").unwrap();
        assert_eq!(d, Drs::default());
        assert_eq!(serialize_drs(&d), "");
    }

    #[test]
    fn undeclared_referent_is_rejected() {
        let src = r#"
entity(r1). property(r1, "John").
event(e1). eventType(e1, "run-51.3.2-1"). eventTime(e1, 0).
eventArgument(e1, "Theme", r9).
"#;
        let err = parse_drs(src).unwrap_err();
        assert!(err.message.contains("undeclared referent r9"));
    }

    #[test]
    fn duplicate_event_time_is_rejected() {
        let src = r#"
event(e1). eventType(e1, "run-51.3.2-1"). eventTime(e1, 0). eventTime(e1, 1).
"#;
        let err = parse_drs(src).unwrap_err();
        assert!(err.message.contains("duplicate eventTime for e1"));
    }

    #[test]
    fn shared_time_is_rejected() {
        let src = r#"
event(e1). eventType(e1, "run-51.3.2-1"). eventTime(e1, 0).
event(e2). eventType(e2, "run-51.3.2-1"). eventTime(e2, 0).
"#;
        let err = parse_drs(src).unwrap_err();
        assert!(err.message.contains("share time 0"));
    }

    #[test]
    fn unknown_fact_name_is_rejected() {
        let err = parse_drs("gadget(r1).").unwrap_err();
        assert!(err.message.contains("unknown fact name `gadget`"));
    }

    #[test]
    fn serialization_matches_the_fact_format() {
        let d = parse_drs(TWO_TRAVELERS).unwrap();
        let text = serialize_drs(&d);
        assert!(text.contains("eventType(e1, \"run-51.3.2-1\").\n"));
        assert!(text.contains("property(r1, \"John\").\n"));
        assert!(text.contains("eventArgument(e2, \"Destination\", r2).\n"));
        assert_eq!(parse_drs(&text).unwrap(), d);
    }

    #[test]
    fn validate_warns_on_time_gaps() {
        let mut d = parse_drs(TWO_TRAVELERS).unwrap();
        d.events[1].time = 2;
        let diags = validate_drs(&d);
        assert!(!has_errors(&diags));
        assert!(diags
            .iter()
            .any(|x| x.severity == Severity::Warning
                && x.message.contains("non-contiguous event times")));
    }

    #[test]
    fn validate_rejects_out_of_order_times() {
        let mut d = parse_drs(TWO_TRAVELERS).unwrap();
        d.events[0].time = 1;
        d.events[1].time = 0;
        let diags = validate_drs(&d);
        assert!(diags.iter().any(|x| x.message.contains("out of order")));
    }

    #[test]
    fn validate_flags_unnamed_referents() {
        let d = parse_drs("entity(r1).").unwrap();
        let diags = validate_drs(&d);
        assert!(diags.iter().any(|x| x.message.contains("unnamed referent r1")));
    }

    #[test]
    fn roles_aggregate_across_events() {
        let src = r#"
entity(r1). property(r1, "Mary").
entity(r2). property(r2, "football").
event(e1). eventType(e1, "get-13.5.1"). eventTime(e1, 0).
eventArgument(e1, "Agent", r1). eventArgument(e1, "Theme", r2).
event(e2). eventType(e2, "run-51.3.2-1"). eventTime(e2, 1).
eventArgument(e2, "Theme", r1).
"#;
        let d = parse_drs(src).unwrap();
        let roles = d.roles_of("r1");
        assert!(roles.contains("Agent") && roles.contains("Theme"));
        assert_eq!(d.classes(), vec!["get-13.5.1", "run-51.3.2-1"]);
    }
}
