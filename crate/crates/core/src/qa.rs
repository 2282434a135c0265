//! Question answering over a model: classify the question's shape, then
//! read the answer off the trajectory (for locations, possession counts, and
//! yes/no containment) or off the transfer events (for who-gave-what).

use crate::diag::Diagnostic;
use crate::drs::Drs;
use crate::library::{normalize_class_id, Library, TransferClass};
use crate::semantics::{query, AtomPattern, Model};
use regex::Regex;
use std::sync::LazyLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionKind {
    /// "Where is X?" for a person or a carried object.
    WhereIs(String),
    /// "Where was O before P?"
    WhereBefore { thing: String, place: String },
    /// "Who gave O?" / "Who gave O to R?"
    WhoGave {
        object: String,
        recipient: Option<String>,
    },
    /// "Who received O?" / "Who received O from G?"
    WhoReceived {
        object: String,
        giver: Option<String>,
    },
    /// "What did G give?" / "What did G give to R?"
    WhatDidGive {
        giver: String,
        recipient: Option<String>,
    },
    /// "Who did G give O to?"
    WhoDidGiveTo { giver: String, object: String },
    /// "Is X in P?"
    IsIn { subject: String, place: String },
    /// "How many objects is X carrying?"
    HowManyCarrying(String),
    /// "What is X carrying?"
    WhatCarrying(String),
}

macro_rules! question_re {
    ($name:ident, $pattern:literal) => {
        static $name: LazyLock<Regex> =
            LazyLock::new(|| Regex::new($pattern).expect("pattern compiles"));
    };
}

question_re!(WHERE_BEFORE, r"(?i)^where was (?:the )?(.+?) before (?:the )?(.+?)\s*\?$");
question_re!(WHERE_IS, r"(?i)^where is (?:the )?(.+?)\s*\?$");
question_re!(WHO_GAVE_TO, r"(?i)^who gave (?:the )?(.+?) to (.+?)\s*\?$");
question_re!(WHO_GAVE, r"(?i)^who gave (?:the )?(.+?)\s*\?$");
question_re!(WHO_RECEIVED_FROM, r"(?i)^who received (?:the )?(.+?) from (.+?)\s*\?$");
question_re!(WHO_RECEIVED, r"(?i)^who received (?:the )?(.+?)\s*\?$");
question_re!(WHAT_GIVE_TO, r"(?i)^what did (.+?) give to (.+?)\s*\?$");
question_re!(WHAT_GIVE, r"(?i)^what did (.+?) give\s*\?$");
question_re!(WHO_GIVE_TO, r"(?i)^who did (.+?) give (?:the )?(.+?) to\s*\?$");
question_re!(IS_IN, r"(?i)^is (.+?) in (?:the )?(.+?)\s*\?$");
question_re!(HOW_MANY, r"(?i)^how many objects is (.+?) carrying\s*\?$");
question_re!(WHAT_CARRYING, r"(?i)^what is (.+?) carrying\s*\?$");

pub fn classify_question(text: &str) -> Result<QuestionKind, Diagnostic> {
    let text = text.trim();
    let take = |c: &regex::Captures, i: usize| c.get(i).unwrap().as_str().to_string();
    if let Some(c) = WHERE_BEFORE.captures(text) {
        return Ok(QuestionKind::WhereBefore {
            thing: take(&c, 1),
            place: take(&c, 2),
        });
    }
    if let Some(c) = WHERE_IS.captures(text) {
        return Ok(QuestionKind::WhereIs(take(&c, 1)));
    }
    if let Some(c) = WHO_GAVE_TO.captures(text) {
        return Ok(QuestionKind::WhoGave {
            object: take(&c, 1),
            recipient: Some(take(&c, 2)),
        });
    }
    if let Some(c) = WHO_GAVE.captures(text) {
        return Ok(QuestionKind::WhoGave {
            object: take(&c, 1),
            recipient: None,
        });
    }
    if let Some(c) = WHO_RECEIVED_FROM.captures(text) {
        return Ok(QuestionKind::WhoReceived {
            object: take(&c, 1),
            giver: Some(take(&c, 2)),
        });
    }
    if let Some(c) = WHO_RECEIVED.captures(text) {
        return Ok(QuestionKind::WhoReceived {
            object: take(&c, 1),
            giver: None,
        });
    }
    if let Some(c) = WHAT_GIVE_TO.captures(text) {
        return Ok(QuestionKind::WhatDidGive {
            giver: take(&c, 1),
            recipient: Some(take(&c, 2)),
        });
    }
    if let Some(c) = WHAT_GIVE.captures(text) {
        return Ok(QuestionKind::WhatDidGive {
            giver: take(&c, 1),
            recipient: None,
        });
    }
    if let Some(c) = WHO_GIVE_TO.captures(text) {
        return Ok(QuestionKind::WhoDidGiveTo {
            giver: take(&c, 1),
            object: take(&c, 2),
        });
    }
    if let Some(c) = IS_IN.captures(text) {
        return Ok(QuestionKind::IsIn {
            subject: take(&c, 1),
            place: take(&c, 2),
        });
    }
    if let Some(c) = HOW_MANY.captures(text) {
        return Ok(QuestionKind::HowManyCarrying(take(&c, 1)));
    }
    if let Some(c) = WHAT_CARRYING.captures(text) {
        return Ok(QuestionKind::WhatCarrying(take(&c, 1)));
    }
    Err(Diagnostic::error(format!("unsupported question \"{text}\"")))
}

/// Answers a classified question against the model of the story so far.
/// The discourse representation supplies the surface names and the give/take
/// event log; the library says which classes transfer possession.
pub fn answer(
    kind: &QuestionKind,
    model: &Model,
    drs: &Drs,
    library: &Library,
) -> Result<String, Diagnostic> {
    let q_time = drs.events.len() as u32;
    match kind {
        QuestionKind::WhereIs(thing) => location_at_or_before(model, thing, q_time)
            .map(|(place, _)| place)
            .ok_or_else(|| indeterminate(thing)),
        QuestionKind::WhereBefore { thing, place } => {
            let times: Vec<u32> = query(
                model,
                &AtomPattern {
                    fluent: "loc_in".to_string(),
                    args: vec![Some(thing.clone()), Some(place.clone())],
                    time: None,
                },
            )
            .iter()
            .map(|a| a.time)
            .collect();
            let Some(&last) = times.last() else {
                return Err(Diagnostic::error(format!(
                    "the story never places {thing} in {place}"
                )));
            };
            // First time of the latest contiguous stay at `place`.
            let mut arrival = last;
            while times.contains(&(arrival.wrapping_sub(1))) && arrival > 0 {
                arrival -= 1;
            }
            if arrival == 0 {
                return Err(indeterminate(thing));
            }
            location_at(model, thing, arrival - 1)
                .ok_or_else(|| indeterminate(thing))
        }
        QuestionKind::WhoGave { object, recipient } => {
            let found = find_transfer(drs, library, |t| {
                role_matches(&t, &t.class.theme_role, object)
                    && opt_role_matches(&t, &t.class.recipient_role, recipient.as_deref())
            })?;
            found.surface(&found.class.giver_role.clone())
        }
        QuestionKind::WhoReceived { object, giver } => {
            let found = find_transfer(drs, library, |t| {
                role_matches(&t, &t.class.theme_role, object)
                    && opt_role_matches(&t, &t.class.giver_role, giver.as_deref())
            })?;
            found.surface(&found.class.recipient_role.clone())
        }
        QuestionKind::WhatDidGive { giver, recipient } => {
            let found = find_transfer(drs, library, |t| {
                role_matches(&t, &t.class.giver_role, giver)
                    && opt_role_matches(&t, &t.class.recipient_role, recipient.as_deref())
            })?;
            found.surface(&found.class.theme_role.clone())
        }
        QuestionKind::WhoDidGiveTo { giver, object } => {
            let found = find_transfer(drs, library, |t| {
                role_matches(&t, &t.class.giver_role, giver)
                    && role_matches(&t, &t.class.theme_role, object)
            })?;
            found.surface(&found.class.recipient_role.clone())
        }
        QuestionKind::IsIn { subject, place } => {
            let here = query(
                model,
                &AtomPattern {
                    fluent: "loc_in".to_string(),
                    args: vec![Some(subject.clone()), Some(place.clone())],
                    time: Some(q_time),
                },
            );
            Ok(if here.is_empty() { "no" } else { "yes" }.to_string())
        }
        QuestionKind::HowManyCarrying(person) => {
            let count = holdings(model, person, q_time).len();
            Ok(count_word(count))
        }
        QuestionKind::WhatCarrying(person) => {
            let mut held = holdings(model, person, q_time);
            if held.is_empty() {
                return Ok("nothing".to_string());
            }
            // Order by the start of each object's current unbroken stretch
            // of being held.
            held.sort_by_key(|object| {
                let mut start = q_time;
                while start > 0 && is_holding(model, person, object, start - 1) {
                    start -= 1;
                }
                start
            });
            Ok(held.join(","))
        }
    }
}

/// Classifies and answers in one step.
pub fn answer_question(
    question: &str,
    model: &Model,
    drs: &Drs,
    library: &Library,
) -> Result<String, Diagnostic> {
    answer(&classify_question(question)?, model, drs, library)
}

fn indeterminate(thing: &str) -> Diagnostic {
    Diagnostic::error(format!(
        "the location of {thing} is not determined by the story"
    ))
}

/// The latest known location at or before `time`.
fn location_at_or_before(model: &Model, thing: &str, time: u32) -> Option<(String, u32)> {
    query(
        model,
        &AtomPattern {
            fluent: "loc_in".to_string(),
            args: vec![Some(thing.to_string()), None],
            time: None,
        },
    )
    .into_iter()
    .filter(|a| a.time <= time)
    .max_by_key(|a| a.time)
    .map(|a| (a.args[1].clone(), a.time))
}

fn location_at(model: &Model, thing: &str, time: u32) -> Option<String> {
    query(
        model,
        &AtomPattern {
            fluent: "loc_in".to_string(),
            args: vec![Some(thing.to_string()), None],
            time: Some(time),
        },
    )
    .first()
    .map(|a| a.args[1].clone())
}

fn holdings(model: &Model, person: &str, time: u32) -> Vec<String> {
    query(
        model,
        &AtomPattern {
            fluent: "holding".to_string(),
            args: vec![Some(person.to_string()), None],
            time: Some(time),
        },
    )
    .into_iter()
    .map(|a| a.args[1].clone())
    .collect()
}

fn is_holding(model: &Model, person: &str, object: &str, time: u32) -> bool {
    !query(
        model,
        &AtomPattern {
            fluent: "holding".to_string(),
            args: vec![Some(person.to_string()), Some(object.to_string())],
            time: Some(time),
        },
    )
    .is_empty()
}

fn count_word(count: usize) -> String {
    const WORDS: [&str; 11] = [
        "none", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    ];
    WORDS
        .get(count)
        .map(|w| w.to_string())
        .unwrap_or_else(|| count.to_string())
}

/// A transfer event located in the discourse, with its class's role names.
struct Transfer<'a> {
    drs: &'a Drs,
    event: &'a crate::drs::EventRecord,
    class: &'a TransferClass,
}

impl<'a> Transfer<'a> {
    fn filler(&self, role: &str) -> Option<&'a str> {
        self.event
            .args
            .iter()
            .find(|(r, _)| r.eq_ignore_ascii_case(role))
            .and_then(|(_, id)| self.drs.entity_name(id))
    }

    fn surface(&self, role: &str) -> Result<String, Diagnostic> {
        self.filler(role).map(str::to_string).ok_or_else(|| {
            Diagnostic::error(format!(
                "event {} has no named filler for role {role}",
                self.event.id
            ))
        })
    }
}

fn role_matches(t: &Transfer, role: &str, expected: &str) -> bool {
    t.filler(role)
        .is_some_and(|name| name.eq_ignore_ascii_case(expected))
}

fn opt_role_matches(t: &Transfer, role: &str, expected: Option<&str>) -> bool {
    expected.is_none_or(|e| role_matches(t, role, e))
}

/// The latest transfer event satisfying `pred`, scanning newest first.
fn find_transfer<'a>(
    drs: &'a Drs,
    library: &'a Library,
    pred: impl Fn(&Transfer<'a>) -> bool,
) -> Result<Transfer<'a>, Diagnostic> {
    for event in drs.events.iter().rev() {
        let sort = normalize_class_id(&event.class_id);
        let Some(class) = library.transfer_classes().iter().find(|t| t.sort == sort) else {
            continue;
        };
        let transfer = Transfer { drs, event, class };
        if pred(&transfer) {
            return Ok(transfer);
        }
    }
    Err(Diagnostic::error(
        "the story has no giving event matching the question",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::babi::build_drs;
    use crate::gen::generate_program;
    use crate::library::{builtin_library, Lexicon, RoleSortTable};
    use crate::semantics::{extract_model, ground};
    use std::collections::BTreeMap;

    fn ask(sentences: &[&str], question: &str) -> Result<String, Diagnostic> {
        let lexicon = Lexicon::builtin();
        let library = builtin_library();
        let drs = build_drs(sentences, &lexicon)?;
        let program = generate_program(&drs, "base", &library, &RoleSortTable::standard())?;
        let flat = library.resolve_imports(&program)?;
        let gp = ground(&flat)?;
        let trajectory = gp.project(false).map_err(|e| Diagnostic::error(e.message))?;
        let names: BTreeMap<String, String> = drs
            .entities
            .iter()
            .filter_map(|e| e.name.clone().map(|n| (e.id.clone(), n)))
            .collect();
        let model = extract_model(&gp, &trajectory, &names)?;
        answer_question(question, &model, &drs, &library)
    }

    #[test]
    fn where_is_a_person() {
        let sentences = [
            "Mary moved to the bathroom.",
            "John went to the hallway.",
            "Mary travelled to the office.",
        ];
        assert_eq!(ask(&sentences, "Where is Mary?").unwrap(), "office");
        assert_eq!(ask(&sentences, "Where is John?").unwrap(), "hallway");
    }

    #[test]
    fn where_is_a_carried_object() {
        let sentences = [
            "Mary got the football.",
            "Mary went to the kitchen.",
        ];
        assert_eq!(ask(&sentences, "Where is the football?").unwrap(), "kitchen");
    }

    #[test]
    fn dropped_objects_stay_where_they_fell() {
        let sentences = [
            "Mary went to the garden.",
            "Mary picked up the apple.",
            "Mary dropped the apple.",
            "Mary journeyed to the office.",
        ];
        assert_eq!(ask(&sentences, "Where is the apple?").unwrap(), "garden");
        assert_eq!(ask(&sentences, "Where is Mary?").unwrap(), "office");
    }

    #[test]
    fn where_before_tracks_the_previous_stop() {
        let sentences = [
            "Daniel went to the bathroom.",
            "Daniel took the milk.",
            "Daniel went to the hallway.",
            "Daniel travelled to the kitchen.",
        ];
        assert_eq!(
            ask(&sentences, "Where was the milk before the kitchen?").unwrap(),
            "hallway"
        );
        assert_eq!(
            ask(&sentences, "Where was the milk before the hallway?").unwrap(),
            "bathroom"
        );
    }

    #[test]
    fn giving_answers_all_four_shapes() {
        let sentences = [
            "Fred went to the office.",
            "Jeff went to the office.",
            "Fred got the milk.",
            "Fred gave the milk to Jeff.",
        ];
        assert_eq!(ask(&sentences, "Who gave the milk?").unwrap(), "Fred");
        assert_eq!(ask(&sentences, "Who gave the milk to Jeff?").unwrap(), "Fred");
        assert_eq!(ask(&sentences, "Who received the milk?").unwrap(), "Jeff");
        assert_eq!(ask(&sentences, "What did Fred give to Jeff?").unwrap(), "milk");
        assert_eq!(
            ask(&sentences, "Who did Fred give the milk to?").unwrap(),
            "Jeff"
        );
    }

    #[test]
    fn the_latest_transfer_wins() {
        let sentences = [
            "Bill went to the garden.",
            "Mary went to the garden.",
            "Bill grabbed the football.",
            "Bill gave the football to Mary.",
            "Mary gave the football to Bill.",
        ];
        assert_eq!(ask(&sentences, "Who received the football?").unwrap(), "Bill");
        assert_eq!(ask(&sentences, "Who gave the football?").unwrap(), "Mary");
        // Constrained by recipient, the earlier transfer is found.
        assert_eq!(
            ask(&sentences, "Who gave the football to Mary?").unwrap(),
            "Bill"
        );
    }

    #[test]
    fn yes_no_containment() {
        let sentences = [
            "John moved to the office.",
            "Sandra journeyed to the garden.",
        ];
        assert_eq!(ask(&sentences, "Is John in the office?").unwrap(), "yes");
        assert_eq!(ask(&sentences, "Is John in the garden?").unwrap(), "no");
        assert_eq!(ask(&sentences, "Is Sandra in the garden?").unwrap(), "yes");
    }

    #[test]
    fn counting_and_listing_follow_acquisition_order() {
        let sentences = [
            "Daniel grabbed the milk.",
            "Daniel took the apple.",
            "Daniel picked up the football.",
            "Daniel discarded the apple.",
        ];
        assert_eq!(
            ask(&sentences, "How many objects is Daniel carrying?").unwrap(),
            "two"
        );
        assert_eq!(
            ask(&sentences, "What is Daniel carrying?").unwrap(),
            "milk,football"
        );
    }

    #[test]
    fn empty_hands_are_reported() {
        let sentences = ["Mary went to the garden."];
        assert_eq!(
            ask(&sentences, "How many objects is Mary carrying?").unwrap(),
            "none"
        );
        assert_eq!(ask(&sentences, "What is Mary carrying?").unwrap(), "nothing");
    }

    #[test]
    fn unknown_locations_are_an_error_not_a_guess() {
        let sentences = ["Mary got the football."];
        let err = ask(&sentences, "Where is Mary?").unwrap_err();
        assert!(err.message.contains("not determined"), "{}", err.message);
    }

    #[test]
    fn unsupported_questions_are_rejected() {
        let err = classify_question("Why did Mary leave?").unwrap_err();
        assert!(err.message.contains("unsupported question"));
    }

    #[test]
    fn classification_extracts_the_right_fields() {
        assert_eq!(
            classify_question("Where is the apple?").unwrap(),
            QuestionKind::WhereIs("apple".to_string())
        );
        assert_eq!(
            classify_question("Where was the football before the garden?").unwrap(),
            QuestionKind::WhereBefore {
                thing: "football".to_string(),
                place: "garden".to_string()
            }
        );
        assert_eq!(
            classify_question("What did Fred give?").unwrap(),
            QuestionKind::WhatDidGive {
                giver: "Fred".to_string(),
                recipient: None
            }
        );
        assert_eq!(
            classify_question("Who received the milk from Fred?").unwrap(),
            QuestionKind::WhoReceived {
                object: "milk".to_string(),
                giver: Some("Fred".to_string())
            }
        );
        assert_eq!(
            classify_question("How many objects is Sandra carrying?").unwrap(),
            QuestionKind::HowManyCarrying("Sandra".to_string())
        );
    }
}
