//! Reader for numbered-story files and extraction of events from their
//! sentences.
//!
//! A story file holds one or more stories; each line is `N text`, with `N`
//! restarting at 1 on a new story. Question lines carry the answer and the
//! supporting sentence numbers after tabs:
//!
//! ```text
//! 1 Mary moved to the bathroom.
//! 2 John went to the hallway.
//! 3 Where is Mary?\tbathroom\t1
//! ```
//!
//! Sentences follow the corpus's fixed shape, subject then verb then
//! arguments, so extraction is positional: find the verb by its lemma, take
//! what precedes it as the subject, and split what follows at "to".

use crate::diag::Diagnostic;
use crate::drs::{Drs, DrsEntity, EventRecord};
use crate::library::{Lexicon, Slot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub number: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub number: u32,
    pub text: String,
    pub answer: String,
    /// Numbers of the sentences that support the answer, possibly empty.
    pub supports: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Sentence(Sentence),
    Question(Question),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Story {
    pub items: Vec<Item>,
}

impl Story {
    /// The sentences strictly preceding item index `upto`.
    pub fn sentences_before(&self, upto: usize) -> Vec<&str> {
        self.items[..upto]
            .iter()
            .filter_map(|item| match item {
                Item::Sentence(s) => Some(s.text.as_str()),
                Item::Question(_) => None,
            })
            .collect()
    }

    pub fn questions(&self) -> impl Iterator<Item = (usize, &Question)> {
        self.items.iter().enumerate().filter_map(|(i, item)| match item {
            Item::Question(q) => Some((i, q)),
            Item::Sentence(_) => None,
        })
    }
}

pub fn parse_babi(source: &str) -> Result<Vec<Story>, Diagnostic> {
    let mut stories = Vec::new();
    let mut current = Story::default();
    let mut expected = 1u32;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some((prefix, rest)) = line.split_once(' ') else {
            return Err(Diagnostic::error(format!(
                "line {line_no}: expected a sentence number followed by text"
            )));
        };
        let Ok(number) = prefix.parse::<u32>() else {
            return Err(Diagnostic::error(format!(
                "line {line_no}: \"{prefix}\" is not a sentence number"
            )));
        };
        if number == 1 {
            if !current.items.is_empty() {
                stories.push(std::mem::take(&mut current));
            }
        } else if number != expected {
            return Err(Diagnostic::error(format!(
                "line {line_no}: sentence numbers must be consecutive \
                 (expected {expected}, found {number})"
            )));
        }
        expected = number + 1;

        let mut fields = rest.split('\t');
        let text = fields.next().unwrap_or("").trim().to_string();
        match fields.next() {
            Some(answer) => {
                let supports = fields
                    .next()
                    .unwrap_or("")
                    .split_whitespace()
                    .map(|s| {
                        s.parse::<u32>().map_err(|_| {
                            Diagnostic::error(format!(
                                "line {line_no}: \"{s}\" is not a supporting sentence number"
                            ))
                        })
                    })
                    .collect::<Result<Vec<u32>, Diagnostic>>()?;
                current.items.push(Item::Question(Question {
                    number,
                    text,
                    answer: answer.trim().to_string(),
                    supports,
                }));
            }
            None if text.ends_with('?') => {
                return Err(Diagnostic::error(format!(
                    "line {line_no}: question without an answer"
                )));
            }
            None => {
                current.items.push(Item::Sentence(Sentence { number, text }));
            }
        }
    }
    if !current.items.is_empty() {
        stories.push(current);
    }
    Ok(stories)
}

/// One sentence reduced to its verb class and role fillers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedEvent {
    pub lemma: String,
    pub class_id: String,
    /// (thematic role, surface name), in the verb frame's order.
    pub args: Vec<(String, String)>,
}

const ARTICLES: [&str; 3] = ["the", "a", "an"];

fn strip_articles<'a>(tokens: &[&'a str]) -> Vec<&'a str> {
    tokens
        .iter()
        .copied()
        .filter(|t| !ARTICLES.contains(&t.to_lowercase().as_str()))
        .collect()
}

pub fn sentence_to_event(text: &str, lexicon: &Lexicon) -> Result<ExtractedEvent, Diagnostic> {
    let trimmed = text.trim().trim_end_matches('.');
    let tokens: Vec<&str> = trimmed.split_whitespace().collect();

    let mut found = None;
    for at in 0..tokens.len() {
        if let Some((words, entry)) = lexicon.match_verb(&tokens[at..]) {
            found = Some((at, words, entry));
            break;
        }
    }
    let Some((at, words, entry)) = found else {
        let probable = tokens.get(1).copied().unwrap_or(trimmed);
        return Err(Diagnostic::error(format!(
            "unknown verb \"{probable}\" in \"{text}\""
        )));
    };

    let subject = strip_articles(&tokens[..at]).join(" ");
    let mut rest: &[&str] = &tokens[at + words..];
    if rest.first().is_some_and(|t| t.eq_ignore_ascii_case("back")) {
        rest = &rest[1..];
    }
    if rest.last().is_some_and(|t| t.eq_ignore_ascii_case("there")) {
        rest = &rest[..rest.len() - 1];
    }
    let (object, to) = match rest.iter().position(|t| t.eq_ignore_ascii_case("to")) {
        Some(split) => (
            strip_articles(&rest[..split]).join(" "),
            strip_articles(&rest[split + 1..]).join(" "),
        ),
        None => (strip_articles(rest).join(" "), String::new()),
    };

    let mut args = Vec::new();
    let mut consumed_object = false;
    let mut consumed_to = false;
    for (slot, role) in &entry.frame {
        let filler = match slot {
            Slot::Subject => &subject,
            Slot::Object => {
                consumed_object = true;
                &object
            }
            Slot::To => {
                consumed_to = true;
                &to
            }
        };
        if filler.is_empty() {
            return Err(Diagnostic::error(format!(
                "\"{text}\" is missing the {} of \"{}\"",
                slot_description(*slot),
                entry.lemma,
            )));
        }
        args.push((role.clone(), filler.clone()));
    }
    if !consumed_object && !object.is_empty() {
        return Err(Diagnostic::error(format!(
            "\"{text}\" has words after \"{}\" that its frame does not use",
            entry.lemma,
        )));
    }
    if !consumed_to && !to.is_empty() {
        return Err(Diagnostic::error(format!(
            "\"{text}\" names a \"to\" phrase that \"{}\" does not take",
            entry.lemma,
        )));
    }

    Ok(ExtractedEvent {
        lemma: entry.lemma.clone(),
        class_id: entry.class_id.clone(),
        args,
    })
}

fn slot_description(slot: Slot) -> &'static str {
    match slot {
        Slot::Subject => "subject",
        Slot::Object => "object",
        Slot::To => "\"to\" phrase",
    }
}

/// Translates a sentence prefix into a discourse representation: referents
/// in first-mention order, one event per sentence at consecutive times.
pub fn build_drs(sentences: &[&str], lexicon: &Lexicon) -> Result<Drs, Diagnostic> {
    let mut drs = Drs::default();
    for (index, sentence) in sentences.iter().enumerate() {
        let event = sentence_to_event(sentence, lexicon)?;
        let mut args = Vec::new();
        for (role, surface) in event.args {
            let id = match drs.entities.iter().find(|e| e.name.as_deref() == Some(&surface)) {
                Some(entity) => entity.id.clone(),
                None => {
                    let id = format!("r{}", drs.entities.len() + 1);
                    drs.entities.push(DrsEntity {
                        id: id.clone(),
                        name: Some(surface),
                    });
                    id
                }
            };
            args.push((role, id));
        }
        drs.events.push(EventRecord {
            id: format!("e{}", index + 1),
            class_id: event.class_id,
            time: index as u32,
            args,
        });
    }
    Ok(drs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> Lexicon {
        Lexicon::builtin()
    }

    #[test]
    fn stories_split_on_renumbering() {
        let source = "1 Mary moved to the bathroom.\n\
                      2 John went to the hallway.\n\
                      3 Where is Mary?\tbathroom\t1\n\
                      1 Daniel journeyed to the office.\n\
                      2 Where is Daniel?\toffice\t1\n";
        let stories = parse_babi(source).unwrap();
        assert_eq!(stories.len(), 2);
        assert_eq!(stories[0].items.len(), 3);
        assert_eq!(stories[1].items.len(), 2);
        let (index, question) = stories[0].questions().next().unwrap();
        assert_eq!(question.answer, "bathroom");
        assert_eq!(question.supports, vec![1]);
        assert_eq!(
            stories[0].sentences_before(index),
            vec!["Mary moved to the bathroom.", "John went to the hallway."]
        );
    }

    #[test]
    fn list_answers_keep_their_commas() {
        let source = "1 Daniel picked up the milk.\n\
                      2 Daniel grabbed the football.\n\
                      3 What is Daniel carrying?\tmilk,football\t1 2\n";
        let stories = parse_babi(source).unwrap();
        let (_, q) = stories[0].questions().next().unwrap();
        assert_eq!(q.answer, "milk,football");
        assert_eq!(q.supports, vec![1, 2]);
    }

    #[test]
    fn malformed_numbering_is_rejected() {
        let err = parse_babi("1 Mary moved to the bathroom.\n3 John went to the hallway.\n")
            .unwrap_err();
        assert!(err.message.contains("consecutive"), "{}", err.message);

        let err = parse_babi("x Mary moved to the bathroom.\n").unwrap_err();
        assert!(err.message.contains("not a sentence number"));

        let err = parse_babi("1 Where is Mary?\n").unwrap_err();
        assert!(err.message.contains("without an answer"));
    }

    #[test]
    fn movement_sentences_extract_theme_and_destination() {
        let event =
            sentence_to_event("Mary went back to the kitchen.", &lexicon()).unwrap();
        assert_eq!(event.class_id, "run-51.3.2-1");
        assert_eq!(
            event.args,
            vec![
                ("Theme".to_string(), "Mary".to_string()),
                ("Destination".to_string(), "kitchen".to_string()),
            ]
        );
    }

    #[test]
    fn multiword_verbs_and_trailing_adverbs_are_handled() {
        let event =
            sentence_to_event("John picked up the football there.", &lexicon()).unwrap();
        assert_eq!(event.lemma, "picked up");
        assert_eq!(event.class_id, "get-13.5.1");
        assert_eq!(
            event.args,
            vec![
                ("Agent".to_string(), "John".to_string()),
                ("Theme".to_string(), "football".to_string()),
            ]
        );
    }

    #[test]
    fn transfer_sentences_extract_all_three_roles() {
        let event = sentence_to_event("Fred gave the milk to Jeff.", &lexicon()).unwrap();
        assert_eq!(event.class_id, "give-13.1");
        assert_eq!(
            event.args,
            vec![
                ("Agent".to_string(), "Fred".to_string()),
                ("Theme".to_string(), "milk".to_string()),
                ("Recipient".to_string(), "Jeff".to_string()),
            ]
        );
    }

    #[test]
    fn unknown_verbs_are_loud() {
        let err = sentence_to_event("Mary teleported to the moon.", &lexicon()).unwrap_err();
        assert!(
            err.message.contains("unknown verb \"teleported\""),
            "{}",
            err.message
        );
    }

    #[test]
    fn missing_frame_slots_are_reported() {
        let err = sentence_to_event("Mary went.", &lexicon()).unwrap_err();
        assert!(err.message.contains("missing"), "{}", err.message);

        let err = sentence_to_event("Mary grabbed to the hallway.", &lexicon()).unwrap_err();
        assert!(err.message.contains("to"), "{}", err.message);
    }

    #[test]
    fn drs_assembly_dedupes_referents_by_surface_name() {
        let sentences = [
            "Mary went to the bedroom.",
            "John moved to the bedroom.",
            "Mary got the football.",
        ];
        let drs = build_drs(&sentences, &lexicon()).unwrap();
        let names: Vec<&str> = drs
            .entities
            .iter()
            .map(|e| e.name.as_deref().unwrap())
            .collect();
        assert_eq!(names, vec!["Mary", "bedroom", "John", "football"]);
        assert_eq!(drs.events.len(), 3);
        assert_eq!(drs.events[2].args[0].1, "r1");
        assert_eq!(drs.events[1].time, 1);
        assert_eq!(crate::drs::validate_drs(&drs), vec![]);
    }
}
