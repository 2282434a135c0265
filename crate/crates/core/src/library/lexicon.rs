//! The verb lexicon: maps verb lemmas (including multiword ones such as
//! "picked up") to a VerbNet class and a frame that says which grammatical
//! slot fills which thematic role.
//!
//! On-disk format is one entry per line, tab-separated:
//!
//! ```text
//! lemma<TAB>class-id<TAB>slot=Role,slot=Role,...
//! ```
//!
//! with `#` comments and blank lines ignored. Slots are `subj`, `obj`, `to`.

use crate::diag::{Diagnostic, Location};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    Subject,
    Object,
    To,
}

impl Slot {
    fn parse(text: &str) -> Option<Slot> {
        match text {
            "subj" => Some(Slot::Subject),
            "obj" => Some(Slot::Object),
            "to" => Some(Slot::To),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub lemma: String,
    pub class_id: String,
    /// Grammatical slot to thematic role, in file order.
    pub frame: Vec<(Slot, String)>,
}

impl LexEntry {
    pub fn role_for(&self, slot: Slot) -> Option<&str> {
        self.frame
            .iter()
            .find(|(s, _)| *s == slot)
            .map(|(_, role)| role.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    /// Keyed by lowercase lemma.
    entries: BTreeMap<String, LexEntry>,
    /// Longest lemma, in words, for bounded matching.
    max_words: usize,
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon, Diagnostic> {
    let mut lexicon = Lexicon::default();
    for (idx, raw) in text.lines().enumerate() {
        let loc = Location {
            line: idx as u32 + 1,
            col: 1,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').filter(|f| !f.trim().is_empty()).collect();
        let [lemma, class_id, frame_text] = fields.as_slice() else {
            return Err(Diagnostic::error_at(
                loc,
                format!(
                    "expected 3 tab-separated fields (lemma, class, frame), found {}",
                    fields.len()
                ),
            ));
        };
        let mut frame = Vec::new();
        for part in frame_text.split(',') {
            let Some((slot_text, role)) = part.trim().split_once('=') else {
                return Err(Diagnostic::error_at(
                    loc,
                    format!("frame entry `{part}` is not of the form slot=Role"),
                ));
            };
            let Some(slot) = Slot::parse(slot_text.trim()) else {
                return Err(Diagnostic::error_at(
                    loc,
                    format!("unknown grammatical slot `{}` (expected subj, obj, or to)", slot_text.trim()),
                ));
            };
            if frame.iter().any(|(s, _)| *s == slot) {
                return Err(Diagnostic::error_at(
                    loc,
                    format!("duplicate slot `{}` for `{lemma}`", slot_text.trim()),
                ));
            }
            frame.push((slot, role.trim().to_string()));
        }
        let entry = LexEntry {
            lemma: lemma.trim().to_lowercase(),
            class_id: class_id.trim().to_string(),
            frame,
        };
        if lexicon.entries.contains_key(&entry.lemma) {
            return Err(Diagnostic::error_at(
                loc,
                format!("duplicate lemma `{}`", entry.lemma),
            ));
        }
        lexicon.insert(entry);
    }
    Ok(lexicon)
}

impl Lexicon {
    fn insert(&mut self, entry: LexEntry) {
        self.max_words = self.max_words.max(entry.lemma.split(' ').count());
        self.entries.insert(entry.lemma.clone(), entry);
    }

    pub fn get(&self, lemma: &str) -> Option<&LexEntry> {
        self.entries.get(&lemma.to_lowercase())
    }

    /// Matches the longest lemma starting at `words[0]`, returning the entry
    /// and how many words it consumed.
    pub fn match_verb(&self, words: &[&str]) -> Option<(usize, &LexEntry)> {
        for len in (1..=self.max_words.min(words.len())).rev() {
            let candidate = words[..len].join(" ").to_lowercase();
            if let Some(entry) = self.entries.get(&candidate) {
                return Some((len, entry));
            }
        }
        None
    }

    /// Adds every entry of `other`, overriding same-lemma entries.
    pub fn merge(&mut self, other: Lexicon) {
        for entry in other.entries.into_values() {
            self.insert(entry);
        }
    }

    pub fn remove(&mut self, lemma: &str) -> Option<LexEntry> {
        self.entries.remove(&lemma.to_lowercase())
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment
went\trun-51.3.2-1\tsubj=Theme,to=Destination

picked up\tget-13.5.1\tsubj=Agent,obj=Theme
";

    #[test]
    fn parses_entries_and_skips_comments() {
        let lex = parse_lexicon(SAMPLE).unwrap();
        assert_eq!(lex.len(), 2);
        let went = lex.get("went").unwrap();
        assert_eq!(went.class_id, "run-51.3.2-1");
        assert_eq!(went.role_for(Slot::Subject), Some("Theme"));
        assert_eq!(went.role_for(Slot::To), Some("Destination"));
        assert_eq!(went.role_for(Slot::Object), None);
    }

    #[test]
    fn multiword_lemmas_match_longest_first() {
        let lex = parse_lexicon(SAMPLE).unwrap();
        let (n, entry) = lex.match_verb(&["picked", "up", "the", "ball"]).unwrap();
        assert_eq!(n, 2);
        assert_eq!(entry.class_id, "get-13.5.1");
        assert!(lex.match_verb(&["vanished"]).is_none());
    }

    #[test]
    fn merge_overrides_same_lemma() {
        let mut lex = parse_lexicon(SAMPLE).unwrap();
        let patch = parse_lexicon("went\tget-13.5.1\tsubj=Agent,obj=Theme\n").unwrap();
        lex.merge(patch);
        assert_eq!(lex.get("went").unwrap().class_id, "get-13.5.1");
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn malformed_lines_are_rejected_with_line_numbers() {
        let err = parse_lexicon("went run-51.3.2-1 subj=Theme\n").unwrap_err();
        assert!(err.message.contains("tab-separated"));
        assert_eq!(err.location.unwrap().line, 1);

        let err = parse_lexicon("x\tc\tnear=Theme\n").unwrap_err();
        assert!(err.message.contains("unknown grammatical slot"));

        let err = parse_lexicon("x\tc\tsubj=A,subj=B\n").unwrap_err();
        assert!(err.message.contains("duplicate slot"));

        let err = parse_lexicon("x\tc\tsubj=A\nx\tc\tsubj=B\n").unwrap_err();
        assert!(err.message.contains("duplicate lemma"));
        assert_eq!(err.location.unwrap().line, 2);
    }
}
