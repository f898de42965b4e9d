//! Main-verb identification and the copular verb inventory.
//!
//! The verb-group machine scans the main clause left to right. The first
//! verb-tagged or modal token opens a group. Inside the group, modals,
//! adverbs and negation are skipped, and a verb whose lemma is one of
//! be/have/do/get is skipped when another verb follows in the group
//! (infinitival "to" may intervene). The first verb that is not skipped is the
//! main verb; a lone form of "be" is therefore its own main verb.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tagset::{is_adverb, is_modal, is_verb};
use super::{Sentence, Token};

const AUXILIARY_LEMMAS: &[&str] = &["be", "have", "do", "get"];
const NEGATIONS: &[&str] = &["not", "n't", "never"];

const DEFAULT_COPULAS: &[&str] = &[
    "be", "seem", "appear", "become", "remain", "look", "feel", "sound", "stay", "prove", "get",
    "grow", "turn",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no main verb in the main clause")]
pub struct NoMainVerb;

/// A resolved verb group: where it starts, its main verb, and whether a modal
/// occurred before the main verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerbGroup {
    pub start: usize,
    pub main: usize,
    pub has_modal: bool,
}

fn is_transparent(t: &Token) -> bool {
    is_adverb(&t.pos) || NEGATIONS.contains(&t.lemma.to_lowercase().as_str())
}

fn is_infinitival_to(t: &Token) -> bool {
    t.pos == "TO"
}

fn is_auxiliary(t: &Token) -> bool {
    is_verb(&t.pos) && AUXILIARY_LEMMAS.contains(&t.lemma.to_lowercase().as_str())
}

/// True when a verb follows position `from`, skipping only tokens that may
/// sit between an auxiliary and the verb it supports.
fn verb_follows(tokens: &[Token], from: usize, end: usize) -> bool {
    tokens[from..end]
        .iter()
        .find(|t| !(is_transparent(t) || is_infinitival_to(t) || is_modal(&t.pos)))
        .is_some_and(|t| is_verb(&t.pos))
}

/// Runs the verb-group machine from `start` (which must hold a verb or modal)
/// up to `end`. Returns the group's main verb, if it has one, and the index
/// just past the group.
pub fn resolve_verb_group(tokens: &[Token], start: usize, end: usize) -> (Option<VerbGroup>, usize) {
    let mut has_modal = false;
    let mut i = start;
    while i < end {
        let t = &tokens[i];
        if is_modal(&t.pos) {
            has_modal = true;
        } else if is_verb(&t.pos) {
            if !(is_auxiliary(t) && verb_follows(tokens, i + 1, end)) {
                return (
                    Some(VerbGroup {
                        start,
                        main: i,
                        has_modal,
                    }),
                    i + 1,
                );
            }
        } else if !(is_transparent(t) || (i > start && is_infinitival_to(t))) {
            break;
        }
        i += 1;
    }
    (None, i.max(start + 1))
}

/// Finds the verb group holding the main verb of the sentence's main clause.
pub fn main_verb_group(s: &Sentence) -> Result<VerbGroup, NoMainVerb> {
    let span = s.main_clause_span();
    if let Some(mv) = s.main_verb_index {
        let has_modal = s.tokens[span.start..mv]
            .iter()
            .rev()
            .take_while(|t| is_verb(&t.pos) || is_modal(&t.pos) || is_transparent(t) || is_infinitival_to(t))
            .any(|t| is_modal(&t.pos));
        return Ok(VerbGroup {
            start: mv,
            main: mv,
            has_modal,
        });
    }
    let mut i = span.start;
    while i < span.end {
        let pos = &s.tokens[i].pos;
        if is_verb(pos) || is_modal(pos) {
            let (group, next) = resolve_verb_group(&s.tokens, i, span.end);
            if let Some(g) = group {
                return Ok(g);
            }
            i = next;
        } else {
            i += 1;
        }
    }
    Err(NoMainVerb)
}

/// Index of the main verb of the main clause. An index supplied in the input
/// is returned unchanged.
pub fn find_main_verb(s: &Sentence) -> Result<usize, NoMainVerb> {
    main_verb_group(s).map(|g| g.main)
}

/// Lemmas treated as copular verbs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CopularVerbs(BTreeSet<String>);

impl CopularVerbs {
    pub fn new<I, S>(lemmas: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CopularVerbs(lemmas.into_iter().map(Into::into).collect())
    }

    pub fn is_copular(&self, lemma: &str) -> bool {
        self.0.contains(lemma)
    }
}

impl Default for CopularVerbs {
    fn default() -> Self {
        Self::new(DEFAULT_COPULAS.iter().copied())
    }
}
