//! Sentence and discourse properties that do not depend on collocations.

use serde::{Deserialize, Serialize};

use super::table::FeatureVariable;
use crate::corpus::{main_verb_group, ClassLabel, Document, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonCollocConfig {
    /// F2 fires when the share of private-state/speech sentences earlier in
    /// the paragraph exceeds this.
    pub discourse_threshold: f64,
    /// Quote ratios below this are low.
    pub quote_low: f64,
    /// Quote ratios above this are high; the bounds themselves are mid.
    pub quote_high: f64,
}

impl Default for NonCollocConfig {
    fn default() -> Self {
        NonCollocConfig {
            discourse_threshold: 0.3,
            quote_low: 0.1,
            quote_high: 0.3,
        }
    }
}

pub fn noncolloc_variables() -> Vec<FeatureVariable> {
    vec![
        FeatureVariable::binary("F1:paragraph-start"),
        FeatureVariable::binary("F2:prior-ps-speech"),
        FeatureVariable::new(
            "F3:quote-ratio",
            vec!["low".into(), "mid".into(), "high".into()],
        ),
        FeatureVariable::binary("F4:according-to"),
    ]
}

/// Share of tokens inside quotation marks.
pub fn quote_ratio(s: &Sentence) -> f64 {
    if s.tokens.is_empty() {
        return 0.0;
    }
    s.tokens.iter().filter(|t| t.in_quote).count() as f64 / s.tokens.len() as f64
}

/// 0 = low, 1 = mid, 2 = high.
pub fn quote_level(r: f64, cfg: &NonCollocConfig) -> u32 {
    if r < cfg.quote_low {
        0
    } else if r <= cfg.quote_high {
        1
    } else {
        2
    }
}

pub fn has_according_to(s: &Sentence) -> bool {
    s.tokens.windows(2).any(|w| {
        w[0].surface.eq_ignore_ascii_case("according") && w[1].surface.eq_ignore_ascii_case("to")
    })
}

/// Index of the first sentence of the paragraph holding sentence `i`.
fn paragraph_start(doc: &Document, i: usize) -> usize {
    (0..=i).rev().find(|&j| doc.sentences[j].paragraph_start).unwrap_or(0)
}

/// Whether more than `threshold` of the earlier sentences in the paragraph of
/// sentence `i` are private-state or speech. `history[j]` is the label of
/// sentence `j` (gold or predicted); `None` counts as other-event. Only
/// entries before `i` are read.
pub fn prior_ps_speech(doc: &Document, i: usize, history: &[Option<ClassLabel>], threshold: f64) -> bool {
    let start = paragraph_start(doc, i);
    let earlier = &history[start..i];
    if earlier.is_empty() {
        return false;
    }
    let hits = earlier.iter().filter(|c| c.is_some_and(ClassLabel::is_ps_or_speech)).count();
    hits as f64 / earlier.len() as f64 > threshold
}

/// F1..F4 for sentence `i` of `doc`.
pub fn noncolloc_values(
    doc: &Document,
    i: usize,
    history: &[Option<ClassLabel>],
    cfg: &NonCollocConfig,
) -> [u32; 4] {
    let s = &doc.sentences[i];
    [
        s.paragraph_start as u32,
        prior_ps_speech(doc, i, history, cfg.discourse_threshold) as u32,
        quote_level(quote_ratio(s), cfg),
        has_according_to(s) as u32,
    ]
}

/// F1..F4 for every sentence of a document, with `labels` standing in for
/// the classes of earlier sentences.
pub fn noncolloc_features(doc: &Document, labels: &[Option<ClassLabel>], cfg: &NonCollocConfig) -> Vec<[u32; 4]> {
    (0..doc.sentences.len())
        .map(|i| noncolloc_values(doc, i, labels, cfg))
        .collect()
}

pub const TENSE_VALUES: [&str; 4] = ["past", "present", "future-modal", "other"];

pub fn tense_variable() -> FeatureVariable {
    FeatureVariable::new("tense", TENSE_VALUES.iter().map(|s| s.to_string()).collect())
}

/// Tense of the main verb group, as an index into [`TENSE_VALUES`].
pub fn tense(s: &Sentence) -> u32 {
    let Ok(group) = main_verb_group(s) else {
        return 3;
    };
    if group.has_modal {
        return 2;
    }
    match s.tokens[group.main].pos.as_str() {
        "VBD" | "VBN" => 0,
        "VBZ" | "VBP" | "VBG" => 1,
        _ => 3,
    }
}

pub fn previous_class_variable() -> FeatureVariable {
    FeatureVariable::new(
        "prev-class",
        ClassLabel::ALL
            .iter()
            .map(|c| c.as_str().to_string())
            .chain(std::iter::once("none".to_string()))
            .collect(),
    )
}

/// Class of the preceding sentence in the document; abstentions count as
/// other-event, and the first sentence gets the extra "none" value.
pub fn previous_class(i: usize, history: &[Option<ClassLabel>]) -> u32 {
    if i == 0 {
        return ClassLabel::COUNT as u32;
    }
    history[i - 1].unwrap_or(ClassLabel::OtherEvent).index() as u32
}
