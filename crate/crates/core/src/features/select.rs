//! Collocation selection: per-class conditional probability and over-range
//! independence tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::corpus::{ClassLabel, Corpus};
use crate::fingerprint::Fingerprint;
use crate::modelsearch::chi_squared_critical;
use crate::patterns::{PatternId, PatternIndex};

/// How collocations are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Selection {
    /// Admit `w` for class `C` when `P(C | w in P) > k`.
    PerClass { k: f64 },
    /// Admit `w` when a 2×6 presence-by-class table rejects independence at
    /// `alpha`, among lemmas seen at least `min_count` times.
    OverRange { alpha: f64, min_count: u64 },
}

impl Default for Selection {
    fn default() -> Self {
        Selection::PerClass { k: 0.5 }
    }
}

impl Selection {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let (name, value) = match *self {
            Selection::PerClass { k } => ("k", k),
            Selection::OverRange { alpha, .. } => ("alpha", alpha),
        };
        if value > 0.0 && value < 1.0 {
            Ok(())
        } else {
            Err(FeatureError::InvalidParameter(format!(
                "{name} must lie in (0, 1), got {value}"
            )))
        }
    }
}

/// Per-class sentence counts of each lemma under one pattern: how many
/// sentences of each class contain the lemma in that pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaCounts {
    pub by_lemma: BTreeMap<String, [u64; ClassLabel::COUNT]>,
    pub class_totals: [u64; ClassLabel::COUNT],
}

impl LemmaCounts {
    pub fn count(train: &Corpus, index: &PatternIndex, p: PatternId) -> Result<Self, FeatureError> {
        let mut counts = LemmaCounts::default();
        for (r, s) in train.sentences() {
            let class = s.gold_class.ok_or(FeatureError::Unlabeled)?.index();
            counts.class_totals[class] += 1;
            for m in index.get(r).get(p) {
                counts.by_lemma.entry(m.lemma.clone()).or_default()[class] += 1;
            }
        }
        if counts.class_totals.iter().sum::<u64>() == 0 {
            return Err(FeatureError::EmptyTrainingFold);
        }
        Ok(counts)
    }
}

/// Lemmas admitted for each class under one pattern, with `P(C | w in P)`.
pub type PerClassSets = [BTreeMap<String, f64>; ClassLabel::COUNT];

pub fn select_per_class(counts: &LemmaCounts, k: f64) -> PerClassSets {
    let mut sets: PerClassSets = Default::default();
    for (lemma, by_class) in &counts.by_lemma {
        let total: u64 = by_class.iter().sum();
        if total == 0 {
            continue;
        }
        for (c, &n) in by_class.iter().enumerate() {
            let p = n as f64 / total as f64;
            if p > k {
                sets[c].insert(lemma.clone(), p);
            }
        }
    }
    sets
}

/// G² of the independence model on the 2×C table (present / absent × class).
pub fn presence_g_squared(present: &[u64], class_totals: &[u64]) -> f64 {
    let n: u64 = class_totals.iter().sum();
    let n_present: u64 = present.iter().sum();
    let n_absent = n - n_present;
    let n = n as f64;
    let mut sum = 0.0;
    for (&p, &t) in present.iter().zip(class_totals) {
        for (observed, row_total) in [(p, n_present), (t - p, n_absent)] {
            if observed > 0 {
                let expected = row_total as f64 * t as f64 / n;
                sum += observed as f64 * (observed as f64 / expected).ln();
            }
        }
    }
    (2.0 * sum).max(0.0)
}

/// Lemmas whose presence is dependent on the class, with their G².
pub fn select_over_range(counts: &LemmaCounts, alpha: f64, min_count: u64) -> BTreeMap<String, f64> {
    let critical = chi_squared_critical(alpha, (ClassLabel::COUNT - 1) as f64);
    counts
        .by_lemma
        .iter()
        .filter(|(_, by_class)| by_class.iter().sum::<u64>() >= min_count)
        .filter_map(|(lemma, by_class)| {
            let g2 = presence_g_squared(by_class, &counts.class_totals);
            (g2 > critical).then(|| (lemma.clone(), g2))
        })
        .collect()
}

/// Selected collocations of one pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCollocations {
    pub pattern: PatternId,
    /// Per-class mode: admitted lemmas of each class, in label order, each
    /// mapped to its conditional class probability.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_class: Vec<ClassCollocations>,
    /// Over-range mode: admitted lemmas mapped to their G².
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub words: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCollocations {
    pub class: ClassLabel,
    pub lemmas: BTreeMap<String, f64>,
}

impl PatternCollocations {
    /// Lemmas admitted for class `c` (per-class mode).
    pub fn class_set(&self, c: ClassLabel) -> Option<&BTreeMap<String, f64>> {
        self.per_class.iter().find(|s| s.class == c).map(|s| &s.lemmas)
    }
}

/// The collocations selected on a training fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationInventory {
    pub selection: Selection,
    pub training_fingerprint: Fingerprint,
    pub patterns: Vec<PatternCollocations>,
}

impl CollocationInventory {
    /// Selects collocations for each pattern on the (labeled) training corpus.
    pub fn build(
        train: &Corpus,
        index: &PatternIndex,
        patterns: &[PatternId],
        selection: Selection,
    ) -> Result<Self, FeatureError> {
        selection.validate()?;
        if train.num_sentences() == 0 {
            return Err(FeatureError::EmptyTrainingFold);
        }
        let mut entries = Vec::with_capacity(patterns.len());
        for &p in patterns {
            let counts = LemmaCounts::count(train, index, p)?;
            let entry = match selection {
                Selection::PerClass { k } => PatternCollocations {
                    pattern: p,
                    per_class: select_per_class(&counts, k)
                        .into_iter()
                        .zip(ClassLabel::ALL)
                        .map(|(lemmas, class)| ClassCollocations { class, lemmas })
                        .collect(),
                    words: BTreeMap::new(),
                },
                Selection::OverRange { alpha, min_count } => PatternCollocations {
                    pattern: p,
                    per_class: Vec::new(),
                    words: select_over_range(&counts, alpha, min_count),
                },
            };
            entries.push(entry);
        }
        Ok(CollocationInventory {
            selection,
            training_fingerprint: train.fingerprint(),
            patterns: entries,
        })
    }

    pub fn is_per_class(&self) -> bool {
        matches!(self.selection, Selection::PerClass { .. })
    }

    pub fn pattern(&self, p: PatternId) -> Option<&PatternCollocations> {
        self.patterns.iter().find(|e| e.pattern == p)
    }

    /// Total number of admitted (lemma, pattern) or (lemma, pattern, class)
    /// entries.
    pub fn len(&self) -> usize {
        self.patterns
            .iter()
            .map(|e| e.words.len() + e.per_class.iter().map(|c| c.lemmas.len()).sum::<usize>())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("inventory serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, FeatureError> {
        serde_json::from_str(s).map_err(|e| FeatureError::Format(e.to_string()))
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of_bytes(self.to_json().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(entries: &[(&str, [u64; 6])], totals: [u64; 6]) -> LemmaCounts {
        LemmaCounts {
            by_lemma: entries.iter().map(|(l, c)| (l.to_string(), *c)).collect(),
            class_totals: totals,
        }
    }

    const TOTALS: [u64; 6] = [100, 90, 40, 240, 10, 520];

    #[test]
    fn per_class_threshold_is_strict() {
        let c = counts(
            &[("say", [0, 1, 0, 8, 0, 1]), ("half", [5, 0, 0, 0, 0, 5]), ("lone", [0, 0, 0, 0, 0, 1])],
            TOTALS,
        );
        let sets = select_per_class(&c, 0.5);
        assert_eq!(sets[ClassLabel::SpeechOther.index()].get("say"), Some(&0.8));
        assert!(sets.iter().all(|s| !s.contains_key("half")));
        assert!(sets[ClassLabel::OtherEvent.index()].contains_key("lone"));
        assert!(sets.iter().all(|s| !s.contains_key("absent")));
    }

    #[test]
    fn presence_g2_matches_reference_value() {
        // 20 occurrences, all private-state; reference from an independent
        // scipy computation
        let g2 = presence_g_squared(&[20, 0, 0, 0, 0, 0], &TOTALS);
        assert!((g2 - 95.99774185182645).abs() < 1e-9, "{g2}");
    }

    #[test]
    fn proportional_lemma_has_zero_g2() {
        let g2 = presence_g_squared(&[10, 9, 4, 24, 1, 52], &TOTALS);
        assert!(g2.abs() < 1e-9);
        let c = counts(&[("even", [10, 9, 4, 24, 1, 52])], TOTALS);
        assert!(select_over_range(&c, 0.01, 1).is_empty());
    }

    #[test]
    fn min_count_floor() {
        let c = counts(&[("once", [0, 0, 0, 0, 1, 0]), ("strong", [20, 0, 0, 0, 0, 0])], TOTALS);
        let words = select_over_range(&c, 0.01, 2);
        assert!(!words.contains_key("once"));
        assert!(words.contains_key("strong"));
    }

    #[test]
    fn invalid_parameters() {
        assert!(Selection::PerClass { k: 1.0 }.validate().is_err());
        assert!(Selection::OverRange { alpha: 0.0, min_count: 1 }.validate().is_err());
        assert!(Selection::default().validate().is_ok());
    }
}
