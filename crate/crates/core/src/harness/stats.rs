//! How often per-class collocation features fire, and how often wrongly.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::{ClassLabel, Corpus};
use crate::features::{CollocationInventory, FeatureError, Organization, Organizer};
use crate::patterns::PatternIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureFiring {
    pub class: ClassLabel,
    /// Sentences where the feature fires.
    pub positives: usize,
    /// Firings on sentences whose gold class is a different one.
    pub false_positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationStats {
    pub sentences: usize,
    pub features: Vec<FeatureFiring>,
    /// Arithmetic means over the features.
    pub mean_positives: f64,
    pub mean_false_positives: f64,
}

/// Firing counts of the per-class binary features of `inv` on `corpus`.
pub fn collocation_stats(
    corpus: &Corpus,
    index: &PatternIndex,
    inv: &CollocationInventory,
) -> Result<CollocationStats, HarnessError> {
    if !inv.is_per_class() {
        return Err(FeatureError::ModeMismatch {
            organization: "pc1",
            per_class_inventory: false,
        }
        .into());
    }
    let organizer = Organizer::new(inv, Organization::Pc1)?;
    let classes: Vec<ClassLabel> = organizer
        .variables()
        .iter()
        .map(|v| {
            let name = v.name.trim_start_matches("pc1:");
            name.parse().expect("pc1 variables are named by class")
        })
        .collect();
    let mut features: Vec<FeatureFiring> = classes
        .iter()
        .map(|&class| FeatureFiring {
            class,
            positives: 0,
            false_positives: 0,
        })
        .collect();
    for (r, s) in corpus.sentences() {
        let gold = s.gold_class.ok_or(HarnessError::Unlabeled)?;
        for (f, v) in features.iter_mut().zip(organizer.encode(index.get(r))) {
            if v == 1 {
                f.positives += 1;
                if gold != f.class {
                    f.false_positives += 1;
                }
            }
        }
    }
    let mean = |g: fn(&FeatureFiring) -> usize| {
        if features.is_empty() {
            0.0
        } else {
            features.iter().map(g).sum::<usize>() as f64 / features.len() as f64
        }
    };
    Ok(CollocationStats {
        sentences: corpus.num_sentences(),
        mean_positives: mean(|f| f.positives),
        mean_false_positives: mean(|f| f.false_positives),
        features,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Selection;
    use crate::harness::{generate_synthetic, pattern_index, SynthParams};
    use crate::patterns::PatternFamily;

    fn setup() -> (Corpus, PatternIndex) {
        let c = generate_synthetic(&SynthParams {
            sentences: 400,
            ..Default::default()
        })
        .unwrap()
        .corpus;
        let index = pattern_index(&c);
        (c, index)
    }

    #[test]
    fn counts_match_direct_scan() {
        let (c, index) = setup();
        let inv = CollocationInventory::build(
            &c,
            &index,
            PatternFamily::Syntactic.patterns(),
            Selection::PerClass { k: 0.5 },
        )
        .unwrap();
        let stats = collocation_stats(&c, &index, &inv).unwrap();
        for f in &stats.features {
            let (mut pos, mut fp) = (0, 0);
            for (r, s) in c.sentences() {
                let m = index.get(r);
                let fires = inv.patterns.iter().any(|pc| {
                    pc.class_set(f.class)
                        .is_some_and(|set| m.get(pc.pattern).iter().any(|x| set.contains_key(&x.lemma)))
                });
                if fires {
                    pos += 1;
                    fp += usize::from(s.gold_class != Some(f.class));
                }
            }
            assert_eq!((f.positives, f.false_positives), (pos, fp), "{:?}", f.class);
        }
        let n = stats.features.len() as f64;
        let total: usize = stats.features.iter().map(|f| f.positives).sum();
        assert!((stats.mean_positives - total as f64 / n).abs() < 1e-12);
    }

    #[test]
    fn silent_feature_counts_zero() {
        let (c, index) = setup();
        let mut inv = CollocationInventory::build(
            &c,
            &index,
            PatternFamily::Syntactic.patterns(),
            Selection::PerClass { k: 0.5 },
        )
        .unwrap();
        for pc in &mut inv.patterns {
            for cc in &mut pc.per_class {
                if cc.class == ClassLabel::PrivateState {
                    cc.lemmas = [("never-seen".to_string(), 1.0)].into();
                }
            }
        }
        let stats = collocation_stats(&c, &index, &inv).unwrap();
        let ps = stats.features.iter().find(|f| f.class == ClassLabel::PrivateState).unwrap();
        assert_eq!((ps.positives, ps.false_positives), (0, 0));
    }

    #[test]
    fn over_range_inventory_is_rejected() {
        let (c, index) = setup();
        let inv = CollocationInventory::build(
            &c,
            &index,
            PatternFamily::Syntactic.patterns(),
            Selection::OverRange {
                alpha: 0.01,
                min_count: 1,
            },
        )
        .unwrap();
        assert!(collocation_stats(&c, &index, &inv).is_err());
    }
}
