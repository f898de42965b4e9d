//! Nested fold plans: test / search / selection splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::{Corpus, SentenceRef};

/// The unit kept together when splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldMode {
    /// Whole documents go to one split, keeping discourse context intact.
    #[default]
    Document,
    Sentence,
}

/// One fold: held-out test data, and the remaining training data divided
/// into search data (model fitting) and selection data (model choice).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub fold: usize,
    pub seed: u64,
    #[serde(skip)]
    pub test: Vec<SentenceRef>,
    #[serde(skip)]
    pub search: Vec<SentenceRef>,
    #[serde(skip)]
    pub selection: Vec<SentenceRef>,
}

impl FoldPlan {
    /// Training data: search plus selection, in corpus order.
    pub fn training(&self) -> Vec<SentenceRef> {
        let mut refs: Vec<SentenceRef> = self.search.iter().chain(&self.selection).copied().collect();
        refs.sort_unstable();
        refs
    }
}

fn units(corpus: &Corpus, mode: FoldMode) -> Vec<Vec<SentenceRef>> {
    match mode {
        FoldMode::Document => corpus
            .documents()
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.sentences.is_empty())
            .map(|(doc, d)| (0..d.sentences.len()).map(|sent| SentenceRef { doc, sent }).collect())
            .collect(),
        FoldMode::Sentence => corpus.refs().into_iter().map(|r| vec![r]).collect(),
    }
}

/// Splits shuffled units into `k` consecutive blocks of about equal sentence
/// count: a unit goes to the block its first sentence falls into.
fn blocks(units: &[Vec<SentenceRef>], k: usize) -> Vec<Vec<usize>> {
    let total: usize = units.iter().map(Vec::len).sum();
    let mut out = vec![Vec::new(); k];
    let mut start = 0;
    for (u, unit) in units.iter().enumerate() {
        out[(start * k / total.max(1)).min(k - 1)].push(u);
        start += unit.len();
    }
    out
}

fn collect(units: &[Vec<SentenceRef>], chosen: impl IntoIterator<Item = usize>) -> Vec<SentenceRef> {
    let mut refs: Vec<SentenceRef> = chosen.into_iter().flat_map(|u| units[u].iter().copied()).collect();
    refs.sort_unstable();
    refs
}

/// `k` folds over the corpus. Each sentence is test data in exactly one
/// fold; about a tenth of each fold's training data becomes selection data.
pub fn plan_folds(corpus: &Corpus, k: usize, mode: FoldMode, seed: u64) -> Result<Vec<FoldPlan>, HarnessError> {
    let mut all = units(corpus, mode);
    if k < 2 || all.len() < k * 2 {
        return Err(HarnessError::CorpusTooSmall {
            units: all.len(),
            folds: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all.shuffle(&mut rng);
    let test_blocks = blocks(&all, k);
    let mut plans = Vec::with_capacity(k);
    for (fold, test_units) in test_blocks.iter().enumerate() {
        let mut train_units: Vec<usize> = (0..all.len()).filter(|u| !test_units.contains(u)).collect();
        let mut fold_rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(fold as u64 + 1)));
        train_units.shuffle(&mut fold_rng);
        let train_total: usize = train_units.iter().map(|&u| all[u].len()).sum();
        let target = train_total / 10;
        let mut selection = Vec::new();
        let mut search = Vec::new();
        let mut taken = 0;
        for u in train_units {
            if taken < target {
                taken += all[u].len();
                selection.push(u);
            } else {
                search.push(u);
            }
        }
        if selection.is_empty() || search.is_empty() || test_units.is_empty() {
            return Err(HarnessError::CorpusTooSmall {
                units: all.len(),
                folds: k,
            });
        }
        plans.push(FoldPlan {
            fold,
            seed,
            test: collect(&all, test_units.iter().copied()),
            search: collect(&all, search),
            selection: collect(&all, selection),
        });
    }
    Ok(plans)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::corpus::{Document, Sentence, Tagset, Token};

    fn corpus(doc_sizes: &[usize]) -> Corpus {
        let docs = doc_sizes
            .iter()
            .enumerate()
            .map(|(d, &n)| Document {
                id: format!("d{d}"),
                sentences: (0..n)
                    .map(|i| {
                        let mut s = Sentence::new(vec![Token::new("it", "PRP", "it")]);
                        s.sent_index = i;
                        s
                    })
                    .collect(),
            })
            .collect();
        Corpus::new(Tagset::penn(), BTreeMap::new(), docs).unwrap()
    }

    #[test]
    fn sentence_folds_have_paper_sizes() {
        let c = corpus(&vec![24; 106]);
        assert_eq!(c.num_sentences(), 2544);
        let plans = plan_folds(&c, 10, FoldMode::Sentence, 3).unwrap();
        for p in &plans {
            assert!((254..=255).contains(&p.test.len()), "{}", p.test.len());
            assert!((2060..=2062).contains(&p.search.len()), "{}", p.search.len());
            assert!((228..=230).contains(&p.selection.len()), "{}", p.selection.len());
        }
    }

    #[test]
    fn partitions_are_exact() {
        let c = corpus(&[5, 9, 3, 12, 7, 8, 4, 6, 10, 11, 2, 9, 5, 7, 6, 8, 3, 4, 9, 10, 6, 5]);
        for mode in [FoldMode::Document, FoldMode::Sentence] {
            let plans = plan_folds(&c, 10, mode, 42).unwrap();
            let mut seen_test = BTreeSet::new();
            for p in &plans {
                let all: Vec<SentenceRef> = p.test.iter().chain(&p.search).chain(&p.selection).copied().collect();
                let set: BTreeSet<SentenceRef> = all.iter().copied().collect();
                assert_eq!(set.len(), all.len());
                assert_eq!(set.len(), c.num_sentences());
                for r in &p.test {
                    assert!(seen_test.insert(*r));
                }
                if mode == FoldMode::Document {
                    let docs = |refs: &[SentenceRef]| refs.iter().map(|r| r.doc).collect::<BTreeSet<_>>();
                    assert!(docs(&p.test).is_disjoint(&docs(&p.training())));
                    assert!(docs(&p.search).is_disjoint(&docs(&p.selection)));
                }
            }
            assert_eq!(seen_test.len(), c.num_sentences());
        }
    }

    #[test]
    fn too_small() {
        assert!(plan_folds(&corpus(&[3, 3, 3]), 10, FoldMode::Document, 1).is_err());
    }

    #[test]
    fn seeded() {
        let c = corpus(&vec![10; 40]);
        assert_eq!(
            plan_folds(&c, 10, FoldMode::Document, 5).unwrap(),
            plan_folds(&c, 10, FoldMode::Document, 5).unwrap()
        );
        let a = plan_folds(&c, 10, FoldMode::Document, 5).unwrap();
        let b = plan_folds(&c, 10, FoldMode::Document, 6).unwrap();
        assert_ne!(a[0].test, b[0].test);
    }
}
