//! Seeded synthetic corpora with planted collocations.
//!
//! Sentences are built from clause frames (subject, verb group, complement,
//! adjuncts) over pseudo-word vocabularies, so every pattern extractor sees
//! realistic material. Two kinds of class evidence are planted:
//!
//! * syntactic indicators: many rare lemmas per class placed in the four
//!   syntactic slots (main verb, adjective after a copula, embedded verb,
//!   adjective after an embedded copula);
//! * co-occurrence indicators: a few frequent lemmas per class placed in an
//!   arbitrary noun slot and only weakly tied to their class.
//!
//! Everything else is drawn from Zipf-distributed filler vocabularies. The
//! defaults put the generator in the sparse-strong regime: per-class
//! syntactic features fire about 24 times per 255 sentences with about 7 false
//! positives, co-occurrence features far more often and less purely.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::{ClassLabel, Corpus, Document, Sentence, Span, Tagset, Token};

/// Class proportions of the annotated corpus the generator imitates.
pub const TABLE1_DISTRIBUTION: [f64; ClassLabel::COUNT] = [0.10, 0.09, 0.04, 0.24, 0.01, 0.52];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorSpec {
    /// Pool size per class.
    pub lemmas_per_class: usize,
    /// Zipf exponent over pool ranks.
    pub zipf_exponent: f64,
    /// Probability that a sentence of each class receives a planted lemma.
    pub fire_rates: [f64; ClassLabel::COUNT],
    /// Probability that the planted lemma comes from the sentence's own class
    /// pool; otherwise the pool is drawn from the class distribution.
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillerSpec {
    pub verbs: usize,
    pub nouns: usize,
    pub adjectives: usize,
    pub zipf_exponent: f64,
    /// Inclusive range of prepositional adjuncts after the complement.
    pub adjuncts: [usize; 2],
    /// Probability of an adjective inside a filler noun phrase.
    pub adjective_rate: f64,
    /// Probability of an extra trailing ", and ..." clause.
    pub coordinate_clause_rate: f64,
    /// Sentences without a quotation carry one secondary clause, as quoting
    /// sentences do, so clause counts do not reveal the class. This is the
    /// probability that it is a preposed "when ..." clause outside the main
    /// clause rather than a coordinated one.
    pub preposed_clause_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscourseSpec {
    /// Inclusive range of sentences per document.
    pub document_sentences: [usize; 2],
    /// Inclusive range of sentences per paragraph.
    pub paragraph_sentences: [usize; 2],
    /// Probability that a non-initial sentence of a paragraph repeats the
    /// previous sentence's class instead of drawing afresh.
    pub stickiness: f64,
    /// Probability of a trailing "according to" phrase on speech-3 sentences.
    pub according_to_rate: f64,
    /// The same for every other class.
    pub according_to_noise: f64,
    /// Probability of a short scare quote in non-speech sentences.
    pub scare_quote_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub seed: u64,
    pub sentences: usize,
    pub class_distribution: [f64; ClassLabel::COUNT],
    pub discourse: DiscourseSpec,
    pub syntactic: IndicatorSpec,
    /// Relative frequency of the main-verb, copular-adjective, embedded-verb
    /// and embedded-adjective slots for syntactic indicators.
    pub syntactic_slots: [f64; 4],
    pub cooccurrence: IndicatorSpec,
    pub filler: FillerSpec,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 7,
            sentences: 2544,
            class_distribution: TABLE1_DISTRIBUTION,
            discourse: DiscourseSpec {
                document_sentences: [12, 36],
                paragraph_sentences: [1, 4],
                stickiness: 0.25,
                according_to_rate: 0.12,
                according_to_noise: 0.01,
                scare_quote_rate: 0.05,
            },
            syntactic: IndicatorSpec {
                lemmas_per_class: 60,
                zipf_exponent: 0.3,
                fire_rates: [0.33, 0.33, 0.33, 0.33, 0.33, 0.45],
                purity: 0.95,
            },
            syntactic_slots: [0.55, 0.15, 0.2, 0.1],
            cooccurrence: IndicatorSpec {
                lemmas_per_class: 2,
                zipf_exponent: 0.0,
                fire_rates: [0.6; ClassLabel::COUNT],
                purity: 0.3,
            },
            filler: FillerSpec {
                verbs: 150,
                nouns: 3000,
                adjectives: 800,
                zipf_exponent: 1.0,
                adjuncts: [0, 2],
                adjective_rate: 0.3,
                coordinate_clause_rate: 0.35,
                preposed_clause_rate: 0.2,
            },
        }
    }
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::InfeasibleParams(message()))
    }
}

fn check_range(name: &str, r: [usize; 2]) -> Result<(), HarnessError> {
    check(r[0] >= 1 && r[0] <= r[1], || format!("{name} range {r:?} must satisfy 1 <= min <= max"))
}

fn check_probability(name: &str, p: f64) -> Result<(), HarnessError> {
    check((0.0..=1.0).contains(&p), || format!("{name} must lie in [0, 1], got {p}"))
}

impl IndicatorSpec {
    fn validate(&self, name: &str) -> Result<(), HarnessError> {
        check(self.fire_rates.iter().all(|&f| f > 0.0 && f < 1.0), || {
            format!("{name} fire rates must lie in (0, 1), got {:?}", self.fire_rates)
        })?;
        check(self.purity > 0.0 && self.purity <= 1.0, || {
            format!("{name} purity must lie in (0, 1], got {}", self.purity)
        })?;
        check(self.lemmas_per_class >= 1, || format!("{name} pools must hold at least one lemma"))?;
        check(self.zipf_exponent >= 0.0, || format!("{name} Zipf exponent must be non-negative"))
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), HarnessError> {
        check(self.sentences >= 1, || "at least one sentence is required".into())?;
        let sum: f64 = self.class_distribution.iter().sum();
        check(
            (sum - 1.0).abs() < 1e-9 && self.class_distribution.iter().all(|&p| p >= 0.0),
            || format!("class distribution must be non-negative and sum to 1, sums to {sum}"),
        )?;
        check_range("document_sentences", self.discourse.document_sentences)?;
        check_range("paragraph_sentences", self.discourse.paragraph_sentences)?;
        check_probability("stickiness", self.discourse.stickiness)?;
        check_probability("according_to_rate", self.discourse.according_to_rate)?;
        check_probability("according_to_noise", self.discourse.according_to_noise)?;
        check_probability("scare_quote_rate", self.discourse.scare_quote_rate)?;
        self.syntactic.validate("syntactic")?;
        self.cooccurrence.validate("cooccurrence")?;
        check(
            self.syntactic_slots.iter().all(|&w| w >= 0.0) && self.syntactic_slots.iter().sum::<f64>() > 0.0,
            || "syntactic slot weights must be non-negative with a positive sum".into(),
        )?;
        let f = &self.filler;
        check(f.verbs >= 1 && f.nouns >= 1 && f.adjectives >= 1, || {
            "filler vocabularies must be non-empty".into()
        })?;
        check(f.zipf_exponent >= 0.0, || "filler Zipf exponent must be non-negative".into())?;
        check(f.adjuncts[0] <= f.adjuncts[1], || "adjunct range must satisfy min <= max".into())?;
        check_probability("adjective_rate", f.adjective_rate)?;
        check_probability("coordinate_clause_rate", f.coordinate_clause_rate)?;
        check_probability("preposed_clause_rate", f.preposed_clause_rate)
    }
}

/// A generated corpus with the planted lemma pools, by class.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    /// Syntactic indicator lemmas of each class.
    pub syntactic_lemmas: BTreeMap<ClassLabel, BTreeSet<String>>,
    /// Co-occurrence indicator lemmas of each class.
    pub cooccurrence_lemmas: BTreeMap<ClassLabel, BTreeSet<String>>,
}

/// Zipf-weighted vocabulary of pseudo-words.
struct Vocabulary {
    words: Vec<String>,
    dist: WeightedIndex<f64>,
}

impl Vocabulary {
    fn new(prefix: &str, size: usize, exponent: f64) -> Self {
        let words = (0..size).map(|i| format!("{prefix}{i}")).collect();
        let weights: Vec<f64> = (1..=size).map(|r| (r as f64).powf(-exponent)).collect();
        Vocabulary {
            words,
            dist: WeightedIndex::new(weights).expect("non-empty positive weights"),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &str {
        &self.words[self.dist.sample(rng)]
    }
}

const VERB_SLOT: usize = 0;
const COPULA_SLOT: usize = 1;
const EMBEDDED_VERB_SLOT: usize = 2;
const EMBEDDED_ADJ_SLOT: usize = 3;

const CLASS_TAGS: [&str; ClassLabel::COUNT] = ["ps", "sa", "sb", "sc", "bl", "oe"];
const DETERMINERS: [&str; 3] = ["the", "a", "this"];
const PRONOUNS: [&str; 3] = ["he", "she", "they"];
const PREPOSITIONS: [&str; 4] = ["in", "of", "for", "on"];
const COPULAS: [(&str, &str); 3] = [("be", "was"), ("seem", "seemed"), ("become", "became")];
/// Governing verbs for embedded-verb frames: lemma, and whether an object NP
/// and "to" precede the embedded verb.
const GOVERNORS: [(&str, bool, bool); 5] = [
    ("make", true, false),
    ("let", true, false),
    ("want", true, true),
    ("ask", true, true),
    ("try", false, true),
];
const RAISERS: [&str; 3] = ["seem", "try", "want"];

struct Generator<'a> {
    params: &'a SynthParams,
    rng: ChaCha8Rng,
    classes: WeightedIndex<f64>,
    verbs: Vocabulary,
    nouns: Vocabulary,
    adjectives: Vocabulary,
    /// [class][slot kind: verb, adjective]
    syntactic: Vec<[Vocabulary; 2]>,
    cooccurrence: Vec<Vocabulary>,
    slots: WeightedIndex<f64>,
}

fn token(word: &str, pos: &str, lemma: &str) -> Token {
    Token::new(word, pos, lemma)
}

impl<'a> Generator<'a> {
    fn new(params: &'a SynthParams) -> Self {
        let s = &params.syntactic;
        let c = &params.cooccurrence;
        let f = &params.filler;
        Generator {
            params,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            classes: WeightedIndex::new(params.class_distribution).expect("validated distribution"),
            verbs: Vocabulary::new("fv", f.verbs, f.zipf_exponent),
            nouns: Vocabulary::new("fn", f.nouns, f.zipf_exponent),
            adjectives: Vocabulary::new("fa", f.adjectives, f.zipf_exponent),
            syntactic: CLASS_TAGS
                .iter()
                .map(|tag| {
                    [
                        Vocabulary::new(&format!("{tag}v"), s.lemmas_per_class, s.zipf_exponent),
                        Vocabulary::new(&format!("{tag}a"), s.lemmas_per_class, s.zipf_exponent),
                    ]
                })
                .collect(),
            cooccurrence: CLASS_TAGS
                .iter()
                .map(|tag| Vocabulary::new(&format!("{tag}n"), c.lemmas_per_class, c.zipf_exponent))
                .collect(),
            slots: WeightedIndex::new(params.syntactic_slots).expect("validated slot weights"),
        }
    }

    fn pick<'w>(&mut self, words: &[&'w str]) -> &'w str {
        words[self.rng.random_range(0..words.len())]
    }

    /// Pool class for a planted lemma: the sentence's own class with
    /// probability `purity`, else a draw from the class distribution.
    fn source_class(&mut self, class: usize, purity: f64) -> usize {
        if self.rng.random_bool(purity) {
            class
        } else {
            self.classes.sample(&mut self.rng)
        }
    }

    fn noun_phrase(&mut self, out: &mut Vec<Token>) {
        let det = self.pick(&DETERMINERS);
        out.push(token(det, "DT", det));
        if self.rng.random_bool(self.params.filler.adjective_rate) {
            let a = self.adjectives.draw(&mut self.rng).to_string();
            out.push(token(&a, "JJ", &a));
        }
        let n = self.nouns.draw(&mut self.rng).to_string();
        out.push(token(&n, "NN", &n));
    }

    fn subject(&mut self, out: &mut Vec<Token>) {
        if self.rng.random_bool(0.4) {
            let p = self.pick(&PRONOUNS);
            out.push(token(p, "PRP", p));
        } else {
            self.noun_phrase(out);
        }
    }

    fn adjuncts(&mut self, out: &mut Vec<Token>) {
        let [lo, hi] = self.params.filler.adjuncts;
        for _ in 0..self.rng.random_range(lo..=hi) {
            let p = self.pick(&PREPOSITIONS);
            out.push(token(p, "IN", p));
            self.noun_phrase(out);
        }
    }

    /// Auxiliaries plus the main verb `lemma`.
    fn verb_group(&mut self, lemma: &str, out: &mut Vec<Token>) {
        match self.rng.random_range(0..10) {
            0 => {
                out.push(token("will", "MD", "will"));
                out.push(token(lemma, "VB", lemma));
            }
            1 => {
                out.push(token("has", "VBZ", "have"));
                out.push(token(&format!("{lemma}ed"), "VBN", lemma));
            }
            2 | 3 => out.push(token(&format!("{lemma}s"), "VBZ", lemma)),
            _ => out.push(token(&format!("{lemma}ed"), "VBD", lemma)),
        }
    }

    /// A filler clause: subject, verb, object.
    fn simple_clause(&mut self, out: &mut Vec<Token>) {
        self.subject(out);
        let v = self.verbs.draw(&mut self.rng).to_string();
        out.push(token(&format!("{v}ed"), "VBD", &v));
        self.noun_phrase(out);
    }

    fn indicator(&mut self, class: usize, kind: usize) -> String {
        let src = self.source_class(class, self.params.syntactic.purity);
        self.syntactic[src][kind].draw(&mut self.rng).to_string()
    }

    /// Main clause: subject, verb group and a complement. The syntactic slot
    /// receives a planted lemma when `slot` is set.
    fn main_clause(&mut self, class: usize, slot: Option<usize>, main_verb: Option<String>, out: &mut Vec<Token>) {
        self.subject(out);
        match slot {
            Some(COPULA_SLOT) => {
                let (lemma, form) = COPULAS[self.rng.random_range(0..COPULAS.len())];
                out.push(token(form, "VBD", lemma));
                if self.rng.random_bool(0.3) {
                    out.push(token("very", "RB", "very"));
                }
                let a = self.indicator(class, 1);
                out.push(token(&a, "JJ", &a));
            }
            Some(EMBEDDED_VERB_SLOT) => {
                let (gov, object, to) = GOVERNORS[self.rng.random_range(0..GOVERNORS.len())];
                self.verb_group(gov, out);
                if object {
                    self.noun_phrase(out);
                }
                if to {
                    out.push(token("to", "TO", "to"));
                }
                let v = self.indicator(class, 0);
                out.push(token(&v, "VB", &v));
                self.noun_phrase(out);
            }
            Some(EMBEDDED_ADJ_SLOT) => {
                let gov = self.pick(&RAISERS);
                self.verb_group(gov, out);
                out.push(token("to", "TO", "to"));
                out.push(token("be", "VB", "be"));
                let a = self.indicator(class, 1);
                out.push(token(&a, "JJ", &a));
            }
            _ => {
                let v = match (slot, main_verb) {
                    (Some(VERB_SLOT), _) => self.indicator(class, 0),
                    (_, Some(v)) => v,
                    _ => self.verbs.draw(&mut self.rng).to_string(),
                };
                self.verb_group(&v, out);
                self.noun_phrase(out);
            }
        }
        self.adjuncts(out);
    }

    fn quoted(&mut self, out: &mut Vec<Token>, body: impl FnOnce(&mut Self, &mut Vec<Token>)) {
        let start = out.len();
        out.push(token("``", "``", "``"));
        body(self, out);
        out.push(token("''", "''", "''"));
        for t in &mut out[start..] {
            t.in_quote = true;
        }
    }

    fn sentence(&mut self, class: usize) -> Sentence {
        let label = ClassLabel::from_index(class).expect("class index");
        let slot = self
            .rng
            .random_bool(self.params.syntactic.fire_rates[class])
            .then(|| self.slots.sample(&mut self.rng));
        let mut tokens = Vec::new();
        let mut clause_start = 0;

        let quoting = matches!(label, ClassLabel::SpeechDirect | ClassLabel::SpeechMixed);
        let mut coordinated = usize::from(self.rng.random_bool(self.params.filler.coordinate_clause_rate));
        if !quoting {
            if self.rng.random_bool(self.params.filler.preposed_clause_rate) {
                tokens.push(token("when", "WRB", "when"));
                self.simple_clause(&mut tokens);
                tokens.push(token(",", ",", ","));
                clause_start = tokens.len();
            } else {
                coordinated += 1;
            }
        }
        match label {
            ClassLabel::SpeechDirect => {
                // quotation first, then the attribution clause
                self.quoted(&mut tokens, |g, out| {
                    g.simple_clause(out);
                    out.push(token(",", ",", ","));
                });
                clause_start = tokens.len();
                self.main_clause(class, slot, None, &mut tokens);
            }
            ClassLabel::SpeechMixed => {
                self.main_clause(class, slot, None, &mut tokens);
                tokens.push(token("that", "IN", "that"));
                self.subject(&mut tokens);
                let v = self.verbs.draw(&mut self.rng).to_string();
                tokens.push(token(&format!("{v}ed"), "VBD", &v));
                self.quoted(&mut tokens, |g, out| {
                    g.noun_phrase(out);
                });
            }
            _ => {
                self.main_clause(class, slot, None, &mut tokens);
                if !label.is_ps_or_speech() && self.rng.random_bool(self.params.discourse.scare_quote_rate) {
                    tokens.push(token("as", "IN", "as"));
                    self.quoted(&mut tokens, |g, out| {
                        let a = g.adjectives.draw(&mut g.rng).to_string();
                        out.push(token(&a, "JJ", &a));
                    });
                }
            }
        }
        for _ in 0..coordinated {
            tokens.push(token(",", ",", ","));
            tokens.push(token("and", "CC", "and"));
            self.simple_clause(&mut tokens);
        }
        let according = if label == ClassLabel::SpeechOther {
            self.params.discourse.according_to_rate
        } else {
            self.params.discourse.according_to_noise
        };
        if self.rng.random_bool(according) {
            tokens.push(token(",", ",", ","));
            tokens.push(token("according", "VBG", "accord"));
            tokens.push(token("to", "TO", "to"));
            self.noun_phrase(&mut tokens);
        }
        if self.rng.random_bool(self.params.cooccurrence.fire_rates[class]) {
            let src = self.source_class(class, self.params.cooccurrence.purity);
            let lemma = self.cooccurrence[src].draw(&mut self.rng).to_string();
            let nouns: Vec<usize> = (0..tokens.len())
                .filter(|&i| tokens[i].pos == "NN" && tokens[i].lemma.starts_with("fn"))
                .collect();
            if nouns.is_empty() {
                tokens.push(token("with", "IN", "with"));
                tokens.push(token("the", "DT", "the"));
                tokens.push(token(&lemma, "NN", &lemma));
            } else {
                let target = nouns[self.rng.random_range(0..nouns.len())];
                tokens[target] = Token {
                    in_quote: tokens[target].in_quote,
                    ..token(&lemma, "NN", &lemma)
                };
            }
        }
        tokens.push(token(".", ".", "."));

        let mut s = Sentence::new(tokens);
        if clause_start > 0 {
            s.main_clause = Some(Span::new(clause_start, s.tokens.len()));
        }
        s.gold_class = Some(label);
        s
    }

    /// Document lengths and paragraph-start flags, in corpus order.
    fn layout(&mut self) -> Vec<Vec<bool>> {
        let d = &self.params.discourse;
        let mut docs = Vec::new();
        let mut remaining = self.params.sentences;
        while remaining > 0 {
            let len = self
                .rng
                .random_range(d.document_sentences[0]..=d.document_sentences[1])
                .min(remaining);
            remaining -= len;
            let mut starts = Vec::with_capacity(len);
            let mut left = 0;
            for _ in 0..len {
                starts.push(left == 0);
                if left == 0 {
                    left = self
                        .rng
                        .random_range(d.paragraph_sentences[0]..=d.paragraph_sentences[1]);
                }
                left -= 1;
            }
            docs.push(starts);
        }
        docs
    }

    /// Class labels meeting the distribution exactly (largest-remainder
    /// quotas), shuffled, then made sticky within paragraphs by swapping a
    /// later sentence of the previous class into place.
    fn labels(&mut self, starts: &[bool]) -> Vec<usize> {
        let n = starts.len();
        let exact: Vec<f64> = self.params.class_distribution.iter().map(|p| p * n as f64).collect();
        let mut quota: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut by_remainder: Vec<usize> = (0..quota.len()).collect();
        by_remainder.sort_by(|&a, &b| (exact[b] - quota[b] as f64).total_cmp(&(exact[a] - quota[a] as f64)));
        let short = n - quota.iter().sum::<usize>();
        for &c in by_remainder.iter().take(short) {
            quota[c] += 1;
        }
        let mut labels: Vec<usize> = quota.iter().enumerate().flat_map(|(c, &q)| vec![c; q]).collect();
        labels.shuffle(&mut self.rng);
        for i in 1..n {
            if !starts[i] && self.rng.random_bool(self.params.discourse.stickiness) {
                if let Some(j) = (i..n).find(|&j| labels[j] == labels[i - 1]) {
                    labels.swap(i, j);
                }
            }
        }
        labels
    }

    fn run(mut self) -> Result<SynthCorpus, HarnessError> {
        let layout = self.layout();
        let flat: Vec<bool> = layout.iter().flatten().copied().collect();
        let mut labels = self.labels(&flat).into_iter();
        let mut documents = Vec::new();
        for starts in layout {
            let sentences = starts
                .into_iter()
                .enumerate()
                .map(|(i, start)| {
                    let mut s = self.sentence(labels.next().expect("one label per sentence"));
                    s.sent_index = i;
                    s.paragraph_start = start;
                    s
                })
                .collect();
            documents.push(Document {
                id: format!("synth-{:04}", documents.len()),
                sentences,
            });
        }
        let mut provenance = BTreeMap::new();
        provenance.insert("generator".to_string(), "evcat-synth".to_string());
        provenance.insert("seed".to_string(), self.params.seed.to_string());
        let corpus = Corpus::new(Tagset::penn(), provenance, documents)
            .map_err(|e| HarnessError::Invariant(format!("generated corpus is invalid: {e}")))?;
        let pools = |vocabs: Vec<Vec<String>>| -> BTreeMap<ClassLabel, BTreeSet<String>> {
            ClassLabel::ALL
                .iter()
                .zip(vocabs)
                .map(|(&c, words)| (c, words.into_iter().collect()))
                .collect()
        };
        let syntactic = pools(
            self.syntactic
                .iter()
                .map(|[v, a]| v.words.iter().chain(&a.words).cloned().collect())
                .collect(),
        );
        let cooccurrence = pools(self.cooccurrence.iter().map(|v| v.words.clone()).collect());
        Ok(SynthCorpus {
            corpus,
            syntactic_lemmas: syntactic,
            cooccurrence_lemmas: cooccurrence,
        })
    }
}

/// Generates a labeled corpus; identical parameters give identical corpora.
pub fn generate_synthetic(params: &SynthParams) -> Result<SynthCorpus, HarnessError> {
    params.validate()?;
    Generator::new(params).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{PatternFamily, PatternIndex};
    use crate::corpus::CopularVerbs;

    #[test]
    fn table1_proportions() {
        let params = SynthParams {
            seed: 7,
            ..Default::default()
        };
        let corpus = generate_synthetic(&params).unwrap().corpus;
        assert_eq!(corpus.num_sentences(), 2544);
        for (got, want) in corpus.class_distribution().iter().zip(TABLE1_DISTRIBUTION) {
            assert!((got - want).abs() <= 0.02, "{got} vs {want}");
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let p = SynthParams {
            sentences: 300,
            ..Default::default()
        };
        let a = generate_synthetic(&p).unwrap().corpus.to_jsonl();
        assert_eq!(a, generate_synthetic(&p).unwrap().corpus.to_jsonl());
        let q = SynthParams { seed: 8, ..p };
        assert_ne!(a, generate_synthetic(&q).unwrap().corpus.to_jsonl());
    }

    #[test]
    fn every_pattern_fires() {
        let c = generate_synthetic(&SynthParams {
            sentences: 400,
            ..Default::default()
        })
        .unwrap()
        .corpus;
        let index = PatternIndex::build(&c, &CopularVerbs::default());
        for family in PatternFamily::ALL {
            for &p in family.patterns() {
                let n = c.sentences().filter(|(r, _)| !index.get(*r).get(p).is_empty()).count();
                assert!(n > 0, "{p} never matches");
            }
        }
        let no_mv = c.sentences().filter(|(r, _)| index.get(*r).main_verb.is_none()).count();
        assert_eq!(no_mv, 0);
    }

    #[test]
    fn pure_indicators_never_misfire() {
        let mut p = SynthParams {
            sentences: 800,
            ..Default::default()
        };
        p.syntactic.purity = 1.0;
        let synth = generate_synthetic(&p).unwrap();
        let c = &synth.corpus;
        let index = crate::harness::pattern_index(c);
        let patterns = PatternFamily::Syntactic.patterns();
        let mut inv = crate::features::CollocationInventory::build(
            c,
            &index,
            patterns,
            crate::features::Selection::PerClass { k: 0.5 },
        )
        .unwrap();
        for pc in &mut inv.patterns {
            for cc in &mut pc.per_class {
                cc.lemmas.retain(|w, _| synth.syntactic_lemmas[&cc.class].contains(w));
            }
        }
        let stats = crate::harness::collocation_stats(c, &index, &inv).unwrap();
        assert!(stats.features.iter().map(|f| f.positives).sum::<usize>() > 100);
        assert!(stats.features.iter().all(|f| f.false_positives == 0), "{stats:?}");
    }

    #[test]
    fn discourse_features_vary() {
        let c = generate_synthetic(&SynthParams {
            sentences: 600,
            ..Default::default()
        })
        .unwrap()
        .corpus;
        let ratio = |s: &Sentence| s.tokens.iter().filter(|t| t.in_quote).count() as f64 / s.len() as f64;
        let mut levels = BTreeSet::new();
        let (mut starts, mut according) = (0, 0);
        for (_, s) in c.sentences() {
            let r = ratio(s);
            levels.insert(if r < 0.1 { 0 } else if r <= 0.3 { 1 } else { 2 });
            starts += usize::from(s.paragraph_start);
            according += usize::from(s.tokens.iter().any(|t| t.surface == "according"));
        }
        assert_eq!(levels.len(), 3);
        assert!(starts > 100 && starts < 500, "{starts}");
        assert!(according > 0);
    }

    #[test]
    fn exact_quotas() {
        for n in [7, 100, 2544] {
            let c = generate_synthetic(&SynthParams {
                sentences: n,
                ..Default::default()
            })
            .unwrap()
            .corpus;
            let mut counts = [0usize; ClassLabel::COUNT];
            for (_, s) in c.sentences() {
                counts[s.gold_class.unwrap().index()] += 1;
            }
            assert_eq!(counts.iter().sum::<usize>(), n);
            for (count, p) in counts.iter().zip(TABLE1_DISTRIBUTION) {
                assert!((*count as f64 - p * n as f64).abs() < 1.0, "{counts:?}");
            }
        }
    }

    #[test]
    fn infeasible_params() {
        let mut p = SynthParams::default();
        p.class_distribution[0] = 0.5;
        assert!(matches!(generate_synthetic(&p), Err(HarnessError::InfeasibleParams(_))));
        let mut p = SynthParams::default();
        p.syntactic.fire_rates[2] = 1.0;
        assert!(generate_synthetic(&p).is_err());
        let mut p = SynthParams::default();
        p.cooccurrence.purity = 0.0;
        assert!(generate_synthetic(&p).is_err());
    }

    #[test]
    fn params_json_round_trip() {
        let p = SynthParams::default();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<SynthParams>(&json).unwrap(), p);
        let partial: SynthParams = serde_json::from_str(r#"{"seed": 3, "sentences": 10}"#).unwrap();
        assert_eq!(partial.sentences, 10);
        assert!(serde_json::from_str::<SynthParams>(r#"{"sentence": 10}"#).is_err());
    }
}
