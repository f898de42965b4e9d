//! Collocational patterns: which lemmas of a sentence are candidates under
//! each of the ten patterns.
//!
//! Co-occurrence patterns span the whole sentence. Within-5 and syntactic
//! patterns are anchored at the main verb of the main clause; sentences
//! without one yield no matches for those families. Within one pattern and
//! sentence a lemma is reported once, at its first position.

use std::fmt;
use std::str::FromStr;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::corpus::tagset::{is_adjective, is_adverb, is_noun, is_verb};
use crate::corpus::{
    main_verb_group, match_np_approx, resolve_verb_group, Corpus, CopularVerbs, Sentence,
    SentenceRef, Token,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternId {
    #[serde(rename = "cooc-verb")]
    CoocVerb,
    #[serde(rename = "cooc-noun")]
    CoocNoun,
    #[serde(rename = "cooc-adj")]
    CoocAdj,
    #[serde(rename = "w5-verb")]
    W5Verb,
    #[serde(rename = "w5-noun")]
    W5Noun,
    #[serde(rename = "w5-adj")]
    W5Adj,
    #[serde(rename = "baseMV")]
    BaseMv,
    #[serde(rename = "baseAdj")]
    BaseAdj,
    #[serde(rename = "complexMV")]
    ComplexMv,
    #[serde(rename = "complexAdj")]
    ComplexAdj,
}

impl PatternId {
    pub const ALL: [PatternId; 10] = [
        PatternId::CoocVerb,
        PatternId::CoocNoun,
        PatternId::CoocAdj,
        PatternId::W5Verb,
        PatternId::W5Noun,
        PatternId::W5Adj,
        PatternId::BaseMv,
        PatternId::BaseAdj,
        PatternId::ComplexMv,
        PatternId::ComplexAdj,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::CoocVerb => "cooc-verb",
            PatternId::CoocNoun => "cooc-noun",
            PatternId::CoocAdj => "cooc-adj",
            PatternId::W5Verb => "w5-verb",
            PatternId::W5Noun => "w5-noun",
            PatternId::W5Adj => "w5-adj",
            PatternId::BaseMv => "baseMV",
            PatternId::BaseAdj => "baseAdj",
            PatternId::ComplexMv => "complexMV",
            PatternId::ComplexAdj => "complexAdj",
        }
    }

    pub fn family(self) -> PatternFamily {
        match self {
            PatternId::CoocVerb | PatternId::CoocNoun | PatternId::CoocAdj => {
                PatternFamily::Cooccurrence
            }
            PatternId::W5Verb | PatternId::W5Noun | PatternId::W5Adj => PatternFamily::Within5,
            _ => PatternFamily::Syntactic,
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pattern {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternFamily {
    Cooccurrence,
    Within5,
    Syntactic,
}

impl PatternFamily {
    pub const ALL: [PatternFamily; 3] = [
        PatternFamily::Cooccurrence,
        PatternFamily::Within5,
        PatternFamily::Syntactic,
    ];

    pub fn patterns(self) -> &'static [PatternId] {
        match self {
            PatternFamily::Cooccurrence => &PatternId::ALL[0..3],
            PatternFamily::Within5 => &PatternId::ALL[3..6],
            PatternFamily::Syntactic => &PatternId::ALL[6..10],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternFamily::Cooccurrence => "cooccurrence",
            PatternFamily::Within5 => "within-5",
            PatternFamily::Syntactic => "syntactic",
        }
    }
}

impl FromStr for PatternFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown pattern family {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosClass {
    Verb,
    Noun,
    Adj,
}

impl PosClass {
    pub fn of_tag(tag: &str) -> Option<PosClass> {
        if is_verb(tag) {
            Some(PosClass::Verb)
        } else if is_noun(tag) {
            Some(PosClass::Noun)
        } else if is_adjective(tag) {
            Some(PosClass::Adj)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternMatch {
    pub pattern: PatternId,
    pub lemma: String,
    pub token_index: usize,
}

fn collect_matches<I>(tokens: &[Token], pattern: PatternId, indices: I) -> Vec<PatternMatch>
where
    I: IntoIterator<Item = usize>,
{
    let mut out: Vec<PatternMatch> = Vec::new();
    for i in indices {
        let lemma = &tokens[i].lemma;
        if !out.iter().any(|m| &m.lemma == lemma) {
            out.push(PatternMatch {
                pattern,
                lemma: lemma.clone(),
                token_index: i,
            });
        }
    }
    out
}

fn cooc_pattern(class: PosClass) -> PatternId {
    match class {
        PosClass::Verb => PatternId::CoocVerb,
        PosClass::Noun => PatternId::CoocNoun,
        PosClass::Adj => PatternId::CoocAdj,
    }
}

fn w5_pattern(class: PosClass) -> PatternId {
    match class {
        PosClass::Verb => PatternId::W5Verb,
        PosClass::Noun => PatternId::W5Noun,
        PosClass::Adj => PatternId::W5Adj,
    }
}

/// Every lemma of the given POS class anywhere in the sentence.
pub fn extract_cooccurrence(s: &Sentence, class: PosClass) -> Vec<PatternMatch> {
    let idx = (0..s.tokens.len()).filter(|&i| PosClass::of_tag(&s.tokens[i].pos) == Some(class));
    collect_matches(&s.tokens, cooc_pattern(class), idx)
}

/// Lemmas of the given POS class within five tokens of the main verb,
/// excluding the main verb itself.
pub fn extract_within5(s: &Sentence, class: PosClass) -> Vec<PatternMatch> {
    match main_verb_group(s) {
        Ok(g) => within5_at(s, class, g.main),
        Err(_) => {
            debug!("within-5: no main verb, sentence skipped");
            Vec::new()
        }
    }
}

fn within5_at(s: &Sentence, class: PosClass, mv: usize) -> Vec<PatternMatch> {
    let lo = mv.saturating_sub(5);
    let hi = (mv + 5).min(s.tokens.len() - 1);
    let idx = (lo..=hi)
        .filter(|&i| i != mv && PosClass::of_tag(&s.tokens[i].pos) == Some(class));
    collect_matches(&s.tokens, w5_pattern(class), idx)
}

fn skip_adverbs(tokens: &[Token], mut i: usize) -> usize {
    while i < tokens.len() && is_adverb(&tokens[i].pos) {
        i += 1;
    }
    i
}

fn is_to(t: &Token) -> bool {
    t.pos == "TO" || t.lemma.eq_ignore_ascii_case("to")
}

/// Positions reachable after `main_verb adv* [NPapprox] ["to"]`.
fn complement_positions(tokens: &[Token], mv: usize) -> Vec<usize> {
    let j = skip_adverbs(tokens, mv + 1);
    let mut after_np = vec![j];
    if let Some(np) = match_np_approx(tokens, j) {
        after_np.push(np.end);
    }
    let mut out = Vec::new();
    for p in after_np {
        out.push(p);
        if p < tokens.len() && is_to(&tokens[p]) {
            out.push(p + 1);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Main verb of the verb group that starts at `i`, when `i` holds a verb.
fn embedded_verb(tokens: &[Token], i: usize) -> Option<usize> {
    if i >= tokens.len() || !is_verb(&tokens[i].pos) {
        return None;
    }
    resolve_verb_group(tokens, i, tokens.len()).0.map(|g| g.main)
}

/// Syntactic pattern matches anchored at main verb `mv`.
fn syntactic_at(
    tokens: &[Token],
    mv: usize,
    pattern: PatternId,
    copular: &CopularVerbs,
) -> Vec<PatternMatch> {
    let adj_after = |v: usize| {
        let a = skip_adverbs(tokens, v + 1);
        (a < tokens.len() && is_adjective(&tokens[a].pos)).then_some(a)
    };
    let idx: Vec<usize> = match pattern {
        PatternId::BaseMv => vec![mv],
        PatternId::BaseAdj => {
            if copular.is_copular(&tokens[mv].lemma) {
                adj_after(mv).into_iter().collect()
            } else {
                Vec::new()
            }
        }
        PatternId::ComplexMv => complement_positions(tokens, mv)
            .into_iter()
            .filter_map(|q| embedded_verb(tokens, q))
            .collect(),
        PatternId::ComplexAdj => complement_positions(tokens, mv)
            .into_iter()
            .filter_map(|q| embedded_verb(tokens, skip_adverbs(tokens, q)))
            .filter(|&v| copular.is_copular(&tokens[v].lemma))
            .filter_map(adj_after)
            .collect(),
        _ => Vec::new(),
    };
    collect_matches(tokens, pattern, idx)
}

/// Matches of a syntactic pattern (baseMV, baseAdj, complexMV, complexAdj).
/// Other pattern ids yield nothing.
pub fn extract_syntactic(s: &Sentence, pattern: PatternId, copular: &CopularVerbs) -> Vec<PatternMatch> {
    match main_verb_group(s) {
        Ok(g) => syntactic_at(&s.tokens, g.main, pattern, copular),
        Err(_) => {
            debug!("{pattern}: no main verb, sentence skipped");
            Vec::new()
        }
    }
}

/// Matches of any pattern.
pub fn extract(s: &Sentence, pattern: PatternId, copular: &CopularVerbs) -> Vec<PatternMatch> {
    match pattern {
        PatternId::CoocVerb => extract_cooccurrence(s, PosClass::Verb),
        PatternId::CoocNoun => extract_cooccurrence(s, PosClass::Noun),
        PatternId::CoocAdj => extract_cooccurrence(s, PosClass::Adj),
        PatternId::W5Verb => extract_within5(s, PosClass::Verb),
        PatternId::W5Noun => extract_within5(s, PosClass::Noun),
        PatternId::W5Adj => extract_within5(s, PosClass::Adj),
        _ => extract_syntactic(s, pattern, copular),
    }
}

/// Pattern matches of one sentence, for all ten patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceMatches {
    pub main_verb: Option<usize>,
    by_pattern: Vec<Vec<PatternMatch>>,
}

impl SentenceMatches {
    pub fn compute(s: &Sentence, copular: &CopularVerbs) -> Self {
        let main_verb = main_verb_group(s).ok().map(|g| g.main);
        let by_pattern = PatternId::ALL
            .iter()
            .map(|&p| match (p.family(), main_verb) {
                (PatternFamily::Cooccurrence, _) => extract(s, p, copular),
                (_, None) => Vec::new(),
                (PatternFamily::Within5, Some(mv)) => {
                    let class = match p {
                        PatternId::W5Verb => PosClass::Verb,
                        PatternId::W5Noun => PosClass::Noun,
                        _ => PosClass::Adj,
                    };
                    within5_at(s, class, mv)
                }
                (PatternFamily::Syntactic, Some(mv)) => syntactic_at(&s.tokens, mv, p, copular),
            })
            .collect();
        SentenceMatches {
            main_verb,
            by_pattern,
        }
    }

    /// Assembles matches computed elsewhere, grouped by their pattern.
    pub fn from_matches<I: IntoIterator<Item = PatternMatch>>(main_verb: Option<usize>, matches: I) -> Self {
        let mut by_pattern = vec![Vec::new(); PatternId::ALL.len()];
        for m in matches {
            by_pattern[m.pattern.index()].push(m);
        }
        SentenceMatches {
            main_verb,
            by_pattern,
        }
    }

    pub fn get(&self, p: PatternId) -> &[PatternMatch] {
        &self.by_pattern[p.index()]
    }
}

/// Pattern matches for every sentence of a corpus, addressed by [`SentenceRef`].
#[derive(Debug, Clone)]
pub struct PatternIndex {
    docs: Vec<Vec<SentenceMatches>>,
}

impl PatternIndex {
    pub fn build(corpus: &Corpus, copular: &CopularVerbs) -> Self {
        let docs = corpus
            .documents()
            .iter()
            .map(|d| {
                d.sentences
                    .iter()
                    .map(|s| SentenceMatches::compute(s, copular))
                    .collect()
            })
            .collect();
        PatternIndex { docs }
    }

    pub fn get(&self, r: SentenceRef) -> &SentenceMatches {
        &self.docs[r.doc][r.sent]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(spec: &[(&str, &str, &str)]) -> Sentence {
        Sentence::new(spec.iter().map(|(s, p, l)| Token::new(s, p, l)).collect())
    }

    fn lemmas(ms: &[PatternMatch]) -> Vec<&str> {
        ms.iter().map(|m| m.lemma.as_str()).collect()
    }

    fn analysts() -> Sentence {
        sentence(&[
            ("The", "DT", "the"),
            ("analysts", "NNS", "analyst"),
            ("said", "VBD", "say"),
            ("yesterday", "RB", "yesterday"),
            ("the", "DT", "the"),
            ("merger", "NN", "merger"),
            ("failed", "VBD", "fail"),
            (".", ".", "."),
        ])
    }

    #[test]
    fn cooccurrence_by_pos_class() {
        let s = analysts();
        assert_eq!(lemmas(&extract_cooccurrence(&s, PosClass::Noun)), ["analyst", "merger"]);
        assert_eq!(lemmas(&extract_cooccurrence(&s, PosClass::Verb)), ["say", "fail"]);
        assert!(extract_cooccurrence(&s, PosClass::Adj).is_empty());
    }

    #[test]
    fn cooccurrence_collapses_duplicate_lemmas() {
        let s = sentence(&[
            ("cats", "NNS", "cat"),
            ("see", "VBP", "see"),
            ("cats", "NNS", "cat"),
        ]);
        let m = extract_cooccurrence(&s, PosClass::Noun);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].token_index, 0);
    }

    #[test]
    fn within5_window() {
        // main verb at 2, nouns at 1 and 5 (inside), noun at 8 (distance 6)
        let s = sentence(&[
            ("Yesterday", "RB", "yesterday"),
            ("bankers", "NNS", "banker"),
            ("met", "VBD", "meet"),
            ("in", "IN", "in"),
            ("the", "DT", "the"),
            ("city", "NN", "city"),
            ("and", "CC", "and"),
            ("then", "RB", "then"),
            ("lunch", "NN", "lunch"),
        ]);
        let m = extract_within5(&s, PosClass::Noun);
        assert_eq!(lemmas(&m), ["banker", "city"]);
        assert!(extract_within5(&s, PosClass::Verb).is_empty());
    }

    #[test]
    fn within5_without_main_verb_is_empty() {
        let s = sentence(&[("Good", "JJ", "good"), ("news", "NN", "news")]);
        assert!(extract_within5(&s, PosClass::Noun).is_empty());
    }

    #[test]
    fn base_main_verb() {
        let s = sentence(&[
            ("She", "PRP", "she"),
            ("believes", "VBZ", "believe"),
            ("that", "IN", "that"),
            ("Mary", "NNP", "mary"),
            ("is", "VBZ", "be"),
            ("sweet", "JJ", "sweet"),
            (".", ".", "."),
        ]);
        let c = CopularVerbs::default();
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::BaseMv, &c)), ["believe"]);
        assert!(extract_syntactic(&s, PatternId::BaseAdj, &c).is_empty());
    }

    #[test]
    fn base_adjective_after_copula() {
        let c = CopularVerbs::default();
        for (v, l) in [("is", "be"), ("seems", "seem")] {
            let s = sentence(&[("She", "PRP", "she"), (v, "VBZ", l), ("happy", "JJ", "happy")]);
            assert_eq!(lemmas(&extract_syntactic(&s, PatternId::BaseAdj, &c)), ["happy"]);
        }
        let s = sentence(&[
            ("She", "PRP", "she"),
            ("is", "VBZ", "be"),
            ("very", "RB", "very"),
            ("happy", "JJ", "happy"),
        ]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::BaseAdj, &c)), ["happy"]);
        let s = sentence(&[("She", "PRP", "she"), ("eats", "VBZ", "eat"), ("raw", "JJ", "raw")]);
        assert!(extract_syntactic(&s, PatternId::BaseAdj, &c).is_empty());
    }

    #[test]
    fn complex_main_verb() {
        let c = CopularVerbs::default();
        let s = sentence(&[
            ("He", "PRP", "he"),
            ("made", "VBD", "make"),
            ("her", "PRP", "her"),
            ("jump", "VB", "jump"),
            (".", ".", "."),
        ]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::ComplexMv, &c)), ["jump"]);
    }

    #[test]
    fn complex_adjective() {
        let c = CopularVerbs::default();
        let s = sentence(&[
            ("He", "PRP", "he"),
            ("tried", "VBD", "try"),
            ("to", "TO", "to"),
            ("be", "VB", "be"),
            ("happy", "JJ", "happy"),
        ]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::ComplexAdj, &c)), ["happy"]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::ComplexMv, &c)), ["be"]);

        let s = sentence(&[
            ("It", "PRP", "it"),
            ("lead", "VBD", "lead"),
            ("him", "PRP", "him"),
            ("to", "TO", "to"),
            ("possibly", "RB", "possibly"),
            ("be", "VB", "be"),
            ("very", "RB", "very"),
            ("happy", "JJ", "happy"),
        ]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::ComplexAdj, &c)), ["happy"]);
        assert!(extract_syntactic(&s, PatternId::ComplexMv, &c).is_empty());
    }

    #[test]
    fn complex_patterns_with_noun_phrase_object() {
        let c = CopularVerbs::default();
        let s = sentence(&[
            ("They", "PRP", "they"),
            ("asked", "VBD", "ask"),
            ("the", "DT", "the"),
            ("head", "NN", "head"),
            ("of", "IN", "of"),
            ("the", "DT", "the"),
            ("bank", "NN", "bank"),
            ("to", "TO", "to"),
            ("resign", "VB", "resign"),
        ]);
        assert_eq!(lemmas(&extract_syntactic(&s, PatternId::ComplexMv, &c)), ["resign"]);
    }

    #[test]
    fn index_matches_direct_extraction() {
        let c = CopularVerbs::default();
        let s = analysts();
        let m = SentenceMatches::compute(&s, &c);
        for p in PatternId::ALL {
            assert_eq!(m.get(p), extract(&s, p, &c).as_slice(), "{p}");
        }
        assert_eq!(m.main_verb, Some(2));
    }

    #[test]
    fn names_round_trip() {
        for p in PatternId::ALL {
            assert_eq!(p.as_str().parse::<PatternId>(), Ok(p));
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.as_str()));
        }
        assert_eq!(PatternFamily::Syntactic.patterns().len(), 4);
        assert_eq!(PatternFamily::Within5.patterns().len(), 3);
        assert_eq!(PatternFamily::Cooccurrence.patterns().len(), 3);
    }
}
