//! Annotated corpora: tokens, sentences, documents and the JSON Lines file format.
//!
//! A corpus file is UTF-8 JSON Lines. The first line is a header
//!
//! ```text
//! {"format":"evcat-corpus","version":1,"tagset":"penn-treebank","provenance":{}}
//! ```
//!
//! and every following line is one sentence record. Records of a document
//! must appear in `sent_index` order starting at 0; documents keep the order
//! in which they first appear. Parsing rejects malformed records and never
//! repairs them. Writing is canonical, so `write(parse(write(c)))` is
//! byte-identical to `write(c)`.

mod np;
pub mod tagset;
mod verbs;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::Fingerprint;

pub use np::match_np_approx;
pub use tagset::Tagset;
pub use verbs::{find_main_verb, main_verb_group, resolve_verb_group, CopularVerbs, NoMainVerb, VerbGroup};

pub const FORMAT_NAME: &str = "evcat-corpus";
pub const FORMAT_VERSION: u32 = 1;

/// The six event categories, in their fixed label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "private-state")]
    PrivateState,
    #[serde(rename = "speech-1-direct")]
    SpeechDirect,
    #[serde(rename = "speech-2-mixed")]
    SpeechMixed,
    #[serde(rename = "speech-3-other")]
    SpeechOther,
    #[serde(rename = "borderline-ps-other")]
    Borderline,
    #[serde(rename = "other-event")]
    OtherEvent,
}

impl ClassLabel {
    pub const COUNT: usize = 6;

    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::PrivateState,
        ClassLabel::SpeechDirect,
        ClassLabel::SpeechMixed,
        ClassLabel::SpeechOther,
        ClassLabel::Borderline,
        ClassLabel::OtherEvent,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::PrivateState => "private-state",
            ClassLabel::SpeechDirect => "speech-1-direct",
            ClassLabel::SpeechMixed => "speech-2-mixed",
            ClassLabel::SpeechOther => "speech-3-other",
            ClassLabel::Borderline => "borderline-ps-other",
            ClassLabel::OtherEvent => "other-event",
        }
    }

    /// Private-state or any of the speech-event classes.
    pub fn is_ps_or_speech(self) -> bool {
        matches!(
            self,
            ClassLabel::PrivateState
                | ClassLabel::SpeechDirect
                | ClassLabel::SpeechMixed
                | ClassLabel::SpeechOther
        )
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown class label {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    pub lemma: String,
    pub in_quote: bool,
}

impl Token {
    pub fn new(surface: &str, pos: &str, lemma: &str) -> Self {
        Token {
            surface: surface.to_string(),
            pos: pos.to_string(),
            lemma: lemma.to_string(),
            in_quote: false,
        }
    }

    pub fn quoted(mut self) -> Self {
        self.in_quote = true;
        self
    }
}

/// Half-open token index range `[start, end)`, written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub sent_index: usize,
    pub paragraph_start: bool,
    pub tokens: Vec<Token>,
    /// Explicit main-clause span; `None` means the whole sentence.
    pub main_clause: Option<Span>,
    pub main_verb_index: Option<usize>,
    pub gold_class: Option<ClassLabel>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            sent_index: 0,
            paragraph_start: false,
            tokens,
            main_clause: None,
            main_verb_index: None,
            gold_class: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The main-clause span, defaulting to the whole sentence.
    pub fn main_clause_span(&self) -> Span {
        self.main_clause
            .unwrap_or_else(|| Span::new(0, self.tokens.len()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

/// Position of a sentence inside a corpus: document index and sentence index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceRef {
    pub doc: usize,
    pub sent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    tagset: Tagset,
    provenance: BTreeMap<String, String>,
    documents: Vec<Document>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unsupported header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: unknown pos tag {tag:?}")]
    UnknownPos { line: usize, tag: String },
    #[error("line {line}: unknown class label {label:?}")]
    UnknownClass { line: usize, label: String },
    #[error("line {line}: span out of bounds: [{start},{end}) over {len} tokens")]
    SpanOutOfBounds {
        line: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("line {line}: main verb index {index} outside main clause [{start},{end})")]
    MainVerbOutsideClause {
        line: usize,
        index: usize,
        start: usize,
        end: usize,
    },
    #[error("line {line}: duplicate sentence ({doc_id}, {sent_index})")]
    Duplicate {
        line: usize,
        doc_id: String,
        sent_index: usize,
    },
    #[error("line {line}: sentence index {sent_index} of {doc_id} is not consecutive (expected {expected})")]
    NonConsecutive {
        line: usize,
        doc_id: String,
        sent_index: usize,
        expected: usize,
    },
    #[error("read error: {0}")]
    Io(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    tagset: String,
    #[serde(default)]
    provenance: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    doc_id: String,
    sent_index: usize,
    paragraph_start: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    main_clause: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    main_verb_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_class: Option<String>,
    tokens: Vec<Token>,
}

impl Corpus {
    /// Builds a corpus from in-memory documents, enforcing the same invariants
    /// as the parser. Errors report the 1-based position the sentence would
    /// occupy in the written file.
    pub fn new(
        tagset: Tagset,
        provenance: BTreeMap<String, String>,
        documents: Vec<Document>,
    ) -> Result<Self, ParseError> {
        let mut line = 1;
        let mut seen = HashMap::new();
        for (d, doc) in documents.iter().enumerate() {
            if let Some(prev) = seen.insert(doc.id.as_str(), d) {
                return Err(ParseError::Duplicate {
                    line: line + 1,
                    doc_id: doc.id.clone(),
                    sent_index: documents[prev].sentences.len(),
                });
            }
            for (i, s) in doc.sentences.iter().enumerate() {
                line += 1;
                if s.sent_index != i {
                    return Err(ParseError::NonConsecutive {
                        line,
                        doc_id: doc.id.clone(),
                        sent_index: s.sent_index,
                        expected: i,
                    });
                }
                validate_sentence(&tagset, s, line)?;
            }
        }
        Ok(Corpus {
            tagset,
            provenance,
            documents,
        })
    }

    pub fn tagset(&self) -> &Tagset {
        &self.tagset
    }

    pub fn provenance(&self) -> &BTreeMap<String, String> {
        &self.provenance
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn sentence(&self, r: SentenceRef) -> &Sentence {
        &self.documents[r.doc].sentences[r.sent]
    }

    /// All sentence positions in corpus order.
    pub fn refs(&self) -> Vec<SentenceRef> {
        self.documents
            .iter()
            .enumerate()
            .flat_map(|(doc, d)| (0..d.sentences.len()).map(move |sent| SentenceRef { doc, sent }))
            .collect()
    }

    pub fn sentences(&self) -> impl Iterator<Item = (SentenceRef, &Sentence)> {
        self.documents.iter().enumerate().flat_map(|(doc, d)| {
            d.sentences
                .iter()
                .enumerate()
                .map(move |(sent, s)| (SentenceRef { doc, sent }, s))
        })
    }

    pub fn num_sentences(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.sentences().all(|(_, s)| s.gold_class.is_some())
    }

    /// Empirical class proportions over labeled sentences, in label order.
    /// All zeros when nothing is labeled.
    pub fn class_distribution(&self) -> [f64; ClassLabel::COUNT] {
        let mut counts = [0usize; ClassLabel::COUNT];
        for (_, s) in self.sentences() {
            if let Some(c) = s.gold_class {
                counts[c.index()] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        let mut out = [0.0; ClassLabel::COUNT];
        if total > 0 {
            for (o, c) in out.iter_mut().zip(counts) {
                *o = c as f64 / total as f64;
            }
        }
        out
    }

    /// Keeps only the listed sentences, preserving corpus order. Documents
    /// left without sentences are dropped; surviving sentences are renumbered
    /// from 0 within their document.
    pub fn subset(&self, refs: &[SentenceRef]) -> Corpus {
        let mut keep: Vec<Vec<bool>> = self
            .documents
            .iter()
            .map(|d| vec![false; d.sentences.len()])
            .collect();
        for r in refs {
            keep[r.doc][r.sent] = true;
        }
        let documents = self
            .documents
            .iter()
            .zip(keep)
            .filter_map(|(d, k)| {
                let sentences: Vec<Sentence> = d
                    .sentences
                    .iter()
                    .zip(k)
                    .filter(|(_, keep)| *keep)
                    .enumerate()
                    .map(|(i, (s, _))| Sentence {
                        sent_index: i,
                        ..s.clone()
                    })
                    .collect();
                (!sentences.is_empty()).then(|| Document {
                    id: d.id.clone(),
                    sentences,
                })
            })
            .collect();
        Corpus {
            tagset: self.tagset.clone(),
            provenance: self.provenance.clone(),
            documents,
        }
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self, ParseError> {
        let mut lines = reader.lines().enumerate();
        let (_, first) = lines.next().ok_or(ParseError::Header {
            line: 1,
            message: "empty input".into(),
        })?;
        let first = first.map_err(|e| ParseError::Io(e.to_string()))?;
        let header: Header = serde_json::from_str(&first).map_err(|e| ParseError::Header {
            line: 1,
            message: e.to_string(),
        })?;
        if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
            return Err(ParseError::Header {
                line: 1,
                message: format!(
                    "expected {FORMAT_NAME} version {FORMAT_VERSION}, found {} version {}",
                    header.format, header.version
                ),
            });
        }
        let tagset = Tagset::by_name(&header.tagset).ok_or_else(|| ParseError::Header {
            line: 1,
            message: format!("unknown tagset {:?}", header.tagset),
        })?;

        let mut documents: Vec<Document> = Vec::new();
        let mut doc_pos: HashMap<String, usize> = HashMap::new();
        for (i, text) in lines {
            let line = i + 1;
            let text = text.map_err(|e| ParseError::Io(e.to_string()))?;
            let record: Record =
                serde_json::from_str(&text).map_err(|e| ParseError::Malformed {
                    line,
                    message: e.to_string(),
                })?;
            let gold_class = match record.gold_class {
                None => None,
                Some(label) => Some(
                    label
                        .parse::<ClassLabel>()
                        .map_err(|_| ParseError::UnknownClass { line, label })?,
                ),
            };
            let sentence = Sentence {
                sent_index: record.sent_index,
                paragraph_start: record.paragraph_start,
                tokens: record.tokens,
                main_clause: record.main_clause,
                main_verb_index: record.main_verb_index,
                gold_class,
            };
            validate_sentence(&tagset, &sentence, line)?;

            let d = *doc_pos.entry(record.doc_id.clone()).or_insert_with(|| {
                documents.push(Document {
                    id: record.doc_id.clone(),
                    sentences: Vec::new(),
                });
                documents.len() - 1
            });
            let expected = documents[d].sentences.len();
            if sentence.sent_index < expected {
                return Err(ParseError::Duplicate {
                    line,
                    doc_id: record.doc_id,
                    sent_index: sentence.sent_index,
                });
            }
            if sentence.sent_index > expected {
                return Err(ParseError::NonConsecutive {
                    line,
                    doc_id: record.doc_id,
                    sent_index: sentence.sent_index,
                    expected,
                });
            }
            documents[d].sentences.push(sentence);
        }
        Ok(Corpus {
            tagset,
            provenance: header.provenance,
            documents,
        })
    }

    pub fn parse_str(s: &str) -> Result<Self, ParseError> {
        Self::parse(s.as_bytes())
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = Header {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            tagset: self.tagset.name().to_string(),
            provenance: self.provenance.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for doc in &self.documents {
            for s in &doc.sentences {
                let record = Record {
                    doc_id: doc.id.clone(),
                    sent_index: s.sent_index,
                    paragraph_start: s.paragraph_start,
                    main_clause: s.main_clause,
                    main_verb_index: s.main_verb_index,
                    gold_class: s.gold_class.map(|c| c.as_str().to_string()),
                    tokens: s.tokens.clone(),
                };
                serde_json::to_writer(&mut w, &record)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of_bytes(self.to_jsonl().as_bytes())
    }
}

fn validate_sentence(tagset: &Tagset, s: &Sentence, line: usize) -> Result<(), ParseError> {
    if s.tokens.is_empty() {
        return Err(ParseError::Malformed {
            line,
            message: "sentence has no tokens".into(),
        });
    }
    for t in &s.tokens {
        if t.surface.is_empty() || t.lemma.is_empty() {
            return Err(ParseError::Malformed {
                line,
                message: "token surface and lemma must be non-empty".into(),
            });
        }
        if !tagset.contains(&t.pos) {
            return Err(ParseError::UnknownPos {
                line,
                tag: t.pos.clone(),
            });
        }
    }
    let len = s.tokens.len();
    let span = s.main_clause_span();
    if span.end > len || span.start >= span.end {
        return Err(ParseError::SpanOutOfBounds {
            line,
            start: span.start,
            end: span.end,
            len,
        });
    }
    if let Some(mv) = s.main_verb_index {
        if !span.contains(mv) {
            return Err(ParseError::MainVerbOutsideClause {
                line,
                index: mv,
                start: span.start,
                end: span.end,
            });
        }
    }
    Ok(())
}
