//! Event categorization by explicit search over decomposable graphical models.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`corpus`]: pre-annotated sentences (POS tags, lemmas, quote membership,
//!    main-clause span) plus the two shallow linguistic primitives everything
//!    else leans on, the main-verb finder and the approximate noun-phrase matcher.
//! 2. [`patterns`]: collocation candidates under ten patterns in three families
//!    (co-occurrence, within-5 of the main verb, syntactic frames anchored at
//!    the main verb).
//! 3. [`features`]: collocation selection (per-class or over-range), the four
//!    organizations of collocations into categorical variables, and the
//!    non-collocational sentence and discourse properties.
//! 4. [`modelsearch`]: sparse contingency tables, chordal interaction graphs,
//!    closed-form decomposable fits, G² and backward sequential search, and the
//!    classifier induced from a selected model.
//! 5. [`harness`]: nested 10-fold cross-validation, metrics, collocation
//!    frequency statistics and a synthetic corpus generator.

pub mod corpus;
pub mod features;
pub mod fingerprint;
pub mod harness;
pub mod modelsearch;
pub mod patterns;

pub use corpus::{ClassLabel, Corpus, Document, Sentence, Span, Token};
pub use fingerprint::Fingerprint;
