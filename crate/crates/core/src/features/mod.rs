//! Collocation selection, organization into variables, non-collocational
//! features and feature-table assembly.

mod noncolloc;
mod organize;
mod select;
mod table;

pub use noncolloc::{
    has_according_to, noncolloc_features, noncolloc_values, noncolloc_variables, previous_class,
    previous_class_variable, prior_ps_speech, quote_level, quote_ratio, tense, tense_variable,
    NonCollocConfig, TENSE_VALUES,
};
pub use organize::{organize, Organization, Organizer, ABSENT};
pub use select::{
    presence_g_squared, select_over_range, select_per_class, ClassCollocations,
    CollocationInventory, LemmaCounts, PatternCollocations, PerClassSets, Selection,
};
pub use table::{class_variable, FeatureTable, FeatureVariable, CLASS_VARIABLE};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ClassLabel, Corpus, Document};
use crate::fingerprint::Fingerprint;
use crate::modelsearch::ModelError;
use crate::patterns::{PatternFamily, PatternId, PatternIndex, SentenceMatches};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("training fold is empty")]
    EmptyTrainingFold,
    #[error("corpus has unlabeled sentences where labels are required")]
    Unlabeled,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown organization {0:?} (expected pc1, pc2, or1 or or2)")]
    UnknownOrganization(String),
    #[error("organization {organization} needs a {} inventory", if *per_class_inventory { "over-range" } else { "per-class" })]
    ModeMismatch {
        organization: &'static str,
        per_class_inventory: bool,
    },
    #[error("inventory was selected on fold {inventory}, not on this corpus ({corpus})")]
    FoldMismatch {
        inventory: Fingerprint,
        corpus: Fingerprint,
    },
    #[error("feature table line {line}: {message}")]
    TableFormat { line: usize, message: String },
    #[error("malformed inventory: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which variables a feature table holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub patterns: Vec<PatternId>,
    pub organization: Organization,
    /// Include the four non-collocational variables.
    pub noncollocational: bool,
    /// Include the class of the preceding sentence.
    pub previous_class: bool,
    /// Include the tense of the main verb.
    pub tense: bool,
    pub thresholds: NonCollocConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            patterns: PatternFamily::Syntactic.patterns().to_vec(),
            organization: Organization::Pc2,
            noncollocational: true,
            previous_class: false,
            tense: false,
            thresholds: NonCollocConfig::default(),
        }
    }
}

/// Turns one sentence, its pattern matches and the labels of the sentences
/// before it into a row of feature values.
#[derive(Debug, Clone)]
pub struct FeatureEncoder {
    config: FeatureConfig,
    organizer: Organizer,
    variables: Vec<FeatureVariable>,
}

impl FeatureEncoder {
    pub fn new(inv: &CollocationInventory, config: &FeatureConfig) -> Result<Self, FeatureError> {
        let organizer = Organizer::new(inv, config.organization)?;
        let mut variables = Vec::new();
        if config.noncollocational {
            variables.extend(noncolloc_variables());
        }
        variables.extend(organizer.variables().iter().cloned());
        if config.previous_class {
            variables.push(previous_class_variable());
        }
        if config.tense {
            variables.push(tense_variable());
        }
        Ok(FeatureEncoder {
            config: config.clone(),
            organizer,
            variables,
        })
    }

    pub fn variables(&self) -> &[FeatureVariable] {
        &self.variables
    }

    /// Whether rows depend on labels of earlier sentences.
    pub fn is_sequential(&self) -> bool {
        self.config.noncollocational || self.config.previous_class
    }

    /// Row for sentence `i` of `doc`. `history` holds labels for sentences
    /// `0..i` of the same document (later entries are ignored); `None`
    /// stands for an abstention.
    pub fn encode(
        &self,
        doc: &Document,
        i: usize,
        matches: &SentenceMatches,
        history: &[Option<ClassLabel>],
    ) -> Vec<u32> {
        let mut row = Vec::with_capacity(self.variables.len());
        if self.config.noncollocational {
            row.extend(noncolloc_values(doc, i, history, &self.config.thresholds));
        }
        row.extend(self.organizer.encode(matches));
        if self.config.previous_class {
            row.push(previous_class(i, history));
        }
        if self.config.tense {
            row.push(tense(&doc.sentences[i]));
        }
        row
    }
}

/// What a feature table will be used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableRole {
    /// Model search and fitting: the corpus must be the inventory's own
    /// training fold.
    Training,
    /// Anything else; discourse features still read gold labels.
    Evaluation,
}

/// One row per sentence in corpus order, with discourse features computed
/// from gold labels.
pub fn build_feature_table(
    corpus: &Corpus,
    index: &PatternIndex,
    inv: &CollocationInventory,
    config: &FeatureConfig,
    role: TableRole,
) -> Result<FeatureTable, FeatureError> {
    let corpus_fp = corpus.fingerprint();
    if role == TableRole::Training && corpus_fp != inv.training_fingerprint {
        return Err(FeatureError::FoldMismatch {
            inventory: inv.training_fingerprint.clone(),
            corpus: corpus_fp,
        });
    }
    let encoder = FeatureEncoder::new(inv, config)?;
    let mut rows = Vec::with_capacity(corpus.num_sentences());
    let mut classes = Vec::with_capacity(corpus.num_sentences());
    for (d, doc) in corpus.documents().iter().enumerate() {
        let gold: Vec<Option<ClassLabel>> = doc.sentences.iter().map(|s| s.gold_class).collect();
        for i in 0..doc.sentences.len() {
            let m = index.get(crate::corpus::SentenceRef { doc: d, sent: i });
            rows.push(encoder.encode(doc, i, m, &gold));
            classes.push(gold[i]);
        }
    }
    let mut provenance = BTreeMap::new();
    provenance.insert("corpus".to_string(), corpus_fp.to_string());
    provenance.insert("inventory".to_string(), inv.fingerprint().to_string());
    provenance.insert("training-fold".to_string(), inv.training_fingerprint.to_string());
    provenance.insert("organization".to_string(), config.organization.to_string());
    provenance.insert(
        "role".to_string(),
        match role {
            TableRole::Training => "training",
            TableRole::Evaluation => "evaluation",
        }
        .to_string(),
    );
    Ok(FeatureTable {
        variables: encoder.variables,
        rows,
        classes,
        provenance,
    })
}

/// Edges tying every feature to the class variable, which comes last.
pub fn feature_class_edges(num_features: usize) -> Vec<(usize, usize)> {
    (0..num_features).map(|f| (f, num_features)).collect()
}
