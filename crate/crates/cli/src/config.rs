use std::path::{Path, PathBuf};

use evcat::features::{FeatureConfig, NonCollocConfig, Organization, Selection};
use evcat::harness::{FoldMode, PipelineConfig};
use evcat::patterns::{PatternFamily, PatternId};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One JSON file configures every subcommand. The defaults are the best
/// reported experiment: syntactic patterns, per-class selection with k = 0.5,
/// organization pc2, the four non-collocational features, features pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    /// Pattern family names or single pattern ids.
    pub patterns: Vec<String>,
    pub selection: Option<Selection>,
    pub organization: Organization,
    pub noncollocational: bool,
    pub previous_class: bool,
    pub tense: bool,
    pub thresholds: NonCollocConfig,
    pub stop_alpha: f64,
    pub pin_features: bool,
    pub smoothing: f64,
    pub folds: usize,
    pub fold_mode: FoldMode,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        RunConfig {
            corpus: None,
            patterns: vec![PatternFamily::Syntactic.as_str().to_string()],
            selection: None,
            organization: p.features.organization,
            noncollocational: p.features.noncollocational,
            previous_class: p.features.previous_class,
            tense: p.features.tense,
            thresholds: p.features.thresholds,
            stop_alpha: p.stop_alpha,
            pin_features: p.pin_features,
            smoothing: p.smoothing,
            folds: p.folds,
            fold_mode: p.fold_mode,
            seed: 1,
            output_dir: PathBuf::from("evcat-out"),
        }
    }
}

/// Expands family names and pattern ids into a duplicate-free pattern list
/// in canonical order.
pub fn parse_patterns(names: &[String]) -> Result<Vec<PatternId>, CliError> {
    let mut chosen = Vec::new();
    for name in names {
        if let Ok(family) = name.parse::<PatternFamily>() {
            chosen.extend_from_slice(family.patterns());
        } else if let Ok(p) = name.parse::<PatternId>() {
            chosen.push(p);
        } else {
            return Err(CliError::Config(format!("unknown pattern or family {name:?}")));
        }
    }
    Ok(PatternId::ALL.into_iter().filter(|p| chosen.contains(p)).collect())
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn pipeline(&self) -> Result<PipelineConfig, CliError> {
        let config = PipelineConfig {
            features: FeatureConfig {
                patterns: parse_patterns(&self.patterns)?,
                organization: self.organization,
                noncollocational: self.noncollocational,
                previous_class: self.previous_class,
                tense: self.tense,
                thresholds: self.thresholds,
            },
            selection: self.selection,
            stop_alpha: self.stop_alpha,
            pin_features: self.pin_features,
            smoothing: self.smoothing,
            folds: self.folds,
            fold_mode: self.fold_mode,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn corpus_path(&self) -> Result<&Path, CliError> {
        self.corpus
            .as_deref()
            .ok_or_else(|| CliError::Config("no corpus given (use --corpus or the config's \"corpus\")".into()))
    }
}
