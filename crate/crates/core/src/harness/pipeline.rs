//! Training, closed-loop decoding and nested cross-validation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::folds::{plan_folds, FoldMode, FoldPlan};
use super::metrics::{metrics, Metrics};
use super::HarnessError;
use crate::corpus::{ClassLabel, CopularVerbs, Corpus, SentenceRef};
use crate::features::{
    build_feature_table, feature_class_edges, CollocationInventory, FeatureConfig, FeatureEncoder,
    FeatureTable, Organization, Selection, TableRole,
};
use crate::fingerprint::Fingerprint;
use crate::modelsearch::{backward_search, Classifier, ContingencyTable, SearchConfig, SearchTrace};
use crate::patterns::{PatternFamily, PatternIndex};

/// Everything that determines a run besides the corpus and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub features: FeatureConfig,
    /// Collocation selection; when absent, the default for the organization
    /// (per-class with k = 0.5, or over-range with alpha = 0.01).
    pub selection: Option<Selection>,
    pub stop_alpha: f64,
    /// Forbid removing any feature-class edge.
    pub pin_features: bool,
    /// Add-lambda smoothing of classifier counts (0 = none).
    pub smoothing: f64,
    pub folds: usize,
    pub fold_mode: FoldMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            features: FeatureConfig::default(),
            selection: None,
            stop_alpha: 0.01,
            pin_features: true,
            smoothing: 0.0,
            folds: 10,
            fold_mode: FoldMode::Document,
        }
    }
}

impl PipelineConfig {
    /// The default run with another organization and pattern family.
    pub fn with(org: Organization, family: PatternFamily) -> Self {
        let mut c = PipelineConfig::default();
        c.features.organization = org;
        c.features.patterns = family.patterns().to_vec();
        c
    }

    pub fn effective_selection(&self) -> Selection {
        self.selection.unwrap_or(if self.features.organization.is_per_class() {
            Selection::PerClass { k: 0.5 }
        } else {
            Selection::OverRange {
                alpha: 0.01,
                min_count: 1,
            }
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let sel = self.effective_selection();
        sel.validate()?;
        let per_class = matches!(sel, Selection::PerClass { .. });
        if per_class != self.features.organization.is_per_class() {
            return Err(HarnessError::Config(format!(
                "organization {} cannot use {} selection",
                self.features.organization,
                if per_class { "per-class" } else { "over-range" }
            )));
        }
        if !(0.0..1.0).contains(&self.stop_alpha) {
            return Err(HarnessError::Config(format!(
                "stop_alpha must lie in [0, 1), got {}",
                self.stop_alpha
            )));
        }
        if self.features.patterns.is_empty() {
            return Err(HarnessError::Config("no patterns enabled".into()));
        }
        if self.smoothing < 0.0 {
            return Err(HarnessError::Config("smoothing must be non-negative".into()));
        }
        Ok(())
    }

    pub fn search_config(&self, num_features: usize) -> SearchConfig {
        SearchConfig {
            stop_alpha: self.stop_alpha,
            pinned: if self.pin_features {
                feature_class_edges(num_features)
            } else {
                Vec::new()
            },
        }
    }
}

pub fn pattern_index(corpus: &Corpus) -> PatternIndex {
    PatternIndex::build(corpus, &CopularVerbs::default())
}

/// Inventory, feature table and search trace built from one training corpus.
#[derive(Debug, Clone)]
pub struct TrainedPipeline {
    pub inventory: CollocationInventory,
    pub encoder: FeatureEncoder,
    pub table: FeatureTable,
    pub contingency: ContingencyTable,
    pub trace: SearchTrace,
}

impl TrainedPipeline {
    pub fn classifier(&self, step: usize, smoothing: f64) -> Result<Classifier, HarnessError> {
        let model = self.trace.model(step);
        Ok(Classifier::fit_smoothed(
            &model,
            &self.contingency,
            self.table.class_index(),
            smoothing,
        )?)
    }
}

/// Selects collocations, builds the feature table and searches models, all
/// on `train` alone.
pub fn train(train: &Corpus, config: &PipelineConfig) -> Result<TrainedPipeline, HarnessError> {
    config.validate()?;
    if !train.is_fully_labeled() {
        return Err(HarnessError::Unlabeled);
    }
    let index = pattern_index(train);
    let inventory = CollocationInventory::build(train, &index, &config.features.patterns, config.effective_selection())?;
    let table = build_feature_table(train, &index, &inventory, &config.features, TableRole::Training)?;
    let encoder = FeatureEncoder::new(&inventory, &config.features)?;
    let contingency = table.contingency()?;
    let trace = backward_search(&contingency, &config.search_config(table.num_features()))?;
    Ok(TrainedPipeline {
        inventory,
        encoder,
        table,
        contingency,
        trace,
    })
}

/// Classifies every sentence in corpus order. Within a document, discourse
/// features read the classifier's own earlier decisions.
pub fn decode(
    corpus: &Corpus,
    index: &PatternIndex,
    encoder: &FeatureEncoder,
    classifier: &Classifier,
) -> Vec<Option<ClassLabel>> {
    let mut out = Vec::with_capacity(corpus.num_sentences());
    for (d, doc) in corpus.documents().iter().enumerate() {
        let mut history: Vec<Option<ClassLabel>> = Vec::with_capacity(doc.sentences.len());
        for i in 0..doc.sentences.len() {
            let mut row = encoder.encode(doc, i, index.get(SentenceRef { doc: d, sent: i }), &history);
            row.push(0);
            let prediction = classifier
                .classify(&row)
                .map(|c| ClassLabel::from_index(c as usize).expect("class value in range"));
            history.push(prediction);
            out.push(prediction);
        }
    }
    out
}

fn gold_labels(corpus: &Corpus) -> Result<Vec<ClassLabel>, HarnessError> {
    corpus
        .sentences()
        .map(|(_, s)| s.gold_class.ok_or(HarnessError::Unlabeled))
        .collect()
}

/// Accuracy of one trace model on held-out data.
fn evaluate(
    trained: &TrainedPipeline,
    step: usize,
    corpus: &Corpus,
    index: &PatternIndex,
    gold: &[ClassLabel],
    smoothing: f64,
) -> Result<Metrics, HarnessError> {
    let classifier = trained.classifier(step, smoothing)?;
    metrics(&decode(corpus, index, &trained.encoder, &classifier), gold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_size: usize,
    pub search_size: usize,
    pub selection_size: usize,
    pub variables: Vec<String>,
    pub trace_length: usize,
    pub selected_step: usize,
    pub selected_edges: Vec<(usize, usize)>,
    pub selection_accuracy: f64,
    pub test: Metrics,
    /// Fingerprints of the search data and of the contingency table built on
    /// it; the inventory and every model derive from these alone.
    pub search_data: Fingerprint,
    pub search_table: Fingerprint,
}

/// The model choice: highest selection accuracy, then fewer edges, then the
/// earlier trace position.
pub fn choose_model(trace: &SearchTrace, accuracies: &[f64]) -> usize {
    (0..accuracies.len())
        .min_by(|&a, &b| {
            accuracies[b]
                .total_cmp(&accuracies[a])
                .then(trace.steps[a].edges.len().cmp(&trace.steps[b].edges.len()))
                .then(a.cmp(&b))
        })
        .expect("trace holds the saturated model")
}

pub fn run_fold(corpus: &Corpus, plan: &FoldPlan, config: &PipelineConfig) -> Result<FoldReport, HarnessError> {
    let search = corpus.subset(&plan.search);
    let selection = corpus.subset(&plan.selection);
    let test = corpus.subset(&plan.test);
    let trained = train(&search, config)?;
    let search_data = search.fingerprint();
    if trained.inventory.training_fingerprint != search_data {
        return Err(HarnessError::Invariant("collocations were not selected on the search data".into()));
    }
    if trained.trace.table_fingerprint != trained.contingency.fingerprint() {
        return Err(HarnessError::Invariant("search trace was not built on the search table".into()));
    }

    let selection_index = pattern_index(&selection);
    let selection_gold = gold_labels(&selection)?;
    let accuracies = (0..trained.trace.len())
        .map(|step| {
            evaluate(&trained, step, &selection, &selection_index, &selection_gold, config.smoothing)
                .map(|m| m.accuracy)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let chosen = choose_model(&trained.trace, &accuracies);

    let test_gold = gold_labels(&test)?;
    let test_metrics = evaluate(&trained, chosen, &test, &pattern_index(&test), &test_gold, config.smoothing)?;
    log::info!(
        "fold {}: step {}/{} selection={:.4} test={:.4}",
        plan.fold,
        chosen,
        trained.trace.len(),
        accuracies[chosen],
        test_metrics.accuracy
    );
    Ok(FoldReport {
        fold: plan.fold,
        test_size: plan.test.len(),
        search_size: plan.search.len(),
        selection_size: plan.selection.len(),
        variables: trained.table.variable_names(),
        trace_length: trained.trace.len(),
        selected_step: chosen,
        selected_edges: trained.trace.steps[chosen].edges.clone(),
        selection_accuracy: accuracies[chosen],
        test: test_metrics,
        search_data,
        search_table: trained.contingency.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub config: PipelineConfig,
    pub seed: u64,
    pub corpus: Fingerprint,
    pub folds: Vec<FoldReport>,
    pub mean_accuracy: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

impl CVReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-fold rows followed by the averages.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "organization={} patterns={} selection={}",
            self.config.features.organization,
            self.config
                .features
                .patterns
                .iter()
                .map(|p| p.as_str())
                .collect::<Vec<_>>()
                .join(","),
            serde_json::to_string(&self.config.effective_selection()).expect("selection serializes")
        )
        .unwrap();
        writeln!(out, "fold  test  accuracy  precision  recall  step/trace  edges").unwrap();
        for f in &self.folds {
            writeln!(
                out,
                "{:>4}  {:>4}  {:>8.4}  {:>9.4}  {:>6.4}  {:>4}/{:<5}  {:>5}",
                f.fold,
                f.test_size,
                f.test.accuracy,
                f.test.precision,
                f.test.recall,
                f.selected_step,
                f.trace_length,
                f.selected_edges.len()
            )
            .unwrap();
        }
        writeln!(
            out,
            "mean        {:>8.4}  {:>9.4}  {:>6.4}",
            self.mean_accuracy, self.mean_precision, self.mean_recall
        )
        .unwrap();
        out
    }
}

/// The nested protocol: per fold, select collocations and search models on
/// search data, pick a model on selection data, score it on test data.
pub fn nested_cv(corpus: &Corpus, config: &PipelineConfig, seed: u64) -> Result<CVReport, HarnessError> {
    config.validate()?;
    if !corpus.is_fully_labeled() {
        return Err(HarnessError::Unlabeled);
    }
    let plans = plan_folds(corpus, config.folds, config.fold_mode, seed)?;
    let folds = plans
        .iter()
        .map(|plan| run_fold(corpus, plan, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVReport {
        config: config.clone(),
        seed,
        corpus: corpus.fingerprint(),
        mean_accuracy: mean(folds.iter().map(|f| f.test.accuracy)),
        mean_precision: mean(folds.iter().map(|f| f.test.precision)),
        mean_recall: mean(folds.iter().map(|f| f.test.recall)),
        folds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub folds: Vec<Metrics>,
    pub mean_accuracy: f64,
}

/// Always predicts the most frequent class of each fold's training data.
pub fn majority_baseline(corpus: &Corpus, plans: &[FoldPlan]) -> Result<BaselineReport, HarnessError> {
    let mut folds = Vec::with_capacity(plans.len());
    for plan in plans {
        let mut counts = [0usize; ClassLabel::COUNT];
        for r in plan.training() {
            counts[corpus.sentence(r).gold_class.ok_or(HarnessError::Unlabeled)?.index()] += 1;
        }
        // ties go to the earlier label
        let majority = (0..ClassLabel::COUNT)
            .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
            .and_then(ClassLabel::from_index)
            .expect("six classes");
        let gold = plan
            .test
            .iter()
            .map(|&r| corpus.sentence(r).gold_class.ok_or(HarnessError::Unlabeled))
            .collect::<Result<Vec<_>, _>>()?;
        folds.push(metrics(&vec![Some(majority); gold.len()], &gold)?);
    }
    Ok(BaselineReport {
        mean_accuracy: mean(folds.iter().map(|m| m.accuracy)),
        folds,
    })
}

/// A grid of mean results: rows are organizations, columns pattern families,
/// cells accuracy / precision / recall.
pub fn render_grid(results: &BTreeMap<(String, String), (f64, f64, f64)>) -> String {
    let rows: Vec<&str> = Organization::ALL
        .iter()
        .map(|o| o.as_str())
        .filter(|o| results.keys().any(|(r, _)| r == o))
        .collect();
    let cols: Vec<&str> = PatternFamily::ALL
        .iter()
        .map(|f| f.as_str())
        .filter(|f| results.keys().any(|(_, c)| c == f))
        .collect();
    let mut out = String::new();
    write!(out, "{:<6}", "").unwrap();
    for c in &cols {
        write!(out, "  {c:<22}").unwrap();
    }
    out.push('\n');
    for r in &rows {
        write!(out, "{r:<6}").unwrap();
        for c in &cols {
            match results.get(&(r.to_string(), c.to_string())) {
                Some((a, p, rec)) => write!(out, "  {a:.4}/{p:.4}/{rec:.4}  ").unwrap(),
                None => write!(out, "  {:<22}", "-").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_synthetic, SynthParams};
    use crate::modelsearch::SearchStep;

    fn small_corpus(seed: u64) -> Corpus {
        generate_synthetic(&SynthParams {
            seed,
            sentences: 500,
            ..Default::default()
        })
        .unwrap()
        .corpus
    }

    #[test]
    fn nested_cv_invariants() {
        let c = small_corpus(3);
        let config = PipelineConfig::default();
        let report = nested_cv(&c, &config, 11).unwrap();
        assert_eq!(report.folds.len(), 10);
        let plans = plan_folds(&c, 10, config.fold_mode, 11).unwrap();
        for (f, plan) in report.folds.iter().zip(&plans) {
            let m = f.test;
            assert!(m.accuracy <= m.precision && m.precision <= 1.0 && m.recall <= 1.0);
            assert!((m.precision * m.recall - m.accuracy).abs() < 1e-9);
            assert_eq!(f.search_data, c.subset(&plan.search).fingerprint());
            assert_eq!(f.test_size + f.search_size + f.selection_size, c.num_sentences());
            // pinned features: every feature keeps its edge to the class
            let class = f.variables.len() - 1;
            for v in 0..class {
                assert!(f.selected_edges.contains(&(v, class)), "fold {} lost feature {v}", f.fold);
            }
        }
        let again = nested_cv(&c, &config, 11).unwrap();
        assert_eq!(report.to_json(), again.to_json());
        assert!(report.render().lines().count() >= 12);
    }

    #[test]
    fn sentence_folds_also_run() {
        let c = small_corpus(4);
        let config = PipelineConfig {
            fold_mode: FoldMode::Sentence,
            ..PipelineConfig::with(Organization::Or1, PatternFamily::Syntactic)
        };
        let report = nested_cv(&c, &config, 2).unwrap();
        assert!(report.mean_accuracy > 0.3);
    }

    #[test]
    fn mismatched_selection_is_a_config_error() {
        let config = PipelineConfig {
            selection: Some(Selection::PerClass { k: 0.5 }),
            ..PipelineConfig::with(Organization::Or2, PatternFamily::Syntactic)
        };
        assert!(matches!(config.validate(), Err(HarnessError::Config(_))));
        let bad = PipelineConfig {
            stop_alpha: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn trace_with_edges(sizes: &[usize]) -> SearchTrace {
        let c = ContingencyTable::from_rows(vec![2, 2], &[vec![0, 1]]).unwrap();
        let mut trace = backward_search(&c, &SearchConfig::default()).unwrap();
        let template = trace.steps[0].clone();
        trace.steps = sizes
            .iter()
            .map(|&n| SearchStep {
                edges: vec![(0, 1); n],
                ..template.clone()
            })
            .collect();
        trace
    }

    #[test]
    fn model_choice_ties() {
        let trace = trace_with_edges(&[3, 2, 2, 1]);
        assert_eq!(choose_model(&trace, &[0.5, 0.7, 0.7, 0.6]), 1);
        assert_eq!(choose_model(&trace, &[0.7, 0.7, 0.6, 0.7]), 3);
        assert_eq!(choose_model(&trace, &[0.9, 0.1, 0.1, 0.1]), 0);
    }

    #[test]
    fn baseline_predicts_training_majority() {
        let c = small_corpus(5);
        let plans = plan_folds(&c, 10, FoldMode::Document, 1).unwrap();
        let b = majority_baseline(&c, &plans).unwrap();
        assert!(b.folds.iter().all(|m| m.recall == 1.0));
        assert!((b.mean_accuracy - 0.52).abs() < 0.06, "{}", b.mean_accuracy);
    }

    #[test]
    fn grid_layout() {
        let mut r = BTreeMap::new();
        r.insert(("pc2".to_string(), "syntactic".to_string()), (0.7468, 0.7495, 0.9965));
        r.insert(("or1".to_string(), "cooccurrence".to_string()), (0.6838, 0.6967, 0.9815));
        let g = render_grid(&r);
        let lines: Vec<&str> = g.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("cooccurrence") && lines[0].contains("syntactic"));
        assert!(lines[1].starts_with("pc2") && lines[1].contains("0.7468/0.7495/0.9965"));
        assert!(lines[2].starts_with("or1") && lines[2].contains("-"));
    }
}
