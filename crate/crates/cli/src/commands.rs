//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use evcat::corpus::{ClassLabel, Corpus};
use evcat::features::{build_feature_table, CollocationInventory, FeatureEncoder, FeatureTable, Organization, TableRole};
use evcat::harness::{
    choose_model, decode, generate_synthetic, majority_baseline, metrics, nested_cv, pattern_index, plan_folds,
    render_grid, PipelineConfig, SynthParams, TrainedPipeline,
};
use evcat::modelsearch::{backward_search, SearchTrace};
use evcat::patterns::PatternFamily;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Role {
    Training,
    Evaluation,
}

pub struct Context {
    pub config: RunConfig,
    pub pipeline: PipelineConfig,
    pub config_path: Option<PathBuf>,
}

impl Context {
    pub fn new(config: RunConfig, config_path: Option<PathBuf>) -> Result<Self, CliError> {
        let pipeline = config.pipeline()?;
        Ok(Context {
            config,
            pipeline,
            config_path,
        })
    }

    fn run(&self, command: &'static str) -> Result<Run<'_>, CliError> {
        let mut run = Run::new(command, &self.config)?;
        if let Some(p) = &self.config_path {
            run.input("config", p)?;
        }
        Ok(run)
    }
}

fn parse_corpus(bytes: &[u8]) -> Result<Corpus, CliError> {
    Ok(Corpus::parse(bytes)?)
}

fn load_corpus(run: &mut Run, role: &str, path: &Path) -> Result<Corpus, CliError> {
    parse_corpus(&run.input(role, path)?)
}

fn corpus_bytes(corpus: &Corpus) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    corpus.write(&mut out).map_err(|e| CliError::Invariant(e.to_string()))?;
    Ok(out)
}

fn load_inventory(run: &mut Run, path: &Path) -> Result<CollocationInventory, CliError> {
    Ok(CollocationInventory::from_json(&run.input_text("inventory", path)?)?)
}

fn load_table(run: &mut Run, path: &Path) -> Result<FeatureTable, CliError> {
    Ok(FeatureTable::from_tsv(&run.input_text("table", path)?)?)
}

pub fn extract(ctx: &Context) -> Result<(), CliError> {
    let mut run = ctx.run("extract")?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let index = pattern_index(&corpus);
    let mut out = String::from("doc_id\tsent_index\tpattern\tlemma\ttoken_index\n");
    for (r, s) in corpus.sentences() {
        let doc = &corpus.documents()[r.doc].id;
        for &p in &ctx.pipeline.features.patterns {
            for m in index.get(r).get(p) {
                out.push_str(&format!("{doc}\t{}\t{p}\t{}\t{}\n", s.sent_index, m.lemma, m.token_index));
            }
        }
    }
    run.write("matches.tsv", out.as_bytes())?;
    run.finish()
}

pub fn select(ctx: &Context) -> Result<(), CliError> {
    let mut run = ctx.run("select")?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let inv = CollocationInventory::build(
        &corpus,
        &pattern_index(&corpus),
        &ctx.pipeline.features.patterns,
        ctx.pipeline.effective_selection(),
    )?;
    run.write("inventory.json", inv.to_json().as_bytes())?;
    run.finish()
}

pub fn features(ctx: &Context, inventory: &Path, role: Role) -> Result<(), CliError> {
    let mut run = ctx.run("features")?;
    run.parameter("role", format!("{role:?}").to_lowercase());
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let inv = load_inventory(&mut run, inventory)?;
    let role = match role {
        Role::Training => TableRole::Training,
        Role::Evaluation => TableRole::Evaluation,
    };
    let table = build_feature_table(&corpus, &pattern_index(&corpus), &inv, &ctx.pipeline.features, role)?;
    run.write("features.tsv", table.to_tsv().as_bytes())?;
    run.finish()
}

pub fn search(ctx: &Context, table: &Path, pin: Option<bool>, stop_alpha: Option<f64>) -> Result<(), CliError> {
    let mut pipeline = ctx.pipeline.clone();
    if let Some(pin) = pin {
        pipeline.pin_features = pin;
    }
    if let Some(a) = stop_alpha {
        pipeline.stop_alpha = a;
    }
    pipeline.validate()?;
    let mut run = ctx.run("search")?;
    run.parameter("pin_features", pipeline.pin_features);
    run.parameter("stop_alpha", pipeline.stop_alpha);
    let table = load_table(&mut run, table)?;
    let contingency = table.contingency()?;
    let trace = backward_search(&contingency, &pipeline.search_config(table.num_features()))?;
    run.write_json("trace.json", &trace)?;
    run.write_json("models.json", &trace.models())?;
    run.finish()
}

#[derive(Debug, Serialize)]
struct Classification {
    step: usize,
    edges: Vec<(usize, usize)>,
    /// Accuracy of every trace model on the selection corpus, when given.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    selection_accuracies: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<evcat::harness::Metrics>,
}

fn gold(corpus: &Corpus) -> Option<Vec<ClassLabel>> {
    corpus.sentences().map(|(_, s)| s.gold_class).collect()
}

pub fn classify(
    ctx: &Context,
    inventory: &Path,
    table: &Path,
    trace: &Path,
    step: Option<usize>,
    select_on: Option<&Path>,
) -> Result<(), CliError> {
    let mut run = ctx.run("classify")?;
    let inventory = load_inventory(&mut run, inventory)?;
    let table = load_table(&mut run, table)?;
    let trace: SearchTrace = serde_json::from_str(&run.input_text("trace", trace)?)
        .map_err(|e| CliError::Data(format!("malformed trace: {e}")))?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    if table.provenance.get("inventory").map(String::as_str) != Some(inventory.fingerprint().as_str()) {
        return Err(CliError::Data("feature table was not built from this inventory".into()));
    }
    let contingency = table.contingency()?;
    if trace.table_fingerprint != contingency.fingerprint() {
        return Err(CliError::Data("trace was not searched on this feature table".into()));
    }
    let encoder = FeatureEncoder::new(&inventory, &ctx.pipeline.features)?;
    if encoder.variables() != &table.variables[..table.num_features()] {
        return Err(CliError::Config("feature settings differ from those of the feature table".into()));
    }
    let trained = TrainedPipeline {
        inventory,
        encoder,
        table,
        contingency,
        trace,
    };
    let smoothing = ctx.pipeline.smoothing;

    let mut selection_accuracies = Vec::new();
    let chosen = match (step, select_on) {
        (Some(s), _) => {
            if s >= trained.trace.len() {
                return Err(CliError::Config(format!("step {s} is past the trace end ({})", trained.trace.len())));
            }
            s
        }
        (None, Some(path)) => {
            let sel = load_corpus(&mut run, "selection", path)?;
            let sel_gold = gold(&sel).ok_or_else(|| CliError::Data("selection corpus must be fully labeled".into()))?;
            let index = pattern_index(&sel);
            for s in 0..trained.trace.len() {
                let classifier = trained.classifier(s, smoothing)?;
                selection_accuracies.push(metrics(&decode(&sel, &index, &trained.encoder, &classifier), &sel_gold)?.accuracy);
            }
            choose_model(&trained.trace, &selection_accuracies)
        }
        (None, None) => trained.trace.len() - 1,
    };
    run.parameter("step", chosen);

    let classifier = trained.classifier(chosen, smoothing)?;
    let predictions = decode(&corpus, &pattern_index(&corpus), &trained.encoder, &classifier);
    let mut out = String::from("doc_id\tsent_index\tpredicted\tgold\n");
    for ((r, s), p) in corpus.sentences().zip(&predictions) {
        let label = |c: Option<ClassLabel>| c.map_or("-", |c| c.as_str());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            corpus.documents()[r.doc].id,
            s.sent_index,
            label(*p),
            label(s.gold_class)
        ));
    }
    let summary = Classification {
        step: chosen,
        edges: trained.trace.steps[chosen].edges.clone(),
        selection_accuracies,
        metrics: gold(&corpus).map(|g| metrics(&predictions, &g)).transpose()?,
    };
    run.write("predictions.tsv", out.as_bytes())?;
    run.write_json("classification.json", &summary)?;
    run.write_json("classifier.json", &classifier)?;
    run.finish()
}

pub fn crossval(ctx: &Context) -> Result<(), CliError> {
    let mut run = ctx.run("crossval")?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let report = nested_cv(&corpus, &ctx.pipeline, ctx.config.seed)?;
    for f in &report.folds {
        let m = f.test;
        if (m.precision * m.recall - m.accuracy).abs() > 1e-9 {
            return Err(CliError::Invariant(format!("fold {}: accuracy != precision x recall", f.fold)));
        }
    }
    let text = report.render();
    print!("{text}");
    run.write("report.json", format!("{}\n", report.to_json()).as_bytes())?;
    run.write("report.txt", text.as_bytes())?;
    run.finish()
}

#[derive(Debug, Serialize)]
struct GridCell {
    organization: Organization,
    patterns: PatternFamily,
    accuracy: f64,
    precision: f64,
    recall: f64,
}

pub fn grid(ctx: &Context) -> Result<(), CliError> {
    let mut run = ctx.run("grid")?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let mut cells = Vec::new();
    let mut table = BTreeMap::new();
    for org in Organization::ALL {
        for family in PatternFamily::ALL {
            let mut config = ctx.pipeline.clone();
            config.features.organization = org;
            config.features.patterns = family.patterns().to_vec();
            if config.effective_selection().validate().is_err() || config.validate().is_err() {
                // an explicit selection only fits organizations of its own mode
                config.selection = None;
            }
            let r = nested_cv(&corpus, &config, ctx.config.seed)?;
            log::info!("{org}+{}: {:.4}", family.as_str(), r.mean_accuracy);
            table.insert(
                (org.to_string(), family.as_str().to_string()),
                (r.mean_accuracy, r.mean_precision, r.mean_recall),
            );
            cells.push(GridCell {
                organization: org,
                patterns: family,
                accuracy: r.mean_accuracy,
                precision: r.mean_precision,
                recall: r.mean_recall,
            });
        }
    }
    let text = render_grid(&table);
    print!("{text}");
    run.write_json("grid.json", &cells)?;
    run.write("grid.txt", text.as_bytes())?;
    run.finish()
}

pub fn split(ctx: &Context, fold: usize) -> Result<(), CliError> {
    let mut run = ctx.run("split")?;
    run.parameter("fold", fold);
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let plans = plan_folds(&corpus, ctx.pipeline.folds, ctx.pipeline.fold_mode, ctx.config.seed)?;
    let plan = plans
        .get(fold)
        .ok_or_else(|| CliError::Config(format!("fold {fold} out of range (0..{})", plans.len())))?;
    run.write("search.jsonl", &corpus_bytes(&corpus.subset(&plan.search))?)?;
    run.write("selection.jsonl", &corpus_bytes(&corpus.subset(&plan.selection))?)?;
    run.write("test.jsonl", &corpus_bytes(&corpus.subset(&plan.test))?)?;
    run.finish()
}

pub fn synth(ctx: &Context, params: Option<&Path>, seed: Option<u64>, sentences: Option<usize>) -> Result<(), CliError> {
    let mut run = ctx.run("synth")?;
    let mut p: SynthParams = match params {
        Some(path) => serde_json::from_str(&run.input_text("params", path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => SynthParams::default(),
    };
    if let Some(s) = seed {
        p.seed = s;
    }
    if let Some(n) = sentences {
        p.sentences = n;
    }
    run.parameter("params", serde_json::to_string(&p).map_err(|e| CliError::Invariant(e.to_string()))?);
    let corpus = generate_synthetic(&p)?.corpus;
    run.write("corpus.jsonl", &corpus_bytes(&corpus)?)?;
    run.finish()
}

pub fn baseline(ctx: &Context) -> Result<(), CliError> {
    let mut run = ctx.run("baseline")?;
    let corpus = load_corpus(&mut run, "corpus", ctx.config.corpus_path()?)?;
    let plans = plan_folds(&corpus, ctx.pipeline.folds, ctx.pipeline.fold_mode, ctx.config.seed)?;
    let report = majority_baseline(&corpus, &plans)?;
    println!("majority baseline accuracy {:.4}", report.mean_accuracy);
    run.write_json("baseline.json", &report)?;
    run.finish()
}
