//! Collocation firing statistics and organization accuracies on synthetic
//! corpora, the measurements the generator defaults were tuned against.
//!
//! Usage: synth_study [params.json|-] [seed...]

use std::time::Instant;

use evcat::features::{CollocationInventory, Organization, Selection};
use evcat::harness::{
    collocation_stats, generate_synthetic, majority_baseline, nested_cv, pattern_index, plan_folds, FoldMode,
    PipelineConfig, SynthParams,
};
use evcat::patterns::PatternFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut params: SynthParams = match args.next() {
        Some(p) if p != "-" => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        _ => SynthParams::default(),
    };
    let seeds: Vec<u64> = args.map(|s| s.parse()).collect::<Result<_, _>>()?;
    for seed in if seeds.is_empty() { vec![params.seed] } else { seeds } {
        params.seed = seed;
        let corpus = generate_synthetic(&params)?.corpus;
        let plans = plan_folds(&corpus, 10, FoldMode::Document, seed)?;
        println!("seed {seed}: majority baseline {:.4}", majority_baseline(&corpus, &plans)?.mean_accuracy);
        for family in PatternFamily::ALL {
            let (mut pos, mut fp) = (0.0, 0.0);
            for plan in &plans {
                let train = corpus.subset(&plan.training());
                let test = corpus.subset(&plan.test);
                let inv = CollocationInventory::build(
                    &train,
                    &pattern_index(&train),
                    family.patterns(),
                    Selection::PerClass { k: 0.5 },
                )?;
                let s = collocation_stats(&test, &pattern_index(&test), &inv)?;
                let scale = 255.0 / test.num_sentences() as f64 / plans.len() as f64;
                pos += s.mean_positives * scale;
                fp += s.mean_false_positives * scale;
            }
            println!("  {:<13} positives {pos:5.1}  false {fp:5.1}  per 255", family.as_str());
        }
        for (org, family) in [
            (Organization::Pc2, PatternFamily::Syntactic),
            (Organization::Or1, PatternFamily::Syntactic),
            (Organization::Or2, PatternFamily::Cooccurrence),
            (Organization::Pc1, PatternFamily::Cooccurrence),
        ] {
            let t = Instant::now();
            let r = nested_cv(&corpus, &PipelineConfig::with(org, family), seed)?;
            println!(
                "  {org}+{:<13} acc {:.4} prec {:.4} rec {:.4}  {:.1}s",
                family.as_str(),
                r.mean_accuracy,
                r.mean_precision,
                r.mean_recall,
                t.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
