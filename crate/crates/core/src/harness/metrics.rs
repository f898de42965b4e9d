//! Accuracy, precision and recall with abstention.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub total: usize,
    pub attempted: usize,
    pub correct: usize,
    /// correct / total
    pub accuracy: f64,
    /// correct / attempted, 0 when nothing was attempted
    pub precision: f64,
    /// attempted / total
    pub recall: f64,
}

impl Metrics {
    pub fn from_counts(total: usize, attempted: usize, correct: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Metrics {
            total,
            attempted,
            correct,
            accuracy: ratio(correct, total),
            precision: ratio(correct, attempted),
            recall: ratio(attempted, total),
        }
    }
}

/// Scores predictions (`None` = abstain) against gold labels.
pub fn metrics(predictions: &[Option<ClassLabel>], gold: &[ClassLabel]) -> Result<Metrics, HarnessError> {
    if predictions.len() != gold.len() {
        return Err(HarnessError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let attempted = predictions.iter().filter(|p| p.is_some()).count();
    let correct = predictions
        .iter()
        .zip(gold)
        .filter(|(p, g)| **p == Some(**g))
        .count();
    Ok(Metrics::from_counts(gold.len(), attempted, correct))
}
