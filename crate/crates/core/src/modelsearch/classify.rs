//! Classification by the class-conditional factorization of a fitted model.

use serde::{Deserialize, Serialize};

use super::model::DecomposableModel;
use super::table::{ContingencyTable, Marginal};
use super::ModelError;
use crate::fingerprint::Fingerprint;

/// Scores closer than this on the log scale count as tied.
const TIE_EPSILON: f64 = 1e-9;

/// A decomposable model fitted to training counts, used to pick the most
/// probable value of the class variable given the other variables.
///
/// Only cliques and separators that contain the class variable enter the
/// score; the remaining factors do not depend on the class value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    model: DecomposableModel,
    class_var: usize,
    arities: Vec<u32>,
    /// Training counts of each class value.
    priors: Vec<u64>,
    clique_factors: Vec<Marginal>,
    separator_factors: Vec<Marginal>,
    smoothing: f64,
    table_fingerprint: Fingerprint,
}

impl Classifier {
    pub fn fit(
        model: &DecomposableModel,
        ct: &ContingencyTable,
        class_var: usize,
    ) -> Result<Self, ModelError> {
        Self::fit_smoothed(model, ct, class_var, 0.0)
    }

    /// Like [`Classifier::fit`], adding `lambda` to every factor count.
    pub fn fit_smoothed(
        model: &DecomposableModel,
        ct: &ContingencyTable,
        class_var: usize,
        lambda: f64,
    ) -> Result<Self, ModelError> {
        if ct.num_vars() != model.num_vars() {
            return Err(ModelError::VariableCount {
                model: model.num_vars(),
                table: ct.num_vars(),
            });
        }
        if class_var >= model.num_vars() {
            return Err(ModelError::NoSuchVariable {
                var: class_var,
                num_vars: model.num_vars(),
            });
        }
        let with_class = |sets: &[Vec<usize>]| -> Vec<Marginal> {
            sets.iter()
                .filter(|s| s.binary_search(&class_var).is_ok())
                .map(|s| ct.marginal(s))
                .collect()
        };
        let class_marginal = ct.marginal(&[class_var]);
        let priors = (0..ct.arities()[class_var])
            .map(|s| class_marginal.count(&[s]))
            .collect();
        Ok(Classifier {
            model: model.clone(),
            class_var,
            arities: ct.arities().to_vec(),
            priors,
            clique_factors: with_class(model.cliques()),
            separator_factors: with_class(model.separators()),
            smoothing: lambda.max(0.0),
            table_fingerprint: ct.fingerprint(),
        })
    }

    pub fn model(&self) -> &DecomposableModel {
        &self.model
    }

    pub fn class_var(&self) -> usize {
        self.class_var
    }

    pub fn priors(&self) -> &[u64] {
        &self.priors
    }

    pub fn table_fingerprint(&self) -> &Fingerprint {
        &self.table_fingerprint
    }

    /// Log score of every class value for `row` (the class slot is ignored);
    /// `-inf` where some factor count is zero.
    pub fn scores(&self, row: &[u32]) -> Vec<f64> {
        assert_eq!(row.len(), self.arities.len(), "row covers every variable");
        let mut cell = row.to_vec();
        (0..self.arities[self.class_var])
            .map(|s| {
                cell[self.class_var] = s;
                let mut score = 0.0;
                for f in &self.clique_factors {
                    let n = f.count_of_full(&cell) as f64 + self.smoothing;
                    if n <= 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    score += n.ln();
                }
                for f in &self.separator_factors {
                    score -= (f.count_of_full(&cell) as f64 + self.smoothing).ln();
                }
                score
            })
            .collect()
    }

    /// The best-scoring class value, or `None` (abstain) when no class has
    /// support. Ties go to the larger training prior, then the smaller value.
    pub fn classify(&self, row: &[u32]) -> Option<u32> {
        let scores = self.scores(row);
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return None;
        }
        (0..scores.len())
            .filter(|&s| scores[s] >= top - TIE_EPSILON)
            .max_by(|&a, &b| self.priors[a].cmp(&self.priors[b]).then(b.cmp(&a)))
            .map(|s| s as u32)
    }
}
