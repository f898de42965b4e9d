//! Backward sequential search from the saturated model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::chisq::chi_squared_sf;
use super::model::DecomposableModel;
use super::table::{n_ln_n, ContingencyTable};
use super::ModelError;
use crate::fingerprint::Fingerprint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Stop when the chi-squared p-value of the best removal falls below this.
    pub stop_alpha: f64,
    /// Edges that may never be removed.
    pub pinned: Vec<(usize, usize)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            stop_alpha: 0.01,
            pinned: Vec::new(),
        }
    }
}

/// One visited model. `removed` is the edge dropped to reach it from the
/// previous step (`None` for the saturated start).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub edges: Vec<(usize, usize)>,
    pub removed: Option<(usize, usize)>,
    pub g_squared: f64,
    pub dof: f64,
    pub delta_g_squared: f64,
    pub delta_dof: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum StopReason {
    NoRemovableEdge,
    /// The cheapest removal degraded the fit significantly.
    Significant {
        edge: (usize, usize),
        delta_g_squared: f64,
        delta_dof: f64,
        p_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub arities: Vec<u32>,
    pub config: SearchConfig,
    pub table_fingerprint: Fingerprint,
    pub steps: Vec<SearchStep>,
    pub stop: StopReason,
}

impl SearchTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn model(&self, i: usize) -> DecomposableModel {
        DecomposableModel::new(self.arities.len(), &self.steps[i].edges)
            .expect("trace models are chordal")
    }

    pub fn models(&self) -> Vec<DecomposableModel> {
        (0..self.steps.len()).map(|i| self.model(i)).collect()
    }
}

/// Memoized `Σ m ln m` over marginals of one table.
struct EntropyCache<'a> {
    table: &'a ContingencyTable,
    terms: HashMap<Vec<usize>, f64>,
}

impl<'a> EntropyCache<'a> {
    fn new(table: &'a ContingencyTable) -> Self {
        EntropyCache {
            table,
            terms: HashMap::new(),
        }
    }

    fn get(&mut self, vars: Vec<usize>) -> f64 {
        if vars.is_empty() {
            return n_ln_n(self.table.total());
        }
        let table = self.table;
        *self
            .terms
            .entry(vars)
            .or_insert_with_key(|v| table.marginal_entropy_term(v))
    }
}

/// Greedy backward elimination. Each step removes, among edges that lie in
/// exactly one maximal clique (so the result stays decomposable) and are not
/// pinned, the one whose removal increases G² least; ties go to the
/// lexicographically smallest edge.
pub fn backward_search(
    ct: &ContingencyTable,
    config: &SearchConfig,
) -> Result<SearchTrace, ModelError> {
    let n = ct.num_vars();
    let arities = ct.arities().to_vec();
    let mut pinned: Vec<(usize, usize)> = Vec::with_capacity(config.pinned.len());
    for &(u, v) in &config.pinned {
        for var in [u, v] {
            if var >= n {
                return Err(ModelError::NoSuchVariable { var, num_vars: n });
            }
        }
        pinned.push((u.min(v), u.max(v)));
    }
    pinned.sort_unstable();

    let mut cache = EntropyCache::new(ct);
    let mut model = DecomposableModel::saturated(n);
    let mut g2 = 0.0;
    let mut dof = 0.0;
    let mut steps = vec![SearchStep {
        edges: model.edges().to_vec(),
        removed: None,
        g_squared: 0.0,
        dof: 0.0,
        delta_g_squared: 0.0,
        delta_dof: 0.0,
        p_value: 1.0,
    }];

    let stop = loop {
        let mut best: Option<((usize, usize), f64, f64)> = None;
        for &(u, v) in model.edges() {
            if pinned.binary_search(&(u, v)).is_ok() {
                continue;
            }
            let mut holding = model
                .cliques()
                .iter()
                .filter(|c| c.binary_search(&u).is_ok() && c.binary_search(&v).is_ok());
            let clique = match (holding.next(), holding.next()) {
                (Some(c), None) => c,
                _ => continue,
            };
            let without = |drop: &[usize]| -> Vec<usize> {
                clique.iter().copied().filter(|x| !drop.contains(x)).collect()
            };
            let h_c = cache.get(clique.clone());
            let h_uv = cache.get(without(&[u, v]));
            let h_u = cache.get(without(&[u]));
            let h_v = cache.get(without(&[v]));
            let delta = (2.0 * (h_c + h_uv - h_u - h_v)).max(0.0);
            let delta_dof = without(&[u, v])
                .iter()
                .map(|&x| arities[x] as f64)
                .product::<f64>()
                * (arities[u] as f64 - 1.0)
                * (arities[v] as f64 - 1.0);
            // edges are visited in ascending order, so strict improvement keeps
            // the smallest edge among equal deltas
            if best.is_none_or(|(_, d, _)| delta < d) {
                best = Some(((u, v), delta, delta_dof));
            }
        }
        let Some((edge, delta, delta_dof)) = best else {
            break StopReason::NoRemovableEdge;
        };
        let p_value = chi_squared_sf(delta, delta_dof);
        if p_value < config.stop_alpha {
            break StopReason::Significant {
                edge,
                delta_g_squared: delta,
                delta_dof,
                p_value,
            };
        }
        model = model.without_edge(edge.0, edge.1)?;
        g2 += delta;
        dof += delta_dof;
        log::debug!("removed {edge:?}: G2={g2:.4} dof={dof} p={p_value:.4}");
        steps.push(SearchStep {
            edges: model.edges().to_vec(),
            removed: Some(edge),
            g_squared: g2,
            dof,
            delta_g_squared: delta,
            delta_dof,
            p_value,
        });
    };

    Ok(SearchTrace {
        arities,
        config: SearchConfig {
            stop_alpha: config.stop_alpha,
            pinned,
        },
        table_fingerprint: ct.fingerprint(),
        steps,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelsearch::{g_squared, model_dof};

    fn rows_table(arities: Vec<u32>, rows: Vec<Vec<u32>>) -> ContingencyTable {
        ContingencyTable::from_rows(arities, rows).unwrap()
    }

    /// Variables 0, 1 and 3 depend on each other; variable 2 is drawn
    /// independently of everything.
    fn one_independent() -> ContingencyTable {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<u32>> = (0..4000)
            .map(|_| {
                let a = rng.random_range(0..3u32);
                let b = if rng.random_bool(0.7) { a } else { rng.random_range(0..3) };
                let d = if rng.random_bool(0.8) { (a + b) % 2 } else { rng.random_range(0..2) };
                vec![a, b, rng.random_range(0..2), d]
            })
            .collect();
        rows_table(vec![3, 3, 2, 2], rows)
    }

    #[test]
    fn starts_saturated_and_tracks_fit() {
        let ct = one_independent();
        let trace = backward_search(&ct, &SearchConfig::default()).unwrap();
        assert_eq!(trace.steps[0].edges.len(), 6);
        for (i, step) in trace.steps.iter().enumerate() {
            let m = trace.model(i);
            assert!(m.graph().is_chordal());
            let direct = g_squared(&m, &ct).unwrap();
            assert!((direct - step.g_squared).abs() < 1e-6, "{direct} vs {}", step.g_squared);
            assert_eq!(model_dof(&m, ct.arities()), step.dof);
            if i > 0 {
                assert!(step.g_squared >= trace.steps[i - 1].g_squared);
                assert_eq!(trace.steps[i - 1].edges.len(), step.edges.len() + 1);
            }
        }
    }

    #[test]
    fn independent_variable_goes_first() {
        let ct = one_independent();
        let trace = backward_search(&ct, &SearchConfig::default()).unwrap();
        let removed: Vec<(usize, usize)> = trace.steps.iter().filter_map(|s| s.removed).collect();
        let first_dependent = removed.iter().position(|&(u, v)| u != 2 && v != 2);
        let last_independent = removed.iter().rposition(|&(u, v)| u == 2 || v == 2).unwrap();
        assert!(first_dependent.is_none_or(|f| f > last_independent));
        // all three edges at variable 2 are gone by the end
        assert!(trace.steps.last().unwrap().edges.iter().all(|&(u, v)| u != 2 && v != 2));
    }

    #[test]
    fn everything_pinned_keeps_saturated() {
        let ct = one_independent();
        let config = SearchConfig {
            stop_alpha: 0.01,
            pinned: DecomposableModel::saturated(4).edges().to_vec(),
        };
        let trace = backward_search(&ct, &config).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.stop, StopReason::NoRemovableEdge);
    }

    #[test]
    fn strong_dependence_stops_at_saturated() {
        let ct = ContingencyTable::from_counts(
            vec![2, 2],
            vec![(vec![0, 0], 50), (vec![1, 1], 50), (vec![0, 1], 2), (vec![1, 0], 2)],
        )
        .unwrap();
        let trace = backward_search(&ct, &SearchConfig::default()).unwrap();
        assert_eq!(trace.len(), 1);
        assert!(matches!(trace.stop, StopReason::Significant { .. }));
    }

    #[test]
    fn deterministic() {
        let ct = one_independent();
        let a = serde_json::to_string(&backward_search(&ct, &SearchConfig::default()).unwrap()).unwrap();
        let b = serde_json::to_string(&backward_search(&ct, &SearchConfig::default()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
