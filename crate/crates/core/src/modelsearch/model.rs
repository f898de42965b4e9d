//! Decomposable models and their closed-form maximum-likelihood fit.

use serde::{Deserialize, Serialize};

use super::graph::{InteractionGraph, JunctionTree};
use super::table::{n_ln_n, ContingencyTable, Marginal};
use super::ModelError;

/// A decomposable log-linear model: a chordal interaction graph together with
/// its junction tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct DecomposableModel {
    num_vars: usize,
    edges: Vec<(usize, usize)>,
    tree: JunctionTree,
    /// Junction-tree traversal: each clique once, with the separator linking it
    /// to an already visited clique (`None` for the first clique of a
    /// connected component).
    schedule: Vec<(usize, Option<usize>)>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    num_vars: usize,
    edges: Vec<(usize, usize)>,
    cliques: Vec<Vec<usize>>,
    separators: Vec<Vec<usize>>,
}

impl From<DecomposableModel> for ModelRepr {
    fn from(m: DecomposableModel) -> Self {
        ModelRepr {
            num_vars: m.num_vars,
            edges: m.edges,
            cliques: m.tree.cliques,
            separators: m.tree.separators,
        }
    }
}

impl TryFrom<ModelRepr> for DecomposableModel {
    type Error = ModelError;

    fn try_from(r: ModelRepr) -> Result<Self, ModelError> {
        let m = DecomposableModel::new(r.num_vars, &r.edges)?;
        if m.tree.cliques != r.cliques || m.tree.separators != r.separators {
            return Err(ModelError::NotChordal);
        }
        Ok(m)
    }
}

impl DecomposableModel {
    pub fn new(num_vars: usize, edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for var in [u, v] {
                if var >= num_vars {
                    return Err(ModelError::NoSuchVariable { var, num_vars });
                }
            }
            if u != v {
                normalized.push((u.min(v), u.max(v)));
            }
        }
        normalized.sort_unstable();
        normalized.dedup();
        let graph = InteractionGraph::from_edges(num_vars, &normalized);
        let tree = JunctionTree::build(&graph)?;
        let schedule = traversal(&tree);
        Ok(DecomposableModel {
            num_vars,
            edges: normalized,
            tree,
            schedule,
        })
    }

    /// All variables mutually dependent.
    pub fn saturated(num_vars: usize) -> Self {
        Self::new(num_vars, &InteractionGraph::complete(num_vars).edges())
            .expect("complete graphs are chordal")
    }

    /// All variables mutually independent.
    pub fn independence(num_vars: usize) -> Self {
        Self::new(num_vars, &[]).expect("empty graphs are chordal")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Sorted edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn graph(&self) -> InteractionGraph {
        InteractionGraph::from_edges(self.num_vars, &self.edges)
    }

    pub fn junction_tree(&self) -> &JunctionTree {
        &self.tree
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.tree.cliques
    }

    pub fn separators(&self) -> &[Vec<usize>] {
        &self.tree.separators
    }

    pub fn num_components(&self) -> usize {
        self.tree.num_components()
    }

    /// The model with edge `(u, v)` removed.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self, ModelError> {
        let e = (u.min(v), u.max(v));
        if !self.has_edge(e.0, e.1) {
            return Err(ModelError::NoSuchEdge(e.0, e.1));
        }
        let rest: Vec<(usize, usize)> = self.edges.iter().copied().filter(|&x| x != e).collect();
        Self::new(self.num_vars, &rest)
    }

    /// Closed-form MLE fit: the clique and separator marginals of `ct`.
    pub fn fit(&self, ct: &ContingencyTable) -> Result<FittedModel<'_>, ModelError> {
        if ct.num_vars() != self.num_vars {
            return Err(ModelError::VariableCount {
                model: self.num_vars,
                table: ct.num_vars(),
            });
        }
        Ok(FittedModel {
            model: self,
            cliques: self.tree.cliques.iter().map(|c| ct.marginal(c)).collect(),
            separators: self.tree.separators.iter().map(|s| ct.marginal(s)).collect(),
            total: ct.total() as f64,
        })
    }

    /// G² via marginal entropy terms; equal to [`g_squared`] up to rounding and
    /// exactly 0 for the saturated model.
    pub fn g_squared_from_entropies(&self, ct: &ContingencyTable) -> f64 {
        let full: Vec<usize> = (0..self.num_vars).collect();
        let mut h = ct.marginal_entropy_term(&full);
        for c in &self.tree.cliques {
            h -= ct.marginal_entropy_term(c);
        }
        for s in &self.tree.separators {
            h += ct.marginal_entropy_term(s);
        }
        h += (self.num_components() as f64 - 1.0) * n_ln_n(ct.total());
        (2.0 * h).max(0.0)
    }
}

/// Visit cliques component by component, each component from its smallest
/// clique index outward along tree edges.
fn traversal(tree: &JunctionTree) -> Vec<(usize, Option<usize>)> {
    let k = tree.cliques.len();
    let mut visited = vec![false; k];
    let mut schedule = Vec::with_capacity(k);
    for root in 0..k {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        schedule.push((root, None));
        let mut head = schedule.len() - 1;
        while head < schedule.len() {
            let c = schedule[head].0;
            head += 1;
            for (s, &(a, b)) in tree.tree_edges.iter().enumerate() {
                let other = if a == c {
                    b
                } else if b == c {
                    a
                } else {
                    continue;
                };
                if !visited[other] {
                    visited[other] = true;
                    schedule.push((other, Some(s)));
                }
            }
        }
    }
    schedule
}

/// A model with the marginals it was fitted to.
#[derive(Debug, Clone)]
pub struct FittedModel<'a> {
    model: &'a DecomposableModel,
    cliques: Vec<Marginal>,
    separators: Vec<Marginal>,
    total: f64,
}

impl FittedModel<'_> {
    /// Expected count of a full cell. Products and quotients are interleaved
    /// along the junction tree so the running value stays on the scale of a
    /// count; a saturated model therefore reproduces observed counts exactly.
    pub fn fitted(&self, cell: &[u32]) -> f64 {
        let mut value = 1.0;
        for (i, &(c, sep)) in self.model.schedule.iter().enumerate() {
            let n_c = self.cliques[c].count_of_full(cell);
            if n_c == 0 {
                return 0.0;
            }
            match sep {
                Some(s) => {
                    let n_s = self.separators[s].count_of_full(cell);
                    value = value * n_c as f64 / n_s as f64;
                }
                None if i == 0 => value = n_c as f64,
                None => value = value * n_c as f64 / self.total,
            }
        }
        value
    }
}

/// Expected count of `cell` under the maximum-likelihood fit of `model`.
pub fn fitted_count(
    model: &DecomposableModel,
    ct: &ContingencyTable,
    cell: &[u32],
) -> Result<f64, ModelError> {
    Ok(model.fit(ct)?.fitted(cell))
}

/// Likelihood-ratio statistic `2 Σ n ln(n / fitted)` over observed cells.
pub fn g_squared(model: &DecomposableModel, ct: &ContingencyTable) -> Result<f64, ModelError> {
    let fit = model.fit(ct)?;
    let mut sum = 0.0;
    for (cell, n) in ct.cells() {
        let expected = fit.fitted(cell);
        debug_assert!(expected > 0.0, "decomposable fit is positive on observed cells");
        if expected <= 0.0 {
            return Ok(f64::INFINITY);
        }
        let n = *n as f64;
        sum += n * (n / expected).ln();
    }
    Ok((2.0 * sum).max(0.0))
}

/// Residual degrees of freedom: free parameters of the saturated model minus
/// those of `model`, counted over the junction tree.
pub fn model_dof(model: &DecomposableModel, arities: &[u32]) -> f64 {
    let cells = |vars: &[usize]| -> f64 { vars.iter().map(|&v| arities[v] as f64).product() };
    let all: Vec<usize> = (0..model.num_vars()).collect();
    let clique_params: f64 = model.cliques().iter().map(|c| cells(c) - 1.0).sum();
    let sep_params: f64 = model.separators().iter().map(|s| cells(s) - 1.0).sum();
    (cells(&all) - 1.0) - (clique_params - sep_params)
}
