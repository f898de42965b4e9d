//! Interaction graphs, chordality and junction trees.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Undirected simple graph over variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    adj: Vec<Vec<bool>>,
}

impl InteractionGraph {
    pub fn empty(n: usize) -> Self {
        InteractionGraph {
            adj: vec![vec![false; n]; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop on {u}");
        self.adj[u][v] = true;
        self.adj[v][u] = true;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u][v] = false;
        self.adj[v][u] = false;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(u, &e)| e.then_some(u))
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n)
            .flat_map(|u| ((u + 1)..n).filter(move |&v| self.adj[u][v]).map(move |v| (u, v)))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    /// Maximum cardinality search. Returns vertices in visit order; ties go to
    /// the smallest vertex index.
    fn mcs_order(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut weight = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !visited[v])
                .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
                .expect("unvisited vertex remains");
            visited[v] = true;
            order.push(v);
            for u in self.neighbors(v) {
                if !visited[u] {
                    weight[u] += 1;
                }
            }
        }
        order
    }

    /// A perfect elimination ordering, if the graph is chordal.
    pub fn perfect_elimination_order(&self) -> Option<Vec<usize>> {
        let mut order = self.mcs_order();
        order.reverse();
        let n = self.adj.len();
        let mut position = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        for &v in &order {
            let later: Vec<usize> = self
                .neighbors(v)
                .filter(|&u| position[u] > position[v])
                .collect();
            for (i, &a) in later.iter().enumerate() {
                for &b in &later[i + 1..] {
                    if !self.adj[a][b] {
                        return None;
                    }
                }
            }
        }
        Some(order)
    }

    pub fn is_chordal(&self) -> bool {
        self.perfect_elimination_order().is_some()
    }

    /// Maximal cliques of a chordal graph, each sorted, in lexicographic order.
    pub fn maximal_cliques(&self) -> Result<Vec<Vec<usize>>, ModelError> {
        let order = self.perfect_elimination_order().ok_or(ModelError::NotChordal)?;
        let n = self.adj.len();
        let mut position = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut candidates: Vec<Vec<usize>> = order
            .iter()
            .map(|&v| {
                let mut c: Vec<usize> = self
                    .neighbors(v)
                    .filter(|&u| position[u] > position[v])
                    .collect();
                c.push(v);
                c.sort_unstable();
                c
            })
            .collect();
        candidates.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        candidates.dedup();
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for c in candidates {
            if !cliques.iter().any(|big| is_subset(&c, big)) {
                cliques.push(c);
            }
        }
        cliques.sort_unstable();
        Ok(cliques)
    }

    pub fn num_components(&self) -> usize {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }
}

/// Both slices sorted ascending.
pub(crate) fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

/// Maximal cliques joined into a tree with the running-intersection property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JunctionTree {
    pub cliques: Vec<Vec<usize>>,
    /// One separator per tree edge, aligned with `tree_edges`.
    pub separators: Vec<Vec<usize>>,
    /// Pairs of clique indices.
    pub tree_edges: Vec<(usize, usize)>,
}

impl JunctionTree {
    /// Builds the junction tree of a chordal graph: maximal cliques joined by a
    /// maximum-weight spanning tree of the clique graph, weights being
    /// intersection sizes. Candidate links are taken in order of decreasing
    /// weight, then by clique index pair.
    pub fn build(graph: &InteractionGraph) -> Result<Self, ModelError> {
        let cliques = graph.maximal_cliques()?;
        let k = cliques.len();
        let mut links: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let w = intersection(&cliques[i], &cliques[j]).len();
                if w > 0 {
                    links.push((w, i, j));
                }
            }
        }
        links.sort_unstable_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut separators = Vec::new();
        let mut tree_edges = Vec::new();
        for (_, i, j) in links {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
                separators.push(intersection(&cliques[i], &cliques[j]));
                tree_edges.push((i, j));
            }
        }
        Ok(JunctionTree {
            cliques,
            separators,
            tree_edges,
        })
    }

    pub fn num_components(&self) -> usize {
        self.cliques.len() - self.separators.len()
    }

    /// Checks the running-intersection property: for every variable, the
    /// cliques containing it form a connected subtree.
    pub fn has_running_intersection(&self) -> bool {
        let vars: std::collections::BTreeSet<usize> =
            self.cliques.iter().flatten().copied().collect();
        vars.into_iter().all(|v| {
            let holding: Vec<usize> = (0..self.cliques.len())
                .filter(|&c| self.cliques[c].binary_search(&v).is_ok())
                .collect();
            let mut reached = vec![holding[0]];
            let mut frontier = vec![holding[0]];
            while let Some(c) = frontier.pop() {
                for &(a, b) in &self.tree_edges {
                    let other = if a == c {
                        b
                    } else if b == c {
                        a
                    } else {
                        continue;
                    };
                    if holding.contains(&other) && !reached.contains(&other) {
                        reached.push(other);
                        frontier.push(other);
                    }
                }
            }
            reached.len() == holding.len()
        })
    }
}

/// True iff the graph on `n` variables with these edges is chordal.
pub fn is_decomposable(edges: &[(usize, usize)], n: usize) -> bool {
    InteractionGraph::from_edges(n, edges).is_chordal()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_is_chordal() {
        assert!(InteractionGraph::complete(5).is_chordal());
        assert!(is_decomposable(&[], 3));
    }

    #[test]
    fn four_cycle_is_not_chordal() {
        assert!(!is_decomposable(&[(0, 1), (1, 2), (2, 3), (0, 3)], 4));
        assert!(is_decomposable(&[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)], 4));
    }

    #[test]
    fn triangle_with_pendant() {
        // elimination order 3, 0, 1, 2 is perfect
        assert!(is_decomposable(&[(0, 1), (1, 2), (0, 2), (2, 3)], 4));
    }

    #[test]
    fn chain_junction_tree() {
        let g = InteractionGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let jt = JunctionTree::build(&g).unwrap();
        assert_eq!(jt.cliques, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(jt.separators, vec![vec![1]]);
    }

    #[test]
    fn complete_triangle_single_clique() {
        let jt = JunctionTree::build(&InteractionGraph::complete(3)).unwrap();
        assert_eq!(jt.cliques, vec![vec![0, 1, 2]]);
        assert!(jt.separators.is_empty());
    }

    #[test]
    fn clique_plus_pendant_edge() {
        // A=0, B=1, C=2, D=3; edges AB, BC, CD, BD
        let g = InteractionGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]);
        let jt = JunctionTree::build(&g).unwrap();
        assert_eq!(jt.cliques, vec![vec![0, 1], vec![1, 2, 3]]);
        assert_eq!(jt.separators, vec![vec![1]]);
        assert!(jt.has_running_intersection());
    }

    #[test]
    fn isolated_vertices_are_components() {
        let g = InteractionGraph::from_edges(4, &[(0, 1)]);
        let jt = JunctionTree::build(&g).unwrap();
        assert_eq!(jt.cliques, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(jt.num_components(), 3);
        assert_eq!(g.num_components(), 3);
    }

    #[test]
    fn non_chordal_has_no_junction_tree() {
        let g = InteractionGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(JunctionTree::build(&g), Err(ModelError::NotChordal));
    }
}
