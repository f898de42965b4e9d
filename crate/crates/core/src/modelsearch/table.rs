//! Sparse contingency tables and their marginals.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::fingerprint::Fingerprint;

/// Observed counts over the full cross-classification of a set of
/// categorical variables. Only non-zero cells are stored, sorted by cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    arities: Vec<u32>,
    cells: Vec<(Vec<u32>, u64)>,
    total: u64,
}

impl ContingencyTable {
    pub fn from_rows<I, R>(arities: Vec<u32>, rows: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[u32]>,
    {
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for row in rows {
            let row = row.as_ref();
            check_cell(&arities, row)?;
            *counts.entry(row.to_vec()).or_insert(0) += 1;
        }
        Self::from_counts(arities, counts)
    }

    /// Builds a table from explicit cell counts. Zero counts are dropped and
    /// repeated cells are summed.
    pub fn from_counts<I>(arities: Vec<u32>, counts: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        let mut merged: HashMap<Vec<u32>, u64> = HashMap::new();
        for (cell, n) in counts {
            check_cell(&arities, &cell)?;
            if n > 0 {
                *merged.entry(cell).or_insert(0) += n;
            }
        }
        let mut cells: Vec<(Vec<u32>, u64)> = merged.into_iter().collect();
        cells.sort_unstable();
        let total = cells.iter().map(|(_, n)| n).sum();
        if total == 0 {
            return Err(ModelError::EmptyTable);
        }
        Ok(ContingencyTable {
            arities,
            cells,
            total,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn cells(&self) -> &[(Vec<u32>, u64)] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, cell: &[u32]) -> u64 {
        self.cells
            .binary_search_by(|(c, _)| c.as_slice().cmp(cell))
            .map(|i| self.cells[i].1)
            .unwrap_or(0)
    }

    /// The same table with every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        ContingencyTable {
            arities: self.arities.clone(),
            cells: self
                .cells
                .iter()
                .map(|(c, n)| (c.clone(), n * factor))
                .collect(),
            total: self.total * factor,
        }
    }

    /// Marginal counts over `vars` (sorted ascending, no duplicates).
    pub fn marginal(&self, vars: &[usize]) -> Marginal {
        let mut projected: Vec<(Vec<u32>, u64)> = self
            .cells
            .iter()
            .map(|(c, n)| (vars.iter().map(|&v| c[v]).collect(), *n))
            .collect();
        projected.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut cells: Vec<(Vec<u32>, u64)> = Vec::with_capacity(projected.len());
        for (key, n) in projected {
            match cells.last_mut() {
                Some((k, m)) if *k == key => *m += n,
                _ => cells.push((key, n)),
            }
        }
        Marginal {
            vars: vars.to_vec(),
            cells,
        }
    }

    /// `Σ m ln m` over the cells of the marginal on `vars`, summed in cell
    /// order so that equal inputs give bit-identical results.
    pub fn marginal_entropy_term(&self, vars: &[usize]) -> f64 {
        match self.radix(vars) {
            Some(strides) => {
                let mut coded: Vec<(u128, u64)> = self
                    .cells
                    .iter()
                    .map(|(c, n)| {
                        let code = vars
                            .iter()
                            .zip(&strides)
                            .map(|(&v, &s)| c[v] as u128 * s)
                            .sum();
                        (code, *n)
                    })
                    .collect();
                coded.sort_unstable_by_key(|&(code, _)| code);
                n_ln_n_runs(coded.iter().map(|&(code, n)| (code, n)))
            }
            None => self
                .marginal(vars)
                .cells
                .iter()
                .map(|(_, m)| n_ln_n(*m))
                .sum(),
        }
    }

    /// Mixed-radix strides for `vars`, or `None` when the codes would not fit
    /// in 128 bits.
    fn radix(&self, vars: &[usize]) -> Option<Vec<u128>> {
        let mut strides = Vec::with_capacity(vars.len());
        let mut stride: u128 = 1;
        for &v in vars {
            strides.push(stride);
            stride = stride.checked_mul(self.arities[v].max(1) as u128)?;
        }
        Some(strides)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let body = serde_json::to_string(self).expect("table serializes");
        Fingerprint::of_bytes(body.as_bytes())
    }
}

fn check_cell(arities: &[u32], cell: &[u32]) -> Result<(), ModelError> {
    if cell.len() != arities.len() {
        return Err(ModelError::RowLength {
            expected: arities.len(),
            found: cell.len(),
        });
    }
    for (var, (&value, &arity)) in cell.iter().zip(arities).enumerate() {
        if value >= arity {
            return Err(ModelError::ValueOutOfRange { var, value, arity });
        }
    }
    Ok(())
}

pub(crate) fn n_ln_n(n: u64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        let n = n as f64;
        n * n.ln()
    }
}

fn n_ln_n_runs<I: Iterator<Item = (u128, u64)>>(sorted: I) -> f64 {
    let mut sum = 0.0;
    let mut current: Option<(u128, u64)> = None;
    for (code, n) in sorted {
        match current.as_mut() {
            Some((c, m)) if *c == code => *m += n,
            _ => {
                if let Some((_, m)) = current {
                    sum += n_ln_n(m);
                }
                current = Some((code, n));
            }
        }
    }
    if let Some((_, m)) = current {
        sum += n_ln_n(m);
    }
    sum
}

/// Marginal counts over a subset of variables, sorted by cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marginal {
    vars: Vec<usize>,
    cells: Vec<(Vec<u32>, u64)>,
}

impl Marginal {
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn cells(&self) -> &[(Vec<u32>, u64)] {
        &self.cells
    }

    /// Count of the cell obtained by restricting a full cell to this
    /// marginal's variables.
    pub fn count_of_full(&self, full: &[u32]) -> u64 {
        let key: Vec<u32> = self.vars.iter().map(|&v| full[v]).collect();
        self.count(&key)
    }

    pub fn count(&self, key: &[u32]) -> u64 {
        self.cells
            .binary_search_by(|(c, _)| c.as_slice().cmp(key))
            .map(|i| self.cells[i].1)
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_rows_collapse() {
        let t = ContingencyTable::from_rows(vec![2, 3], [[1, 2], [1, 2], [1, 2]]).unwrap();
        assert_eq!(t.cells().len(), 1);
        assert_eq!(t.total(), 3);
        assert_eq!(t.count(&[1, 2]), 3);
        assert_eq!(t.count(&[0, 0]), 0);
    }

    #[test]
    fn distinct_rows_are_distinct_cells() {
        let rows: Vec<[u32; 2]> = (0..6).map(|i| [i % 2, i / 2]).collect();
        let t = ContingencyTable::from_rows(vec![2, 3], rows).unwrap();
        assert_eq!(t.cells().len(), 6);
        assert_eq!(t.total(), 6);
    }

    #[test]
    fn rejects_out_of_range_and_empty() {
        assert_eq!(
            ContingencyTable::from_rows(vec![2], [[2]]),
            Err(ModelError::ValueOutOfRange {
                var: 0,
                value: 2,
                arity: 2
            })
        );
        assert_eq!(
            ContingencyTable::from_rows(vec![2], Vec::<[u32; 1]>::new()),
            Err(ModelError::EmptyTable)
        );
        assert!(matches!(
            ContingencyTable::from_rows(vec![2, 2], [[0u32]]),
            Err(ModelError::RowLength { .. })
        ));
    }

    #[test]
    fn marginals_and_entropy_terms_agree() {
        let t = ContingencyTable::from_counts(
            vec![2, 2, 3],
            vec![
                (vec![0, 0, 0], 4),
                (vec![0, 1, 2], 3),
                (vec![1, 0, 0], 5),
                (vec![1, 1, 1], 2),
            ],
        )
        .unwrap();
        let m = t.marginal(&[0, 2]);
        assert_eq!(m.count(&[0, 0]), 4);
        assert_eq!(m.count(&[1, 0]), 5);
        assert_eq!(m.count_of_full(&[0, 1, 2]), 3);
        for vars in [vec![], vec![0], vec![1, 2], vec![0, 1, 2]] {
            let direct: f64 = t.marginal(&vars).cells().iter().map(|(_, n)| n_ln_n(*n)).sum();
            assert!((direct - t.marginal_entropy_term(&vars)).abs() < 1e-12);
        }
        assert!((t.marginal_entropy_term(&[]) - 14.0 * 14f64.ln()).abs() < 1e-12);
    }
}
