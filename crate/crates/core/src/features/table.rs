//! Feature variables, feature tables and their text serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::corpus::ClassLabel;
use crate::fingerprint::Fingerprint;
use crate::modelsearch::{ContingencyTable, ModelError};

pub const CLASS_VARIABLE: &str = "S";
const TABLE_HEADER: &str = "#evcat-feature-table\t1";

/// A categorical variable with its value-decoding table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVariable {
    pub name: String,
    /// Meaning of each value code; the arity is its length.
    pub values: Vec<String>,
}

impl FeatureVariable {
    pub fn new<S: Into<String>>(name: S, values: Vec<String>) -> Self {
        FeatureVariable {
            name: name.into(),
            values,
        }
    }

    pub fn binary<S: Into<String>>(name: S) -> Self {
        Self::new(name, vec!["0".into(), "1".into()])
    }

    pub fn arity(&self) -> u32 {
        self.values.len() as u32
    }
}

/// The class variable, with one value per label in label order.
pub fn class_variable() -> FeatureVariable {
    FeatureVariable::new(
        CLASS_VARIABLE,
        ClassLabel::ALL.iter().map(|c| c.as_str().to_string()).collect(),
    )
}

/// One row per sentence, in corpus order. The class column is kept apart
/// because evaluation corpora may be unlabeled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub variables: Vec<FeatureVariable>,
    pub rows: Vec<Vec<u32>>,
    pub classes: Vec<Option<ClassLabel>>,
    pub provenance: BTreeMap<String, String>,
}

impl FeatureTable {
    pub fn num_features(&self) -> usize {
        self.variables.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of the class variable in rows extended with the class, which is
    /// always last.
    pub fn class_index(&self) -> usize {
        self.variables.len()
    }

    /// Arities of the features followed by the class variable.
    pub fn arities(&self) -> Vec<u32> {
        self.variables
            .iter()
            .map(|v| v.arity())
            .chain(std::iter::once(ClassLabel::COUNT as u32))
            .collect()
    }

    /// Names of the features followed by the class variable.
    pub fn variable_names(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|v| v.name.clone())
            .chain(std::iter::once(CLASS_VARIABLE.to_string()))
            .collect()
    }

    /// Row `i` with the class appended (class value 0 when unlabeled).
    pub fn full_row(&self, i: usize) -> Vec<u32> {
        let mut row = self.rows[i].clone();
        row.push(self.classes[i].map_or(0, |c| c.index() as u32));
        row
    }

    /// Exact cell counts over features and class. Every row must be labeled.
    pub fn contingency(&self) -> Result<ContingencyTable, FeatureError> {
        if self.rows.is_empty() {
            return Err(FeatureError::Model(ModelError::EmptyTable));
        }
        if self.classes.iter().any(Option::is_none) {
            return Err(FeatureError::Unlabeled);
        }
        ContingencyTable::from_rows(self.arities(), (0..self.rows.len()).map(|i| self.full_row(i)))
            .map_err(FeatureError::Model)
    }

    /// Tab-separated text: a header, provenance and variable lines (all
    /// starting with `#`), then one line of value codes per row with the class
    /// code last (`-` when unlabeled).
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(TABLE_HEADER);
        out.push('\n');
        for (k, v) in &self.provenance {
            writeln!(out, "#provenance\t{k}\t{v}").unwrap();
        }
        for var in self.variables.iter().chain(std::iter::once(&class_variable())) {
            write!(out, "#variable\t{}\t{}", var.name, var.arity()).unwrap();
            for value in &var.values {
                write!(out, "\t{value}").unwrap();
            }
            out.push('\n');
        }
        for (row, class) in self.rows.iter().zip(&self.classes) {
            for v in row {
                write!(out, "{v}\t").unwrap();
            }
            match class {
                Some(c) => writeln!(out, "{}", c.index()).unwrap(),
                None => out.push_str("-\n"),
            }
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, FeatureError> {
        let bad = |line: usize, message: &str| FeatureError::TableFormat {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, TABLE_HEADER)) => {}
            _ => return Err(bad(1, "missing feature-table header")),
        }
        let mut variables = Vec::new();
        let mut provenance = BTreeMap::new();
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "#provenance" if fields.len() == 3 => {
                    provenance.insert(fields[1].to_string(), fields[2].to_string());
                }
                "#variable" if fields.len() >= 3 => {
                    let arity: usize = fields[2].parse().map_err(|_| bad(n, "bad arity"))?;
                    let values: Vec<String> = fields[3..].iter().map(|s| s.to_string()).collect();
                    if values.len() != arity || arity < 2 {
                        return Err(bad(n, "arity does not match the value table"));
                    }
                    variables.push(FeatureVariable::new(fields[1], values));
                }
                f if f.starts_with('#') => return Err(bad(n, "unknown header line")),
                _ => {
                    let class_var = variables.last().ok_or_else(|| bad(n, "row before variables"))?;
                    if class_var != &class_variable() {
                        return Err(bad(n, "last variable must be the class variable"));
                    }
                    if fields.len() != variables.len() {
                        return Err(bad(n, "row length differs from the variable count"));
                    }
                    let mut row = Vec::with_capacity(fields.len() - 1);
                    for (f, var) in fields.iter().zip(&variables).take(fields.len() - 1) {
                        let v: u32 = f.parse().map_err(|_| bad(n, "value is not an integer"))?;
                        if v >= var.arity() {
                            return Err(bad(n, "value out of range"));
                        }
                        row.push(v);
                    }
                    let class = match fields[fields.len() - 1] {
                        "-" => None,
                        code => {
                            let i: usize = code.parse().map_err(|_| bad(n, "bad class code"))?;
                            Some(ClassLabel::from_index(i).ok_or_else(|| bad(n, "bad class code"))?)
                        }
                    };
                    rows.push(row);
                    classes.push(class);
                }
            }
        }
        match variables.pop() {
            Some(v) if v == class_variable() => {}
            _ => return Err(bad(1, "missing class variable")),
        }
        Ok(FeatureTable {
            variables,
            rows,
            classes,
            provenance,
        })
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of_bytes(self.to_tsv().as_bytes())
    }
}
