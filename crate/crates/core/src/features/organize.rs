//! Organizations: how selected collocations become categorical variables.
//!
//! A variable is only created when at least one selected collocation backs
//! it; a variable that could never fire would carry no information and only
//! widen the contingency table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::select::CollocationInventory;
use super::table::FeatureVariable;
use super::FeatureError;
use crate::corpus::ClassLabel;
use crate::patterns::{PatternId, SentenceMatches};

pub const ABSENT: &str = "absent";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Organization {
    /// One binary variable per class.
    Pc1,
    /// One variable per pattern whose value names a class.
    Pc2,
    /// One variable per pattern whose value names a word.
    Or1,
    /// One binary variable per (word, pattern).
    Or2,
}

impl Organization {
    pub const ALL: [Organization; 4] = [
        Organization::Pc1,
        Organization::Pc2,
        Organization::Or1,
        Organization::Or2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Organization::Pc1 => "pc1",
            Organization::Pc2 => "pc2",
            Organization::Or1 => "or1",
            Organization::Or2 => "or2",
        }
    }

    pub fn is_per_class(self) -> bool {
        matches!(self, Organization::Pc1 | Organization::Pc2)
    }
}

impl fmt::Display for Organization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Organization {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Organization::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| FeatureError::UnknownOrganization(s.to_string()))
    }
}

#[derive(Debug, Clone)]
enum Plan {
    /// Fires when any listed lemma matches under its pattern.
    AnyOf(Vec<(PatternId, BTreeMap<String, f64>)>),
    /// Value `1 + class index` of the best admitted lemma under the pattern.
    ClassOf(PatternId, BTreeMap<String, (ClassLabel, f64)>),
    /// Value `1 + position` of the earliest admitted word under the pattern.
    WordOf(PatternId, Vec<String>),
    /// Fires when this word matches under the pattern.
    Word(PatternId, String),
}

/// Encodes pattern matches of a sentence into organization variables.
#[derive(Debug, Clone)]
pub struct Organizer {
    organization: Organization,
    variables: Vec<FeatureVariable>,
    plans: Vec<Plan>,
}

impl Organizer {
    pub fn new(inv: &CollocationInventory, org: Organization) -> Result<Self, FeatureError> {
        if org.is_per_class() != inv.is_per_class() {
            return Err(FeatureError::ModeMismatch {
                organization: org.as_str(),
                per_class_inventory: inv.is_per_class(),
            });
        }
        let mut variables = Vec::new();
        let mut plans = Vec::new();
        match org {
            Organization::Pc1 => {
                for class in ClassLabel::ALL {
                    let sets: Vec<(PatternId, BTreeMap<String, f64>)> = inv
                        .patterns
                        .iter()
                        .filter_map(|e| {
                            e.class_set(class)
                                .filter(|s| !s.is_empty())
                                .map(|s| (e.pattern, s.clone()))
                        })
                        .collect();
                    if !sets.is_empty() {
                        variables.push(FeatureVariable::binary(format!("pc1:{class}")));
                        plans.push(Plan::AnyOf(sets));
                    }
                }
            }
            Organization::Pc2 => {
                for e in &inv.patterns {
                    let mut lemmas = BTreeMap::new();
                    for set in &e.per_class {
                        for (lemma, &p) in &set.lemmas {
                            lemmas.insert(lemma.clone(), (set.class, p));
                        }
                    }
                    if lemmas.is_empty() {
                        continue;
                    }
                    let values = std::iter::once(ABSENT.to_string())
                        .chain(ClassLabel::ALL.iter().map(|c| c.as_str().to_string()))
                        .collect();
                    variables.push(FeatureVariable::new(format!("pc2:{}", e.pattern), values));
                    plans.push(Plan::ClassOf(e.pattern, lemmas));
                }
            }
            Organization::Or1 => {
                for e in &inv.patterns {
                    if e.words.is_empty() {
                        continue;
                    }
                    let words: Vec<String> = e.words.keys().cloned().collect();
                    let values = std::iter::once(ABSENT.to_string()).chain(words.iter().cloned()).collect();
                    variables.push(FeatureVariable::new(format!("or1:{}", e.pattern), values));
                    plans.push(Plan::WordOf(e.pattern, words));
                }
            }
            Organization::Or2 => {
                for e in &inv.patterns {
                    for word in e.words.keys() {
                        variables.push(FeatureVariable::binary(format!("or2:{}:{word}", e.pattern)));
                        plans.push(Plan::Word(e.pattern, word.clone()));
                    }
                }
            }
        }
        Ok(Organizer {
            organization: org,
            variables,
            plans,
        })
    }

    pub fn organization(&self) -> Organization {
        self.organization
    }

    pub fn variables(&self) -> &[FeatureVariable] {
        &self.variables
    }

    pub fn encode(&self, matches: &SentenceMatches) -> Vec<u32> {
        self.plans.iter().map(|plan| encode_plan(plan, matches)).collect()
    }
}

fn encode_plan(plan: &Plan, matches: &SentenceMatches) -> u32 {
    match plan {
        Plan::AnyOf(sets) => sets
            .iter()
            .any(|(p, set)| matches.get(*p).iter().any(|m| set.contains_key(&m.lemma)))
            as u32,
        Plan::ClassOf(p, lemmas) => {
            // strongest evidence wins; ties go to the earliest token
            let mut best: Option<(f64, usize, ClassLabel)> = None;
            for m in matches.get(*p) {
                if let Some(&(class, prob)) = lemmas.get(&m.lemma) {
                    let better = best.is_none_or(|(bp, bi, _)| {
                        prob > bp || (prob == bp && m.token_index < bi)
                    });
                    if better {
                        best = Some((prob, m.token_index, class));
                    }
                }
            }
            best.map_or(0, |(_, _, c)| 1 + c.index() as u32)
        }
        Plan::WordOf(p, words) => matches
            .get(*p)
            .iter()
            .filter_map(|m| {
                words
                    .binary_search(&m.lemma)
                    .ok()
                    .map(|pos| (m.token_index, pos))
            })
            .min()
            .map_or(0, |(_, pos)| 1 + pos as u32),
        Plan::Word(p, word) => matches.get(*p).iter().any(|m| &m.lemma == word) as u32,
    }
}

/// Variables and per-sentence values of one organization.
pub fn organize(
    inv: &CollocationInventory,
    org: Organization,
    matches: &[&SentenceMatches],
) -> Result<(Vec<FeatureVariable>, Vec<Vec<u32>>), FeatureError> {
    let organizer = Organizer::new(inv, org)?;
    let rows = matches.iter().map(|m| organizer.encode(m)).collect();
    Ok((organizer.variables, rows))
}
