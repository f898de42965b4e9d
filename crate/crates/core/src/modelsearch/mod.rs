//! Decomposable log-linear models: fitting, G², backward search and
//! classification.

mod chisq;
mod classify;
mod graph;
mod model;
mod search;
mod table;

pub use chisq::{chi_squared_critical, chi_squared_sf};
pub use classify::Classifier;
pub use graph::{is_decomposable, InteractionGraph, JunctionTree};
pub use model::{fitted_count, g_squared, model_dof, DecomposableModel, FittedModel};
pub use search::{backward_search, SearchConfig, SearchStep, SearchTrace, StopReason};
pub use table::{ContingencyTable, Marginal};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("contingency table is empty")]
    EmptyTable,
    #[error("row has {found} values, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("variable {var} has value {value}, arity is {arity}")]
    ValueOutOfRange { var: usize, value: u32, arity: u32 },
    #[error("interaction graph is not chordal")]
    NotChordal,
    #[error("edge ({0}, {1}) is not in the model")]
    NoSuchEdge(usize, usize),
    #[error("variable {var} out of range for a model over {num_vars} variables")]
    NoSuchVariable { var: usize, num_vars: usize },
    #[error("model has {model} variables but the table has {table}")]
    VariableCount { model: usize, table: usize },
}
