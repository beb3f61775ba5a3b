//! Reconstruction of hidden steps in symbolic derivations.
//!
//! A derivation is a sequence of equation states `(LHS, RHS)` joined by typed
//! actions. Given two states two steps apart, [`search::reconstruct`] finds
//! the state between them by a two-hop search ordered by a string-similarity
//! heuristic, and [`eval::evaluate`] scores that over a whole sequence.

pub mod action;
pub mod dataset;
pub mod eval;
pub mod expr;
pub mod generator;
pub mod kb;
pub mod scalar;
pub mod search;
pub mod similarity;
pub mod state;

pub use action::{builtin_action_set, Action, Nsa};
pub use dataset::{DerivationRecord, DerivationSequence};
pub use eval::{evaluate, EvalReport, Evaluation};
pub use expr::{parse, Expr, SymbolSet};
pub use generator::{generate, GenConfig};
pub use kb::KnowledgeBase;
pub use scalar::{Field, Real};
pub use search::{reconstruct, DerivationUnit, HeuristicParams, SearchConfig};
pub use similarity::Measure;
pub use state::{ActionCategory, EquationState, Rendering, StateType};

/// Exact numbers inside expressions.
pub type Rational = num_rational::BigRational;
/// Similarity scores and heuristic values.
pub type Score = f64;
