//! Feature attribution for small, exhaustively analysable ML models.
//!
//! Two cooperative games are defined over the features of a model:
//!
//! * the expected-value game, whose Shapley values are the classical SHAP
//!   scores, and
//! * the abductive-explanation game, whose characteristic function is the
//!   0/1 indicator "the coalition is a weak abductive explanation".
//!
//! Alongside the games the crate decides weak/minimal abductive and
//! contrastive explanations (model-aware and sample-based), enumerates them
//! through hitting-set duality, approximates Shapley values by permutation
//! sampling and compares the induced feature rankings with rank-biased
//! overlap.
//!
//! All values that can be exact are exact: expectations, characteristic
//! functions and Shapley values are [`Rational`]s.

pub mod cgt;
pub mod error;
pub mod explanations;
pub mod featureset;
pub mod games;
pub mod io;
pub mod models;
pub mod ranking;
pub mod rational;
pub mod similarity;

pub use error::{Error, Result};
pub use explanations::{Sample, Universe};
pub use featureset::FeatureSet;
pub use games::{Game, GameKind, Method, ScoreVector};
pub use models::{Domain, FeatureSpace, Instance, Model, Point, Value, ValueKind};
pub use rational::Rational;
pub use similarity::{ExplanationProblem, SimilarityConfig};

/// Upper bound on the number of features for any routine that walks the
/// full coalition lattice.
pub const MAX_EXACT_FEATURES: usize = 24;
