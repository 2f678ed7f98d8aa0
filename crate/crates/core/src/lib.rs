//! Corpus analytics for color usage in literary texts.
//!
//! The pipeline loads a work catalog and dependency parses, extracts nouns
//! dependency-linked to color terms, scores them on Glasgow Norm dimensions
//! (by lookup or a trained embedding regressor), and emits deterministic
//! trend, era, frequency, and projection tables.
//!
//! Numeric modules are generic over the [`Real`] scalar; the aliases at the
//! crate root fix `f64`, which is what the `colorlit` CLI uses throughout.

pub mod conllu;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod extract;
pub mod lexicon;
pub mod norms;
pub mod report;
pub mod scalar;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Real;

/// Concrete `f64` instantiations used by the command-line pipeline.
pub type EmbeddingTable = embed::EmbeddingTable<f64>;
pub type SubwordModel = embed::SubwordModel<f64>;
pub type Projection = embed::Projection<f64>;
pub type NormDimension = norms::NormDimension<f64>;
pub type NormDataset = norms::NormDataset<f64>;
pub type NormModel = norms::NormModel<f64>;
pub type EvalResult = norms::EvalResult<f64>;
pub type CorrelationResult = stats::CorrelationResult<f64>;
