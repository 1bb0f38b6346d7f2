//! Code retrieval from natural-language queries by learning projections of
//! word features and code-structure features into a shared latent space.

pub mod corpus;
mod error;
pub mod eval;
pub mod features;
pub mod hmlcr;
pub mod pipeline;
pub mod retrieval;
pub mod synthetic;
pub mod vectorize;

pub use corpus::{CodeDocument, LanguageProfile, Query};
pub use error::{Error, Result};
pub use hmlcr::{Hyperparams, Model};
pub use pipeline::{CorpusIndex, IndexOptions};
