pub mod classifier;
pub mod config;
pub mod corpus;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod kernel;
pub mod pretrained;
pub mod rng;
pub mod synthetic;
pub mod tokens;
pub mod train;

pub use error::{Error, Result};
pub use rng::Rng;
pub use tokens::TokenSequence;
