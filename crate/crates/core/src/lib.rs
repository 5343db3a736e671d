pub mod concordance;
pub mod corpus;
pub mod disambig;
pub mod error;
pub mod gazetteer;
pub mod ngram;
pub mod suffix;
pub mod synth;
pub mod temporal;
pub mod text;
pub mod translit;

pub use error::{Error, Result};
