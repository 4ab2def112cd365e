//! Relative-correctness analysis and mutation-based stepwise repair for a
//! small imperative language over finite state spaces.

pub mod cli;
pub mod error;
pub mod mutation;
pub mod relations;
pub mod repair;
pub mod specs;
pub mod studies;
pub mod testing;
pub mod toylang;

pub use error::{Error, Result};
