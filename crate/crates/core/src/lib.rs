//! Exact circular orderings of groups, rotation numbers, and
//! circular-orderability certificates for Seifert fibred and graph
//! manifold groups.

pub mod apps;
pub mod bruteforce;
pub mod cli;
pub mod error;
pub mod euler;
pub mod extensions;
pub mod graph;
pub mod groups;
pub mod orders;
pub mod rational;
pub mod seifert;
pub mod verdict;

pub use error::{Error, Result};
