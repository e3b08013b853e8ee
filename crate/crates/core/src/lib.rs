//! Federated EU and Hungarian legal document toolkit: identifier grammars,
//! Hungarian text normalization, reference extraction, a file-backed
//! repository with missing-reference backfill, full-text search and a
//! dossier-level citation network.

pub mod decorate;
pub mod error;
pub mod extract;
pub mod graph;
pub mod identifiers;
pub mod index;
pub mod model;
pub mod store;
pub mod textnorm;

pub use error::{Error, Result};
