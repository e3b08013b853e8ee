//! Command-line tool and HTTP API over a lexgraph repository.

pub mod cli;
pub mod server;
pub mod service;
