//! File formats, parallel execution, and the command-line pipeline for
//! thread accuracy classification.
//!
//! The algorithms live in [`threadcred_core`]; this crate reads and writes
//! the on-disk formats (tweet JSONL, manifests, rating files, lexicons,
//! feature matrices, model dumps, reports) and wires them into the
//! `threadcred` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod lexicon;
pub mod manifest;
pub mod matrix;
pub mod models;
pub mod parallel;
pub mod ratings;
pub mod reports;
pub mod stance_io;
pub mod tweets;

pub use error::{IoError, IoResult};
pub use threadcred_core as core;
