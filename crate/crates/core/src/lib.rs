//! Accuracy classification for popular social-media conversation threads.
//!
//! This crate holds the allocation-only algorithmic core: reply-tree
//! reconstruction, label alignment, the disagreement (stance) classifier,
//! the 45-feature thread extractor, from-scratch random forests and
//! evaluation metrics, and recursive feature elimination / cross-dataset
//! transfer. It performs no IO; the `threadcred` crate carries file
//! formats, parallel execution, and the command-line pipeline.
//!
//! Every stochastic step draws from a stream derived from a master seed and
//! a task label (see [`rng`]), so results do not depend on scheduling.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod align;
pub mod error;
pub mod exec;
pub mod features;
pub mod ingest;
pub mod learn;
pub mod rng;
pub mod select;
pub mod stance;
pub mod synth;

#[cfg(feature = "serde")]
mod serde_ext;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use ingest::{Label, ThreadTree, TweetRecord};
