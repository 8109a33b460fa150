//! Scheduling of independent, seeded work items.
//!
//! Algorithms hand a list of items to an [`Executor`] and receive results in
//! input order. Each item carries its own seed, so a parallel executor gives
//! bit-identical output to [`Sequential`].

use alloc::vec::Vec;

pub trait Executor: Sync {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_iter().map(f).collect()
    }
}
