//! Thread-pool execution of independent work items.

use rayon::prelude::*;
use rayon::ThreadPool;
use threadcred_core::Executor;

/// Runs items on a dedicated rayon pool; results keep input order.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `jobs == 0` uses one worker per available hardware thread.
    pub fn new(jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }
}
