//! Batch executor: maps a pure function over a slice either on the calling
//! thread or on a rayon pool. Output order always follows input order.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Default)]
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("workers", &self.workers()).finish()
    }
}

impl Executor {
    pub fn sequential() -> Self {
        Self::default()
    }

    /// Pool with `jobs` workers (`None` = one per core). Without the
    /// `parallel` feature this is the sequential executor.
    #[cfg(feature = "parallel")]
    pub fn parallel(jobs: Option<usize>) -> Self {
        if jobs == Some(1) {
            return Self::sequential();
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            builder = builder.num_threads(n);
        }
        match builder.build() {
            Ok(pool) => Self { pool: Some(Arc::new(pool)) },
            Err(_) => Self::sequential(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn parallel(_jobs: Option<usize>) -> Self {
        Self::sequential()
    }

    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}
