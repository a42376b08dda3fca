//! Order-preserving map over independent jobs, sequential or on rayon.
//!
//! Results land in input order whichever mode runs them, so callers can
//! aggregate without caring about scheduling.

/// How independent jobs are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    /// Rayon's global pool. Sequential without the `parallel` feature.
    #[default]
    Parallel,
    /// Dedicated rayon pool of this many workers.
    Threads(usize),
}

impl ExecMode {
    pub fn threads(n: usize) -> Self {
        if n <= 1 {
            ExecMode::Sequential
        } else {
            ExecMode::Threads(n)
        }
    }
}

/// Applies `f` to every job, returning results in job order.
pub fn map_ordered<J, R, F>(jobs: &[J], mode: ExecMode, f: F) -> Vec<R>
where
    J: Sync,
    R: Send,
    F: Fn(&J) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => jobs.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        ExecMode::Threads(n) => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| jobs.par_iter().map(&f).collect()),
                Err(_) => jobs.iter().map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel | ExecMode::Threads(_) => jobs.iter().map(f).collect(),
    }
}
