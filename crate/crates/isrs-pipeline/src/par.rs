//! Order-preserving map over a slice. Parallel execution needs the
//! `parallel` feature; without it every request runs sequentially.

/// How independent work items are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon's current pool when the `parallel` feature is on.
    #[default]
    Parallel,
    Sequential,
}

pub(crate) fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
