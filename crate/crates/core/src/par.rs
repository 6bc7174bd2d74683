//! Data-parallel maps with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over rayon; without
//! it every map runs in order on the calling thread. Results are always
//! returned in input order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch of independent jobs is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Up to `jobs` worker threads. Runs sequentially when the crate is
    /// built without the `parallel` feature.
    Parallel {
        jobs: usize,
    },
}

impl Execution {
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { jobs }
        }
    }
}

/// Order-preserving map on the ambient thread pool.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Order-preserving map under an explicit [`Execution`]. Nested calls to
/// [`map`] inside `f` run on the same pool, so `Sequential` stays on one
/// thread throughout.
#[cfg(feature = "parallel")]
pub fn map_with<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let threads = match exec {
        Execution::Sequential => 1,
        Execution::Parallel { jobs } => jobs,
    };
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| match exec {
            Execution::Sequential => items.iter().map(&f).collect(),
            Execution::Parallel { .. } => items.par_iter().map(&f).collect(),
        }),
        Err(err) => {
            log::warn!("could not start a {threads}-thread pool ({err}); running on the calling thread");
            items.iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_with<T, R, F>(items: &[T], _exec: Execution, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..200).collect();
        let want: Vec<u64> = items.iter().map(|x| x * x).collect();
        assert_eq!(map(&items, |x| x * x), want);
        for exec in [Execution::Sequential, Execution::Parallel { jobs: 3 }] {
            assert_eq!(map_with(&items, exec, |x| x * x), want);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn sequential_pins_nested_maps_to_one_thread() {
        let outer = [0u8; 3];
        let counts = map_with(&outer, Execution::Sequential, |_| {
            let inner: Vec<usize> = (0..64).collect();
            map(&inner, |_| rayon::current_num_threads())
        });
        assert!(counts.iter().flatten().all(|&n| n == 1));
    }

    #[test]
    fn from_jobs() {
        assert_eq!(Execution::from_jobs(0), Execution::Sequential);
        assert_eq!(Execution::from_jobs(1), Execution::Sequential);
        assert_eq!(Execution::from_jobs(4), Execution::Parallel { jobs: 4 });
    }
}
