//! Execution strategy for the data-parallel inner loops (expert updates,
//! coordinate instances). Without the `parallel` feature every strategy runs
//! sequentially.

/// Work below this many scalar operations per round is not worth a fork/join.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

impl Execution {
    /// Parallel when more than one worker thread is available and the
    /// per-round work estimate is large enough to amortize the scheduling
    /// overhead.
    pub fn auto(work_per_round: usize) -> Self {
        if worker_threads() > 1 && work_per_round >= PARALLEL_WORK_THRESHOLD {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    /// Whether this build can actually run in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn for_each_mut<T, F>(self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(&mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            items.par_iter_mut().for_each(f);
            return;
        }
        items.iter_mut().for_each(f);
    }

    /// Maps every item, keeping input order in the output.
    pub fn map_mut<T, R, F>(self, items: &mut [T], f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(&mut T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter_mut().map(f).collect();
        }
        items.iter_mut().map(f).collect()
    }

    /// Like [`Execution::map_mut`], pairing each item with `other[i]`.
    pub fn zip_map_mut<T, U, R, F>(self, items: &mut [T], other: &[U], f: F) -> Vec<R>
    where
        T: Send,
        U: Sync,
        R: Send,
        F: Fn(&mut T, &U) -> R + Sync + Send,
    {
        assert_eq!(items.len(), other.len());
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items
                .par_iter_mut()
                .zip(other.par_iter())
                .map(|(t, u)| f(t, u))
                .collect();
        }
        items.iter_mut().zip(other).map(|(t, u)| f(t, u)).collect()
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

/// Size of the pool parallel loops run on; 1 without the `parallel` feature.
pub fn worker_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let mut a: Vec<u64> = (0..1000).collect();
        let mut b = a.clone();
        Execution::Sequential.for_each_mut(&mut a, |x| *x = *x * 3 + 1);
        Execution::Parallel.for_each_mut(&mut b, |x| *x = *x * 3 + 1);
        assert_eq!(a, b);
        let sa = Execution::Sequential.map(&a, |x| x % 7);
        let sb = Execution::Parallel.map(&b, |x| x % 7);
        assert_eq!(sa, sb);
    }

    #[test]
    fn auto_stays_sequential_for_small_work() {
        assert_eq!(Execution::auto(10), Execution::Sequential);
    }
}
