use rayon::prelude::*;

use crate::harness::rng::Stream;
use crate::harness::seed::derive_seed;

/// Replicates per work unit. Fixed so that results never depend on the
/// number of worker threads.
pub const CHUNK: usize = 256;

/// Associative combination of partial accumulators.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: Self) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

/// Runs `replicates` independent replicates in parallel.
///
/// Replicate `r` draws from `Stream::from_seed(derive_seed(master, r))`.
/// Chunks of [`CHUNK`] replicates are accumulated sequentially and merged in
/// replicate-index order, so the result is bit-identical for any thread count.
pub fn run_replicates<A, I, F>(master: u64, replicates: usize, init: I, step: F) -> A
where
    A: Merge + Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &mut Stream, usize) + Sync,
{
    let chunks = replicates.div_ceil(CHUNK);
    let partials: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let end = ((c + 1) * CHUNK).min(replicates);
            for r in c * CHUNK..end {
                let mut stream = Stream::from_seed(derive_seed(master, r as u64));
                step(&mut acc, &mut stream, r);
            }
            acc
        })
        .collect();
    let mut out = init();
    for p in partials {
        out.merge(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::estimate::Welford;

    #[test]
    fn independent_of_thread_count() {
        let run = || {
            run_replicates(5, 5000, Welford::new, |acc, s, _| acc.push(s.normal()))
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(one, four);
        assert_eq!(one.count(), 5000);
    }

    #[test]
    fn zero_replicates() {
        let w = run_replicates(1, 0, Welford::new, |acc, s, _| acc.push(s.uniform()));
        assert_eq!(w.count(), 0);
    }
}
