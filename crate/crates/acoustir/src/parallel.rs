//! Scoped-thread executor for the tracer.

use std::ops::Range;
use std::thread;

use acoustir_core::Executor;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "ACOUSTIR_WORKERS";

/// Splits work into `workers` contiguous ranges, one thread each.
#[derive(Clone, Copy, Debug)]
pub struct Threads {
    workers: usize,
}

impl Threads {
    pub fn new(workers: usize) -> Threads {
        Threads { workers: workers.max(1) }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Worker count from [`WORKERS_ENV`], else 1.
    pub fn from_env() -> Threads {
        let n = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(1);
        Threads::new(n)
    }
}

pub fn split(n: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.clamp(1, n.max(1));
    let (base, extra) = (n / parts, n % parts);
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

impl Executor for Threads {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync,
    {
        let ranges = split(n, self.workers);
        if ranges.len() == 1 {
            return vec![job(0..n)];
        }
        let job = &job;
        thread::scope(|s| {
            let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(move || job(r))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_range() {
        assert_eq!(split(10, 3), vec![0..4, 4..7, 7..10]);
        assert_eq!(split(2, 8), vec![0..1, 1..2]);
        assert_eq!(split(0, 4), vec![0..0]);
    }

    #[test]
    fn results_in_range_order() {
        let out = Threads::new(4).run(103, |r| r.clone().sum::<usize>());
        assert_eq!(out.len(), 4);
        assert_eq!(out.iter().sum::<usize>(), (0..103).sum::<usize>());
        assert_eq!(out[0], (0..26).sum::<usize>());
    }
}
