use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use bergtube_core::experiments::Runner;

/// Spreads point evaluations over `workers` scoped threads; results are
/// returned in index order whatever the completion order.
#[derive(Debug, Clone, Copy)]
pub struct Threads {
    pub workers: usize,
}

impl Threads {
    pub fn new(workers: usize) -> Self {
        Threads { workers: workers.max(1) }
    }
}

impl Runner for Threads {
    fn map<R, F>(&self, n: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync,
    {
        if self.workers == 1 || n < 2 {
            return (0..n).map(job).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..n).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..self.workers.min(n) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let r = job(i);
                    slots.lock().expect("no worker panicked holding the lock")[i] = Some(r);
                });
            }
        });
        slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every index ran")).collect()
    }
}
