//! Index-range scan helpers.
//!
//! Every exhaustive pass over a ring's element space goes through here, so the
//! whole crate switches between rayon and plain loops in one place. Results
//! are identical in both modes: filters preserve ascending order and searches
//! return the least matching index, regardless of worker count.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Route all scans through plain sequential loops even when the `parallel`
/// feature is compiled in. Used by `--jobs 1` and by the benchmarks.
pub fn set_sequential(seq: bool) {
    FORCE_SEQUENTIAL.store(seq, Ordering::SeqCst);
}

pub fn is_sequential() -> bool {
    cfg!(not(feature = "parallel")) || FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

// Scans below a few thousand elements are not worth bridging into rayon.
const PAR_THRESHOLD: u64 = 1 << 12;

/// Indices in `0..n` satisfying `pred`, ascending.
pub fn filter_indices<F>(n: u64, pred: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() && n >= PAR_THRESHOLD {
        return (0..n).into_par_iter().filter(|&i| pred(i)).collect();
    }
    seq::filter_indices(n, pred)
}

/// Least index in `0..n` satisfying `pred`.
pub fn find_first<F>(n: u64, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() && n >= PAR_THRESHOLD {
        return (0..n).into_par_iter().find_first(|&i| pred(i));
    }
    seq::find_first(n, pred)
}

/// Map every index and collect in order.
pub fn map_indices<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() && n >= PAR_THRESHOLD {
        return (0..n).into_par_iter().map(f).collect();
    }
    seq::map_indices(n, f)
}

/// Sequential implementations; also the only ones compiled without the
/// `parallel` feature. Public so the benchmarks can compare both paths.
pub mod seq {
    pub fn filter_indices<F>(n: u64, pred: F) -> Vec<u64>
    where
        F: Fn(u64) -> bool,
    {
        (0..n).filter(|&i| pred(i)).collect()
    }

    pub fn find_first<F>(n: u64, pred: F) -> Option<u64>
    where
        F: Fn(u64) -> bool,
    {
        (0..n).find(|&i| pred(i))
    }

    pub fn map_indices<T, F>(n: u64, f: F) -> Vec<T>
    where
        F: Fn(u64) -> T,
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let n = (PAR_THRESHOLD) + 17;
        let par = filter_indices(n, |i| i % 7 == 3);
        let s = seq::filter_indices(n, |i| i % 7 == 3);
        assert_eq!(par, s);
        assert_eq!(find_first(n, |i| i > 9000), seq::find_first(n, |i| i > 9000));
    }
}
