//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the heavy loops fan out on rayon;
//! without it they run sequentially with the same code shape. Results are
//! collected in index order and reduced sequentially, so output bits do not
//! depend on the thread count.

/// Maps `0..n` and collects in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Strictly sequential variant, kept callable regardless of features so the
/// bench suite can compare both paths.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// In-place elementwise update of `out[i] = f(i)` over preallocated storage.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, slot)| *slot = f(i));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(i);
        }
    }
}

pub fn fill_indexed_seq<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize) -> T,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}
