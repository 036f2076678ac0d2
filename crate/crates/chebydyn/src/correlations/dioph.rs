//! Solutions of the spin diophantine equation `sum_l sigma_l N^{n_l} = 0`.
//!
//! Each solving sign configuration indexes a non-vanishing term of the
//! higher-order correlation of an ordinary Chebyshev map, so enumerating
//! them exactly is the core combinatorial primitive.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::HashMap;

/// A sign configuration `sigma in {-1, +1}^r`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpinConfig(pub Vec<i8>);

impl SpinConfig {
    pub fn flipped(&self) -> SpinConfig {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }
}

pub const MAX_SPINS: usize = 30;

fn powers(n: u32, times: &[u32]) -> Vec<BigInt> {
    times.iter().map(|&t| BigInt::from(n).pow(t)).collect()
}

/// All spin configurations solving `sum sigma_l N^{n_l} = 0`, in
/// lexicographic order (`-1 < +1`). Meet-in-the-middle over the two halves
/// of the tuple; exact big-integer arithmetic throughout.
pub fn diophantine_solutions(n: u32, times: &[u32]) -> Result<Vec<SpinConfig>> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    if times.is_empty() {
        return Err(Error::domain("time tuple must be nonempty"));
    }
    if times.len() > MAX_SPINS {
        return Err(Error::guard(format!(
            "tuple length {} exceeds the spin enumeration cap {MAX_SPINS}",
            times.len()
        )));
    }
    let pw = powers(n, times);
    let r = pw.len();
    let half = r / 2;
    let (left, right) = pw.split_at(half);

    // Partial sums of the right half, keyed by value.
    let mut table: HashMap<BigInt, Vec<u32>> = HashMap::new();
    for mask in 0u32..(1 << right.len()) {
        let mut sum = BigInt::zero();
        for (i, p) in right.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += p;
            } else {
                sum -= p;
            }
        }
        table.entry(sum).or_default().push(mask);
    }

    let mut out = Vec::new();
    for mask in 0u32..(1 << left.len()) {
        let mut sum = BigInt::zero();
        for (i, p) in left.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += p;
            } else {
                sum -= p;
            }
        }
        if let Some(rights) = table.get(&(-sum)) {
            for &rmask in rights {
                let mut sigma = Vec::with_capacity(r);
                for i in 0..left.len() {
                    sigma.push(if mask & (1 << i) != 0 { 1 } else { -1 });
                }
                for i in 0..right.len() {
                    sigma.push(if rmask & (1 << i) != 0 { 1 } else { -1 });
                }
                out.push(SpinConfig(sigma));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Plain exhaustive enumeration, usable up to `r <= 20`; retained as an
/// independent cross-check of the split enumeration.
pub fn diophantine_solutions_exhaustive(n: u32, times: &[u32]) -> Result<Vec<SpinConfig>> {
    if times.len() > 20 {
        return Err(Error::guard("exhaustive enumeration capped at r = 20"));
    }
    let pw = powers(n, times);
    let r = pw.len();
    let mut out = Vec::new();
    for mask in 0u64..(1 << r) {
        let mut sum = BigInt::zero();
        for (i, p) in pw.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += p;
            } else {
                sum -= p;
            }
        }
        if sum.is_zero() {
            out.push(SpinConfig(
                (0..r)
                    .map(|i| if mask & (1 << i) != 0 { 1 } else { -1 })
                    .collect(),
            ));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_spin_example() {
        // sigma_1*2 + sigma_2 + sigma_3 = 0 has exactly the two flips.
        let sols = diophantine_solutions(2, &[1, 0, 0]).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols.contains(&SpinConfig(vec![-1, 1, 1])));
        assert!(sols.contains(&SpinConfig(vec![1, -1, -1])));
    }

    #[test]
    fn single_time_never_solves() {
        assert!(diophantine_solutions(3, &[4]).unwrap().is_empty());
    }

    #[test]
    fn odd_order_odd_length_is_empty() {
        for times in [vec![0, 1, 2], vec![2, 2, 2], vec![0, 0, 1, 3, 4]] {
            assert!(diophantine_solutions(3, &times).unwrap().is_empty());
            assert!(diophantine_solutions(5, &times).unwrap().is_empty());
        }
    }

    #[test]
    fn matches_exhaustive_and_flip_symmetry() {
        for (n, times) in [
            (2u32, vec![0u32, 1, 1, 2, 3]),
            (3, vec![0, 0, 1, 1]),
            (4, vec![0, 2, 2, 1]),
            (2, vec![5, 5]),
        ] {
            let a = diophantine_solutions(n, &times).unwrap();
            let b = diophantine_solutions_exhaustive(n, &times).unwrap();
            assert_eq!(a, b, "N={n} times={times:?}");
            assert_eq!(a.len() % 2, 0);
            for s in &a {
                assert!(a.contains(&s.flipped()));
            }
        }
    }

    #[test]
    fn guard_on_tuple_length() {
        let times = vec![0u32; 31];
        assert!(matches!(
            diophantine_solutions(2, &times),
            Err(Error::Guard(_))
        ));
    }
}
