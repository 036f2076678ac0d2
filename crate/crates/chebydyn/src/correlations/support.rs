//! Generalized correlations for arbitrary conjugating functions.
//!
//! A smooth map conjugated to an N-ary shift with conjugating function
//! `f(u) = sum_k a_k e^{i pi k u}` has r-th order correlations
//! `sum a_{k_1}..a_{k_r} delta(sum_j k_j N^{n_j}, 0)`. The cosine
//! conjugation has support `{-1, +1}` only; any other support admits more
//! solving index tuples, which is the minimality property the counting
//! operation makes testable.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// Finite Fourier support `{k -> a_k}` with `a_{-k} = conj(a_k)` and no
/// `k = 0` term (observables are centred).
#[derive(Debug, Clone)]
pub struct FourierSupport {
    coeffs: BTreeMap<i64, Complex64>,
}

pub const MAX_TUPLE_LEN: usize = 12;
pub const MAX_SUPPORT: usize = 41;
const MAX_ENUMERATION: f64 = 2e7;

impl FourierSupport {
    pub fn new(coeffs: BTreeMap<i64, Complex64>) -> Result<Self> {
        if coeffs.len() > MAX_SUPPORT {
            return Err(Error::guard(format!(
                "support size {} exceeds {MAX_SUPPORT}",
                coeffs.len()
            )));
        }
        if coeffs.contains_key(&0) {
            return Err(Error::domain(
                "support must not contain k = 0 (observables are centred)",
            ));
        }
        for (&k, &a) in &coeffs {
            let conj = coeffs.get(&-k).copied().unwrap_or(Complex64::zero());
            if (conj - a.conj()).norm() > 1e-12 {
                return Err(Error::domain(format!(
                    "support must satisfy a(-k) = conj(a(k)); violated at k = {k}"
                )));
            }
        }
        Ok(FourierSupport { coeffs })
    }

    /// Cosine conjugation: `a_{-1} = a_1 = 1/2`.
    pub fn chebyshev() -> Self {
        let mut m = BTreeMap::new();
        m.insert(1, Complex64::new(0.5, 0.0));
        m.insert(-1, Complex64::new(0.5, 0.0));
        FourierSupport { coeffs: m }
    }

    /// The centred N-ary shift observable `u - 1/2` on the unit circle,
    /// embedded in half-integer harmonics: `a_k = i/(pi k)` on even `k != 0`,
    /// truncated to `|k| <= k_max`.
    pub fn sawtooth(k_max: i64) -> Result<Self> {
        let mut m = BTreeMap::new();
        let mut k = 2;
        while k <= k_max {
            let amp = Complex64::new(0.0, 1.0 / (std::f64::consts::PI * k as f64));
            m.insert(k, amp);
            m.insert(-k, amp.conj());
            k += 2;
        }
        FourierSupport::new(m)
    }

    /// Real symmetric support from explicit `(k, a_k)` pairs with `k > 0`.
    pub fn from_real_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        let mut m = BTreeMap::new();
        for &(k, a) in pairs {
            if k <= 0 {
                return Err(Error::domain("pairs must use positive k"));
            }
            m.insert(k, Complex64::new(a, 0.0));
            m.insert(-k, Complex64::new(a, 0.0));
        }
        FourierSupport::new(m)
    }

    pub fn indices(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn amplitude(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::zero())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn guard_enumeration(support: &FourierSupport, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::domain("tuple must be nonempty"));
    }
    if r > MAX_TUPLE_LEN {
        return Err(Error::guard(format!("tuple length {r} exceeds {MAX_TUPLE_LEN}")));
    }
    let half = r.div_ceil(2);
    if (support.len() as f64).powi(half as i32) > MAX_ENUMERATION {
        return Err(Error::guard(
            "support^(r/2) enumeration exceeds the complexity cap",
        ));
    }
    Ok(())
}

/// Weighted partial sums `sum k_j N^{n_j}` over `support^(len)`, with the
/// accumulated amplitude product per sum.
fn partial_sums(
    support: &FourierSupport,
    n: u32,
    times: &[u32],
) -> HashMap<BigInt, Complex64> {
    let mut acc: HashMap<BigInt, Complex64> = HashMap::new();
    acc.insert(BigInt::zero(), Complex64::new(1.0, 0.0));
    for &t in times {
        let scale = BigInt::from(n).pow(t);
        let mut next: HashMap<BigInt, Complex64> = HashMap::with_capacity(acc.len() * support.len());
        for (sum, amp) in &acc {
            for (&k, &a) in &support.coeffs {
                let ns = sum + BigInt::from(k) * &scale;
                *next.entry(ns).or_insert(Complex64::zero()) += amp * a;
            }
        }
        acc = next;
    }
    acc
}

/// `< w_{n_1} .. w_{n_r} >` for the observable with the given support, via
/// meet-in-the-middle over weighted partial sums. The imaginary residue of
/// the delta sum is checked below 1e-12 and discarded.
pub fn generalized_correlation(
    support: &FourierSupport,
    n: u32,
    times: &[u32],
) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    guard_enumeration(support, times.len())?;
    let half = times.len() / 2;
    let left = partial_sums(support, n, &times[..half]);
    let right = partial_sums(support, n, &times[half..]);
    let (small, large) = if left.len() <= right.len() {
        (&left, &right)
    } else {
        (&right, &left)
    };
    let mut total = Complex64::zero();
    for (sum, amp) in small {
        if let Some(other) = large.get(&-sum) {
            total += amp * other;
        }
    }
    if total.im.abs() > 1e-12 {
        return Err(Error::domain(format!(
            "correlation sum has imaginary residue {}",
            total.im
        )));
    }
    Ok(total.re)
}

/// Does any index tuple with nonzero amplitudes solve the weighted equation?
fn tuple_has_solution(support: &FourierSupport, n: u32, times: &[u32]) -> bool {
    let half = times.len() / 2;
    let left = partial_sums(support, n, &times[..half]);
    let right = partial_sums(support, n, &times[half..]);
    // Amplitude products never cancel to exactly zero for the supports in
    // use; existence is keyed on the sums alone.
    let (small, large) = if left.len() <= right.len() {
        (&left, &right)
    } else {
        (&right, &left)
    };
    small.keys().any(|s| large.contains_key(&-s))
}

/// Number of time tuples in `{0..n_max}^r` whose generalized correlation has
/// at least one surviving delta term.
pub fn count_nonzero_tuples(
    support: &FourierSupport,
    n: u32,
    r: usize,
    n_max: u32,
) -> Result<u64> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    guard_enumeration(support, r)?;
    let mut count = 0u64;
    let mut tuple = vec![0u32; r];
    loop {
        if tuple_has_solution(support, n, &tuple) {
            count += 1;
        }
        // Odometer increment over {0..n_max}^r.
        let mut i = 0;
        loop {
            if i == r {
                return Ok(count);
            }
            if tuple[i] < n_max {
                tuple[i] += 1;
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// Tail bound for the truncated sawtooth two-point value at lag `d`:
/// the exact solution family is `k_1 = -k_2 N^d`, so dropping `|k_2| > K`
/// discards `sum_{|k_2|>K, even} 1/(pi^2 k_2^2 N^d) <= 1/(pi^2 N^d) * 2/K`.
pub fn sawtooth_twopoint_tail_bound(k_max: i64, n: u32, lag: u32) -> f64 {
    let nd = (n as f64).powi(lag as i32);
    2.0 / (std::f64::consts::PI.powi(2) * nd * k_max as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_support_matches_spin_sums() {
        let s = FourierSupport::chebyshev();
        let v = generalized_correlation(&s, 2, &[5, 5]).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        let v = generalized_correlation(&s, 2, &[1, 0, 0]).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn single_time_is_centred() {
        for s in [
            FourierSupport::chebyshev(),
            FourierSupport::sawtooth(20).unwrap(),
            FourierSupport::from_real_pairs(&[(1, 0.4), (3, -0.2)]).unwrap(),
        ] {
            for n in [2u32, 3] {
                for t in 0..4 {
                    assert_eq!(generalized_correlation(&s, n, &[t]).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn sawtooth_two_point_binary() {
        // 1/12 * (1/2)^|n1-n2| up to the truncation tail.
        let s = FourierSupport::sawtooth(20).unwrap();
        let v = generalized_correlation(&s, 2, &[3, 4]).unwrap();
        let bound = sawtooth_twopoint_tail_bound(20, 2, 1);
        assert!(bound < 5.2e-3);
        assert!((v - 1.0 / 24.0).abs() < bound, "{v} vs 1/24 +- {bound}");
        // Lag 0: 1/12.
        let v0 = generalized_correlation(&s, 2, &[2, 2]).unwrap();
        assert!((v0 - 1.0 / 12.0).abs() < sawtooth_twopoint_tail_bound(20, 2, 0));
    }

    #[test]
    fn rejects_zero_index_and_asymmetric_supports() {
        let mut m = BTreeMap::new();
        m.insert(0i64, Complex64::new(1.0, 0.0));
        assert!(FourierSupport::new(m).is_err());
        let mut m = BTreeMap::new();
        m.insert(1i64, Complex64::new(0.0, 0.5));
        m.insert(-1i64, Complex64::new(0.0, 0.5)); // should be the conjugate
        assert!(FourierSupport::new(m).is_err());
    }

    #[test]
    fn counting_fixtures() {
        let cheb = FourierSupport::chebyshev();
        assert_eq!(count_nonzero_tuples(&cheb, 2, 2, 3).unwrap(), 4);
        let saw = FourierSupport::sawtooth(20).unwrap();
        assert_eq!(count_nonzero_tuples(&saw, 2, 2, 3).unwrap(), 16);
        assert_eq!(count_nonzero_tuples(&cheb, 3, 3, 4).unwrap(), 0);
    }

    #[test]
    fn guards_fire() {
        let s = FourierSupport::sawtooth(40).unwrap();
        assert!(matches!(
            generalized_correlation(&s, 2, &vec![0; 13]),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            count_nonzero_tuples(&s, 2, 9, 1),
            Err(Error::Guard(_))
        ));
    }
}
