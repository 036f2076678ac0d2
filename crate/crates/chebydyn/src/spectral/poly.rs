//! Bernoulli and Euler polynomials with exact rational coefficients.
//!
//! Floating recurrences for Bernoulli numbers lose precision almost
//! immediately, so coefficients are produced by the exact defining
//! recurrences and only converted to `f64` at evaluation time.

use crate::rat::{poly_eval_rat, rat_int, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCoeffs {
    coeffs: Vec<Rat>,
}

impl PolynomialCoeffs {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(Rat::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        PolynomialCoeffs { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        poly_eval_rat(&self.coeffs, x)
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k.min(n - k) {
        num = num * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    num
}

/// Bernoulli numbers `B_0..=B_n` from `sum_{k<=m} C(m+1,k) B_k = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::one());
    for m in 1..=n {
        let mut acc = Rat::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += Rat::from_integer(binomial(m + 1, k)) * bk;
        }
        b.push(-acc / rat_int((m + 1) as i64));
    }
    b
}

/// `B_n(x) = sum_k C(n,k) B_k x^{n-k}` with exact coefficients.
pub fn bernoulli_poly(n: usize) -> PolynomialCoeffs {
    let nums = bernoulli_numbers(n);
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (k, bk) in nums.iter().enumerate() {
        coeffs[n - k] = Rat::from_integer(binomial(n, k)) * bk;
    }
    PolynomialCoeffs::new(coeffs)
}

/// `E_n(x) = 2/(n+1) * (B_{n+1}(x) - 2^{n+1} B_{n+1}(x/2))`.
pub fn euler_poly(n: usize) -> PolynomialCoeffs {
    let b = bernoulli_poly(n + 1);
    let two_pow = Rat::from_integer(BigInt::from(2).pow((n + 1) as u32));
    let scale = rat_int(2) / rat_int((n + 1) as i64);
    let mut coeffs = vec![Rat::zero(); n + 1];
    let mut half_pow = Rat::one();
    for (j, c) in b.coeffs().iter().enumerate() {
        // B_{n+1}(x/2) scales coefficient j by 2^{-j}.
        let v = c - &two_pow * c * &half_pow;
        if j <= n {
            coeffs[j] = &scale * v;
        } else {
            debug_assert!(v.is_zero(), "leading terms must cancel");
        }
        half_pow /= rat_int(2);
    }
    PolynomialCoeffs::new(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    Bernoulli,
    Euler,
}

/// Max residual of the multiplication theorem at `sample_count` rational
/// points in `[0, 1]`, computed in exact arithmetic (so the return value is
/// exactly 0 when the identity holds).
///
/// Bernoulli: `B_n(m x) = m^{n-1} sum_{k<m} B_n(x + k/m)`;
/// Euler (odd `m` only): `E_n(m x) = m^n sum_{k<m} (-1)^k E_n(x + k/m)`.
pub fn multiplication_theorem_check(
    kind: PolyKind,
    n: usize,
    m: usize,
    sample_count: usize,
) -> crate::Result<f64> {
    if m == 0 {
        return Err(crate::Error::domain("m must be >= 1"));
    }
    if kind == PolyKind::Euler && m % 2 == 0 {
        return Err(crate::Error::domain(
            "the Euler multiplication theorem needs odd m",
        ));
    }
    let poly = match kind {
        PolyKind::Bernoulli => bernoulli_poly(n),
        PolyKind::Euler => euler_poly(n),
    };
    let m_rat = rat_int(m as i64);
    let factor = match kind {
        // m^{n-1}, understood as 1/m for n = 0.
        PolyKind::Bernoulli => {
            let mut f = Rat::one() / &m_rat;
            for _ in 0..n {
                f *= &m_rat;
            }
            f
        }
        PolyKind::Euler => {
            let mut f = Rat::one();
            for _ in 0..n {
                f *= &m_rat;
            }
            f
        }
    };
    let mut worst = Rat::zero();
    for t in 0..sample_count.max(1) {
        let x = rat_int(t as i64) / rat_int(sample_count.max(1) as i64 + 1);
        let lhs = poly.eval_rat(&(&x * &m_rat));
        let mut sum = Rat::zero();
        for k in 0..m {
            let term = poly.eval_rat(&(&x + rat_int(k as i64) / &m_rat));
            match kind {
                PolyKind::Bernoulli => sum += term,
                PolyKind::Euler => {
                    if k % 2 == 0 {
                        sum += term;
                    } else {
                        sum -= term;
                    }
                }
            }
        }
        let resid = (lhs - &factor * sum).abs();
        if resid > worst {
            worst = resid;
        }
    }
    Ok(to_f64(&worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn low_order_bernoulli_polys() {
        assert_eq!(bernoulli_poly(0).coeffs(), &[rat(1, 1)]);
        assert_eq!(bernoulli_poly(1).coeffs(), &[rat(-1, 2), rat(1, 1)]);
        // B_2(x) = x^2 - x + 1/6, with B_2(0) = B_2(1) = 1/6.
        let b2 = bernoulli_poly(2);
        assert_eq!(b2.coeffs(), &[rat(1, 6), rat(-1, 1), rat(1, 1)]);
        assert_eq!(b2.eval_rat(&rat(0, 1)), b2.eval_rat(&rat(1, 1)));
    }

    #[test]
    fn low_order_euler_polys() {
        assert_eq!(euler_poly(0).coeffs(), &[rat(1, 1)]);
        // E_1(x) = x - 1/2, E_1(1/2) = 0.
        let e1 = euler_poly(1);
        assert_eq!(e1.coeffs(), &[rat(-1, 2), rat(1, 1)]);
        assert!(e1.eval_rat(&rat(1, 2)).is_zero());
        // E_3(x) = x^3 - 3/2 x^2 + 1/4.
        assert_eq!(
            euler_poly(3).coeffs(),
            &[rat(1, 4), rat(0, 1), rat(-3, 2), rat(1, 1)]
        );
    }

    #[test]
    fn bernoulli_numbers_known_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat(0, 1));
        assert_eq!(b[12], rat(-691, 2730));
    }

    #[test]
    fn multiplication_theorems_are_exact() {
        assert_eq!(
            multiplication_theorem_check(PolyKind::Bernoulli, 2, 3, 7).unwrap(),
            0.0
        );
        assert_eq!(
            multiplication_theorem_check(PolyKind::Euler, 3, 3, 7).unwrap(),
            0.0
        );
        assert_eq!(
            multiplication_theorem_check(PolyKind::Bernoulli, 6, 4, 9).unwrap(),
            0.0
        );
        assert!(multiplication_theorem_check(PolyKind::Euler, 3, 2, 5).is_err());
    }

    #[test]
    fn odd_euler_antisymmetry() {
        // E_{2n-1}(1/2 - x) = -E_{2n-1}(1/2 + x)
        let e5 = euler_poly(5);
        for t in 0..10 {
            let x = rat(t, 21);
            let lhs = e5.eval_rat(&(rat(1, 2) - &x));
            let rhs = -e5.eval_rat(&(rat(1, 2) + &x));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn large_order_is_safe() {
        let b = bernoulli_poly(200);
        assert_eq!(b.degree(), 200);
        let e = euler_poly(120);
        assert_eq!(e.degree(), 120);
    }
}
