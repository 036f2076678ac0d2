//! Exact rational arithmetic helpers.
//!
//! All exact constructions (branch tables, Markov partitions, transfer
//! matrices, step densities, polynomial coefficients) are carried by
//! arbitrary-precision rationals so that fixtures like 19/118 come out with
//! zero rational error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for pathological magnitudes.
        let num = r.numer().to_f64().unwrap_or(f64::NAN);
        let den = r.denom().to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Formats as `p/q` (or just `p` for integers), the serialization format used
/// in JSON output.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
    }
}

pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Reduces `r` modulo `m > 0` into `[0, m)`.
pub fn rem_euclid(r: &Rat, m: &Rat) -> Rat {
    let q = (r / m).floor();
    r - q * m
}

/// `sin(pi * r)` with the argument reduced exactly modulo 2 before conversion
/// to floating point, so huge rationals do not lose the phase.
pub fn sin_pi(r: &Rat) -> f64 {
    let two = rat_int(2);
    let red = rem_euclid(r, &two);
    (std::f64::consts::PI * to_f64(&red)).sin()
}

/// `cos(pi * r)`, reduced like [`sin_pi`].
pub fn cos_pi(r: &Rat) -> f64 {
    let two = rat_int(2);
    let red = rem_euclid(r, &two);
    (std::f64::consts::PI * to_f64(&red)).cos()
}

/// Kernel basis of a square rational matrix, by Gauss-Jordan elimination.
///
/// Returns one basis vector per free column of the reduced row-echelon form.
pub fn kernel_basis(mat: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = mat.len();
    if n == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(sel) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, sel);
        let inv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let sub = &f * &m[row][c];
                    m[r][c] = &m[r][c] - sub;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rat::zero(); cols];
        v[fc] = Rat::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Evaluates `sum_i coeffs[i] * x^i` in exact arithmetic.
pub fn poly_eval_rat(coeffs: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_format_roundtrip() {
        for s in ["19/118", "-3/7", "4", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn kernel_of_singular_matrix() {
        // (A - I) for the 2x2 doubly stochastic tent matrix: kernel = span{(1,1)}.
        let m = vec![
            vec![rat(-1, 2), rat(1, 2)],
            vec![rat(1, 2), rat(-1, 2)],
        ];
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0], basis[0][1]);
    }

    #[test]
    fn sin_pi_reduces_huge_arguments() {
        // sin(pi * (big integer + 1/2)) = +-1 exactly depending on parity.
        let big = Rat::from_integer(BigInt::from(3u8).pow(40)) + rat(1, 2);
        assert!((sin_pi(&big).abs() - 1.0).abs() < 1e-12);
    }
}
