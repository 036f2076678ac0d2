//! Exact transfer-operator action on piecewise polynomials.
//!
//! For a piecewise-linear map whose branch breakpoints generate a finite
//! Markov partition, the space of piecewise polynomials of bounded degree
//! over that partition is invariant under the transfer operator: branch
//! preimages are affine, and both branch ends and polynomial breakpoints pull
//! back onto partition points. The operator is therefore a finite rational
//! matrix, and eigenfunctions at an exactly-known eigenvalue are kernel
//! vectors of a rational linear system. This is how eigenfunctions of the
//! shifted even-order maps are constructed without a closed form.

use crate::density::MarkovPartition;
use crate::maps::PiecewiseLinearMap;
use crate::rat::{format_rat, kernel_basis, poly_eval_rat, rat_int, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Piecewise polynomial over a Markov partition: per-cell ascending
/// coefficients in the global coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    partition: MarkovPartition,
    coeffs: Vec<Vec<Rat>>,
}

impl PiecewisePoly {
    pub fn constant_one(partition: MarkovPartition) -> Self {
        let coeffs = vec![vec![Rat::one()]; partition.cell_count()];
        PiecewisePoly { partition, coeffs }
    }

    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    pub fn cell_coeffs(&self) -> &[Vec<Rat>] {
        &self.coeffs
    }

    pub fn eval_rat(&self, y: &Rat) -> Option<Rat> {
        let i = self.partition.cell_of(y)?;
        Some(poly_eval_rat(&self.coeffs[i], y))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let y = y.clamp(0.0, 1.0);
        let pts = self.partition.points();
        let nc = self.partition.cell_count();
        let mut cell = nc - 1;
        for i in 0..nc {
            if y < to_f64(&pts[i + 1]) {
                cell = i;
                break;
            }
        }
        let mut acc = 0.0;
        for c in self.coeffs[cell].iter().rev() {
            acc = acc * y + to_f64(c);
        }
        acc
    }

    pub fn scaled(&self, s: &Rat) -> Self {
        PiecewisePoly {
            partition: self.partition.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|cs| cs.iter().map(|c| c * s).collect())
                .collect(),
        }
    }

    /// Integral over `[0, 1]`, exact.
    pub fn integral(&self) -> Rat {
        let mut acc = Rat::zero();
        for (i, cs) in self.coeffs.iter().enumerate() {
            let (lo, hi) = self.partition.cell(i);
            for (d, c) in cs.iter().enumerate() {
                let dd = rat_int(d as i64 + 1);
                let hi_pow = pow_rat(hi, d + 1);
                let lo_pow = pow_rat(lo, d + 1);
                acc += c * (hi_pow - lo_pow) / dd;
            }
        }
        acc
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "piecewise_polynomial",
            "points": self.partition.points().iter().map(format_rat).collect::<Vec<_>>(),
            "coefficients": self.coeffs.iter().map(|cs| cs.iter().map(format_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn pow_rat(x: &Rat, e: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k.min(n - k) {
        num = num * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    num
}

/// Exact matrix of the transfer operator on piecewise polynomials of degree
/// `<= degree` over `partition`. Basis index: `cell * (degree+1) + power`.
pub fn transfer_matrix(
    pwl: &PiecewiseLinearMap,
    partition: &MarkovPartition,
    degree: usize,
) -> crate::Result<Vec<Vec<Rat>>> {
    let nc = partition.cell_count();
    let width = degree + 1;
    let dim = nc * width;
    let n_inv = Rat::one() / rat_int(pwl.order() as i64);
    let mut m = vec![vec![Rat::zero(); dim]; dim];
    for i in 0..nc {
        let (lo, hi) = partition.cell(i);
        let branch = pwl.branch_at(lo)?;
        let (va, vb) = (branch.eval(lo), branch.eval(hi));
        let (img_lo, img_hi) = if va <= vb { (va, vb) } else { (vb, va) };
        // Preimage map of this branch: x(y) = (y - offset)/slope.
        let inv_s = Rat::one() / rat_int(branch.slope);
        let c0 = -&branch.offset * &inv_s;
        for j in 0..nc {
            let (clo, chi) = partition.cell(j);
            if clo < &img_lo || chi > &img_hi {
                continue;
            }
            for d in 0..width {
                // (inv_s y + c0)^d expanded in powers of y.
                for t in 0..=d {
                    let coef = Rat::from_integer(binomial(d, t))
                        * pow_rat(&inv_s, t)
                        * pow_rat(&c0, d - t)
                        * &n_inv;
                    m[j * width + t][i * width + d] += coef;
                }
            }
        }
    }
    Ok(m)
}

/// Exact eigenfunctions of the transfer operator at eigenvalue `lambda`,
/// as kernel basis of `(L - lambda I)` on the piecewise-polynomial space.
pub fn eigenfunctions_at(
    pwl: &PiecewiseLinearMap,
    partition: &MarkovPartition,
    lambda: &Rat,
    degree: usize,
) -> crate::Result<Vec<PiecewisePoly>> {
    let mut m = transfer_matrix(pwl, partition, degree)?;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = &row[i] - lambda;
    }
    let basis = kernel_basis(&m);
    let width = degree + 1;
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut coeffs: Vec<Vec<Rat>> = v.chunks(width).map(|c| c.to_vec()).collect();
            // Sign-normalize on the first nonzero coefficient.
            if let Some(first) = coeffs.iter().flatten().find(|c| !c.is_zero()) {
                if first.is_negative() {
                    for cs in coeffs.iter_mut() {
                        for c in cs.iter_mut() {
                            *c = -c.clone();
                        }
                    }
                }
            }
            PiecewisePoly {
                partition: partition.clone(),
                coeffs,
            }
        })
        .collect())
}

/// Applies the transfer operator of `pwl` to a piecewise polynomial at a
/// rational point, exactly: `(L f)(y) = (1/N) sum_branches f((y - o)/s)`
/// over branches whose interval contains the preimage.
pub fn pf_apply_exact(pwl: &PiecewiseLinearMap, f: &PiecewisePoly, y: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let one = Rat::one();
    for (idx, b) in pwl.branches().iter().enumerate() {
        let x = (y - &b.offset) / rat_int(b.slope);
        let last = idx + 1 == pwl.branches().len();
        let inside = x >= b.lo && (x < b.hi || (last && x <= one));
        if inside {
            if let Some(v) = f.eval_rat(&x) {
                acc += v;
            }
        }
    }
    acc / rat_int(pwl.order() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::build_markov_partition;
    use crate::maps::{build_pwl, MapSpec};
    use crate::rat::rat;

    #[test]
    fn flat_density_is_fixed_for_star_maps() {
        let pwl = build_pwl(&MapSpec::with_fraction(4, 1, 3).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let eig = eigenfunctions_at(&pwl, &part, &rat(1, 1), 0).unwrap();
        assert_eq!(eig.len(), 1);
        let flat = &eig[0];
        assert!(flat.cell_coeffs().iter().all(|c| c[0] == flat.cell_coeffs()[0][0]));
    }

    #[test]
    fn transfer_matrix_reproduces_exact_application() {
        let pwl = build_pwl(&MapSpec::with_fraction(3, 1, 9).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let eig = eigenfunctions_at(&pwl, &part, &rat(1, 1), 0).unwrap();
        assert_eq!(eig.len(), 1);
        let f = &eig[0];
        // L f = f pointwise at interior rational samples.
        for i in 0..part.cell_count() {
            let (lo, hi) = part.cell(i);
            let y = (lo + hi) / rat(2, 1);
            assert_eq!(pf_apply_exact(&pwl, f, &y), f.eval_rat(&y).unwrap());
        }
    }

    #[test]
    fn tent_eigenfunction_quarter() {
        // Order-2 full stretch: eigenvalue 1/4 eigenfunction at degree 2.
        let pwl = build_pwl(&MapSpec::ordinary(2).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let eig = eigenfunctions_at(&pwl, &part, &rat(1, 4), 2).unwrap();
        assert_eq!(eig.len(), 1);
        let f = &eig[0];
        for t in 1..20 {
            let y = rat(t, 20);
            let lhs = pf_apply_exact(&pwl, f, &y);
            let rhs = rat(1, 4) * f.eval_rat(&y).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
