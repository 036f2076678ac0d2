//! Higher-order correlation functions of shifted Chebyshev maps.
//!
//! For zero shift the r-th order correlation is a pure counting problem:
//! `<x_{n_1}..x_{n_r}> = 2^{-r} #{sigma : sum sigma_l N^{n_l} = 0}`, exact in
//! rational arithmetic. For nonzero (rational) star-condition shifts the
//! correlation is evaluated exactly by the piecewise-affine angle
//! decomposition in [`pieces`] — the phase-factor delta formula obtained by
//! unfolding the angle is not valid once an iterate reflects at the interval
//! ends, and the reflections contribute at every lag beyond the first.
//!
//! Monte-Carlo estimators drawing the initial point from the exact invariant
//! density serve as the independent oracle for everything analytic here.

pub mod dioph;
pub mod pieces;
pub mod support;

pub use dioph::{diophantine_solutions, diophantine_solutions_exhaustive, SpinConfig};
pub use pieces::{shifted_correlation_exact, AngleOrbitPieces};
pub use support::{count_nonzero_tuples, generalized_correlation, FourierSupport};

use crate::density::{exact_density, stream_seed, StepDensity};
use crate::maps::MapSpec;
use crate::parallel;
use crate::rat::{rat, rat_int, to_f64, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A correlation request: the map plus the time tuple `(n_1, ..., n_r)`.
/// Times need not be distinct or ordered.
#[derive(Debug, Clone)]
pub struct CorrelationQuery {
    pub spec: MapSpec,
    pub times: Vec<u32>,
}

impl CorrelationQuery {
    pub fn new(spec: MapSpec, times: Vec<u32>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::domain("time tuple must be nonempty"));
        }
        Ok(CorrelationQuery { spec, times })
    }
}

/// Exact zero-shift correlation `2^{-r} * #solutions` as a rational.
pub fn spin_sum_exact(order: u32, times: &[u32]) -> Result<Rat> {
    let solutions = diophantine_solutions(order, times)?;
    let denom = BigInt::one() << times.len();
    Ok(Rat::new(BigInt::from(solutions.len()), denom))
}

/// Analytic correlation under the star condition.
///
/// Zero shift: the exact spin-configuration count over `2^r`. Nonzero
/// rational shift: the exact piecewise-affine angle integral (which reduces
/// to the same counts at zero shift and carries the fold corrections the
/// bare phase-weighted count misses). Non-star specs are rejected; their
/// correlations are only available through [`correlation_monte_carlo`].
pub fn spin_sum_correlation(query: &CorrelationQuery) -> Result<f64> {
    if !query.spec.star_condition() {
        return Err(Error::domain(
            "analytic correlations require the star condition",
        ));
    }
    if query.spec.shift().is_zero() {
        Ok(to_f64(&spin_sum_exact(query.spec.order(), &query.times)?))
    } else {
        shifted_correlation_exact(&query.spec, &query.times)
    }
}

/// Two-point law of the centred N-ary shift: `(1/12) N^{-|lag|}`, exact.
///
/// The variance of the centred digit expansion is `<b^2>/(N^2-1) = 1/12`
/// independent of N, and each unit lag scales by `1/N`.
pub fn twopoint_nary_shift(n: u32, lag: i64) -> Result<Rat> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    let decay = Rat::new(BigInt::one(), BigInt::from(n).pow(lag.unsigned_abs() as u32));
    Ok(rat(1, 12) * decay)
}

/// `S_{N,k} = ((N-1)/2)^k + ((N-3)/2)^k + ...` down the nonnegative digit
/// values, exact by direct summation.
pub fn power_sum_s(n: u32, k: u32) -> Result<Rat> {
    if n < 2 {
        return Err(Error::domain("N must be >= 2"));
    }
    let mut acc = Rat::zero();
    let mut term = rat(n as i64 - 1, 2);
    while term > Rat::zero() {
        let mut pow = Rat::one();
        for _ in 0..k {
            pow *= &term;
        }
        acc += pow;
        term -= Rat::one();
    }
    Ok(acc)
}

/// Mean of the k-th power of the centred digit variable: zero for odd k by
/// symmetry, `2 S_{N,k}/N` for even k (plus the zero digit for odd N, which
/// contributes nothing).
pub fn centred_digit_moment(n: u32, k: u32) -> Result<Rat> {
    if k % 2 == 1 {
        return Ok(Rat::zero());
    }
    Ok(rat(2, n as i64) * power_sum_s(n, k)?)
}

/// Stationary two-point function `<x_0 x_k>` of a star-condition map.
///
/// `k = 0` is the invariant second moment, exactly 1/2. Zero shift gives
/// exactly 0 for `k >= 1`. For nonzero rational shifts the lag-1 value has
/// the closed form `-(2N/(pi (N^2-1))) sin(a)`; deeper lags pick up fold
/// corrections and are evaluated by the exact angle decomposition.
pub fn twopoint_shifted(spec: &MapSpec, k: u32) -> Result<f64> {
    if !spec.star_condition() {
        return Err(Error::domain(
            "the two-point closed form requires the star condition",
        ));
    }
    if k == 0 {
        return Ok(0.5);
    }
    if spec.shift().is_zero() {
        return Ok(0.0);
    }
    if k == 1 {
        let n = spec.order() as f64;
        return Ok(-(2.0 * n / (std::f64::consts::PI * (n * n - 1.0)))
            * spec.shift().radians().sin());
    }
    shifted_correlation_exact(spec, &[0, k])
}

/// Draws initial points from the exact invariant density: inverse-CDF of the
/// arcsine density under the star condition, otherwise cell sampling of the
/// exact step density pushed through the conjugacy.
enum InvariantSampler {
    Arcsine,
    Step {
        // (cumulative mass, cell lo, cell width) per cell, in f64.
        cells: Vec<(f64, f64, f64)>,
    },
}

impl InvariantSampler {
    fn for_spec(spec: &MapSpec) -> Result<Self> {
        if spec.star_condition() {
            return Ok(InvariantSampler::Arcsine);
        }
        let density: StepDensity = exact_density(spec)?;
        let mut cells = Vec::with_capacity(density.partition().cell_count());
        let mut cum = 0.0;
        for i in 0..density.partition().cell_count() {
            let w = to_f64(&density.partition().width(i));
            let lo = to_f64(&density.partition().cell(i).0);
            cum += to_f64(&density.values()[i]) * w;
            cells.push((cum, lo, w));
        }
        Ok(InvariantSampler::Step { cells })
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        let u = match self {
            InvariantSampler::Arcsine => rng.gen_range(0.0..1.0),
            InvariantSampler::Step { cells } => {
                let v: f64 = rng.gen_range(0.0..1.0);
                let idx = cells.partition_point(|&(cum, _, _)| cum < v);
                let (_, lo, w) = cells[idx.min(cells.len() - 1)];
                lo + rng.gen_range(0.0..1.0) * w
            }
        };
        // x = cos(pi u) maps the conjugate coordinate back to [-1, 1].
        (std::f64::consts::PI * u).cos()
    }
}

/// Monte-Carlo estimate of `<x_{n_1}..x_{n_r}>` with initial points from the
/// invariant density (no burn-in needed). Returns `(estimate, std_error)`.
/// Deterministic given the seed, for any thread count.
pub fn correlation_monte_carlo(
    spec: &MapSpec,
    times: &[u32],
    n_samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if times.is_empty() || n_samples == 0 {
        return Err(Error::domain("need a nonempty tuple and at least one sample"));
    }
    let sampler = InvariantSampler::for_spec(spec)?;
    let map = spec.evaluator();
    let tmax = *times.iter().max().unwrap() as usize;
    let block = 65_536u64;
    let blocks = n_samples.div_ceil(block);
    let partials = parallel::map_indexed(blocks as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, b as u64));
        let count = block.min(n_samples - b as u64 * block);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut orbit = vec![0.0f64; tmax + 1];
        for _ in 0..count {
            let mut x = sampler.draw(&mut rng);
            orbit[0] = x;
            for slot in orbit.iter_mut().skip(1) {
                x = map(x);
                *slot = x;
            }
            let p: f64 = times.iter().map(|&t| orbit[t as usize]).product();
            sum += p;
            sumsq += p * p;
        }
        (sum, sumsq)
    });
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let nf = n_samples as f64;
    let mean = sum / nf;
    let var = (sumsq / nf - mean * mean).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Monte-Carlo lag correlation of the centred N-ary shift `u -> N u mod 1`,
/// digit-free: iterates in floating point, subtracts the exact mean 1/2.
pub fn nary_shift_monte_carlo(n: u32, lag: u32, n_samples: u64, seed: u64) -> (f64, f64) {
    let block = 65_536u64;
    let blocks = n_samples.div_ceil(block);
    let partials = parallel::map_indexed(blocks as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, b as u64));
        let count = block.min(n_samples - b as u64 * block);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..count {
            let u0: f64 = rng.gen_range(0.0..1.0);
            let mut u = u0;
            for _ in 0..lag {
                u = (n as f64 * u).fract();
            }
            let p = (u0 - 0.5) * (u - 0.5);
            sum += p;
            sumsq += p * p;
        }
        (sum, sumsq)
    });
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let nf = n_samples as f64;
    let mean = sum / nf;
    let var = (sumsq / nf - mean * mean).max(0.0);
    (mean, (var / nf).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(spec: MapSpec, times: &[u32]) -> CorrelationQuery {
        CorrelationQuery::new(spec, times.to_vec()).unwrap()
    }

    #[test]
    fn spin_sum_fixtures() {
        let t2 = MapSpec::ordinary(2).unwrap();
        assert_eq!(spin_sum_exact(2, &[5, 5]).unwrap(), rat(1, 2));
        assert_eq!(spin_sum_exact(2, &[1, 0, 0]).unwrap(), rat(1, 4));
        assert!((spin_sum_correlation(&q(t2, &[1, 0, 0])).unwrap() - 0.25).abs() < 1e-15);
        // Equal-time pair at nonzero shift: two solving configs, zero phase.
        let s = MapSpec::with_fraction(2, 1, 2).unwrap();
        assert!((spin_sum_correlation(&q(s, &[0, 0])).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_star_rejected() {
        let s = MapSpec::with_fraction(3, 1, 2).unwrap();
        assert!(spin_sum_correlation(&q(s, &[0, 1])).is_err());
        assert!(twopoint_shifted(&s, 1).is_err());
    }

    #[test]
    fn shift_invariance_at_zero_shift() {
        for times in [vec![0u32, 1, 1], vec![0, 2], vec![1, 0, 0, 3]] {
            let base = spin_sum_exact(2, &times).unwrap();
            let moved: Vec<u32> = times.iter().map(|t| t + 3).collect();
            assert_eq!(base, spin_sum_exact(2, &moved).unwrap());
        }
    }

    #[test]
    fn nary_two_point_values() {
        assert_eq!(twopoint_nary_shift(2, 0).unwrap(), rat(1, 12));
        assert_eq!(twopoint_nary_shift(2, 4).unwrap(), rat(1, 192));
        assert_eq!(twopoint_nary_shift(3, 1).unwrap(), rat(1, 36));
        assert_eq!(twopoint_nary_shift(5, 0).unwrap(), rat(1, 12));
    }

    #[test]
    fn power_sums() {
        // S_{4,2} = (3/2)^2 + (1/2)^2 = 5/2 = 4*3*5/24.
        assert_eq!(power_sum_s(4, 2).unwrap(), rat(5, 2));
        assert_eq!(power_sum_s(3, 2).unwrap(), rat(1, 1));
        for n in 2..=7u32 {
            let faulhaber = rat(n as i64 * (n as i64 - 1) * (n as i64 + 1), 24);
            assert_eq!(power_sum_s(n, 2).unwrap(), faulhaber, "N={n}");
            assert_eq!(centred_digit_moment(n, 3).unwrap(), rat(0, 1));
        }
        // <w^2> per digit: (N^2-1)/12.
        for n in 2..=5u32 {
            assert_eq!(
                centred_digit_moment(n, 2).unwrap(),
                rat((n as i64) * (n as i64) - 1, 12)
            );
        }
    }

    #[test]
    fn twopoint_shifted_values() {
        let t2 = MapSpec::ordinary(2).unwrap();
        assert_eq!(twopoint_shifted(&t2, 3).unwrap(), 0.0);
        assert_eq!(twopoint_shifted(&t2, 0).unwrap(), 0.5);
        let s42 = MapSpec::with_fraction(4, 1, 2).unwrap();
        let v = twopoint_shifted(&s42, 1).unwrap();
        assert!((v - 8.0 / (15.0 * std::f64::consts::PI)).abs() < 1e-14);
        // Lag-1 closed form agrees with the angle decomposition.
        let via_pieces = shifted_correlation_exact(&s42, &[0, 1]).unwrap();
        assert!((v - via_pieces).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_analytics() {
        let t2 = MapSpec::ordinary(2).unwrap();
        let (est, se) = correlation_monte_carlo(&t2, &[5, 5], 200_000, 11).unwrap();
        assert!((est - 0.5).abs() < 4.0 * se);
        let (est, se) = correlation_monte_carlo(&t2, &[1, 0, 0], 200_000, 12).unwrap();
        assert!((est - 0.25).abs() < 4.0 * se);
        let t3 = MapSpec::ordinary(3).unwrap();
        let (est, se) = correlation_monte_carlo(&t3, &[2, 1, 0], 200_000, 13).unwrap();
        assert!(est.abs() < 4.0 * se.max(1e-4));
        // Shifted case with fold corrections.
        let s = MapSpec::with_fraction(2, 1, 2).unwrap();
        let (est, se) = correlation_monte_carlo(&s, &[0, 2], 400_000, 14).unwrap();
        let exact = shifted_correlation_exact(&s, &[0, 2]).unwrap();
        assert!((est - exact).abs() < 4.0 * se, "{est} vs {exact} (se {se})");
    }

    #[test]
    fn monte_carlo_non_star_sampling() {
        // Second moment under the exact non-star density, cross-checked
        // against the cell-wise integral of x^2 rho_T.
        let s = MapSpec::with_fraction(3, 1, 9).unwrap();
        let d = exact_density(&s).unwrap();
        let mut expect = 0.0;
        for i in 0..d.partition().cell_count() {
            let (lo, hi) = d.partition().cell(i);
            let (a, b) = (to_f64(lo) * std::f64::consts::PI, to_f64(hi) * std::f64::consts::PI);
            // int cos^2(u) du = u/2 + sin(2u)/4
            let anti = |u: f64| u / 2.0 + (2.0 * u).sin() / 4.0;
            expect += to_f64(&d.values()[i]) * (anti(b) - anti(a)) / std::f64::consts::PI;
        }
        let (est, se) = correlation_monte_carlo(&s, &[0, 0], 400_000, 15).unwrap();
        assert!((est - expect).abs() < 4.0 * se, "{est} vs {expect}");
    }

    #[test]
    fn nary_mc_agrees_with_law() {
        for (n, lag) in [(2u32, 1u32), (3, 0), (5, 2)] {
            let (est, se) = nary_shift_monte_carlo(n, lag, 400_000, 21);
            let law = to_f64(&twopoint_nary_shift(n, lag as i64).unwrap());
            assert!((est - law).abs() < 4.0 * se, "N={n} lag={lag}: {est} vs {law}");
        }
    }

    #[test]
    fn mc_is_deterministic() {
        let t2 = MapSpec::ordinary(2).unwrap();
        let a = correlation_monte_carlo(&t2, &[0, 1], 100_000, 42).unwrap();
        let b = correlation_monte_carlo(&t2, &[0, 1], 100_000, 42).unwrap();
        assert_eq!(a, b);
    }
}
