//! Exact correlation integrals for shifted maps with rational shift angle.
//!
//! In the angle coordinate `u = arccos(x)/pi` the map acts as
//! `u -> fold(N u - p/q)`, where `fold` reflects back into `[0, 1]` at the
//! integer lines. The n-th iterate is therefore piecewise affine in `u` with
//! slope `+-N^n`, and on every affinity piece each iterate is
//! `cos(pi (c u + d))` with an integer frequency `c` and a rational phase
//! `d`. A product of such cosines integrates in closed form piece by piece,
//! which turns every finite-order correlation under the arcsine ensemble
//! into an exact finite sum of sines: no truncation, no sampling.
//!
//! The naive unfolded substitution (iterate `n` as `cos(N^n pi u + phase)`)
//! is only valid until the angle first leaves `[0, pi]`; the reflections it
//! misses contribute real correlation mass for any nonzero shift, so folds
//! are tracked explicitly here.

use crate::maps::MapSpec;
use crate::rat::{cos_pi, floor_int, rat_int, sin_pi, to_f64, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
struct Piece {
    lo: Rat,
    hi: Rat,
    /// Current iterate on this piece is `sign * N^level * u + shift`.
    sign: i8,
    shift: Rat,
    /// Per recorded level: the affine form `(coefficient, phase)` of that
    /// iterate, with `u_level = coefficient * u + phase` inside `[0, 1]`.
    snapshots: Vec<(BigInt, Rat)>,
}

/// Affinity decomposition of the first `max_time` iterates of the angle map.
///
/// Built once per `(N, a, max_time)`; correlations for any tuple within that
/// horizon reuse the same pieces.
pub struct AngleOrbitPieces {
    max_time: u32,
    pieces: Vec<Piece>,
}

const PIECE_CAP: usize = 2_000_000;

impl AngleOrbitPieces {
    pub fn build(spec: &MapSpec, max_time: u32) -> Result<Self> {
        if !spec.star_condition() {
            return Err(Error::domain(
                "analytic correlations are defined on the star-condition family",
            ));
        }
        let gamma = spec
            .shift()
            .fraction_of_pi()
            .ok_or(Error::NonRationalShift)?;
        let n = rat_int(spec.order() as i64);
        let mut pieces = vec![Piece {
            lo: Rat::zero(),
            hi: Rat::one(),
            sign: 1,
            shift: Rat::zero(),
            snapshots: Vec::with_capacity(max_time as usize + 1),
        }];
        let mut level_coef = BigInt::one();
        for level in 0..=max_time {
            for p in pieces.iter_mut() {
                let c = BigInt::from(p.sign) * &level_coef;
                p.snapshots.push((c, p.shift.clone()));
            }
            if level == max_time {
                break;
            }
            level_coef *= spec.order();
            let mut next: Vec<Piece> = Vec::with_capacity(pieces.len() * spec.order() as usize);
            for p in &pieces {
                // Pre-fold image v(u) = sign * N^{level+1} u + (N*shift - gamma).
                let c0 = &n * &p.shift - &gamma;
                let slope = Rat::from_integer(BigInt::from(p.sign) * &level_coef);
                let v_lo = &slope * &p.lo + &c0;
                let v_hi = &slope * &p.hi + &c0;
                let (v_min, v_max) = if v_lo <= v_hi {
                    (v_lo, v_hi)
                } else {
                    (v_hi, v_lo)
                };
                let mut m = floor_int(&v_min);
                let m_end = v_max.ceil().to_integer();
                while m < m_end {
                    let seg_lo = v_min.clone().max(Rat::from_integer(m.clone()));
                    let seg_hi = v_max
                        .clone()
                        .min(Rat::from_integer(&m + BigInt::one()));
                    if seg_hi > seg_lo {
                        let u1 = (&seg_lo - &c0) / &slope;
                        let u2 = (&seg_hi - &c0) / &slope;
                        let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
                        // Even integer window: v - m keeps orientation;
                        // odd window: m + 1 - v reflects it.
                        let even = (&m % 2i32).is_zero();
                        let (sign, shift) = if even {
                            (p.sign, &c0 - Rat::from_integer(m.clone()))
                        } else {
                            (-p.sign, Rat::from_integer(&m + BigInt::one()) - &c0)
                        };
                        next.push(Piece {
                            lo,
                            hi,
                            sign,
                            shift,
                            snapshots: p.snapshots.clone(),
                        });
                    }
                    m += BigInt::one();
                }
            }
            if next.len() > PIECE_CAP {
                return Err(Error::guard(format!(
                    "affinity decomposition exceeded {PIECE_CAP} pieces"
                )));
            }
            pieces = next;
        }
        Ok(AngleOrbitPieces { max_time, pieces })
    }

    pub fn max_time(&self) -> u32 {
        self.max_time
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// `< x_{t_1} ... x_{t_r} >` under the arcsine-distributed initial point.
    ///
    /// Expands the cosine product into `2^{r-1}` terms per piece and applies
    /// `int cos(pi (A u + B)) du` in closed form; phases are reduced modulo 2
    /// exactly before any floating evaluation.
    pub fn correlation(&self, times: &[u32]) -> Result<f64> {
        if times.is_empty() {
            return Err(Error::domain("time tuple must be nonempty"));
        }
        if let Some(&bad) = times.iter().find(|&&t| t > self.max_time) {
            return Err(Error::domain(format!(
                "time {bad} exceeds the built horizon {}",
                self.max_time
            )));
        }
        let r = times.len();
        if r > 24 {
            return Err(Error::guard("cosine-product expansion capped at r = 24"));
        }
        let mut total = 0.0f64;
        let scale = (2.0f64).powi(1 - r as i32);
        for p in &self.pieces {
            let width = to_f64(&(&p.hi - &p.lo));
            // Sign vectors with the first component fixed to +1; the
            // conjugate half contributes the same real part.
            for mask in 0u32..(1 << (r - 1)) {
                let mut freq = BigInt::zero();
                let mut phase = Rat::zero();
                for (slot, &t) in times.iter().enumerate() {
                    let (c, d) = &p.snapshots[t as usize];
                    let plus = slot == 0 || mask & (1 << (slot - 1)) != 0;
                    if plus {
                        freq += c;
                        phase += d;
                    } else {
                        freq -= c;
                        phase -= d;
                    }
                }
                let term = if freq.is_zero() {
                    width * cos_pi(&phase)
                } else {
                    let freq_rat = Rat::from_integer(freq.clone());
                    let hi_arg = &freq_rat * &p.hi + &phase;
                    let lo_arg = &freq_rat * &p.lo + &phase;
                    let denom = std::f64::consts::PI
                        * freq.to_f64().unwrap_or(f64::INFINITY);
                    (sin_pi(&hi_arg) - sin_pi(&lo_arg)) / denom
                };
                total += scale * term;
            }
        }
        Ok(total)
    }
}

/// One-shot exact correlation for a star-condition rational-shift map.
pub fn shifted_correlation_exact(spec: &MapSpec, times: &[u32]) -> Result<f64> {
    let max_time = *times.iter().max().expect("nonempty");
    AngleOrbitPieces::build(spec, max_time)?.correlation(times)
}
