//! Shift angles, kept exact when they are rational multiples of pi.

use crate::rat::{rat, Rat};
use crate::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A shift angle `a` in `[-pi/2, 0]`.
///
/// When constructed from a `(p, q)` pair the angle is `a = -pi p/q` and the
/// pair is kept so that partition arithmetic downstream stays exact; the
/// Markov-partition construction only closes for rational multiples of pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftAngle {
    radians: f64,
    /// `(p, q)` with `a = -pi p / q`, `gcd(p, q) = 1`, `0 <= p/q <= 1/2`.
    rational: Option<(u64, u64)>,
}

impl ShiftAngle {
    pub const ZERO: ShiftAngle = ShiftAngle {
        radians: 0.0,
        rational: Some((0, 1)),
    };

    /// Exact angle `a = -pi p / q`.
    pub fn from_fraction(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("angle denominator must be positive"));
        }
        if 2 * p > q {
            return Err(Error::domain(format!(
                "angle -pi*{p}/{q} is outside [-pi/2, 0]"
            )));
        }
        let g = p.gcd(&q);
        let (p, q) = if g == 0 { (0, 1) } else { (p / g, q / g) };
        Ok(ShiftAngle {
            radians: -std::f64::consts::PI * p as f64 / q as f64,
            rational: Some((p, q)),
        })
    }

    /// Inexact angle in radians. Values within 1e-12 of the range ends are
    /// clamped; recognisably-zero input is promoted to the exact zero angle.
    pub fn from_radians(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::domain("angle must be finite"));
        }
        let lo = -std::f64::consts::FRAC_PI_2;
        if a < lo - 1e-12 || a > 1e-12 {
            return Err(Error::domain(format!("angle {a} is outside [-pi/2, 0]")));
        }
        let a = a.clamp(lo, 0.0);
        if a == 0.0 {
            return Ok(ShiftAngle::ZERO);
        }
        Ok(ShiftAngle {
            radians: a,
            rational: None,
        })
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    pub fn is_zero(&self) -> bool {
        self.rational == Some((0, 1)) || self.radians == 0.0
    }

    pub fn fraction(&self) -> Option<(u64, u64)> {
        self.rational
    }

    /// `-a/pi` as an exact rational (`p/q`), if known.
    pub fn fraction_of_pi(&self) -> Option<Rat> {
        self.rational.map(|(p, q)| rat(p as i64, q as i64))
    }

    /// `beta = 1 + a/pi`, the shift amount of the conjugated piecewise-linear
    /// map, as an exact rational.
    pub fn beta(&self) -> Option<Rat> {
        self.fraction_of_pi().map(|f| rat(1, 1) - f)
    }

    /// Parses `0`, `-pi/9`, `-3pi/16`, `pi` style tokens, or decimal radians.
    /// Exact tokens route to the rational representation.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(v) = t.parse::<f64>() {
            return ShiftAngle::from_radians(v);
        }
        let body = t.strip_prefix('-').ok_or_else(|| {
            Error::domain(format!("cannot parse angle '{s}' (expected e.g. -pi/9 or a decimal)"))
        })?;
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, d),
            None => (body, "1"),
        };
        let p: u64 = match num.strip_suffix("pi") {
            Some("") => 1,
            Some(coef) => coef
                .parse()
                .map_err(|_| Error::domain(format!("cannot parse angle '{s}'")))?,
            None => return Err(Error::domain(format!("cannot parse angle '{s}'"))),
        };
        let q: u64 = den
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("cannot parse angle '{s}'")))?;
        ShiftAngle::from_fraction(p, q)
    }
}

impl std::fmt::Display for ShiftAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.rational {
            Some((0, _)) => write!(f, "0"),
            Some((p, q)) if p == 1 => write!(f, "-pi/{q}"),
            Some((p, q)) => write!(f, "-{p}pi/{q}"),
            None => write!(f, "{}", self.radians),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_tokens() {
        assert_eq!(ShiftAngle::parse("0").unwrap(), ShiftAngle::ZERO);
        let a = ShiftAngle::parse("-pi/9").unwrap();
        assert_eq!(a.fraction(), Some((1, 9)));
        assert!((a.radians() + std::f64::consts::PI / 9.0).abs() < 1e-15);
        let b = ShiftAngle::parse("-3pi/16").unwrap();
        assert_eq!(b.fraction(), Some((3, 16)));
        assert!(ShiftAngle::parse("-2pi/3").is_err()); // outside [-pi/2, 0]
        assert!(ShiftAngle::parse("pi/9").is_err());
    }

    #[test]
    fn beta_is_one_plus_a_over_pi() {
        let a = ShiftAngle::from_fraction(1, 9).unwrap();
        assert_eq!(a.beta().unwrap(), rat(8, 9));
        assert_eq!(ShiftAngle::ZERO.beta().unwrap(), rat(1, 1));
    }

    #[test]
    fn reduces_fraction() {
        let a = ShiftAngle::from_fraction(2, 18).unwrap();
        assert_eq!(a.fraction(), Some((1, 9)));
    }
}
