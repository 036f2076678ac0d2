//! Shifted Chebyshev maps, their piecewise-linear conjugates, and orbits.
//!
//! `T_{N,a}(x) = cos(N arccos x + a)` on `[-1, 1]` is topologically conjugated
//! to a piecewise-linear map `g_{N,a}` on `[0, 1]` with slopes `+-N` via
//! `h(x) = arccos(x)/pi`. In that coordinate the map is simply
//! `g(y) = arccos(cos(N pi y + a))/pi`: an N-fold stretch, shifted by the
//! angle, folded back into `[0, 1]`. For rational `a = -pi p/q` every branch
//! endpoint and offset is an exact rational, which is what the Markov
//! machinery in [`crate::density`] builds on.

use crate::angle::ShiftAngle;
use crate::rat::{rat, rat_int, to_f64, Rat};
use crate::{Error, Result};
use serde::Serialize;

/// Tolerance for clamping iterates that drift marginally past the domain ends
/// in floating point.
pub const DOMAIN_TOL: f64 = 1e-12;

/// The symbol pair `(N, a)` of a shifted Chebyshev map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSpec {
    n: u32,
    shift: ShiftAngle,
}

impl MapSpec {
    pub fn new(n: u32, shift: ShiftAngle) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("N must be >= 2"));
        }
        Ok(MapSpec { n, shift })
    }

    /// Ordinary Chebyshev map of order `n` (zero shift).
    pub fn ordinary(n: u32) -> Result<Self> {
        MapSpec::new(n, ShiftAngle::ZERO)
    }

    /// Shifted map with exact angle `a = -pi p / q`.
    pub fn with_fraction(n: u32, p: u64, q: u64) -> Result<Self> {
        MapSpec::new(n, ShiftAngle::from_fraction(p, q)?)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn shift(&self) -> ShiftAngle {
        self.shift
    }

    /// The star condition: even `N` with any valid shift, or odd `N` with
    /// `a = 0`. Exactly the parameter set on which the conjugated
    /// piecewise-linear map preserves Lebesgue measure, so the invariant
    /// density of the map itself is the arcsine density.
    pub fn star_condition(&self) -> bool {
        self.n % 2 == 0 || self.shift.is_zero()
    }

    /// `T_{N,a}(x)`. Inputs within [`DOMAIN_TOL`] of the ends are clamped.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = clamp_domain(x, "map argument")?;
        Ok((self.n as f64 * x.acos() + self.shift.radians()).cos())
    }

    /// Orbit `(x0, T x0, ..., T^steps x0)`.
    pub fn orbit(&self, x0: f64, steps: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut x = clamp_domain(x0, "initial point")?;
        out.push(x);
        for _ in 0..steps {
            x = self.eval(x)?;
            out.push(x);
        }
        Ok(out)
    }

    /// A cheap closure for hot loops. Low orders with zero shift use the
    /// explicit polynomial forms; everything else falls back to the cosine
    /// form without domain checks (callers keep states in range).
    pub fn evaluator(&self) -> impl Fn(f64) -> f64 + Copy + Send + Sync {
        #[derive(Clone, Copy)]
        enum Local {
            Poly2,
            Poly3,
            Cos { n: f64, a: f64 },
        }
        let local = if self.shift.is_zero() && self.n == 2 {
            Local::Poly2
        } else if self.shift.is_zero() && self.n == 3 {
            Local::Poly3
        } else {
            Local::Cos {
                n: self.n as f64,
                a: self.shift.radians(),
            }
        };
        move |x: f64| match local {
            Local::Poly2 => 2.0 * x * x - 1.0,
            Local::Poly3 => (4.0 * x * x - 3.0) * x,
            Local::Cos { n, a } => (n * x.clamp(-1.0, 1.0).acos() + a).cos(),
        }
    }
}

fn clamp_domain(x: f64, what: &str) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + DOMAIN_TOL {
        Ok(x.clamp(-1.0, 1.0))
    } else {
        Err(Error::domain(format!("{what} {x} is outside [-1, 1]")))
    }
}

/// Order-`n` Chebyshev polynomial by the recurrence
/// `T_0 = 1, T_1 = x, T_{k+1} = 2x T_k - T_{k-1}`. Defined for all real `x`.
pub fn eval_cheby_poly(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                (prev, cur) = (cur, 2.0 * x * cur - prev);
            }
            cur
        }
    }
}

/// The conjugacy `h: [-1, 1] -> [0, 1]`, `h(x) = arccos(x)/pi`.
///
/// This orientation (rather than `arccos(-x)/pi`) is the one that actually
/// generates the branch tables, Markov partitions and transition matrices the
/// rest of the crate reproduces; both orientations conjugate the same map
/// family and give the same pullback densities on `[-1, 1]`.
pub fn conjugacy_h(x: f64) -> Result<f64> {
    let x = clamp_domain(x, "conjugacy argument")?;
    Ok(x.acos() / std::f64::consts::PI)
}

/// Inverse conjugacy `h^{-1}(y) = cos(pi y)`.
pub fn conjugacy_h_inv(y: f64) -> Result<f64> {
    if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&y) {
        return Err(Error::domain(format!("conjugacy inverse argument {y} is outside [0, 1]")));
    }
    Ok((std::f64::consts::PI * y.clamp(0.0, 1.0)).cos())
}

/// One affine branch of a piecewise-linear conjugate: `g(y) = slope*y + offset`
/// on `[lo, hi)` (the last branch is closed at 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub lo: Rat,
    pub hi: Rat,
    pub slope: i64,
    pub offset: Rat,
}

impl Branch {
    pub fn eval(&self, y: &Rat) -> Rat {
        rat_int(self.slope) * y + &self.offset
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.slope as f64 * y + to_f64(&self.offset)
    }
}

/// The conjugated piecewise-linear map `g_{N,a}` with exact rational branch
/// data. `beta = 1 + a/pi` is the shifted amount.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMap {
    n: u32,
    beta: Rat,
    branches: Vec<Branch>,
}

impl PiecewiseLinearMap {
    /// Builds a map from an explicit branch table. The branches must tile
    /// `[0, 1]`, have slope magnitude `n`, alternate slope sign, agree at
    /// shared endpoints, and stay inside `[0, 1]`.
    pub fn from_branches(n: u32, beta: Rat, branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::domain("branch list is empty"));
        }
        let zero = Rat::from_integer(0.into());
        let one = rat_int(1);
        if branches[0].lo != zero || branches.last().unwrap().hi != one {
            return Err(Error::domain("branches must tile [0, 1]"));
        }
        for w in branches.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::domain("branch intervals must be contiguous"));
            }
            if w[0].slope != -w[1].slope {
                return Err(Error::domain("adjacent branches must alternate slope sign"));
            }
            if w[0].eval(&w[0].hi) != w[1].eval(&w[1].lo) {
                return Err(Error::domain("adjacent branches must agree at the breakpoint"));
            }
        }
        for b in &branches {
            if b.slope.unsigned_abs() != n as u64 {
                return Err(Error::domain("branch slopes must have magnitude N"));
            }
            let (va, vb) = (b.eval(&b.lo), b.eval(&b.hi));
            if va.clone().min(vb.clone()) < zero || va.max(vb) > one {
                return Err(Error::domain("branch image leaves [0, 1]"));
            }
        }
        Ok(PiecewiseLinearMap { n, beta, branches })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Branch containing `y` (the last branch owns `y = 1`).
    pub fn branch_at(&self, y: &Rat) -> Result<&Branch> {
        if y < &Rat::from_integer(0.into()) || y > &rat_int(1) {
            return Err(Error::domain(format!("point {y} is outside [0, 1]")));
        }
        Ok(self
            .branches
            .iter()
            .find(|b| y < &b.hi)
            .unwrap_or_else(|| self.branches.last().expect("non-empty branch list")))
    }

    pub fn eval_rat(&self, y: &Rat) -> Result<Rat> {
        Ok(self.branch_at(y)?.eval(y))
    }

    pub fn eval_f64(&self, y: f64) -> Result<f64> {
        if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&y) {
            return Err(Error::domain(format!("point {y} is outside [0, 1]")));
        }
        let y = y.clamp(0.0, 1.0);
        let b = self
            .branches
            .iter()
            .find(|b| y < to_f64(&b.hi))
            .unwrap_or_else(|| self.branches.last().expect("non-empty branch list"));
        Ok(b.eval_f64(y))
    }

    /// All preimages of `y` across branches, as `(branch index, x)` pairs.
    pub fn preimages(&self, y: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.n as usize + 1);
        for (i, b) in self.branches.iter().enumerate() {
            let x = (y - to_f64(&b.offset)) / b.slope as f64;
            let (lo, hi) = (to_f64(&b.lo), to_f64(&b.hi));
            let last = i + 1 == self.branches.len();
            let eps = 1e-13;
            if x >= lo - eps && (x < hi + eps && (!last || x <= 1.0 + eps)) {
                // Deduplicate the shared endpoint between adjacent branches.
                if x < hi - eps || last {
                    out.push((i, x.clamp(lo, hi)));
                }
            }
        }
        out
    }
}

/// Builds the exact branch table of `g_{N,a}` for a rational shift.
///
/// With `gamma = -a/pi = 1 - beta`, the fold points are `y_k = (k + gamma)/N`
/// and on the k-th lap `g(y) = N y - gamma - k` (ascending, k even) or
/// `g(y) = -N y + k + 1 + gamma` (descending, k odd). Zero-width leading or
/// trailing laps are dropped, so `a = 0` yields the N-branch full-stretch
/// table and `a < 0` the (N+1)-branch one. Adjacent branches alternate slope
/// sign and agree at shared endpoints.
pub fn build_pwl(spec: &MapSpec) -> Result<PiecewiseLinearMap> {
    let n = spec.order() as i64;
    let gamma = spec
        .shift()
        .fraction_of_pi()
        .ok_or(Error::NonRationalShift)?;
    let one = rat_int(1);
    let zero = Rat::from_integer(0.into());
    let mut branches = Vec::with_capacity(spec.order() as usize + 1);
    for k in -1..n {
        let lo = ((rat_int(k) + &gamma) / rat_int(n)).max(zero.clone());
        let hi = ((rat_int(k + 1) + &gamma) / rat_int(n)).min(one.clone());
        if hi <= lo {
            continue;
        }
        let (slope, offset) = if k % 2 == 0 {
            (n, -&gamma - rat_int(k))
        } else {
            (-n, rat_int(k + 1) + &gamma)
        };
        branches.push(Branch { lo, hi, slope, offset });
    }
    debug_assert!(branches.windows(2).all(|w| {
        w[0].hi == w[1].lo
            && w[0].slope == -w[1].slope
            && w[0].eval(&w[0].hi) == w[1].eval(&w[1].lo)
    }));
    debug_assert!(branches.iter().all(|b| {
        let (va, vb) = (b.eval(&b.lo), b.eval(&b.hi));
        va.clone().min(vb.clone()) >= zero && va.max(vb) <= one
    }));
    Ok(PiecewiseLinearMap {
        n: spec.order(),
        beta: one - gamma,
        branches,
    })
}

/// `g_{N,a}(y)` evaluated directly from the fold formula, valid for any shift
/// angle (rational or not).
pub fn g_direct(spec: &MapSpec, y: f64) -> f64 {
    let t = spec.order() as f64 * std::f64::consts::PI * y + spec.shift().radians();
    t.cos().clamp(-1.0, 1.0).acos() / std::f64::consts::PI
}

/// Max residual of the conjugation identity `h(T(x)) = g(h(x))` over a
/// uniform grid of `sample_count` points in `[-1, 1]`.
///
/// For rational shifts the branch table is checked; otherwise the direct fold
/// form of `g` stands in. The contract is a residual below 1e-10 for every
/// valid spec.
pub fn verify_conjugation(spec: &MapSpec, sample_count: usize) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::domain("sample_count must be >= 1"));
    }
    let table = spec.shift().fraction_of_pi().map(|_| build_pwl(spec)).transpose()?;
    let mut worst = 0.0f64;
    for i in 0..sample_count {
        let x = if sample_count == 1 {
            0.0
        } else {
            -1.0 + 2.0 * i as f64 / (sample_count - 1) as f64
        };
        let lhs = conjugacy_h(spec.eval(x)?)?;
        let y = conjugacy_h(x)?;
        let rhs = match &table {
            Some(g) => g.eval_f64(y)?,
            None => g_direct(spec, y),
        };
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Closed-form iterate in the unfolded angle coordinate:
/// `cos(N^n pi u0 + a (N^n - 1)/(N - 1))` with `x0 = cos(pi u0)`.
///
/// Exact for zero shift; for nonzero shift it is only valid until the angle
/// first leaves `[0, pi]` (the fold reflects the additive shift), which is
/// why the correlation machinery tracks folds explicitly.
pub fn closed_form_iterate(spec: &MapSpec, u0: f64, n: u32) -> f64 {
    let nn = (spec.order() as f64).powi(n as i32);
    let phase = spec.shift().radians() * (nn - 1.0) / (spec.order() as f64 - 1.0);
    (nn * std::f64::consts::PI * u0 + phase).cos()
}
