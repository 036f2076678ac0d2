//! Perron-Frobenius operator machinery and eigenfunction families.
//!
//! The transfer operator of a one-dimensional map `f` acts on densities by
//! `L rho(y) = sum_{x in f^-1(y)} rho(x)/|f'(x)|`. For ordinary Chebyshev
//! maps the complete eigenfamily is classical: arcsine-weighted Bernoulli
//! polynomials (plus a degenerate Euler family for odd order), with
//! eigenvalues `N^{-2n}`. For shifted even-order maps the eigenfunctions are
//! constructed exactly on piecewise-polynomial spaces; see [`pwpoly`].
//!
//! The numeric operator here is a verifier, not a solver: closed forms and
//! exact constructions are checked against it on grids.

pub mod poly;
pub mod pwpoly;

use crate::density::build_markov_partition;
use crate::maps::{build_pwl, MapSpec, PiecewiseLinearMap};
use crate::rat::{format_rat, rat, rat_int, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use poly::{bernoulli_poly, euler_poly, PolynomialCoeffs};
use pwpoly::PiecewisePoly;

pub use poly::{multiplication_theorem_check, PolyKind};

/// `L f(y)` for a piecewise-linear map: `(1/N) sum f(x_i)` over branch
/// preimages of `y` (slopes all have magnitude N).
pub fn pf_apply_pwl(pwl: &PiecewiseLinearMap, f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let sum: f64 = pwl.preimages(y).iter().map(|&(_, x)| f(x)).sum();
    sum / pwl.order() as f64
}

/// Exclusion band around the endpoint derivative singularity.
const ENDPOINT_BAND: f64 = 1e-9;

/// `L f(y)` for the smooth map `T_{N,a}`, via the angle preimages
/// `theta_k = (+-arccos y - a + 2 pi k)/N` restricted to `[0, pi]`, with
/// `|T'(x)| = N sqrt(1 - y^2)/sin(theta)`.
pub fn pf_apply_smooth(spec: &MapSpec, f: impl Fn(f64) -> f64, y: f64) -> Result<f64> {
    if y.abs() > 1.0 - ENDPOINT_BAND {
        return Err(Error::domain(
            "evaluation point is inside the endpoint singularity band",
        ));
    }
    let n = spec.order() as f64;
    let a = spec.shift().radians();
    let phi = y.acos();
    let root = (1.0 - y * y).sqrt();
    let mut acc = 0.0;
    for sign in [1.0, -1.0] {
        let base = sign * phi - a;
        let k_lo = (-base / (2.0 * std::f64::consts::PI)).floor() as i64 - 1;
        let k_hi =
            ((n * std::f64::consts::PI - base) / (2.0 * std::f64::consts::PI)).ceil() as i64 + 1;
        for k in k_lo..=k_hi {
            let theta = (base + 2.0 * std::f64::consts::PI * k as f64) / n;
            if !(-1e-14..=std::f64::consts::PI + 1e-14).contains(&theta) {
                continue;
            }
            let theta = theta.clamp(0.0, std::f64::consts::PI);
            let mut x = theta.cos();
            if x.abs() >= 1.0 {
                // keep arcsine-weighted integrands finite
                x = x.signum() * (1.0 - 5e-16);
            }
            acc += f(x) * theta.sin() / (n * root);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenBranch {
    Bernoulli,
    Euler,
}

/// How an eigenfunction is built, exposed so tests can assert structure
/// rather than just values.
pub enum EigenForm {
    /// `arcsine(x) * P(scale * arccos(-x)/pi + offset)`.
    ArcsineWeighted {
        kind: PolyKind,
        poly: PolynomialCoeffs,
        scale: Rat,
        offset: Rat,
    },
    /// `arcsine(x) * f(arccos(x)/pi)` for an exact piecewise polynomial `f`
    /// over the Markov partition of the conjugated map.
    PiecewiseConjugate { poly: PiecewisePoly },
}

/// One eigenpair of the Perron-Frobenius operator.
pub struct EigenPair {
    pub order: u32,
    pub index: u32,
    pub branch: EigenBranch,
    /// Exactly `order^(-2 index)`.
    pub lambda: Rat,
    pub form: EigenForm,
}

impl EigenPair {
    /// Eigenfunction value at `x` in `(-1, 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        let arcsine = 1.0 / (std::f64::consts::PI * (1.0 - x * x).sqrt());
        match &self.form {
            EigenForm::ArcsineWeighted {
                poly, scale, offset, ..
            } => {
                let u0 = (-x).acos() / std::f64::consts::PI;
                arcsine * poly.eval(crate::rat::to_f64(scale) * u0 + crate::rat::to_f64(offset))
            }
            EigenForm::PiecewiseConjugate { poly } => {
                let u = x.acos() / std::f64::consts::PI;
                arcsine * poly.eval(u)
            }
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        crate::rat::to_f64(&self.lambda)
    }

    pub fn describe(&self) -> serde_json::Value {
        let form = match &self.form {
            EigenForm::ArcsineWeighted {
                kind,
                poly,
                scale,
                offset,
            } => serde_json::json!({
                "kind": match kind { PolyKind::Bernoulli => "bernoulli", PolyKind::Euler => "euler" },
                "degree": poly.degree(),
                "inner_scale": format_rat(scale),
                "inner_offset": format_rat(offset),
            }),
            EigenForm::PiecewiseConjugate { poly } => poly.describe(),
        };
        serde_json::json!({
            "order": self.order,
            "n": self.index,
            "branch": match self.branch { EigenBranch::Bernoulli => "bernoulli", EigenBranch::Euler => "euler" },
            "lambda": format_rat(&self.lambda),
            "form": form,
        })
    }
}

fn lambda_exact(order: u32, n: u32) -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(order as u64).pow(2 * n))
}

/// Eigenfunctions of the ordinary map `T_{N,0}` with eigenvalue `N^{-2n}`:
/// even `N` has the single Bernoulli family
/// `arcsine(x) B_{2n}(arccos(-x)/(2 pi) + 1/2)`; odd `N` is doubly degenerate
/// with `arcsine(x) B_{2n}(arccos(-x)/pi)` and
/// `arcsine(x) E_{2n-1}(arccos(-x)/pi)`. The polynomials do not depend on
/// `N`, only the eigenvalue does.
pub fn eigenfunction_ordinary(order: u32, n: u32, branch: EigenBranch) -> Result<EigenPair> {
    if order < 2 {
        return Err(Error::domain("order must be >= 2"));
    }
    let even = order % 2 == 0;
    let form = match (branch, even) {
        (EigenBranch::Euler, true) => {
            return Err(Error::domain("the Euler branch only exists for odd orders"));
        }
        (EigenBranch::Euler, false) => {
            if n == 0 {
                return Err(Error::domain("the Euler branch starts at n = 1"));
            }
            EigenForm::ArcsineWeighted {
                kind: PolyKind::Euler,
                poly: euler_poly(2 * n as usize - 1),
                scale: rat_int(1),
                offset: rat_int(0),
            }
        }
        (EigenBranch::Bernoulli, true) => EigenForm::ArcsineWeighted {
            kind: PolyKind::Bernoulli,
            poly: bernoulli_poly(2 * n as usize),
            scale: rat(1, 2),
            offset: rat(1, 2),
        },
        (EigenBranch::Bernoulli, false) => EigenForm::ArcsineWeighted {
            kind: PolyKind::Bernoulli,
            poly: bernoulli_poly(2 * n as usize),
            scale: rat_int(1),
            offset: rat_int(0),
        },
    };
    Ok(EigenPair {
        order,
        index: n,
        branch,
        lambda: lambda_exact(order, n),
        form,
    })
}

/// Eigenfunction of the shifted even-order map `T_{2q, -pi/m}` at eigenvalue
/// `(2q)^{-2n}`, constructed exactly as a kernel vector of the transfer
/// operator on piecewise polynomials of degree `2n` over the Markov
/// partition (escalating the degree a little when the eigenvalue needs extra
/// polynomial headroom). `n = 0` returns the flat conjugate density, i.e.
/// the arcsine density on `[-1, 1]`.
pub fn eigenfunction_shifted_even(q: u32, m: u32, n: u32) -> Result<EigenPair> {
    if q < 1 {
        return Err(Error::domain("q must be >= 1"));
    }
    if m < 2 {
        return Err(Error::domain("m must be >= 2"));
    }
    let order = 2 * q;
    let spec = MapSpec::with_fraction(order, 1, m as u64)?;
    let pwl = build_pwl(&spec)?;
    let partition = build_markov_partition(&pwl)?;
    let lambda = lambda_exact(order, n);
    if n == 0 {
        return Ok(EigenPair {
            order,
            index: 0,
            branch: EigenBranch::Bernoulli,
            lambda,
            form: EigenForm::PiecewiseConjugate {
                poly: PiecewisePoly::constant_one(partition),
            },
        });
    }
    let mut degree = 2 * n as usize;
    loop {
        let basis = pwpoly::eigenfunctions_at(&pwl, &partition, &lambda, degree)?;
        if let Some(poly) = basis.into_iter().next() {
            return Ok(EigenPair {
                order,
                index: n,
                branch: EigenBranch::Bernoulli,
                lambda,
                form: EigenForm::PiecewiseConjugate { poly },
            });
        }
        degree += 2;
        if degree > 2 * n as usize + 6 {
            return Err(Error::domain(format!(
                "no eigenfunction at (2q)^(-2n) for q={q} m={m} n={n} up to degree {degree}"
            )));
        }
    }
}

/// Worst-case residual of the eigen identity `L rho = lambda rho` on a
/// Chebyshev-spaced grid of `points` interior evaluation points, relative to
/// `max(1, sup |rho|)` over the grid.
pub fn eigen_residual(spec: &MapSpec, pair: &EigenPair, points: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut sup = 0.0f64;
    let lambda = pair.lambda_f64();
    for j in 0..points {
        let y = (std::f64::consts::PI * (j as f64 + 0.5) / points as f64).cos();
        let lhs = pf_apply_smooth(spec, |x| pair.eval(x), y)?;
        let rhs = pair.eval(y);
        worst = worst.max((lhs - lambda * rhs).abs());
        sup = sup.max(rhs.abs());
    }
    Ok(worst / sup.max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiConjugacy {
    /// `(-T_m) o T_{2q,-pi/m} = T_{2q,0} o (-T_m) = T_{2qm,0}`.
    Even { q: u32, m: u32 },
    /// `(-T_2m) o T_{N,-pi/m} = T_{N,0} o (-T_2m) = -T_{2mN,0}`, odd `N`.
    Odd { order: u32, m: u32 },
}

/// Max residual of the semi-conjugacy identities over a uniform grid
/// (both composition orders are checked against the target map).
pub fn semi_conjugacy_check(variant: SemiConjugacy, sample_count: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let count = sample_count.max(2);
    let grid = (0..count).map(move |i| -1.0 + 2.0 * i as f64 / (count - 1) as f64);
    match variant {
        SemiConjugacy::Even { q, m } => {
            if q < 1 || m < 2 {
                return Err(Error::domain("need q >= 1 and m >= 2"));
            }
            let shifted = MapSpec::with_fraction(2 * q, 1, m as u64)?;
            let t_m = MapSpec::ordinary(m)?;
            let t_2q = MapSpec::ordinary(2 * q)?;
            let t_2qm = MapSpec::ordinary(2 * q * m)?;
            for x in grid {
                let target = t_2qm.eval(x)?;
                let lhs1 = -t_m.eval(shifted.eval(x)?)?;
                let lhs2 = t_2q.eval(-t_m.eval(x)?)?;
                worst = worst.max((lhs1 - target).abs()).max((lhs2 - target).abs());
            }
        }
        SemiConjugacy::Odd { order, m } => {
            if order % 2 == 0 || order < 3 || m < 2 {
                return Err(Error::domain("need odd order >= 3 and m >= 2"));
            }
            let shifted = MapSpec::with_fraction(order, 1, m as u64)?;
            let t_2m = MapSpec::ordinary(2 * m)?;
            let t_n = MapSpec::ordinary(order)?;
            let t_2mn = MapSpec::ordinary(2 * m * order)?;
            for x in grid {
                let target = -t_2mn.eval(x)?;
                let lhs1 = -t_2m.eval(shifted.eval(x)?)?;
                let lhs2 = t_n.eval(-t_2m.eval(x)?)?;
                worst = worst.max((lhs1 - target).abs()).max((lhs2 - target).abs());
            }
        }
    }
    Ok(worst)
}
