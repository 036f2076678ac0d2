//! Coupled map lattices of shifted Chebyshev maps on a periodic ring.
//!
//! Four nearest-neighbour coupling types are supported, combining
//! forward/backward propagation of the local map with diffusive or
//! anti-diffusive neighbour terms. The observables of interest are the
//! spatial and temporal nearest-neighbour correlations (SNNC / TNNC)
//! averaged over a measurement window after a burn-in.

pub mod scan;
pub mod stability;

pub use scan::{scan_surface, zero_crossings, CorrelationSurface, ScanProtocol, Target, ZeroCrossing};
pub use stability::{sync_fixed_point_stability, SyncFixedPoint};

use crate::density::stream_seed;
use crate::maps::MapSpec;
use crate::parallel;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The four nearest-neighbour coupling rules.
///
/// Forward couplings (`A`, `AMinus`) couple the mapped neighbours
/// `T(x^{i+-1})`; backward couplings (`B`, `BMinus`) couple the raw
/// neighbours `x^{i+-1}`. The minus variants subtract the neighbour average
/// instead of adding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CouplingType {
    A,
    AMinus,
    B,
    BMinus,
}

impl CouplingType {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(CouplingType::A),
            "A-" | "a-" => Ok(CouplingType::AMinus),
            "B" | "b" => Ok(CouplingType::B),
            "B-" | "b-" => Ok(CouplingType::BMinus),
            _ => Err(Error::domain(format!(
                "unknown coupling type '{s}' (expected A, A-, B or B-)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CouplingType::A => "A",
            CouplingType::AMinus => "A-",
            CouplingType::B => "B",
            CouplingType::BMinus => "B-",
        }
    }
}

/// Full description of one lattice run.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeRun {
    pub sites: usize,
    /// Measured steps after the burn-in.
    pub steps: usize,
    pub burn_in: usize,
    pub strength: f64,
    pub coupling: CouplingType,
    pub spec: MapSpec,
    pub seed: u64,
}

impl LatticeRun {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 1 {
            return Err(Error::domain("lattice needs at least one site"));
        }
        if self.steps < 1 {
            return Err(Error::domain("need at least one measured step"));
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::domain("coupling strength must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// One synchronous update of the whole ring: `state -> out`.
///
/// Convexity (types A/B) or the triangle inequality (minus types) keeps all
/// values in `[-1, 1]` for `c` in `[0, 1]`; debug builds assert it.
pub fn cml_step(
    state: &[f64],
    out: &mut [f64],
    coupling: CouplingType,
    c: f64,
    map: impl Fn(f64) -> f64 + Copy + Send + Sync,
) {
    let j = state.len();
    let update = |i: usize| -> f64 {
        let left = state[(i + j - 1) % j];
        let right = state[(i + 1) % j];
        let here = map(state[i]);
        let (neigh_l, neigh_r) = match coupling {
            CouplingType::A | CouplingType::AMinus => (map(left), map(right)),
            CouplingType::B | CouplingType::BMinus => (left, right),
        };
        let sign = match coupling {
            CouplingType::A | CouplingType::B => 1.0,
            CouplingType::AMinus | CouplingType::BMinus => -1.0,
        };
        let v = (1.0 - c) * here + sign * (c / 2.0) * (neigh_l + neigh_r);
        debug_assert!(v.abs() <= 1.0 + 1e-9, "site update left [-1, 1]: {v}");
        v.clamp(-1.0, 1.0)
    };
    if j >= 4096 {
        parallel::fill_indexed(out, update);
    } else {
        parallel::fill_indexed_seq(out, update);
    }
}

pub fn random_initial_state(sites: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sites).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// SNNC/TNNC measurement plus window statistics used for error bars.
#[derive(Debug, Clone)]
pub struct NeighbourCorrelations {
    pub snnc: f64,
    pub tnnc: f64,
    pub snnc_stderr: f64,
    pub tnnc_stderr: f64,
    /// Mean of `x^2` over the measurement window (sets the independence
    /// noise floor `~ <x^2>/sqrt(K J)`).
    pub mean_square: f64,
}

/// Runs the lattice and measures
/// `SNNC = (1/KJ) sum_{n,j} x_n^j x_n^{j+1}` and
/// `TNNC = (1/KJ) sum_{n,j} x_n^j x_{n+1}^j` over the post-burn-in window.
/// Standard errors come from ten-block means of the per-step series.
pub fn measure_snnc_tnnc(run: &LatticeRun) -> Result<NeighbourCorrelations> {
    run.validate()?;
    let map = run.spec.evaluator();
    let j = run.sites;
    let mut state = random_initial_state(j, run.seed);
    let mut next = vec![0.0f64; j];
    let mut snnc_steps = Vec::with_capacity(run.steps);
    let mut tnnc_steps = Vec::with_capacity(run.steps);
    let mut sq_sum = 0.0f64;
    for step in 0..(run.burn_in + run.steps) {
        cml_step(&state, &mut next, run.coupling, run.strength, map);
        if step >= run.burn_in {
            let mut s = 0.0;
            let mut t = 0.0;
            let mut sq = 0.0;
            for i in 0..j {
                s += next[i] * next[(i + 1) % j];
                t += state[i] * next[i];
                sq += next[i] * next[i];
            }
            snnc_steps.push(s / j as f64);
            tnnc_steps.push(t / j as f64);
            sq_sum += sq / j as f64;
        }
        std::mem::swap(&mut state, &mut next);
    }
    let k = run.steps as f64;
    let snnc = snnc_steps.iter().sum::<f64>() / k;
    let tnnc = tnnc_steps.iter().sum::<f64>() / k;
    Ok(NeighbourCorrelations {
        snnc,
        tnnc,
        snnc_stderr: block_stderr(&snnc_steps),
        tnnc_stderr: block_stderr(&tnnc_steps),
        mean_square: sq_sum / k,
    })
}

/// Standard error of the series mean from 10 block means; blocks absorb
/// short-range temporal correlation of the step values.
fn block_stderr(series: &[f64]) -> f64 {
    let blocks = 10.min(series.len());
    if blocks < 2 {
        return f64::INFINITY;
    }
    let per = series.len() / blocks;
    let means: Vec<f64> = (0..blocks)
        .map(|b| series[b * per..(b + 1) * per].iter().sum::<f64>() / per as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / blocks as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (blocks - 1) as f64;
    (var / blocks as f64).sqrt()
}

/// Raw space-time field `x_n^{(i)}` after burn-in, row-major time x space.
pub struct PatternDump {
    pub steps: usize,
    pub sites: usize,
    pub field: Vec<f32>,
}

pub fn pattern_dump(run: &LatticeRun) -> Result<PatternDump> {
    run.validate()?;
    let map = run.spec.evaluator();
    let j = run.sites;
    let mut state = random_initial_state(j, run.seed);
    let mut next = vec![0.0f64; j];
    let mut field = Vec::with_capacity(run.steps * j);
    for step in 0..(run.burn_in + run.steps) {
        cml_step(&state, &mut next, run.coupling, run.strength, map);
        if step >= run.burn_in {
            field.extend(next.iter().map(|&x| x as f32));
        }
        std::mem::swap(&mut state, &mut next);
    }
    Ok(PatternDump {
        steps: run.steps,
        sites: j,
        field,
    })
}

/// Joint two-site histogram on `[-1, 1]^2`.
#[derive(Debug, Clone)]
pub struct TwoSiteHistogram {
    pub bins: usize,
    /// Row-major `bins x bins` density (integrates to 1 over the square).
    pub densities: Vec<f64>,
    samples: u64,
    diagonal_near: u64,
    diagonal_eps: f64,
}

impl TwoSiteHistogram {
    /// Fraction of post-burn-in mass with `|x1 - x2|` below the recording
    /// threshold (0.05), the synchronisation diagnostic.
    pub fn diagonal_mass(&self) -> f64 {
        self.diagonal_near as f64 / self.samples as f64
    }

    pub fn diagonal_threshold(&self) -> f64 {
        self.diagonal_eps
    }
}

/// Two coupled sites with forward diffusive coupling, the minimal lattice:
/// `x' = (1-c) T(x) + c T(y)` and symmetrically for `y`.
pub fn two_site_run(
    c: f64,
    spec: &MapSpec,
    n_traj: usize,
    n_steps: usize,
    burn_in: usize,
    bins: usize,
    seed: u64,
) -> Result<TwoSiteHistogram> {
    if n_traj == 0 || n_steps == 0 || bins == 0 {
        return Err(Error::domain("counts must be positive"));
    }
    if burn_in >= n_steps {
        return Err(Error::domain("burn-in must be smaller than the step count"));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::domain("coupling strength must lie in [0, 1]"));
    }
    let map = spec.evaluator();
    let eps = 0.05;
    let per_traj = parallel::map_indexed(n_traj, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, t as u64));
        let mut counts = vec![0u64; bins * bins];
        let mut near = 0u64;
        let (mut x, mut y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for step in 0..n_steps {
            let (tx, ty) = (map(x), map(y));
            x = ((1.0 - c) * tx + c * ty).clamp(-1.0, 1.0);
            y = ((1.0 - c) * ty + c * tx).clamp(-1.0, 1.0);
            if step >= burn_in {
                let bx = (((x + 1.0) / 2.0) * bins as f64) as usize;
                let by = (((y + 1.0) / 2.0) * bins as f64) as usize;
                counts[bx.min(bins - 1) * bins + by.min(bins - 1)] += 1;
                if (x - y).abs() < eps {
                    near += 1;
                }
            }
        }
        (counts, near)
    });
    let mut counts = vec![0u64; bins * bins];
    let mut near = 0u64;
    for (c_t, n_t) in per_traj {
        for (acc, v) in counts.iter_mut().zip(c_t) {
            *acc += v;
        }
        near += n_t;
    }
    let total: u64 = counts.iter().sum();
    let cell_area = (2.0 / bins as f64) * (2.0 / bins as f64);
    let densities = counts
        .iter()
        .map(|&v| v as f64 / (total as f64 * cell_area))
        .collect();
    Ok(TwoSiteHistogram {
        bins,
        densities,
        samples: total,
        diagonal_near: near,
        diagonal_eps: eps,
    })
}
