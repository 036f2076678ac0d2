//! Parameter scans over (coupling strength, shift angle) and zero-crossing
//! localization for the nearest-neighbour correlations.

use super::{measure_snnc_tnnc, CouplingType, LatticeRun, NeighbourCorrelations};
use crate::angle::ShiftAngle;
use crate::density::stream_seed;
use crate::maps::MapSpec;
use crate::parallel;
use crate::{Error, Result};
use serde::Serialize;

/// Lattice protocol constants. The defaults (J = 5000, K = 1000 after a
/// 100-step burn-in) reproduce the statistical floor of the reference scans.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanProtocol {
    pub sites: usize,
    pub steps: usize,
    pub burn_in: usize,
}

impl Default for ScanProtocol {
    fn default() -> Self {
        ScanProtocol {
            sites: 5000,
            steps: 1000,
            burn_in: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    Snnc,
    Tnnc,
}

impl Target {
    pub fn pick(&self, m: &NeighbourCorrelations) -> (f64, f64) {
        match self {
            Target::Snnc => (m.snnc, m.snnc_stderr),
            Target::Tnnc => (m.tnnc, m.tnnc_stderr),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Target::Snnc => "snnc",
            Target::Tnnc => "tnnc",
        }
    }
}

/// One scan cell.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceCell {
    pub c: f64,
    pub a: f64,
    pub snnc: f64,
    pub tnnc: f64,
    pub snnc_stderr: f64,
    pub tnnc_stderr: f64,
    /// Set when the spread of independent restarts exceeds five times the
    /// independence noise floor; indicates the window average failed to
    /// stabilise (loss of ergodicity / mixing).
    pub ergodicity_flag: bool,
}

/// SNNC/TNNC over a rectangular `(c, a)` grid, one protocol for every cell,
/// each cell seeded independently from the master seed so the evaluation
/// order does not matter.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationSurface {
    pub order: u32,
    pub coupling: CouplingType,
    pub protocol: ScanProtocol,
    pub master_seed: u64,
    pub restarts: u32,
    pub c_grid: Vec<f64>,
    pub a_grid: Vec<f64>,
    /// Row-major `a x c`.
    pub cells: Vec<SurfaceCell>,
}

fn cell_correlations(
    order: u32,
    coupling: CouplingType,
    a: ShiftAngle,
    c: f64,
    protocol: ScanProtocol,
    seed: u64,
    restarts: u32,
) -> Result<SurfaceCell> {
    let spec = MapSpec::new(order, a)?;
    let restarts = restarts.max(1);
    let mut measures = Vec::with_capacity(restarts as usize);
    for r in 0..restarts {
        let run = LatticeRun {
            sites: protocol.sites,
            steps: protocol.steps,
            burn_in: protocol.burn_in,
            strength: c,
            coupling,
            spec,
            seed: stream_seed(seed, r as u64),
        };
        measures.push(measure_snnc_tnnc(&run)?);
    }
    let n = measures.len() as f64;
    let snnc = measures.iter().map(|m| m.snnc).sum::<f64>() / n;
    let tnnc = measures.iter().map(|m| m.tnnc).sum::<f64>() / n;
    let mean_square = measures.iter().map(|m| m.mean_square).sum::<f64>() / n;
    let (snnc_stderr, tnnc_stderr, flag) = if restarts >= 2 {
        let spread = |f: &dyn Fn(&NeighbourCorrelations) -> f64, mean: f64| {
            (measures.iter().map(|m| (f(m) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let s_sd = spread(&|m| m.snnc, snnc);
        let t_sd = spread(&|m| m.tnnc, tnnc);
        // Independence floor for the window average.
        let floor = mean_square / ((protocol.steps * protocol.sites) as f64).sqrt();
        (
            s_sd / n.sqrt(),
            t_sd / n.sqrt(),
            s_sd > 5.0 * floor || t_sd > 5.0 * floor,
        )
    } else {
        (measures[0].snnc_stderr, measures[0].tnnc_stderr, false)
    };
    Ok(SurfaceCell {
        c,
        a: ShiftAngle::radians(&a),
        snnc,
        tnnc,
        snnc_stderr,
        tnnc_stderr,
        ergodicity_flag: flag,
    })
}

/// Scans the `(c, a)` grid, one independent cell per grid point,
/// embarrassingly parallel with per-cell derived seeds.
pub fn scan_surface(
    order: u32,
    coupling: CouplingType,
    a_grid: &[ShiftAngle],
    c_grid: &[f64],
    protocol: ScanProtocol,
    master_seed: u64,
    restarts: u32,
) -> Result<CorrelationSurface> {
    if a_grid.is_empty() || c_grid.is_empty() {
        return Err(Error::domain("scan grids must be nonempty"));
    }
    let jobs: Vec<(usize, usize)> = (0..a_grid.len())
        .flat_map(|ia| (0..c_grid.len()).map(move |ic| (ia, ic)))
        .collect();
    let cells_res = parallel::map_indexed(jobs.len(), |idx| {
        let (ia, ic) = jobs[idx];
        let seed = stream_seed(stream_seed(master_seed, ic as u64), ia as u64);
        cell_correlations(
            order,
            coupling,
            a_grid[ia],
            c_grid[ic],
            protocol,
            seed,
            restarts,
        )
    });
    let mut cells = Vec::with_capacity(cells_res.len());
    for c in cells_res {
        cells.push(c?);
    }
    Ok(CorrelationSurface {
        order,
        coupling,
        protocol,
        master_seed,
        restarts,
        c_grid: c_grid.to_vec(),
        a_grid: a_grid.iter().map(ShiftAngle::radians).collect(),
        cells,
    })
}

/// A localized zero of SNNC or TNNC along a constant-`a` row.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroCrossing {
    pub a: f64,
    pub target: Target,
    pub c_star: f64,
    pub half_width: f64,
    /// Refinement stopped because the value was within 3 standard errors of
    /// zero across the bracket, not because the bracket closed.
    pub noise_limited: bool,
}

/// Localizes sign changes of the chosen correlation along a `c` row by
/// re-simulating at bisection midpoints with fresh derived seeds; each
/// bracket is narrowed below `half_width_goal` unless statistical noise
/// dominates first.
pub fn zero_crossings(
    order: u32,
    coupling: CouplingType,
    a: ShiftAngle,
    c_grid: &[f64],
    protocol: ScanProtocol,
    master_seed: u64,
    target: Target,
    half_width_goal: f64,
) -> Result<Vec<ZeroCrossing>> {
    if c_grid.len() < 2 {
        return Err(Error::domain("need at least two grid points"));
    }
    let spec = MapSpec::new(order, a)?;
    let mut seed_counter = 0u64;
    let mut eval = |c: f64, counter: &mut u64| -> Result<(f64, f64)> {
        *counter += 1;
        let run = LatticeRun {
            sites: protocol.sites,
            steps: protocol.steps,
            burn_in: protocol.burn_in,
            strength: c,
            coupling,
            spec,
            seed: stream_seed(master_seed, *counter),
        };
        let m = measure_snnc_tnnc(&run)?;
        Ok(target.pick(&m))
    };
    // Row values, evaluated in parallel with per-index seeds.
    let row_res = parallel::map_indexed(c_grid.len(), |i| {
        let run = LatticeRun {
            sites: protocol.sites,
            steps: protocol.steps,
            burn_in: protocol.burn_in,
            strength: c_grid[i],
            coupling,
            spec,
            seed: stream_seed(master_seed, 1_000_000 + i as u64),
        };
        measure_snnc_tnnc(&run).map(|m| target.pick(&m))
    });
    let mut row = Vec::with_capacity(row_res.len());
    for r in row_res {
        row.push(r?);
    }
    let mut out = Vec::new();
    for i in 0..row.len() - 1 {
        let (v0, _) = row[i];
        let (v1, _) = row[i + 1];
        if v0 == 0.0 || v0.signum() == v1.signum() {
            continue;
        }
        let (mut lo, mut hi) = (c_grid[i], c_grid[i + 1]);
        let (mut f_lo, _) = row[i];
        let mut noise_limited = false;
        while (hi - lo) / 2.0 > half_width_goal {
            let mid = (lo + hi) / 2.0;
            let (v, se) = eval(mid, &mut seed_counter)?;
            if v.abs() < 3.0 * se {
                noise_limited = true;
                break;
            }
            if v.signum() == f_lo.signum() {
                lo = mid;
                f_lo = v;
            } else {
                hi = mid;
            }
        }
        out.push(ZeroCrossing {
            a: ShiftAngle::radians(&a),
            target,
            c_star: (lo + hi) / 2.0,
            half_width: (hi - lo) / 2.0,
            noise_limited,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_scan_equals_direct_measurement() {
        let proto = ScanProtocol {
            sites: 200,
            steps: 100,
            burn_in: 10,
        };
        let surf = scan_surface(
            2,
            CouplingType::A,
            &[ShiftAngle::ZERO],
            &[0.3],
            proto,
            9,
            1,
        )
        .unwrap();
        assert_eq!(surf.cells.len(), 1);
        let run = LatticeRun {
            sites: proto.sites,
            steps: proto.steps,
            burn_in: proto.burn_in,
            strength: 0.3,
            coupling: CouplingType::A,
            spec: MapSpec::ordinary(2).unwrap(),
            seed: stream_seed(stream_seed(9, 0), 0),
        };
        let direct = measure_snnc_tnnc(&run).unwrap();
        assert_eq!(surf.cells[0].snnc.to_bits(), direct.snnc.to_bits());
    }

    #[test]
    fn no_crossing_on_positive_row() {
        // Strong diffusive coupling keeps SNNC positive on [0.3, 0.6].
        let proto = ScanProtocol {
            sites: 500,
            steps: 200,
            burn_in: 20,
        };
        let xs = zero_crossings(
            2,
            CouplingType::A,
            ShiftAngle::ZERO,
            &[0.3, 0.45, 0.6],
            proto,
            4,
            Target::Snnc,
            0.01,
        )
        .unwrap();
        assert!(xs.is_empty());
    }

    #[test]
    fn order_independence_of_cells() {
        let proto = ScanProtocol {
            sites: 100,
            steps: 50,
            burn_in: 5,
        };
        let a_grid = [ShiftAngle::ZERO, ShiftAngle::from_fraction(1, 4).unwrap()];
        let c_grid = [0.1, 0.7];
        let full = scan_surface(2, CouplingType::B, &a_grid, &c_grid, proto, 77, 1).unwrap();
        // The (a[1], c[1]) cell recomputed alone must match bitwise.
        let single = scan_surface(2, CouplingType::B, &a_grid[1..], &c_grid[1..], proto, 77, 1);
        // Different grid indices derive different seeds, so instead compare
        // against a direct cell evaluation with the same derived seed.
        drop(single);
        let seed = stream_seed(stream_seed(77, 1), 1);
        let direct = cell_correlations(
            2,
            CouplingType::B,
            a_grid[1],
            c_grid[1],
            proto,
            seed,
            1,
        )
        .unwrap();
        let cell = &full.cells[1 * c_grid.len() + 1];
        assert_eq!(cell.snnc.to_bits(), direct.snnc.to_bits());
        assert_eq!(cell.tnnc.to_bits(), direct.tnnc.to_bits());
    }
}
