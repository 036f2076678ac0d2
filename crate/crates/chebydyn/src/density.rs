//! Exact invariant densities of the piecewise-linear conjugates.
//!
//! For a rational shift the breakpoint orbit closes into a finite Markov
//! partition: every cell image is an exact union of cells, the transfer
//! operator restricted to piecewise-constant densities is the 0/1 transition
//! matrix scaled by `1/N`, and the invariant density is a rational
//! eigenvector problem. No floating-point eigensolver is involved anywhere;
//! fixtures like the 19/118 plateau family are reproduced with zero rational
//! error and then pulled back to `[-1, 1]` through the conjugacy.

use crate::maps::{conjugacy_h, MapSpec, PiecewiseLinearMap};
use crate::parallel;
use crate::rat::{format_rat, kernel_basis, rat_int, to_f64, Rat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Interval partition of `[0, 1]` with exact rational endpoints, closed under
/// the map that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPartition {
    points: Vec<Rat>,
}

impl MarkovPartition {
    pub fn points(&self) -> &[Rat] {
        &self.points
    }

    pub fn cell_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn cell(&self, i: usize) -> (&Rat, &Rat) {
        (&self.points[i], &self.points[i + 1])
    }

    pub fn width(&self, i: usize) -> Rat {
        &self.points[i + 1] - &self.points[i]
    }

    /// Index of the cell containing `y` (last cell owns `y = 1`).
    pub fn cell_of(&self, y: &Rat) -> Option<usize> {
        if y < &self.points[0] || y > self.points.last().unwrap() {
            return None;
        }
        match self.points.binary_search(y) {
            Ok(i) => Some(i.min(self.cell_count() - 1)),
            Err(i) => Some(i - 1),
        }
    }
}

/// Cap on the breakpoint-orbit closure. For a shift `-pi p/q` the closure is
/// bounded by `N q + 1` points, so hitting the cap signals a non-rational
/// shift slipped through.
const PARTITION_CAP: usize = 1_000_000;

/// Closes `{0, 1, branch breakpoints}` under forward images, sorted.
pub fn build_markov_partition(pwl: &PiecewiseLinearMap) -> Result<MarkovPartition> {
    let mut points: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for b in pwl.branches() {
        points.push(b.lo.clone());
        points.push(b.hi.clone());
    }
    points.sort();
    points.dedup();
    let mut frontier = points.clone();
    while !frontier.is_empty() {
        if points.len() > PARTITION_CAP {
            return Err(Error::guard(
                "partition explosion: breakpoint orbit did not close (non-rational shift?)",
            ));
        }
        let mut next = Vec::new();
        for p in frontier {
            let img = pwl.eval_rat(&p)?;
            if points.binary_search(&img).is_err() {
                let pos = points.binary_search(&img).unwrap_err();
                points.insert(pos, img.clone());
                next.push(img);
            }
        }
        frontier = next;
    }
    Ok(MarkovPartition { points })
}

/// 0/1 matrix with `a[i][j] = 1` iff the image of cell `i` covers cell `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    a: Vec<Vec<u8>>,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.a.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.a[i][j]
    }
}

pub fn build_transition_matrix(
    partition: &MarkovPartition,
    pwl: &PiecewiseLinearMap,
) -> Result<TransitionMatrix> {
    let nc = partition.cell_count();
    let mut a = vec![vec![0u8; nc]; nc];
    for i in 0..nc {
        let (lo, hi) = partition.cell(i);
        // Cells never straddle a branch break: breakpoints seed the closure.
        let branch = pwl.branch_at(lo)?;
        if &branch.hi < hi {
            return Err(Error::NotMarkov(format!(
                "cell [{}, {}) straddles a branch breakpoint",
                format_rat(lo),
                format_rat(hi)
            )));
        }
        let (va, vb) = (branch.eval(lo), branch.eval(hi));
        let (img_lo, img_hi) = if va <= vb { (va, vb) } else { (vb, va) };
        if partition.points.binary_search(&img_lo).is_err()
            || partition.points.binary_search(&img_hi).is_err()
        {
            return Err(Error::NotMarkov(format!(
                "image of cell {i} is not a union of cells"
            )));
        }
        for j in 0..nc {
            let (clo, chi) = partition.cell(j);
            if clo >= &img_lo && chi <= &img_hi {
                a[i][j] = 1;
            }
        }
        if a[i].iter().all(|&x| x == 0) {
            return Err(Error::NotMarkov(format!("cell {i} has empty image")));
        }
    }
    Ok(TransitionMatrix { a })
}

/// Piecewise-constant density over a Markov partition.
///
/// `eigenvector` is the solution of `rho = (1/N) A^T rho` normalized so the
/// cell values sum to 1 (the normalization in which the classic plateau
/// rationals are quoted); `values` rescales it so the density integrates to 1
/// over `[0, 1]`.
#[derive(Debug, Clone)]
pub struct StepDensity {
    partition: MarkovPartition,
    eigenvector: Vec<Rat>,
    values: Vec<Rat>,
}

impl StepDensity {
    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    /// Integral-1 density value per cell.
    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Cell-sum-1 eigenvector of `(1/N) A^T`.
    pub fn eigenvector(&self) -> &[Rat] {
        &self.eigenvector
    }

    pub fn from_cell_values(partition: MarkovPartition, raw: Vec<Rat>) -> Result<Self> {
        if raw.len() != partition.cell_count() {
            return Err(Error::domain("cell value count does not match partition"));
        }
        if raw.iter().any(|v| v.is_negative()) {
            return Err(Error::domain("density values must be nonnegative"));
        }
        let cell_sum: Rat = raw.iter().sum();
        let integral: Rat = raw
            .iter()
            .enumerate()
            .map(|(i, v)| v * partition.width(i))
            .sum();
        if cell_sum.is_zero() || integral.is_zero() {
            return Err(Error::domain("density values are identically zero"));
        }
        let eigenvector = raw.iter().map(|v| v / &cell_sum).collect();
        let values = raw.iter().map(|v| v / &integral).collect();
        Ok(StepDensity {
            partition,
            eigenvector,
            values,
        })
    }

    /// Density value at `y`, from the integral-1 normalization.
    pub fn eval_f64(&self, y: f64) -> f64 {
        let pts = &self.partition.points;
        let nc = self.partition.cell_count();
        let mut i = match pts.iter().position(|p| to_f64(p) > y) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => nc - 1,
        };
        i = i.min(nc - 1);
        to_f64(&self.values[i])
    }

    /// Exact integral of the integral-1 values; identically 1.
    pub fn integral(&self) -> Rat {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.partition.width(i))
            .sum()
    }

    /// Merges adjacent cells with equal density value into plateaus;
    /// `(lo, hi, integral-1 value, cell-sum-1 value)` per plateau.
    pub fn plateaus(&self) -> Vec<(Rat, Rat, Rat, Rat)> {
        let mut out: Vec<(Rat, Rat, Rat, Rat)> = Vec::new();
        for i in 0..self.partition.cell_count() {
            let (lo, hi) = self.partition.cell(i);
            match out.last_mut() {
                Some(last) if last.2 == self.values[i] && last.1 == *lo => {
                    last.1 = hi.clone();
                }
                _ => out.push((
                    lo.clone(),
                    hi.clone(),
                    self.values[i].clone(),
                    self.eigenvector[i].clone(),
                )),
            }
        }
        out
    }

    /// Pullback density on `[-1, 1]`: `rho_T(x) = rho_g(h(x)) / (pi sqrt(1-x^2))`.
    /// Infinite at the endpoints (integrable singularity).
    pub fn pullback(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x: f64| {
            if x.abs() >= 1.0 {
                return f64::INFINITY;
            }
            let u = conjugacy_h(x).expect("x in (-1,1)");
            self.eval_f64(u) / (std::f64::consts::PI * (1.0 - x * x).sqrt())
        }
    }

    /// Exact mass of the pullback on `[x0, x1]`, via the substitution
    /// `x = cos(pi u)` which removes the endpoint singularity:
    /// the mass equals the `rho_g`-mass of `[h(x1), h(x0)]`.
    pub fn pullback_mass(&self, x0: f64, x1: f64) -> f64 {
        let (u_hi, u_lo) = (
            conjugacy_h(x0.clamp(-1.0, 1.0)).unwrap(),
            conjugacy_h(x1.clamp(-1.0, 1.0)).unwrap(),
        );
        let mut mass = 0.0;
        for i in 0..self.partition.cell_count() {
            let (lo, hi) = self.partition.cell(i);
            let (lo, hi) = (to_f64(lo), to_f64(hi));
            let overlap = (hi.min(u_hi) - lo.max(u_lo)).max(0.0);
            mass += overlap * to_f64(&self.values[i]);
        }
        mass
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "points": self.partition.points.iter().map(format_rat).collect::<Vec<_>>(),
            "values": self.values.iter().map(format_rat).collect::<Vec<_>>(),
            "eigenvector": self.eigenvector.iter().map(format_rat).collect::<Vec<_>>(),
            "plateaus": self.plateaus().iter().map(|(lo, hi, v, w)| serde_json::json!({
                "interval": [format_rat(lo), format_rat(hi)],
                "value": format_rat(v),
                "eigenvector_value": format_rat(w),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Rational kernel of `(1/N) A^T - I`, i.e. all invariant piecewise-constant
/// densities (unnormalized).
pub fn invariant_kernel(a: &TransitionMatrix, n: u32) -> Vec<Vec<Rat>> {
    let nc = a.size();
    // Scale by N: kernel of (A^T - N I).
    let mut m = vec![vec![Rat::zero(); nc]; nc];
    for i in 0..nc {
        for j in 0..nc {
            m[i][j] = rat_int(a.get(j, i) as i64);
        }
        m[i][i] = &m[i][i] - rat_int(n as i64);
    }
    kernel_basis(&m)
}

/// Solves `rho = (1/N) A^T rho` exactly.
///
/// Errors with [`Error::DegenerateKernel`] when the kernel dimension exceeds
/// one (independent ergodic components, e.g. order 2 with a nonzero shift);
/// use [`ergodic_components`] to resolve the pieces.
pub fn invariant_step_density(
    partition: &MarkovPartition,
    a: &TransitionMatrix,
    n: u32,
) -> Result<StepDensity> {
    let basis = invariant_kernel(a, n);
    match basis.len() {
        0 => Err(Error::domain("transition matrix has no invariant density")),
        1 => {
            let mut v = basis.into_iter().next().unwrap();
            if v.iter().any(|x| x.is_negative()) {
                for x in v.iter_mut() {
                    *x = -x.clone();
                }
            }
            StepDensity::from_cell_values(partition.clone(), v)
        }
        _ => Err(Error::DegenerateKernel { basis }),
    }
}

/// Splits the transition graph into recurrent classes and solves the
/// invariant density of each, supported on its own cells.
pub fn ergodic_components(
    partition: &MarkovPartition,
    a: &TransitionMatrix,
    n: u32,
) -> Result<Vec<StepDensity>> {
    let nc = a.size();
    // Strongly connected components via boolean transitive closure; the
    // partitions here have at most a few hundred cells.
    let mut reach: Vec<Vec<bool>> = (0..nc)
        .map(|i| (0..nc).map(|j| i == j || a.get(i, j) == 1).collect())
        .collect();
    for k in 0..nc {
        for i in 0..nc {
            if reach[i][k] {
                for j in 0..nc {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut comp = vec![usize::MAX; nc];
    let mut ncomp = 0;
    for i in 0..nc {
        if comp[i] != usize::MAX {
            continue;
        }
        for j in 0..nc {
            if reach[i][j] && reach[j][i] {
                comp[j] = ncomp;
            }
        }
        ncomp += 1;
    }
    // Recurrent classes: no edge leaving the class.
    let mut recurrent = vec![true; ncomp];
    for i in 0..nc {
        for j in 0..nc {
            if a.get(i, j) == 1 && comp[i] != comp[j] {
                recurrent[comp[i]] = false;
            }
        }
    }
    let mut out = Vec::new();
    for c in 0..ncomp {
        if !recurrent[c] {
            continue;
        }
        let cells: Vec<usize> = (0..nc).filter(|&i| comp[i] == c).collect();
        let k = cells.len();
        let mut m = vec![vec![Rat::zero(); k]; k];
        for (bi, &i) in cells.iter().enumerate() {
            for (bj, &j) in cells.iter().enumerate() {
                m[bi][bj] = rat_int(a.get(j, i) as i64);
            }
            m[bi][bi] = &m[bi][bi] - rat_int(n as i64);
        }
        let basis = kernel_basis(&m);
        if basis.len() != 1 {
            return Err(Error::domain(format!(
                "recurrent class has kernel dimension {}",
                basis.len()
            )));
        }
        let mut full = vec![Rat::zero(); nc];
        for (bi, &i) in cells.iter().enumerate() {
            full[i] = basis[0][bi].clone();
        }
        if full.iter().any(|x| x.is_negative()) {
            for x in full.iter_mut() {
                *x = -x.clone();
            }
        }
        out.push(StepDensity::from_cell_values(partition.clone(), full)?);
    }
    Ok(out)
}

/// Convenience: exact invariant density of the conjugate of `spec`.
pub fn exact_density(spec: &MapSpec) -> Result<StepDensity> {
    let pwl = crate::maps::build_pwl(spec)?;
    let partition = build_markov_partition(&pwl)?;
    let a = build_transition_matrix(&partition, &pwl)?;
    invariant_step_density(&partition, &a, spec.order())
}

/// Star condition predicate; see [`MapSpec::star_condition`].
pub fn star_condition(spec: &MapSpec) -> bool {
    spec.star_condition()
}

/// Normalized histogram over `[-1, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bins: usize,
    /// Density value per bin (integrates to 1).
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn bin_center(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.bin_width()
    }

    pub fn bin_width(&self) -> f64 {
        2.0 / self.bins as f64
    }

    /// `L1` distance to a reference described by its exact bin masses.
    pub fn l1_distance_to_masses(&self, mass: impl Fn(f64, f64) -> f64) -> f64 {
        let w = self.bin_width();
        (0..self.bins)
            .map(|i| {
                let lo = -1.0 + i as f64 * w;
                (self.densities[i] * w - mass(lo, lo + w)).abs()
            })
            .sum()
    }
}

pub(crate) fn stream_seed(master: u64, index: u64) -> u64 {
    // splitmix64 of (master ^ golden-ratio-scrambled index)
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Histogram of post-burn-in iterates over uniformly random initial points.
///
/// Each trajectory draws from its own counter-derived RNG stream, so the
/// result is identical for any thread count and deterministic given the seed.
pub fn histogram_estimate(
    spec: &MapSpec,
    n_traj: usize,
    n_steps: usize,
    burn_in: usize,
    bins: usize,
    seed: u64,
) -> Result<Histogram> {
    if n_traj == 0 || n_steps == 0 || bins == 0 {
        return Err(Error::domain("trajectory, step and bin counts must be positive"));
    }
    if burn_in >= n_steps {
        return Err(Error::domain("burn-in must be smaller than the step count"));
    }
    let map = spec.evaluator();
    let per_traj = parallel::map_indexed(n_traj, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, t as u64));
        let mut counts = vec![0u64; bins];
        let mut x: f64 = rng.gen_range(-1.0..1.0);
        for step in 0..n_steps {
            x = map(x).clamp(-1.0, 1.0);
            if step >= burn_in {
                let b = (((x + 1.0) / 2.0) * bins as f64) as usize;
                counts[b.min(bins - 1)] += 1;
            }
        }
        counts
    });
    let mut counts = vec![0u64; bins];
    for c in per_traj {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    let total: u64 = counts.iter().sum();
    let w = 2.0 / bins as f64;
    let densities = counts
        .iter()
        .map(|&c| c as f64 / (total as f64 * w))
        .collect();
    Ok(Histogram { bins, densities })
}

/// Arcsine bin mass `(asin(x1) - asin(x0))/pi`, the star-condition reference.
pub fn arcsine_mass(x0: f64, x1: f64) -> f64 {
    (x1.clamp(-1.0, 1.0).asin() - x0.clamp(-1.0, 1.0).asin()) / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::build_pwl;
    use crate::rat::rat;

    fn density_for(n: u32, p: u64, q: u64) -> StepDensity {
        exact_density(&MapSpec::with_fraction(n, p, q).unwrap()).unwrap()
    }

    #[test]
    fn partition_n3_ninth_shift_is_the_eleven_point_set() {
        let pwl = build_pwl(&MapSpec::with_fraction(3, 1, 9).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let expect: Vec<Rat> = [
            (0, 1),
            (1, 27),
            (1, 9),
            (2, 9),
            (10, 27),
            (4, 9),
            (5, 9),
            (19, 27),
            (7, 9),
            (8, 9),
            (1, 1),
        ]
        .iter()
        .map(|&(a, b)| rat(a, b))
        .collect();
        assert_eq!(part.points(), expect.as_slice());
    }

    #[test]
    fn partition_full_branch_maps() {
        let pwl = build_pwl(&MapSpec::ordinary(2).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        assert_eq!(part.points(), &[rat(0, 1), rat(1, 2), rat(1, 1)]);
    }

    #[test]
    fn transition_matrix_fixtures() {
        // Full-stretch order 2: both halves cover everything.
        let pwl = build_pwl(&MapSpec::ordinary(2).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let a = build_transition_matrix(&part, &pwl).unwrap();
        assert_eq!(a.rows(), &[vec![1, 1], vec![1, 1]]);

        let pwl = build_pwl(&MapSpec::ordinary(3).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let a = build_transition_matrix(&part, &pwl).unwrap();
        assert_eq!(a.size(), 3);
        assert!(a.rows().iter().all(|r| r.iter().all(|&x| x == 1)));
    }

    #[test]
    fn ten_by_ten_transition_matrix() {
        let pwl = build_pwl(&MapSpec::with_fraction(3, 1, 9).unwrap()).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let a = build_transition_matrix(&part, &pwl).unwrap();
        let expect: [[u8; 10]; 10] = [
            [1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
            [1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 1, 1, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
            [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
            [0, 0, 0, 0, 0, 1, 1, 1, 0, 0],
            [1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
            [1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 1, 1, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 1, 1, 0],
        ];
        for i in 0..10 {
            assert_eq!(a.rows()[i], expect[i], "row {i}");
        }
    }

    #[test]
    fn plateau_rationals_n3_ninth_shift() {
        let d = density_for(3, 1, 9);
        let plateaus = d.plateaus();
        let expect = [
            ((0, 1), (1, 9), (19, 118)),
            ((1, 9), (2, 9), (19, 177)),
            ((2, 9), (4, 9), (21, 236)),
            ((4, 9), (5, 9), (11, 118)),
            ((5, 9), (7, 9), (19, 236)),
            ((7, 9), (8, 9), (14, 177)),
            ((8, 9), (1, 1), (7, 118)),
        ];
        assert_eq!(plateaus.len(), expect.len());
        for (got, (lo, hi, v)) in plateaus.iter().zip(expect) {
            assert_eq!(got.0, rat(lo.0, lo.1));
            assert_eq!(got.1, rat(hi.0, hi.1));
            assert_eq!(got.3, rat(v.0, v.1), "eigenvector plateau");
        }
        // Integral-1 normalization rescales by 118/11.
        assert_eq!(plateaus[0].2, rat(19, 11));
        assert_eq!(d.integral(), rat(1, 1));
    }

    #[test]
    fn full_branch_density_is_flat() {
        let d = exact_density(&MapSpec::ordinary(3).unwrap()).unwrap();
        assert!(d.values().iter().all(|v| v == &rat(1, 1)));
    }

    #[test]
    fn half_shift_order3_density() {
        let d = density_for(3, 1, 2);
        let plateaus = d.plateaus();
        assert_eq!(plateaus.len(), 2);
        assert_eq!(plateaus[0].2, rat(4, 3));
        assert_eq!(plateaus[1].2, rat(2, 3));
        assert_eq!(plateaus[1].0, rat(1, 2));
    }

    #[test]
    fn order2_nonzero_shift_is_degenerate() {
        let spec = MapSpec::with_fraction(2, 1, 4).unwrap();
        let pwl = build_pwl(&spec).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let a = build_transition_matrix(&part, &pwl).unwrap();
        match invariant_step_density(&part, &a, 2) {
            Err(Error::DegenerateKernel { basis }) => assert_eq!(basis.len(), 2),
            other => panic!("expected degenerate kernel, got {other:?}"),
        }
        let comps = ergodic_components(&part, &a, 2).unwrap();
        assert_eq!(comps.len(), 2);
        // The flat density lies in the span: each component is flat on its
        // support, so their mass-weighted mixture with Lebesgue weights is 1.
        for c in &comps {
            assert_eq!(c.integral(), rat(1, 1));
        }
    }

    #[test]
    fn star_condition_cases() {
        assert!(MapSpec::with_fraction(2, 1, 4).unwrap().star_condition());
        assert!(MapSpec::ordinary(3).unwrap().star_condition());
        assert!(!MapSpec::with_fraction(3, 1, 2).unwrap().star_condition());
    }

    #[test]
    fn star_condition_densities_are_flat_or_contain_flat() {
        // Ergodic star cases: unique flat density.
        for (n, p, q) in [(4u32, 1u64, 3u64), (6, 1, 2), (2, 0, 1), (5, 0, 1)] {
            let d = density_for(n, p, q);
            assert!(d.values().iter().all(|v| v == &rat(1, 1)), "N={n} {p}/{q}");
        }
        // Order 2 with shift: flat is a mixture of the two components.
        let spec = MapSpec::with_fraction(2, 1, 2).unwrap();
        let pwl = build_pwl(&spec).unwrap();
        let part = build_markov_partition(&pwl).unwrap();
        let a = build_transition_matrix(&part, &pwl).unwrap();
        let comps = ergodic_components(&part, &a, 2).unwrap();
        let mut mix = vec![Rat::zero(); part.cell_count()];
        for c in comps {
            let mass: Rat = c
                .values()
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| part.width(i))
                .sum();
            for (i, v) in c.values().iter().enumerate() {
                mix[i] = &mix[i] + v * &mass;
            }
        }
        assert!(mix.iter().all(|v| v == &rat(1, 1)));
    }

    #[test]
    fn histogram_smoke_and_determinism() {
        let spec = MapSpec::ordinary(2).unwrap();
        let h1 = histogram_estimate(&spec, 1, 10, 0, 16, 7).unwrap();
        let mass: f64 = h1.densities.iter().map(|d| d * h1.bin_width()).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let h2 = histogram_estimate(&spec, 1, 10, 0, 16, 7).unwrap();
        assert_eq!(h1.densities, h2.densities);
    }

    #[test]
    fn pullback_mass_sums_to_one() {
        let d = density_for(3, 1, 9);
        let total = d.pullback_mass(-1.0, 1.0);
        assert!((total - 1.0).abs() < 1e-12);
        // Pullback midpoint value: flat case gives the arcsine density.
        let flat = exact_density(&MapSpec::ordinary(2).unwrap()).unwrap();
        let rho = flat.pullback();
        assert!((rho(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    }
}
