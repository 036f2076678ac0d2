//! Shifted Chebyshev dynamical systems toolkit.
//!
//! The maps under study are `T_{N,a}(x) = cos(N arccos x + a)` on `[-1, 1]`
//! with integer order `N >= 2` and shift angle `a` in `[-pi/2, 0]`. The crate
//! provides:
//!
//! - [`maps`]: map evaluation, orbits, the topological conjugacy to
//!   piecewise-linear maps on `[0, 1]`, and exact branch-table construction
//!   for rational shift angles.
//! - [`density`]: exact Markov partitions, 0/1 transition matrices, invariant
//!   step densities by rational linear algebra, pullbacks to `[-1, 1]`, and
//!   Monte-Carlo histograms.
//! - [`spectral`]: Bernoulli/Euler polynomial machinery, the numeric
//!   Perron-Frobenius operator, closed-form and exactly-constructed
//!   eigenfunctions, and semi-conjugacy identity checks.
//! - [`correlations`]: analytic higher-order correlation functions (spin sums
//!   over the diophantine equation `sum sigma_l N^{n_l} = 0`), generalized
//!   Fourier-support counting, closed-form two-point laws, and Monte-Carlo
//!   estimators.
//! - [`cml`]: coupled-map-lattice simulation for the four nearest-neighbour
//!   coupling types, SNNC/TNNC measurement, parameter scans, zero-crossing
//!   localization, and synchronized-fixed-point stability.
//!
//! Data-parallel inner loops (histograms, Monte Carlo, lattice sweeps) run on
//! rayon when the default `parallel` feature is enabled and fall back to
//! sequential loops otherwise. Reductions are ordered so results are identical
//! across thread counts.

pub mod angle;
pub mod cml;
pub mod correlations;
pub mod density;
mod error;
pub mod io;
pub mod maps;
mod parallel;
pub mod rat;
pub mod spectral;

pub use angle::ShiftAngle;
pub use error::{Error, Result};
pub use maps::MapSpec;
