//! Pseudo-spectral Maxwell evolution on a periodic box.
//!
//! Grids are row-major with the last axis fastest. Spectra follow the
//! unnormalized forward convention `û(k) = Σ_x u(x) e^{−ik·x}`.

mod charges;
pub mod data;
mod grid;
mod lp;
mod modes;
mod transform;
mod variable;

use thiserror::Error;

pub use charges::{divergence_charges, solve_charges, split_stationary_dispersive, Potentials, Splitting, SplittingSummary};
pub use grid::{energy, ChargePair, FftNd, FieldKind, FieldState, Grid3, GridSpec, Spectrum, DEFAULT_C_CFL, WRAPAROUND_FRACTION};
pub use lp::{chi, lp_project, lp_project_scalar, lp_project_spacetime, spatial_multiplier, LpBand, LpMode, SpaceTimeField};
pub use modes::{mode_eigensystem, propagate_const, propagate_spectrum, ModalPropagator, ModeFrame, ModeSystem};
pub use transform::{transform_fields, TransformReport, TransformSummary};
pub use variable::{medium_energy, propagate_variable, Medium, Modulation, StepOptions, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("axis {axis} has {n} points; a power of two ≥ 2 is required")]
    NotPowerOfTwo { axis: usize, n: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("time step {dt:e} exceeds the CFL limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("final time {t} exceeds the wraparound limit {limit}")]
    Wraparound { t: f64, limit: f64 },
    #[error("zero wavevector")]
    ZeroWavevector,
    #[error("{0} is not a power of two")]
    NotDyadic(f64),
    #[error("band {band:?} lies outside the grid frequencies (|ξ| ≤ {k_max})")]
    AnnulusOutsideNyquist { band: LpBand, k_max: f64 },
    #[error("{which} has nonzero mean {mean:e}")]
    NonZeroMean { which: &'static str, mean: f64 },
    #[error("data are inconsistent with the given charges (mismatch {mismatch:e})")]
    InconsistentCharges { mismatch: f64 },
    #[error("frame at node {node} is not orthogonal (error {error:e})")]
    NonOrthogonalFrame { node: usize, error: f64 },
    #[error("ellipticity lost at t = {time}: eigenvalue {value} outside the band")]
    Ellipticity { time: f64, value: f64 },
    #[error("non-finite value in component {component} at node {node}")]
    NonFinite { component: usize, node: usize },
    #[error("expected a {expected:?} state, got {got:?}")]
    WrongKind { expected: FieldKind, got: FieldKind },
}
