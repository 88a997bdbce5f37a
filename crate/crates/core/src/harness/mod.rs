//! Measurements built on the spectral solvers: dispersive decay exponents,
//! Strichartz ratios across dyadic frequencies and Grönwall energy bounds.

mod decay;
mod gronwall;
mod strichartz;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use decay::{decay_fit, linear_fit, DecayConfig, DecayData, DecayFitResult, LinearFit};
pub use gronwall::{gronwall_check, GronwallConfig, GronwallReport};
pub use strichartz::{
    derivative_loss, is_admissible, lp_time_norm, strichartz_ratio, strichartz_ratios_for, strichartz_sweep, Exponent, ExponentPair, StrichartzConfig,
    StrichartzProbe,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("insufficient decay window: [{t_min}, {t_max}] spans {decades:.3} decades of 1+t, at least one is required")]
    InsufficientWindow { t_min: f64, t_max: f64, decades: f64 },
    #[error("invalid exponent pair ({p}, {q}): both must be at least 2")]
    InvalidPair { p: f64, q: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
