use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::spectral::data::{annulus_data, rng_from_seed, Weighting};
use crate::spectral::{FieldKind, FieldState, Grid3, GridSpec, LpBand, ModalPropagator, Spectrum, SpectralError};
use crate::tensors::DiagonalMaterial;

/// Initial data for a decay measurement. Both kinds are `S′_λ`-localized
/// around the box centre and `L¹`-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecayData {
    /// Charge-free data with the given angular weighting.
    ChargeFree { weighting: Weighting },
    /// The stationary field of a localized electric charge.
    Stationary,
}

impl DecayData {
    /// Charge-free data weighted towards the optic axes (uniform for
    /// materials without them).
    pub fn standard() -> Self {
        DecayData::ChargeFree {
            weighting: Weighting::OpticAxis { width: 0.3 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub grid: Grid3,
    pub band: LpBand,
    pub t_min: f64,
    /// End of the fit window; the wraparound limit when `None`.
    pub t_max: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl DecayConfig {
    /// The 128³ box of side 100 used for the reference measurements.
    pub fn standard() -> Self {
        Self {
            grid: Grid3::cube(128, 100.0).expect("valid grid"),
            band: LpBand::Dyadic(0),
            t_min: 2.0,
            t_max: None,
            samples: 39,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
}

/// Ordinary least-squares line through `(x, y)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    LinearFit {
        slope,
        intercept,
        residual: (ssr / n).sqrt(),
        slope_se: (ssr / dof / sxx).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitResult {
    pub times: Vec<f64>,
    /// `‖S′_λ u(t)‖_{L^∞}` at each time.
    pub sup_norms: Vec<f64>,
    /// Minus the slope of `log ‖·‖_∞` against `log(1 + t)`.
    pub exponent: f64,
    /// Approximate 95% confidence interval of the exponent.
    pub ci: [f64; 2],
    pub fit_residual: f64,
    pub window: [f64; 2],
    pub active_modes: usize,
}

fn stationary_data(m: &DiagonalMaterial, grid: Grid3, band: LpBand) -> Result<FieldState, SpectralError> {
    band.check_representable(grid.max_wavenumber())?;
    let center = [0, 1, 2].map(|a| 0.5 * grid.lengths[a]);
    let eps = m.eps();
    let i = Complex64::new(0.0, 1.0);
    let mut spec: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); grid.len()]);
    for k in 0..grid.len() {
        let mult = band.multiplier(grid.wavenumber(k));
        let xi = grid.wavevector(k);
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if mult == 0.0 || r != grid.wavenumber(k) {
            continue;
        }
        let rho = Complex64::from_polar(mult, -(0..3).map(|a| xi[a] * center[a]).sum::<f64>());
        let q: f64 = (0..3).map(|a| eps[a] * xi[a] * xi[a]).sum();
        let phi = -rho / q;
        for a in 0..3 {
            spec[a][k] = i * xi[a] * phi;
        }
    }
    let u = FieldState::from_spectrum(grid, FieldKind::EH, 0.0, &spec, &grid.fft());
    let l1 = u.l1_norm();
    Ok(u.scaled(1.0 / l1))
}

/// Pointwise `|u(x)|²` accumulated over the six components of a spectrum.
pub(crate) fn pointwise_sq(grid: &Grid3, fft: &crate::spectral::FftNd, spec: &Spectrum) -> Vec<f64> {
    let mut acc = vec![0.0; grid.len()];
    for pair in 0..3 {
        let (a, b) = fft.inverse_real_pair(&spec[2 * pair], &spec[2 * pair + 1]);
        for n in 0..acc.len() {
            acc[n] += a[n] * a[n] + b[n] * b[n];
        }
    }
    acc
}

/// Fits the decay exponent of `‖S′_λ u(t)‖_∞` for exact constant-coefficient evolution.
pub fn decay_fit(m: &DiagonalMaterial, data: &DecayData, cfg: &DecayConfig) -> Result<DecayFitResult, HarnessError> {
    let grid = cfg.grid;
    let v_max = m.max_speed();
    let limit = GridSpec::wraparound_time(&grid, v_max);
    let t_max = cfg.t_max.unwrap_or(limit);
    if t_max > limit * (1.0 + 1e-12) {
        return Err(SpectralError::Wraparound { t: t_max, limit }.into());
    }
    if !(cfg.t_min >= 0.0) || cfg.samples < 3 {
        return Err(HarnessError::InvalidConfig(format!("t_min = {}, samples = {}", cfg.t_min, cfg.samples)));
    }
    let decades = ((1.0 + t_max) / (1.0 + cfg.t_min)).log10();
    if !(decades >= 1.0) {
        return Err(HarnessError::InsufficientWindow {
            t_min: cfg.t_min,
            t_max,
            decades,
        });
    }
    let u0 = match data {
        DecayData::ChargeFree { weighting } => annulus_data(m, grid, cfg.band, weighting, &mut rng_from_seed(cfg.seed))?,
        DecayData::Stationary => stationary_data(m, grid, cfg.band)?,
    };
    let fft = grid.fft();
    let mut spec = u0.spectrum(&fft);
    let mult: Vec<f64> = (0..grid.len()).map(|k| cfg.band.multiplier(grid.wavenumber(k))).collect();
    for c in spec.iter_mut() {
        c.iter_mut().zip(&mult).for_each(|(z, w)| *z *= w);
    }
    drop(u0);
    let prop = ModalPropagator::new(m, grid, &spec);
    let times: Vec<f64> = (0..cfg.samples)
        .map(|j| cfg.t_min + (t_max - cfg.t_min) * j as f64 / (cfg.samples - 1) as f64)
        .collect();
    let mut sup_norms = Vec::with_capacity(times.len());
    for &t in &times {
        prop.evolve_into(t, &mut spec);
        let sq = pointwise_sq(&grid, &fft, &spec);
        sup_norms.push(sq.iter().fold(0.0_f64, |a, &b| a.max(b)).sqrt());
    }
    let lx: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let ly: Vec<f64> = sup_norms.iter().map(|s| s.ln()).collect();
    let fit = linear_fit(&lx, &ly);
    let exponent = -fit.slope;
    Ok(DecayFitResult {
        times,
        sup_norms,
        exponent,
        ci: [exponent - 1.96 * fit.slope_se, exponent + 1.96 * fit.slope_se],
        fit_residual: fit.residual,
        window: [cfg.t_min, t_max],
        active_modes: prop.active_modes(),
    })
}
