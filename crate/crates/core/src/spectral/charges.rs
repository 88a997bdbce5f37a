//! Charges, elliptic potentials and the stationary/dispersive splitting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{ChargePair, FftNd, FieldKind, FieldState, Grid3};
use super::SpectralError;
use crate::tensors::{DiagonalMaterial, MaterialRef};

/// Spectral divergence of two real vector fields given as six components.
pub(crate) fn divergence_pair(grid: &Grid3, fft: &FftNd, comps: [&[f64]; 6]) -> (Vec<f64>, Vec<f64>) {
    let partner = |k| grid.partner(k);
    let (s0, s1) = fft.forward_real_pair(comps[0], comps[1], partner);
    let (s2, s3) = fft.forward_real_pair(comps[2], comps[3], partner);
    let (s4, s5) = fft.forward_real_pair(comps[4], comps[5], partner);
    let spec = [s0, s1, s2, s3, s4, s5];
    let i = Complex64::new(0.0, 1.0);
    let mut de = vec![Complex64::default(); grid.len()];
    let mut dm = vec![Complex64::default(); grid.len()];
    for k in 0..grid.len() {
        let xi = grid.wavevector(k);
        de[k] = i * (xi[0] * spec[0][k] + xi[1] * spec[1][k] + xi[2] * spec[2][k]);
        dm[k] = i * (xi[0] * spec[3][k] + xi[1] * spec[4][k] + xi[2] * spec[5][k]);
    }
    fft.inverse_real_pair(&de, &dm)
}

fn apply_pointwise(m: &MaterialRef<'_>, u: &FieldState) -> [Vec<f64>; 6] {
    let n = u.grid.len();
    let mut out: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    for node in 0..n {
        let (e, h) = (m.eps_at(node), m.mu_at(node));
        for r in 0..3 {
            for c in 0..3 {
                out[r][node] += e[(r, c)] * u.comps[c][node];
                out[3 + r][node] += h[(r, c)] * u.comps[3 + c][node];
            }
        }
    }
    out
}

fn check_material_grid(m: &MaterialRef<'_>, grid: &Grid3) -> Result<(), SpectralError> {
    if let Some(g) = m.grid() {
        if g != grid.n {
            return Err(SpectralError::InvalidGrid(format!("material sampled on {g:?}, field on {:?}", grid.n)));
        }
    }
    Ok(())
}

/// `(∇·(εE), ∇·(μH))`, or `(∇·D, ∇·B)` for a (D,B) state.
pub fn divergence_charges<'a>(u: &FieldState, m: impl Into<MaterialRef<'a>>) -> Result<ChargePair, SpectralError> {
    let m = m.into();
    check_material_grid(&m, &u.grid)?;
    let fft = u.grid.fft();
    let (rho_e, rho_m) = match u.kind {
        FieldKind::DB => divergence_pair(&u.grid, &fft, std::array::from_fn(|c| u.comps[c].as_slice())),
        FieldKind::EH => {
            let db = apply_pointwise(&m, u);
            divergence_pair(&u.grid, &fft, std::array::from_fn(|c| db[c].as_slice()))
        }
    };
    Ok(ChargePair { grid: u.grid, rho_e, rho_m })
}

/// Potentials solving `∇·(ε∇Φ₁) = ρ_e`, `∇·(μ∇Φ₂) = ρ_m`.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    /// The stationary field `(∇Φ₁, ∇Φ₂)` as an (E,H) state.
    pub u_stat: FieldState,
    /// `‖∇·(ε∇Φ₁) − ρ_e‖ / ‖ρ_e‖` (zero when `ρ_e = 0`).
    pub residual_e: f64,
    pub residual_m: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the charge equations by Fourier inversion.
pub fn solve_charges(m: &DiagonalMaterial, rho: &ChargePair) -> Result<Potentials, SpectralError> {
    let grid = rho.grid;
    for (name, r) in [("rho_e", &rho.rho_e), ("rho_m", &rho.rho_m)] {
        let scale = r.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let mu = mean(r);
        if mu.abs() > 1e-12 * scale {
            return Err(SpectralError::NonZeroMean { which: name, mean: mu });
        }
    }
    let fft = grid.fft();
    let (se, sm) = fft.forward_real_pair(&rho.rho_e, &rho.rho_m, |k| grid.partner(k));
    let (eps, mu) = (m.eps(), m.mu());
    let n = grid.len();
    let mut p1 = vec![Complex64::default(); n];
    let mut p2 = vec![Complex64::default(); n];
    for k in 0..n {
        let xi = grid.wavevector(k);
        let qe: f64 = (0..3).map(|a| eps[a] * xi[a] * xi[a]).sum();
        let qm: f64 = (0..3).map(|a| mu[a] * xi[a] * xi[a]).sum();
        if qe > 0.0 {
            p1[k] = -se[k] / qe;
        }
        if qm > 0.0 {
            p2[k] = -sm[k] / qm;
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let grad: [Vec<Complex64>; 6] = std::array::from_fn(|c| {
        let (p, a) = if c < 3 { (&p1, c) } else { (&p2, c - 3) };
        (0..n).map(|k| i * grid.wavevector(k)[a] * p[k]).collect()
    });
    let u_stat = FieldState::from_spectrum(grid, FieldKind::EH, 0.0, &grad, &fft);
    let (phi1, phi2) = fft.inverse_real_pair(&p1, &p2);
    let check = divergence_charges(&u_stat, m)?;
    let rel = |got: &[f64], want: &[f64]| {
        let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
        let w = l2(want);
        if w == 0.0 {
            l2(&diff)
        } else {
            l2(&diff) / w
        }
    };
    Ok(Potentials {
        phi1,
        phi2,
        residual_e: rel(&check.rho_e, &rho.rho_e),
        residual_m: rel(&check.rho_m, &rho.rho_m),
        u_stat,
    })
}

/// Decomposition `u0 = u_stat + u_disp`.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub u_stat: FieldState,
    pub u_disp: FieldState,
    /// `‖u_stat‖_{L²} / ‖u0‖_{L²}`.
    pub stat_ratio: f64,
    /// Largest charge left in `u_disp`.
    pub disp_charge: f64,
}

/// Splits (E,H) data with charges `rho` into its stationary and dispersive parts.
pub fn split_stationary_dispersive(m: &DiagonalMaterial, u0: &FieldState, rho: &ChargePair) -> Result<Splitting, SpectralError> {
    let u0 = u0.convert(m, FieldKind::EH);
    let div = divergence_charges(&u0, m)?;
    let (_, hi) = m.extremes();
    let bound = 3.0 * u0.grid.max_wavenumber() * hi * u0.max_abs();
    let mismatch = div.max_abs_diff(rho);
    if mismatch > 1e-8 * (rho.max_abs() + bound) {
        return Err(SpectralError::InconsistentCharges { mismatch });
    }
    let pot = solve_charges(m, rho)?;
    let mut u_stat = pot.u_stat;
    u_stat.time = u0.time;
    let u_disp = u0.sub(&u_stat);
    let disp_charge = divergence_charges(&u_disp, m)?.max_abs();
    let norm0 = u0.l2_norm();
    Ok(Splitting {
        stat_ratio: if norm0 > 0.0 { u_stat.l2_norm() / norm0 } else { 0.0 },
        u_stat,
        u_disp,
        disp_charge,
    })
}

/// Report of [`split_stationary_dispersive`] suitable for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingSummary {
    pub stat_ratio: f64,
    pub disp_charge: f64,
}

impl From<&Splitting> for SplittingSummary {
    fn from(s: &Splitting) -> Self {
        Self {
            stat_ratio: s.stat_ratio,
            disp_charge: s.disp_charge,
        }
    }
}
