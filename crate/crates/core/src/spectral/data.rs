//! Initial-data presets.
//!
//! Every preset is real, and every one except the gradient-charge preset is
//! charge-free: both `∇·D` and `∇·B` vanish mode by mode.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::charges::solve_charges;
use super::grid::{ChargePair, FieldKind, FieldState, Grid3, Spectrum};
use super::lp::LpBand;
use super::modes::mode_eigensystem;
use super::SpectralError;
use crate::fresnel::singular_points;
use crate::tensors::DiagonalMaterial;

/// Angular weighting of the spectrum of frequency-localized data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    /// `Σ_axes exp(−(θ/width)²)` with θ the angle between `ξ′` and an optic
    /// axis; uniform for materials without optic axes.
    OpticAxis { width: f64 },
}

/// Named initial-data recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum Preset {
    /// Real part of an eigenmode on the integer mode `mode`.
    Planewave { mode: [i64; 3], branch: usize },
    /// Transverse part of a modulated Gaussian `D`.
    GaussianPacket {
        center: [f64; 3],
        width: f64,
        k0: [f64; 3],
        polarization: [f64; 3],
    },
    /// Point-source-like data with spectrum in the annulus of `S′_λ`.
    LpAnnulus { lambda: f64, weighting: Weighting },
    /// The stationary field of a Gaussian electric charge.
    GradientCharge { center: [f64; 3], width: f64 },
    /// Random band-limited data with `|ξ′| ≤ k_cut`.
    Random { k_cut: f64 },
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c3(rng: &mut impl Rng) -> [Complex64; 3] {
    std::array::from_fn(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn transverse(xi: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let n2: f64 = xi.iter().map(|x| x * x).sum();
    if n2 == 0.0 {
        return [Complex64::default(); 3];
    }
    let dot: Complex64 = (0..3).map(|a| v[a] * xi[a]).sum();
    std::array::from_fn(|a| v[a] - dot * xi[a] / n2)
}

fn empty_spectrum(n: usize) -> Spectrum {
    std::array::from_fn(|_| vec![Complex64::default(); n])
}

/// Sets mode `k` from transverse (D̂, B̂) and its partner by conjugation.
fn set_mode(spec: &mut Spectrum, grid: &Grid3, m: &DiagonalMaterial, k: usize, d: [Complex64; 3], b: [Complex64; 3]) {
    let (eps, mu) = (m.eps(), m.mu());
    let p = grid.partner(k);
    for a in 0..3 {
        let e = d[a] / eps[a];
        let h = b[a] / mu[a];
        spec[a][k] = e;
        spec[3 + a][k] = h;
        spec[a][p] = e.conj();
        spec[3 + a][p] = h.conj();
    }
    if p == k {
        for c in spec.iter_mut() {
            c[k] = Complex64::new(c[k].re, 0.0);
        }
    }
}

fn realize(grid: Grid3, spec: &Spectrum) -> FieldState {
    FieldState::from_spectrum(grid, FieldKind::EH, 0.0, spec, &grid.fft())
}

/// Random charge-free (E,H) data on the modes with `0 < |ξ′| ≤ k_cut`.
pub fn random_charge_free(m: &DiagonalMaterial, grid: Grid3, k_cut: f64, rng: &mut impl Rng) -> FieldState {
    let mut spec = empty_spectrum(grid.len());
    for k in 0..grid.len() {
        let p = grid.partner(k);
        if p < k {
            continue;
        }
        let xi = grid.wavevector(k);
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d = gaussian_c3(rng);
        let b = gaussian_c3(rng);
        if r == 0.0 || r > k_cut || r != grid.wavenumber(k) {
            continue;
        }
        set_mode(&mut spec, &grid, m, k, transverse(xi, d), transverse(xi, b));
    }
    realize(grid, &spec)
}

/// Unit optic-axis directions (one per ± pair) of a fully anisotropic material.
pub fn optic_axes(m: &DiagonalMaterial) -> Vec<[f64; 3]> {
    match singular_points(m) {
        Ok(set) => {
            let mut axes: Vec<[f64; 3]> = Vec::new();
            for p in set.original {
                let v = Vector3::from(p).normalize();
                if axes.iter().all(|a| Vector3::from(*a).dot(&v).abs() < 1.0 - 1e-9) {
                    axes.push(v.into());
                }
            }
            axes
        }
        Err(_) => Vec::new(),
    }
}

/// Weight of direction `xi` (any length) under `w`.
pub fn direction_weight(w: &Weighting, axes: &[[f64; 3]], xi: [f64; 3]) -> f64 {
    match *w {
        Weighting::Uniform => 1.0,
        Weighting::OpticAxis { .. } if axes.is_empty() => 1.0,
        Weighting::OpticAxis { width } => {
            let v = Vector3::from(xi).normalize();
            axes.iter()
                .map(|a| {
                    let c = Vector3::from(*a).dot(&v).abs().min(1.0);
                    let theta = c.acos();
                    (-(theta / width).powi(2)).exp()
                })
                .sum()
        }
    }
}

/// Charge-free data `S′_λ`-localized around the box centre, normalized to unit
/// `L¹` norm. Polarizations are random per data set, not per mode, so the
/// field concentrates near the centre at `t = 0`.
pub fn annulus_data(m: &DiagonalMaterial, grid: Grid3, band: LpBand, weighting: &Weighting, rng: &mut impl Rng) -> Result<FieldState, SpectralError> {
    band.check_representable(grid.max_wavenumber())?;
    let center = [0, 1, 2].map(|a| 0.5 * grid.lengths[a]);
    let pol_d: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let pol_b: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let axes = optic_axes(m);
    let mut spec = empty_spectrum(grid.len());
    for k in 0..grid.len() {
        let p = grid.partner(k);
        if p < k {
            continue;
        }
        let r = grid.wavenumber(k);
        let mult = band.multiplier(r);
        if mult == 0.0 {
            continue;
        }
        let xi = grid.wavevector(k);
        if xi.iter().map(|x| x * x).sum::<f64>().sqrt() != r {
            continue;
        }
        let amp = mult * direction_weight(weighting, &axes, xi);
        let phase = Complex64::from_polar(amp, -(0..3).map(|a| xi[a] * center[a]).sum::<f64>());
        let d = transverse(xi, pol_d.map(|x| phase * x));
        let b = transverse(xi, pol_b.map(|x| phase * x));
        set_mode(&mut spec, &grid, m, k, d, b);
    }
    let u = realize(grid, &spec);
    let l1 = u.l1_norm();
    Ok(if l1 > 0.0 { u.scaled(1.0 / l1) } else { u })
}

/// Builds the (E,H) state for a preset.
pub fn build_preset(m: &DiagonalMaterial, grid: Grid3, preset: &Preset, seed: u64) -> Result<FieldState, SpectralError> {
    let mut rng = rng_from_seed(seed);
    match preset {
        Preset::Random { k_cut } => Ok(random_charge_free(m, grid, *k_cut, &mut rng)),
        Preset::LpAnnulus { lambda, weighting } => annulus_data(m, grid, LpBand::from_lambda(*lambda)?, weighting, &mut rng),
        Preset::Planewave { mode, branch } => {
            let idx = [0, 1, 2].map(|a| mode[a].rem_euclid(grid.n[a] as i64) as usize);
            let k = grid.flat(idx);
            let xi = grid.wavevector(k);
            let sys = mode_eigensystem(m, xi)?;
            if *branch >= 6 {
                return Err(SpectralError::InvalidGrid(format!("branch {branch} out of range")));
            }
            let w = sys.vectors.column(*branch).into_owned();
            Ok(FieldState::from_fn(grid, FieldKind::EH, |x| {
                let c = (0..3).map(|a| xi[a] * x[a]).sum::<f64>().cos();
                std::array::from_fn(|r| w[r] * c)
            }))
        }
        Preset::GaussianPacket {
            center,
            width,
            k0,
            polarization,
        } => {
            let d = FieldState::from_fn(grid, FieldKind::DB, |x| {
                let r2: f64 = (0..3).map(|a| periodic_offset(x[a] - center[a], grid.lengths[a]).powi(2)).sum();
                let env = (-r2 / (2.0 * width * width)).exp() * (0..3).map(|a| k0[a] * (x[a] - center[a])).sum::<f64>().cos();
                [polarization[0] * env, polarization[1] * env, polarization[2] * env, 0.0, 0.0, 0.0]
            });
            let fft = grid.fft();
            let s = d.spectrum(&fft);
            let mut spec = empty_spectrum(grid.len());
            for k in 0..grid.len() {
                let p = grid.partner(k);
                if p < k {
                    continue;
                }
                let xi = grid.wavevector(k);
                let dv = transverse(xi, [s[0][k], s[1][k], s[2][k]]);
                set_mode(&mut spec, &grid, m, k, dv, [Complex64::default(); 3]);
            }
            Ok(realize(grid, &spec))
        }
        Preset::GradientCharge { center, width } => {
            let rho_e: Vec<f64> = (0..grid.len())
                .map(|k| {
                    let x = grid.coords(k);
                    let r2: f64 = (0..3).map(|a| periodic_offset(x[a] - center[a], grid.lengths[a]).powi(2)).sum();
                    (-r2 / (2.0 * width * width)).exp()
                })
                .collect();
            let mean = rho_e.iter().sum::<f64>() / rho_e.len() as f64;
            let rho = ChargePair {
                grid,
                rho_e: rho_e.iter().map(|r| r - mean).collect(),
                rho_m: vec![0.0; grid.len()],
            };
            Ok(solve_charges(m, &rho)?.u_stat)
        }
    }
}

fn periodic_offset(d: f64, l: f64) -> f64 {
    d - l * (d / l).round()
}
