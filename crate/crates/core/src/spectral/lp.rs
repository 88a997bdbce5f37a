//! Littlewood–Paley projectors.
//!
//! `S_0` multiplies by `χ(|ξ|)` and `S_λ` (λ = 2^k) by
//! `χ(|ξ|/(2λ)) − χ(|ξ|/λ)`, which is nonnegative, supported in
//! `λ ≤ |ξ| ≤ 4λ`, and equal to one at `|ξ| = 2λ`. The family telescopes to
//! the identity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FftNd, FieldState, Grid3};
use super::SpectralError;

fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Radially decreasing bump: 1 on [0, 1], 0 on [2, ∞), smooth in between.
pub fn chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = smooth_step(2.0 - r);
        let b = smooth_step(r - 1.0);
        a / (a + b)
    }
}

/// A Littlewood–Paley piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpBand {
    /// The low-frequency piece `S_0`.
    Low,
    /// `S_λ` with `λ = 2^k`.
    Dyadic(i32),
}

impl LpBand {
    /// The dyadic band for a frequency that must be an exact power of two.
    pub fn from_lambda(lam: f64) -> Result<Self, SpectralError> {
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(SpectralError::NotDyadic(lam));
        }
        let k = lam.log2().round();
        if (2f64.powi(k as i32) - lam).abs() > 1e-12 * lam {
            return Err(SpectralError::NotDyadic(lam));
        }
        Ok(LpBand::Dyadic(k as i32))
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            LpBand::Low => None,
            LpBand::Dyadic(k) => Some(2f64.powi(k)),
        }
    }

    pub fn multiplier(&self, r: f64) -> f64 {
        match *self {
            LpBand::Low => chi(r),
            LpBand::Dyadic(k) => {
                let lam = 2f64.powi(k);
                chi(r / (2.0 * lam)) - chi(r / lam)
            }
        }
    }

    /// Support of the multiplier in |ξ|.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            LpBand::Low => (0.0, 2.0),
            LpBand::Dyadic(k) => {
                let lam = 2f64.powi(k);
                (lam, 4.0 * lam)
            }
        }
    }

    /// Errors when no wavenumber below `k_max` lies in the open support.
    pub fn check_representable(&self, k_max: f64) -> Result<(), SpectralError> {
        let (lo, _) = self.support();
        if lo >= k_max {
            return Err(SpectralError::AnnulusOutsideNyquist { band: *self, k_max });
        }
        Ok(())
    }

    /// The bands `S_0, S_1, S_2, …` needed to resolve every wavenumber below `k_max`.
    pub fn partition(k_max: f64) -> Vec<LpBand> {
        let mut bands = vec![LpBand::Low];
        let mut k = 0;
        while 2f64.powi(k) < k_max {
            bands.push(LpBand::Dyadic(k));
            k += 1;
        }
        bands
    }
}

/// Whether a projection acts on spatial frequencies only or on space-time frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpMode {
    Spatial,
    Spacetime,
}

/// Multiplier values on every spatial mode of `grid`.
pub fn spatial_multiplier(grid: &Grid3, band: LpBand) -> Result<Vec<f64>, SpectralError> {
    band.check_representable(grid.max_wavenumber())?;
    Ok((0..grid.len()).map(|k| band.multiplier(grid.wavenumber(k))).collect())
}

fn apply_real(fft: &FftNd, f: &[f64], mult: &[f64]) -> Vec<f64> {
    let mut z: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.forward(&mut z);
    z.iter_mut().zip(mult).for_each(|(c, m)| *c *= m);
    fft.inverse(&mut z);
    z.iter().map(|c| c.re).collect()
}

fn apply_real_pair(fft: &FftNd, a: &[f64], b: &[f64], mult: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft.forward(&mut z);
    z.iter_mut().zip(mult).for_each(|(c, m)| *c *= m);
    fft.inverse(&mut z);
    (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
}

/// `S_band f` for a scalar grid function.
pub fn lp_project_scalar(grid: &Grid3, f: &[f64], band: LpBand) -> Result<Vec<f64>, SpectralError> {
    let mult = spatial_multiplier(grid, band)?;
    Ok(apply_real(&grid.fft(), f, &mult))
}

/// `S′_band u`, componentwise in the spatial variables.
pub fn lp_project(u: &FieldState, band: LpBand) -> Result<FieldState, SpectralError> {
    let mult = spatial_multiplier(&u.grid, band)?;
    let fft = u.grid.fft();
    let mut out = u.clone();
    for pair in 0..3 {
        let (a, b) = apply_real_pair(&fft, &u.comps[2 * pair], &u.comps[2 * pair + 1], &mult);
        out.comps[2 * pair] = a;
        out.comps[2 * pair + 1] = b;
    }
    Ok(out)
}

/// A field sampled at uniformly spaced times, treated as periodic in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: Grid3,
    pub dt: f64,
    /// `frames[j]` is the field at time `j·dt`.
    pub frames: Vec<FieldState>,
}

/// `S_band` with the multiplier evaluated at `|(τ, ξ′)|`.
pub fn lp_project_spacetime(u: &SpaceTimeField, band: LpBand) -> Result<SpaceTimeField, SpectralError> {
    let nt = u.frames.len();
    if nt == 0 {
        return Err(SpectralError::InvalidGrid("space-time field has no frames".into()));
    }
    let g = u.grid;
    let tau_max = std::f64::consts::PI / u.dt;
    band.check_representable((g.max_wavenumber().powi(2) + tau_max * tau_max).sqrt())?;
    let ns = g.len();
    let fft = FftNd::new(&[nt, g.n[0], g.n[1], g.n[2]]);
    let period = nt as f64 * u.dt;
    let mult: Vec<f64> = (0..nt * ns)
        .map(|k| {
            let (j, s) = (k / ns, k % ns);
            let j_signed = if j <= nt / 2 { j as f64 } else { j as f64 - nt as f64 };
            let tau = 2.0 * std::f64::consts::PI / period * j_signed;
            band.multiplier((tau * tau + g.wavenumber(s).powi(2)).sqrt())
        })
        .collect();
    let mut frames: Vec<FieldState> = u.frames.clone();
    for pair in 0..3 {
        let a: Vec<f64> = u.frames.iter().flat_map(|f| f.comps[2 * pair].iter().copied()).collect();
        let b: Vec<f64> = u.frames.iter().flat_map(|f| f.comps[2 * pair + 1].iter().copied()).collect();
        let (pa, pb) = apply_real_pair(&fft, &a, &b, &mult);
        for (j, frame) in frames.iter_mut().enumerate() {
            frame.comps[2 * pair].copy_from_slice(&pa[j * ns..(j + 1) * ns]);
            frame.comps[2 * pair + 1].copy_from_slice(&pb[j * ns..(j + 1) * ns]);
        }
    }
    Ok(SpaceTimeField { grid: g, dt: u.dt, frames })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.3), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = chi(1.0 + k as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn dyadic_multiplier_is_one_at_two_lambda() {
        for k in -2..6 {
            let b = LpBand::Dyadic(k);
            let lam = b.lambda().unwrap();
            assert_eq!(b.multiplier(2.0 * lam), 1.0);
            assert_eq!(b.multiplier(4.0 * lam), 0.0);
            assert_eq!(b.multiplier(0.99 * lam), 0.0);
        }
    }

    #[test]
    fn lambda_must_be_power_of_two() {
        assert_eq!(LpBand::from_lambda(8.0).unwrap(), LpBand::Dyadic(3));
        assert_eq!(LpBand::from_lambda(0.25).unwrap(), LpBand::Dyadic(-2));
        assert!(LpBand::from_lambda(3.0).is_err());
    }
}
