//! Fourth-order Runge–Kutta evolution for variable and time-dependent media.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FftNd, FieldKind, FieldState, Grid3, DEFAULT_C_CFL};
use super::SpectralError;
use crate::tensors::{Band, MaterialField};

/// Scalar time modulation `1 + amplitude · sin(ω t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub amplitude: f64,
    pub omega: f64,
}

impl Modulation {
    pub const NONE: Modulation = Modulation { amplitude: 0.0, omega: 0.0 };

    pub fn factor(&self, t: f64) -> f64 {
        1.0 + self.amplitude * (self.omega * t).sin()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.amplitude * self.omega * (self.omega * t).cos()
    }

    /// Smallest value of the factor over all times.
    pub fn min_factor(&self) -> f64 {
        if self.omega == 0.0 {
            1.0
        } else {
            1.0 - self.amplitude.abs()
        }
    }

    pub fn max_factor(&self) -> f64 {
        if self.omega == 0.0 {
            1.0
        } else {
            1.0 + self.amplitude.abs()
        }
    }
}

/// A material that may vary in space and, through scalar modulations, in time:
/// `ε(x, t) = s_ε(t) ε(x)`, `μ(x, t) = s_μ(t) μ(x)`.
#[derive(Debug, Clone)]
pub struct Medium {
    pub base: MaterialField,
    pub eps_mod: Modulation,
    pub mu_mod: Modulation,
    eps_inv: Vec<Matrix3<f64>>,
    mu_inv: Vec<Matrix3<f64>>,
    eps_range: (f64, f64),
    mu_range: (f64, f64),
}

fn eig_range(v: &[Matrix3<f64>]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
        let e = SymmetricEigen::new(*a).eigenvalues;
        (lo.min(e.min()), hi.max(e.max()))
    })
}

impl Medium {
    pub fn new(base: MaterialField, eps_mod: Modulation, mu_mod: Modulation) -> Result<Self, SpectralError> {
        let eps_range = eig_range(&base.eps);
        let mu_range = eig_range(&base.mu);
        if !(eps_range.0 > 0.0 && mu_range.0 > 0.0) {
            return Err(SpectralError::Ellipticity {
                time: 0.0,
                value: eps_range.0.min(mu_range.0),
            });
        }
        let inv = |v: &[Matrix3<f64>]| -> Vec<Matrix3<f64>> { v.iter().map(|a| a.try_inverse().expect("positive definite")).collect() };
        Ok(Self {
            eps_inv: inv(&base.eps),
            mu_inv: inv(&base.mu),
            base,
            eps_mod,
            mu_mod,
            eps_range,
            mu_range,
        })
    }

    pub fn fixed(base: MaterialField) -> Result<Self, SpectralError> {
        Self::new(base, Modulation::NONE, Modulation::NONE)
    }

    pub fn band(&self) -> Band {
        self.base.band
    }

    /// Extreme eigenvalues of ε(t) and μ(t) taken together.
    pub fn eigen_range_at(&self, t: f64) -> (f64, f64) {
        let (se, sm) = (self.eps_mod.factor(t), self.mu_mod.factor(t));
        (
            (self.eps_range.0 * se).min(self.mu_range.0 * sm),
            (self.eps_range.1 * se).max(self.mu_range.1 * sm),
        )
    }

    /// Ellipticity constants (λ, Λ) valid for all times.
    pub fn uniform_bounds(&self) -> (f64, f64) {
        (
            (self.eps_range.0 * self.eps_mod.min_factor()).min(self.mu_range.0 * self.mu_mod.min_factor()),
            (self.eps_range.1 * self.eps_mod.max_factor()).max(self.mu_range.1 * self.mu_mod.max_factor()),
        )
    }

    /// Speed bound `1/√(min ε · min μ)` over all times.
    pub fn max_speed(&self) -> f64 {
        1.0 / (self.eps_range.0 * self.eps_mod.min_factor() * self.mu_range.0 * self.mu_mod.min_factor()).sqrt()
    }

    /// `‖∂_t(ε, μ)‖_{L^∞_x}` at time `t`, with the operator norm pointwise.
    pub fn time_derivative_norm(&self, t: f64) -> f64 {
        (self.eps_range.1 * self.eps_mod.derivative(t).abs()).max(self.mu_range.1 * self.mu_mod.derivative(t).abs())
    }

    pub(crate) fn check_ellipticity(&self, t: f64) -> Result<(), SpectralError> {
        let (lo, hi) = self.eigen_range_at(t);
        let band = self.band();
        if !band.contains(lo) {
            return Err(SpectralError::Ellipticity { time: t, value: lo });
        }
        if !band.contains(hi) {
            return Err(SpectralError::Ellipticity { time: t, value: hi });
        }
        Ok(())
    }
}

/// Options for [`propagate_variable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub c_cfl: f64,
    /// Keep every `snapshot_every`-th state (the final state is always kept).
    pub snapshot_every: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            c_cfl: DEFAULT_C_CFL,
            snapshot_every: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FieldState>,
    pub steps: usize,
    pub dt: f64,
}

struct Stepper<'a> {
    medium: &'a Medium,
    grid: Grid3,
    fft: FftNd,
    xi: Vec<[f64; 3]>,
}

impl Stepper<'_> {
    /// `(∇×H, −∇×E)` evaluated from (D, B) at time `t`.
    fn rhs(&self, t: f64, db: &[Vec<f64>; 6]) -> [Vec<f64>; 6] {
        let n = self.grid.len();
        let (se, sm) = (self.medium.eps_mod.factor(t), self.medium.mu_mod.factor(t));
        let mut eh: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
        for node in 0..n {
            let (ei, mi) = (&self.medium.eps_inv[node], &self.medium.mu_inv[node]);
            for r in 0..3 {
                let (mut e, mut h) = (0.0, 0.0);
                for c in 0..3 {
                    e += ei[(r, c)] * db[c][node];
                    h += mi[(r, c)] * db[3 + c][node];
                }
                eh[r][node] = e / se;
                eh[3 + r][node] = h / sm;
            }
        }
        let partner = |k| self.grid.partner(k);
        let (s0, s1) = self.fft.forward_real_pair(&eh[0], &eh[1], partner);
        let (s2, s3) = self.fft.forward_real_pair(&eh[2], &eh[3], partner);
        let (s4, s5) = self.fft.forward_real_pair(&eh[4], &eh[5], partner);
        let s = [s0, s1, s2, s3, s4, s5];
        let i = Complex64::new(0.0, 1.0);
        let mut out: [Vec<Complex64>; 6] = std::array::from_fn(|_| vec![Complex64::default(); n]);
        for k in 0..n {
            let x = self.xi[k];
            let curl = |off: usize| {
                [
                    i * (x[1] * s[off + 2][k] - x[2] * s[off + 1][k]),
                    i * (x[2] * s[off][k] - x[0] * s[off + 2][k]),
                    i * (x[0] * s[off + 1][k] - x[1] * s[off][k]),
                ]
            };
            let ch = curl(3);
            let ce = curl(0);
            for r in 0..3 {
                out[r][k] = ch[r];
                out[3 + r][k] = -ce[r];
            }
        }
        let (r0, r1) = self.fft.inverse_real_pair(&out[0], &out[1]);
        let (r2, r3) = self.fft.inverse_real_pair(&out[2], &out[3]);
        let (r4, r5) = self.fft.inverse_real_pair(&out[4], &out[5]);
        [r0, r1, r2, r3, r4, r5]
    }
}

fn axpy(y: &[Vec<f64>; 6], a: f64, x: &[Vec<f64>; 6]) -> [Vec<f64>; 6] {
    std::array::from_fn(|c| y[c].iter().zip(&x[c]).map(|(p, q)| p + a * q).collect())
}

/// Evolves (D,B) data from `u0.time` to `t_end` with steps no larger than `dt`.
pub fn propagate_variable(medium: &Medium, u0: &FieldState, t_end: f64, dt: f64, opts: &StepOptions) -> Result<Trajectory, SpectralError> {
    u0.expect_kind(FieldKind::DB)?;
    u0.check_finite()?;
    if medium.base.grid != u0.grid.n {
        return Err(SpectralError::InvalidGrid(format!("medium sampled on {:?}, field on {:?}", medium.base.grid, u0.grid.n)));
    }
    let span = t_end - u0.time;
    if !(dt > 0.0) || !(span >= 0.0) || !span.is_finite() {
        return Err(SpectralError::InvalidGrid(format!("dt = {dt}, span = {span}")));
    }
    let steps = ((span / dt) * (1.0 - 1e-12)).ceil().max(if span > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };
    let limit = opts.c_cfl * u0.grid.min_spacing() / medium.max_speed();
    if h > limit * (1.0 + 1e-12) {
        return Err(SpectralError::Cfl { dt: h, limit });
    }
    let grid = u0.grid;
    let stepper = Stepper {
        medium,
        grid,
        fft: grid.fft(),
        xi: (0..grid.len()).map(|k| grid.wavevector(k)).collect(),
    };
    medium.check_ellipticity(u0.time)?;
    let mut y = u0.comps.clone();
    let mut t = u0.time;
    let mut times = vec![t];
    let mut states = vec![u0.clone()];
    let every = opts.snapshot_every.max(1);
    for step in 1..=steps {
        medium.check_ellipticity(t + 0.5 * h)?;
        medium.check_ellipticity(t + h)?;
        let k1 = stepper.rhs(t, &y);
        let k2 = stepper.rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = stepper.rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = stepper.rhs(t + h, &axpy(&y, h, &k3));
        for c in 0..6 {
            for node in 0..grid.len() {
                y[c][node] += h / 6.0 * (k1[c][node] + 2.0 * k2[c][node] + 2.0 * k3[c][node] + k4[c][node]);
            }
        }
        t = u0.time + step as f64 * h;
        if step % every == 0 || step == steps {
            times.push(t);
            states.push(FieldState {
                grid,
                kind: FieldKind::DB,
                time: t,
                comps: y.clone(),
            });
        }
    }
    Ok(Trajectory { times, states, steps, dt: h })
}

/// Energy `⟨D, ε(t)^{-1}D⟩ + ⟨B, μ(t)^{-1}B⟩` of a (D,B) state.
pub fn medium_energy(medium: &Medium, u: &FieldState) -> f64 {
    let (se, sm) = (medium.eps_mod.factor(u.time), medium.mu_mod.factor(u.time));
    let mut sum = 0.0;
    for node in 0..u.grid.len() {
        let (ei, mi) = (&medium.eps_inv[node], &medium.mu_inv[node]);
        for r in 0..3 {
            for c in 0..3 {
                sum += u.comps[r][node] * ei[(r, c)] * u.comps[c][node] / se;
                sum += u.comps[3 + r][node] * mi[(r, c)] * u.comps[3 + c][node] / sm;
            }
        }
    }
    sum * u.grid.cell_volume()
}
