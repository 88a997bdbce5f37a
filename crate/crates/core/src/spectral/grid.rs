//! Periodic grids, multidimensional FFTs and grid-valued fields.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::tensors::DiagonalMaterial;

/// Default Courant number for explicit time stepping.
pub const DEFAULT_C_CFL: f64 = 0.4;

/// Fraction of the box a front may cross before wraparound is considered to
/// contaminate measurements.
pub const WRAPAROUND_FRACTION: f64 = 0.4;

/// A periodic box `[0, L_1) × [0, L_2) × [0, L_3)` with `N_i` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub n: [usize; 3],
    pub lengths: [f64; 3],
}

impl Grid3 {
    pub fn new(n: [usize; 3], lengths: [f64; 3]) -> Result<Self, SpectralError> {
        for (axis, &k) in n.iter().enumerate() {
            if k < 2 || !k.is_power_of_two() {
                return Err(SpectralError::NotPowerOfTwo { axis, n: k });
            }
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(SpectralError::InvalidGrid(format!("box lengths must be positive, got {lengths:?}")));
        }
        Ok(Self { n, lengths })
    }

    pub fn cube(n: usize, length: f64) -> Result<Self, SpectralError> {
        Self::new([n; 3], [length; 3])
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        (0..3).map(|a| self.lengths[a] / self.n[a] as f64).product()
    }

    pub fn min_spacing(&self) -> f64 {
        (0..3).map(|a| self.lengths[a] / self.n[a] as f64).fold(f64::INFINITY, f64::min)
    }

    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.n[1] + idx[1]) * self.n[2] + idx[2]
    }

    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let [_, n1, n2] = self.n;
        [flat / (n1 * n2), (flat / n2) % n1, flat % n2]
    }

    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflat(flat);
        [0, 1, 2].map(|a| idx[a] as f64 * self.lengths[a] / self.n[a] as f64)
    }

    /// Flat index of the mode with negated wavevector.
    pub fn partner(&self, flat: usize) -> usize {
        let idx = self.unflat(flat);
        self.flat([0, 1, 2].map(|a| (self.n[a] - idx[a]) % self.n[a]))
    }

    fn signed(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.n[axis] / 2
    }

    /// Wavevector used by odd (derivative) operators: the Nyquist component
    /// of each axis is set to zero so that real fields stay real.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflat(flat);
        [0, 1, 2].map(|a| {
            if self.is_nyquist(a, idx[a]) {
                0.0
            } else {
                2.0 * PI / self.lengths[a] * self.signed(a, idx[a]) as f64
            }
        })
    }

    /// Euclidean norm of the wavevector including Nyquist components, used
    /// by even (radial) multipliers.
    pub fn wavenumber(&self, flat: usize) -> f64 {
        let idx = self.unflat(flat);
        (0..3)
            .map(|a| {
                let k = 2.0 * PI / self.lengths[a] * self.signed(a, idx[a]).abs() as f64;
                k * k
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Largest |ξ′| present on the grid.
    pub fn max_wavenumber(&self) -> f64 {
        (0..3)
            .map(|a| {
                let k = PI * self.n[a] as f64 / self.lengths[a];
                k * k
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Largest radius of a ball of wavevectors fully resolved on the grid.
    pub fn nyquist_radius(&self) -> f64 {
        (0..3).map(|a| PI * self.n[a] as f64 / self.lengths[a]).fold(f64::INFINITY, f64::min)
    }

    pub fn fft(&self) -> FftNd {
        FftNd::new(&self.n)
    }
}

/// Space-time discretization for an evolution run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub grid: Grid3,
    pub dt: f64,
    pub t_final: f64,
}

impl GridSpec {
    pub fn new(grid: Grid3, dt: f64, t_final: f64) -> Result<Self, SpectralError> {
        if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(SpectralError::InvalidGrid(format!("dt = {dt}, T = {t_final}")));
        }
        Ok(Self { grid, dt, t_final })
    }

    /// Largest stable step for waves of speed at most `v_max`.
    pub fn cfl_limit(grid: &Grid3, v_max: f64, c_cfl: f64) -> f64 {
        c_cfl * grid.min_spacing() / v_max
    }

    pub fn check_cfl(&self, v_max: f64, c_cfl: f64) -> Result<(), SpectralError> {
        let limit = Self::cfl_limit(&self.grid, v_max, c_cfl);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(SpectralError::Cfl { dt: self.dt, limit });
        }
        Ok(())
    }

    /// Latest time before a front leaving the origin can wrap around the box.
    pub fn wraparound_time(grid: &Grid3, v_max: f64) -> f64 {
        WRAPAROUND_FRACTION * grid.lengths.iter().cloned().fold(f64::INFINITY, f64::min) / v_max
    }

    pub fn check_wraparound(&self, v_max: f64) -> Result<(), SpectralError> {
        let limit = Self::wraparound_time(&self.grid, v_max);
        if self.t_final > limit * (1.0 + 1e-12) {
            return Err(SpectralError::Wraparound { t: self.t_final, limit });
        }
        Ok(())
    }
}

/// In-place complex FFT over a row-major array of arbitrary dimension.
#[derive(Clone)]
pub struct FftNd {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dims", &self.dims).finish()
    }
}

impl FftNd {
    pub fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dims: dims.to_vec(),
            forward: dims.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: dims.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform `Σ_x u(x) e^{−ik·x}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len(), "FFT buffer length does not match grid");
        let d = self.dims.len();
        let mut block = Vec::new();
        for axis in 0..d {
            let n = self.dims[axis];
            if n == 1 {
                continue;
            }
            let plan = &plans[axis];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            let stride: usize = self.dims[axis + 1..].iter().product();
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let chunk = n * stride;
            block.resize(chunk, Complex64::default());
            for outer in data.chunks_mut(chunk) {
                for k in 0..n {
                    for s in 0..stride {
                        block[s * n + k] = outer[k * stride + s];
                    }
                }
                plan.process_with_scratch(&mut block, &mut scratch);
                for k in 0..n {
                    for s in 0..stride {
                        outer[k * stride + s] = block[s * n + k];
                    }
                }
            }
        }
    }

    /// Transforms two real arrays with one complex FFT.
    pub fn forward_real_pair(&self, a: &[f64], b: &[f64], partner: impl Fn(usize) -> usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward(&mut z);
        let mut fa = vec![Complex64::default(); z.len()];
        let mut fb = vec![Complex64::default(); z.len()];
        for k in 0..z.len() {
            let zc = z[partner(k)].conj();
            fa[k] = 0.5 * (z[k] + zc);
            fb[k] = Complex64::new(0.0, -0.5) * (z[k] - zc);
        }
        (fa, fb)
    }

    /// Inverse of two Hermitian spectra with one complex FFT.
    pub fn inverse_real_pair(&self, fa: &[Complex64], fb: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut z: Vec<Complex64> = fa.iter().zip(fb).map(|(&x, &y)| x + i * y).collect();
        self.inverse(&mut z);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    pub fn forward_real(&self, a: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut z);
        z
    }

    pub fn inverse_real(&self, fa: &[Complex64]) -> Vec<f64> {
        let mut z = fa.to_vec();
        self.inverse(&mut z);
        z.iter().map(|c| c.re).collect()
    }
}

/// Which pair of variables a [`FieldState`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// Components (E1, E2, E3, H1, H2, H3).
    EH,
    /// Components (D1, D2, D3, B1, B2, B3).
    DB,
}

/// Six real scalar fields on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid3,
    pub kind: FieldKind,
    pub time: f64,
    pub comps: [Vec<f64>; 6],
}

/// The six component spectra of a [`FieldState`].
pub type Spectrum = [Vec<Complex64>; 6];

impl FieldState {
    pub fn zeros(grid: Grid3, kind: FieldKind) -> Self {
        let n = grid.len();
        Self {
            grid,
            kind,
            time: 0.0,
            comps: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn from_fn(grid: Grid3, kind: FieldKind, f: impl Fn([f64; 3]) -> [f64; 6]) -> Self {
        let mut u = Self::zeros(grid, kind);
        for node in 0..grid.len() {
            let v = f(grid.coords(node));
            for c in 0..6 {
                u.comps[c][node] = v[c];
            }
        }
        u
    }

    pub fn check_finite(&self) -> Result<(), SpectralError> {
        for (c, comp) in self.comps.iter().enumerate() {
            if let Some(node) = comp.iter().position(|x| !x.is_finite()) {
                return Err(SpectralError::NonFinite { component: c, node });
            }
            if comp.len() != self.grid.len() {
                return Err(SpectralError::InvalidGrid(format!("component {c} has {} samples", comp.len())));
            }
        }
        Ok(())
    }

    pub fn expect_kind(&self, kind: FieldKind) -> Result<(), SpectralError> {
        if self.kind != kind {
            return Err(SpectralError::WrongKind {
                expected: kind,
                got: self.kind,
            });
        }
        Ok(())
    }

    pub fn spectrum(&self, fft: &FftNd) -> Spectrum {
        let partner = |k| self.grid.partner(k);
        let (s0, s1) = fft.forward_real_pair(&self.comps[0], &self.comps[1], partner);
        let (s2, s3) = fft.forward_real_pair(&self.comps[2], &self.comps[3], partner);
        let (s4, s5) = fft.forward_real_pair(&self.comps[4], &self.comps[5], partner);
        [s0, s1, s2, s3, s4, s5]
    }

    pub fn from_spectrum(grid: Grid3, kind: FieldKind, time: f64, spec: &Spectrum, fft: &FftNd) -> Self {
        let (c0, c1) = fft.inverse_real_pair(&spec[0], &spec[1]);
        let (c2, c3) = fft.inverse_real_pair(&spec[2], &spec[3]);
        let (c4, c5) = fft.inverse_real_pair(&spec[4], &spec[5]);
        Self {
            grid,
            kind,
            time,
            comps: [c0, c1, c2, c3, c4, c5],
        }
    }

    /// `(Σ_x |u(x)|² ΔV)^{1/2}` with `|u(x)|` the Euclidean norm of the six components.
    pub fn l2_norm(&self) -> f64 {
        (self.comps.iter().flat_map(|c| c.iter()).map(|x| x * x).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// `Σ_x |u(x)| ΔV`.
    pub fn l1_norm(&self) -> f64 {
        (0..self.grid.len()).map(|k| self.pointwise_norm(k)).sum::<f64>() * self.grid.cell_volume()
    }

    /// Grid maximum of `|u(x)|`.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.len()).map(|k| self.pointwise_norm(k)).fold(0.0, f64::max)
    }

    pub fn pointwise_norm(&self, node: usize) -> f64 {
        self.comps.iter().map(|c| c[node] * c[node]).sum::<f64>().sqrt()
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: f64) -> FieldState {
        let mut out = self.clone();
        out.comps.iter_mut().flat_map(|c| c.iter_mut()).for_each(|x| *x *= factor);
        out
    }

    pub fn add(&self, other: &FieldState) -> FieldState {
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        out
    }

    pub fn sub(&self, other: &FieldState) -> FieldState {
        self.add(&other.scaled(-1.0))
    }

    /// Converts between (E,H) and (D,B) for a constant diagonal material.
    pub fn convert(&self, m: &DiagonalMaterial, kind: FieldKind) -> FieldState {
        if self.kind == kind {
            return self.clone();
        }
        let (eps, mu) = (m.eps(), m.mu());
        let factor: [f64; 6] = match kind {
            FieldKind::DB => [eps[0], eps[1], eps[2], mu[0], mu[1], mu[2]],
            FieldKind::EH => [1.0 / eps[0], 1.0 / eps[1], 1.0 / eps[2], 1.0 / mu[0], 1.0 / mu[1], 1.0 / mu[2]],
        };
        let mut out = self.clone();
        out.kind = kind;
        for (c, comp) in out.comps.iter_mut().enumerate() {
            comp.iter_mut().for_each(|x| *x *= factor[c]);
        }
        out
    }
}

/// Electric and magnetic charge densities on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargePair {
    pub grid: Grid3,
    pub rho_e: Vec<f64>,
    pub rho_m: Vec<f64>,
}

impl ChargePair {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            rho_e: vec![0.0; grid.len()],
            rho_m: vec![0.0; grid.len()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.rho_e.iter().chain(&self.rho_m).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.rho_e.iter().chain(&self.rho_m).map(|x| x * x).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &ChargePair) -> f64 {
        self.rho_e
            .iter()
            .zip(&other.rho_e)
            .chain(self.rho_m.iter().zip(&other.rho_m))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Material energy `Σ_x (E·εE + H·μH) ΔV` for a constant diagonal material,
/// with (D,B) states converted pointwise.
pub fn energy(u: &FieldState, m: &DiagonalMaterial) -> f64 {
    let (eps, mu) = (m.eps(), m.mu());
    let w: [f64; 6] = match u.kind {
        FieldKind::EH => [eps[0], eps[1], eps[2], mu[0], mu[1], mu[2]],
        FieldKind::DB => [1.0 / eps[0], 1.0 / eps[1], 1.0 / eps[2], 1.0 / mu[0], 1.0 / mu[1], 1.0 / mu[2]],
    };
    let sum: f64 = u
        .comps
        .iter()
        .zip(w)
        .map(|(c, wc)| wc * c.iter().map(|x| x * x).sum::<f64>())
        .sum();
    sum * u.grid.cell_volume()
}
