//! One-dimensional FBI transform
//! `T_λ f(z) = C₁ λ^{3/4} ∫ e^{−λ(z−y)²/2} f(y) dy`, `z = x − iξ`,
//! `C₁ = 2^{−1/2} π^{−3/4}`, isometric from `L²(ℝ)` to `L²(e^{−λξ²} dx dξ)`.
//!
//! Phase-space samples are stored with the weight folded in,
//! `G(x, ξ) = e^{−λξ²/2} T_λ f(x − iξ)`, so weighted norms are plain grid
//! norms of `G`. For each phase-space point `x` the ξ-dependence is a
//! windowed Fourier sum, evaluated with one FFT, so the discrete transform
//! is an exact isometry of the trapezoidal norms up to kernel truncation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::linear_fit;

/// Gaussian widths kept on each side of the kernel centre.
pub const TRUNCATION_WIDTHS: f64 = 12.0;
/// Phase-space samples per Gaussian width `1/√λ`.
pub const POINTS_PER_WIDTH: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FbiError {
    #[error("grid spacing {actual:e} under-resolves λ = {lambda}: spacing at most {required:e} is required")]
    UnderResolved { lambda: f64, required: f64, actual: f64 },
    #[error("f does not decay at the domain edge (|f| = {edge:e} relative to its maximum)")]
    NoDecay { edge: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("at least 3 values of λ are needed, got {0}")]
    TooFewLambdas(usize),
}

pub fn c1() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 * PI.powf(-0.75)
}

/// Samples `values[j] = f(x0 + j h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn(x0: f64, h: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            x0,
            h,
            values: (0..n).map(|j| f(x0 + j as f64 * h)).collect(),
        }
    }

    pub fn from_real(x0: f64, h: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(x0, h, n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.h).sqrt()
    }

    /// `f · a` pointwise.
    pub fn multiplied(&self, a: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().enumerate().map(|(j, z)| z * a(self.x(j))).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn rel_l2_diff(&self, other: &GridFunction) -> f64 {
        let d: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        let n = self.values.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if n == 0.0 {
            d.sqrt()
        } else {
            (d / n).sqrt()
        }
    }
}

/// Samples of `G(x, ξ) = e^{−λξ²/2} T_λ f(x − iξ)` on a rectangular grid,
/// row-major in (x, ξ). The x grid extends the grid of `f` by the kernel
/// truncation on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceFunction {
    pub lambda: f64,
    /// Phase-space x grid: `x_i = x0 + i hx`, `i < nx`.
    pub x0: f64,
    pub hx: f64,
    pub nx: usize,
    /// ξ grid: `ξ = (m_min + col) dxi` for `col < n_xi`.
    pub dxi: f64,
    pub m_min: i64,
    pub n_xi: usize,
    pub values: Vec<Complex64>,
    source: SourceGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SourceGrid {
    x0: f64,
    n: usize,
    window: usize,
    fft_len: usize,
}

impl PhaseSpaceFunction {
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn xi(&self, col: usize) -> f64 {
        (self.m_min + col as i64) as f64 * self.dxi
    }

    /// Column index of ξ = 0.
    pub fn zero_column(&self) -> usize {
        (-self.m_min) as usize
    }

    /// Stored weighted sample at (x_i, ξ of column `col`).
    pub fn weighted(&self, i: usize, col: usize) -> Complex64 {
        self.values[i * self.n_xi + col]
    }

    /// `T_λ f(x_i − iξ)` without the weight.
    pub fn transform_value(&self, i: usize, col: usize) -> Complex64 {
        let xi = self.xi(col);
        self.weighted(i, col) * (0.5 * self.lambda * xi * xi).exp()
    }

    /// `‖T_λ f‖_{L²_Φ}` by the trapezoidal rule.
    pub fn weighted_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.hx * self.dxi).sqrt()
    }

    /// `‖self − other‖_{L²_Φ}` for transforms on the same grid.
    pub fn weighted_distance(&self, other: &PhaseSpaceFunction) -> f64 {
        let same = self.nx == other.nx && self.n_xi == other.n_xi && self.m_min == other.m_min;
        assert!(same, "phase-space grids differ");
        (self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * self.hx * self.dxi).sqrt()
    }

    /// Multiplies every sample at `x_i` by `a(x_i)`.
    pub fn multiplied_in_x(&self, a: impl Fn(f64) -> f64) -> Self {
        let nxi = self.n_xi;
        let mut out = self.clone();
        for i in 0..self.nx {
            let ai = a(self.x(i));
            out.values[i * nxi..(i + 1) * nxi].iter_mut().for_each(|z| *z *= ai);
        }
        out
    }
}

fn check_input(f: &GridFunction, lambda: f64) -> Result<(), FbiError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(FbiError::Invalid(format!("λ = {lambda}")));
    }
    if f.len() < 2 || !(f.h > 0.0) {
        return Err(FbiError::Invalid("f needs at least two samples and positive spacing".into()));
    }
    if f.values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FbiError::Invalid("f has non-finite samples".into()));
    }
    let peak = f.values.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if peak > 0.0 {
        let edge = f.values[0].norm().max(f.values[f.len() - 1].norm()) / peak;
        if edge >= 1e-12 {
            return Err(FbiError::NoDecay { edge });
        }
    }
    let required = 1.0 / (POINTS_PER_WIDTH * lambda.sqrt());
    if f.h > required * (1.0 + 1e-12) {
        return Err(FbiError::UnderResolved {
            lambda,
            required,
            actual: f.h,
        });
    }
    Ok(())
}

/// Forward transform. The ξ columns span one period of the discrete
/// Fourier sum, `|ξ| ≤ π/(λh)`, which covers every frequency the grid of
/// `f` represents.
pub fn fbi_forward(f: &GridFunction, lambda: f64) -> Result<PhaseSpaceFunction, FbiError> {
    check_input(f, lambda)?;
    let h = f.h;
    let width = 1.0 / lambda.sqrt();
    let window = (TRUNCATION_WIDTHS * width / h).ceil() as usize;
    let fft_len = (2 * window + 1).next_power_of_two();
    let dxi = 2.0 * PI / (lambda * h * fft_len as f64);
    let m_min = -(fft_len as i64 / 2);
    let n_xi = fft_len;
    let nx = f.len() + 2 * window;
    let c = c1() * lambda.powf(0.75) * h;
    let plan = FftPlanner::new().plan_fft_forward(fft_len);
    let gauss: Vec<f64> = (0..=2 * window)
        .map(|j| {
            let s = (j as f64 - window as f64) * h;
            (-0.5 * lambda * s * s).exp()
        })
        .collect();
    let shift: Vec<Complex64> = (0..n_xi)
        .map(|col| {
            let m = (m_min + col as i64) as f64;
            Complex64::from_polar(c, 2.0 * PI * m * window as f64 / fft_len as f64)
        })
        .collect();
    let mut values = vec![Complex64::default(); nx * n_xi];
    let mut buf = vec![Complex64::default(); fft_len];
    for i in 0..nx {
        buf.iter_mut().for_each(|z| *z = Complex64::default());
        let mut any = false;
        for (j, g) in gauss.iter().enumerate() {
            let y = i as i64 + j as i64 - 2 * window as i64;
            if y < 0 || y as usize >= f.len() {
                continue;
            }
            let v = f.values[y as usize];
            if v != Complex64::default() {
                buf[j] = v * g;
                any = true;
            }
        }
        if !any {
            continue;
        }
        plan.process(&mut buf);
        let row = &mut values[i * n_xi..(i + 1) * n_xi];
        for (col, out) in row.iter_mut().enumerate() {
            let m = m_min + col as i64;
            *out = buf[m.rem_euclid(fft_len as i64) as usize] * shift[col];
        }
    }
    Ok(PhaseSpaceFunction {
        lambda,
        x0: f.x0 - window as f64 * h,
        hx: h,
        nx,
        dxi,
        m_min,
        n_xi,
        values,
        source: SourceGrid {
            x0: f.x0,
            n: f.len(),
            window,
            fft_len,
        },
    })
}

/// Adjoint transform evaluated on the grid of the original function.
pub fn fbi_inverse(ps: &PhaseSpaceFunction) -> Result<GridFunction, FbiError> {
    let src = ps.source;
    let n_xi = ps.n_xi;
    if ps.values.len() != ps.nx * n_xi || src.fft_len < n_xi || ps.nx != src.n + 2 * src.window {
        return Err(FbiError::Invalid("phase-space samples do not match their grid".into()));
    }
    let lambda = ps.lambda;
    let c = c1() * lambda.powf(0.75) * ps.hx * ps.dxi;
    let plan = FftPlanner::new().plan_fft_inverse(src.fft_len);
    let mut out = vec![Complex64::default(); src.n];
    let mut buf = vec![Complex64::default(); src.fft_len];
    let w = src.window as i64;
    let gauss: Vec<Complex64> = (-w..=w)
        .map(|d| {
            let s = d as f64 * ps.hx;
            Complex64::new(c * (-0.5 * lambda * s * s).exp(), 0.0)
        })
        .collect();
    for i in 0..ps.nx {
        let row = &ps.values[i * n_xi..(i + 1) * n_xi];
        if row.iter().all(|z| *z == Complex64::default()) {
            continue;
        }
        buf.iter_mut().for_each(|z| *z = Complex64::default());
        for (col, g) in row.iter().enumerate() {
            let m = ps.m_min + col as i64;
            buf[m.rem_euclid(src.fft_len as i64) as usize] = *g;
        }
        plan.process(&mut buf);
        for d in -w..=w {
            let y = i as i64 - w + d;
            if y < 0 || y as usize >= src.n {
                continue;
            }
            out[y as usize] += buf[d.rem_euclid(src.fft_len as i64) as usize] * gauss[(d + w) as usize];
        }
    }
    Ok(GridFunction {
        x0: src.x0,
        h: ps.hx,
        values: out,
    })
}

/// Outcome of [`conjugation_error`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationReport {
    pub s: f64,
    pub lambdas: Vec<f64>,
    /// `max_trials ‖T_λ(a f) − a(x) T_λ f‖_{L²_Φ} / ‖f‖_{L²}` per λ.
    pub errors: Vec<f64>,
    /// Slope of `log r` against `log λ`.
    pub slope: f64,
    pub predicted_slope: f64,
    pub trials: usize,
}

/// Empirical size of the commutator of `T_λ` with multiplication by `a`.
pub fn conjugation_error(a: &dyn Fn(f64) -> f64, s: f64, lambdas: &[f64], trials: &[GridFunction]) -> Result<ConjugationReport, FbiError> {
    if lambdas.len() < 3 {
        return Err(FbiError::TooFewLambdas(lambdas.len()));
    }
    if trials.is_empty() {
        return Err(FbiError::Invalid("no trial functions".into()));
    }
    let mut errors = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let mut worst = 0.0_f64;
        for f in trials {
            let norm = f.l2_norm();
            if norm == 0.0 {
                continue;
            }
            let taf = fbi_forward(&f.multiplied(a), lam)?;
            let atf = fbi_forward(f, lam)?.multiplied_in_x(a);
            worst = worst.max(taf.weighted_distance(&atf) / norm);
        }
        errors.push(worst);
    }
    let lx: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(ConjugationReport {
        s,
        lambdas: lambdas.to_vec(),
        slope: linear_fit(&lx, &ly).slope,
        predicted_slope: -0.5 * s,
        errors,
        trials: trials.len(),
    })
}

/// `|x|^s e^{−x²/8}`: bounded and exactly `C^s` at the origin.
pub fn holder_symbol(s: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| x.abs().powf(s) * (-x * x / 8.0).exp()
}

/// Unit-norm random trigonometric polynomials (four frequencies in [0, 6])
/// under a unit Gaussian envelope, sampled on `[−8, 8]` with spacing `h`.
pub fn random_trials(count: usize, h: f64, rng: &mut impl Rng) -> Vec<GridFunction> {
    let n = (16.0 / h).round() as usize + 1;
    (0..count)
        .map(|_| {
            let terms: Vec<(f64, f64, f64)> = (0..4)
                .map(|_| (rng.random_range(0.0..6.0), rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let f = GridFunction::from_real(-8.0, h, n, |x| {
                (-0.5 * x * x).exp() * terms.iter().map(|(k, c, d)| c * (k * x).cos() + d * (k * x).sin()).sum::<f64>()
            });
            let norm = f.l2_norm();
            f.scaled(Complex64::new(1.0 / norm, 0.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(h: f64) -> GridFunction {
        let n = (16.0 / h).round() as usize + 1;
        let c = PI.powf(-0.25);
        GridFunction::from_real(-8.0, h, n, |x| c * (-0.5 * x * x).exp())
    }

    #[test]
    fn constant_is_normalizing() {
        assert!((c1() * c1() * 2.0 * PI.powf(1.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let lam = 16.0;
        let f = gaussian(1.0 / 64.0);
        let ps = fbi_forward(&f, lam).unwrap();
        // ∫ e^{−λ(z−y)²/2} e^{−y²/2} dy = √(2π/(λ+1)) e^{−λ z²/(2(λ+1))}.
        let pref = c1() * lam.powf(0.75) * PI.powf(-0.25) * (2.0 * PI / (lam + 1.0)).sqrt();
        for (i, col) in [(ps.nx / 2, ps.zero_column()), (ps.nx / 3, ps.zero_column() + 5), (ps.nx / 2 + 7, ps.zero_column() - 3)] {
            let z = Complex64::new(ps.x(i), -ps.xi(col));
            let want = pref * (-lam * z * z / (2.0 * (lam + 1.0))).exp();
            let got = ps.transform_value(i, col);
            assert!((got - want).norm() < 1e-10 * want.norm().max(1e-3), "{got} vs {want}");
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let f = gaussian(0.1);
        assert!(matches!(fbi_forward(&f, 16.0), Err(FbiError::UnderResolved { .. })));
        let wide = GridFunction::from_real(-1.0, 0.01, 201, |x| (-x * x).exp());
        assert!(matches!(fbi_forward(&wide, 16.0), Err(FbiError::NoDecay { .. })));
    }
}
