//! Exact constant-coefficient evolution, one Fourier mode at a time.
//!
//! With `a = ε^{1/2}Ê`, `b = μ^{1/2}Ĥ` each mode obeys `∂_t(a, b) = iH(a, b)`
//! for the real symmetric `H = [[0, K], [Kᵀ, 0]]`, `K = ε^{-1/2}C(ξ′)μ^{-1/2}`.
//! From the singular value decomposition `K = UΣVᵀ`,
//!
//! ```text
//! a(t) = U[cos(tΣ)Uᵀa₀ + i sin(tΣ)Vᵀb₀]
//! b(t) = V[cos(tΣ)Vᵀb₀ + i sin(tΣ)Uᵀa₀]
//! ```
//!
//! which is unitary for the material energy up to rounding.

use nalgebra::{Matrix3, Matrix6, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{FieldKind, FieldState, Grid3, Spectrum};
use super::SpectralError;
use crate::fresnel::curl_matrix;
use crate::tensors::DiagonalMaterial;

/// Singular value decomposition of the reduced symbol at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrame {
    pub u: Matrix3<f64>,
    pub v: Matrix3<f64>,
    /// Singular values in decreasing order; the last one vanishes.
    pub sigma: [f64; 3],
}

impl ModeFrame {
    pub fn new(m: &DiagonalMaterial, xi: [f64; 3]) -> Self {
        let (eps, mu) = (m.eps(), m.mu());
        let c = curl_matrix(xi);
        let k = Matrix3::from_fn(|i, j| c[(i, j)] / (eps[i] * mu[j]).sqrt());
        let svd = k.svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v = svd.v_t.expect("right singular vectors requested").transpose();
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        Self {
            u: Matrix3::from_columns(&order.map(|i| u.column(i).into_owned())),
            v: Matrix3::from_columns(&order.map(|i| v.column(i).into_owned())),
            sigma: [
                svd.singular_values[order[0]],
                svd.singular_values[order[1]],
                svd.singular_values[order[2]],
            ],
        }
    }

    /// Modal coordinates `(Uᵀa, Vᵀb)`.
    pub fn project(&self, a: &[Complex64; 3], b: &[Complex64; 3]) -> ([Complex64; 3], [Complex64; 3]) {
        let mut alpha = [Complex64::default(); 3];
        let mut beta = [Complex64::default(); 3];
        for k in 0..3 {
            for i in 0..3 {
                alpha[k] += self.u[(i, k)] * a[i];
                beta[k] += self.v[(i, k)] * b[i];
            }
        }
        (alpha, beta)
    }

    /// Reconstructs `(a(t), b(t))` from modal coordinates at time zero.
    pub fn evolve_modal(&self, alpha: &[Complex64; 3], beta: &[Complex64; 3], t: f64) -> ([Complex64; 3], [Complex64; 3]) {
        let i = Complex64::new(0.0, 1.0);
        let mut a = [Complex64::default(); 3];
        let mut b = [Complex64::default(); 3];
        for k in 0..3 {
            let (s, c) = (t * self.sigma[k]).sin_cos();
            let ak = c * alpha[k] + i * s * beta[k];
            let bk = c * beta[k] + i * s * alpha[k];
            for r in 0..3 {
                a[r] += self.u[(r, k)] * ak;
                b[r] += self.v[(r, k)] * bk;
            }
        }
        (a, b)
    }

    pub fn evolve(&self, a: &[Complex64; 3], b: &[Complex64; 3], t: f64) -> ([Complex64; 3], [Complex64; 3]) {
        let (alpha, beta) = self.project(a, b);
        self.evolve_modal(&alpha, &beta, t)
    }
}

/// Frequencies and eigenvectors of the first-order symbol at `ξ′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSystem {
    pub xi: [f64; 3],
    /// `(ω₁, −ω₁, ω₂, −ω₂, 0, 0)` with `ω₁ ≥ ω₂ > 0`.
    pub frequencies: [f64; 6],
    /// Column `k` is an (E,H) eigenvector for `frequencies[k]`, unit in the
    /// material inner product.
    pub vectors: Matrix6<f64>,
}

/// Eigenfrequencies of `û ↦ [[0, ε^{-1}C], [−μ^{-1}C, 0]]û`, the generator
/// of `∂_t û = i·(·)û`.
pub fn mode_eigensystem(m: &DiagonalMaterial, xi: [f64; 3]) -> Result<ModeSystem, SpectralError> {
    if xi.iter().all(|&x| x == 0.0) || xi.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::ZeroWavevector);
    }
    let f = ModeFrame::new(m, xi);
    let (eps, mu) = (m.eps(), m.mu());
    let weight = [eps[0], eps[1], eps[2], mu[0], mu[1], mu[2]].map(|x| 1.0 / x.sqrt());
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut vectors = Matrix6::zeros();
    let column = |a: Vector3<f64>, b: Vector3<f64>| -> [f64; 6] {
        let w = [a[0], a[1], a[2], b[0], b[1], b[2]];
        std::array::from_fn(|r| w[r] * weight[r])
    };
    let cols = [
        column(f.u.column(0) * inv_sqrt2, f.v.column(0) * inv_sqrt2),
        column(f.u.column(0) * inv_sqrt2, -f.v.column(0) * inv_sqrt2),
        column(f.u.column(1) * inv_sqrt2, f.v.column(1) * inv_sqrt2),
        column(f.u.column(1) * inv_sqrt2, -f.v.column(1) * inv_sqrt2),
        column(f.u.column(2).into_owned(), Vector3::zeros()),
        column(Vector3::zeros(), f.v.column(2).into_owned()),
    ];
    for (k, c) in cols.iter().enumerate() {
        for r in 0..6 {
            vectors[(r, k)] = c[r];
        }
    }
    Ok(ModeSystem {
        xi,
        frequencies: [f.sigma[0], -f.sigma[0], f.sigma[1], -f.sigma[1], 0.0, 0.0],
        vectors,
    })
}

fn eh_to_ab(eps: [f64; 3], mu: [f64; 3], spec: &Spectrum, k: usize) -> ([Complex64; 3], [Complex64; 3]) {
    (
        [0, 1, 2].map(|i| spec[i][k] * eps[i].sqrt()),
        [0, 1, 2].map(|i| spec[3 + i][k] * mu[i].sqrt()),
    )
}

fn store_ab(eps: [f64; 3], mu: [f64; 3], spec: &mut Spectrum, k: usize, p: usize, a: [Complex64; 3], b: [Complex64; 3]) {
    for i in 0..3 {
        let e = a[i] / eps[i].sqrt();
        let h = b[i] / mu[i].sqrt();
        spec[i][k] = e;
        spec[3 + i][k] = h;
        spec[i][p] = e.conj();
        spec[3 + i][p] = h.conj();
    }
}

/// Evolves an (E,H) spectrum in place by time `t`.
pub fn propagate_spectrum(m: &DiagonalMaterial, grid: &Grid3, spec: &mut Spectrum, t: f64) {
    if t == 0.0 {
        return;
    }
    let (eps, mu) = (m.eps(), m.mu());
    for k in 0..grid.len() {
        let p = grid.partner(k);
        if p < k {
            continue;
        }
        let xi = grid.wavevector(k);
        if xi.iter().all(|&x| x == 0.0) {
            continue;
        }
        let (a, b) = eh_to_ab(eps, mu, spec, k);
        let (a, b) = ModeFrame::new(m, xi).evolve(&a, &b, t);
        store_ab(eps, mu, spec, k, p, a, b);
    }
}

/// Exact solution operator of the constant-coefficient system at time `t`.
pub fn propagate_const(m: &DiagonalMaterial, u0: &FieldState, t: f64) -> FieldState {
    let kind = u0.kind;
    let u = u0.convert(m, FieldKind::EH);
    let fft = u.grid.fft();
    let mut spec = u.spectrum(&fft);
    propagate_spectrum(m, &u.grid, &mut spec, t);
    FieldState::from_spectrum(u.grid, FieldKind::EH, u0.time + t, &spec, &fft).convert(m, kind)
}

#[derive(Debug, Clone)]
struct ActiveMode {
    index: usize,
    partner: usize,
    frame: ModeFrame,
    alpha: [Complex64; 3],
    beta: [Complex64; 3],
}

/// Exact evolution of fixed initial data restricted to its nonzero modes,
/// with modal coordinates precomputed so each evaluation time costs one pass.
#[derive(Debug, Clone)]
pub struct ModalPropagator {
    pub grid: Grid3,
    material: DiagonalMaterial,
    modes: Vec<ActiveMode>,
}

impl ModalPropagator {
    /// `spec0` is an (E,H) spectrum, Hermitian as for real fields.
    pub fn new(m: &DiagonalMaterial, grid: Grid3, spec0: &Spectrum) -> Self {
        let (eps, mu) = (m.eps(), m.mu());
        let mut modes = Vec::new();
        for k in 0..grid.len() {
            let p = grid.partner(k);
            if p < k || spec0.iter().all(|c| c[k] == Complex64::default()) {
                continue;
            }
            let xi = grid.wavevector(k);
            let frame = if xi.iter().all(|&x| x == 0.0) {
                ModeFrame {
                    u: Matrix3::identity(),
                    v: Matrix3::identity(),
                    sigma: [0.0; 3],
                }
            } else {
                ModeFrame::new(m, xi)
            };
            let (a, b) = eh_to_ab(eps, mu, spec0, k);
            let (alpha, beta) = frame.project(&a, &b);
            modes.push(ActiveMode {
                index: k,
                partner: p,
                frame,
                alpha,
                beta,
            });
        }
        Self {
            grid,
            material: *m,
            modes,
        }
    }

    pub fn active_modes(&self) -> usize {
        self.modes.len()
    }

    /// Writes the (E,H) spectrum at time `t` into `out`, which must be zero
    /// outside the active modes.
    pub fn evolve_into(&self, t: f64, out: &mut Spectrum) {
        let (eps, mu) = (self.material.eps(), self.material.mu());
        for mode in &self.modes {
            let (a, b) = mode.frame.evolve_modal(&mode.alpha, &mode.beta, t);
            store_ab(eps, mu, out, mode.index, mode.partner, a, b);
        }
    }

    pub fn spectrum_at(&self, t: f64) -> Spectrum {
        let n = self.grid.len();
        let mut out: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); n]);
        self.evolve_into(t, &mut out);
        out
    }
}
