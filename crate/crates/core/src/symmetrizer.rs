//! Symmetrizers for the quasilinear system with material law `E = ψ(D)D`.
//!
//! Writing the system in the variables (D, B) gives flux blocks `A1^j`
//! (constant curl matrices) and `A2^j = B^j + C^j` (depending on D). A
//! symmetrizer of the form `blockdiag(C1, I)` exists exactly when
//! `C1_{km} = ψ_{km} + ∂_mψ_{kℓ}D_ℓ` is symmetric, which is the vanishing of
//! `r_i = ε^{ijk} ∂_jψ_{kℓ} D_ℓ`.

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetrizerError {
    #[error("no symmetrizer of ansatz form (condition residual {0:e})")]
    NoSymmetrizer(f64),
    #[error("C1 is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("field outside small-field ball (no convergence after {iterations} iterations, residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid law: {0}")]
    InvalidLaw(String),
}

/// Levi-Civita symbol on zero-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Diagonal dielectric response ε(E) = diag(ε0_i + α_i g_i(E)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricLaw {
    pub eps0: [f64; 3],
    pub alpha: [f64; 3],
    pub coupling: Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// g_i(E) = E_i²: each component responds to its own field only.
    Componentwise,
    /// g_i(E) = |E|².
    Intensity,
}

impl DielectricLaw {
    pub fn kerr(eps0: [f64; 3], alpha: [f64; 3]) -> Self {
        Self {
            eps0,
            alpha,
            coupling: Coupling::Componentwise,
        }
    }

    pub fn eps(&self, e: [f64; 3]) -> [f64; 3] {
        let i2: f64 = e.iter().map(|x| x * x).sum();
        [0, 1, 2].map(|i| {
            let g = match self.coupling {
                Coupling::Componentwise => e[i] * e[i],
                Coupling::Intensity => i2,
            };
            self.eps0[i] + self.alpha[i] * g
        })
    }

    /// ∂ε_k/∂E_n.
    pub fn eps_derivative(&self, e: [f64; 3]) -> Matrix3<f64> {
        Matrix3::from_fn(|k, n| match self.coupling {
            Coupling::Componentwise if k == n => 2.0 * self.alpha[k] * e[k],
            Coupling::Componentwise => 0.0,
            Coupling::Intensity => 2.0 * self.alpha[k] * e[n],
        })
    }

    /// D = ε(E)E.
    pub fn forward(&self, e: [f64; 3]) -> [f64; 3] {
        let eps = self.eps(e);
        [0, 1, 2].map(|i| eps[i] * e[i])
    }

    /// Jacobian of E ↦ ε(E)E.
    pub fn jacobian(&self, e: [f64; 3]) -> Matrix3<f64> {
        let eps = self.eps(e);
        let de = self.eps_derivative(e);
        Matrix3::from_fn(|k, n| if k == n { eps[k] } else { 0.0 } + de[(k, n)] * e[k])
    }

    fn alpha_norm(&self) -> f64 {
        Vector3::from(self.alpha).norm()
    }
}

/// Solves ε(E)E = D by Newton's method from E₀ = ε(0)⁻¹D.
pub fn invert_material(law: &DielectricLaw, d: [f64; 3]) -> Result<[f64; 3], SymmetrizerError> {
    if law.eps0.iter().any(|&e| !(e > 0.0)) {
        return Err(SymmetrizerError::InvalidLaw("ε(0) must be positive definite".into()));
    }
    let dv = Vector3::from(d);
    let mut e = Vector3::from([0, 1, 2].map(|i| d[i] / law.eps0[i]));
    let tol = 1e-15 * (1.0 + dv.norm());
    let mut residual = f64::INFINITY;
    for _ in 0..50 {
        let f = Vector3::from(law.forward(e.into())) - dv;
        residual = f.norm();
        if residual <= tol {
            return Ok(e.into());
        }
        let step = law
            .jacobian(e.into())
            .lu()
            .solve(&f)
            .ok_or(SymmetrizerError::NoConvergence {
                iterations: 0,
                residual,
            })?;
        let next = e - step;
        if (next - e).norm() <= 1e-17 * (1.0 + e.norm()) {
            e = next;
            break;
        }
        e = next;
    }
    let final_res = (Vector3::from(law.forward(e.into())) - dv).norm();
    if final_res < 1e-12 && final_res.is_finite() {
        Ok(e.into())
    } else {
        Err(SymmetrizerError::NoConvergence {
            iterations: 50,
            residual: final_res.min(residual),
        })
    }
}

/// A small-field law `E = ψ(D)D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonlinearLaw {
    /// ψ_{ij}(D) = ε⁰_{ij} + α_{ij} D_i D_j.
    Quadratic {
        eps0: [[f64; 3]; 3],
        alpha: [[f64; 3]; 3],
    },
    /// ψ = diag(1/ε_i(E_i)) for ε_i(E_i) = ε⁰_i + α_i E_i².
    KerrDiag { eps0: [f64; 3], alpha: [f64; 3] },
    /// ψ = diag(1/ε_i(E)) for ε_i(E) = ε⁰_i + α_i |E|².
    IntensityDiag { eps0: [f64; 3], alpha: [f64; 3] },
}

impl NonlinearLaw {
    fn dielectric(&self) -> Option<DielectricLaw> {
        match *self {
            NonlinearLaw::Quadratic { .. } => None,
            NonlinearLaw::KerrDiag { eps0, alpha } => Some(DielectricLaw::kerr(eps0, alpha)),
            NonlinearLaw::IntensityDiag { eps0, alpha } => Some(DielectricLaw {
                eps0,
                alpha,
                coupling: Coupling::Intensity,
            }),
        }
    }

    /// Small-field radius 0.25/‖α‖ (infinite for a linear law).
    pub fn delta(&self) -> f64 {
        let norm = match self {
            NonlinearLaw::Quadratic { alpha, .. } => Matrix3::from(*alpha).norm(),
            _ => self.dielectric().map(|l| l.alpha_norm()).unwrap_or(0.0),
        };
        if norm == 0.0 {
            f64::INFINITY
        } else {
            0.25 / norm
        }
    }

    pub fn psi(&self, d: [f64; 3]) -> Result<Matrix3<f64>, SymmetrizerError> {
        match self {
            NonlinearLaw::Quadratic { eps0, alpha } => Ok(Matrix3::from_fn(|i, j| eps0[i][j] + alpha[i][j] * d[i] * d[j])),
            _ => {
                let law = self.dielectric().expect("dielectric variant");
                let e = invert_material(&law, d)?;
                let eps = law.eps(e);
                Ok(Matrix3::from_diagonal(&eps.map(|x| 1.0 / x).into()))
            }
        }
    }

    /// Analytic ∂ψ/∂D_m for m = 1, 2, 3.
    pub fn dpsi(&self, d: [f64; 3]) -> Result<[Matrix3<f64>; 3], SymmetrizerError> {
        match self {
            NonlinearLaw::Quadratic { alpha, .. } => Ok([0, 1, 2].map(|m| {
                Matrix3::from_fn(|i, j| {
                    let mut v = 0.0;
                    if i == m {
                        v += alpha[i][j] * d[j];
                    }
                    if j == m {
                        v += alpha[i][j] * d[i];
                    }
                    v
                })
            })),
            _ => {
                let law = self.dielectric().expect("dielectric variant");
                let e = invert_material(&law, d)?;
                let eps = law.eps(e);
                let de_dd = law
                    .jacobian(e)
                    .try_inverse()
                    .ok_or_else(|| SymmetrizerError::InvalidLaw("singular Jacobian".into()))?;
                let deps = law.eps_derivative(e);
                let dps = deps * de_dd;
                Ok([0, 1, 2].map(|m| {
                    Matrix3::from_fn(|k, l| if k == l { -dps[(k, m)] / (eps[k] * eps[k]) } else { 0.0 })
                }))
            }
        }
    }
}

/// Central-difference ∂ψ/∂D_m with step `h`.
pub fn finite_difference_dpsi(law: &NonlinearLaw, d: [f64; 3], h: f64) -> Result<[Matrix3<f64>; 3], SymmetrizerError> {
    let mut out = [Matrix3::zeros(); 3];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut p = d;
        let mut q = d;
        p[m] += h;
        q[m] -= h;
        *slot = (law.psi(p)? - law.psi(q)?) / (2.0 * h);
    }
    Ok(out)
}

/// Default finite-difference step h = 1e-6·max(1, |D|).
pub fn default_fd_step(d: [f64; 3]) -> f64 {
    1e-6 * Vector3::from(d).norm().max(1.0)
}

/// w_{km} = ∂_mψ_{kℓ} D_ℓ.
fn contracted(dpsi: &[Matrix3<f64>; 3], d: [f64; 3]) -> Matrix3<f64> {
    let dv = Vector3::from(d);
    Matrix3::from_fn(|k, m| (dpsi[m].row(k) * dv)[0])
}

fn residual_from(w: &Matrix3<f64>) -> [f64; 3] {
    [0, 1, 2].map(|i| {
        let mut r = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                r += levi_civita(i, j, k) * w[(k, j)];
            }
        }
        r
    })
}

/// r_i = ε^{ijk} ∂_jψ_{kℓ} D_ℓ with analytic derivatives.
pub fn condition_residual(law: &NonlinearLaw, d: [f64; 3]) -> Result<[f64; 3], SymmetrizerError> {
    Ok(residual_from(&contracted(&law.dpsi(d)?, d)))
}

/// The same residual with finite-difference derivatives of step `h`.
pub fn condition_residual_fd(law: &NonlinearLaw, d: [f64; 3], h: f64) -> Result<[f64; 3], SymmetrizerError> {
    Ok(residual_from(&contracted(&finite_difference_dpsi(law, d, h)?, d)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizerMatrix {
    pub c1: Matrix3<f64>,
    pub residual: [f64; 3],
    pub min_eigenvalue: f64,
}

impl SymmetrizerMatrix {
    /// blockdiag(C1, I).
    pub fn full(&self) -> Matrix6<f64> {
        let mut c = Matrix6::identity();
        c.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.c1);
        c
    }
}

fn raw_c1(law: &NonlinearLaw, d: [f64; 3]) -> Result<(Matrix3<f64>, Matrix3<f64>, Matrix3<f64>), SymmetrizerError> {
    let psi = law.psi(d)?;
    let w = contracted(&law.dpsi(d)?, d);
    Ok((psi + w, psi, w))
}

pub fn build_symmetrizer(law: &NonlinearLaw, d: [f64; 3]) -> Result<SymmetrizerMatrix, SymmetrizerError> {
    build_symmetrizer_with(law, d, 1e-10)
}

pub fn build_symmetrizer_with(law: &NonlinearLaw, d: [f64; 3], tol: f64) -> Result<SymmetrizerMatrix, SymmetrizerError> {
    let (c1, _, w) = raw_c1(law, d)?;
    let residual = residual_from(&w);
    let rnorm = Vector3::from(residual).norm();
    if rnorm > tol {
        return Err(SymmetrizerError::NoSymmetrizer(rnorm));
    }
    let sym = (c1 + c1.transpose()) * 0.5;
    let min_eigenvalue = SymmetricEigen::new(sym).eigenvalues.min();
    if min_eigenvalue <= 0.0 {
        return Err(SymmetrizerError::NotPositiveDefinite(min_eigenvalue));
    }
    Ok(SymmetrizerMatrix {
        c1: sym,
        residual,
        min_eigenvalue,
    })
}

/// Flux blocks of the (D, B) system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxMatrices {
    pub a1: [Matrix3<f64>; 3],
    pub b: [Matrix3<f64>; 3],
    pub c: [Matrix3<f64>; 3],
    pub a2: [Matrix3<f64>; 3],
}

impl FluxMatrices {
    /// [[0, A1^j], [A2^j, 0]].
    pub fn assembled(&self, j: usize) -> Matrix6<f64> {
        let mut a = Matrix6::zeros();
        a.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.a1[j]);
        a.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.a2[j]);
        a
    }
}

/// Constant blocks A1^j_{mn} = −ε_{jmn}.
pub fn curl_blocks() -> [Matrix3<f64>; 3] {
    [0, 1, 2].map(|j| Matrix3::from_fn(|m, n| -levi_civita(j, m, n)))
}

pub fn flux_matrices(law: &NonlinearLaw, d: [f64; 3]) -> Result<FluxMatrices, SymmetrizerError> {
    let (_, psi, w) = raw_c1(law, d)?;
    let a1 = curl_blocks();
    let table = |src: &Matrix3<f64>, j: usize| {
        Matrix3::from_fn(|i, m| (0..3).map(|k| -levi_civita(i, j, k) * src[(k, m)]).sum())
    };
    let b = [0, 1, 2].map(|j| table(&psi, j));
    let c = [0, 1, 2].map(|j| table(&w, j));
    let a2 = [0, 1, 2].map(|j| b[j] + c[j]);
    Ok(FluxMatrices { a1, b, c, a2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxCheck {
    pub pass: bool,
    /// Largest |((A1^j)ᵗC1 − A2^j)_{row,col}| using the symmetrized C1.
    pub max_violation: f64,
    /// (j, row, col) of the largest violation, zero-based.
    pub worst: (usize, usize, usize),
    /// Largest entry of (𝒜^j)ᵗC − C𝒜^j over j for the 6×6 system.
    pub max_violation_full: f64,
}

/// Verifies the symmetrization identities at `d` with tolerance `tol`.
pub fn check_flux_identity(law: &NonlinearLaw, d: [f64; 3], tol: f64) -> Result<FluxCheck, SymmetrizerError> {
    let flux = flux_matrices(law, d)?;
    let (c1, _, _) = raw_c1(law, d)?;
    let c1 = (c1 + c1.transpose()) * 0.5;
    let mut full = Matrix6::identity();
    full.fixed_view_mut::<3, 3>(0, 0).copy_from(&c1);
    let mut worst = (0, 0, 0);
    let mut max_violation = 0.0;
    let mut max_violation_full: f64 = 0.0;
    for j in 0..3 {
        let diff = flux.a1[j].transpose() * c1 - flux.a2[j];
        for row in 0..3 {
            for col in 0..3 {
                if diff[(row, col)].abs() > max_violation {
                    max_violation = diff[(row, col)].abs();
                    worst = (j, row, col);
                }
            }
        }
        let a = flux.assembled(j);
        max_violation_full = max_violation_full.max((a.transpose() * full - full * a).amax());
    }
    Ok(FluxCheck {
        pass: max_violation <= tol && max_violation_full <= tol,
        max_violation,
        worst,
        max_violation_full,
    })
}

/// Worst-case residuals of a law over random fields in its small-field ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    pub max_residual: f64,
    pub max_flux_violation: f64,
    /// Largest |ε(E)E − D| after inversion; `None` for laws given directly by ψ.
    pub max_roundtrip: Option<f64>,
    pub min_c1_eigenvalue: f64,
}

/// Samples D uniformly in the ball of radius `min(δ, 1)` and evaluates the
/// condition residual, the flux identity and the material inversion.
pub fn sweep(law: &NonlinearLaw, samples: usize, seed: u64) -> Result<SweepReport, SymmetrizerError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let radius = law.delta().min(1.0);
    let mut rep = SweepReport {
        samples,
        seed,
        delta: law.delta(),
        max_residual: 0.0,
        max_flux_violation: 0.0,
        max_roundtrip: law.dielectric().map(|_| 0.0),
        min_c1_eigenvalue: f64::INFINITY,
    };
    for _ in 0..samples {
        let d = loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if Vector3::from(v).norm() <= 1.0 {
                break v.map(|x| x * radius);
            }
        };
        rep.max_residual = rep.max_residual.max(Vector3::from(condition_residual(law, d)?).norm());
        let flux = check_flux_identity(law, d, f64::INFINITY)?;
        rep.max_flux_violation = rep.max_flux_violation.max(flux.max_violation.max(flux.max_violation_full));
        let (c1, _, _) = raw_c1(law, d)?;
        let sym = (c1 + c1.transpose()) * 0.5;
        rep.min_c1_eigenvalue = rep.min_c1_eigenvalue.min(SymmetricEigen::new(sym).eigenvalues.min());
        if let (Some(diel), Some(worst)) = (law.dielectric(), rep.max_roundtrip.as_mut()) {
            let e = invert_material(&diel, d)?;
            let back = Vector3::from(diel.forward(e)) - Vector3::from(d);
            *worst = worst.max(back.norm());
        }
    }
    Ok(rep)
}
