//! Symbol algebra of the Maxwell system with diagonal ε, μ.
//!
//! The first-order symbol is
//!
//! ```text
//! p(ξ) = [ −iξ0 ε   iC(ξ′) ]
//!        [  iC(ξ′)  iξ0 μ  ]
//! ```
//!
//! where `C(ξ′)v = ξ′ × v`. Multiplying by the symmetrizer σ block-diagonalizes
//! it into `M_E − ξ0²` and `M_H − ξ0²`, whose common determinant is
//! `−ξ0² (ξ0⁴ − ξ0² q0 + q1)`. Geometry of the zero set lives in [`surface`].

mod identities;
mod surface;

pub use identities::*;
pub use surface::*;

use nalgebra::{Matrix3, Matrix6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensors::DiagonalMaterial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FresnelError {
    #[error("singular-point formula requires uniformly separated ratios (gap {gap} < {c_sep})")]
    Separation { gap: f64, c_sep: f64 },
    #[error("parametrization degenerate (denominator {0:e})")]
    DegenerateParametrization(f64),
    #[error("point is not on the characteristic surface (residual {0:e})")]
    OffSurface(f64),
    #[error("point lies within {radius} of a singular point (distance {distance:e})")]
    NearSingular { distance: f64, radius: f64 },
    #[error("gradient of the defining polynomial vanishes (|grad| = {0:e})")]
    VanishingGradient(f64),
    #[error("mesh is empty")]
    EmptyMesh,
    #[error("no sign change of the Gaussian curvature found along the scanned curves")]
    NoParabolicPoint,
    #[error(transparent)]
    Tensor(#[from] crate::tensors::TensorError),
}

/// Space-time frequency (ξ0, ξ′).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub xi0: f64,
    pub xi: [f64; 3],
}

impl Covector {
    pub fn new(xi0: f64, xi: [f64; 3]) -> Self {
        Self { xi0, xi }
    }

    pub fn scaled(&self, tau: f64) -> Self {
        Self {
            xi0: tau * self.xi0,
            xi: self.xi.map(|x| tau * x),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.xi0.is_finite() && self.xi.iter().all(|x| x.is_finite())
    }

    /// ξ0² + |ξ′|², the natural squared size of the covector.
    pub fn norm_sq(&self) -> f64 {
        self.xi0 * self.xi0 + self.xi.iter().map(|x| x * x).sum::<f64>()
    }
}

/// Matrix of the cross product `v ↦ ξ′ × v`.
pub fn curl_matrix(xi: [f64; 3]) -> Matrix3<f64> {
    let [a, b, c] = xi;
    Matrix3::new(0.0, -c, b, c, 0.0, -a, -b, a, 0.0)
}

/// The symbol, its symmetrizer and their product σ·p.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlocks {
    pub p: Matrix6<Complex64>,
    pub sigma: Matrix6<Complex64>,
    pub product: Matrix6<Complex64>,
}

fn complex(m: &Matrix3<f64>, factor: Complex64) -> Matrix3<Complex64> {
    m.map(|x| factor * x)
}

fn assemble(blocks: [[Matrix3<Complex64>; 2]; 2]) -> Matrix6<Complex64> {
    let mut out = Matrix6::zeros();
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            out.fixed_view_mut::<3, 3>(3 * bi, 3 * bj).copy_from(b);
        }
    }
    out
}

pub fn maxwell_symbol(m: &DiagonalMaterial, cov: &Covector) -> SymbolBlocks {
    let i = Complex64::i();
    let c = curl_matrix(cov.xi);
    let eps = m.eps_matrix();
    let mu = m.mu_matrix();
    let eps_inv = Matrix3::from_diagonal(&m.eps().map(|e| 1.0 / e).into());
    let mu_inv = Matrix3::from_diagonal(&m.mu().map(|e| 1.0 / e).into());
    let p = assemble([
        [complex(&eps, -i * cov.xi0), complex(&c, i)],
        [complex(&c, i), complex(&mu, i * cov.xi0)],
    ]);
    let sigma = assemble([
        [
            complex(&eps_inv, -i * cov.xi0),
            complex(&(eps_inv * c * mu_inv), i),
        ],
        [
            complex(&(mu_inv * c * eps_inv), i),
            complex(&mu_inv, i * cov.xi0),
        ],
    ]);
    let product = sigma * p;
    SymbolBlocks { p, sigma, product }
}

/// Reduced second-order symbols `M_E = −ε⁻¹Cμ⁻¹C` and `M_H = −μ⁻¹Cε⁻¹C`.
pub fn me_mh(m: &DiagonalMaterial, xi: [f64; 3]) -> (Matrix3<f64>, Matrix3<f64>) {
    let c = curl_matrix(xi);
    let eps_inv = Matrix3::from_diagonal(&m.eps().map(|e| 1.0 / e).into());
    let mu_inv = Matrix3::from_diagonal(&m.mu().map(|e| 1.0 / e).into());
    let me = -(eps_inv * c * mu_inv * c);
    let mh = -(mu_inv * c * eps_inv * c);
    (me, mh)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicData {
    pub q0: f64,
    pub q1: f64,
    /// ξ0⁴ − ξ0² q0 + q1.
    pub q_quartic: f64,
    /// −ξ0² q_quartic, equal to det(M_E − ξ0²).
    pub q_sextic: f64,
}

/// Coefficients `a_i` with `q0 = Σ a_i ξ_i²`.
fn q0_coefficients(m: &DiagonalMaterial) -> [f64; 3] {
    let (e, u) = (m.eps(), m.mu());
    [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        1.0 / (e[j] * u[k]) + 1.0 / (u[j] * e[k])
    })
}

fn weighted_sq(w: [f64; 3], xi: [f64; 3]) -> f64 {
    (0..3).map(|i| w[i] * xi[i] * xi[i]).sum()
}

fn product_all(m: &DiagonalMaterial) -> f64 {
    m.eps().iter().product::<f64>() * m.mu().iter().product::<f64>()
}

pub fn characteristic(m: &DiagonalMaterial, cov: &Covector) -> CharacteristicData {
    let q0 = weighted_sq(q0_coefficients(m), cov.xi);
    let q1 = weighted_sq(m.eps(), cov.xi) * weighted_sq(m.mu(), cov.xi) / product_all(m);
    let x2 = cov.xi0 * cov.xi0;
    let q_quartic = x2 * x2 - x2 * q0 + q1;
    CharacteristicData {
        q0,
        q1,
        q_quartic,
        q_sextic: -x2 * q_quartic,
    }
}

/// Gradient of `q_quartic` with respect to ξ′.
pub fn quartic_gradient(m: &DiagonalMaterial, cov: &Covector) -> [f64; 3] {
    let a = q0_coefficients(m);
    let (e, u) = (m.eps(), m.mu());
    let p = product_all(m);
    let se = weighted_sq(e, cov.xi);
    let su = weighted_sq(u, cov.xi);
    let x2 = cov.xi0 * cov.xi0;
    [0, 1, 2].map(|i| {
        let xi = cov.xi[i];
        -2.0 * x2 * a[i] * xi + 2.0 * xi * (e[i] * su + u[i] * se) / p
    })
}

/// Hessian of `q_quartic` with respect to ξ′.
pub fn quartic_hessian(m: &DiagonalMaterial, cov: &Covector) -> Matrix3<f64> {
    let a = q0_coefficients(m);
    let (e, u) = (m.eps(), m.mu());
    let p = product_all(m);
    let se = weighted_sq(e, cov.xi);
    let su = weighted_sq(u, cov.xi);
    let x2 = cov.xi0 * cov.xi0;
    let x = cov.xi;
    Matrix3::from_fn(|i, j| {
        let mut h = 4.0 * x[i] * x[j] * (e[i] * u[j] + u[i] * e[j]) / p;
        if i == j {
            h += -2.0 * x2 * a[i] + 2.0 * (e[i] * su + u[i] * se) / p;
        }
        h
    })
}

/// ∂q_quartic/∂ξ0 = 4ξ0³ − 2ξ0 q0.
pub fn quartic_dxi0(m: &DiagonalMaterial, cov: &Covector) -> f64 {
    let q0 = characteristic(m, cov).q0;
    4.0 * cov.xi0.powi(3) - 2.0 * cov.xi0 * q0
}

/// Cofactor tables of `M_E − ξ0²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZTables {
    pub z: Matrix3<f64>,
    /// `Z` with the terms proportional to ξ′ξ′ᵀ removed.
    pub z_eff: Matrix3<f64>,
    /// `Z_eff / ξ0²`.
    pub z_tilde_eff: Matrix3<f64>,
}

pub fn adjugate_z(m: &DiagonalMaterial, cov: &Covector) -> ZTables {
    let [e1, e2, e3] = m.eps();
    let [m1, m2, m3] = m.mu();
    let [x1, x2, x3] = cov.xi;
    let w2 = cov.xi0 * cov.xi0;
    let s = x1 * x1 / (m2 * m3) + x2 * x2 / (m1 * m3) + x3 * x3 / (m1 * m2);

    let t11 = -(e2 / m2 * x1 * x1 + e3 / m3 * x1 * x1 + e2 / m1 * x2 * x2 + e3 / m1 * x3 * x3);
    let t22 = -(e1 / m2 * x1 * x1 + e3 / m3 * x2 * x2 + e1 / m1 * x2 * x2 + e3 / m2 * x3 * x3);
    let t33 = -(e1 / m3 * x1 * x1 + e2 / m3 * x2 * x2 + e1 / m1 * x3 * x3 + e2 / m2 * x3 * x3);
    let t12 = -x1 * x2 * e3 / m3;
    let t13 = -x1 * x3 * e2 / m2;
    let t23 = -x2 * x3 * e1 / m1;

    let z = Matrix3::new(
        x1 * x1 * s + w2 * t11 + w2 * w2 * e2 * e3,
        x1 * x2 * (s - w2 * e3 / m3),
        x1 * x3 * (s - w2 * e2 / m2),
        x1 * x2 * (s - w2 * e3 / m3),
        x2 * x2 * s + w2 * t22 + w2 * w2 * e1 * e3,
        x2 * x3 * (s - w2 * e1 / m1),
        x1 * x3 * (s - w2 * e2 / m2),
        x2 * x3 * (s - w2 * e1 / m1),
        x3 * x3 * s + w2 * t33 + w2 * w2 * e1 * e2,
    );
    let z_tilde_eff = Matrix3::new(
        t11 + w2 * e2 * e3,
        t12,
        t13,
        t12,
        t22 + w2 * e1 * e3,
        t23,
        t13,
        t23,
        t33 + w2 * e1 * e2,
    );
    ZTables {
        z,
        z_eff: z_tilde_eff * w2,
        z_tilde_eff,
    }
}

/// Adjugate of a 3×3 matrix by cofactor expansion.
pub fn adjugate(a: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| a[(r0, c0)] * a[(r1, c1)] - a[(r0, c1)] * a[(r1, c0)];
    // adj(A)_{ij} = cofactor_{ji}
    Matrix3::new(
        c(1, 2, 1, 2),
        -c(0, 2, 1, 2),
        c(0, 1, 1, 2),
        -c(1, 2, 0, 2),
        c(0, 2, 0, 2),
        -c(0, 1, 0, 2),
        c(1, 2, 0, 1),
        -c(0, 2, 0, 1),
        c(0, 1, 0, 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m123() -> DiagonalMaterial {
        DiagonalMaterial::with_unit_mu([1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn curl_of_e3() {
        let c = curl_matrix([0.0, 0.0, 1.0]);
        assert_eq!(c, Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn product_at_zero_spatial_frequency() {
        let b = maxwell_symbol(&m123(), &Covector::new(1.7, [0.0; 3]));
        let expected = Matrix6::<Complex64>::identity() * Complex64::from(-1.7 * 1.7);
        assert!((b.product - expected).iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn isotropic_me_along_axis() {
        let (me, mh) = me_mh(&DiagonalMaterial::isotropic(), [2.0, 0.0, 0.0]);
        assert_eq!(me, Matrix3::from_diagonal(&[0.0, 4.0, 4.0].into()));
        assert_eq!(mh, me);
        let (z, _) = me_mh(&m123(), [0.0; 3]);
        assert_eq!(z, Matrix3::zeros());
    }

    #[test]
    fn characteristic_at_singular_point() {
        let d = characteristic(&m123(), &Covector::new(1.0, [1.5f64.sqrt(), 0.0, 0.5f64.sqrt()]));
        assert!((d.q0 - 2.0).abs() < 1e-14);
        assert!((d.q1 - 1.0).abs() < 1e-14);
        assert!(d.q_quartic.abs() < 1e-14);
        let iso = characteristic(&DiagonalMaterial::isotropic(), &Covector::new(1.0, [1.0, 0.0, 0.0]));
        assert_eq!(iso.q_quartic, 0.0);
        let zero = characteristic(&m123(), &Covector::new(1.3, [0.0; 3]));
        assert_eq!(zero.q_quartic, 1.3f64.powi(4));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let m = DiagonalMaterial::new([1.3, 2.1, 0.7], [0.9, 1.4, 1.1]).unwrap();
        let cov = Covector::new(0.8, [0.3, -1.1, 0.6]);
        let g = quartic_gradient(&m, &cov);
        let h = quartic_hessian(&m, &cov);
        let step = 1e-5;
        for i in 0..3 {
            let mut a = cov;
            let mut b = cov;
            a.xi[i] += step;
            b.xi[i] -= step;
            let fd = (characteristic(&m, &a).q_quartic - characteristic(&m, &b).q_quartic) / (2.0 * step);
            assert!((fd - g[i]).abs() < 1e-8);
            let ga = quartic_gradient(&m, &a);
            let gb = quartic_gradient(&m, &b);
            for j in 0..3 {
                assert!(((ga[j] - gb[j]) / (2.0 * step) - h[(j, i)]).abs() < 1e-7);
            }
        }
        let mut a = cov;
        let mut b = cov;
        a.xi0 += step;
        b.xi0 -= step;
        let fd = (characteristic(&m, &a).q_quartic - characteristic(&m, &b).q_quartic) / (2.0 * step);
        assert!((fd - quartic_dxi0(&m, &cov)).abs() < 1e-8);
    }

    #[test]
    fn z_eff_vanishes_at_zero_time_frequency() {
        let z = adjugate_z(&m123(), &Covector::new(0.0, [0.4, 1.2, -0.3]));
        assert_eq!(z.z_eff, Matrix3::zeros());
    }
}
