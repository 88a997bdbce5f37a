//! Material laws.
//!
//! A [`DiagonalMaterial`] holds constant principal values of ε and μ; a
//! [`MaterialField`] holds symmetric 3×3 samples of both tensors on a spatial
//! grid. Cyclic axis indices follow the convention `i+1`, `i+2` taken mod 3,
//! so for axis 3 the neighbours are axes 1 and 2. Every module in this crate
//! uses that convention.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default ratio separation demanded of a fully anisotropic material.
pub const DEFAULT_C_SEP: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("{name}[{index}] = {value} must be positive and finite")]
    InvalidEntry {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("ellipticity band [{lo}, {hi}] is not a positive interval")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("separation constant must be nonnegative, got {0}")]
    InvalidSeparation(f64),
    #[error("{name} sample at node {node} is not symmetric (asymmetry {asymmetry:e})")]
    NonSymmetric {
        name: &'static str,
        node: usize,
        asymmetry: f64,
    },
    #[error("{name} sample at node {node} has a non-finite entry")]
    NonFinite { name: &'static str, node: usize },
    #[error("{name} has {got} samples but the grid holds {expected} nodes")]
    SampleCount {
        name: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("standard-form reduction undefined at zero time frequency")]
    ZeroTimeFrequency,
}

/// Closed ellipticity interval `[lo, hi]` for tensor eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self, TensorError> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(TensorError::InvalidBand { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lo && value <= self.hi
    }
}

impl Default for Band {
    /// The band `[0.1, 10]`. This is a default, not a physical constant.
    fn default() -> Self {
        Self { lo: 0.1, hi: 10.0 }
    }
}

/// Constant diagonal permittivity and permeability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiagonal", into = "RawDiagonal")]
pub struct DiagonalMaterial {
    eps: [f64; 3],
    mu: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct RawDiagonal {
    eps: [f64; 3],
    mu: [f64; 3],
}

impl TryFrom<RawDiagonal> for DiagonalMaterial {
    type Error = TensorError;
    fn try_from(raw: RawDiagonal) -> Result<Self, Self::Error> {
        Self::new(raw.eps, raw.mu)
    }
}

impl From<DiagonalMaterial> for RawDiagonal {
    fn from(m: DiagonalMaterial) -> Self {
        Self { eps: m.eps, mu: m.mu }
    }
}

impl DiagonalMaterial {
    pub fn new(eps: [f64; 3], mu: [f64; 3]) -> Result<Self, TensorError> {
        for (name, values) in [("eps", &eps), ("mu", &mu)] {
            for (index, &value) in values.iter().enumerate() {
                if !(value.is_finite() && value > 0.0) {
                    return Err(TensorError::InvalidEntry { name, index, value });
                }
            }
        }
        Ok(Self { eps, mu })
    }

    /// Vacuum: ε = μ = identity.
    pub fn isotropic() -> Self {
        Self {
            eps: [1.0; 3],
            mu: [1.0; 3],
        }
    }

    /// Permittivity `eps` with μ = identity.
    pub fn with_unit_mu(eps: [f64; 3]) -> Result<Self, TensorError> {
        Self::new(eps, [1.0; 3])
    }

    pub fn eps(&self) -> [f64; 3] {
        self.eps
    }

    pub fn mu(&self) -> [f64; 3] {
        self.mu
    }

    pub fn eps_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.eps.into())
    }

    pub fn mu_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.mu.into())
    }

    /// Effective ratios ε_i/μ_i.
    pub fn ratios(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.eps[i] / self.mu[i])
    }

    /// Smallest pairwise distance between the ratios ε_i/μ_i.
    pub fn min_ratio_gap(&self) -> f64 {
        min_pairwise_gap(self.ratios())
    }

    pub fn is_fully_anisotropic(&self, c_sep: f64) -> bool {
        self.min_ratio_gap() >= c_sep && self.min_ratio_gap() > 0.0
    }

    /// Upper bound for the group velocity, 1/sqrt(min ε · min μ).
    pub fn max_speed(&self) -> f64 {
        let emin = self.eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let mmin = self.mu.iter().cloned().fold(f64::INFINITY, f64::min);
        1.0 / (emin * mmin).sqrt()
    }

    /// Smallest and largest of the six entries.
    pub fn extremes(&self) -> (f64, f64) {
        self.eps
            .iter()
            .chain(self.mu.iter())
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn min_pairwise_gap(r: [f64; 3]) -> f64 {
    (r[0] - r[1])
        .abs()
        .min((r[1] - r[2]).abs())
        .min((r[0] - r[2]).abs())
}

/// Regularity class declared for a sampled material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "exponent")]
pub enum Regularity {
    Holder(f64),
    Lipschitz,
}

/// Symmetric ε(x), μ(x) sampled on a spatial grid, stored in row-major order
/// with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialField {
    pub grid: [usize; 3],
    pub eps: Vec<Matrix3<f64>>,
    pub mu: Vec<Matrix3<f64>>,
    pub regularity: Regularity,
    pub band: Band,
    pub c_sep: f64,
}

impl MaterialField {
    pub fn new(
        grid: [usize; 3],
        eps: Vec<Matrix3<f64>>,
        mu: Vec<Matrix3<f64>>,
    ) -> Result<Self, TensorError> {
        let expected = grid.iter().product();
        for (name, v) in [("eps", &eps), ("mu", &mu)] {
            if v.len() != expected {
                return Err(TensorError::SampleCount {
                    name,
                    got: v.len(),
                    expected,
                });
            }
        }
        Ok(Self {
            grid,
            eps,
            mu,
            regularity: Regularity::Lipschitz,
            band: Band::default(),
            c_sep: DEFAULT_C_SEP,
        })
    }

    /// Spatially constant field equal to `m` at every node.
    pub fn uniform(grid: [usize; 3], m: &DiagonalMaterial) -> Self {
        let n = grid.iter().product();
        Self {
            grid,
            eps: vec![m.eps_matrix(); n],
            mu: vec![m.mu_matrix(); n],
            regularity: Regularity::Lipschitz,
            band: Band::default(),
            c_sep: DEFAULT_C_SEP,
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// Grid coordinates of a flat node index.
    pub fn node_coords(&self, node: usize) -> [usize; 3] {
        let [_, ny, nz] = self.grid;
        [node / (ny * nz), (node / nz) % ny, node % nz]
    }

    fn check_samples(&self) -> Result<(), TensorError> {
        for (name, v) in [("eps", &self.eps), ("mu", &self.mu)] {
            for (node, a) in v.iter().enumerate() {
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(TensorError::NonFinite { name, node });
                }
                let asymmetry = (a - a.transpose()).amax();
                if asymmetry > 1e-12 * a.amax().max(1.0) {
                    return Err(TensorError::NonSymmetric {
                        name,
                        node,
                        asymmetry,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Ellipticity,
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub min_gap: f64,
    pub violations: Vec<Violation>,
}

/// Either kind of material accepted by [`validate_material`].
#[derive(Debug, Clone, Copy)]
pub enum MaterialRef<'a> {
    Diagonal(&'a DiagonalMaterial),
    Field(&'a MaterialField),
}

impl MaterialRef<'_> {
    /// ε at a grid node (constant for a diagonal material).
    pub fn eps_at(&self, node: usize) -> Matrix3<f64> {
        match self {
            MaterialRef::Diagonal(m) => m.eps_matrix(),
            MaterialRef::Field(f) => f.eps[node],
        }
    }

    pub fn mu_at(&self, node: usize) -> Matrix3<f64> {
        match self {
            MaterialRef::Diagonal(m) => m.mu_matrix(),
            MaterialRef::Field(f) => f.mu[node],
        }
    }

    /// Sample grid of a field material, `None` for a constant one.
    pub fn grid(&self) -> Option<[usize; 3]> {
        match self {
            MaterialRef::Diagonal(_) => None,
            MaterialRef::Field(f) => Some(f.grid),
        }
    }
}

impl<'a> From<&'a DiagonalMaterial> for MaterialRef<'a> {
    fn from(m: &'a DiagonalMaterial) -> Self {
        MaterialRef::Diagonal(m)
    }
}

impl<'a> From<&'a MaterialField> for MaterialRef<'a> {
    fn from(m: &'a MaterialField) -> Self {
        MaterialRef::Field(m)
    }
}

/// Checks every eigenvalue against `band` and the pairwise ratio gap against
/// `c_sep`. For a field the ratios are the generalized eigenvalues of (ε, μ).
pub fn validate_material<'a>(
    m: impl Into<MaterialRef<'a>>,
    band: Band,
    c_sep: f64,
) -> Result<ValidationReport, TensorError> {
    Band::new(band.lo, band.hi)?;
    if !(c_sep >= 0.0 && c_sep.is_finite()) {
        return Err(TensorError::InvalidSeparation(c_sep));
    }
    let mut violations = Vec::new();
    let min_gap = match m.into() {
        MaterialRef::Diagonal(d) => {
            for (name, values) in [("eps", d.eps), ("mu", d.mu)] {
                for (i, v) in values.into_iter().enumerate() {
                    if !band.contains(v) {
                        violations.push(Violation {
                            kind: ViolationKind::Ellipticity,
                            location: format!("{name}[{i}]"),
                            value: v,
                        });
                    }
                }
            }
            let gap = d.min_ratio_gap();
            if gap < c_sep {
                violations.push(Violation {
                    kind: ViolationKind::Separation,
                    location: "ratios".into(),
                    value: gap,
                });
            }
            gap
        }
        MaterialRef::Field(f) => {
            f.check_samples()?;
            let mut min_gap = f64::INFINITY;
            for node in 0..f.len() {
                for (name, a) in [("eps", &f.eps[node]), ("mu", &f.mu[node])] {
                    let ev = SymmetricEigen::new(*a).eigenvalues;
                    for &v in ev.iter() {
                        if !band.contains(v) {
                            violations.push(Violation {
                                kind: ViolationKind::Ellipticity,
                                location: format!("{name} node {node:?}", node = f.node_coords(node)),
                                value: v,
                            });
                        }
                    }
                }
                let gap = min_pairwise_gap(generalized_ratios(&f.eps[node], &f.mu[node]));
                if gap < c_sep {
                    violations.push(Violation {
                        kind: ViolationKind::Separation,
                        location: format!("node {:?}", f.node_coords(node)),
                        value: gap,
                    });
                }
                min_gap = min_gap.min(gap);
            }
            min_gap
        }
    };
    Ok(ValidationReport {
        pass: violations.is_empty(),
        min_gap,
        violations,
    })
}

/// Eigenvalues of μ^{-1/2} ε μ^{-1/2}, sorted ascending.
fn generalized_ratios(eps: &Matrix3<f64>, mu: &Matrix3<f64>) -> [f64; 3] {
    let se = SymmetricEigen::new(*mu);
    let inv_sqrt = se.eigenvalues.map(|v| 1.0 / v.abs().sqrt());
    let w = se.eigenvectors * Matrix3::from_diagonal(&inv_sqrt) * se.eigenvectors.transpose();
    let s = w * eps * w;
    let mut ev: [f64; 3] = SymmetricEigen::new((s + s.transpose()) * 0.5)
        .eigenvalues
        .into();
    ev.sort_by(f64::total_cmp);
    ev
}

/// A diagonal law rescaled so that μ becomes the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    /// ε*_i = ε_i/μ_i.
    pub eps_star: [f64; 3],
    /// r_i = 1/(ξ0·sqrt(μ_{i+1}μ_{i+2})), so that λ_i = r_i ξ_i.
    pub scale: [f64; 3],
}

impl StandardForm {
    pub fn to_standard(&self, xi: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|i| xi[i] * self.scale[i])
    }

    pub fn from_standard(&self, lam: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|i| lam[i] / self.scale[i])
    }

    /// 1 − q0*(λ) + q1*(λ).
    pub fn polynomial(&self, lam: [f64; 3]) -> f64 {
        standard_polynomial(self.eps_star, lam)
    }
}

/// q0*(λ) = Σ λ_i² (1/ε_{i+1} + 1/ε_{i+2}).
pub fn standard_q0(eps: [f64; 3], lam: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| lam[i] * lam[i] * (1.0 / eps[(i + 1) % 3] + 1.0 / eps[(i + 2) % 3]))
        .sum()
}

/// q1*(λ) = (Σ ε_i λ_i²)(Σ λ_i²)/(ε1ε2ε3).
pub fn standard_q1(eps: [f64; 3], lam: [f64; 3]) -> f64 {
    let a: f64 = (0..3).map(|i| eps[i] * lam[i] * lam[i]).sum();
    let s: f64 = lam.iter().map(|l| l * l).sum();
    a * s / (eps[0] * eps[1] * eps[2])
}

pub fn standard_polynomial(eps: [f64; 3], lam: [f64; 3]) -> f64 {
    1.0 - standard_q0(eps, lam) + standard_q1(eps, lam)
}

pub fn reduce_to_standard_form(m: &DiagonalMaterial, xi0: f64) -> Result<StandardForm, TensorError> {
    if xi0 == 0.0 || !xi0.is_finite() {
        return Err(TensorError::ZeroTimeFrequency);
    }
    let mu = m.mu();
    let scale = [0, 1, 2].map(|i| 1.0 / (xi0.abs() * (mu[(i + 1) % 3] * mu[(i + 2) % 3]).sqrt()));
    Ok(StandardForm {
        eps_star: m.ratios(),
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_materials_validate() {
        let m = DiagonalMaterial::with_unit_mu([1.0, 2.0, 3.0]).unwrap();
        let r = validate_material(&m, Band::new(0.5, 4.0).unwrap(), 0.5).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_gap, 1.0);

        let m = DiagonalMaterial::with_unit_mu([1.0, 1.0, 3.0]).unwrap();
        let r = validate_material(&m, Band::default(), 0.5).unwrap();
        assert!(!r.pass);
        assert_eq!(r.min_gap, 0.0);
        assert_eq!(r.violations[0].kind, ViolationKind::Separation);

        let m = DiagonalMaterial::new([2.0, 4.0, 6.0], [2.0; 3]).unwrap();
        let r = validate_material(&m, Band::default(), 0.5).unwrap();
        assert!(r.pass);
        assert_eq!(m.ratios(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(DiagonalMaterial::new([1.0, 0.0, 1.0], [1.0; 3]).is_err());
        assert!(DiagonalMaterial::new([1.0, f64::NAN, 1.0], [1.0; 3]).is_err());
        assert!(Band::new(2.0, 1.0).is_err());
    }

    #[test]
    fn field_rejects_asymmetric_sample() {
        let mut f = MaterialField::uniform([2, 2, 1], &DiagonalMaterial::isotropic());
        f.eps[3][(0, 1)] = 0.2;
        let err = validate_material(&f, Band::default(), 0.0).unwrap_err();
        assert!(matches!(err, TensorError::NonSymmetric { node: 3, .. }));
    }

    #[test]
    fn field_gap_uses_generalized_ratios() {
        let m = DiagonalMaterial::new([2.0, 4.0, 6.0], [2.0; 3]).unwrap();
        let f = MaterialField::uniform([2, 1, 1], &m);
        let r = validate_material(&f, Band::default(), 0.5).unwrap();
        assert!(r.pass);
        assert!((r.min_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_form_scales() {
        let m = DiagonalMaterial::new([2.0, 4.0, 6.0], [2.0; 3]).unwrap();
        let sf = reduce_to_standard_form(&m, 1.0).unwrap();
        assert_eq!(sf.eps_star, [1.0, 2.0, 3.0]);
        for r in sf.scale {
            assert!((r - 0.5).abs() < 1e-15);
        }
        assert_eq!(
            reduce_to_standard_form(&m, 0.0),
            Err(TensorError::ZeroTimeFrequency)
        );
    }
}
