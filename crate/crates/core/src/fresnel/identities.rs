//! Seeded randomized check of the symbol identities.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{adjugate, adjugate_z, characteristic, maxwell_symbol, me_mh, Covector};
use crate::tensors::DiagonalMaterial;

pub const BLOCK_TOL: f64 = 1e-12;
pub const DET_TOL: f64 = 1e-10;
pub const ADJ_TOL: f64 = 1e-10;
pub const ZEFF_TOL: f64 = 1e-10;

/// Sampling box for the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRanges {
    pub coeff: (f64, f64),
    pub xi0: f64,
    pub xi: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            coeff: (0.5, 4.0),
            xi0: 2.0,
            xi: 2.0,
        }
    }
}

/// Worst deviations over the samples, each with the sample index where it
/// occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub seed: u64,
    /// max entry of σp − blockdiag(M_E − ξ0², M_H − ξ0²).
    pub block_error: (f64, usize),
    /// max relative |det(M_E − ξ0²) − q_sextic| and the same for M_H.
    pub det_error: (f64, usize),
    /// max relative entry of Z ε/(ε1ε2ε3) − adj(M_E − ξ0²).
    pub adjugate_error: (f64, usize),
    /// max |(Z − Z_eff) v| / (|Z| |v|) over v ⊥ ξ′.
    pub z_eff_error: (f64, usize),
}

impl IdentityReport {
    pub fn checks(&self) -> [(&'static str, f64, f64); 4] {
        [
            ("block-diagonalization", self.block_error.0, BLOCK_TOL),
            ("determinant", self.det_error.0, DET_TOL),
            ("adjugate", self.adjugate_error.0, ADJ_TOL),
            ("z-eff", self.z_eff_error.0, ZEFF_TOL),
        ]
    }

    pub fn pass(&self) -> bool {
        self.checks().iter().all(|(_, v, tol)| v < tol)
    }
}

fn bump(slot: &mut (f64, usize), value: f64, idx: usize) {
    if value > slot.0 || value.is_nan() {
        *slot = (value, idx);
    }
}

fn max_entry(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Scaled deviations of the four identities at one covector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub block: f64,
    pub det: f64,
    pub adjugate: f64,
    /// `None` when `Z v` vanishes identically.
    pub z_eff: Option<f64>,
}

/// Evaluates the identities for `(m, cov)`, testing `Z_eff` on the vector `v`,
/// which should be orthogonal to `ξ′`.
pub fn identity_residuals(m: &DiagonalMaterial, cov: &Covector, v: [f64; 3]) -> IdentityResiduals {
    let eps = m.eps();
    let w2 = cov.xi0 * cov.xi0;
    let (me, mh) = me_mh(m, cov.xi);
    let ae = me - Matrix3::identity() * w2;
    let ah = mh - Matrix3::identity() * w2;
    let prod = maxwell_symbol(m, cov).product;
    let mut block = 0.0_f64;
    for r in 0..6 {
        for c in 0..6 {
            let want = match (r / 3, c / 3) {
                (0, 0) => ae[(r, c)],
                (1, 1) => ah[(r - 3, c - 3)],
                _ => 0.0,
            };
            block = block.max((prod[(r, c)] - want).norm());
        }
    }

    let scale = w2 + max_entry(&me).max(max_entry(&mh));
    let q = characteristic(m, cov).q_sextic;
    let det = (ae.determinant() - q).abs().max((ah.determinant() - q).abs());

    let z = adjugate_z(m, cov);
    let factor = Matrix3::from_diagonal(&Vector3::from(eps)) / (eps[0] * eps[1] * eps[2]);
    let adj = max_entry(&(z.z * factor - adjugate(&ae)));

    let v = Vector3::from(v);
    let denom = z.z.norm() * v.norm();
    IdentityResiduals {
        block,
        det: det / scale.powi(3).max(f64::MIN_POSITIVE),
        adjugate: adj / scale.powi(2).max(f64::MIN_POSITIVE),
        z_eff: (denom > 0.0).then(|| ((z.z - z.z_eff) * v).norm() / denom),
    }
}

pub fn identity_suite(samples: usize, seed: u64) -> IdentityReport {
    identity_suite_with(samples, seed, SampleRanges::default())
}

pub fn identity_suite_with(samples: usize, seed: u64, ranges: SampleRanges) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = IdentityReport {
        samples,
        seed,
        block_error: (0.0, 0),
        det_error: (0.0, 0),
        adjugate_error: (0.0, 0),
        z_eff_error: (0.0, 0),
    };
    let (lo, hi) = ranges.coeff;
    for idx in 0..samples {
        let eps: [f64; 3] = std::array::from_fn(|_| rng.random_range(lo..hi));
        let mu: [f64; 3] = std::array::from_fn(|_| rng.random_range(lo..hi));
        let m = DiagonalMaterial::new(eps, mu).expect("sampled coefficients are positive");
        let xi0 = rng.random_range(-ranges.xi0..ranges.xi0);
        let xi: [f64; 3] = std::array::from_fn(|_| rng.random_range(-ranges.xi..ranges.xi));
        let cov = Covector::new(xi0, xi);
        let k = Vector3::from(xi);
        let raw = Vector3::from(std::array::from_fn::<f64, 3, _>(|_| rng.random_range(-1.0..1.0)));
        let v = if k.norm() > 0.0 { raw - k * (k.dot(&raw) / k.norm_squared()) } else { raw };
        let r = identity_residuals(&m, &cov, v.into());
        bump(&mut rep.block_error, r.block, idx);
        bump(&mut rep.det_error, r.det, idx);
        bump(&mut rep.adjugate_error, r.adjugate, idx);
        if let Some(z) = r.z_eff {
            bump(&mut rep.z_eff_error, z, idx);
        }
    }
    rep
}
