//! Change of field variables into a pointwise eigenframe of the material.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::charges::{divergence_charges, divergence_pair};
use super::grid::{ChargePair, FieldKind, FieldState};
use super::SpectralError;
use crate::eigenfield::EigenFrameField;
use crate::tensors::MaterialField;

/// Result of [`transform_fields`].
#[derive(Debug, Clone)]
pub struct TransformReport {
    /// `(Φᵀ E, Φᵀ H)` as an (E,H)-tagged state in frame coordinates.
    pub u_tilde: FieldState,
    /// Diagonal entries of `Φᵀ ε Φ` and `Φᵀ μ Φ` per node.
    pub eps_d: Vec<[f64; 3]>,
    pub mu_d: Vec<[f64; 3]>,
    pub rho_tilde: ChargePair,
    pub rho: ChargePair,
    pub summary: TransformSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSummary {
    /// Largest `|ρ̃ − ρ|` over both charges.
    pub max_charge_diff: f64,
    /// `‖ρ̃ − ρ‖_{L²} / ‖ρ‖_{L²}` (absolute when `ρ = 0`).
    pub rel_charge_diff: f64,
    /// Largest off-diagonal entry of `Φᵀ ε Φ` or `Φᵀ μ Φ`.
    pub max_offdiag: f64,
    pub max_orthogonality_error: f64,
}

/// Expresses `u` in the frame `Φ` and recomputes the charges in divergence
/// form `ρ̃_e = Σ_j ∂_j(Σ_k Φ_{jk} ε^d_k ũ¹_k)`.
pub fn transform_fields(phi: &EigenFrameField, u: &FieldState, m: &MaterialField) -> Result<TransformReport, SpectralError> {
    u.expect_kind(FieldKind::EH)?;
    if m.grid != u.grid.n || phi.frames.len() != u.grid.len() {
        return Err(SpectralError::InvalidGrid(format!(
            "frame field has {} nodes, material grid {:?}, field grid {:?}",
            phi.frames.len(),
            m.grid,
            u.grid.n
        )));
    }
    let n = u.grid.len();
    let mut u_tilde = FieldState::zeros(u.grid, FieldKind::EH);
    u_tilde.time = u.time;
    let mut eps_d = Vec::with_capacity(n);
    let mut mu_d = Vec::with_capacity(n);
    let mut flux: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    let mut max_offdiag = 0.0_f64;
    let mut max_orth = 0.0_f64;
    for node in 0..n {
        let f = phi.frames[node].as_ref().ok_or(SpectralError::NonOrthogonalFrame { node, error: f64::INFINITY })?;
        if f.nrows() != 3 || f.ncols() != 3 {
            return Err(SpectralError::NonOrthogonalFrame { node, error: f64::INFINITY });
        }
        let p = Matrix3::from_fn(|r, c| f[(r, c)]);
        let orth = (p.transpose() * p - Matrix3::identity()).amax();
        if orth > 1e-10 {
            return Err(SpectralError::NonOrthogonalFrame { node, error: orth });
        }
        max_orth = max_orth.max(orth);
        let te = p.transpose() * m.eps[node] * p;
        let tm = p.transpose() * m.mu[node] * p;
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    max_offdiag = max_offdiag.max(te[(r, c)].abs()).max(tm[(r, c)].abs());
                }
            }
        }
        let ed = [te[(0, 0)], te[(1, 1)], te[(2, 2)]];
        let md = [tm[(0, 0)], tm[(1, 1)], tm[(2, 2)]];
        for k in 0..3 {
            let (mut e, mut h) = (0.0, 0.0);
            for j in 0..3 {
                e += p[(j, k)] * u.comps[j][node];
                h += p[(j, k)] * u.comps[3 + j][node];
            }
            u_tilde.comps[k][node] = e;
            u_tilde.comps[3 + k][node] = h;
        }
        for j in 0..3 {
            for k in 0..3 {
                flux[j][node] += p[(j, k)] * ed[k] * u_tilde.comps[k][node];
                flux[3 + j][node] += p[(j, k)] * md[k] * u_tilde.comps[3 + k][node];
            }
        }
        eps_d.push(ed);
        mu_d.push(md);
    }
    let fft = u.grid.fft();
    let (rho_e, rho_m) = divergence_pair(&u.grid, &fft, std::array::from_fn(|c| flux[c].as_slice()));
    let rho_tilde = ChargePair { grid: u.grid, rho_e, rho_m };
    let rho = divergence_charges(u, m)?;
    let diff: f64 = rho_tilde
        .rho_e
        .iter()
        .zip(&rho.rho_e)
        .chain(rho_tilde.rho_m.iter().zip(&rho.rho_m))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        * u.grid.cell_volume().sqrt();
    let base = rho.l2_norm();
    let summary = TransformSummary {
        max_charge_diff: rho_tilde.max_abs_diff(&rho),
        rel_charge_diff: if base > 0.0 { diff / base } else { diff },
        max_offdiag,
        max_orthogonality_error: max_orth,
    };
    Ok(TransformReport {
        u_tilde,
        eps_d,
        mu_d,
        rho_tilde,
        rho,
        summary,
    })
}
