//! Smooth eigenvector branches of parameter-dependent symmetric matrices.
//!
//! An eigenvector of a simple eigenvalue is determined up to sign. Along a
//! path the sign is fixed by requiring consecutive vectors to have positive
//! overlap. On a grid the same rule is applied along a spanning tree, after
//! which every grid edge is checked. Around a loop the composition of these
//! choices may flip the sign; [`detect_holonomy`] reports that flip.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensors::MaterialField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("eigenvalue not simple at {location} (gap {gap:e} < {gap_min:e})")]
    NotSimple {
        location: String,
        gap: f64,
        gap_min: f64,
    },
    #[error("matrix at {location} is not symmetric (asymmetry {asymmetry:e})")]
    NonSymmetric { location: String, asymmetry: f64 },
    #[error("path resolution insufficient between samples {from} and {to} (overlap {overlap:.3}); refine the step")]
    PathResolution { from: usize, to: usize, overlap: f64 },
    #[error("inconsistent global frame (domain not simply connected or resolution too coarse): edge {a}-{b}, column {column}, alignment {alignment:.3}")]
    InconsistentFrame {
        a: usize,
        b: usize,
        column: usize,
        alignment: f64,
    },
    #[error("grid domain is not connected ({reached} of {active} nodes reachable from the root)")]
    Disconnected { reached: usize, active: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("permeability at node {0} is not the identity")]
    NonUnitMu(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative gap threshold; the absolute threshold is this times the
    /// spectral radius of the sample (and at least this value).
    pub gap_min_rel: f64,
    /// Minimum |overlap| accepted between consecutive eigenvectors.
    pub align_threshold: f64,
    /// Maximum depth of automatic midpoint refinement along a path step.
    pub max_bisections: usize,
    /// Root node for grid globalization; the first active node if `None`.
    pub root: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            gap_min_rel: 1e-6,
            align_threshold: 0.5,
            max_bisections: 12,
            root: None,
        }
    }
}

impl EigenOptions {
    fn gap_min(&self, a: &DMatrix<f64>) -> f64 {
        self.gap_min_rel * a.amax().max(1.0)
    }
}

/// Flips `v` so that its first component above 1e-8 in magnitude is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-8) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

fn check_symmetric(a: &DMatrix<f64>, location: &dyn Fn() -> String) -> Result<(), EigenError> {
    let asymmetry = (a - a.transpose()).amax();
    if asymmetry > 1e-10 * a.amax().max(1.0) {
        return Err(EigenError::NonSymmetric {
            location: location(),
            asymmetry,
        });
    }
    Ok(())
}

/// Eigenvalues sorted ascending with matching eigenvector columns.
fn sorted_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let se = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| se.eigenvalues[i]));
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

fn gap_of(values: &DVector<f64>, idx: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(_, v)| (v - values[idx]).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Eigenpair of `a` whose eigenvalue is nearest `hint`, in canonical sign.
pub fn eigenpair_of(a: &DMatrix<f64>, hint: f64, opts: &EigenOptions) -> Result<(f64, DVector<f64>), EigenError> {
    check_symmetric(a, &|| "the given matrix".into())?;
    let (values, vectors) = sorted_eigen(a);
    let idx = (0..values.len())
        .min_by(|&i, &j| (values[i] - hint).abs().total_cmp(&(values[j] - hint).abs()))
        .ok_or_else(|| EigenError::InvalidDomain("empty matrix".into()))?;
    let gap = gap_of(&values, idx);
    let gap_min = opts.gap_min(a);
    if gap < gap_min {
        return Err(EigenError::NotSimple {
            location: "the given matrix".into(),
            gap,
            gap_min,
        });
    }
    let mut v = vectors.column(idx).into_owned();
    canonical_sign(&mut v);
    Ok((values[idx], v))
}

pub fn local_eigenpair<F>(field: &F, x: &[f64], hint: f64, opts: &EigenOptions) -> Result<(f64, DVector<f64>), EigenError>
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    eigenpair_of(&field(x), hint, opts).map_err(|e| relocate(e, x))
}

fn relocate(e: EigenError, x: &[f64]) -> EigenError {
    match e {
        EigenError::NotSimple { gap, gap_min, .. } => EigenError::NotSimple {
            location: format!("{x:?}"),
            gap,
            gap_min,
        },
        EigenError::NonSymmetric { asymmetry, .. } => EigenError::NonSymmetric {
            location: format!("{x:?}"),
            asymmetry,
        },
        other => other,
    }
}

/// Eigenvector sequence of one branch along a discretized path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathContinuation {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    /// Number of midpoints inserted by automatic refinement.
    pub refinements: usize,
}

struct Tracker<'a, F> {
    field: &'a F,
    opts: &'a EigenOptions,
    refinements: usize,
}

impl<F: Fn(&[f64]) -> DMatrix<f64>> Tracker<'_, F> {
    /// Eigenpair number `branch` (ascending order) at `x`, after checking simplicity.
    fn simple_pair(&self, x: &[f64], branch: usize) -> Result<(f64, DVector<f64>), EigenError> {
        let a = (self.field)(x);
        check_symmetric(&a, &|| format!("{x:?}"))?;
        let (values, vectors) = sorted_eigen(&a);
        let gap = gap_of(&values, branch);
        let gap_min = self.opts.gap_min(&a);
        if gap < gap_min {
            return Err(EigenError::NotSimple {
                location: format!("{x:?}"),
                gap,
                gap_min,
            });
        }
        Ok((values[branch], vectors.column(branch).into_owned()))
    }

    /// The eigenpair of `branch` at `to` continuing `v_from`, aligned in sign.
    fn step(
        &mut self,
        v_from: &DVector<f64>,
        from: &[f64],
        to: &[f64],
        branch: usize,
        idx: (usize, usize),
        depth: usize,
    ) -> Result<(f64, DVector<f64>), EigenError> {
        let (value, mut v) = self.simple_pair(to, branch)?;
        let overlap = v.dot(v_from);
        if overlap.abs() > self.opts.align_threshold {
            if overlap < 0.0 {
                v.neg_mut();
            }
            return Ok((value, v));
        }
        if depth >= self.opts.max_bisections {
            return Err(EigenError::PathResolution {
                from: idx.0,
                to: idx.1,
                overlap: overlap.abs(),
            });
        }
        self.refinements += 1;
        let mid: Vec<f64> = from.iter().zip(to).map(|(a, b)| 0.5 * (a + b)).collect();
        let (_, v_mid) = self.step(v_from, from, &mid, branch, idx, depth + 1)?;
        self.step(&v_mid, &mid, to, branch, idx, depth + 1)
    }
}

/// Continues the branch through `v_start` along `samples`.
///
/// The branch is the eigenvalue whose eigenvector has the largest overlap
/// with `v_start` at the first sample. Simple eigenvalues keep their position
/// in the ordered spectrum along the path, so the branch is followed by its
/// index and the overlap only decides sign and step resolution.
pub fn continue_along_path<F>(
    field: &F,
    samples: &[Vec<f64>],
    v_start: &DVector<f64>,
    opts: &EigenOptions,
) -> Result<PathContinuation, EigenError>
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    let Some(first) = samples.first() else {
        return Err(EigenError::InvalidDomain("path has no samples".into()));
    };
    let a0 = field(first);
    check_symmetric(&a0, &|| format!("{first:?}"))?;
    let (_, vecs0) = sorted_eigen(&a0);
    if v_start.len() != vecs0.nrows() {
        return Err(EigenError::InvalidDomain(format!(
            "start vector has length {}, matrix has order {}",
            v_start.len(),
            vecs0.nrows()
        )));
    }
    let start = v_start.normalize();
    let branch = (0..vecs0.ncols())
        .max_by(|&i, &j| vecs0.column(i).dot(&start).abs().total_cmp(&vecs0.column(j).dot(&start).abs()))
        .expect("nonempty spectrum");
    let mut tracker = Tracker {
        field,
        opts,
        refinements: 0,
    };
    let (l0, mut v0) = tracker.simple_pair(first, branch)?;
    if v0.dot(&start) < 0.0 {
        v0.neg_mut();
    }
    let mut values = vec![l0];
    let mut vectors = vec![v0];
    for k in 1..samples.len() {
        let prev = vectors[k - 1].clone();
        let (l, v) = tracker.step(&prev, &samples[k - 1], &samples[k], branch, (k - 1, k), 0)?;
        values.push(l);
        vectors.push(v);
    }
    Ok(PathContinuation {
        values,
        vectors,
        refinements: tracker.refinements,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub samples: usize,
    /// Sign of ⟨v_0, v_N⟩ per eigenbranch, ordered by ascending eigenvalue at the base point.
    pub signs: Vec<i8>,
    pub obstruction: bool,
}

/// Continues every eigenbranch once around the closed loop `samples`
/// (the last sample connects back to the first).
pub fn detect_holonomy<F>(field: &F, samples: &[Vec<f64>], opts: &EigenOptions) -> Result<HolonomyReport, EigenError>
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    let Some(first) = samples.first() else {
        return Err(EigenError::InvalidDomain("loop has no samples".into()));
    };
    let a0 = field(first);
    let (_, vectors) = sorted_eigen(&a0);
    let mut closed = samples.to_vec();
    closed.push(first.clone());
    let mut signs = Vec::with_capacity(vectors.ncols());
    for b in 0..vectors.ncols() {
        let mut v0 = vectors.column(b).into_owned();
        canonical_sign(&mut v0);
        let path = continue_along_path(field, &closed, &v0, opts)?;
        let end = path.vectors.last().expect("closed loop has samples");
        signs.push(if path.vectors[0].dot(end) > 0.0 { 1 } else { -1 });
    }
    Ok(HolonomyReport {
        samples: samples.len(),
        obstruction: signs.iter().any(|&s| s < 0),
        signs,
    })
}

/// Rectangular grid over a box, optionally restricted by a node mask and
/// optionally closed periodically for edge verification.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub n: Vec<usize>,
    pub active: Vec<bool>,
    pub periodic: bool,
}

impl GridDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> Result<Self, EigenError> {
        if lo.len() != hi.len() || lo.len() != n.len() || n.is_empty() {
            return Err(EigenError::InvalidDomain("lo, hi and n must have equal nonzero length".into()));
        }
        if n.iter().any(|&k| k == 0) {
            return Err(EigenError::InvalidDomain("every axis needs at least one node".into()));
        }
        let total = n.iter().product();
        Ok(Self {
            lo,
            hi,
            n,
            active: vec![true; total],
            periodic: false,
        })
    }

    /// Keeps only nodes whose coordinates satisfy `keep`.
    pub fn with_mask(mut self, keep: impl Fn(&[f64]) -> bool) -> Self {
        for node in 0..self.active.len() {
            self.active[node] = keep(&self.coords(node));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    fn index(&self, node: usize) -> Vec<usize> {
        let mut rem = node;
        let mut idx = vec![0; self.n.len()];
        for axis in (0..self.n.len()).rev() {
            idx[axis] = rem % self.n[axis];
            rem /= self.n[axis];
        }
        idx
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.n).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.index(node)
            .iter()
            .enumerate()
            .map(|(axis, &i)| {
                if self.n[axis] == 1 {
                    self.lo[axis]
                } else {
                    self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (self.n[axis] - 1) as f64
                }
            })
            .collect()
    }

    /// Forward neighbours along each axis (each undirected edge once).
    fn forward_edges(&self, node: usize, wrap: bool) -> Vec<usize> {
        let idx = self.index(node);
        let mut out = Vec::new();
        for axis in 0..self.n.len() {
            let mut j = idx.clone();
            if idx[axis] + 1 < self.n[axis] {
                j[axis] += 1;
            } else if wrap && self.n[axis] > 2 {
                j[axis] = 0;
            } else {
                continue;
            }
            out.push(self.flat(&j));
        }
        out
    }

    fn neighbours(&self, node: usize) -> Vec<usize> {
        let idx = self.index(node);
        let mut out = Vec::new();
        for axis in 0..self.n.len() {
            if idx[axis] > 0 {
                let mut j = idx.clone();
                j[axis] -= 1;
                out.push(self.flat(&j));
            }
            if idx[axis] + 1 < self.n[axis] {
                let mut j = idx.clone();
                j[axis] += 1;
                out.push(self.flat(&j));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAlignment {
    pub a: usize,
    pub b: usize,
    pub sign: i8,
    /// Smallest column overlap ⟨φ_i(a), φ_i(b)⟩ on this edge.
    pub min_overlap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCertificate {
    pub min_overlap: f64,
    /// Largest angle (radians) between matching columns across an edge.
    pub max_column_angle: f64,
    pub worst_edge: (usize, usize),
    pub max_orthogonality_error: f64,
    pub max_offdiagonal: f64,
    pub edges_checked: usize,
}

/// Orthogonal frames on the active nodes of a grid. `frames[node]` is `None`
/// for masked-out nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrameField {
    pub domain: GridDomain,
    pub frames: Vec<Option<DMatrix<f64>>>,
    pub eigenvalues: Vec<Option<DVector<f64>>>,
    pub edges: Vec<EdgeAlignment>,
    pub certificate: FrameCertificate,
}

impl EigenFrameField {
    pub fn frame(&self, node: usize) -> Option<&DMatrix<f64>> {
        self.frames[node].as_ref()
    }
}

pub fn globalize_on_grid<F>(field: &F, domain: &GridDomain, opts: &EigenOptions) -> Result<EigenFrameField, EigenError>
where
    F: Fn(&[f64]) -> DMatrix<f64>,
{
    let samples: Vec<Option<DMatrix<f64>>> = (0..domain.len())
        .map(|node| domain.active[node].then(|| field(&domain.coords(node))))
        .collect();
    globalize_samples(samples, domain, opts)
}

fn globalize_samples(samples: Vec<Option<DMatrix<f64>>>, domain: &GridDomain, opts: &EigenOptions) -> Result<EigenFrameField, EigenError> {
    let active = domain.active.iter().filter(|&&a| a).count();
    let root = match opts.root {
        Some(r) if r < domain.len() && domain.active[r] => r,
        Some(r) => return Err(EigenError::InvalidDomain(format!("root {r} is not an active node"))),
        None => domain
            .active
            .iter()
            .position(|&a| a)
            .ok_or_else(|| EigenError::InvalidDomain("no active nodes".into()))?,
    };

    let mut frames: Vec<Option<DMatrix<f64>>> = vec![None; domain.len()];
    let mut values: Vec<Option<DVector<f64>>> = vec![None; domain.len()];
    let decompose = |node: usize| -> Result<(DVector<f64>, DMatrix<f64>), EigenError> {
        let a = samples[node].as_ref().expect("active node has a sample");
        let location = || format!("node {node} at {:?}", domain.coords(node));
        check_symmetric(a, &location)?;
        let (vals, vecs) = sorted_eigen(a);
        let gap_min = opts.gap_min(a);
        for i in 0..vals.len() {
            let gap = gap_of(&vals, i);
            if gap < gap_min {
                return Err(EigenError::NotSimple {
                    location: location(),
                    gap,
                    gap_min,
                });
            }
        }
        Ok((vals, vecs))
    };

    let (v0, mut f0) = decompose(root)?;
    for mut col in f0.column_iter_mut() {
        let mut c = col.clone_owned();
        canonical_sign(&mut c);
        col.copy_from(&c);
    }
    frames[root] = Some(f0);
    values[root] = Some(v0);
    let mut queue = VecDeque::from([root]);
    let mut reached = 1;
    while let Some(node) = queue.pop_front() {
        for nb in domain.neighbours(node) {
            if !domain.active[nb] || frames[nb].is_some() {
                continue;
            }
            let (vals, mut vecs) = decompose(nb)?;
            let parent = frames[node].as_ref().expect("visited node has a frame");
            for i in 0..vecs.ncols() {
                let overlap = parent.column(i).dot(&vecs.column(i));
                if overlap.abs() <= opts.align_threshold {
                    return Err(EigenError::PathResolution {
                        from: node,
                        to: nb,
                        overlap: overlap.abs(),
                    });
                }
                if overlap < 0.0 {
                    vecs.column_mut(i).neg_mut();
                }
            }
            frames[nb] = Some(vecs);
            values[nb] = Some(vals);
            reached += 1;
            queue.push_back(nb);
        }
    }
    if reached != active {
        return Err(EigenError::Disconnected { reached, active });
    }

    let mut edges = Vec::new();
    let mut cert = FrameCertificate {
        min_overlap: f64::INFINITY,
        max_column_angle: 0.0,
        worst_edge: (root, root),
        max_orthogonality_error: 0.0,
        max_offdiagonal: 0.0,
        edges_checked: 0,
    };
    for node in 0..domain.len() {
        let Some(fa) = frames[node].as_ref() else { continue };
        let a = samples[node].as_ref().expect("active node has a sample");
        let d = fa.transpose() * a * fa;
        let n = d.nrows();
        cert.max_orthogonality_error = cert
            .max_orthogonality_error
            .max((fa.transpose() * fa - DMatrix::identity(n, n)).amax());
        let offdiag = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)].abs())
            .fold(0.0, f64::max);
        cert.max_offdiagonal = cert.max_offdiagonal.max(offdiag);
        for nb in domain.forward_edges(node, domain.periodic) {
            let Some(fb) = frames[nb].as_ref() else { continue };
            let min_overlap = (0..fa.ncols())
                .map(|i| fa.column(i).dot(&fb.column(i)))
                .fold(f64::INFINITY, f64::min);
            cert.edges_checked += 1;
            if min_overlap < cert.min_overlap {
                cert.min_overlap = min_overlap;
                cert.worst_edge = (node, nb);
            }
            if min_overlap <= 0.0 {
                let column = (0..fa.ncols())
                    .min_by(|&i, &j| fa.column(i).dot(&fb.column(i)).total_cmp(&fa.column(j).dot(&fb.column(j))))
                    .unwrap_or(0);
                return Err(EigenError::InconsistentFrame {
                    a: node,
                    b: nb,
                    column,
                    alignment: min_overlap,
                });
            }
            edges.push(EdgeAlignment {
                a: node,
                b: nb,
                sign: 1,
                min_overlap,
            });
        }
    }
    cert.max_column_angle = cert.min_overlap.clamp(-1.0, 1.0).acos();
    Ok(EigenFrameField {
        domain: domain.clone(),
        frames,
        eigenvalues: values,
        edges,
        certificate: cert,
    })
}

/// Principal frame of a permittivity field with μ ≡ 1, together with the
/// principal values ε^d at each node. The grid is treated as periodic when
/// edges are verified.
pub fn diagonalize_material(eps_field: &MaterialField, opts: &EigenOptions) -> Result<(EigenFrameField, Vec<[f64; 3]>), EigenError> {
    for (node, mu) in eps_field.mu.iter().enumerate() {
        if (mu - Matrix3::identity()).amax() > 1e-12 {
            return Err(EigenError::NonUnitMu(node));
        }
    }
    let [nx, ny, nz] = eps_field.grid;
    let mut domain = GridDomain::new(
        vec![0.0; 3],
        vec![(nx - 1) as f64, (ny - 1) as f64, (nz - 1) as f64],
        vec![nx, ny, nz],
    )?;
    domain.periodic = true;
    for (node, e) in eps_field.eps.iter().enumerate() {
        let mut vals: [f64; 3] = SymmetricEigen::new(*e).eigenvalues.into();
        vals.sort_by(f64::total_cmp);
        let gap = (vals[1] - vals[0]).min(vals[2] - vals[1]);
        if gap < eps_field.c_sep {
            return Err(EigenError::NotSimple {
                location: format!("node {:?}", eps_field.node_coords(node)),
                gap,
                gap_min: eps_field.c_sep,
            });
        }
    }
    let samples = eps_field
        .eps
        .iter()
        .map(|e| Some(DMatrix::from_iterator(3, 3, e.iter().cloned())))
        .collect();
    let frames = globalize_samples(samples, &domain, opts)?;
    let diag = frames
        .eigenvalues
        .iter()
        .map(|v| {
            let v = v.as_ref().expect("every node is active");
            [v[0], v[1], v[2]]
        })
        .collect();
    Ok((frames, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn example_62(x: &[f64]) -> DMatrix<f64> {
        let (c, s) = (x[0].cos(), x[0].sin());
        DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
    }

    #[test]
    fn diagonal_eigenpair() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let (l, v) = eigenpair_of(&a, 2.1, &EigenOptions::default()).unwrap();
        assert_eq!(l, 2.0);
        assert!((v - DVector::from_vec(vec![0.0, 1.0, 0.0])).amax() < 1e-15);
        let (l, v) = local_eigenpair(&example_62, &[0.0], 1.0, &EigenOptions::default()).unwrap();
        assert_eq!(l, 1.0);
        assert!((v[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_eigenvalue_is_rejected() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(eigenpair_of(&a, 1.0, &EigenOptions::default()), Err(EigenError::NotSimple { .. })));
    }

    #[test]
    fn half_turn_rotates_eigenvector() {
        let samples: Vec<Vec<f64>> = (0..=64).map(|k| vec![PI * k as f64 / 64.0]).collect();
        let v0 = DVector::from_vec(vec![1.0, 0.0]);
        let path = continue_along_path(&example_62, &samples, &v0, &EigenOptions::default()).unwrap();
        let end = path.vectors.last().unwrap();
        assert!(end[0].abs() < 1e-6 && (end[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coarse_path_is_refined() {
        let samples = vec![vec![0.0], vec![2.5]];
        let v0 = DVector::from_vec(vec![1.0, 0.0]);
        let path = continue_along_path(&example_62, &samples, &v0, &EigenOptions::default()).unwrap();
        assert!(path.refinements > 0);
        let end = &path.vectors[1];
        assert!((end[0] - 1.25f64.cos()).abs() < 1e-12);
        let strict = EigenOptions {
            max_bisections: 0,
            ..EigenOptions::default()
        };
        assert!(matches!(
            continue_along_path(&example_62, &samples, &v0, &strict),
            Err(EigenError::PathResolution { .. })
        ));
    }

    #[test]
    fn annulus_has_no_global_frame() {
        let field = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[x[0], x[1], x[1], -x[0]]);
        let domain = GridDomain::new(vec![-1.5, -1.5], vec![1.5, 1.5], vec![31, 31])
            .unwrap()
            .with_mask(|x| (0.5..=1.5).contains(&x[0].hypot(x[1])));
        assert!(matches!(
            globalize_on_grid(&field, &domain, &EigenOptions::default()),
            Err(EigenError::InconsistentFrame { .. })
        ));
    }
}
