//! Geometry of the Fresnel surface in standard form (μ* = 1, ξ0 = 1).
//!
//! The surface is `F(λ) = 1 − q0*(λ) + q1*(λ) = 0`. Along a ray `λ = r·d` this
//! is the quadratic `1 − a r² + b r⁴` in `r²`, so every direction meets an
//! inner and an outer sheet. The two sheets touch at four conical points.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{
    adjugate, characteristic, quartic_dxi0, quartic_gradient, quartic_hessian, Covector,
    FresnelError,
};
use crate::tensors::{
    reduce_to_standard_form, standard_q0, standard_q1, DiagonalMaterial, StandardForm,
    DEFAULT_C_SEP,
};

/// Default radius of the neighbourhoods around singular points.
pub const DEFAULT_R_SING: f64 = 0.15;
/// Default Gaussian-curvature threshold separating S2 from S1.
pub const DEFAULT_KAPPA_MIN: f64 = 1e-3;

/// The four conical points of the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPointSet {
    /// Points in standard-form coordinates (ξ0 = 1, μ* = 1).
    pub standard: [[f64; 3]; 4],
    /// The same points in the original spatial frequencies at ξ0 = 1.
    pub original: [[f64; 3]; 4],
    /// Zero-based axis `j` such that ε*_{j+1} lies between ε*_j and ε*_{j+2}.
    pub branch: usize,
    pub valid: bool,
}

/// Residuals certifying that a point is a conical singularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularCertificate {
    pub q: f64,
    pub grad_norm: f64,
    pub dq_dxi0: f64,
    pub hessian_det: f64,
}

impl SingularPointSet {
    pub fn certify(&self, m: &DiagonalMaterial) -> [SingularCertificate; 4] {
        self.original.map(|xi| {
            let cov = Covector::new(1.0, xi);
            let g = quartic_gradient(m, &cov);
            SingularCertificate {
                q: characteristic(m, &cov).q_quartic,
                grad_norm: Vector3::from(g).norm(),
                dq_dxi0: quartic_dxi0(m, &cov),
                hessian_det: quartic_hessian(m, &cov).determinant(),
            }
        })
    }

    /// Distance from a standard-form point to the nearest singular point.
    pub fn distance(&self, lam: [f64; 3]) -> f64 {
        self.standard
            .iter()
            .map(|p| dist(*p, lam))
            .fold(f64::INFINITY, f64::min)
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

fn between(x: f64, a: f64, b: f64) -> bool {
    a.min(b) <= x && x <= a.max(b)
}

pub fn singular_points(m: &DiagonalMaterial) -> Result<SingularPointSet, FresnelError> {
    singular_points_with(m, DEFAULT_C_SEP)
}

pub fn singular_points_with(m: &DiagonalMaterial, c_sep: f64) -> Result<SingularPointSet, FresnelError> {
    let gap = m.min_ratio_gap();
    if gap < c_sep || gap == 0.0 {
        return Err(FresnelError::Separation { gap, c_sep });
    }
    let sf = reduce_to_standard_form(m, 1.0)?;
    let e = sf.eps_star;
    let j = (0..3)
        .find(|&j| between(e[(j + 1) % 3], e[j], e[(j + 2) % 3]))
        .expect("distinct ratios always have a middle value");
    let (k, l) = ((j + 1) % 3, (j + 2) % 3);
    let lj = (e[l] * (e[j] - e[k]) / (e[j] - e[l])).sqrt();
    let ll = (e[j] * (e[l] - e[k]) / (e[l] - e[j])).sqrt();
    let mut standard = [[0.0; 3]; 4];
    for (n, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        standard[n][j] = sa * lj;
        standard[n][l] = sb * ll;
    }
    Ok(SingularPointSet {
        standard,
        original: standard.map(|p| sf.from_standard(p)),
        branch: j,
        valid: true,
    })
}

/// α(s, t) together with the distance |s − t| to the singular limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDiagnostic {
    pub alpha: f64,
    pub gap: f64,
}

pub fn surface_param(m: &DiagonalMaterial, s: f64, t: f64) -> Result<ParamDiagnostic, FresnelError> {
    let e = m.ratios();
    let p = e[0] * e[1] * e[2];
    let sum = e[0] + e[1] + e[2];
    let pairs = e[0] * e[1] + e[0] * e[2] + e[1] * e[2];
    let den = s * s * t - sum * s * t + pairs * t - p;
    if den.abs() < 1e-12 {
        return Err(FresnelError::DegenerateParametrization(den));
    }
    Ok(ParamDiagnostic {
        alpha: (t - s) * p / den,
        gap: (s - t).abs(),
    })
}

/// `s = |λ|²` and `t = ε1ε2ε3/Σ ε_i λ_i²` of a standard-form point.
pub fn s_t(eps_star: [f64; 3], lam: [f64; 3]) -> (f64, f64) {
    let s = lam.iter().map(|x| x * x).sum();
    let w: f64 = (0..3).map(|i| eps_star[i] * lam[i] * lam[i]).sum();
    (s, eps_star.iter().product::<f64>() / w)
}

/// Closed-form Gaussian and mean curvature from `s` and `α(s, t)`.
pub fn closed_form_curvature(eps_star: [f64; 3], s: f64, alpha: f64) -> (f64, f64) {
    let e = eps_star;
    let k = (0..3).map(|i| alpha - e[i]).product::<f64>() / (alpha * (0..3).map(|i| s - e[i]).product::<f64>());
    let pair = |a: usize, b: usize| (alpha - e[a]) * (alpha - e[b]) / ((s - e[a]) * (s - e[b]));
    let sa = alpha.sqrt();
    let km = -0.5 * (s / sa * k - (pair(0, 1) + pair(1, 2) + pair(0, 2)) / sa);
    (k, km)
}

/// Curvatures at a regular surface point from both the closed form and the
/// implicit-surface formulas. Normals point away from the origin and mean
/// curvature is positive on convex pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub point: [f64; 3],
    pub s: f64,
    pub t: f64,
    pub alpha: Option<f64>,
    pub k_closed: Option<f64>,
    pub km_closed: Option<f64>,
    pub k_implicit: f64,
    pub km_implicit: f64,
    pub principal: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOptions {
    pub on_surface_tol: f64,
    pub exclusion_radius: f64,
    pub grad_tol: f64,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self {
            on_surface_tol: 1e-8,
            exclusion_radius: 1e-2,
            grad_tol: 1e-10,
        }
    }
}

/// The material with μ = 1 whose Fresnel polynomial at ξ0 = 1 is the standard form.
fn standard_material(sf: &StandardForm) -> DiagonalMaterial {
    DiagonalMaterial::with_unit_mu(sf.eps_star).expect("ratios of an admissible material are positive")
}

fn all_equal(e: [f64; 3]) -> bool {
    let scale = e[0].abs().max(e[1].abs()).max(e[2].abs());
    (e[0] - e[1]).abs() <= 1e-12 * scale && (e[1] - e[2]).abs() <= 1e-12 * scale
}

/// Value, gradient and Hessian of the defining function at `lam`. For equal
/// ratios the polynomial is a perfect square and its square root is used.
fn defining_function(sf: &StandardForm, lam: [f64; 3]) -> (f64, Vector3<f64>, Matrix3<f64>) {
    if all_equal(sf.eps_star) {
        let c = sf.eps_star[0];
        let s: f64 = lam.iter().map(|x| x * x).sum();
        let g = Vector3::from(lam) * (-2.0 / c);
        return (1.0 - s / c, g, Matrix3::identity() * (-2.0 / c));
    }
    let m = standard_material(sf);
    let cov = Covector::new(1.0, lam);
    (
        characteristic(&m, &cov).q_quartic,
        Vector3::from(quartic_gradient(&m, &cov)),
        quartic_hessian(&m, &cov),
    )
}

pub fn curvatures(m: &DiagonalMaterial, point: [f64; 3]) -> Result<CurvatureReport, FresnelError> {
    curvatures_with(m, point, CurvatureOptions::default())
}

pub fn curvatures_with(
    m: &DiagonalMaterial,
    point: [f64; 3],
    opts: CurvatureOptions,
) -> Result<CurvatureReport, FresnelError> {
    let sf = reduce_to_standard_form(m, 1.0)?;
    let (f, mut g, mut h) = defining_function(&sf, point);
    if g.dot(&Vector3::from(point)) < 0.0 {
        g = -g;
        h = -h;
    }
    if f.abs() > opts.on_surface_tol {
        return Err(FresnelError::OffSurface(f));
    }
    if let Ok(sp) = singular_points(m) {
        let distance = sp.distance(point);
        if distance < opts.exclusion_radius {
            return Err(FresnelError::NearSingular {
                distance,
                radius: opts.exclusion_radius,
            });
        }
    }
    let gn = g.norm();
    if gn < opts.grad_tol {
        return Err(FresnelError::VanishingGradient(gn));
    }
    let k_implicit = (g.transpose() * adjugate(&h) * g)[0] / gn.powi(4);
    let km_implicit = (gn * gn * h.trace() - (g.transpose() * h * g)[0]) / (2.0 * gn.powi(3));
    let disc = (km_implicit * km_implicit - k_implicit).max(0.0).sqrt();
    let principal = [km_implicit - disc, km_implicit + disc];

    let (s, t) = s_t(sf.eps_star, point);
    let closed = surface_param(m, s, t)
        .ok()
        .filter(|p| p.alpha > 0.0 && p.gap > 0.0)
        .map(|p| {
            let (k, km) = closed_form_curvature(sf.eps_star, s, p.alpha);
            (p.alpha, k, km)
        })
        .filter(|(_, k, km)| k.is_finite() && km.is_finite());
    Ok(CurvatureReport {
        point,
        s,
        t,
        alpha: closed.map(|c| c.0),
        k_closed: closed.map(|c| c.1),
        km_closed: closed.map(|c| c.2),
        k_implicit,
        km_implicit,
        principal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    Inner,
    Outer,
}

/// Radii `r²` where the ray through unit direction `d` meets the two sheets.
pub fn sheet_radii_sq(eps_star: [f64; 3], d: [f64; 3]) -> (f64, f64) {
    let a = standard_q0(eps_star, d);
    let b = standard_q1(eps_star, d);
    let disc = (a * a - 4.0 * b).max(0.0).sqrt();
    let outer = (a + disc) / (2.0 * b);
    let inner = 2.0 / (a + disc);
    let g = |rho: f64| 1.0 - a * rho + b * rho * rho;
    (polish(g, inner), polish(g, outer))
}

/// Bisection refinement of a simple root of `g` near `rho`.
fn polish(g: impl Fn(f64) -> f64, rho: f64) -> f64 {
    let mut lo = rho * (1.0 - 1e-6);
    let mut hi = rho * (1.0 + 1e-6);
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        return rho;
    }
    while hi - lo > 1e-12 * rho {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Point on the given sheet along direction `d` (normalized internally).
pub fn sheet_point(eps_star: [f64; 3], d: [f64; 3], sheet: Sheet) -> [f64; 3] {
    let n = dist(d, [0.0; 3]);
    let u = d.map(|x| x / n);
    let (inner, outer) = sheet_radii_sq(eps_star, u);
    let r = match sheet {
        Sheet::Inner => inner,
        Sheet::Outer => outer,
    }
    .sqrt();
    u.map(|x| x * r)
}

/// Deterministic quasi-uniform directions on the unit sphere.
pub fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshPoint {
    pub coords: [f64; 3],
    pub sheet: Sheet,
}

/// Both sheets sampled along `n_dirs` directions.
pub fn surface_mesh(m: &DiagonalMaterial, n_dirs: usize) -> Vec<MeshPoint> {
    let e = m.ratios();
    fibonacci_directions(n_dirs)
        .into_iter()
        .flat_map(|d| {
            [Sheet::Inner, Sheet::Outer].map(|sheet| MeshPoint {
                coords: sheet_point(e, d, sheet),
                sheet,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    S1,
    S2,
    S3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionRadii {
    pub r_sing: f64,
    pub kappa_min: f64,
}

impl Default for RegionRadii {
    fn default() -> Self {
        Self {
            r_sing: DEFAULT_R_SING,
            kappa_min: DEFAULT_KAPPA_MIN,
        }
    }
}

/// A labelled mesh point with its geometric data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub coords: [f64; 3],
    pub s: f64,
    pub t: f64,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub km: Option<f64>,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub points: Vec<SurfacePoint>,
    pub counts: [usize; 3],
    /// Number of clusters of S3 points.
    pub s3_components: usize,
    /// Smallest |principal curvature| observed on S1.
    pub s1_min_principal: f64,
    pub warnings: Vec<String>,
}

pub fn classify_regions(
    m: &DiagonalMaterial,
    mesh: &[[f64; 3]],
    radii: RegionRadii,
) -> Result<Classification, FresnelError> {
    if mesh.is_empty() {
        return Err(FresnelError::EmptyMesh);
    }
    let e = m.ratios();
    let mut warnings = Vec::new();
    let singular = match singular_points(m) {
        Ok(sp) => Some(sp),
        Err(err) => {
            warnings.push(format!("{err}; no singular neighbourhoods"));
            None
        }
    };
    let opts = CurvatureOptions {
        exclusion_radius: 0.0,
        ..CurvatureOptions::default()
    };
    let mut s1_min = f64::INFINITY;
    let mut points = Vec::with_capacity(mesh.len());
    for &coords in mesh {
        let (s, t) = s_t(e, coords);
        let near = singular
            .as_ref()
            .is_some_and(|sp| sp.distance(coords) < radii.r_sing);
        let curv = if near { None } else { curvatures_with(m, coords, opts).ok() };
        let region = match (&curv, near) {
            (_, true) => Region::S3,
            (Some(c), false) if c.k_implicit.abs() < radii.kappa_min => Region::S2,
            (Some(_), false) => Region::S1,
            (None, false) => Region::S3,
        };
        if let (Region::S1, Some(c)) = (region, &curv) {
            s1_min = s1_min.min(c.principal[0].abs().min(c.principal[1].abs()));
        }
        points.push(SurfacePoint {
            coords,
            s,
            t,
            alpha: curv.and_then(|c| c.alpha),
            k: curv.map(|c| c.k_implicit),
            km: curv.map(|c| c.km_implicit),
            region,
        });
    }
    let counts = [Region::S1, Region::S2, Region::S3].map(|r| points.iter().filter(|p| p.region == r).count());
    let s3: Vec<[f64; 3]> = points
        .iter()
        .filter(|p| p.region == Region::S3)
        .map(|p| p.coords)
        .collect();
    Ok(Classification {
        points,
        counts,
        s3_components: count_clusters(&s3, 2.0 * radii.r_sing),
        s1_min_principal: s1_min,
        warnings,
    })
}

/// Closed-form against implicit curvature over the S1 part of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureComparison {
    pub s1_points: usize,
    /// S1 points where the closed form is defined.
    pub compared: usize,
    pub max_rel_k: f64,
    pub max_rel_km: f64,
}

pub fn compare_curvatures(m: &DiagonalMaterial, mesh: &[[f64; 3]], radii: RegionRadii) -> Result<CurvatureComparison, FresnelError> {
    let cls = classify_regions(m, mesh, radii)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut out = CurvatureComparison {
        s1_points: cls.counts[0],
        compared: 0,
        max_rel_k: 0.0,
        max_rel_km: 0.0,
    };
    for p in cls.points.iter().filter(|p| p.region == Region::S1) {
        let c = curvatures(m, p.coords)?;
        if let (Some(k), Some(km)) = (c.k_closed, c.km_closed) {
            out.compared += 1;
            out.max_rel_k = out.max_rel_k.max(rel(k, c.k_implicit));
            out.max_rel_km = out.max_rel_km.max(rel(km, c.km_implicit));
        }
    }
    Ok(out)
}

/// Connected components of the graph linking points closer than `link`.
fn count_clusters(points: &[[f64; 3]], link: f64) -> usize {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if dist(points[i], points[j]) <= link {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..points.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// Locates a point of vanishing Gaussian curvature by bisection along arcs
/// of a sheet. Arcs are scanned in a fixed order, so the result is
/// deterministic.
pub fn find_parabolic_point(m: &DiagonalMaterial) -> Result<CurvatureReport, FresnelError> {
    let e = m.ratios();
    let k_at = |d: [f64; 3], sheet: Sheet| -> Option<f64> {
        curvatures(m, sheet_point(e, d, sheet)).ok().map(|c| c.k_implicit)
    };
    let arcs = 48;
    let steps = 96;
    for sheet in [Sheet::Outer, Sheet::Inner] {
        for a in 0..arcs {
            let phi = std::f64::consts::PI * a as f64 / arcs as f64;
            let dir = |theta: f64| [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=steps {
                let theta = std::f64::consts::PI * i as f64 / steps as f64;
                let Some(k) = k_at(dir(theta), sheet) else {
                    prev = None;
                    continue;
                };
                if let Some((t0, k0)) = prev {
                    if k0.signum() != k.signum() {
                        let (mut lo, mut hi, klo) = (t0, theta, k0);
                        for _ in 0..200 {
                            let mid = 0.5 * (lo + hi);
                            match k_at(dir(mid), sheet) {
                                Some(km) if km.signum() == klo.signum() => lo = mid,
                                Some(_) => hi = mid,
                                None => break,
                            }
                            if hi - lo < 1e-15 {
                                break;
                            }
                        }
                        let report = curvatures(m, sheet_point(e, dir(0.5 * (lo + hi)), sheet))?;
                        if report.k_implicit.abs() < 1e-6 {
                            return Ok(report);
                        }
                    }
                }
                prev = Some((theta, k));
            }
        }
    }
    Err(FresnelError::NoParabolicPoint)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicityClass {
    Hyperbolic,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub dq_dxi0: f64,
    pub class: HyperbolicityClass,
    pub s: f64,
    pub t: f64,
    /// b = s/t; the point is degenerate exactly when b = 1.
    pub b: f64,
    pub b_degenerate: bool,
    pub warnings: Vec<String>,
}

pub fn check_hyperbolicity(m: &DiagonalMaterial, cov: &Covector) -> Result<HyperbolicityReport, FresnelError> {
    check_hyperbolicity_with(m, cov, 1e-8)
}

pub fn check_hyperbolicity_with(
    m: &DiagonalMaterial,
    cov: &Covector,
    tol: f64,
) -> Result<HyperbolicityReport, FresnelError> {
    let scale = cov.norm_sq();
    let q = characteristic(m, cov).q_quartic;
    if q.abs() > tol * scale * scale {
        return Err(FresnelError::OffSurface(q));
    }
    let sf = reduce_to_standard_form(m, cov.xi0)?;
    let (s, t) = s_t(sf.eps_star, sf.to_standard(cov.xi));
    let b = s / t;
    let dq = quartic_dxi0(m, cov);
    let class = if dq.abs() < tol * scale.powf(1.5) {
        HyperbolicityClass::Degenerate
    } else {
        HyperbolicityClass::Hyperbolic
    };
    let mut warnings = Vec::new();
    if m.min_ratio_gap() < DEFAULT_C_SEP {
        warnings.push("ratio separation fails; the surface has non-isolated degeneracies".into());
    }
    Ok(HyperbolicityReport {
        dq_dxi0: dq,
        class,
        s,
        t,
        b,
        b_degenerate: (b - 1.0).powi(2) < tol,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m123() -> DiagonalMaterial {
        DiagonalMaterial::with_unit_mu([1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn singular_points_of_123() {
        let sp = singular_points(&m123()).unwrap();
        assert_eq!(sp.branch, 0);
        let mut got: Vec<_> = sp.standard.to_vec();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (a, c) = (1.5f64.sqrt(), 0.5f64.sqrt());
        let mut want = vec![[a, 0.0, c], [a, 0.0, -c], [-a, 0.0, c], [-a, 0.0, -c]];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!(dist(*g, *w) < 1e-15);
        }
        for c in sp.certify(&m123()) {
            assert!(c.q.abs() < 1e-12 && c.grad_norm < 1e-10 && c.dq_dxi0.abs() < 1e-10);
            assert!(c.hessian_det.abs() > 1e-3);
        }
    }

    #[test]
    fn permuted_material_relabels_axes() {
        let m = DiagonalMaterial::with_unit_mu([3.0, 2.0, 1.0]).unwrap();
        let sp = singular_points(&m).unwrap();
        for p in sp.standard {
            assert!((p[0].abs() - 0.5f64.sqrt()).abs() < 1e-15);
            assert_eq!(p[1], 0.0);
            assert!((p[2].abs() - 1.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn separation_failure_is_reported() {
        let m = DiagonalMaterial::with_unit_mu([1.0, 1.0, 3.0]).unwrap();
        assert!(matches!(singular_points(&m), Err(FresnelError::Separation { .. })));
    }

    #[test]
    fn alpha_vanishes_in_singular_limit() {
        let p = surface_param(&m123(), 1.3, 1.3 + 5e-8).unwrap();
        assert!(p.alpha.abs() < 1e-6);
        // s²t − 6st + 11t − 6 vanishes at s = 1, t = 1.
        assert!(matches!(
            surface_param(&m123(), 1.0, 1.0),
            Err(FresnelError::DegenerateParametrization(_))
        ));
    }

    #[test]
    fn isotropic_sphere_curvature() {
        let c = curvatures(&DiagonalMaterial::isotropic(), [0.0, 0.6, 0.8]).unwrap();
        assert!((c.k_implicit.abs() - 1.0).abs() < 1e-12);
        assert!((c.principal[0] - c.principal[1]).abs() < 1e-7);
        assert!((c.km_implicit - 1.0).abs() < 1e-7);
    }

    #[test]
    fn mesh_points_lie_on_surface() {
        let m = m123();
        for p in surface_mesh(&m, 200) {
            assert!(crate::tensors::standard_polynomial(m.ratios(), p.coords).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolicity_at_singular_and_cone_points() {
        let xi = [1.5f64.sqrt(), 0.0, 0.5f64.sqrt()];
        let r = check_hyperbolicity(&m123(), &Covector::new(1.0, xi)).unwrap();
        assert_eq!(r.class, HyperbolicityClass::Degenerate);
        assert!((r.b - 1.0).abs() < 1e-12 && r.b_degenerate);
        let r = check_hyperbolicity(&DiagonalMaterial::isotropic(), &Covector::new(1.0, [1.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.dq_dxi0, 0.0);
        assert!(!r.warnings.is_empty());
        assert!(check_hyperbolicity(&m123(), &Covector::new(1.0, [0.1, 0.0, 0.0])).is_err());
    }
}
