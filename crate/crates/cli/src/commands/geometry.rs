use anisomax::fresnel::{
    self, classify_regions, compare_curvatures, curvatures, find_parabolic_point, identity_residuals, singular_points, surface_mesh,
    Covector, Region, RegionRadii, ADJ_TOL, BLOCK_TOL, DET_TOL, ZEFF_TOL,
};
use anisomax::tensors::{validate_material, Band, ViolationKind, DEFAULT_C_SEP};
use nalgebra::Vector3;
use serde::Deserialize;

use super::{fmt3, is_isotropic, opt};
use crate::{input, Bound, CliError, Outcome, Scenario, Table};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ValidateParams {
    band: [f64; 2],
    c_sep: f64,
    require_anisotropic: bool,
}

impl Default for ValidateParams {
    fn default() -> Self {
        let b = Band::default();
        Self {
            band: [b.lo, b.hi],
            c_sep: DEFAULT_C_SEP,
            require_anisotropic: true,
        }
    }
}

pub(super) fn validate(s: &Scenario) -> Result<Outcome, CliError> {
    let p: ValidateParams = s.params()?;
    let m = s.material.build()?;
    let band = Band::new(p.band[0], p.band[1]).map_err(input)?;
    let rep = validate_material(&m, band, p.c_sep).map_err(input)?;
    let mut out = Outcome::default();
    let ellipticity = rep.violations.iter().filter(|v| v.kind == ViolationKind::Ellipticity).count();
    out.check("ellipticity violations", ellipticity as f64, Bound::Equals(0.0));
    if p.require_anisotropic {
        out.check("ratio separation", rep.min_gap, Bound::AtLeast(p.c_sep));
    }
    out.put("ratios", m.ratios());
    out.put("max_speed", m.max_speed());
    out.put("validation", &rep);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FresnelParams {
    /// Covectors `(ξ0, ξ1, ξ2, ξ3)`.
    covectors: Vec<[f64; 4]>,
}

impl Default for FresnelParams {
    fn default() -> Self {
        Self {
            covectors: vec![[1.0, 0.3, -1.2, 0.7], [0.7, 2.0, 0.1, -0.4], [1.5, 0.0, 0.0, 1.5], [-1.1, 0.5, 0.5, 0.5]],
        }
    }
}

pub(super) fn fresnel(s: &Scenario) -> Result<Outcome, CliError> {
    let p: FresnelParams = s.params()?;
    if p.covectors.is_empty() || p.covectors.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Input("fresnel needs at least one finite covector".into()));
    }
    let m = s.material.build()?;
    let mut worst = [0.0_f64; 4];
    let mut rows = Vec::new();
    let mut table = Table::new(&["xi0", "xi1", "xi2", "xi3", "q0", "q1", "q_quartic", "block", "det", "adjugate", "z_eff"]);
    for c in &p.covectors {
        let cov = Covector::new(c[0], [c[1], c[2], c[3]]);
        let k = Vector3::from(cov.xi);
        let seed = Vector3::new(0.31, -0.72, 0.55);
        let v = if k.norm() > 0.0 { seed - k * (k.dot(&seed) / k.norm_squared()) } else { seed };
        let r = identity_residuals(&m, &cov, v.into());
        let ch = fresnel::characteristic(&m, &cov);
        let vals = [r.block, r.det, r.adjugate, r.z_eff.unwrap_or(0.0)];
        for (w, x) in worst.iter_mut().zip(vals) {
            *w = w.max(x);
        }
        table.push_f64(&[c[0], c[1], c[2], c[3], ch.q0, ch.q1, ch.q_quartic, vals[0], vals[1], vals[2], vals[3]]);
        rows.push(serde_json::json!({ "covector": c, "characteristic": ch, "residuals": r }));
    }
    let mut out = Outcome::default();
    for ((name, tol), w) in [("block-diagonalization", BLOCK_TOL), ("determinant", DET_TOL), ("adjugate", ADJ_TOL), ("z-eff", ZEFF_TOL)]
        .into_iter()
        .zip(worst)
    {
        out.check(name, w, Bound::Below(tol));
    }
    out.put("covectors", rows);
    out.table = Some(table);
    Ok(out)
}

pub(super) fn singular(s: &Scenario) -> Result<Outcome, CliError> {
    let m = s.material.build()?;
    let sp = singular_points(&m).map_err(input)?;
    let certs = sp.certify(&m);
    let max = |f: fn(&fresnel::SingularCertificate) -> f64| certs.iter().map(f).fold(0.0_f64, f64::max);
    let mut out = Outcome::default();
    out.check("max |q|", max(|c| c.q.abs()), Bound::Below(1e-12));
    out.check("max |grad q|", max(|c| c.grad_norm), Bound::Below(1e-10));
    out.check("max |dq/dxi0|", max(|c| c.dq_dxi0.abs()), Bound::Below(1e-10));
    let det = certs.iter().map(|c| c.hessian_det.abs()).fold(f64::INFINITY, f64::min);
    out.check("min |det Hessian|", det, Bound::Above(1e-3));
    let mut table = Table::new(&["xi1", "xi2", "xi3", "lam1", "lam2", "lam3", "q", "grad_norm", "dq_dxi0", "hessian_det"]);
    for ((o, st), c) in sp.original.iter().zip(&sp.standard).zip(&certs) {
        table.push_f64(&[o[0], o[1], o[2], st[0], st[1], st[2], c.q, c.grad_norm, c.dq_dxi0, c.hessian_det]);
    }
    out.put("points", &sp);
    out.put("certificates", certs);
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SurfaceParams {
    directions: usize,
    r_sing: f64,
    kappa_min: f64,
    min_points: usize,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        let r = RegionRadii::default();
        Self {
            directions: 600,
            r_sing: r.r_sing,
            kappa_min: r.kappa_min,
            min_points: 500,
        }
    }
}

impl SurfaceParams {
    fn radii(&self) -> RegionRadii {
        RegionRadii {
            r_sing: self.r_sing,
            kappa_min: self.kappa_min,
        }
    }

    fn mesh(&self, m: &anisomax::tensors::DiagonalMaterial) -> Result<Vec<[f64; 3]>, CliError> {
        if self.directions == 0 {
            return Err(CliError::Input("mesh needs at least one direction".into()));
        }
        Ok(surface_mesh(m, self.directions).into_iter().map(|p| p.coords).collect())
    }
}

pub(super) fn curvature(s: &Scenario) -> Result<Outcome, CliError> {
    let p: SurfaceParams = s.params()?;
    let m = s.material.build()?;
    let mesh = p.mesh(&m)?;
    let cmp = compare_curvatures(&m, &mesh, p.radii()).map_err(input)?;
    let cls = classify_regions(&m, &mesh, p.radii()).map_err(input)?;
    let mut table = Table::new(&["lam1", "lam2", "lam3", "s", "t", "K_closed", "K_implicit", "Km_closed", "Km_implicit"]);
    for pt in cls.points.iter().filter(|p| p.region == Region::S1) {
        let c = curvatures(&m, pt.coords).map_err(input)?;
        let [a, b, cc] = pt.coords;
        table.push(vec![
            a.to_string(),
            b.to_string(),
            cc.to_string(),
            c.s.to_string(),
            c.t.to_string(),
            opt(c.k_closed),
            c.k_implicit.to_string(),
            opt(c.km_closed),
            c.km_implicit.to_string(),
        ]);
    }
    let mut out = Outcome::default();
    if m.is_fully_anisotropic(DEFAULT_C_SEP) {
        out.check("compared S1 points", cmp.compared as f64, Bound::AtLeast(p.min_points as f64));
        out.check("max relative K error", cmp.max_rel_k, Bound::Below(1e-3));
        out.check("max relative Km error", cmp.max_rel_km, Bound::Below(1e-3));
    }
    let parabolic = find_parabolic_point(&m).ok();
    match parabolic {
        Some(c) => {
            out.check("parabolic |K|", c.k_implicit.abs(), Bound::Below(1e-6));
            out.check("parabolic |Km|", c.km_implicit.abs(), Bound::Above(0.01));
        }
        None if m.is_fully_anisotropic(DEFAULT_C_SEP) => out.check("parabolic point found", 0.0, Bound::Equals(1.0)),
        None => {}
    }
    out.put("comparison", cmp);
    out.put("parabolic", parabolic);
    out.table = Some(table);
    Ok(out)
}

pub(super) fn classify(s: &Scenario) -> Result<Outcome, CliError> {
    let p: SurfaceParams = s.params()?;
    let m = s.material.build()?;
    let mesh = p.mesh(&m)?;
    let cls = classify_regions(&m, &mesh, p.radii()).map_err(input)?;
    let mut table = Table::new(&["lam1", "lam2", "lam3", "s", "t", "K", "Km", "region"]);
    for pt in &cls.points {
        let mut row: Vec<String> = fmt3(pt.coords).into();
        row.extend([pt.s.to_string(), pt.t.to_string(), opt(pt.k), opt(pt.km), format!("{:?}", pt.region)]);
        table.push(row);
    }
    let mut out = Outcome::default();
    if cls.counts[0] > 0 {
        out.check("S1 min principal curvature", cls.s1_min_principal, Bound::Above(0.0));
    }
    if m.is_fully_anisotropic(DEFAULT_C_SEP) {
        out.check("S3 components", cls.s3_components as f64, Bound::Equals(4.0));
    } else if is_isotropic(&m) {
        out.check("S2 points", cls.counts[1] as f64, Bound::Equals(0.0));
        out.check("S3 points", cls.counts[2] as f64, Bound::Equals(0.0));
    }
    out.put("counts", serde_json::json!({ "S1": cls.counts[0], "S2": cls.counts[1], "S3": cls.counts[2] }));
    out.put("s3_components", cls.s3_components);
    out.put("s1_min_principal", cls.s1_min_principal);
    out.put("warnings", &cls.warnings);
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SuiteParams {
    samples: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self { samples: 10_000 }
    }
}

pub(super) fn identity_suite(s: &Scenario) -> Result<Outcome, CliError> {
    let p: SuiteParams = s.params()?;
    let rep = fresnel::identity_suite(p.samples, s.seed);
    let mut out = Outcome::default();
    for (name, value, tol) in rep.checks() {
        out.check(name, value, Bound::Below(tol));
    }
    out.put("suite", &rep);
    Ok(out)
}
