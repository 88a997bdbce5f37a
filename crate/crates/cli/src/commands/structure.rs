use std::f64::consts::PI;

use anisomax::eigenfield::{detect_holonomy, diagonalize_material, EigenOptions};
use anisomax::fbi::{self, conjugation_error, fbi_forward, fbi_inverse, holder_symbol, random_trials, GridFunction};
use anisomax::spectral::data::rng_from_seed;
use anisomax::symmetrizer::{condition_residual, sweep, NonlinearLaw};
use anisomax::tensors::MaterialField;
use nalgebra::{DMatrix, Matrix3, Rotation3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

use crate::{input, Bound, CliError, Outcome, Scenario, Table};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EigenfieldParams {
    n: usize,
    /// Peak rotation angle of the principal axes about x3.
    amplitude: f64,
}

impl Default for EigenfieldParams {
    fn default() -> Self {
        Self { n: 8, amplitude: 0.2 }
    }
}

/// Diagonalizes the material rotated about x3 by an angle varying along x1.
pub(super) fn eigenfield(s: &Scenario) -> Result<Outcome, CliError> {
    let p: EigenfieldParams = s.params()?;
    if p.n < 2 {
        return Err(CliError::Input("eigenfield grid needs at least 2 points per side".into()));
    }
    let m = s.material.build()?;
    let d = m.eps_matrix();
    let n = p.n;
    let angle = |i: usize| p.amplitude * (2.0 * PI * i as f64 / n as f64).sin();
    let len = n * n;
    let rotation = |node: usize| Rotation3::from_axis_angle(&Vector3::z_axis(), angle(node / n)).into_inner();
    let eps: Vec<Matrix3<f64>> = (0..len).map(|k| rotation(k) * d * rotation(k).transpose()).collect();
    let field = MaterialField::new([n, n, 1], eps, vec![Matrix3::identity(); len]).map_err(input)?;
    let (frames, diag) = diagonalize_material(&field, &EigenOptions::default()).map_err(input)?;

    let mut sorted = m.eps();
    sorted.sort_by(f64::total_cmp);
    let (mut offdiag, mut eig_err, mut axis_err) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (node, eig) in diag.iter().enumerate() {
        let phi = frames.frame(node).expect("every node is active");
        let e = DMatrix::from_iterator(3, 3, field.eps[node].iter().cloned());
        let t = phi.transpose() * e * phi;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    offdiag = offdiag.max(t[(i, j)].abs());
                }
            }
            eig_err = eig_err.max((eig[i] - sorted[i]).abs());
        }
        let r = rotation(node);
        let order: Vec<usize> = (0..3).map(|i| (0..3).find(|&a| m.eps()[a] == sorted[i]).unwrap_or(i)).collect();
        for (c, &axis) in order.iter().enumerate() {
            let dot: f64 = (0..3).map(|i| phi[(i, c)] * r[(i, axis)]).sum();
            axis_err = axis_err.max((dot.abs() - 1.0).abs());
        }
    }
    let cert = &frames.certificate;
    let mut out = Outcome::default();
    out.check("max off-diagonal", offdiag, Bound::Below(1e-10));
    out.check("eigenvalue error", eig_err, Bound::Below(1e-10));
    out.check("principal axis error", axis_err, Bound::Below(1e-10));
    out.check("orthogonality error", cert.max_orthogonality_error, Bound::Below(1e-10));
    out.check("min edge overlap", cert.min_overlap, Bound::Above(0.0));
    out.put("nodes", len);
    out.put("certificate", serde_json::json!({
        "min_overlap": cert.min_overlap,
        "max_column_angle": cert.max_column_angle,
        "worst_edge": cert.worst_edge,
        "max_orthogonality_error": cert.max_orthogonality_error,
        "max_offdiagonal": cert.max_offdiagonal,
        "edges_checked": cert.edges_checked,
    }));
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HolonomyParams {
    samples: Vec<usize>,
}

impl Default for HolonomyParams {
    fn default() -> Self {
        Self { samples: vec![64, 128, 256] }
    }
}

/// The loop field `[[cos x, sin x], [sin x, −cos x]]`.
fn reflection_field(x: &[f64]) -> DMatrix<f64> {
    let (c, s) = (x[0].cos(), x[0].sin());
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

pub(super) fn holonomy(s: &Scenario) -> Result<Outcome, CliError> {
    let p: HolonomyParams = s.params()?;
    if p.samples.is_empty() {
        return Err(CliError::Input("holonomy needs at least one sample count".into()));
    }
    let mut out = Outcome::default();
    let mut table = Table::new(&["samples", "turns", "sign_low", "sign_high"]);
    let mut runs = Vec::new();
    for &n in &p.samples {
        for turns in [1usize, 2] {
            let total = n * turns;
            let path: Vec<Vec<f64>> = (0..total).map(|k| vec![2.0 * PI * k as f64 / n as f64]).collect();
            let rep = detect_holonomy(&reflection_field, &path, &EigenOptions::default()).map_err(input)?;
            let want = if turns == 1 { -1.0 } else { 1.0 };
            let worst = rep.signs.iter().map(|&x| x as f64).find(|&x| x != want).unwrap_or(want);
            out.check(format!("{n} samples, {turns} turn(s)"), worst, Bound::Equals(want));
            table.push(vec![n.to_string(), turns.to_string(), rep.signs[0].to_string(), rep.signs[1].to_string()]);
            runs.push(serde_json::json!({ "samples": n, "turns": turns, "report": rep }));
        }
    }
    out.put("runs", runs);
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SymmetrizerParams {
    /// Defaults to the Kerr law with the scenario permittivity and unit α.
    law: Option<NonlinearLaw>,
    samples: usize,
    expect_symmetric: bool,
}

impl Default for SymmetrizerParams {
    fn default() -> Self {
        Self {
            law: None,
            samples: 1000,
            expect_symmetric: true,
        }
    }
}

pub(super) fn symmetrizer(s: &Scenario) -> Result<Outcome, CliError> {
    let p: SymmetrizerParams = s.params()?;
    let law = p.law.unwrap_or(NonlinearLaw::KerrDiag {
        eps0: s.material.eps,
        alpha: [1.0; 3],
    });
    if p.samples == 0 {
        return Err(CliError::Input("symmetrizer needs at least one sample".into()));
    }
    let mut out = Outcome::default();
    out.put("law", law);
    out.put("delta", law.delta());
    if p.expect_symmetric {
        let rep = sweep(&law, p.samples, s.seed).map_err(input)?;
        out.check("condition residual", rep.max_residual, Bound::Below(1e-12));
        out.check("flux identity", rep.max_flux_violation, Bound::Below(1e-10));
        if let Some(rt) = rep.max_roundtrip {
            out.check("inversion round trip", rt, Bound::Below(1e-12));
        }
        out.check("min C1 eigenvalue", rep.min_c1_eigenvalue, Bound::Above(0.0));
        out.put("sweep", rep);
    } else {
        let radius = law.delta().min(1.0);
        let mut rng = rng_from_seed(s.seed);
        let mut residuals = Vec::with_capacity(p.samples);
        while residuals.len() < p.samples {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if Vector3::from(v).norm() > 1.0 {
                continue;
            }
            let r = condition_residual(&law, v.map(|x| x * radius)).map_err(input)?;
            residuals.push(Vector3::from(r).norm());
        }
        residuals.sort_by(f64::total_cmp);
        let median = residuals[residuals.len() / 2];
        out.check("median condition residual", median, Bound::Above(1e-4));
        out.put("residual_range", [residuals[0], residuals[residuals.len() - 1]]);
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FbiParams {
    /// Spacing of the input grid on [−8, 8].
    h: f64,
    isometry_lambdas: Vec<f64>,
    lambdas: Vec<f64>,
    holder: Vec<f64>,
    trials: usize,
    /// Write the weighted transform of the Gaussian at this λ as the CSV table.
    dump_lambda: Option<f64>,
    /// Keep every `dump_stride`-th sample in x and in ξ.
    dump_stride: usize,
}

impl Default for FbiParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 128.0,
            isometry_lambdas: vec![16.0, 64.0, 256.0],
            lambdas: vec![16.0, 32.0, 64.0, 128.0, 256.0],
            holder: vec![1.0, 0.5],
            trials: 32,
            dump_lambda: None,
            dump_stride: 8,
        }
    }
}

fn slope_bound(s: f64) -> Option<f64> {
    if s == 1.0 {
        Some(-0.35)
    } else if s == 0.5 {
        Some(-0.10)
    } else {
        None
    }
}

pub(super) fn fbi(s: &Scenario) -> Result<Outcome, CliError> {
    let p: FbiParams = s.params()?;
    if !(p.h > 0.0 && p.h.is_finite()) {
        return Err(CliError::Input(format!("grid spacing must be positive, got {}", p.h)));
    }
    let n = (16.0 / p.h).round() as usize + 1;
    let normalize = |f: GridFunction| {
        let norm = f.l2_norm();
        f.scaled(Complex64::from(1.0 / norm))
    };
    let gaussian = normalize(GridFunction::from_real(-8.0, p.h, n, |x| (-x * x / 2.0).exp()));
    let packet = normalize(GridFunction::from_fn(-8.0, p.h, n, |x| Complex64::from_polar((-x * x / 2.0).exp(), 5.0 * x)));
    let mut out = Outcome::default();
    let mut iso = Vec::new();
    for &lam in &p.isometry_lambdas {
        for (name, f) in [("gaussian", &gaussian), ("wave packet", &packet)] {
            let t = fbi_forward(f, lam).map_err(input)?;
            let isometry = (t.weighted_norm() / f.l2_norm() - 1.0).abs();
            let inversion = fbi_inverse(&t).map_err(input)?.rel_l2_diff(f);
            out.check(format!("{name} isometry at lambda {lam}"), isometry, Bound::Below(1e-6));
            out.check(format!("{name} inversion at lambda {lam}"), inversion, Bound::Below(1e-6));
            iso.push(serde_json::json!({ "data": name, "lambda": lam, "isometry": isometry, "inversion": inversion }));
        }
    }
    out.put("isometry", iso);

    let mut table = Table::new(&["s", "lambda", "error"]);
    if !p.holder.is_empty() {
        let trials = random_trials(p.trials, p.h, &mut rng_from_seed(s.seed));
        let mut reports = Vec::new();
        for &hs in &p.holder {
            let a = holder_symbol(hs);
            let rep = conjugation_error(&a, hs, &p.lambdas, &trials).map_err(input)?;
            if let Some(b) = slope_bound(hs) {
                out.check(format!("conjugation slope, s = {hs}"), rep.slope, Bound::AtMost(b));
            }
            for (l, e) in rep.lambdas.iter().zip(&rep.errors) {
                table.push_f64(&[hs, *l, *e]);
            }
            reports.push(rep);
        }
        out.put("conjugation", reports);
    }
    if let Some(lam) = p.dump_lambda {
        let t = fbi_forward(&gaussian, lam).map_err(input)?;
        let mut dump = Table::new(&["x", "xi", "re", "im", "abs"]);
        let stride = p.dump_stride.max(1);
        for i in (0..t.nx).step_by(stride) {
            for col in (0..t.n_xi).step_by(stride) {
                let g = t.weighted(i, col);
                dump.push_f64(&[t.x(i), t.xi(col), g.re, g.im, g.norm()]);
            }
        }
        out.put("dump", serde_json::json!({ "lambda": lam, "constant": fbi::c1(), "nx": t.nx, "n_xi": t.n_xi }));
        table = dump;
    }
    out.table = Some(table);
    Ok(out)
}
