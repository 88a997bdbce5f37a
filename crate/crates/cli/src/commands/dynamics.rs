use std::f64::consts::PI;

use anisomax::harness::{
    decay_fit, gronwall_check, is_admissible, strichartz_sweep, DecayConfig, DecayData, ExponentPair, GronwallConfig, StrichartzConfig,
};
use anisomax::spectral::data::{build_preset, Preset, Weighting};
use anisomax::spectral::{
    divergence_charges, energy, propagate_const, propagate_variable, FieldKind, Grid3, LpBand, Medium, Modulation, StepOptions,
};
use anisomax::tensors::{DiagonalMaterial, MaterialField, DEFAULT_C_SEP};
use nalgebra::Matrix3;
use serde::Deserialize;

use super::is_isotropic;
use crate::{input, Bound, CliError, MaterialSpec, Outcome, Scenario, Table};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PropagateParams {
    data: Preset,
    steps: usize,
    dt: f64,
    rk4_order: bool,
}

impl Default for PropagateParams {
    fn default() -> Self {
        Self {
            data: Preset::Random { k_cut: 4.0 },
            steps: 1000,
            dt: 0.01,
            rk4_order: false,
        }
    }
}

/// The material modulated smoothly in space, with small off-diagonal coupling.
fn perturbed_medium(m: &DiagonalMaterial, grid: Grid3) -> Result<MaterialField, CliError> {
    let e = m.eps();
    let c = 0.05 * e.iter().cloned().fold(f64::INFINITY, f64::min);
    let eps = (0..grid.len())
        .map(|n| {
            let x = grid.coords(n);
            let s = 1.0 + 0.1 * (x[0] + 2.0 * x[1]).sin() * x[2].cos();
            Matrix3::new(e[0] * s, c, 0.0, c, e[1], c * s, 0.0, c * s, e[2] * (1.0 + 0.1 * x[0].cos()))
        })
        .collect();
    MaterialField::new(grid.n, eps, vec![m.mu_matrix(); grid.len()]).map_err(input)
}

pub(super) fn propagate(s: &Scenario) -> Result<Outcome, CliError> {
    let p: PropagateParams = s.params()?;
    if p.steps == 0 {
        return Err(CliError::Input("propagate needs at least one step".into()));
    }
    let dt = match s.tmax {
        Some(t) if t > 0.0 && t.is_finite() => t / p.steps as f64,
        Some(t) => return Err(CliError::Input(format!("tmax must be positive, got {t}"))),
        None => p.dt,
    };
    let m = s.material.build()?;
    let grid = Grid3::cube(s.grid_n(16), s.grid_box(2.0 * PI)).map_err(input)?;
    let u0 = build_preset(&m, grid, &p.data, s.seed).map_err(input)?;
    let rho0 = divergence_charges(&u0, &m).map_err(input)?;
    let e0 = energy(&u0, &m);
    let scale = u0.max_abs().max(1.0);

    let mut table = Table::new(&["t", "energy_ratio", "charge_change"]);
    let record = (p.steps / 100).max(1);
    let (mut drift, mut charge) = (0.0_f64, 0.0_f64);
    let mut u = u0.clone();
    for step in 1..=p.steps {
        u = propagate_const(&m, &u, dt);
        let ratio = energy(&u, &m) / e0;
        drift = drift.max((ratio - 1.0).abs());
        if step % record == 0 || step == p.steps {
            let change = divergence_charges(&u, &m).map_err(input)?.max_abs_diff(&rho0) / scale;
            charge = charge.max(change);
            table.push_f64(&[u.time, ratio, change]);
        }
    }
    let back = propagate_const(&m, &u, -u.time);
    let reversal = back.max_abs_diff(&u0) / scale;

    let mut out = Outcome::default();
    out.check("energy drift", drift, Bound::Below(1e-10));
    out.check("time reversal", reversal, Bound::Below(1e-9));
    out.check("charge conservation", charge, Bound::Below(1e-10));
    out.put("steps", p.steps);
    out.put("dt", dt);
    out.put("t_final", u.time);
    out.put("initial_energy", e0);

    if p.rk4_order {
        let medium = Medium::fixed(perturbed_medium(&m, grid)?).map_err(input)?;
        let db0 = u0.convert(&m, FieldKind::DB);
        let run = |h: f64| -> Result<_, CliError> {
            let mut traj = propagate_variable(&medium, &db0, 1.0, h, &StepOptions::default()).map_err(input)?;
            Ok(traj.states.pop().expect("trajectory keeps its final state"))
        };
        let (a, b, c) = (run(0.08)?, run(0.04)?, run(0.02)?);
        let order = (a.sub(&b).l2_norm() / b.sub(&c).l2_norm()).log2();
        out.check("rk4 self-convergence order", order, Bound::Within(3.7, 4.3));
        out.put("rk4_order", order);
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DecayParams {
    data: DecayData,
    lambda: f64,
    t_min: f64,
    samples: usize,
    /// Overrides the expected exponent range chosen from the material.
    expect: Option<[f64; 2]>,
    /// Also fit the isotropic control and check the ordering gap.
    compare_isotropic: bool,
    min_gap: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        let cfg = DecayConfig::standard();
        Self {
            data: DecayData::standard(),
            lambda: 1.0,
            t_min: cfg.t_min,
            samples: cfg.samples,
            expect: None,
            compare_isotropic: false,
            min_gap: 0.25,
        }
    }
}

/// Expected exponent range: none when the material class has no reference value.
fn expected_decay(m: &DiagonalMaterial, data: &DecayData) -> Option<[f64; 2]> {
    match data {
        DecayData::Stationary => Some([-0.05, 0.05]),
        DecayData::ChargeFree { .. } if m.is_fully_anisotropic(DEFAULT_C_SEP) => Some([0.35, 0.65]),
        DecayData::ChargeFree { .. } if is_isotropic(m) => Some([0.85, 1.15]),
        DecayData::ChargeFree { .. } => None,
    }
}

pub(super) fn decay(s: &Scenario) -> Result<Outcome, CliError> {
    let p: DecayParams = s.params()?;
    let m = s.material.build()?;
    let cfg = DecayConfig {
        grid: Grid3::cube(s.grid_n(128), s.grid_box(100.0)).map_err(input)?,
        band: LpBand::from_lambda(p.lambda).map_err(input)?,
        t_min: p.t_min,
        t_max: s.tmax,
        samples: p.samples,
        seed: s.seed,
    };
    let fit = decay_fit(&m, &p.data, &cfg).map_err(input)?;
    let mut out = Outcome::default();
    if let Some([lo, hi]) = p.expect.or_else(|| expected_decay(&m, &p.data)) {
        out.check("decay exponent", fit.exponent, Bound::Within(lo, hi));
    }
    let mut table = Table::new(&["t", "sup_norm"]);
    for (t, v) in fit.times.iter().zip(&fit.sup_norms) {
        table.push_f64(&[*t, *v]);
    }
    if p.compare_isotropic {
        let iso = MaterialSpec {
            eps: [1.0; 3],
            mu: [1.0; 3],
        }
        .build()?;
        let control = decay_fit(&iso, &p.data, &cfg).map_err(input)?;
        out.check("ordering gap", control.exponent - fit.exponent, Bound::AtLeast(p.min_gap));
        out.put("isotropic_exponent", control.exponent);
    }
    out.put("exponent", fit.exponent);
    out.put("window", fit.window);
    out.put("ci", fit.ci);
    out.put("fit_residual", fit.fit_residual);
    out.put("active_modes", fit.active_modes);
    out.put("pass", out.checks.iter().all(|c| c.pass));
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct StrichartzParams {
    pairs: Vec<ExponentPair>,
    lambdas: Vec<f64>,
    per_unit_time: usize,
    weighting: Weighting,
    max_spread: f64,
    flatness: f64,
    min_growth: f64,
}

impl Default for StrichartzParams {
    fn default() -> Self {
        let cfg = StrichartzConfig::default();
        let inf = f64::INFINITY;
        Self {
            pairs: [(4.0, inf), (inf, 2.0), (2.0, inf)]
                .into_iter()
                .map(|(p, q)| ExponentPair::new(p, q).expect("default pairs are valid"))
                .collect(),
            lambdas: vec![4.0, 8.0, 16.0, 32.0],
            per_unit_time: cfg.per_unit_time,
            weighting: cfg.weighting,
            max_spread: 3.0,
            flatness: 0.05,
            min_growth: 1.5,
        }
    }
}

pub(super) fn strichartz(s: &Scenario) -> Result<Outcome, CliError> {
    let p: StrichartzParams = s.params()?;
    let m = s.material.build()?;
    let defaults = StrichartzConfig::default();
    let cfg = StrichartzConfig {
        box_length: s.grid_box(defaults.box_length),
        n_max: s.grid_n(defaults.n_max),
        per_unit_time: p.per_unit_time,
        t_final: s.tmax,
        weighting: p.weighting,
        seed: s.seed,
    };
    let probes = strichartz_sweep(&m, &p.pairs, &p.lambdas, &cfg).map_err(input)?;
    let inf = f64::INFINITY;
    let mut out = Outcome::default();
    let mut table = Table::new(&["p", "q", "rho", "lambda", "ratio"]);
    for probe in &probes {
        let (pp, qq) = (probe.pair.p.value(), probe.pair.q.value());
        let label = format!("({}, {})", probe.pair.p, probe.pair.q);
        for (l, r) in probe.lambdas.iter().zip(&probe.ratios) {
            table.push_f64(&[pp, qq, probe.rho, *l, *r]);
        }
        out.check(format!("{label} derivative loss"), probe.rho_consistent() as u8 as f64, Bound::Equals(1.0));
        if (pp, qq) == (4.0, inf) {
            out.check(format!("{label} ratio spread"), probe.spread(), Bound::AtMost(p.max_spread));
        } else if (pp, qq) == (inf, 2.0) {
            out.check(format!("{label} ratio flatness"), probe.spread() - 1.0, Bound::AtMost(p.flatness));
        } else if !is_admissible(&probe.pair) && m.is_fully_anisotropic(DEFAULT_C_SEP) {
            out.check(format!("{label} ratio growth"), probe.growth(), Bound::AtLeast(p.min_growth));
        }
    }
    out.put("probes", &probes);
    out.table = Some(table);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GronwallParams {
    eps_mod: Modulation,
    mu_mod: Modulation,
    k_cut: f64,
    dt: Option<f64>,
    record_every: usize,
}

impl Default for GronwallParams {
    fn default() -> Self {
        Self {
            eps_mod: Modulation { amplitude: 0.1, omega: 1.0 },
            mu_mod: Modulation::NONE,
            k_cut: 4.0,
            dt: None,
            record_every: 50,
        }
    }
}

pub(super) fn gronwall(s: &Scenario) -> Result<Outcome, CliError> {
    let p: GronwallParams = s.params()?;
    let m = s.material.build()?;
    let mut cfg = GronwallConfig::new(m, p.eps_mod, p.mu_mod);
    cfg.grid = Grid3::cube(s.grid_n(cfg.grid.n[0]), s.grid_box(cfg.grid.lengths[0])).map_err(input)?;
    cfg.k_cut = p.k_cut;
    cfg.dt = p.dt;
    cfg.record_every = p.record_every;
    cfg.seed = s.seed;
    if let Some(t) = s.tmax {
        cfg.t_final = t;
    }
    let rep = gronwall_check(&cfg).map_err(input)?;
    let mut out = Outcome::default();
    out.check("C_emp", rep.c_emp, Bound::AtMost(rep.c_bound));
    out.check("L2 bound holds", rep.l2_bound_holds as u8 as f64, Bound::Equals(1.0));
    if p.eps_mod.amplitude == 0.0 && p.mu_mod.amplitude == 0.0 {
        out.check("energy deviation", rep.max_energy_deviation, Bound::Below(1e-10));
    }
    let mut table = Table::new(&["t", "energy_ratio", "integral", "l2_ratio"]);
    for i in 0..rep.times.len() {
        table.push_f64(&[rep.times[i], rep.energy_ratios[i], rep.integrals[i], rep.l2_ratios[i]]);
    }
    out.put("c_emp", rep.c_emp);
    out.put("c_bound", rep.c_bound);
    out.put("k_const", rep.k_const);
    out.put("ellipticity", [rep.lambda, rep.big_lambda]);
    out.put("max_energy_deviation", rep.max_energy_deviation);
    out.put("steps", rep.steps);
    out.put("dt", rep.dt);
    out.table = Some(table);
    Ok(out)
}
