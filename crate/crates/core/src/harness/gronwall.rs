use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use num_complex::Complex64;

use crate::fresnel::curl_matrix;
use crate::spectral::data::{random_charge_free, rng_from_seed};
use crate::spectral::{Grid3, Medium, Modulation};
use crate::tensors::{DiagonalMaterial, MaterialField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallConfig {
    pub material: DiagonalMaterial,
    pub eps_mod: Modulation,
    pub mu_mod: Modulation,
    pub grid: Grid3,
    /// Spectral radius of the random initial data.
    pub k_cut: f64,
    pub t_final: f64,
    /// Time step of the per-mode integration (1e-3 when `None`).
    pub dt: Option<f64>,
    /// Record the energy every this many steps.
    pub record_every: usize,
    pub seed: u64,
}

impl GronwallConfig {
    pub fn new(material: DiagonalMaterial, eps_mod: Modulation, mu_mod: Modulation) -> Self {
        Self {
            material,
            eps_mod,
            mu_mod,
            grid: Grid3::cube(16, 2.0 * PI).expect("valid grid"),
            k_cut: 4.0,
            t_final: 10.0,
            dt: None,
            record_every: 50,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    pub times: Vec<f64>,
    /// `E(t)/E(0)` for the material energy.
    pub energy_ratios: Vec<f64>,
    /// `∫_0^t ‖∂_t(ε, μ)‖_{L^∞}` at each sample.
    pub integrals: Vec<f64>,
    /// `‖u(t)‖²_{L²} / ‖u(0)‖²_{L²}` for u = (E, H).
    pub l2_ratios: Vec<f64>,
    /// Ellipticity constants over the whole run.
    pub lambda: f64,
    pub big_lambda: f64,
    /// The constant `C = 1/λ` of the energy inequality.
    pub c_bound: f64,
    /// `K = Λ/λ`.
    pub k_const: f64,
    /// `max_t log(E(t)/E(0)) / ∫_0^t ‖∂_t(ε, μ)‖`, zero when the coefficients are constant.
    pub c_emp: f64,
    /// `max_t |E(t)/E(0) − 1|`.
    pub max_energy_deviation: f64,
    /// Whether `‖u(t)‖² ≤ K exp(C ∫) ‖u(0)‖²` held at every sample.
    pub l2_bound_holds: bool,
    pub pass: bool,
    pub steps: usize,
    pub dt: f64,
}

fn integral_of(medium: &Medium, a: f64, b: f64) -> f64 {
    let sub = 8;
    let h = (b - a) / sub as f64;
    (0..sub)
        .map(|j| {
            let (s, e) = (a + j as f64 * h, a + (j + 1) as f64 * h);
            0.5 * h * (medium.time_derivative_norm(s) + medium.time_derivative_norm(e))
        })
        .sum()
}

type Mode6 = [Complex64; 6];

struct ModeRhs {
    /// `C(ξ′)` for one mode.
    curl: [[f64; 3]; 3],
}

impl ModeRhs {
    /// `(iC μ(t)^{-1} B̂, −iC ε(t)^{-1} D̂)`.
    fn eval(&self, y: &Mode6, eps_t: [f64; 3], mu_t: [f64; 3]) -> Mode6 {
        let i = Complex64::new(0.0, 1.0);
        let mut out = [Complex64::default(); 6];
        for r in 0..3 {
            let (mut dh, mut de) = (Complex64::default(), Complex64::default());
            for c in 0..3 {
                dh += self.curl[r][c] * y[3 + c] / mu_t[c];
                de += self.curl[r][c] * y[c] / eps_t[c];
            }
            out[r] = i * dh;
            out[3 + r] = -i * de;
        }
        out
    }
}

fn axpy6(y: &Mode6, a: f64, k: &Mode6) -> Mode6 {
    std::array::from_fn(|c| y[c] + k[c] * a)
}

/// Integrates each Fourier mode of random charge-free data with classical
/// RK4 in a spatially constant, time-modulated medium.
pub fn gronwall_check(cfg: &GronwallConfig) -> Result<GronwallReport, HarnessError> {
    let grid = cfg.grid;
    let medium = Medium::new(MaterialField::uniform(grid.n, &cfg.material), cfg.eps_mod, cfg.mu_mod)?;
    if !(cfg.t_final > 0.0) || cfg.record_every == 0 {
        return Err(HarnessError::InvalidConfig(format!("t_final = {}, record_every = {}", cfg.t_final, cfg.record_every)));
    }
    let dt_req = cfg.dt.unwrap_or(1e-3);
    if !(dt_req > 0.0) {
        return Err(HarnessError::InvalidConfig(format!("dt = {dt_req}")));
    }
    let steps = (cfg.t_final / dt_req).ceil() as usize;
    let dt = cfg.t_final / steps as f64;
    let u0 = random_charge_free(&cfg.material, grid, cfg.k_cut, &mut rng_from_seed(cfg.seed));
    let spec = u0.spectrum(&grid.fft());
    let (eps, mu) = (cfg.material.eps(), cfg.material.mu());
    let (se0, sm0) = (cfg.eps_mod.factor(0.0), cfg.mu_mod.factor(0.0));
    let mut modes: Vec<(ModeRhs, Mode6, f64)> = Vec::new();
    for k in 0..grid.len() {
        let p = grid.partner(k);
        if p < k || spec.iter().all(|c| c[k] == Complex64::default()) {
            continue;
        }
        let c = curl_matrix(grid.wavevector(k));
        let y: Mode6 = std::array::from_fn(|r| if r < 3 { spec[r][k] * eps[r] * se0 } else { spec[r][k] * mu[r - 3] * sm0 });
        modes.push((
            ModeRhs {
                curl: std::array::from_fn(|r| std::array::from_fn(|s| c[(r, s)])),
            },
            y,
            if p == k { 1.0 } else { 2.0 },
        ));
    }
    let norm = grid.cell_volume() / grid.len() as f64;
    let measure = |modes: &[(ModeRhs, Mode6, f64)], t: f64| -> (f64, f64) {
        let (se, sm) = (cfg.eps_mod.factor(t), cfg.mu_mod.factor(t));
        let (mut energy, mut l2) = (0.0, 0.0);
        for (_, y, w) in modes {
            for r in 0..3 {
                let (ed, mb) = (eps[r] * se, mu[r] * sm);
                energy += w * (y[r].norm_sqr() / ed + y[3 + r].norm_sqr() / mb);
                l2 += w * (y[r].norm_sqr() / (ed * ed) + y[3 + r].norm_sqr() / (mb * mb));
            }
        }
        (energy * norm, l2 * norm)
    };
    let coeffs = |t: f64| -> ([f64; 3], [f64; 3]) {
        let (se, sm) = (cfg.eps_mod.factor(t), cfg.mu_mod.factor(t));
        (eps.map(|e| e * se), mu.map(|m| m * sm))
    };
    medium.check_ellipticity(0.0)?;
    let (e0, l2_0) = measure(&modes, 0.0);
    let mut times = vec![0.0];
    let mut energy_ratios = vec![1.0];
    let mut l2_ratios = vec![1.0];
    let mut integrals = vec![0.0];
    let mut acc = 0.0;
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        medium.check_ellipticity(t + 0.5 * dt)?;
        medium.check_ellipticity(t + dt)?;
        let (ea, ma) = coeffs(t);
        let (eb, mb) = coeffs(t + 0.5 * dt);
        let (ec, mc) = coeffs(t + dt);
        for (rhs, y, _) in modes.iter_mut() {
            let k1 = rhs.eval(y, ea, ma);
            let k2 = rhs.eval(&axpy6(y, 0.5 * dt, &k1), eb, mb);
            let k3 = rhs.eval(&axpy6(y, 0.5 * dt, &k2), eb, mb);
            let k4 = rhs.eval(&axpy6(y, dt, &k3), ec, mc);
            for c in 0..6 {
                y[c] += (k1[c] + (k2[c] + k3[c]) * 2.0 + k4[c]) * (dt / 6.0);
            }
        }
        acc += integral_of(&medium, t, t + dt);
        if step % cfg.record_every == 0 || step == steps {
            let tn = step as f64 * dt;
            let (e, l2) = measure(&modes, tn);
            times.push(tn);
            energy_ratios.push(e / e0);
            l2_ratios.push(l2 / l2_0);
            integrals.push(acc);
        }
    }
    let (lambda, big_lambda) = medium.uniform_bounds();
    let c_bound = 1.0 / lambda;
    let k_const = big_lambda / lambda;
    let mut c_emp = 0.0_f64;
    for (r, i) in energy_ratios.iter().zip(&integrals) {
        if *i > 1e-12 {
            c_emp = c_emp.max(r.ln() / i);
        }
    }
    let max_energy_deviation = energy_ratios.iter().fold(0.0_f64, |a, r| a.max((r - 1.0).abs()));
    let l2_bound_holds = l2_ratios
        .iter()
        .zip(&integrals)
        .all(|(r, i)| *r <= k_const * (c_bound * i).exp() * (1.0 + 1e-12));
    Ok(GronwallReport {
        times,
        energy_ratios,
        integrals,
        l2_ratios,
        lambda,
        big_lambda,
        c_bound,
        k_const,
        c_emp,
        max_energy_deviation,
        pass: c_emp <= c_bound && l2_bound_holds,
        l2_bound_holds,
        steps,
        dt,
    })
}
