use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::decay::pointwise_sq;
use super::HarnessError;
use crate::spectral::data::{annulus_data, rng_from_seed, Weighting};
use crate::spectral::{FieldState, Grid3, GridSpec, LpBand, ModalPropagator, Spectrum};
use crate::tensors::DiagonalMaterial;

/// A Lebesgue exponent in `[1, ∞]`; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn recip(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => other
                .parse::<f64>()
                .map(Exponent::from)
                .map_err(|e| format!("invalid exponent {other:?}: {e}")),
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Infinite
        } else {
            Exponent::Finite(p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Exponent::Finite(p) => s.serialize_f64(p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exponent, E> {
                Ok(Exponent::from(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
                Exponent::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Exponents `(p, q)` of `L^p_t L^q_{x′}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: Exponent,
    pub q: Exponent,
}

impl ExponentPair {
    pub fn new(p: impl Into<Exponent>, q: impl Into<Exponent>) -> Result<Self, HarnessError> {
        let (p, q) = (p.into(), q.into());
        if p.value() < 2.0 || q.value() < 2.0 || p.value().is_nan() || q.value().is_nan() {
            return Err(HarnessError::InvalidPair { p: p.value(), q: q.value() });
        }
        Ok(Self { p, q })
    }
}

/// `ρ = 3(1/2 − 1/q) − 1/p`.
pub fn derivative_loss(pair: &ExponentPair) -> f64 {
    3.0 * (0.5 - pair.q.recip()) - pair.p.recip()
}

/// `2/p + 1/q ≤ 1/2`.
pub fn is_admissible(pair: &ExponentPair) -> bool {
    2.0 * pair.p.recip() + pair.q.recip() <= 0.5
}

/// `L^p` norm in time of samples at increasing `times` by the trapezoidal rule.
pub fn lp_time_norm(values: &[f64], times: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => values.iter().fold(0.0, |a: f64, &b| a.max(b)),
        Exponent::Finite(p) => {
            let mut acc = 0.0;
            for j in 1..values.len() {
                acc += 0.5 * (times[j] - times[j - 1]) * (values[j - 1].powf(p) + values[j].powf(p));
            }
            acc.powf(1.0 / p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzConfig {
    /// Side of the cubic box.
    pub box_length: f64,
    /// Largest grid size per axis.
    pub n_max: usize,
    /// Time samples per unit time for the `L^p_t` quadrature.
    pub per_unit_time: usize,
    /// Length of the time interval; the wraparound limit when `None`.
    pub t_final: Option<f64>,
    pub weighting: Weighting,
    pub seed: u64,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self {
            box_length: 0.5 * PI,
            n_max: 128,
            per_unit_time: 64,
            t_final: None,
            weighting: Weighting::OpticAxis { width: 0.3 },
            seed: 1,
        }
    }
}

impl StrichartzConfig {
    /// Grid for frequency `lam`: twice oversampled relative to the top of the annulus.
    pub fn grid_for(&self, lam: f64) -> Result<Grid3, HarnessError> {
        let need = 8.0 * lam * self.box_length / PI;
        let mut n = 16;
        while (n as f64) < need * (1.0 - 1e-9) && n < self.n_max {
            n *= 2;
        }
        Ok(Grid3::cube(n, self.box_length)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzProbe {
    pub pair: ExponentPair,
    pub rho: f64,
    pub admissible: bool,
    pub lambdas: Vec<f64>,
    /// `‖⟨D′⟩^{−ρ}u‖_{L^p_t L^q_{x′}} / ‖u0‖_{L²}` per probed λ.
    pub ratios: Vec<f64>,
    pub skipped: Vec<f64>,
    pub warnings: Vec<String>,
    pub t_final: f64,
}

impl StrichartzProbe {
    pub fn rho_consistent(&self) -> bool {
        self.rho == derivative_loss(&self.pair)
    }

    /// `max ratio / min ratio`.
    pub fn spread(&self) -> f64 {
        let max = self.ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Ratio at the largest probed λ over the ratio at the smallest.
    pub fn growth(&self) -> f64 {
        self.ratios.last().copied().unwrap_or(f64::NAN) / self.ratios.first().copied().unwrap_or(f64::NAN)
    }

    pub fn ratio_at(&self, lam: f64) -> Option<f64> {
        self.lambdas.iter().position(|&l| l == lam).map(|i| self.ratios[i])
    }
}

/// Ratios for fixed data `u0` (an (E,H) state) sampled at `times`.
pub fn strichartz_ratios_for(m: &DiagonalMaterial, u0: &FieldState, pairs: &[ExponentPair], times: &[f64]) -> Vec<f64> {
    let grid = u0.grid;
    let fft = grid.fft();
    let norm0 = u0.l2_norm();
    let mut spec = u0.spectrum(&fft);
    let prop = ModalPropagator::new(m, grid, &spec);
    let rhos: Vec<f64> = pairs.iter().map(derivative_loss).collect();
    let weight = |rho: f64| -> Vec<f64> { (0..grid.len()).map(|k| (1.0 + grid.wavenumber(k).powi(2)).powf(-0.5 * rho)).collect() };
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for (pair, &rho) in pairs.iter().zip(&rhos) {
        if pair.q != Exponent::Finite(2.0) && groups.iter().all(|(r, _)| *r != rho) {
            groups.push((rho, weight(rho)));
        }
    }
    let parseval: Vec<Option<Vec<f64>>> = pairs
        .iter()
        .zip(&rhos)
        .map(|(pair, &rho)| (pair.q == Exponent::Finite(2.0)).then(|| weight(rho)))
        .collect();
    let dv = grid.cell_volume();
    let nf = grid.len() as f64;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); pairs.len()];
    let mut scratch: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); grid.len()]);
    for &t in times {
        prop.evolve_into(t, &mut spec);
        let mut group_sq: Vec<Vec<f64>> = Vec::with_capacity(groups.len());
        for (_, w) in &groups {
            for c in 0..6 {
                scratch[c].iter_mut().zip(&spec[c]).zip(w).for_each(|((o, s), wk)| *o = s * wk);
            }
            group_sq.push(pointwise_sq(&grid, &fft, &scratch));
        }
        for (i, pair) in pairs.iter().enumerate() {
            let v = if let Some(w) = &parseval[i] {
                let mut acc = 0.0;
                for c in spec.iter() {
                    acc += c.iter().zip(w).map(|(z, wk)| z.norm_sqr() * wk * wk).sum::<f64>();
                }
                (acc * dv / nf).sqrt()
            } else {
                let g = groups.iter().position(|(r, _)| *r == rhos[i]).expect("group exists");
                let sq = &group_sq[g];
                match pair.q {
                    Exponent::Infinite => sq.iter().fold(0.0_f64, |a, &b| a.max(b)).sqrt(),
                    Exponent::Finite(q) => (sq.iter().map(|s| s.powf(0.5 * q)).sum::<f64>() * dv).powf(1.0 / q),
                }
            };
            series[i].push(v);
        }
    }
    pairs
        .iter()
        .zip(&series)
        .map(|(pair, s)| lp_time_norm(s, times, pair.p) / norm0)
        .collect()
}

/// Probes every pair at every λ, sharing evolutions across pairs.
pub fn strichartz_sweep(m: &DiagonalMaterial, pairs: &[ExponentPair], lambdas: &[f64], cfg: &StrichartzConfig) -> Result<Vec<StrichartzProbe>, HarnessError> {
    if !(cfg.box_length > 0.0) || cfg.per_unit_time == 0 {
        return Err(HarnessError::InvalidConfig(format!("box {} and {} samples per unit time", cfg.box_length, cfg.per_unit_time)));
    }
    let limit = GridSpec::wraparound_time(&Grid3::cube(16, cfg.box_length)?, m.max_speed());
    let t_final = cfg.t_final.unwrap_or(limit);
    if !(t_final > 0.0) {
        return Err(HarnessError::InvalidConfig(format!("t_final = {t_final}")));
    }
    let nt = (cfg.per_unit_time as f64 * t_final).ceil().max(2.0) as usize;
    let times: Vec<f64> = (0..=nt).map(|j| t_final * j as f64 / nt as f64).collect();
    let mut probes: Vec<StrichartzProbe> = pairs
        .iter()
        .map(|pair| StrichartzProbe {
            pair: *pair,
            rho: derivative_loss(pair),
            admissible: is_admissible(pair),
            lambdas: Vec::new(),
            ratios: Vec::new(),
            skipped: Vec::new(),
            warnings: Vec::new(),
            t_final,
        })
        .collect();
    for &lam in lambdas {
        let band = LpBand::from_lambda(lam)?;
        let grid = cfg.grid_for(lam)?;
        if 4.0 * lam > grid.nyquist_radius() * (1.0 + 1e-12) {
            for p in probes.iter_mut() {
                p.skipped.push(lam);
                p.warnings.push(format!(
                    "λ = {lam}: annulus up to {} exceeds the grid Nyquist radius {}",
                    4.0 * lam,
                    grid.nyquist_radius()
                ));
            }
            continue;
        }
        let u0 = annulus_data(m, grid, band, &cfg.weighting, &mut rng_from_seed(cfg.seed))?;
        let ratios = strichartz_ratios_for(m, &u0, pairs, &times);
        for (p, r) in probes.iter_mut().zip(ratios) {
            p.lambdas.push(lam);
            p.ratios.push(r);
        }
    }
    Ok(probes)
}

pub fn strichartz_ratio(m: &DiagonalMaterial, pair: ExponentPair, lambdas: &[f64], cfg: &StrichartzConfig) -> Result<StrichartzProbe, HarnessError> {
    Ok(strichartz_sweep(m, &[pair], lambdas, cfg)?.remove(0))
}
