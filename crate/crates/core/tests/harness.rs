use anisomax::harness::*;
use anisomax::spectral::data::{annulus_data, rng_from_seed, Weighting};
use anisomax::spectral::{Grid3, LpBand, Modulation, SpectralError};
use anisomax::tensors::DiagonalMaterial;

fn biaxial() -> DiagonalMaterial {
    DiagonalMaterial::new([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]).unwrap()
}

fn pair(p: f64, q: f64) -> ExponentPair {
    ExponentPair::new(p, q).unwrap()
}

#[test]
fn fit_recovers_a_line() {
    let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
    let fit = linear_fit(&x, &y);
    assert!((fit.slope + 0.5).abs() < 1e-14 && (fit.intercept - 2.0).abs() < 1e-14);
    assert!(fit.residual < 1e-14);
}

#[test]
fn derivative_loss_and_admissibility() {
    let inf = f64::INFINITY;
    assert_eq!(derivative_loss(&pair(4.0, inf)), 1.25);
    assert_eq!(derivative_loss(&pair(inf, 2.0)), 0.0);
    assert_eq!(derivative_loss(&pair(2.0, inf)), 1.0);
    assert!(is_admissible(&pair(4.0, inf)));
    assert!(is_admissible(&pair(inf, 2.0)));
    assert!(!is_admissible(&pair(2.0, inf)));
    assert!(!is_admissible(&pair(3.0, 6.0)));
    assert!(ExponentPair::new(1.5, 2.0).is_err());
}

#[test]
fn exponent_serializes_infinity_as_string() {
    let p = pair(4.0, f64::INFINITY);
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(s, r#"{"p":4.0,"q":"inf"}"#);
    assert_eq!(serde_json::from_str::<ExponentPair>(&s).unwrap(), p);
}

#[test]
fn time_norms() {
    let t: Vec<f64> = (0..=10).map(|j| j as f64 / 10.0).collect();
    let v = vec![2.0; t.len()];
    assert!((lp_time_norm(&v, &t, Exponent::Finite(4.0)) - 2.0).abs() < 1e-14);
    assert_eq!(lp_time_norm(&[1.0, 3.0, 2.0], &[0.0, 1.0, 2.0], Exponent::Infinite), 3.0);
}

fn small_decay(t_min: f64) -> DecayConfig {
    DecayConfig {
        grid: Grid3::cube(64, 50.0).unwrap(),
        band: LpBand::Dyadic(0),
        t_min,
        t_max: None,
        samples: 9,
        seed: 3,
    }
}

#[test]
fn short_window_is_rejected() {
    let err = decay_fit(&biaxial(), &DecayData::standard(), &small_decay(2.0)).unwrap_err();
    assert!(matches!(err, HarnessError::InsufficientWindow { .. }));
    assert!(err.to_string().contains("insufficient decay window"));
    let mut cfg = small_decay(0.5);
    cfg.t_max = Some(100.0);
    assert!(matches!(
        decay_fit(&biaxial(), &DecayData::standard(), &cfg),
        Err(HarnessError::Spectral(SpectralError::Wraparound { .. }))
    ));
}

#[test]
fn stationary_data_does_not_decay() {
    let fit = decay_fit(&biaxial(), &DecayData::Stationary, &small_decay(0.5)).unwrap();
    assert!(fit.exponent.abs() < 0.05, "{}", fit.exponent);
    assert_eq!(fit.window, [0.5, 20.0]);
    assert_eq!(fit.times.len(), 9);
}

#[test]
fn charge_free_data_decays() {
    let fit = decay_fit(&biaxial(), &DecayData::standard(), &small_decay(0.5)).unwrap();
    assert!(fit.exponent > 0.2 && fit.exponent < 1.5, "{}", fit.exponent);
    assert!(fit.ci[0] < fit.exponent && fit.exponent < fit.ci[1]);
}

#[test]
fn annulus_data_is_normalized_charge_free() {
    let m = biaxial();
    let grid = Grid3::cube(32, 20.0).unwrap();
    let u = annulus_data(&m, grid, LpBand::Dyadic(0), &Weighting::Uniform, &mut rng_from_seed(4)).unwrap();
    assert!((u.l1_norm() - 1.0).abs() < 1e-12);
    let rho = anisomax::spectral::divergence_charges(&u, &m).unwrap();
    assert!(rho.max_abs() < 1e-12 * u.max_abs().max(1.0));
}

#[test]
fn strichartz_ratio_is_linear_in_the_data() {
    let m = biaxial();
    let cfg = StrichartzConfig::default();
    let grid = cfg.grid_for(4.0).unwrap();
    let u = annulus_data(&m, grid, LpBand::Dyadic(2), &cfg.weighting, &mut rng_from_seed(1)).unwrap();
    let times: Vec<f64> = (0..=20).map(|j| j as f64 * 0.03).collect();
    let pairs = [pair(4.0, f64::INFINITY), pair(f64::INFINITY, 2.0), pair(3.0, 6.0)];
    let a = strichartz_ratios_for(&m, &u, &pairs, &times);
    let b = strichartz_ratios_for(&m, &u.scaled(2.0), &pairs, &times);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12 * x, "{x} vs {y}");
    }
}

#[test]
fn strichartz_probe_bookkeeping() {
    let m = biaxial();
    let cfg = StrichartzConfig {
        n_max: 32,
        t_final: Some(0.3),
        ..StrichartzConfig::default()
    };
    let probe = strichartz_ratio(&m, pair(f64::INFINITY, 2.0), &[2.0, 4.0, 64.0], &cfg).unwrap();
    assert!(probe.rho_consistent());
    assert_eq!(probe.lambdas, vec![2.0, 4.0]);
    assert_eq!(probe.skipped, vec![64.0]);
    assert_eq!(probe.warnings.len(), 1);
    for r in &probe.ratios {
        assert!(*r >= 0.99 && *r < 1.3, "{r}");
    }
}

#[test]
fn gronwall_constant_coefficients_conserve_energy() {
    let rep = gronwall_check(&GronwallConfig::new(biaxial(), Modulation::NONE, Modulation::NONE)).unwrap();
    assert!(rep.max_energy_deviation < 1e-10, "{:e}", rep.max_energy_deviation);
    assert_eq!(rep.c_emp, 0.0);
    assert!(rep.pass);
}

#[test]
fn gronwall_bound_holds_for_modulated_media() {
    for omega in [1.0, 4.0] {
        let cfg = GronwallConfig::new(biaxial(), Modulation { amplitude: 0.1, omega }, Modulation::NONE);
        let rep = gronwall_check(&cfg).unwrap();
        assert!(rep.pass, "{omega}: C_emp {} vs C {}", rep.c_emp, rep.c_bound);
        assert!(rep.c_emp > 0.0 && rep.c_emp <= rep.c_bound);
        assert!((rep.lambda - 0.9).abs() < 1e-12);
        assert!(rep.max_energy_deviation > 1e-4);
    }
}

#[test]
fn gronwall_aborts_when_ellipticity_is_lost() {
    let cfg = GronwallConfig::new(biaxial(), Modulation { amplitude: 0.95, omega: 1.0 }, Modulation::NONE);
    assert!(matches!(
        gronwall_check(&cfg),
        Err(HarnessError::Spectral(SpectralError::Ellipticity { .. }))
    ));
}
