use anisomax::fresnel::{characteristic, sheet_point, Covector, Sheet};
use anisomax::tensors::*;
use nalgebra::{Matrix3, Rotation3, Vector3};
use proptest::prelude::*;

fn material() -> impl Strategy<Value = DiagonalMaterial> {
    (prop::array::uniform3(0.3f64..5.0), prop::array::uniform3(0.3f64..5.0))
        .prop_map(|(e, m)| DiagonalMaterial::new(e, m).unwrap())
}

#[test]
fn standard_form_of_uniform_mu() {
    let m = DiagonalMaterial::new([2.0, 4.0, 6.0], [2.0; 3]).unwrap();
    let sf = reduce_to_standard_form(&m, 1.0).unwrap();
    assert_eq!(sf.eps_star, [1.0, 2.0, 3.0]);
    assert_eq!(sf.scale, [0.5; 3]);
    let sf = reduce_to_standard_form(&DiagonalMaterial::with_unit_mu([1.0, 2.0, 3.0]).unwrap(), 1.0).unwrap();
    assert_eq!(sf.scale, [1.0; 3]);
    let err = reduce_to_standard_form(&m, 0.0).unwrap_err();
    assert_eq!(err.to_string(), "standard-form reduction undefined at zero time frequency");
}

#[test]
fn validation_reports_band_violations() {
    let m = DiagonalMaterial::new([0.05, 2.0, 30.0], [1.0; 3]).unwrap();
    let r = validate_material(&m, Band::default(), 0.1).unwrap();
    assert!(!r.pass);
    let locs: Vec<_> = r.violations.iter().map(|v| v.location.as_str()).collect();
    assert_eq!(locs, ["eps[0]", "eps[2]"]);
    assert!(validate_material(&m, Band::default(), -1.0).is_err());
}

#[test]
fn field_nonfinite_sample_is_rejected() {
    let mut f = MaterialField::uniform([2, 1, 1], &DiagonalMaterial::isotropic());
    f.mu[1][(2, 2)] = f64::INFINITY;
    assert!(matches!(
        validate_material(&f, Band::default(), 0.0),
        Err(TensorError::NonFinite { name: "mu", node: 1 })
    ));
}

#[test]
fn material_json_round_trip() {
    let m = DiagonalMaterial::new([1.0, 2.0, 3.0], [1.5, 1.0, 0.5]).unwrap();
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<DiagonalMaterial>(&s).unwrap(), m);
    assert!(serde_json::from_str::<DiagonalMaterial>(r#"{"eps":[1,-2,3],"mu":[1,1,1]}"#).is_err());
}

proptest! {
    #[test]
    fn standard_form_maps_zero_sets(m in material(), xi0 in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0], theta in 0.0f64..3.1, phi in 0.0f64..6.28, outer in any::<bool>()) {
        let sf = reduce_to_standard_form(&m, xi0).unwrap();
        prop_assert!(sf.scale.iter().all(|&r| r > 0.0));
        let d = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let lam = sheet_point(sf.eps_star, d, if outer { Sheet::Outer } else { Sheet::Inner });
        prop_assert!(sf.polynomial(lam).abs() < 1e-10);
        let xi = sf.from_standard(lam);
        let scale = xi0.powi(4) + xi.iter().map(|x| x * x).sum::<f64>().powi(2) * 25.0;
        prop_assert!(characteristic(&m, &Covector::new(xi0, xi)).q_quartic.abs() < 1e-10 * scale);
    }

    #[test]
    fn validation_is_rotation_invariant(m in material(), angles in prop::array::uniform3(-3.0f64..3.0)) {
        let r = Rotation3::from_euler_angles(angles[0], angles[1], angles[2]).into_inner();
        let rot = |a: Matrix3<f64>| r * a * r.transpose();
        let f = MaterialField::new([1, 1, 1], vec![rot(m.eps_matrix())], vec![rot(m.mu_matrix())]).unwrap();
        let band = Band::new(0.2, 6.0).unwrap();
        let direct = validate_material(&m, band, 0.1).unwrap();
        let field = validate_material(&f, band, 0.1).unwrap();
        prop_assert_eq!(direct.pass, field.pass);
        let mut want = m.ratios();
        want.sort_by(f64::total_cmp);
        let gap = (want[1] - want[0]).min(want[2] - want[1]);
        prop_assert!((field.min_gap - gap).abs() < 1e-9 * (1.0 + gap));
        prop_assert_eq!(validate_material(&f, band, 0.1).unwrap(), field);
    }

    #[test]
    fn uniform_field_has_constant_samples(m in material()) {
        let f = MaterialField::uniform([2, 3, 1], &m);
        prop_assert_eq!(f.len(), 6);
        prop_assert!(f.eps.iter().all(|e| *e == Matrix3::from_diagonal(&Vector3::from(m.eps()))));
    }
}
