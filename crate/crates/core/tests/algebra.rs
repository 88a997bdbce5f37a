use anisomax::fresnel::*;
use anisomax::tensors::{reduce_to_standard_form, standard_polynomial, DiagonalMaterial};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

fn m123() -> DiagonalMaterial {
    DiagonalMaterial::with_unit_mu([1.0, 2.0, 3.0]).unwrap()
}

fn material() -> impl Strategy<Value = DiagonalMaterial> {
    (prop::array::uniform3(0.3f64..5.0), prop::array::uniform3(0.3f64..5.0))
        .prop_map(|(e, m)| DiagonalMaterial::new(e, m).unwrap())
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0f64..3.0)
}

proptest! {
    #[test]
    fn curl_is_cross_product(xi in vec3(), v in vec3()) {
        let c = curl_matrix(xi);
        prop_assert_eq!(c.transpose(), -c);
        let got = c * Vector3::from(v);
        let want = Vector3::from(xi).cross(&Vector3::from(v));
        prop_assert!((got - want).norm() < 1e-14 * (1.0 + want.norm()));
        prop_assert!((c * Vector3::from(xi)).norm() < 1e-14);
    }

    #[test]
    fn reduced_symbols_share_determinant(m in material(), xi0 in -3.0f64..3.0, xi in vec3()) {
        let (me, mh) = me_mh(&m, xi);
        let w2 = xi0 * xi0;
        let de = (me - Matrix3::identity() * w2).determinant();
        let dh = (mh - Matrix3::identity() * w2).determinant();
        let q = characteristic(&m, &Covector::new(xi0, xi)).q_sextic;
        let scale = (w2 + me.abs().max().max(mh.abs().max())).powi(3);
        prop_assert!((de - dh).abs() < 1e-12 * scale);
        prop_assert!((de - q).abs() < 1e-10 * scale);
    }

    #[test]
    fn reduced_symbol_spectrum_is_nonnegative(m in material(), xi in vec3()) {
        let (me, _) = me_mh(&m, xi);
        let ev = me.complex_eigenvalues();
        let scale = me.abs().max().max(1e-300);
        for z in ev.iter() {
            prop_assert!(z.im.abs() < 1e-8 * scale);
            prop_assert!(z.re > -1e-10 * scale);
        }
    }

    #[test]
    fn z_eff_is_scaled_tilde(m in material(), xi0 in -3.0f64..3.0, xi in vec3()) {
        let z = adjugate_z(&m, &Covector::new(xi0, xi));
        prop_assert_eq!(z.z_eff, z.z_tilde_eff * (xi0 * xi0));
    }

    #[test]
    fn quartic_is_homogeneous(m in material(), xi0 in -2.0f64..2.0, xi in vec3(), tau in 0.1f64..4.0) {
        let c = Covector::new(xi0, xi);
        let q = characteristic(&m, &c).q_quartic;
        let qt = characteristic(&m, &c.scaled(tau)).q_quartic;
        prop_assert!((qt - tau.powi(4) * q).abs() < 1e-10 * tau.powi(4) * c.norm_sq().powi(2).max(1.0) * 50.0);
    }

    #[test]
    fn standard_form_preserves_zero_set(m in material(), xi0 in 0.2f64..3.0, xi in vec3()) {
        let sf = reduce_to_standard_form(&m, xi0).unwrap();
        let lam = sf.to_standard(xi);
        let q = characteristic(&m, &Covector::new(xi0, xi)).q_quartic / xi0.powi(4);
        let p = standard_polynomial(sf.eps_star, lam);
        let scale = 1.0 + lam.iter().map(|x| x * x).sum::<f64>().powi(2) * 25.0;
        prop_assert!((q - p).abs() < 1e-10 * scale, "{q} vs {p}");
    }
}

#[test]
fn identity_suite_meets_tolerances() {
    let start = std::time::Instant::now();
    let rep = identity_suite(10_000, 1);
    assert!(start.elapsed().as_secs_f64() < 30.0);
    for (name, value, tol) in rep.checks() {
        assert!(value < tol, "{name}: {value:e}");
    }
    assert_eq!(rep, identity_suite(10_000, 1));
}

#[test]
fn isotropic_product_block_matches_example() {
    let b = maxwell_symbol(&DiagonalMaterial::isotropic(), &Covector::new(1.0, [1.0, 0.0, 0.0]));
    let c = curl_matrix([1.0, 0.0, 0.0]);
    let me = -(c * c);
    for r in 0..3 {
        for col in 0..3 {
            let want = me[(r, col)] - if r == col { 1.0 } else { 0.0 };
            assert!((b.product[(r, col)].re - want).abs() < 1e-15);
            assert_eq!(b.product[(r, col)].im, 0.0);
        }
    }
}

#[test]
fn singular_points_are_conical() {
    let m = m123();
    let sp = singular_points(&m).unwrap();
    let (a, c) = (1.5f64.sqrt(), 0.5f64.sqrt());
    for want in [[a, 0.0, c], [a, 0.0, -c], [-a, 0.0, c], [-a, 0.0, -c]] {
        assert!(sp.original.iter().any(|p| (0..3).all(|i| (p[i] - want[i]).abs() < 1e-14)), "{want:?}");
    }
    for cert in sp.certify(&m) {
        assert!(cert.q.abs() < 1e-12);
        assert!(cert.grad_norm < 1e-10);
        assert!(cert.dq_dxi0.abs() < 1e-10);
        assert!(cert.hessian_det.abs() > 1e-3);
    }
}

#[test]
fn singular_points_need_separation() {
    let m = DiagonalMaterial::with_unit_mu([1.0, 1.05, 3.0]).unwrap();
    assert!(matches!(singular_points(&m), Err(FresnelError::Separation { .. })));
}

#[test]
fn closed_form_curvature_matches_implicit_surface() {
    let m = m123();
    let mesh: Vec<[f64; 3]> = surface_mesh(&m, 600).into_iter().map(|p| p.coords).collect();
    let cmp = compare_curvatures(&m, &mesh, RegionRadii::default()).unwrap();
    assert!(cmp.compared >= 500, "{cmp:?}");
    assert!(cmp.max_rel_k < 1e-3 && cmp.max_rel_km < 1e-3, "{cmp:?}");
}

#[test]
fn parabolic_point_is_found() {
    let r = find_parabolic_point(&m123()).unwrap();
    assert!(r.k_implicit.abs() < 1e-6);
    assert!(r.km_implicit.abs() > 0.01);
}
