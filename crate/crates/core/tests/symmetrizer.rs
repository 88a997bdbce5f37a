use anisomax::symmetrizer::*;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

fn kerr() -> NonlinearLaw {
    NonlinearLaw::KerrDiag {
        eps0: [1.0, 2.0, 3.0],
        alpha: [1.0, 1.0, 1.0],
    }
}

fn symmetric_quadratic() -> NonlinearLaw {
    NonlinearLaw::Quadratic {
        eps0: [[1.0, 0.1, 0.0], [0.1, 0.8, 0.05], [0.0, 0.05, 0.6]],
        alpha: [[0.5, 0.2, 0.1], [0.2, 0.4, 0.3], [0.1, 0.3, 0.7]],
    }
}

fn asymmetric_quadratic() -> NonlinearLaw {
    NonlinearLaw::Quadratic {
        eps0: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        alpha: [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    }
}

#[test]
fn kerr_law_sweep() {
    let rep = sweep(&kerr(), 1000, 1).unwrap();
    assert!(rep.max_residual < 1e-12, "{rep:?}");
    assert!(rep.max_flux_violation < 1e-10, "{rep:?}");
    assert!(rep.max_roundtrip.unwrap() < 1e-12, "{rep:?}");
    assert!(rep.min_c1_eigenvalue > 0.0);
    assert_eq!(rep, sweep(&kerr(), 1000, 1).unwrap());
}

#[test]
fn symmetric_quadratic_sweep() {
    let rep = sweep(&symmetric_quadratic(), 1000, 2).unwrap();
    assert!(rep.max_residual < 1e-12, "{rep:?}");
    assert!(rep.max_flux_violation < 1e-10, "{rep:?}");
    assert_eq!(rep.max_roundtrip, None);
    assert!(rep.min_c1_eigenvalue > 0.0);
}

#[test]
fn asymmetric_ansatz_is_rejected() {
    let law = asymmetric_quadratic();
    let d = [0.1, 0.2, 0.05];
    let r = condition_residual(&law, d).unwrap();
    assert!(Vector3::from(r).norm() > 1e-4);
    assert!(matches!(build_symmetrizer(&law, d), Err(SymmetrizerError::NoSymmetrizer(_))));
    let check = check_flux_identity(&law, d, 1e-10).unwrap();
    assert!(!check.pass);
    assert!(check.max_violation > 1e-4);
}

#[test]
fn intensity_coupling_is_not_symmetrizable() {
    let law = NonlinearLaw::IntensityDiag {
        eps0: [1.0, 2.0, 3.0],
        alpha: [1.0, 2.0, 0.5],
    };
    let r = condition_residual(&law, [0.05, 0.08, -0.03]).unwrap();
    assert!(Vector3::from(r).norm() > 1e-6);
}

#[test]
fn zero_field_symmetrizer_is_psi0() {
    for law in [kerr(), symmetric_quadratic()] {
        let s = build_symmetrizer(&law, [0.0; 3]).unwrap();
        assert!((s.c1 - law.psi([0.0; 3]).unwrap()).amax() < 1e-15);
        let flux = flux_matrices(&law, [0.0; 3]).unwrap();
        assert!(flux.c.iter().all(|c| c.amax() == 0.0));
    }
}

#[test]
fn kerr_c1_matches_scalar_derivative() {
    let law = kerr();
    let s = build_symmetrizer(&law, [0.1, 0.0, 0.0]).unwrap();
    assert!((s.c1 - Matrix3::from_diagonal(&s.c1.diagonal())).amax() < 1e-15);
    let psi1 = |d1: f64| law.psi([d1, 0.0, 0.0]).unwrap()[(0, 0)];
    let h = 1e-5;
    let dpsi1 = (psi1(0.1 + h) - psi1(0.1 - h)) / (2.0 * h);
    assert!((s.c1[(0, 0)] - (psi1(0.1) + dpsi1 * 0.1)).abs() < 1e-9);
}

#[test]
fn cubic_inversion_matches_scalar_roots() {
    let law = DielectricLaw::kerr([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]);
    let e = invert_material(&law, [0.1; 3]).unwrap();
    for i in 0..3 {
        let eps0 = [1.0, 2.0, 3.0][i];
        assert!((eps0 * e[i] + e[i].powi(3) - 0.1).abs() < 1e-15);
    }
    assert_eq!(invert_material(&law, [0.0; 3]).unwrap(), [0.0; 3]);
    let linear = DielectricLaw::kerr([1.0, 2.0, 4.0], [0.0; 3]);
    assert_eq!(invert_material(&linear, [1.0, 1.0, 1.0]).unwrap(), [1.0, 0.5, 0.25]);
}

#[test]
fn large_field_fails_to_invert() {
    let law = DielectricLaw::kerr([1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]);
    assert!(matches!(invert_material(&law, [0.5, 0.0, 0.0]), Err(SymmetrizerError::NoConvergence { .. })));
}

proptest! {
    #[test]
    fn analytic_and_fd_residuals_agree(d in prop::array::uniform3(-0.14f64..0.14), law_idx in 0usize..3) {
        let law = [kerr(), symmetric_quadratic(), asymmetric_quadratic()][law_idx];
        let a = condition_residual(&law, d).unwrap();
        let f = condition_residual_fd(&law, d, default_fd_step(d)).unwrap();
        prop_assert!((Vector3::from(a) - Vector3::from(f)).norm() < 1e-6);
    }

    #[test]
    fn inversion_round_trips(e in prop::array::uniform3(-0.1f64..0.1)) {
        let law = DielectricLaw::kerr([1.0, 2.0, 3.0], [1.0, 0.5, 2.0]);
        let d = law.forward(e);
        let back = invert_material(&law, d).unwrap();
        prop_assert!((Vector3::from(back) - Vector3::from(e)).norm() < 1e-12);
        prop_assert!((Vector3::from(law.forward(back)) - Vector3::from(d)).norm() < 1e-12);
    }

    #[test]
    fn assembled_system_is_symmetrized(d in prop::array::uniform3(-0.1f64..0.1)) {
        let law = kerr();
        let c = build_symmetrizer(&law, d).unwrap().full();
        let flux = flux_matrices(&law, d).unwrap();
        for j in 0..3 {
            let a = flux.assembled(j);
            prop_assert!((a.transpose() * c - c * a).amax() < 1e-10);
        }
    }
}
