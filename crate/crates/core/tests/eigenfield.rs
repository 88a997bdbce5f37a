use std::f64::consts::PI;

use anisomax::eigenfield::*;
use anisomax::tensors::MaterialField;
use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use proptest::prelude::*;

fn example_62(x: &[f64]) -> DMatrix<f64> {
    let (c, s) = (x[0].cos(), x[0].sin());
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

fn loop_samples(n: usize, turns: f64) -> Vec<Vec<f64>> {
    (0..n).map(|k| vec![2.0 * PI * turns * k as f64 / n as f64]).collect()
}

fn rotation_field(x: &[f64]) -> Matrix3<f64> {
    Rotation3::from_euler_angles(0.3 * x[0], -0.2 * x[1], 0.25 * x[0] * x[1]).into_inner()
}

fn rotated(x: &[f64]) -> DMatrix<f64> {
    let r = rotation_field(x);
    let a = r * Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)) * r.transpose();
    DMatrix::from_iterator(3, 3, a.iter().cloned())
}

proptest! {
    #[test]
    fn local_eigenpair_recovers_factorization(angles in prop::array::uniform3(-PI..PI), d in prop::array::uniform3(-5.0f64..5.0)) {
        let mut d = d;
        d.sort_by(f64::total_cmp);
        prop_assume!(d[1] - d[0] > 0.05 && d[2] - d[1] > 0.05);
        let q = Rotation3::from_euler_angles(angles[0], angles[1], angles[2]).into_inner();
        let a = q * Matrix3::from_diagonal(&Vector3::from(d)) * q.transpose();
        let a = DMatrix::from_iterator(3, 3, a.iter().cloned());
        for (i, &di) in d.iter().enumerate() {
            let (l, v) = eigenpair_of(&a, di + 0.01, &EigenOptions::default()).unwrap();
            prop_assert!((l - di).abs() < 1e-12);
            prop_assert!((&a * &v - &v * l).norm() < 1e-12);
            prop_assert!((v.norm() - 1.0).abs() < 1e-14);
            let first = v.iter().find(|x| x.abs() > 1e-8).unwrap();
            prop_assert!(*first > 0.0);
            prop_assert!((v.dot(&DVector::from_column_slice(q.column(i).as_slice()))).abs() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn reversed_path_returns_start(t0 in -1.0f64..1.0, len in 0.5f64..2.0) {
        let field = |x: &[f64]| rotated(&[x[0], 0.5 * x[0]]);
        let forward: Vec<Vec<f64>> = (0..=40).map(|k| vec![t0 + len * k as f64 / 40.0]).collect();
        let (_, v0) = local_eigenpair(&field, &forward[0], 2.0, &EigenOptions::default()).unwrap();
        let there = continue_along_path(&field, &forward, &v0, &EigenOptions::default()).unwrap();
        for w in there.vectors.windows(2) {
            prop_assert!(w[0].dot(&w[1]) > 0.0);
        }
        let back: Vec<Vec<f64>> = forward.iter().rev().cloned().collect();
        let again = continue_along_path(&field, &back, there.vectors.last().unwrap(), &EigenOptions::default()).unwrap();
        prop_assert!((again.vectors.last().unwrap() - &v0).norm() < 1e-8);
    }
}

#[test]
fn constant_path_is_constant() {
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
    let samples: Vec<Vec<f64>> = (0..10).map(|k| vec![k as f64]).collect();
    let v0 = DVector::from_vec(vec![0.0, -1.0, 0.0]);
    let path = continue_along_path(&|_: &[f64]| a.clone(), &samples, &v0, &EigenOptions::default()).unwrap();
    assert!(path.vectors.iter().all(|v| v == &path.vectors[0]));
    assert!((path.vectors[0][1].abs() - 1.0).abs() < 1e-15);
}

#[test]
fn example_loop_has_sign_holonomy() {
    for n in [64, 128, 256] {
        let once = detect_holonomy(&example_62, &loop_samples(n, 1.0), &EigenOptions::default()).unwrap();
        assert_eq!(once.signs, vec![-1, -1], "{n} samples");
        assert!(once.obstruction);
        let twice = detect_holonomy(&example_62, &loop_samples(2 * n, 2.0), &EigenOptions::default()).unwrap();
        assert_eq!(twice.signs, vec![1, 1], "{n} samples, two turns");
        assert!(!twice.obstruction);
    }
}

#[test]
fn contractible_loop_is_trivial() {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, -1.0]);
    let rep = detect_holonomy(&|_: &[f64]| a.clone(), &loop_samples(32, 1.0), &EigenOptions::default()).unwrap();
    assert_eq!(rep.signs, vec![1, 1]);
    assert!(!rep.obstruction);
}

#[test]
fn diagonal_field_gives_identity_frame() {
    let field = |x: &[f64]| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 + x[0], 2.0, 3.0 + x[1]]));
    let domain = GridDomain::new(vec![0.0, 0.0], vec![0.9, 0.9], vec![10, 10]).unwrap();
    let f = globalize_on_grid(&field, &domain, &EigenOptions::default()).unwrap();
    let id = DMatrix::<f64>::identity(3, 3);
    for node in 0..domain.len() {
        assert!((f.frame(node).unwrap() - &id).amax() < 1e-15);
    }
    assert!(f.edges.iter().all(|e| e.sign == 1));
}

#[test]
fn rotation_field_is_recovered() {
    let domain = GridDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![15, 15]).unwrap();
    let f = globalize_on_grid(&rotated, &domain, &EigenOptions::default()).unwrap();
    assert!(f.edges.iter().all(|e| e.sign == 1));
    assert!(f.certificate.max_orthogonality_error < 1e-12);
    assert!(f.certificate.max_offdiagonal < 1e-10);
    let mut col_signs = [0.0; 3];
    for node in 0..domain.len() {
        let phi = f.frame(node).unwrap();
        let r = rotation_field(&domain.coords(node));
        for c in 0..3 {
            let dot: f64 = (0..3).map(|i| phi[(i, c)] * r[(i, c)]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
            if node == 0 {
                col_signs[c] = dot.signum();
            }
            assert_eq!(dot.signum(), col_signs[c], "column {c} changes sign at node {node}");
        }
    }

    let other = globalize_on_grid(
        &rotated,
        &domain,
        &EigenOptions {
            root: Some(domain.len() - 1),
            ..EigenOptions::default()
        },
    )
    .unwrap();
    for c in 0..3 {
        let sign: f64 = (0..3).map(|i| f.frame(0).unwrap()[(i, c)] * other.frame(0).unwrap()[(i, c)]).sum();
        for node in 0..domain.len() {
            let (a, b) = (f.frame(node).unwrap(), other.frame(node).unwrap());
            let dot: f64 = (0..3).map(|i| a[(i, c)] * b[(i, c)]).sum();
            assert!((dot - sign).abs() < 1e-10);
        }
    }
}

#[test]
fn punctured_domain_is_inconsistent() {
    let field = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[x[0], x[1], x[1], -x[0]]);
    let domain = GridDomain::new(vec![-2.0, -2.0], vec![2.0, 2.0], vec![41, 41])
        .unwrap()
        .with_mask(|x| x[0].hypot(x[1]) >= 0.5);
    let err = globalize_on_grid(&field, &domain, &EigenOptions::default()).unwrap_err();
    assert!(err.to_string().contains("inconsistent global frame"), "{err}");
}

fn material_field(grid: [usize; 3], eps: impl Fn([usize; 3]) -> Matrix3<f64>) -> MaterialField {
    let n: usize = grid.iter().product();
    let nodes: Vec<[usize; 3]> = (0..n).map(|k| [k / (grid[1] * grid[2]), (k / grid[2]) % grid[1], k % grid[2]]).collect();
    MaterialField::new(grid, nodes.iter().map(|&c| eps(c)).collect(), vec![Matrix3::identity(); n]).unwrap()
}

#[test]
fn constant_material_has_identity_frame() {
    let eps = material_field([4, 4, 4], |_| Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)));
    let (frames, diag) = diagonalize_material(&eps, &EigenOptions::default()).unwrap();
    for node in 0..eps.len() {
        assert!((frames.frame(node).unwrap() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        assert_eq!(diag[node], [1.0, 2.0, 3.0]);
    }
}

#[test]
fn rotated_material_is_diagonalized() {
    let n = 8;
    let angle = |c: [usize; 3]| 0.2 * (2.0 * PI * c[0] as f64 / n as f64).sin();
    let eps = material_field([n, n, 1], |c| {
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), angle(c)).into_inner();
        r * Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)) * r.transpose()
    });
    let (frames, diag) = diagonalize_material(&eps, &EigenOptions::default()).unwrap();
    for node in 0..eps.len() {
        let phi = frames.frame(node).unwrap();
        let e = DMatrix::from_iterator(3, 3, eps.eps[node].iter().cloned());
        let d = phi.transpose() * e * phi;
        for i in 0..3 {
            assert!((d[(i, i)] - diag[node][i]).abs() < 1e-10);
            assert!((d[(i, i)] - (i + 1) as f64).abs() < 1e-10);
        }
        assert!((d.clone() - DMatrix::from_diagonal(&d.diagonal())).amax() < 1e-10);
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), angle(eps.node_coords(node))).into_inner();
        for c in 0..3 {
            let dot: f64 = (0..3).map(|i| phi[(i, c)] * r[(i, c)]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
        }
    }
}

fn crossing(n: usize) -> MaterialField {
    material_field([n, 1, 1], |c| {
        let x = c[0] as f64 / (n - 1) as f64;
        Matrix3::from_diagonal(&Vector3::new(1.0 + x, 2.0 - x, 3.0))
    })
}

#[test]
fn eigenvalue_crossing_is_rejected() {
    let err = diagonalize_material(&crossing(9), &EigenOptions::default()).unwrap_err();
    assert!(matches!(err, EigenError::NotSimple { .. }), "{err}");
    assert!(err.to_string().contains("eigenvalue not simple at node [4, 0, 0]"), "{err}");

    let err = diagonalize_material(&crossing(8), &EigenOptions::default()).unwrap_err();
    assert!(matches!(err, EigenError::PathResolution { .. }), "{err}");
}
