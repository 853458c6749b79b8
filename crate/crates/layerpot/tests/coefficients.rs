use layerpot::coefficients::*;
use layerpot::linalg::{c, cdet, CMat2, C64};
use proptest::prelude::*;

fn cm(a: [[f64; 2]; 4]) -> CMat2 {
    CMat2::new(
        C64::new(a[0][0], a[0][1]),
        C64::new(a[1][0], a[1][1]),
        C64::new(a[2][0], a[2][1]),
        C64::new(a[3][0], a[3][1]),
    )
}

#[test]
fn identity_and_diagonal_constants() {
    let f = CoefficientField::identity();
    assert!((f.lambda_ell - 1.0).abs() < 1e-12 && (f.lambda_upper - 1.0).abs() < 1e-12);
    let d = CoefficientField::constant(CMat2::new(c(2.0), c(0.0), c(0.0), c(0.5))).unwrap();
    assert!((d.lambda_ell - 0.5).abs() < 1e-12 && (d.lambda_upper - 2.0).abs() < 1e-12);
}

#[test]
fn complex_lambda_matches_dense_grid_oracle() {
    let a = CMat2::new(c(1.0), C64::new(0.0, 0.1), C64::new(0.0, 0.1), c(1.0));
    let f = CoefficientField::constant(a).unwrap();
    // Oracle: brute-force minimum over a 100 x 100 grid of unit probes.
    let mut best = f64::INFINITY;
    for i in 0..100 {
        for j in 0..100 {
            let th = std::f64::consts::PI * i as f64 / 100.0;
            let ps = std::f64::consts::TAU * j as f64 / 100.0;
            let eta = [c(th.cos()), C64::from_polar(th.sin(), ps)];
            let mut s = c(0.0);
            for p in 0..2 {
                for q in 0..2 {
                    s += eta[p].conj() * a[(p, q)] * eta[q];
                }
            }
            best = best.min(s.re);
        }
    }
    assert!((f.lambda_ell - best).abs() < 1e-3);
    assert!((f.lambda_ell - hermitian_min_eig(&a)).abs() < 1e-12);
}

#[test]
fn non_elliptic_is_rejected() {
    let a = CMat2::new(c(1.0), c(0.0), c(0.0), c(-0.1));
    assert!(matches!(
        CoefficientField::constant(a),
        Err(layerpot::Error::NotElliptic { .. })
    ));
}

#[test]
fn conjugate_matrix_examples() {
    let id = conjugate_matrix(&CoefficientField::identity()).unwrap();
    assert!((id.at(0.0) - CMat2::identity()).norm() < 1e-15);
    let d = conjugate_matrix(
        &CoefficientField::constant(CMat2::new(c(3.0), c(0.0), c(0.0), c(5.0))).unwrap(),
    )
    .unwrap();
    assert!((d.at(0.0) - CMat2::new(c(0.2), c(0.0), c(0.0), c(1.0 / 3.0))).norm() < 1e-15);
    // Graph metric: det = 1 and symmetric, so the conjugate is itself.
    let xs = vec![-2.0, 0.0, 2.0];
    let ys = vec![1.0, 0.0, 0.5];
    let b = CoefficientField::graph_metric(xs, ys).unwrap();
    let bt = conjugate_matrix(&b).unwrap();
    for x in [-1.0, 0.5, 1.5] {
        assert!((cdet(&b.at(x)) - c(1.0)).norm() < 1e-14);
        assert!((bt.at(x) - b.at(x)).norm() < 1e-14);
    }
}

#[test]
fn b6_extracts_entries() {
    let a = cm([[2.0, 0.0], [0.0, 3.0], [0.0, 4.0], [5.0, 0.0]]);
    let f = CoefficientField::constant(a).unwrap();
    let b = b6(&f, 0.3);
    assert_eq!(b, CMat2::new(c(2.0), C64::new(0.0, 4.0), c(0.0), c(1.0)));
    assert!(cdet(&b).re >= f.lambda_ell);
    assert_eq!(b6(&CoefficientField::identity(), 7.0), CMat2::identity());
}

#[test]
fn triangularize_examples() {
    let t = triangularize(&CoefficientField::identity(), 64).unwrap();
    for k in 0..t.ys.len() {
        assert!((t.f[k] - t.ys[k]).abs() < 1e-12 && t.g[k].abs() < 1e-12);
        assert!((t.transformed.at(t.ys[k]) - CMat2::identity()).norm() < 1e-12);
    }
    let d = CoefficientField::constant(CMat2::new(c(2.0), c(0.0), c(0.0), c(1.0))).unwrap();
    let t = triangularize(&d, 64).unwrap();
    for k in 0..t.ys.len() {
        // Oracle: f' = 2 with f(0) = 0 gives f(y) = 2y.
        assert!((t.f[k] - 2.0 * t.ys[k]).abs() < 1e-12);
        assert!((t.transformed.at(t.ys[k])[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert!(t.g[k].abs() < 1e-15);
    }
}

#[test]
fn triangularize_variable_field() {
    let a0 = CoefficientField::analytic(
        |x| {
            let a11 = 1.0 + 0.3 * (-x * x).exp();
            let a21 = 0.2 * x.sin() * (-0.5 * x * x).exp();
            CMat2::new(c(a11), c(-0.1), c(a21), c(1.5))
        },
        (-5.0, 5.0),
    )
    .unwrap();
    let t = triangularize(&a0, 400).unwrap();
    for k in 0..t.ys.len() {
        let m = t.transformed.at(t.ys[k]);
        assert!((m[(0, 0)] - c(1.0)).norm() < 1e-8 && m[(1, 0)].norm() < 1e-8);
        assert!((t.pull_back(k) - a0.at(t.f[k])).norm() < 1e-6);
    }
}

#[test]
fn spec_json_round_trip() {
    let s = r#"{"kind":"constant","matrix":[[1,0],[0,0.1],[0,0.1],[1,0]],"reference":{"kind":"constant","matrix":[[1,0],[0,0],[0,0],[1,0]]}}"#;
    let spec: CoefficientSpec = serde_json::from_str(s).unwrap();
    let f = spec.build().unwrap();
    assert!((f.eps - 0.1).abs() < 1e-12);
    let p = r#"{"kind":"profile","grid":{"x":[-1,0,1],"A":[[[1,0],[0,0],[0,0],[1,0]],[[2,0],[0,0],[0,0],[2,0]],[[1,0],[0,0],[0,0],[1,0]]]}}"#;
    let f: CoefficientSpec = serde_json::from_str(p).unwrap();
    let f = f.build().unwrap();
    assert!((f.at(0.0)[(0, 0)] - c(2.0)).norm() < 1e-14);
}

proptest! {
    #[test]
    fn conjugate_preserves_ellipticity(
        a11 in 0.5f64..3.0, a22 in 0.5f64..3.0, off in -0.4f64..0.4, im in -0.2f64..0.2, skew in -1.0f64..1.0
    ) {
        let a = CMat2::new(c(a11), C64::new(off + skew, im), C64::new(off - skew, im), c(a22));
        if let Ok(f) = CoefficientField::constant(a) {
            let t = conjugate_matrix(&f).unwrap();
            prop_assert!(t.lambda_ell > 0.0);
        }
    }

    #[test]
    fn lambda_matches_hermitian_eigenvalue(
        a11 in 0.5f64..3.0, a22 in 0.5f64..3.0, re in -0.3f64..0.3, im in -0.3f64..0.3, im2 in -0.3f64..0.3
    ) {
        let a = CMat2::new(C64::new(a11, im2), C64::new(re, im), C64::new(re, -im), C64::new(a22, -im2));
        let f = CoefficientField::constant(a).unwrap();
        prop_assert!((f.lambda_ell - hermitian_min_eig(&a)).abs() < 1e-9);
        prop_assert!((f.lambda_upper - spectral_norm(&a)).abs() < 1e-12);
    }

    #[test]
    fn eps_is_zero_iff_profiles_agree(d in 0.0f64..0.5) {
        let a = CMat2::new(c(1.0), C64::new(0.0, d), C64::new(0.0, d), c(1.0));
        let f = CoefficientField::constant(a).unwrap().with_reference(CoefficientField::identity()).unwrap();
        prop_assert_eq!(f.eps == 0.0, d == 0.0);
        prop_assert!((f.eps - d).abs() < 1e-12);
    }
}
