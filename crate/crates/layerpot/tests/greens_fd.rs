mod common;

use common::fd::{solve, FdGrid};
use layerpot::coefficients::CoefficientField;
use layerpot::greens::{green_constant, FourierGreen, FourierParams, GreenFunction};
use layerpot::linalg::{c, CMat2, Point};
use std::f64::consts::PI;

#[test]
fn anisotropic_constant_matches_finite_differences() {
    let a = CMat2::new(c(4.0), c(0.0), c(0.0), c(1.0));
    let far = |x: f64, t: f64| {
        green_constant(&a, &Point::new(0.0, 0.0), &Point::new(x, t))
            .unwrap()
            .0
            .re
    };
    let start = std::time::Instant::now();
    let u = solve(
        0.0,
        0.0,
        |_| 4.0,
        |_| 1.0,
        far,
        &[(1.0, 0.0), (0.3, 0.7)],
        &FdGrid::default(),
    );
    eprintln!("fd solve {:?}", start.elapsed());
    for (k, y) in [Point::new(1.0, 0.0), Point::new(0.3, 0.7)]
        .iter()
        .enumerate()
    {
        let exact = green_constant(&a, &Point::new(0.0, 0.0), y).unwrap().0.re;
        assert!((u[k] - exact).abs() < 1e-3, "{} vs {exact}", u[k]);
    }
}

#[test]
fn bump_coefficient_matches_finite_differences() {
    let a = |x: f64| 1.0 + 0.5 * (-x * x).exp();
    let field =
        CoefficientField::analytic(move |x| CMat2::identity() * c(a(x)), (-6.0, 6.0)).unwrap();
    let green = FourierGreen::new(
        field,
        FourierParams {
            x_range: Some((-1.0, 1.0)),
            ..Default::default()
        },
    )
    .unwrap();
    let x = Point::new(0.0, 1.0);
    let y = Point::new(0.7, 0.2);
    let far = |s: f64, t: f64| (((s - x.x).powi(2) + (t - x.y).powi(2)).ln()) / (4.0 * PI);
    let u = solve(x.x, x.y, a, a, far, &[(y.x, y.y)], &FdGrid::default());
    let v = green.eval(&x, &y).unwrap().value.re;
    eprintln!("fd {} fourier {v}", u[0]);
    assert!((u[0] - v).abs() < 1e-3);
}
