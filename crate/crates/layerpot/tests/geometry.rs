use layerpot::geometry::*;
use layerpot::Point;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn square() -> DomainGeometry {
    build_closed_curve(&[
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ])
    .unwrap()
}

#[test]
fn special_domain_lipschitz_constants() {
    let flat =
        build_special_domain(&[-10.0, 10.0], &[0.0, 0.0], Point::new(0.0, 1.0), 10.0).unwrap();
    assert_eq!(flat.lipschitz_k1, 0.0);
    let xs: Vec<f64> = (0..=80).map(|k| -4.0 + 0.1 * k as f64).collect();
    let wedge = build_special_domain(
        &xs,
        &xs.iter().map(|x| x.abs() / 2.0).collect::<Vec<_>>(),
        Point::new(0.0, 1.0),
        4.0,
    )
    .unwrap();
    assert!((wedge.lipschitz_k1 - 0.5).abs() < 1e-12);
    assert_eq!(wedge.corners.len(), 1);
    let xs: Vec<f64> = (0..=400).map(|k| -PI + TAU * k as f64 / 400.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 0.3 * x.sin()).collect();
    let g = build_special_domain(&xs, &ys, Point::new(0.0, 1.0), PI).unwrap();
    // Oracle: maximum finite-difference slope over the sample grid.
    let fd = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
        .fold(0.0, f64::max);
    assert!((g.lipschitz_k1 - fd).abs() < 1e-15 && (g.lipschitz_k1 - 0.3).abs() < 1e-3);
}

#[test]
fn special_domain_rejects_bad_input() {
    assert!(
        build_special_domain(&[-1.0, 1.0], &[0.0, f64::NAN], Point::new(0.0, 1.0), 1.0).is_err()
    );
    assert!(build_special_domain(&[-1.0, 1.0], &[0.0, 0.0], Point::new(0.0, 1.0), 0.0).is_err());
}

#[test]
fn closed_curve_examples() {
    let gon: Vec<Point> = (0..128)
        .map(|k| {
            Point::new(
                (TAU * k as f64 / 128.0).cos(),
                (TAU * k as f64 / 128.0).sin(),
            )
        })
        .collect();
    let g = build_closed_curve(&gon).unwrap();
    assert!((g.perimeter() - TAU).abs() < 1e-3);
    assert!((square().perimeter() - 4.0).abs() < 1e-15);
    let l = build_closed_curve(&[
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(2.0, 1.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 2.0),
        Point::new(0.0, 2.0),
    ])
    .unwrap();
    assert_eq!(l.corners.iter().filter(|c| c.reentrant()).count(), 1);
    let mesh = make_mesh(&l, 24, 3.0).unwrap();
    assert!(mesh.panels.iter().any(|p| p.reentrant));
    assert!(build_closed_curve(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).is_err());
    let bowtie = [
        Point::new(0.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 0.0),
        Point::new(0.0, 1.0),
    ];
    assert!(build_closed_curve(&bowtie).is_err());
}

#[test]
fn clockwise_input_is_reoriented() {
    let cw = [
        Point::new(0.0, 0.0),
        Point::new(0.0, 1.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 0.0),
    ];
    let g = build_closed_curve(&cw).unwrap();
    let mesh = make_mesh(&g, 8, 1.0).unwrap();
    for (x, n) in mesh.nodes.iter().zip(&mesh.normals) {
        assert!(!g.contains(&(x + n * 1e-3)) && g.contains(&(x - n * 1e-3)));
    }
}

#[test]
fn circle_mesh_weights_sum_to_perimeter() {
    let c = build_circle(Point::zeros(), 1.0).unwrap();
    let mesh = make_mesh(&c, 32, 1.0).unwrap();
    let s: f64 = mesh.weights.iter().sum();
    assert!((s - TAU).abs() < 1e-10 * TAU);
    for ((x, n), t) in mesh.nodes.iter().zip(&mesh.normals).zip(&mesh.tangents) {
        assert!((n - x).norm() < 1e-14);
        assert!(n.dot(t).abs() < 1e-12 && (n.norm() - 1.0).abs() < 1e-12);
        assert!((Point::new(-n.y, n.x) - t).norm() < 1e-12);
    }
}

#[test]
fn square_grading_density_ratio() {
    let mesh = make_mesh(&square(), 16, 3.0).unwrap();
    // Oracle: nodes per unit length in the corner panel vs. a mid-edge panel.
    let density = |p: &Panel| mesh.order() as f64 / p.length();
    let corner = mesh
        .panels
        .iter()
        .filter(|p| p.corner_start)
        .map(density)
        .fold(0.0, f64::max);
    let mid = mesh
        .panels
        .iter()
        .filter(|p| !p.corner_start && !p.corner_end)
        .map(density)
        .fold(f64::INFINITY, f64::min);
    assert!(corner / mid >= 10.0, "ratio {}", corner / mid);
}

#[test]
fn flat_graph_normals_point_down() {
    let g = build_special_domain(&[-1.0, 1.0], &[0.0, 0.0], Point::new(0.0, 1.0), 1.0).unwrap();
    let mesh = make_mesh(&g, 8, 1.0).unwrap();
    for n in &mesh.normals {
        assert!((n - Point::new(0.0, -1.0)).norm() < 1e-15);
    }
}

#[test]
fn sloped_graph_normal_formula() {
    let xs = [-2.0, 2.0];
    let ys = [-1.0, 1.0];
    let g = build_special_domain(&xs, &ys, Point::new(0.0, 1.0), 2.0).unwrap();
    let mesh = make_mesh(&g, 8, 1.0).unwrap();
    let d = 0.5f64;
    let expect = Point::new(d, -1.0) / (1.0 + d * d).sqrt();
    for n in &mesh.normals {
        assert!((n - expect).norm() < 1e-14);
    }
}

#[test]
fn arclength_converges_fast() {
    // A non-circular smooth-ish check: a polygon edge is exact, so measure a
    // half-circle arc length via the panels of a circle of radius 2.
    let c = build_circle(Point::new(0.3, -0.2), 2.0).unwrap();
    for n in [8, 16] {
        let m = make_mesh(&c, n, 1.0).unwrap();
        let s: f64 = m.weights.iter().sum();
        assert!((s - 2.0 * TAU).abs() < 1e-12);
    }
}

#[test]
fn cone_points_satisfy_the_cone_condition() {
    let g = build_special_domain(&[-2.0, 2.0], &[0.0, 0.0], Point::new(0.0, 1.0), 2.0).unwrap();
    let mesh = make_mesh(&g, 16, 1.0).unwrap();
    let j = mesh
        .nodes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .unwrap()
        .0;
    let s = ConeSampler {
        aperture: 1.0,
        height_cap: 1.0,
        levels: 6,
        samples_per_level: 5,
        h_min: Some(0.01),
    };
    let pts = cone_points(&g, &mesh, j, &s).unwrap();
    let x = mesh.nodes[j];
    for y in &pts {
        let t = y.y;
        assert!((x - y).norm() < 2.0 * t && t <= 1.0 + 1e-12 && t > 0.0);
    }
}

#[test]
fn square_corner_blocks_narrow_cone() {
    let g = square();
    let mesh = make_mesh(&g, 16, 3.0).unwrap();
    let j = (0..mesh.len())
        .min_by(|&a, &b| {
            mesh.corner_distance[a]
                .partial_cmp(&mesh.corner_distance[b])
                .unwrap()
        })
        .unwrap();
    let narrow = ConeSampler {
        aperture: 0.2,
        height_cap: 0.5,
        levels: 6,
        samples_per_level: 5,
        h_min: None,
    };
    assert!(matches!(
        cone_points(&g, &mesh, j, &narrow),
        Err(layerpot::Error::EmptyCone { .. })
    ));
    let wide = ConeSampler {
        aperture: 1.0,
        ..narrow
    };
    assert!(!cone_points(&g, &mesh, j, &wide).unwrap().is_empty());
}

#[test]
fn circle_cone_has_all_levels() {
    let g = build_circle(Point::zeros(), 1.0).unwrap();
    let mesh = make_mesh(&g, 32, 1.0).unwrap();
    let s = ConeSampler {
        aperture: 1.0,
        height_cap: 0.5,
        levels: 6,
        samples_per_level: 5,
        h_min: None,
    };
    let pts = cone_points(&g, &mesh, 3, &s).unwrap();
    let h_min = 0.5 * mesh.local_length(3);
    for l in 0..6 {
        let d = 0.5 * (h_min / 0.5f64).powf(l as f64 / 5.0);
        assert!(
            pts.iter().any(|p| ((1.0 - p.norm()) - d).abs() < 1e-12),
            "level {l} missing"
        );
    }
}

#[test]
fn ahlfors_david_of_circle_is_about_two() {
    let g = build_circle(Point::zeros(), 1.0).unwrap();
    let k4 = g.ahlfors_david(&[Point::new(1.0, 0.0)], &[0.01, 0.1]);
    assert!((k4 - 2.0).abs() < 0.05, "{k4}");
}

proptest! {
    #[test]
    fn cone_membership_verified_by_brute_force(node in 0usize..128, a in 0.3f64..2.0) {
        let g = square();
        let mesh = make_mesh(&g, 16, 3.0).unwrap();
        let s = ConeSampler { aperture: a, height_cap: 0.3, levels: 5, samples_per_level: 4, h_min: None };
        if let Ok(pts) = cone_points(&g, &mesh, node, &s) {
            let x = mesh.nodes[node];
            for y in pts {
                // Independent brute-force distance to the four edges.
                let d = [y.x, 1.0 - y.x, y.y, 1.0 - y.y].into_iter().fold(f64::INFINITY, f64::min);
                prop_assert!((x - y).norm() < (1.0 + a) * d);
                prop_assert!(d <= 0.3 + 1e-12);
            }
        }
    }

    #[test]
    fn aperture_monotonicity(node in 0usize..256, seed in 0u64..1000) {
        let g = build_circle(Point::zeros(), 1.0).unwrap();
        let mesh = make_mesh(&g, 32, 1.0).unwrap();
        let f = |p: &Point| ((p.x * 3.1 + seed as f64).sin() * (p.y * 1.7).cos()).abs();
        let base = ConeSampler { aperture: 0.5, height_cap: 0.4, levels: 5, samples_per_level: 5, h_min: None };
        let small = cone_points(&g, &mesh, node, &base).unwrap();
        let wide = ConeSampler { aperture: 1.0, ..base };
        let big = cone_points(&g, &mesh, node, &wide).unwrap();
        for p in &small {
            prop_assert!(big.iter().any(|q| (p - q).norm() < 1e-14), "narrow sample missing from the wide cone");
        }
        let ns = small.iter().map(f).fold(0.0, f64::max);
        let nb = big.iter().map(f).fold(0.0, f64::max);
        prop_assert!(ns <= nb);
    }

    #[test]
    fn mesh_frames_are_orthonormal(n in 8usize..40, q in 1.0f64..4.0) {
        let mesh = make_mesh(&square(), n, q).unwrap();
        let s: f64 = mesh.weights.iter().sum();
        prop_assert!((s - 4.0).abs() < 1e-12);
        for (nu, t) in mesh.normals.iter().zip(&mesh.tangents) {
            prop_assert!(nu.dot(t).abs() < 1e-12);
            prop_assert!((nu.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_membership_is_exact_near_the_arc(th in 0.0f64..TAU, eps in 1e-12f64..1e-2, cx in -2.0f64..2.0) {
        let c = Point::new(cx, 0.5);
        let g = build_circle(c, 1.5).unwrap();
        let dir = Point::new(th.cos(), th.sin());
        prop_assert!(g.contains(&(c + dir * (1.5 - eps))));
        prop_assert!(!g.contains(&(c + dir * (1.5 + eps))));
    }
}
