use layerpot::coefficients::CoefficientField;
use layerpot::geometry::{build_circle, build_closed_curve, build_special_domain, make_mesh, ConeSampler};
use layerpot::greens::ConstantGreen;
use layerpot::linalg::{c, cmat, CVec2, Point, C64, I};
use layerpot::potentials::{eval_double, BoundaryDensity, InteriorField};
use layerpot::verify::*;
use std::sync::Arc;

fn unit_disk() -> layerpot::geometry::DomainGeometry {
    build_circle(Point::zeros(), 1.0).unwrap()
}

fn double_layer(panels: usize, f: impl Fn(&Point) -> f64) -> (InteriorField, Vec<C64>, Arc<layerpot::geometry::QuadratureMesh>) {
    let mesh = Arc::new(make_mesh(&unit_disk(), panels, 1.0).unwrap());
    let green = Arc::new(ConstantGreen::new(CoefficientField::identity()).unwrap());
    let dens = BoundaryDensity::from_fn(&mesh, |p| c(f(p)));
    let values = dens.values.clone();
    let m = mesh.clone();
    let field = InteriorField::new("D f", move |x| {
        let (u, g) = eval_double(&*green, &m, &dens, x)?;
        Ok((u, g.unwrap()))
    });
    (field, values, mesh)
}

// ---------------------------------------------------------------- NTM

#[test]
fn ntm_of_constant_is_its_modulus() {
    let g = unit_disk();
    let mesh = make_mesh(&g, 8, 1.0).unwrap();
    let n = ntm(&|_| Ok(-2.5), &g, &mesh, &ConeSampler::default()).unwrap();
    assert!(n.skipped.is_empty());
    assert!(n.values.iter().all(|v| *v == Some(2.5)));
}

#[test]
fn ntm_is_monotone_in_aperture() {
    let g = build_closed_curve(&[Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0), Point::new(0.0, 1.0)]).unwrap();
    let mesh = make_mesh(&g, 16, 2.0).unwrap();
    let f = |p: &Point| Ok((3.0 * p.x).sin() * (2.0 * p.y).cos() + p.y * p.y);
    let narrow = ntm(&f, &g, &mesh, &ConeSampler { aperture: 0.5, ..Default::default() }).unwrap();
    let wide = ntm(&f, &g, &mesh, &ConeSampler { aperture: 1.0, ..Default::default() }).unwrap();
    for (a, b) in narrow.values.iter().zip(&wide.values) {
        if let (Some(a), Some(b)) = (a, b) {
            assert!(a <= b);
        }
    }
}

#[test]
fn ntm_of_double_layer_is_refinement_stable() {
    let g = unit_disk();
    let mut ratios = Vec::new();
    for panels in [16, 32] {
        let (field, f, mesh) = double_layer(panels, |p| (2.0 * p.x).cos() + p.y);
        let sampler = ConeSampler { height_cap: 0.3, h_min: Some(0.02), ..Default::default() };
        let n = ntm(&|x| Ok(field.evaluate(x)?.0.norm()), &g, &mesh, &sampler).unwrap();
        ratios.push(n.lp(&mesh.weights, 2.0) / lp_norm(&mesh.weights, &f, 2.0));
    }
    assert!(ratios[0].is_finite() && ratios[0] > 0.0);
    assert!((ratios[1] / ratios[0] - 1.0).abs() <= 0.2, "{ratios:?}");
}

// ---------------------------------------------------------------- Carleson

fn half_plane() -> layerpot::geometry::DomainGeometry {
    build_special_domain(&[-100.0, 100.0], &[0.0, 0.0], Point::new(0.0, 1.0), 50.0).unwrap()
}

#[test]
fn carleson_of_linear_function_on_half_plane() {
    let field = InteriorField::new("x", |x| Ok((c(x.x), CVec2::new(c(1.0), c(0.0)))));
    let radii = [0.5, 1.0, 2.0];
    let rep = carleson_functional(&field, &half_plane(), &radii, &[Point::new(0.3, 0.0)], &CarlesonOptions::default()).unwrap();
    for s in &rep.samples {
        assert!((s.sigma - 2.0 * s.radius).abs() < 1e-12);
        assert!((s.value - s.radius * s.radius / 3.0).abs() <= 1e-4, "R = {}: {}", s.radius, s.value);
    }
    assert!((rep.sup - 4.0 / 3.0).abs() < 1e-4);
    let constant = InteriorField::new("1", |_| Ok((c(1.0), CVec2::zeros())));
    let rep = carleson_functional(&constant, &half_plane(), &radii, &[Point::zeros()], &CarlesonOptions::default()).unwrap();
    assert_eq!(rep.sup, 0.0);
}

#[test]
fn carleson_collar_is_excluded_and_bounded() {
    let field = InteriorField::new("x", |x| Ok((c(x.x), CVec2::new(c(1.0), c(0.0)))));
    let h = 0.05;
    let opts = CarlesonOptions { h_min: h, ..Default::default() };
    let rep = carleson_functional(&field, &half_plane(), &[1.0], &[Point::zeros()], &opts).unwrap();
    let s = &rep.samples[0];
    // int_{h < t, |X| < 1} t dX = 2/3 (1 - h^2)^{3/2}, over sigma = 2.
    let exact = (1.0 - h * h).powf(1.5) / 3.0;
    assert!((s.value - exact).abs() < 1e-6, "{} vs {exact}", s.value);
    assert!((s.collar_bound - 0.5 * h * h).abs() < 1e-12);
}

#[test]
fn boundary_measure_of_balls() {
    let g = unit_disk();
    // A ball of radius r centred on the unit circle meets an arc of angle 4 asin(r/2).
    for r in [0.1, 0.7, 1.5] {
        let m = boundary_measure_in_ball(&g, &Point::new(1.0, 0.0), r);
        assert!((m - 4.0 * (r / 2.0f64).asin()).abs() < 1e-12);
    }
    assert!((boundary_measure_in_ball(&g, &Point::zeros(), 2.0) - std::f64::consts::TAU).abs() < 1e-12);
    assert_eq!(boundary_measure_in_ball(&g, &Point::zeros(), 0.5), 0.0);
    let sq = build_closed_curve(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]).unwrap();
    assert!((boundary_measure_in_ball(&sq, &Point::zeros(), 0.5) - 1.0).abs() < 1e-12);
}

#[test]
fn carleson_of_double_layer_is_refinement_stable() {
    let g = unit_disk();
    let mut sups = Vec::new();
    for panels in [16, 32] {
        let (field, f, mesh) = double_layer(panels, |p| (3.0 * p.x).sin() + 0.5 * p.y);
        let centers = [Point::new(1.0, 0.0), Point::new(0.0, -1.0)];
        let opts = CarlesonOptions { h_min: 0.01, radial_panels: 4, order: 12, scan: 128 };
        let rep = carleson_functional(&field, &g, &[0.25, 0.5], &centers, &opts).unwrap();
        sups.push((rep.sup, bmo_norm(&mesh, &f)));
    }
    assert!(sups[0].0 > 0.0 && sups[0].0.is_finite());
    assert!((sups[1].0 / sups[0].0 - 1.0).abs() <= 0.2, "{sups:?}");
    assert!(sups[1].0 / (sups[1].1 * sups[1].1) < 1e3);
}

#[test]
fn bmo_norm_examples() {
    let mesh = make_mesh(&unit_disk(), 16, 1.0).unwrap();
    assert!(bmo_norm(&mesh, &vec![c(3.0); mesh.len()]) < 1e-14);
    let step: Vec<C64> = mesh.nodes.iter().map(|p| c(p.y.signum())).collect();
    let b = bmo_norm(&mesh, &step);
    assert!(b > 0.5 && b <= 1.0 + 1e-12, "{b}");
}

// ---------------------------------------------------------------- atoms

use layerpot::potentials::SpaceTag;
use layerpot::solvers::{solve_neumann, Setup};

fn disk_setup(a: layerpot::CMat2, panels: usize) -> Setup {
    Setup::new(unit_disk(), &CoefficientField::constant(a).unwrap(), panels, 1.0).unwrap()
}

#[test]
fn atom_decay_examples() {
    let sampler = ConeSampler::default();
    let center = Point::new(1.0, 0.0);
    let decay = |s: &Setup, r: f64| {
        let atom = BoundaryDensity::atom(&s.mesh, center, r).unwrap();
        atom_decay(&solve_neumann(s, &atom).unwrap(), 0.25, &sampler).unwrap()
    };
    let s0 = disk_setup(layerpot::CMat2::identity(), 32);
    let (a, b) = (decay(&s0, 0.4), decay(&s0, 0.2));
    assert!(a.is_finite() && b.is_finite() && a > 0.0);
    assert!(spread(&[a, b]) <= 3.0, "{a} vs {b}");

    let s1 = disk_setup(cmat(c(1.0), I * 0.05, I * 0.05, c(1.0)), 32);
    let a1 = decay(&s1, 0.4);
    assert!(spread(&[a, a1]) <= 2.0, "{a} vs {a1}");

    let zero = BoundaryDensity { values: vec![c(0.0); s0.mesh.len()], space: SpaceTag::H1Atom { center: [1.0, 0.0], radius: 0.4 } };
    assert_eq!(atom_decay(&solve_neumann(&s0, &zero).unwrap(), 0.25, &sampler).unwrap(), 0.0);
}

// ---------------------------------------------------------------- maximum principle

fn square_setup(a: layerpot::CMat2, panels: usize) -> Setup {
    let v = [Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)];
    Setup::new(build_closed_curve(&v).unwrap(), &CoefficientField::constant(a).unwrap(), panels, 3.0).unwrap()
}

#[test]
fn maximum_principle_for_the_laplacian() {
    let points = [Point::new(0.0, 0.0), Point::new(0.4, -0.3)];
    let disk = disk_setup(layerpot::CMat2::identity(), 16);
    let r = max_principle(&disk, &trig_densities(&disk.mesh, 4), &points).unwrap();
    assert!((r.c_solve - 1.0).abs() <= 1e-6 && (r.c_green - 1.0).abs() <= 1e-6, "{r:?}");
    let sq = square_setup(layerpot::CMat2::identity(), 32);
    let r = max_principle(&sq, &trig_densities(&sq.mesh, 4), &points).unwrap();
    assert!((r.c_solve - 1.0).abs() <= 1e-4 && r.disagreement <= 1e-3, "{r:?}");
}

#[test]
fn maximum_principle_constant_is_stable_for_complex_perturbation() {
    let a = cmat(c(1.0), I * 0.1, I * 0.1, c(1.0));
    let points = [Point::new(0.0, 0.0), Point::new(0.3, 0.2)];
    let mut cs = Vec::new();
    for panels in [16, 32] {
        let s = square_setup(a, panels);
        let r = max_principle(&s, &trig_densities(&s.mesh, 4), &points).unwrap();
        assert!(r.disagreement <= 1e-2, "{r:?}");
        cs.push(r.c_solve);
    }
    assert!(cs[0].is_finite() && cs[0] >= 1.0 - 1e-6);
    assert!((cs[1] / cs[0] - 1.0).abs() <= 0.1, "{cs:?}");
}

// ---------------------------------------------------------------- perturbation

#[test]
fn perturbation_ratios_are_lipschitz() {
    let g = unit_disk();
    let mesh = make_mesh(&g, 16, 1.0).unwrap();
    let dir = cmat(c(0.0), I, I, c(0.0));
    let curve = perturbation_sweep(&g, &mesh, &CoefficientField::identity(), dir, &[0.0, 0.02, 0.05, 0.1]).unwrap();
    assert!(curve.truncated_at.is_none());
    assert_eq!(curve.points[0].delta_norm, 0.0);
    let ratios: Vec<f64> = curve.points.iter().filter_map(|p| p.ratio).collect();
    assert_eq!(ratios.len(), 3);
    assert!(spread(&ratios) <= 1.5, "{ratios:?}");
    for p in &curve.points {
        assert!(p.jump_residual < 1e-3 && p.condition.is_finite());
    }
}

#[test]
fn perturbation_sweep_stops_when_ellipticity_is_lost() {
    let g = unit_disk();
    let mesh = make_mesh(&g, 8, 1.0).unwrap();
    let dir = cmat(c(-1.0), c(0.0), c(0.0), c(0.0));
    let curve = perturbation_sweep(&g, &mesh, &CoefficientField::identity(), dir, &[0.5, 1.5, 2.0]).unwrap();
    assert_eq!(curve.points.len(), 1);
    assert_eq!(curve.truncated_at, Some(1.5));
}

#[test]
fn operator_norm_of_diagonal() {
    let m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), C64::new(0.0, -3.0), c(2.0)]));
    assert!((operator_norm(&m, &[0.2, 0.5, 0.3]) - 3.0).abs() < 1e-10);
}

// ---------------------------------------------------------------- Rellich

#[test]
fn rellich_ratios() {
    let s = Setup::new(
        build_special_domain(&[-4.0, 4.0], &[0.0, 0.0], Point::new(0.0, 1.0), 4.0).unwrap(),
        &CoefficientField::identity(),
        32,
        1.0,
    )
    .unwrap();
    let bumps: Vec<Vec<C64>> = (1..=4)
        .map(|k| s.mesh.nodes.iter().map(|p| c((-(p.x * p.x)).exp() * (k as f64 * p.x).cos())).collect())
        .collect();
    let r = rellich_comparability(&s, &bumps).unwrap();
    assert!(r.excluded.is_empty() && r.min > 0.0 && r.spread.is_finite(), "{r:?}");

    let disk = disk_setup(layerpot::CMat2::identity(), 16);
    let mut fs = trig_densities(&disk.mesh, 4);
    fs.push(vec![c(1.0); disk.mesh.len()]);
    let r = rellich_comparability(&disk, &fs).unwrap();
    assert_eq!(r.excluded, vec![4]);
}

#[test]
fn rellich_spread_is_refinement_stable_on_a_lipschitz_graph() {
    let xs = [-4.0, -1.0, 0.0, 1.0, 4.0];
    let ys = [0.0, 0.0, 0.5, 0.0, 0.0];
    let mut spreads = Vec::new();
    for panels in [32, 64] {
        let s = Setup::new(build_special_domain(&xs, &ys, Point::new(0.0, 1.0), 4.0).unwrap(), &CoefficientField::identity(), panels, 2.0).unwrap();
        let fs: Vec<Vec<C64>> = (1..=6)
            .map(|k| s.mesh.nodes.iter().map(|p| c((-(p.x * p.x) / 2.0).exp() * (k as f64 * 0.7 * p.x).sin())).collect())
            .collect();
        spreads.push(rellich_comparability(&s, &fs).unwrap().spread);
    }
    assert!((spreads[1] / spreads[0] - 1.0).abs() <= 0.3, "{spreads:?}");
}

// ---------------------------------------------------------------- suite

#[test]
fn reference_suite_passes() {
    let reports = run_suite(&SuiteConfig::reference_disk());
    for r in &reports {
        assert!(r.pass, "{r:?}");
    }
    let mut csv = Vec::new();
    write_constants_csv(&reports, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("check_name,quantity,value,tolerance,pass\n"));
    assert!(run_suite(&SuiteConfig::default()).is_empty());
}

#[test]
fn suite_records_failures_without_aborting() {
    let config: SuiteConfig = serde_json::from_str(
        r#"{"checks": [
            {"check": "jump", "densities": 4, "tol": 1e-3,
             "domain": {"geometry": {"kind": "closed", "vertices": [[0,0],[1,0]]},
                        "coefficients": {"kind": "constant", "matrix": [[1,0],[0,0],[0,0],[1,0]]}}},
            {"check": "carleson_half_plane", "radii": [1.0], "tol": 1e-4}
        ]}"#,
    )
    .unwrap();
    let reports = run_suite(&config);
    assert_eq!(reports.len(), 2);
    assert!(!reports[0].pass && reports[0].error.is_some());
    assert!(reports[1].pass);
}

#[test]
fn reentrant_polygon_with_complex_field_reports() {
    let config: SuiteConfig = serde_json::from_str(
        r#"{"checks": [
            {"name": "lshape_jump", "check": "jump", "densities": 8, "tol": 1e-2,
             "domain": {"geometry": {"kind": "closed", "vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]},
                        "coefficients": {"kind": "constant", "matrix": [[1,0],[0,0.3],[0,0.3],[1,0]]},
                        "panels": 48, "grading": 3.0}}
        ]}"#,
    )
    .unwrap();
    let reports = run_suite(&config);
    assert_eq!(reports[0].check_name, "lshape_jump");
    assert!(reports[0].error.is_none(), "{:?}", reports[0]);
    assert!(!reports[0].measured.is_empty());
}

#[test]
fn identity_and_uniqueness_checks_pass_on_reference_domains() {
    let config: SuiteConfig = serde_json::from_str(
        r#"{"checks": [
            {"check": "half_plane_identity", "support": 2.5, "tol": 1e-4,
             "domain": {"geometry": {"kind": "special", "phi": {"x": [-4,-1,0,1.5,4], "y": [0,0,0.6,-0.15,-0.15]}, "truncation": 4},
                        "coefficients": {"kind": "graph_metric", "phi": {"x": [-4,-1,0,1.5,4], "y": [0,0,0.6,-0.15,-0.15]}}}},
            {"check": "zero_data", "points": [[0,0],[0.3,0.2],[-0.5,0.4]], "tol": 1e-6,
             "domain": {"geometry": {"kind": "closed", "circle": {"center": [0,0], "radius": 1}},
                        "coefficients": {"kind": "constant", "matrix": [[1,0],[0,0.1],[0,0.1],[1,0]]}, "panels": 16, "grading": 1}},
            {"check": "mixed_agreement", "points": [[0,0],[0.3,0.2],[-0.5,0.4]], "tol": 1e-3,
             "domain": {"geometry": {"kind": "closed", "circle": {"center": [0,0], "radius": 1}},
                        "coefficients": {"kind": "constant", "matrix": [[1,0],[0,0.1],[0,0.1],[1,0]]}, "panels": 16, "grading": 1}},
            {"check": "conjugate_duality", "tol": 1e-3, "loop_tol": 1e-6,
             "domain": {"geometry": {"kind": "closed", "circle": {"center": [0,0], "radius": 1}},
                        "coefficients": {"kind": "constant", "matrix": [[1,0],[0,0.1],[0,0.1],[1,0]]}, "panels": 16, "grading": 1}}
        ]}"#,
    )
    .unwrap();
    for r in run_suite(&config) {
        eprintln!("{} {:?} {:.1}s", r.check_name, r.measured, r.runtime_s);
        assert!(r.pass, "{r:?}");
    }
}
