//! JSON-configured batches of checks.

use super::*;
use crate::coefficients::{CoefficientField, CoefficientSpec};
use crate::coefficients::MatrixEntries;
use crate::error::Result;
use crate::geometry::{make_mesh, ConeSampler, GeometrySpec};
use crate::greens::{evaluator_for, FourierParams};
use crate::linalg::{cmat, cvec, rdot, CMat2, Point};
use crate::potentials::{eval_double_value, jump_check, BoundaryDensity, OpTag};
use crate::solvers::{conjugate_solution, interior_trace, representation_residual, solve_dirichlet, solve_neumann, solve_regularity, Setup};
use std::io::Write;
use std::time::Instant;

fn default_panels() -> usize {
    32
}

fn default_grading() -> f64 {
    2.0
}

/// A domain, its coefficient field and the mesh resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub geometry: GeometrySpec,
    pub coefficients: CoefficientSpec,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_grading")]
    pub grading: f64,
}

impl DomainSpec {
    pub fn setup(&self) -> Result<Setup> {
        let geometry = self.geometry.build()?;
        let field = self.coefficients.build()?;
        Setup::new(geometry, &field, self.panels, self.grading)
    }

    fn with_panels(&self, panels: usize) -> DomainSpec {
        DomainSpec { panels, ..self.clone() }
    }

    fn describe(&self) -> String {
        format!("{} panels, grading {}", self.panels, self.grading)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemName {
    Dirichlet,
    Neumann,
    Regularity,
}

fn pts(v: &[[f64; 2]]) -> Vec<Point> {
    v.iter().map(|p| Point::new(p[0], p[1])).collect()
}

fn to_mat(m: &MatrixEntries) -> CMat2 {
    let z = |k: usize| C64::new(m[k][0], m[k][1]);
    cmat(z(0), z(1), z(2), z(3))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "check")]
pub enum CheckSpec {
    /// `max ||(K_+ - K_-) f - f|| / ||f||` over trigonometric densities.
    Jump { domain: DomainSpec, densities: usize, tol: f64 },
    /// `|D1 - 1|` inside and `|D1|` outside.
    DoubleLayerOfOne { domain: DomainSpec, interior: Vec<[f64; 2]>, exterior: Vec<[f64; 2]>, tol: f64 },
    /// Dirichlet solve of the boundary values of `u = g . X` (a solution for
    /// constant coefficients); error against `u` at the points.
    ExactLinear { domain: DomainSpec, gradient: [f64; 2], points: Vec<[f64; 2]>, tol: f64 },
    /// `|u - (D f - S g)| / max |f|` for a solve with linear data.
    Representation { domain: DomainSpec, problem: ProblemName, gradient: [f64; 2], points: Vec<[f64; 2]>, tol: f64 },
    /// Measured maximum-principle constant. With `refine`, a bound on its
    /// relative change when the panel count doubles; otherwise equality with
    /// `target` when set, or a bound on the solve/Green disagreement.
    MaxPrinciple {
        domain: DomainSpec,
        points: Vec<[f64; 2]>,
        target: Option<f64>,
        tol: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        refine: bool,
    },
    /// Carleson functional of `u = x` over balls centred on the flat
    /// boundary `t = 0`, against `R^2 / 3`.
    CarlesonHalfPlane { radii: Vec<f64>, tol: f64 },
    /// Carleson supremum of `D f` for a bounded density, at two mesh sizes.
    CarlesonDoubleLayer { domain: DomainSpec, radii: Vec<f64>, centers: Vec<[f64; 2]>, h_min: f64, tol: f64 },
    /// Spread of `||Delta K|| / eps` along a sweep, minus one.
    Perturbation { domain: DomainSpec, direction: MatrixEntries, eps: Vec<f64>, tol: f64 },
    /// Spread of `||K_+^t f|| / ||L^t f||` over trigonometric densities.
    Rellich { domain: DomainSpec, densities: usize },
    /// Ratio of decay functionals for atoms of radius `r` and `r / 2`.
    AtomDecay { domain: DomainSpec, center: [f64; 2], radius: f64, alpha: f64, tol: f64 },
    /// `||K_+ f - f / 2|| / ||f||` for smooth bumps supported in `|x| < support`
    /// on a graph whose metric is the coefficient field.
    HalfPlaneIdentity { domain: DomainSpec, support: f64, tol: f64 },
    /// Largest interior gradient of the Dirichlet, Neumann and regularity
    /// solutions with zero data.
    ZeroData { domain: DomainSpec, points: Vec<[f64; 2]>, tol: f64 },
    /// `|u_D - u_R| / max |f|` for Dirichlet and regularity solves from the
    /// same smooth trace.
    MixedAgreement { domain: DomainSpec, points: Vec<[f64; 2]>, tol: f64 },
    /// Relative `L^2` mismatch between `d_tau` of the conjugate's boundary
    /// trace and the Neumann data, plus the loop flux of the conjugate.
    ConjugateDuality { domain: DomainSpec, tol: f64, loop_tol: f64 },
    /// `|Gamma^{A^T}_X(Y) - Gamma^A_Y(X)| / max(1, |Gamma|)` over pairs.
    GreenSymmetry { coefficients: CoefficientSpec, pairs: Vec<[[f64; 2]; 2]>, tol: f64 },
}

impl CheckSpec {
    fn default_name(&self) -> &'static str {
        match self {
            CheckSpec::Jump { .. } => "jump",
            CheckSpec::DoubleLayerOfOne { .. } => "double_layer_of_one",
            CheckSpec::ExactLinear { .. } => "exact_linear",
            CheckSpec::Representation { .. } => "representation",
            CheckSpec::MaxPrinciple { .. } => "max_principle",
            CheckSpec::CarlesonHalfPlane { .. } => "carleson_half_plane",
            CheckSpec::CarlesonDoubleLayer { .. } => "carleson_double_layer",
            CheckSpec::Perturbation { .. } => "perturbation",
            CheckSpec::Rellich { .. } => "rellich",
            CheckSpec::AtomDecay { .. } => "atom_decay",
            CheckSpec::GreenSymmetry { .. } => "green_symmetry",
            CheckSpec::HalfPlaneIdentity { .. } => "half_plane_identity",
            CheckSpec::ZeroData { .. } => "zero_data",
            CheckSpec::MixedAgreement { .. } => "mixed_agreement",
            CheckSpec::ConjugateDuality { .. } => "conjugate_duality",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedCheck {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub check: CheckSpec,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub checks: Vec<NamedCheck>,
}

impl SuiteConfig {
    /// Equality-type checks on the unit disk with `A = I`.
    pub fn reference_disk() -> Self {
        let domain = DomainSpec {
            geometry: GeometrySpec::Closed { vertices: vec![], circle: Some(crate::geometry::CircleSpec { center: [0.0, 0.0], radius: 1.0 }) },
            coefficients: CoefficientSpec::constant(&CMat2::identity()),
            panels: 16,
            grading: 1.0,
        };
        let points = vec![[0.0, 0.0], [0.5, 0.0], [0.3, 0.2], [-0.4, 0.5], [0.1, -0.7]];
        let named = |check| NamedCheck { name: None, check };
        let rep = |problem| CheckSpec::Representation { domain: domain.clone(), problem, gradient: [1.0, 0.0], points: points.clone(), tol: 1e-3 };
        SuiteConfig {
            checks: vec![
                named(CheckSpec::Jump { domain: domain.clone(), densities: 16, tol: 1e-3 }),
                named(CheckSpec::DoubleLayerOfOne {
                    domain: domain.clone(),
                    interior: vec![[0.0, 0.0], [0.3, 0.2], [-0.5, 0.1]],
                    exterior: vec![[2.0, 0.0], [0.0, -1.8]],
                    tol: 1e-6,
                }),
                named(CheckSpec::ExactLinear { domain: domain.clone(), gradient: [1.0, 0.0], points: points.clone(), tol: 1e-5 }),
                NamedCheck { name: Some("representation_dirichlet".into()), check: rep(ProblemName::Dirichlet) },
                NamedCheck { name: Some("representation_neumann".into()), check: rep(ProblemName::Neumann) },
                NamedCheck { name: Some("representation_regularity".into()), check: rep(ProblemName::Regularity) },
                named(CheckSpec::MaxPrinciple { domain, points: vec![[0.0, 0.0], [0.5, 0.2]], target: Some(1.0), tol: 1e-4, refine: false }),
                named(CheckSpec::CarlesonHalfPlane { radii: vec![0.5, 1.0, 2.0], tol: 1e-4 }),
            ],
        }
    }
}

fn linear_data(setup: &Setup, problem: ProblemName, g: [f64; 2]) -> BoundaryDensity {
    let grad = Point::new(g[0], g[1]);
    let mesh = &setup.mesh;
    match problem {
        ProblemName::Neumann => {
            let field = setup.green.field();
            let values = (0..mesh.len()).map(|j| rdot(&mesh.normals[j], &(field.at(mesh.nodes[j].x) * cvec(&grad)))).collect();
            BoundaryDensity::lp(values, 2.0)
        }
        _ => BoundaryDensity::from_fn(mesh, |p| C64::new(p.dot(&grad), 0.0)),
    }
}

fn run_check(check: &CheckSpec, name: &str) -> Result<VerificationReport> {
    match check {
        CheckSpec::Jump { domain, densities, tol } => {
            let s = domain.setup()?;
            let kp = s.operator(OpTag::Kplus)?;
            let km = s.operator(OpTag::Kminus)?;
            let r = jump_check(&kp, &km, &trig_densities(&s.mesh, *densities))?;
            Ok(VerificationReport::bound(name, vec![("max_jump_residual".into(), r.max_residual)], *tol, domain.describe()))
        }
        CheckSpec::DoubleLayerOfOne { domain, interior, exterior, tol } => {
            let s = domain.setup()?;
            let one = BoundaryDensity::lp(vec![C64::new(1.0, 0.0); s.mesh.len()], 2.0);
            let mut inside: f64 = 0.0;
            for x in pts(interior) {
                inside = inside.max((eval_double_value(&*s.green, &s.mesh, &one, &x)? - 1.0).norm());
            }
            let mut outside: f64 = 0.0;
            for x in pts(exterior) {
                outside = outside.max(eval_double_value(&*s.green, &s.mesh, &one, &x)?.norm());
            }
            Ok(VerificationReport::bound(
                name,
                vec![("max_error".into(), inside.max(outside)), ("interior".into(), inside), ("exterior".into(), outside)],
                *tol,
                domain.describe(),
            ))
        }
        CheckSpec::ExactLinear { domain, gradient, points, tol } => {
            let s = domain.setup()?;
            let sol = solve_dirichlet(&s, &linear_data(&s, ProblemName::Dirichlet, *gradient), 2.0)?;
            let g = Point::new(gradient[0], gradient[1]);
            let mut err: f64 = 0.0;
            for x in pts(points) {
                err = err.max((sol.evaluate(&x)?.0 - x.dot(&g)).norm());
            }
            Ok(VerificationReport::bound(name, vec![("max_error".into(), err), ("condition".into(), sol.stats.condition)], *tol, domain.describe()))
        }
        CheckSpec::Representation { domain, problem, gradient, points, tol } => {
            let s = domain.setup()?;
            let data = linear_data(&s, *problem, *gradient);
            let sol = match problem {
                ProblemName::Dirichlet => solve_dirichlet(&s, &data, 2.0)?,
                ProblemName::Neumann => solve_neumann(&s, &data)?,
                ProblemName::Regularity => solve_regularity(&s, &data)?,
            };
            let r = representation_residual(&sol, &pts(points))?;
            Ok(VerificationReport::bound(
                name,
                vec![("residual".into(), r), ("trace_residual".into(), sol.stats.trace_residual), ("condition".into(), sol.stats.condition)],
                *tol,
                domain.describe(),
            ))
        }
        CheckSpec::MaxPrinciple { domain, points, target, tol, refine: true } => {
            let mut c = Vec::new();
            for spec in [domain.clone(), domain.with_panels(2 * domain.panels)] {
                let s = spec.setup()?;
                c.push(max_principle(&s, &trig_densities(&s.mesh, 4), &pts(points))?);
            }
            let variation = (c[1].c_solve / c[0].c_solve - 1.0).abs();
            let mut measured = vec![("refinement_variation".into(), variation), ("c_solve".into(), c[1].c_solve), ("c_green".into(), c[1].c_green)];
            if let Some(t) = target {
                measured.push(("target".into(), *t));
            }
            Ok(VerificationReport::bound(name, measured, *tol, format!("{} and doubled", domain.describe())))
        }
        CheckSpec::MaxPrinciple { domain, points, target, tol, refine: false } => {
            let s = domain.setup()?;
            let data = trig_densities(&s.mesh, 4);
            let r = max_principle(&s, &data, &pts(points))?;
            let measured = vec![("c_solve".into(), r.c_solve), ("c_green".into(), r.c_green), ("disagreement".into(), r.disagreement)];
            Ok(match target {
                Some(t) => VerificationReport::equality(name, measured, *t, *tol, domain.describe()),
                None => {
                    let mut m = measured;
                    m.rotate_left(2);
                    VerificationReport::bound(name, m, *tol, domain.describe())
                }
            })
        }
        CheckSpec::CarlesonHalfPlane { radii, tol } => {
            let geom = crate::geometry::build_special_domain(&[-100.0, 100.0], &[0.0, 0.0], Point::new(0.0, 1.0), 50.0)?;
            let field = crate::potentials::InteriorField::new("u = x", |x| Ok((C64::new(x.x, 0.0), crate::CVec2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)))));
            let rep = carleson_functional(&field, &geom, radii, &[Point::zeros()], &CarlesonOptions::default())?;
            let err = rep.samples.iter().map(|s| (s.value - s.radius * s.radius / 3.0).abs()).fold(0.0, f64::max);
            Ok(VerificationReport::bound(name, vec![("max_error".into(), err)], *tol, "flat boundary, polar quadrature".into()))
        }
        CheckSpec::CarlesonDoubleLayer { domain, radii, centers, h_min, tol } => {
            let mut sups = Vec::new();
            for spec in [domain.clone(), domain.with_panels(2 * domain.panels)] {
                let s = spec.setup()?;
                let f = BoundaryDensity::from_fn(&s.mesh, |p| C64::new((3.0 * p.x).sin() + p.y.signum() * 0.5, 0.0));
                let sol_field = {
                    let green = s.green.clone();
                    let mesh = s.mesh.clone();
                    let f = f.clone();
                    crate::potentials::InteriorField::new("D f", move |x| {
                        let (u, g) = crate::potentials::eval_double(&*green, &mesh, &f, x)?;
                        Ok((u, g.expect("Lp densities are differentiable")))
                    })
                };
                let opts = CarlesonOptions { h_min: *h_min, ..CarlesonOptions::default() };
                let rep = carleson_functional(&sol_field, &s.geometry, radii, &pts(centers), &opts)?;
                let bmo = bmo_norm(&s.mesh, &f.values);
                sups.push((rep.sup, bmo));
            }
            let variation = (sups[1].0 - sups[0].0).abs() / sups[0].0;
            Ok(VerificationReport::bound(
                name,
                vec![("refinement_variation".into(), variation), ("sup".into(), sups[1].0), ("sup_over_bmo_sq".into(), sups[1].0 / (sups[1].1 * sups[1].1))],
                *tol,
                format!("{} and doubled", domain.describe()),
            ))
        }
        CheckSpec::Perturbation { domain, direction, eps, tol } => {
            let geometry = domain.geometry.build()?;
            let mesh = make_mesh(&geometry, domain.panels, domain.grading)?;
            let a0 = domain.coefficients.build()?;
            let curve = perturbation_sweep(&geometry, &mesh, &a0, to_mat(direction), eps)?;
            let ratios: Vec<f64> = curve.points.iter().filter_map(|p| p.ratio).collect();
            let mut measured = vec![("ratio_spread_minus_one".into(), spread(&ratios) - 1.0)];
            for p in &curve.points {
                measured.push((format!("ratio@{}", p.eps), p.ratio.unwrap_or(0.0)));
                measured.push((format!("condition@{}", p.eps), p.condition));
            }
            if let Some(e) = curve.truncated_at {
                measured.push(("truncated_at".into(), e));
            }
            Ok(VerificationReport::bound(name, measured, *tol, domain.describe()))
        }
        CheckSpec::Rellich { domain, densities } => {
            let s = domain.setup()?;
            let r = rellich_comparability(&s, &trig_densities(&s.mesh, *densities))?;
            Ok(VerificationReport::diagnostic(
                name,
                vec![("spread".into(), r.spread), ("min".into(), r.min), ("max".into(), r.max), ("excluded".into(), r.excluded.len() as f64)],
                domain.describe(),
            ))
        }
        CheckSpec::AtomDecay { domain, center, radius, alpha, tol } => {
            let s = domain.setup()?;
            let c = Point::new(center[0], center[1]);
            let sampler = ConeSampler::default();
            let mut values = Vec::new();
            for r in [*radius, 0.5 * radius] {
                let atom = BoundaryDensity::atom(&s.mesh, c, r)?;
                values.push(atom_decay(&solve_neumann(&s, &atom)?, *alpha, &sampler)?);
            }
            let ratio = spread(&values);
            Ok(VerificationReport::bound(
                name,
                vec![("ratio".into(), ratio), ("decay_r".into(), values[0]), ("decay_half_r".into(), values[1])],
                *tol,
                domain.describe(),
            ))
        }
        CheckSpec::GreenSymmetry { coefficients, pairs, tol } => {
            let field: CoefficientField = coefficients.build()?;
            let g = evaluator_for(&field, &FourierParams::default())?;
            let gt = g.transposed();
            let mut err: f64 = 0.0;
            for [x, y] in pairs {
                let (x, y) = (Point::new(x[0], x[1]), Point::new(y[0], y[1]));
                let a = gt.eval(&x, &y)?.value;
                let b = g.eval(&y, &x)?.value;
                err = err.max((a - b).norm() / b.norm().max(1.0));
            }
            Ok(VerificationReport::bound(name, vec![("max_relative_error".into(), err)], *tol, format!("{:?} route", g.route())))
        }
        CheckSpec::HalfPlaneIdentity { domain, support, tol } => {
            let s = domain.setup()?;
            let kp = s.operator(OpTag::Kplus)?;
            let w = &s.mesh.weights;
            let mut worst: f64 = 0.0;
            for k in 0..4 {
                let f: Vec<C64> = s.mesh.nodes.iter().map(|p| C64::new(bump(p.x / support) * (k as f64 * p.x).cos(), 0.0)).collect();
                let r: Vec<C64> = kp.apply(&f).iter().zip(&f).map(|(a, b)| a - b * 0.5).collect();
                worst = worst.max(lp_norm(w, &r, 2.0) / lp_norm(w, &f, 2.0));
            }
            Ok(VerificationReport::bound(name, vec![("max_relative_residual".into(), worst)], *tol, domain.describe()))
        }
        CheckSpec::ZeroData { domain, points, tol } => {
            let s = domain.setup()?;
            let zero = BoundaryDensity::lp(vec![C64::new(0.0, 0.0); s.mesh.len()], 2.0);
            let mut measured = vec![("max_gradient".into(), 0.0)];
            for (label, sol) in [
                ("dirichlet", solve_dirichlet(&s, &zero, 2.0)?),
                ("neumann", solve_neumann(&s, &zero)?),
                ("regularity", solve_regularity(&s, &zero)?),
            ] {
                let mut g: f64 = 0.0;
                for x in pts(points) {
                    g = g.max(sol.evaluate(&x)?.1.norm());
                }
                measured[0].1 = f64::max(measured[0].1, g);
                measured.push((format!("{label}_gradient"), g));
            }
            Ok(VerificationReport::bound(name, measured, *tol, domain.describe()))
        }
        CheckSpec::MixedAgreement { domain, points, tol } => {
            let s = domain.setup()?;
            let f = BoundaryDensity::lp(trig_densities(&s.mesh, 2).swap_remove(1), 2.0);
            let dir = solve_dirichlet(&s, &f, 2.0)?;
            let reg = solve_regularity(&s, &f)?;
            let scale = lp_norm(&s.mesh.weights, &f.values, f64::INFINITY);
            let mut diff: f64 = 0.0;
            for x in pts(points) {
                diff = diff.max((dir.evaluate(&x)?.0 - reg.evaluate(&x)?.0).norm() / scale);
            }
            Ok(VerificationReport::bound(
                name,
                vec![("max_difference".into(), diff), ("dirichlet_residual".into(), dir.stats.trace_residual), ("regularity_residual".into(), reg.stats.trace_residual)],
                *tol,
                domain.describe(),
            ))
        }
        CheckSpec::ConjugateDuality { domain, tol, loop_tol } => {
            let s = domain.setup()?;
            let g = BoundaryDensity::lp(trig_densities(&s.mesh, 3).swap_remove(2), 2.0);
            let sol = solve_neumann(&s, &g)?;
            let conj = conjugate_solution(&sol, None)?;
            let (trace, _) = interior_trace(&conj.field, &s.mesh, &s.options().trace)?;
            let dt = s.mesh.d_tau(&trace);
            let r: Vec<C64> = dt.iter().zip(&g.values).map(|(a, b)| a - b).collect();
            let w = &s.mesh.weights;
            let err = lp_norm(w, &r, 2.0) / lp_norm(w, &g.values, 2.0);
            let mut report = VerificationReport::bound(
                name,
                vec![("relative_l2_mismatch".into(), err), ("loop_residual".into(), conj.loop_residual)],
                *tol,
                domain.describe(),
            );
            report.pass &= conj.loop_residual <= *loop_tol;
            Ok(report)
        }
    }
}

/// `exp(-1 / (1 - t^2))` on `|t| < 1`, zero outside.
fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Run every check; failures to run are recorded as failed reports.
pub fn run_suite(config: &SuiteConfig) -> Vec<VerificationReport> {
    config
        .checks
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let name = c.name.clone().unwrap_or_else(|| format!("{}_{k}", c.check.default_name()));
            let t0 = Instant::now();
            let mut report = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run_check(&c.check, &name))) {
                Ok(Ok(r)) => r,
                Ok(Err(e)) => VerificationReport::failed(&name, e.to_string()),
                Err(_) => VerificationReport::failed(&name, "check panicked".into()),
            };
            report.runtime_s = t0.elapsed().as_secs_f64();
            report
        })
        .collect()
}

/// `check_name,quantity,value,tolerance,pass` rows.
pub fn write_constants_csv(reports: &[VerificationReport], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "check_name,quantity,value,tolerance,pass")?;
    for r in reports {
        for (q, v) in &r.measured {
            writeln!(out, "{},{},{:e},{:e},{}", r.check_name, q, v, r.tolerance, r.pass)?;
        }
    }
    Ok(())
}
