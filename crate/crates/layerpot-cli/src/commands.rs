//! One function per subcommand. Each returns the one-line summary printed on
//! success.

use crate::cache::{cache_dir, Evaluator};
use crate::inputs::{read_json, Kind};
use crate::output::{complex, csv_writer, num, write_json};
use crate::{
    AssembleArgs, CliError, GreenArgs, MeshArgs, MethodArg, OpName, ProblemArg, SolveArgs,
    SweepArgs, VerifyArgs,
};
use anyhow::Context;
use clap::ValueEnum;
use layerpot::coefficients::{CoefficientSpec, MatrixEntries};
use layerpot::geometry::{make_mesh_with_order, DomainGeometry, GeometrySpec, QuadratureMesh};
use layerpot::greens::FourierParams;
use layerpot::linalg::{cvec, rdot};
use layerpot::potentials::{BoundaryDensity, OpTag};
use layerpot::solvers::{
    solve_dirichlet, solve_neumann, solve_regularity, LinearMethod, Setup, SolverOptions,
};
use layerpot::verify::{
    perturbation_sweep, run_suite, spread, write_constants_csv, CheckKind, DomainSpec,
    SuiteConfig,
};
use layerpot::{CMat2, Point, C64};
use rand::{Rng, SeedableRng};
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::path::Path;

type CliResult<T> = Result<T, CliError>;

fn fourier_params(arg: Option<&str>) -> CliResult<FourierParams> {
    match arg {
        Some(a) => Ok(read_json(a, Kind::Fourier)?.0),
        None => Ok(FourierParams::default()),
    }
}

fn evaluator(spec: &CoefficientSpec, label: &str, params: &FourierParams) -> CliResult<Evaluator> {
    Evaluator::build(spec, params, cache_dir().as_deref())
        .map_err(|e| CliError::config(format!("invalid coefficients '{label}': {e:#}")))
}

fn cache_note(ev: &Evaluator) -> CliResult<String> {
    let written = ev.persist()?;
    Ok(match (ev.loaded(), written) {
        (0, None) => String::new(),
        (k, None) => format!(", {k} cached octaves"),
        (k, Some(p)) => format!(", {k} cached octaves, cache written to {}", p.display()),
    })
}

struct Built {
    setup: Setup,
    evaluator: Evaluator,
    geometry_label: String,
    coefficients_label: String,
}

fn build_setup(m: &MeshArgs, options: SolverOptions) -> CliResult<Built> {
    let (gspec, geometry_label) = read_json::<GeometrySpec>(&m.geometry, Kind::Geometry)?;
    let (cspec, coefficients_label) =
        read_json::<CoefficientSpec>(&m.coefficients, Kind::Coefficients)?;
    let params = fourier_params(m.fourier.as_deref())?;
    let geometry = gspec
        .build()
        .map_err(|e| CliError::config(format!("invalid geometry '{geometry_label}': {e}")))?;
    let mesh = make_mesh_with_order(&geometry, m.panels, m.grading, m.order)
        .map_err(|e| CliError::config(format!("invalid mesh parameters: {e}")))?;
    let evaluator = evaluator(&cspec, &coefficients_label, &params)?;
    let setup = Setup::from_parts(geometry, mesh, evaluator.green.clone()).with_options(options);
    Ok(Built {
        setup,
        evaluator,
        geometry_label,
        coefficients_label,
    })
}

fn mesh_hash(mesh: &QuadratureMesh) -> String {
    let mut h = Sha256::new();
    for j in 0..mesh.len() {
        for v in [
            mesh.nodes[j].x,
            mesh.nodes[j].y,
            mesh.weights[j],
            mesh.normals[j].x,
            mesh.normals[j].y,
        ] {
            h.update(v.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------- green

pub fn green(a: &GreenArgs) -> CliResult<String> {
    let (spec, label) = read_json::<CoefficientSpec>(&a.coefficients, Kind::Coefficients)?;
    let params = fourier_params(a.fourier.as_deref())?;
    let pairs: Vec<[[f64; 2]; 2]> = match (&a.pairs, a.random) {
        (Some(p), _) => read_json(p, Kind::Pairs)?.0,
        (None, Some(n)) => {
            let [x0, x1, y0, y1] = [a.r#box[0], a.r#box[1], a.r#box[2], a.r#box[3]];
            if !(x0 < x1 && y0 < y1) {
                return Err(CliError::config("--box needs xmin < xmax and ymin < ymax"));
            }
            let mut rng = rand::rngs::StdRng::seed_from_u64(a.seed);
            let mut draw = || [rng.random_range(x0..x1), rng.random_range(y0..y1)];
            (0..n).map(|_| [draw(), draw()]).collect()
        }
        (None, None) => return Err(CliError::config("one of --pairs or --random is required")),
    };
    let ev = evaluator(&spec, &label, &params)?;
    let green = if a.transposed {
        ev.green.transposed()
    } else {
        ev.green.clone()
    };
    let mut out = csv_writer(a.out.as_deref())?;
    out.write_record([
        "X_x", "X_y", "Y_x", "Y_y", "re_gamma", "im_gamma", "re_dgamma_dy1", "im_dgamma_dy1",
        "re_dgamma_dy2", "im_dgamma_dy2", "re_dgamma_dx1", "im_dgamma_dx1", "re_dgamma_dx2",
        "im_dgamma_dx2",
    ])
    .context("writing CSV header")?;
    for (k, [x, y]) in pairs.iter().enumerate() {
        let (pole, point) = (Point::new(x[0], x[1]), Point::new(y[0], y[1]));
        let s = green
            .eval(&pole, &point)
            .with_context(|| format!("pair {k}: pole {x:?}, point {y:?}"))?;
        let mut row: Vec<String> = [x[0], x[1], y[0], y[1]].map(num).to_vec();
        for z in [
            s.value,
            s.grad_point[0],
            s.grad_point[1],
            s.grad_pole[0],
            s.grad_pole[1],
        ] {
            row.extend(complex(z));
        }
        out.write_record(&row).context("writing CSV row")?;
    }
    out.flush()?;
    Ok(format!(
        "green: {} pairs, {:?} route{}",
        pairs.len(),
        green.route(),
        cache_note(&ev)?
    ))
}

// ---------------------------------------------------------------- assemble

fn op_tag(op: OpName) -> OpTag {
    match op {
        OpName::Kplus => OpTag::Kplus,
        OpName::Kminus => OpTag::Kminus,
        OpName::KtPlus => OpTag::KtPlus,
        OpName::KtMinus => OpTag::KtMinus,
        OpName::Lt => OpTag::Lt,
        OpName::SingleValue => OpTag::SingleValue,
        OpName::SingleFluxPlus => OpTag::SingleFluxPlus,
        OpName::SingleFluxMinus => OpTag::SingleFluxMinus,
        OpName::SingleTangential => OpTag::SingleTangential,
    }
}

pub fn assemble(a: &AssembleArgs) -> CliResult<String> {
    let b = build_setup(&a.mesh, SolverOptions::default())?;
    let mesh = &b.setup.mesh;
    let hash = mesh_hash(mesh);
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;

    let mut out = csv_writer(Some(&a.out_dir.join("mesh.csv")))?;
    out.write_record([
        "node", "x", "y", "weight", "normal_x", "normal_y", "tangent_x", "tangent_y",
    ])
    .context("writing mesh header")?;
    for j in 0..mesh.len() {
        let (p, n, t) = (mesh.nodes[j], mesh.normals[j], mesh.tangents[j]);
        let mut row = vec![j.to_string()];
        row.extend([p.x, p.y, mesh.weights[j], n.x, n.y, t.x, t.y].map(num));
        out.write_record(&row).context("writing mesh row")?;
    }
    out.flush()?;

    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for &op in &a.ops {
        let name = op
            .to_possible_value()
            .expect("operator names are not hidden")
            .get_name()
            .replace('-', "_");
        let operator = b.setup.operator(op_tag(op))?;
        let mut out = csv_writer(Some(&a.out_dir.join(format!("{name}.csv"))))?;
        out.write_record(["row", "col", "re", "im"])
            .context("writing operator header")?;
        let m = &operator.matrix;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let [re, im] = complex(m[(i, j)]);
                out.write_record([i.to_string(), j.to_string(), re, im])
                    .context("writing operator row")?;
            }
        }
        out.flush()?;
        write_json(
            &a.out_dir.join(format!("{name}.json")),
            &json!({
                "op_tag": format!("{:?}", operator.tag),
                "mesh_hash": hash,
                "nodes": mesh.len(),
                "panels": a.mesh.panels,
                "order": a.mesh.order,
                "grading": a.mesh.grading,
                "geometry": b.geometry_label,
                "coefficients": b.coefficients_label,
                "tolerance": operator.tolerance,
            }),
        )?;
        worst = worst.max(operator.tolerance);
        names.push(name);
    }
    Ok(format!(
        "assemble: {} on {} nodes, largest extrapolation tolerance {}{}",
        names.join(", "),
        mesh.len(),
        num(worst),
        cache_note(&b.evaluator)?
    ))
}

// ---------------------------------------------------------------- solve

fn node_angle_data(mesh: &QuadratureMesh, f: impl Fn(f64) -> f64) -> Vec<C64> {
    mesh.nodes
        .iter()
        .map(|p| C64::new(f(p.y.atan2(p.x)), 0.0))
        .collect()
}

fn read_data(arg: &str, setup: &Setup, p: f64) -> CliResult<BoundaryDensity> {
    let mesh = &setup.mesh;
    let Some(name) = arg.strip_prefix("preset:") else {
        return read_data_csv(Path::new(arg), mesh.len()).map(|v| BoundaryDensity::lp(v, p));
    };
    let field = setup.green.field();
    let conormal = |e: Point| -> Vec<C64> {
        (0..mesh.len())
            .map(|j| rdot(&mesh.normals[j], &(field.at(mesh.nodes[j].x) * cvec(&e))))
            .collect()
    };
    let values = match name {
        "cos_theta" => node_angle_data(mesh, f64::cos),
        "sin_theta" => node_angle_data(mesh, f64::sin),
        "linear_x" => mesh.nodes.iter().map(|q| C64::new(q.x, 0.0)).collect(),
        "linear_y" => mesh.nodes.iter().map(|q| C64::new(q.y, 0.0)).collect(),
        "one" => vec![C64::new(1.0, 0.0); mesh.len()],
        "zero" => vec![C64::new(0.0, 0.0); mesh.len()],
        "conormal_x" => conormal(Point::new(1.0, 0.0)),
        "conormal_y" => conormal(Point::new(0.0, 1.0)),
        _ => {
            if let Some(args) = name.strip_prefix("atom:") {
                let v: Vec<f64> = args
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::config(format!("bad atom preset '{name}'")))?;
                if v.len() != 3 {
                    return Err(CliError::config("atom preset is atom:CX,CY,R"));
                }
                return BoundaryDensity::atom(mesh, Point::new(v[0], v[1]), v[2])
                    .map_err(|e| CliError::config(format!("atom preset: {e}")));
            }
            return Err(CliError::config(format!("unknown data preset '{name}'")));
        }
    };
    Ok(BoundaryDensity::lp(values, p))
}

fn read_data_csv(path: &Path, nodes: usize) -> CliResult<Vec<C64>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::config(format!("cannot read data file '{}': {e}", path.display())))?;
    let bad = |line: usize, what: &str| {
        CliError::config(format!("data file '{}', record {line}: {what}", path.display()))
    };
    let mut values = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(k + 1, &e.to_string()))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(k + 1, "not a number"));
        let re = parse(rec.get(0).ok_or_else(|| bad(k + 1, "empty record"))?)?;
        let im = match rec.get(1) {
            Some(s) => parse(s)?,
            None => 0.0,
        };
        values.push(C64::new(re, im));
    }
    if values.len() != nodes {
        return Err(CliError::config(format!(
            "data file '{}' has {} values for {nodes} mesh nodes",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Points(Vec<[f64; 2]>),
    Lattice {
        x: (f64, f64, usize),
        y: (f64, f64, usize),
    },
}

fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Round up to 1, 2, 2.5 or 5 times a power of ten.
fn nice_step(h: f64) -> f64 {
    let p = 10f64.powf(h.log10().floor());
    let m = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .find(|m| m * p >= h * (1.0 - 1e-6))
        .unwrap_or(10.0);
    m * p
}

/// A 9 x 9 lattice over the mesh's bounding box (shifted into the domain for
/// graphs), spacing about one eighth of the box size, centred on a multiple
/// of the spacing.
fn default_grid(geom: &DomainGeometry, mesh: &QuadratureMesh) -> Vec<Point> {
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    for p in &mesh.nodes {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let size = (hi.x - lo.x).max(hi.y - lo.y);
    let mut center = (lo + hi) * 0.5;
    if !geom.is_closed() {
        center += geom.e * (0.5 * size);
    }
    let h = nice_step(size / 8.0);
    let center = Point::new((center.x / h).round() * h, (center.y / h).round() * h);
    let mut out = Vec::new();
    for i in -4..=4 {
        for j in -4..=4 {
            out.push(center + Point::new(i as f64 * h, j as f64 * h));
        }
    }
    out
}

pub fn solve(a: &SolveArgs) -> CliResult<String> {
    if !(a.p > 1.0) {
        return Err(CliError::config(format!("--p must exceed 1, got {}", a.p)));
    }
    let method = match a.method {
        MethodArg::Dense => LinearMethod::DenseLu,
        MethodArg::Gmres => LinearMethod::Iterative {
            restart: 60,
            tol: a.tol,
            max_iter: 3000,
        },
    };
    let b = build_setup(
        &a.mesh,
        SolverOptions {
            method,
            ..Default::default()
        },
    )?;
    let s = &b.setup;
    let data = read_data(&a.data, s, a.p)?;
    let candidates = match &a.grid {
        Some(g) => match read_json::<GridSpec>(g, Kind::Grid)?.0 {
            GridSpec::Points(v) => v.iter().map(|p| Point::new(p[0], p[1])).collect(),
            GridSpec::Lattice { x, y } => {
                let ys = lattice(y.0, y.1, y.2);
                lattice(x.0, x.1, x.2)
                    .into_iter()
                    .flat_map(|px| ys.iter().map(move |&py| Point::new(px, py)))
                    .collect()
            }
        },
        None => default_grid(&s.geometry, &s.mesh),
    };
    let size = s.geometry.perimeter().min(4.0 * s.geometry.truncation.max(1.0));
    let points: Vec<Point> = candidates
        .iter()
        .copied()
        .filter(|p| s.geometry.contains(p) && s.geometry.distance(p) >= 1e-3 * size)
        .collect();
    let skipped = candidates.len() - points.len();

    let sol = match a.problem {
        ProblemArg::Dirichlet => solve_dirichlet(s, &data, a.p)?,
        ProblemArg::Neumann => solve_neumann(s, &data)?,
        ProblemArg::Regularity => solve_regularity(s, &data)?,
    };

    let mut out = csv_writer(a.out.as_deref())?;
    out.write_record([
        "x", "y", "re_u", "im_u", "re_du_dx1", "im_du_dx1", "re_du_dx2", "im_du_dx2",
    ])
    .context("writing CSV header")?;
    for p in &points {
        let (u, g) = sol
            .evaluate(p)
            .with_context(|| format!("evaluating at ({}, {})", p.x, p.y))?;
        let mut row: Vec<String> = vec![num(p.x), num(p.y)];
        for z in [u, g[0], g[1]] {
            row.extend(complex(z));
        }
        out.write_record(&row).context("writing CSV row")?;
    }
    out.flush()?;

    let problem = a
        .problem
        .to_possible_value()
        .expect("problem names are not hidden")
        .get_name()
        .to_string();
    if let Some(path) = &a.report {
        write_json(
            path,
            &json!({
                "problem": problem,
                "p": a.p,
                "geometry": b.geometry_label,
                "coefficients": b.coefficients_label,
                "data": a.data,
                "nodes": s.mesh.len(),
                "mesh_hash": mesh_hash(&s.mesh),
                "stats": sol.stats,
                "constant": [sol.constant.re, sol.constant.im],
                "grid_points": points.len(),
                "skipped_points": skipped,
            }),
        )?;
    }
    Ok(format!(
        "solve {problem}: {} nodes, residual {}, trace residual {}, condition {}, {} grid points ({} outside skipped){}",
        s.mesh.len(),
        num(sol.stats.residual),
        num(sol.stats.trace_residual),
        num(sol.stats.condition),
        points.len(),
        skipped,
        cache_note(&b.evaluator)?
    ))
}

// ---------------------------------------------------------------- verify

pub fn verify(a: &VerifyArgs) -> CliResult<String> {
    let (config, label) = read_json::<SuiteConfig>(&a.suite, Kind::Suite)?;
    let reports = run_suite(&config);
    if let Some(path) = &a.out_report {
        write_json(path, &json!({ "suite": label, "reports": reports }))?;
    }
    if let Some(path) = &a.out_constants {
        let mut out = std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        write_constants_csv(&reports, &mut out)?;
        std::io::Write::flush(&mut out)?;
    }
    let mut failed = Vec::new();
    let mut diagnostics = 0;
    for r in &reports {
        let status = match (r.kind, r.pass) {
            (CheckKind::Diagnostic, _) => {
                diagnostics += 1;
                "INFO"
            }
            (_, true) => "PASS",
            (_, false) => {
                failed.push(r.check_name.clone());
                "FAIL"
            }
        };
        let detail = match (&r.error, r.measured.first()) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some((q, v))) => format!("{q} = {} (tolerance {})", num(*v), num(r.tolerance)),
            (None, None) => String::new(),
        };
        eprintln!("{status} {} {detail} [{:.1} s]", r.check_name, r.runtime_s);
    }
    let summary = format!(
        "verify {label}: {} checks, {} passed, {} failed, {} diagnostic",
        reports.len(),
        reports.len() - failed.len() - diagnostics,
        failed.len(),
        diagnostics
    );
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Failed(format!("{summary} ({})", failed.join(", "))))
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Deserialize)]
struct SweepConfig {
    domain: DomainSpec,
    direction: MatrixEntries,
    eps: Vec<f64>,
    /// Stop once the condition estimate exceeds this.
    #[serde(default)]
    max_condition: Option<f64>,
}

pub fn sweep(a: &SweepArgs) -> CliResult<String> {
    let (cfg, label) = read_json::<SweepConfig>(&a.config, Kind::Sweep)?;
    let d = &cfg.domain;
    let geometry = d
        .geometry
        .build()
        .map_err(|e| CliError::config(format!("invalid geometry in '{label}': {e}")))?;
    let mesh = layerpot::geometry::make_mesh(&geometry, d.panels, d.grading)
        .map_err(|e| CliError::config(format!("invalid mesh parameters in '{label}': {e}")))?;
    let a0 = d
        .coefficients
        .build()
        .map_err(|e| CliError::config(format!("invalid coefficients in '{label}': {e}")))?;
    let m = &cfg.direction;
    let z = |k: usize| C64::new(m[k][0], m[k][1]);
    let direction = CMat2::new(z(0), z(1), z(2), z(3));
    let mut curve = perturbation_sweep(&geometry, &mesh, &a0, direction, &cfg.eps)?;
    let degraded_at = cfg.max_condition.and_then(|limit| {
        let k = curve.points.iter().position(|p| p.condition > limit)?;
        let eps = curve.points[k].eps;
        curve.points.truncate(k + 1);
        Some(eps)
    });

    let mut out = csv_writer(a.out.as_deref())?;
    out.write_record(["eps", "delta_norm", "ratio", "condition", "jump_residual"])
        .context("writing CSV header")?;
    for p in &curve.points {
        out.write_record([
            num(p.eps),
            num(p.delta_norm),
            p.ratio.map(num).unwrap_or_default(),
            num(p.condition),
            num(p.jump_residual),
        ])
        .context("writing CSV row")?;
    }
    out.flush()?;
    let ratios: Vec<f64> = curve.points.iter().filter_map(|p| p.ratio).collect();
    let ratio_spread = if ratios.is_empty() {
        None
    } else {
        Some(spread(&ratios))
    };
    if let Some(path) = &a.report {
        write_json(
            path,
            &json!({
                "config": label,
                "points": curve.points,
                "ratio_spread": ratio_spread,
                "not_elliptic_at": curve.truncated_at,
                "degraded_at": degraded_at,
            }),
        )?;
    }
    let stop = match (curve.truncated_at, degraded_at) {
        (_, Some(e)) => format!(", condition limit exceeded at eps = {e}"),
        (Some(e), None) => format!(", ellipticity lost at eps = {e}"),
        _ => String::new(),
    };
    Ok(format!(
        "sweep {label}: {} points, ratio spread {}{stop}",
        curve.points.len(),
        ratio_spread.map(num).unwrap_or_else(|| "n/a".into()),
    ))
}
