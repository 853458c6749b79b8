//! Boundary value problems for `div A grad u = 0`.
//!
//! - Dirichlet: `u = D h` with `K_+ h = f`.
//! - Neumann: `u = S h + c` with the interior conormal trace of `S h` equal
//!   to `g`. The constant `c` makes the boundary mean of `u` vanish.
//! - Regularity: `u = S h + c` with the tangential derivative of `S h` equal
//!   to `d_tau f`. The constant `c` matches `f` at node 0.
//!
//! On closed curves the single-layer operators have a one-dimensional kernel.
//! The conormal operator is bordered with the rank-one term `1 w^T`; the
//! tangential operator is solved in least squares with the extra row `w^T`.
//! Both pin `sum w h = 0`, which keeps `S h` bounded at infinity.
//!
//! Every [`Solution`] carries the boundary trace and the interior conormal
//! derivative of `u`, so the representation `u = D f - S g` can be checked
//! independently of how `u` was built.

mod conjugate;
mod green;
mod linear;

pub use conjugate::{conjugate_solution, ConjugateField};
pub use green::{domain_green, DomainGreen};
pub use linear::{
    condition_estimate, solve_least_squares, solve_linear, LinearMethod, LinearReport,
    MAX_CONDITION,
};

use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{make_mesh, DomainGeometry, QuadratureMesh};
use crate::greens::{evaluator_for, FourierParams, GreenFunction};
use crate::linalg::{c, rdot, wnorm2, CVec2, Point, C64};
use crate::potentials::{
    assemble_K_with, assemble_Kt_with, assemble_Lt_with, assemble_single_trace, BoundaryOperator, eval_double, eval_double_value, eval_single,
    ladder_start, BoundaryDensity, InteriorField, OpTag, Side, SpaceTag, TraceOptions,
};
use crate::quadrature::extrapolation_weights;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest tolerated `|sum w g|` for Neumann data on a closed curve, relative
/// to `max(1, sum w |g|)`.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSpace {
    Lp(f64),
    H1,
}

impl DataSpace {
    fn of(space: &SpaceTag) -> Result<Self> {
        match space {
            SpaceTag::Lp(p) => Ok(DataSpace::Lp(*p)),
            SpaceTag::H1Atom { .. } | SpaceTag::H1 => Ok(DataSpace::H1),
            SpaceTag::Bmo => Err(Error::IncompatibleData(
                "BMO data is only supported by the Carleson check".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Dirichlet(f64),
    Neumann(DataSpace),
    Regularity(DataSpace),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveStats {
    /// Relative residual of the linear system.
    pub residual: f64,
    /// Relative weighted `L^2` mismatch between the boundary condition and
    /// the corresponding trace of the computed `u`.
    pub trace_residual: f64,
    pub iterations: usize,
    pub condition: f64,
    /// Largest extrapolation discrepancy of the assembled operators.
    pub assembly_tolerance: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SolverOptions {
    pub method: LinearMethod,
    pub trace: TraceOptions,
}

/// Geometry, mesh and fundamental solution shared by the solves on one domain.
/// Boundary operators assembled so far, and the transposed setup.
#[derive(Default)]
struct Cache {
    operators: Mutex<HashMap<OpTag, Arc<BoundaryOperator>>>,
    transposed: OnceLock<Setup>,
}

/// Geometry, mesh and fundamental solution shared by the solves on one
/// domain. Assembled boundary operators are cached and shared by clones.
#[derive(Clone)]
pub struct Setup {
    pub geometry: Arc<DomainGeometry>,
    pub mesh: Arc<QuadratureMesh>,
    pub green: Arc<dyn GreenFunction>,
    options: SolverOptions,
    cache: Arc<Cache>,
}

impl std::fmt::Debug for Setup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Setup({} nodes, {:?})", self.mesh.len(), self.green)
    }
}

impl Setup {
    pub fn new(
        geometry: DomainGeometry,
        field: &CoefficientField,
        n_panels: usize,
        grading: f64,
    ) -> Result<Self> {
        let mesh = make_mesh(&geometry, n_panels, grading)?;
        let green = evaluator_for(field, &FourierParams::default())?;
        Ok(Self::from_parts(geometry, mesh, green))
    }

    pub fn from_parts(
        geometry: DomainGeometry,
        mesh: QuadratureMesh,
        green: Arc<dyn GreenFunction>,
    ) -> Self {
        Self {
            geometry: Arc::new(geometry),
            mesh: Arc::new(mesh),
            green,
            options: SolverOptions::default(),
            cache: Arc::default(),
        }
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self.cache = Arc::default();
        self
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// The same domain with the transposed coefficient field.
    pub fn transposed(&self) -> Setup {
        self.cache
            .transposed
            .get_or_init(|| Setup {
                geometry: self.geometry.clone(),
                mesh: self.mesh.clone(),
                green: self.green.transposed(),
                options: self.options.clone(),
                cache: Arc::default(),
            })
            .clone()
    }

    /// The boundary operator with the given tag, assembled on first use.
    pub fn operator(&self, tag: OpTag) -> Result<Arc<BoundaryOperator>> {
        if let Some(op) = self.cache.operators.lock().expect("operator cache poisoned").get(&tag) {
            return Ok(op.clone());
        }
        let (g, m, o) = (&*self.green, &self.mesh, &self.options.trace);
        let op = Arc::new(match tag {
            OpTag::Kplus => assemble_K_with(g, m, Side::Plus, o)?,
            OpTag::Kminus => assemble_K_with(g, m, Side::Minus, o)?,
            OpTag::KtPlus => assemble_Kt_with(g, m, Side::Plus, o)?,
            OpTag::KtMinus => assemble_Kt_with(g, m, Side::Minus, o)?,
            OpTag::Lt => assemble_Lt_with(g, m, Side::Plus, o)?,
            single => assemble_single_trace(g, m, single, o)?,
        });
        self.cache.operators.lock().expect("operator cache poisoned").insert(tag, op.clone());
        Ok(op)
    }

    fn require_closed(&self, what: &str) -> Result<()> {
        if !self.mesh.closed {
            return Err(Error::Geometry(format!("{what} needs a bounded domain")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub problem: Problem,
    /// The boundary data as given (the tangential derivative for
    /// [`solve_regularity_tangential`]).
    pub data: BoundaryDensity,
    pub density: BoundaryDensity,
    pub field: InteriorField,
    pub stats: SolveStats,
    /// Boundary values of `u` at the mesh nodes.
    pub trace: Vec<C64>,
    /// Interior conormal derivative `nu . A grad u` at the mesh nodes.
    pub conormal: Vec<C64>,
    /// Additive constant in `u = S h + c` (zero for Dirichlet solutions).
    pub constant: C64,
    pub setup: Setup,
}

impl Solution {
    pub fn evaluate(&self, x: &Point) -> Result<(C64, CVec2)> {
        self.field.evaluate(x)
    }
}

/// Tag of a solved density: atoms become generic `H^1` densities.
fn solved_space(data: &SpaceTag) -> SpaceTag {
    match data {
        SpaceTag::H1Atom { .. } => SpaceTag::H1,
        other => other.clone(),
    }
}

fn check_len(mesh: &QuadratureMesh, f: &BoundaryDensity) -> Result<()> {
    if f.values.len() != mesh.len() {
        return Err(Error::Dimension(format!(
            "density has {} values for {} nodes",
            f.values.len(),
            mesh.len()
        )));
    }
    Ok(())
}

fn relative(w: &[f64], r: &[C64], reference: &[C64]) -> f64 {
    let num = wnorm2(w, r);
    let den = wnorm2(w, reference);
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// `M + 1 w^T`.
fn bordered(m: &DMatrix<C64>, w: &[f64]) -> DMatrix<C64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] + c(w[j]))
}

/// Central difference gradient, used when the density has no tangential derivative.
fn fd_gradient(eval: &dyn Fn(&Point) -> Result<C64>, x: &Point, step: f64) -> Result<CVec2> {
    let ex = Point::new(step, 0.0);
    let ey = Point::new(0.0, step);
    let gx = (eval(&(x + ex))? - eval(&(x - ex))?) / (2.0 * step);
    let gy = (eval(&(x + ey))? - eval(&(x - ey))?) / (2.0 * step);
    Ok(CVec2::new(gx, gy))
}

fn double_layer_field(
    green: Arc<dyn GreenFunction>,
    mesh: Arc<QuadratureMesh>,
    h: BoundaryDensity,
) -> InteriorField {
    InteriorField::new("double layer", move |x| {
        let (u, grad) = eval_double(&*green, &mesh, &h, x)?;
        match grad {
            Some(g) => Ok((u, g)),
            None => {
                let d = mesh
                    .panels
                    .iter()
                    .map(|p| p.curve.distance(x).0)
                    .fold(f64::INFINITY, f64::min);
                let g = fd_gradient(
                    &|z| eval_double_value(&*green, &mesh, &h, z),
                    x,
                    1e-3 * d.min(1.0),
                )?;
                Ok((u, g))
            }
        }
    })
}

fn single_layer_field(
    green: Arc<dyn GreenFunction>,
    mesh: Arc<QuadratureMesh>,
    h: BoundaryDensity,
    constant: C64,
) -> InteriorField {
    InteriorField::new("single layer", move |x| {
        let (u, g) = eval_single(&*green, &mesh, &h, x)?;
        Ok((u + constant, g))
    })
}

/// Values and gradients of an interior field at the mesh nodes, by
/// extrapolating samples along the inward normal to zero offset.
pub fn interior_trace(
    field: &InteriorField,
    mesh: &QuadratureMesh,
    opts: &TraceOptions,
) -> Result<(Vec<C64>, Vec<CVec2>)> {
    let rows: Vec<(C64, CVec2)> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let h0 = ladder_start(mesh, i, opts);
            let hs: Vec<f64> = (0..opts.levels)
                .map(|k| h0 * 0.5f64.powi(k as i32))
                .collect();
            let wts = extrapolation_weights(&hs);
            let mut u = c(0.0);
            let mut g = CVec2::zeros();
            for (h, w) in hs.iter().zip(&wts) {
                let (v, dv) = field.evaluate(&(mesh.nodes[i] - mesh.normals[i] * *h))?;
                u += v * *w;
                g += dv * c(*w);
            }
            Ok((u, g))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

fn conormal_of(green: &dyn GreenFunction, mesh: &QuadratureMesh, grads: &[CVec2]) -> Vec<C64> {
    (0..mesh.len())
        .map(|i| {
            rdot(
                &mesh.normals[i],
                &(green.field().at(mesh.nodes[i].x) * grads[i]),
            )
        })
        .collect()
}

/// `u = D(K_+^{-1} f)`.
pub fn solve_dirichlet(setup: &Setup, f: &BoundaryDensity, p: f64) -> Result<Solution> {
    let mesh = &setup.mesh;
    check_len(mesh, f)?;
    f.validate(mesh)?;
    let kp = setup.operator(OpTag::Kplus)?;
    let (h, report) = solve_linear(&kp.matrix, &f.values, &setup.options.method)?;
    let density = BoundaryDensity {
        values: h,
        space: solved_space(&f.space),
    };
    let field = double_layer_field(setup.green.clone(), mesh.clone(), density.clone());
    let (trace, grads) = interior_trace(&field, mesh, &setup.options.trace)?;
    let conormal = conormal_of(&*setup.green, mesh, &grads);
    let r: Vec<C64> = trace.iter().zip(&f.values).map(|(a, b)| a - b).collect();
    let stats = SolveStats {
        residual: report.residual,
        trace_residual: relative(&mesh.weights, &r, &f.values),
        iterations: report.iterations,
        condition: report.condition,
        assembly_tolerance: kp.tolerance,
    };
    Ok(Solution {
        problem: Problem::Dirichlet(p),
        data: f.clone(),
        density,
        field,
        stats,
        trace,
        conormal,
        constant: c(0.0),
        setup: setup.clone(),
    })
}

/// `u = S h + c` with interior conormal derivative `g` and boundary mean zero.
pub fn solve_neumann(setup: &Setup, g: &BoundaryDensity) -> Result<Solution> {
    let mesh = &setup.mesh;
    check_len(mesh, g)?;
    g.validate(mesh)?;
    let space = DataSpace::of(&g.space)?;
    let w = &mesh.weights;
    if mesh.closed {
        let total: C64 = w.iter().zip(&g.values).map(|(w, g)| g * *w).sum();
        let size: f64 = w.iter().zip(&g.values).map(|(w, g)| w * g.norm()).sum();
        if total.norm() > COMPATIBILITY_TOL * size.max(1.0) {
            return Err(Error::IncompatibleData(format!(
                "Neumann data has boundary integral {:e}",
                total.norm()
            )));
        }
    }
    let flux = setup.operator(OpTag::SingleFluxPlus)?;
    let system = if mesh.closed {
        bordered(&flux.matrix, w)
    } else {
        flux.matrix.clone()
    };
    let (h, report) = solve_linear(&system, &g.values, &setup.options.method)?;
    let value = setup.operator(OpTag::SingleValue)?;
    let sh = value.apply(&h);
    let constant = -sh.iter().zip(w).map(|(v, w)| v * *w).sum::<C64>() / w.iter().sum::<f64>();
    let trace: Vec<C64> = sh.iter().map(|v| v + constant).collect();
    let conormal = flux.apply(&h);
    let r: Vec<C64> = conormal.iter().zip(&g.values).map(|(a, b)| a - b).collect();
    let stats = SolveStats {
        residual: report.residual,
        trace_residual: relative(w, &r, &g.values),
        iterations: report.iterations,
        condition: report.condition,
        assembly_tolerance: flux.tolerance.max(value.tolerance),
    };
    let density = BoundaryDensity {
        values: h,
        space: solved_space(&g.space),
    };
    let field = single_layer_field(setup.green.clone(), mesh.clone(), density.clone(), constant);
    Ok(Solution {
        problem: Problem::Neumann(space),
        data: g.clone(),
        density,
        field,
        stats,
        trace,
        conormal,
        constant,
        setup: setup.clone(),
    })
}

/// `u` with boundary values `f`, through the tangential derivative `d_tau f`.
pub fn solve_regularity(setup: &Setup, f: &BoundaryDensity) -> Result<Solution> {
    let mesh = &setup.mesh;
    check_len(mesh, f)?;
    f.validate(mesh)?;
    if !f.differentiable() {
        return Err(Error::IncompatibleData(
            "regularity data must have a tangential derivative on the mesh".into(),
        ));
    }
    let space = DataSpace::of(&f.space)?;
    let df = BoundaryDensity {
        values: mesh.d_tau(&f.values),
        space: f.space.clone(),
    };
    let mut sol = solve_regularity_tangential(setup, &df, f.values[0])?;
    let r: Vec<C64> = sol
        .trace
        .iter()
        .zip(&f.values)
        .map(|(a, b)| a - b)
        .collect();
    sol.stats.trace_residual = relative(&mesh.weights, &r, &f.values);
    sol.problem = Problem::Regularity(space);
    sol.data = f.clone();
    Ok(sol)
}

/// Regularity solve from the tangential derivative `df` of the boundary
/// values, with `u` equal to `anchor` at node 0. The data may be an atom.
pub fn solve_regularity_tangential(
    setup: &Setup,
    df: &BoundaryDensity,
    anchor: C64,
) -> Result<Solution> {
    let mesh = &setup.mesh;
    check_len(mesh, df)?;
    df.validate(mesh)?;
    let space = DataSpace::of(&df.space)?;
    let w = &mesh.weights;
    let tangential = setup.operator(OpTag::SingleTangential)?;
    let (h, report) = if mesh.closed {
        // The tangential operator is odd under reflection about panel
        // midpoints, so its discrete range is not the mean-zero subspace and
        // the bordered square system is singular. The stacked system with the
        // side condition `sum w h = 0` has full column rank instead.
        let n = mesh.len();
        let stacked = DMatrix::from_fn(n + 1, n, |i, j| {
            if i < n {
                tangential.matrix[(i, j)]
            } else {
                c(w[j])
            }
        });
        let mut rhs = df.values.clone();
        rhs.push(c(0.0));
        solve_least_squares(&stacked, &rhs)?
    } else {
        solve_linear(&tangential.matrix, &df.values, &setup.options.method)?
    };
    let value = setup.operator(OpTag::SingleValue)?;
    let flux = setup.operator(OpTag::SingleFluxPlus)?;
    let sh = value.apply(&h);
    let constant = anchor - sh[0];
    let trace: Vec<C64> = sh.iter().map(|v| v + constant).collect();
    let conormal = flux.apply(&h);
    let r: Vec<C64> = tangential
        .apply(&h)
        .iter()
        .zip(&df.values)
        .map(|(a, b)| a - b)
        .collect();
    let stats = SolveStats {
        residual: report.residual,
        trace_residual: relative(w, &r, &df.values),
        iterations: report.iterations,
        condition: report.condition,
        assembly_tolerance: tangential
            .tolerance
            .max(value.tolerance)
            .max(flux.tolerance),
    };
    let density = BoundaryDensity {
        values: h,
        space: solved_space(&df.space),
    };
    let field = single_layer_field(setup.green.clone(), mesh.clone(), density.clone(), constant);
    Ok(Solution {
        problem: Problem::Regularity(space),
        data: df.clone(),
        density,
        field,
        stats,
        trace,
        conormal,
        constant,
        setup: setup.clone(),
    })
}

/// `max |u(X) - (D f(X) - S g(X))| / scale` over the points, with `f` and `g`
/// the stored trace and conormal derivative and `scale = max |f|`.
pub fn representation_residual(sol: &Solution, points: &[Point]) -> Result<f64> {
    let setup = &sol.setup;
    let f = BoundaryDensity::lp(sol.trace.clone(), 2.0);
    let g = BoundaryDensity::lp(sol.conormal.clone(), 2.0);
    let scale = sol
        .trace
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let errs: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let (u, _) = sol.field.evaluate(x)?;
            let d = eval_double_value(&*setup.green, &setup.mesh, &f, x)?;
            let (s, _) = eval_single(&*setup.green, &setup.mesh, &g, x)?;
            Ok((u - (d - s)).norm() / scale)
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}
