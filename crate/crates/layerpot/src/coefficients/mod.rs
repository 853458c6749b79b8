//! Complex coefficient fields `A(x)` that depend on the first coordinate only.

mod json;
mod spline;
mod transforms;

pub use json::{CoefficientSpec, MatrixEntries};
pub use spline::CubicSpline;
pub use transforms::{b6, conjugate_matrix, triangularize, Triangularization};

use crate::error::{Error, Result};
use crate::linalg::{c, cdet, CMat2, C64};
use std::sync::Arc;

/// Closed-form profile `x -> A(x)`.
pub type ProfileFn = Arc<dyn Fn(f64) -> CMat2 + Send + Sync>;

#[derive(Clone)]
pub enum Profile {
    Constant(CMat2),
    /// Entry-wise natural cubic splines; frozen outside the grid.
    Sampled {
        xs: Vec<f64>,
        values: Vec<CMat2>,
        splines: Box<[CubicSpline; 4]>,
    },
    /// Closed-form profile; `window` is where it may vary (frozen outside).
    Analytic {
        f: ProfileFn,
        window: (f64, f64),
    },
    /// The graph metric `[[1,phi'],[phi',1+phi'^2]]` for a piecewise-linear
    /// graph (piecewise constant in x).
    GraphMetric {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Profile::Constant(a) => write!(f, "Constant({a:?})"),
            Profile::Sampled { xs, .. } => write!(f, "Sampled({} knots)", xs.len()),
            Profile::Analytic { window, .. } => write!(f, "Analytic(window {window:?})"),
            Profile::GraphMetric { xs, .. } => write!(f, "GraphMetric({} samples)", xs.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub profile: Profile,
    pub lambda_ell: f64,
    pub lambda_upper: f64,
    pub reference: Option<Box<CoefficientField>>,
    /// `sup_x ||A(x) - A0(x)||_2` over the sample grid (0 without reference).
    pub eps: f64,
}

/// Number of probes used when certifying ellipticity at construction.
pub const DEFAULT_PROBES: usize = 256;

impl CoefficientField {
    fn raw(profile: Profile) -> Self {
        Self {
            profile,
            lambda_ell: 0.0,
            lambda_upper: 0.0,
            reference: None,
            eps: 0.0,
        }
    }

    /// Build a field and certify its ellipticity constants.
    pub fn new(profile: Profile) -> Result<Self> {
        let mut field = Self::raw(profile);
        let (l, u) = check_ellipticity(&field, DEFAULT_PROBES)?;
        field.lambda_ell = l;
        field.lambda_upper = u;
        Ok(field)
    }

    pub fn constant(a: CMat2) -> Result<Self> {
        Self::new(Profile::Constant(a))
    }

    pub fn identity() -> Self {
        Self::constant(CMat2::identity()).expect("identity is elliptic")
    }

    pub fn sampled(xs: Vec<f64>, values: Vec<CMat2>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::Coefficients(
                "profile grid needs >= 2 points and one matrix per point".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Coefficients(
                "profile grid must be strictly increasing".into(),
            ));
        }
        if values
            .iter()
            .flat_map(|m| m.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Coefficients("non-finite profile value".into()));
        }
        let entry = |i: usize, j: usize| {
            CubicSpline::new(xs.clone(), values.iter().map(|m| m[(i, j)]).collect())
        };
        let splines = Box::new([entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1)]);
        Self::new(Profile::Sampled {
            xs,
            values,
            splines,
        })
    }

    pub fn analytic(
        f: impl Fn(f64) -> CMat2 + Send + Sync + 'static,
        window: (f64, f64),
    ) -> Result<Self> {
        Self::new(Profile::Analytic {
            f: Arc::new(f),
            window,
        })
    }

    /// The metric `B(phi)` attached to a piecewise-linear graph.
    pub fn graph_metric(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::new(Profile::GraphMetric { xs, ys })
    }

    /// Attach a real reference field and record `eps = ||A - A0||`.
    pub fn with_reference(mut self, reference: CoefficientField) -> Result<Self> {
        if !reference.is_real() {
            return Err(Error::Coefficients("reference field must be real".into()));
        }
        let grid = union_grid(&self, &reference);
        self.eps = grid
            .iter()
            .map(|&x| spectral_norm(&(self.at(x) - reference.at(x))))
            .fold(0.0, f64::max);
        self.reference = Some(Box::new(reference));
        Ok(self)
    }

    /// `A(x)`.
    pub fn at(&self, x: f64) -> CMat2 {
        match &self.profile {
            Profile::Constant(a) => *a,
            Profile::Sampled { splines, .. } => CMat2::new(
                splines[0].eval(x),
                splines[1].eval(x),
                splines[2].eval(x),
                splines[3].eval(x),
            ),
            Profile::Analytic { f, window } => f(x.clamp(window.0, window.1)),
            Profile::GraphMetric { xs, ys } => {
                let d = slope_at(xs, ys, x);
                CMat2::new(c(1.0), c(d), c(d), c(1.0 + d * d))
            }
        }
    }

    /// Interval outside which the field is constant (`None` for constants).
    pub fn window(&self) -> Option<(f64, f64)> {
        match &self.profile {
            Profile::Constant(_) => None,
            Profile::Sampled { xs, .. } => Some((xs[0], xs[xs.len() - 1])),
            Profile::Analytic { window, .. } => Some(*window),
            Profile::GraphMetric { xs, .. } => Some((xs[0], xs[xs.len() - 1])),
        }
    }

    /// Points at which ellipticity and distances are measured.
    pub fn grid(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Constant(_) => vec![0.0],
            Profile::Sampled { xs, .. } | Profile::GraphMetric { xs, .. } => {
                let mut g = xs.clone();
                g.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
                g.sort_by(|a, b| a.partial_cmp(b).unwrap());
                g
            }
            Profile::Analytic { window, .. } => (0..=1000)
                .map(|k| window.0 + (window.1 - window.0) * k as f64 / 1000.0)
                .collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, Profile::Constant(_))
    }

    pub fn is_real(&self) -> bool {
        self.grid()
            .iter()
            .all(|&x| self.at(x).iter().all(|z| z.im == 0.0))
    }

    pub fn is_symmetric(&self) -> bool {
        self.grid().iter().all(|&x| {
            let a = self.at(x);
            (a[(0, 1)] - a[(1, 0)]).norm() <= 1e-14 * (1.0 + a[(0, 1)].norm())
        })
    }

    /// Pointwise transpose `A^T`.
    pub fn transpose(&self) -> CoefficientField {
        let profile = match &self.profile {
            Profile::Constant(a) => Profile::Constant(a.transpose()),
            Profile::GraphMetric { .. } => self.profile.clone(),
            Profile::Sampled { xs, values, .. } => {
                return CoefficientField::sampled(
                    xs.clone(),
                    values.iter().map(|m| m.transpose()).collect(),
                )
                .expect("transpose of a valid profile is valid");
            }
            Profile::Analytic { f, window } => {
                let f = f.clone();
                Profile::Analytic {
                    f: Arc::new(move |x| f(x).transpose()),
                    window: *window,
                }
            }
        };
        CoefficientField {
            profile,
            ..self.clone()
        }
    }

    /// Frozen value at `-inf` and `+inf`.
    pub fn ends(&self) -> (CMat2, CMat2) {
        match self.window() {
            None => (self.at(0.0), self.at(0.0)),
            Some((a, b)) => (self.at(a - 1.0), self.at(b + 1.0)),
        }
    }

    /// Largest entry-wise first difference between adjacent grid points,
    /// used to detect fields that are piecewise constant with jumps.
    pub fn max_jump(&self) -> f64 {
        let g = self.grid();
        g.windows(2)
            .map(|w| spectral_norm(&(self.at(w[1]) - self.at(w[0]))))
            .fold(0.0, f64::max)
    }
}

fn slope_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] || x >= xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|v| *v <= x).clamp(1, xs.len() - 1);
    (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1])
}

fn union_grid(a: &CoefficientField, b: &CoefficientField) -> Vec<f64> {
    let mut g = a.grid();
    g.extend(b.grid());
    g
}

/// Largest singular value of a complex 2x2 matrix.
pub fn spectral_norm(a: &CMat2) -> f64 {
    let h = a.adjoint() * a;
    let tr = (h[(0, 0)] + h[(1, 1)]).re;
    let det = cdet(&h).re;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr + disc).max(0.0).sqrt()
}

/// Smallest eigenvalue of the Hermitian part `(A + A^H)/2`.
pub fn hermitian_min_eig(a: &CMat2) -> f64 {
    let h11 = a[(0, 0)].re;
    let h22 = a[(1, 1)].re;
    let h12 = (a[(0, 1)] + a[(1, 0)].conj()) * 0.5;
    0.5 * (h11 + h22) - (0.25 * (h11 - h22).powi(2) + h12.norm_sqr()).sqrt()
}

/// `Re conj(eta) . A eta` for the unit probe `eta = (cos th, e^{i psi} sin th)`.
fn probe_value(a: &CMat2, th: f64, psi: f64) -> f64 {
    let eta = [c(th.cos()), C64::from_polar(th.sin(), psi)];
    let mut s = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            s += eta[i].conj() * a[(i, j)] * eta[j];
        }
    }
    s.re
}

/// Certified ellipticity constants `(lambda, Lambda)`: `lambda` is the minimum
/// of `Re conj(eta).A(x) eta` over grid points and unit probes (refined near
/// the minimiser), `Lambda` the maximum of `|xi . A eta|`, which equals the
/// largest singular value.
pub fn check_ellipticity(field: &CoefficientField, probe_count: usize) -> Result<(f64, f64)> {
    if probe_count < 64 {
        return Err(Error::Coefficients(format!(
            "probe_count must be >= 64, got {probe_count}"
        )));
    }
    let side = (probe_count as f64).sqrt().ceil() as usize;
    let mut lambda = f64::INFINITY;
    let mut lambda_x = 0.0;
    let mut upper: f64 = 0.0;
    for x in field.grid() {
        let a = field.at(x);
        upper = upper.max(spectral_norm(&a));
        let (mut best, mut bt, mut bp) = (f64::INFINITY, 0.0, 0.0);
        for i in 0..side {
            for j in 0..side {
                let th = std::f64::consts::PI * i as f64 / side as f64;
                let psi = std::f64::consts::TAU * j as f64 / side as f64;
                let v = probe_value(&a, th, psi);
                if v < best {
                    (best, bt, bp) = (v, th, psi);
                }
            }
        }
        // Pattern-search refinement around the best probe.
        let mut step = std::f64::consts::PI / side as f64;
        while step > 1e-9 {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = probe_value(&a, bt + dt, bp + dp);
                if v < best {
                    (best, bt, bp) = (v, bt + dt, bp + dp);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best < lambda {
            lambda = best;
            lambda_x = x;
        }
    }
    if !(lambda > 0.0) {
        return Err(Error::NotElliptic {
            lambda,
            x: lambda_x,
        });
    }
    Ok((lambda, upper))
}
