//! Fundamental solution for the graph metric `B = [[1, phi'], [phi', 1 + phi'^2]]`:
//! `Gamma^B_(x,t)(y,s) = Gamma^I(y - x, (s - phi(y)) - (t - phi(x)))`.

use super::{check_distinct, GreenFunction, GreenSample, Route};
use crate::coefficients::{CoefficientField, Profile};
use crate::error::{Error, Result};
use crate::geometry::interp_linear_pub as interp;
use crate::linalg::{c, CVec2, Point, C64};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct PullbackGreen {
    field: CoefficientField,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PullbackGreen {
    pub fn new(field: CoefficientField) -> Result<Self> {
        let (xs, ys) = match &field.profile {
            Profile::GraphMetric { xs, ys } => (xs.clone(), ys.clone()),
            _ => {
                return Err(Error::Coefficients(
                    "PullbackGreen needs a graph-metric field".into(),
                ))
            }
        };
        Ok(Self { field, xs, ys })
    }

    fn phi(&self, x: f64) -> f64 {
        interp(&self.xs, &self.ys, x)
    }

    fn slope(&self, x: f64) -> f64 {
        let a = self.field.at(x);
        a[(0, 1)].re
    }

    /// Flattened difference `Phi(Y) - Phi(X)`.
    fn flat(&self, pole: &Point, point: &Point) -> Point {
        Point::new(
            point.x - pole.x,
            (point.y - self.phi(point.x)) - (pole.y - self.phi(pole.x)),
        )
    }
}

impl GreenFunction for PullbackGreen {
    fn field(&self) -> &CoefficientField {
        &self.field
    }

    fn route(&self) -> Route {
        Route::GraphPullback
    }

    fn eval(&self, pole: &Point, point: &Point) -> Result<GreenSample> {
        check_distinct(pole, point)?;
        let d = self.flat(pole, point);
        let r2 = d.norm_squared();
        let g = d / (2.0 * PI * r2);
        let (py, px) = (self.slope(point.x), self.slope(pole.x));
        Ok(GreenSample {
            value: c(r2.ln() / (4.0 * PI)),
            grad_point: CVec2::new(c(g.x - g.y * py), c(g.y)),
            grad_pole: CVec2::new(c(-g.x + g.y * px), c(-g.y)),
        })
    }

    fn conj_grad_pole(&self, pole: &Point, point: &Point) -> Result<CVec2> {
        check_distinct(pole, point)?;
        // Gamma~ = arg(Phi(Y) - Phi(X)) / 2 pi, so grad_X = -DPhi(X)^T rot90 grad log|d| / 2 pi.
        let d = self.flat(pole, point);
        let r2 = d.norm_squared();
        let w = Point::new(-d.y, d.x) / (2.0 * PI * r2);
        let px = self.slope(pole.x);
        Ok(CVec2::new(
            C64::new(-(w.x - px * w.y), 0.0),
            C64::new(-w.y, 0.0),
        ))
    }

    fn transposed(&self) -> Arc<dyn GreenFunction> {
        Arc::new(self.clone())
    }
}

/// `(Gamma^B_X(Y), grad_Y Gamma^B)` for the metric of the graph `(xs, ys)`.
pub fn green_graph_pullback(xs: &[f64], ys: &[f64], x: &Point, y: &Point) -> Result<(C64, CVec2)> {
    let g = PullbackGreen::new(CoefficientField::graph_metric(xs.to_vec(), ys.to_vec())?)?;
    let s = g.eval(x, y)?;
    Ok((s.value, s.grad_point))
}
