//! Empirical Hölder regularity of the kernel `K(X, Y) = B6(Y) grad_Y Gamma^T_X(Y)`.

use super::GreenFunction;
use crate::coefficients::b6;
use crate::error::Result;
use crate::linalg::{CVec2, Point};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CzReport {
    /// Fitted exponent and constant for perturbations of the pole.
    pub alpha_pole: f64,
    pub c_pole: f64,
    /// Same for perturbations of the evaluation point.
    pub alpha_point: f64,
    pub c_point: f64,
    pub samples: usize,
}

/// A probe triple `(X, X', Y)` with `|X - X'| < |X - Y| / 2`.
pub type ProbePair = (Point, Point, Point);

fn kernel(green: &dyn GreenFunction, pole: &Point, point: &Point) -> Result<CVec2> {
    let g = green.eval(pole, point)?.grad_point;
    Ok(b6(green.field(), point.x) * g)
}

/// Least-squares slope and intercept of `y` against `x`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Regress `log(|dK| |X - Y|)` on `log(|X - X'| / |X - Y|)`, then report the
/// smallest constant that bounds every sample at the fitted exponent.
fn regress(samples: &[(f64, f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(dk, _, _)| *dk > 0.0)
        .map(|&(dk, r, dist)| ((r / dist).ln(), (dk * dist).ln()))
        .collect();
    if pts.len() < 2 {
        return (1.0, 0.0);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (alpha, _) = fit(&xs, &ys);
    let alpha = alpha.clamp(0.0, 1.0);
    let c = samples
        .iter()
        .map(|&(dk, r, dist)| dk * dist.powf(1.0 + alpha) / r.powf(alpha))
        .fold(0.0, f64::max);
    (alpha, c)
}

pub fn cz_regularity_probe(green: &dyn GreenFunction, pairs: &[ProbePair]) -> Result<CzReport> {
    let transposed = green.transposed();
    let mut pole_samples = Vec::with_capacity(pairs.len());
    let mut point_samples = Vec::with_capacity(pairs.len());
    for (x, xp, y) in pairs {
        let r = (x - xp).norm();
        let dist = (x - y).norm();
        let dk = (kernel(transposed.as_ref(), x, y)? - kernel(transposed.as_ref(), xp, y)?).norm();
        pole_samples.push((dk, r, dist));
        let dk = (kernel(transposed.as_ref(), y, x)? - kernel(transposed.as_ref(), y, xp)?).norm();
        point_samples.push((dk, r, dist));
    }
    let (alpha_pole, c_pole) = regress(&pole_samples);
    let (alpha_point, c_point) = regress(&point_samples);
    Ok(CzReport {
        alpha_pole,
        c_pole,
        alpha_point,
        c_point,
        samples: pairs.len(),
    })
}
