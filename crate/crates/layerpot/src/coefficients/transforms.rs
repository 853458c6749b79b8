//! Algebraic transforms of coefficient fields.

use super::{CoefficientField, Profile};
use crate::error::{Error, Result};
use crate::linalg::{c, cdet, CMat2};
use std::sync::Arc;

/// The conjugate-equation matrix `A^T / det A`.
pub fn conjugate_matrix(field: &CoefficientField) -> Result<CoefficientField> {
    for x in field.grid() {
        let d = cdet(&field.at(x));
        if d.norm() < 1e-12 {
            return Err(Error::Coefficients(format!(
                "near-singular determinant {d} at x = {x}"
            )));
        }
    }
    let conj = |a: CMat2| a.transpose() / cdet(&a);
    match &field.profile {
        Profile::Constant(a) => CoefficientField::constant(conj(*a)),
        Profile::Sampled { xs, values, .. } => {
            CoefficientField::sampled(xs.clone(), values.iter().map(|a| conj(*a)).collect())
        }
        _ => {
            let src = field.clone();
            let window = field.window().unwrap_or((0.0, 0.0));
            CoefficientField::new(Profile::Analytic {
                f: Arc::new(move |x| conj(src.at(x))),
                window,
            })
        }
    }
}

/// `B6(x) = [[a11, a21], [0, 1]]`.
pub fn b6(field: &CoefficientField, x: f64) -> CMat2 {
    let a = field.at(x);
    CMat2::new(a[(0, 0)], a[(1, 0)], c(0.0), c(1.0))
}

/// The change of variables `J(y, s) = (f(y), s + g(y))` that makes the
/// transformed matrix lower-left entry vanish and its top-left entry one.
#[derive(Debug, Clone)]
pub struct Triangularization {
    pub ys: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub fp: Vec<f64>,
    pub gp: Vec<f64>,
    pub transformed: CoefficientField,
}

impl Triangularization {
    /// Pull the transformed matrix at grid index `k` back to `A0(f(y_k))`.
    pub fn pull_back(&self, k: usize) -> CMat2 {
        let (fp, gp) = (self.fp[k], self.gp[k]);
        // A0(f) = f' P^{-T} A_check P^{-1} with P = [[1, -g'], [0, f']].
        let p_inv = CMat2::new(c(1.0), c(gp / fp), c(0.0), c(1.0 / fp));
        p_inv.transpose() * self.transformed.at(self.ys[k]) * p_inv * c(fp)
    }
}

/// Triangularize a real elliptic field. The maps solve `f' = a11(f)`,
/// `g' = f' a21(f) / a11(f)` from `f(0) = g(0) = 0` by RK4 on a uniform grid.
pub fn triangularize(a0: &CoefficientField, steps: usize) -> Result<Triangularization> {
    if !a0.is_real() {
        return Err(Error::Coefficients(
            "triangularize needs a real field".into(),
        ));
    }
    let a11 = |x: f64| a0.at(x)[(0, 0)].re;
    let a21 = |x: f64| a0.at(x)[(1, 0)].re;
    let (xa, xb) = a0
        .window()
        .map(|(a, b)| (a.min(-1.0), b.max(1.0)))
        .unwrap_or((-1.0, 1.0));
    // y-range covering the x-window: f^{-1}(x) = int_0^x 1/a11.
    let finv = |x: f64| {
        let n = 2000;
        let h = x / n as f64;
        (0..n).map(|k| h / a11((k as f64 + 0.5) * h)).sum::<f64>()
    };
    let (ya, yb) = (finv(xa), finv(xb));
    let steps = steps.max(16);
    let h = (yb - ya) / steps as f64;
    let ys: Vec<f64> = (0..=steps).map(|k| ya + h * k as f64).collect();
    let k0 = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .unwrap()
        .0;

    let rhs = |f: f64| (a11(f), a21(f));
    let mut f = vec![0.0; ys.len()];
    let mut g = vec![0.0; ys.len()];
    // Start at the grid point nearest y = 0 after a short RK4 step from 0.
    let (f0, g0) = rk4(0.0, 0.0, ys[k0], &rhs);
    f[k0] = f0;
    g[k0] = g0;
    for k in k0 + 1..ys.len() {
        (f[k], g[k]) = rk4(f[k - 1], g[k - 1], h, &rhs);
    }
    for k in (0..k0).rev() {
        (f[k], g[k]) = rk4(f[k + 1], g[k + 1], -h, &rhs);
    }
    if f.iter().chain(&g).any(|v| !v.is_finite()) {
        return Err(Error::Coefficients(
            "triangularization ODE produced non-finite values".into(),
        ));
    }
    let fp: Vec<f64> = f.iter().map(|&x| a11(x)).collect();
    let gp: Vec<f64> = f
        .iter()
        .zip(&fp)
        .map(|(&x, fp)| fp * a21(x) / a11(x))
        .collect();
    let values: Vec<CMat2> = (0..ys.len())
        .map(|k| {
            let l = CMat2::new(c(1.0), c(0.0), c(-gp[k]), c(fp[k]));
            l * a0.at(f[k]) * l.transpose() / c(fp[k])
        })
        .collect();
    let transformed = CoefficientField::sampled(ys.clone(), values)?;
    Ok(Triangularization {
        ys,
        f,
        g,
        fp,
        gp,
        transformed,
    })
}

/// One RK4 step of the autonomous system `(f, g)' = (a11(f), a21(f))`.
fn rk4(f: f64, g: f64, h: f64, rhs: &impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let k1 = rhs(f);
    let k2 = rhs(f + 0.5 * h * k1.0);
    let k3 = rhs(f + 0.5 * h * k2.0);
    let k4 = rhs(f + h * k3.0);
    (
        f + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        g + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}
