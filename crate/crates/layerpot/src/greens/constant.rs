//! Closed-form fundamental solution for constant coefficients.
//!
//! Only the symmetric part `S` of `A` enters the equation. With `d = Y - X`,
//! `Gamma_X(Y) = log(d^T S^{-1} d) / (4 pi sqrt(det S))` (principal branches).

use super::{check_distinct, GreenFunction, GreenSample, Route};
use crate::coefficients::{CoefficientField, Profile};
use crate::error::{Error, Result};
use crate::linalg::{cdet, crot90, cvec, CMat2, CVec2, Point, C64};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ConstantGreen {
    field: CoefficientField,
    pub(crate) kernel: ConstantKernel,
}

/// Precomputed data for one constant matrix.
#[derive(Debug, Clone, Copy)]
pub struct ConstantKernel {
    pub a: CMat2,
    s_inv: CMat2,
    /// `1 / (2 pi sqrt(det S))`.
    scale: C64,
}

impl ConstantKernel {
    pub fn new(a: CMat2) -> Result<Self> {
        let s = (a + a.transpose()) * C64::new(0.5, 0.0);
        let det = cdet(&s);
        if det.im == 0.0 && det.re <= 0.0 {
            return Err(Error::UnsupportedMatrix(format!(
                "det of the symmetric part is {det}, on the branch cut"
            )));
        }
        let s_inv = CMat2::new(s[(1, 1)], -s[(0, 1)], -s[(1, 0)], s[(0, 0)]) / det;
        Ok(Self {
            a,
            s_inv,
            scale: C64::new(1.0, 0.0) / (det.sqrt() * (2.0 * PI)),
        })
    }

    /// Value and gradient in `Y` for `d = Y - X`.
    pub fn eval_d(&self, d: &Point) -> (C64, CVec2) {
        let dc = cvec(d);
        let sd = self.s_inv * dc;
        let q = dc.x * sd.x + dc.y * sd.y;
        let value = self.scale * 0.5 * q.ln();
        let grad = sd * (self.scale / q);
        (value, grad)
    }

    /// `grad_X Gamma~_X(Y) = -rot90 (A grad_Y Gamma_X(Y))`.
    pub fn conj_grad_pole_d(&self, d: &Point) -> CVec2 {
        let (_, g) = self.eval_d(d);
        -crot90(&(self.a * g))
    }
}

impl ConstantGreen {
    pub fn new(field: CoefficientField) -> Result<Self> {
        let a = match field.profile {
            Profile::Constant(a) => a,
            _ => {
                return Err(Error::Coefficients(
                    "ConstantGreen needs a constant field".into(),
                ))
            }
        };
        Ok(Self {
            kernel: ConstantKernel::new(a)?,
            field,
        })
    }
}

impl GreenFunction for ConstantGreen {
    fn field(&self) -> &CoefficientField {
        &self.field
    }

    fn route(&self) -> Route {
        Route::ConstantClosedForm
    }

    fn eval(&self, pole: &Point, point: &Point) -> Result<GreenSample> {
        check_distinct(pole, point)?;
        let (value, grad) = self.kernel.eval_d(&(point - pole));
        Ok(GreenSample {
            value,
            grad_point: grad,
            grad_pole: -grad,
        })
    }

    fn conj_grad_pole(&self, pole: &Point, point: &Point) -> Result<CVec2> {
        check_distinct(pole, point)?;
        Ok(self.kernel.conj_grad_pole_d(&(point - pole)))
    }

    fn transposed(&self) -> Arc<dyn GreenFunction> {
        Arc::new(
            ConstantGreen::new(self.field.transpose()).expect("transpose of a supported matrix"),
        )
    }
}

/// `(Gamma_X(Y), grad_Y Gamma, grad_X Gamma)` for a constant matrix.
pub fn green_constant(a: &CMat2, x: &Point, y: &Point) -> Result<(C64, CVec2, CVec2)> {
    check_distinct(x, y)?;
    let k = ConstantKernel::new(*a)?;
    let (v, g) = k.eval_d(&(y - x));
    Ok((v, g, -g))
}
