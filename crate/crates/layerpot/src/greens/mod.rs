//! Fundamental solutions `Gamma_X(Y)` of `div A grad` with `div A grad Gamma_X = delta_X`.
//!
//! Three routes share one interface:
//!
//! - [`ConstantGreen`]: closed form for constant `A`.
//! - [`PullbackGreen`]: exact pullback of the Laplace kernel for graph metrics.
//! - [`FourierGreen`]: partial Fourier transform in the translation-invariant
//!   coordinate, one Riccati sweep per frequency, for general `A(x)`.
//!
//! Every evaluation takes the pole first and the evaluation point second and
//! returns the value with both gradients.

mod conjugate;
mod constant;
mod expint;
mod fourier;
mod probe;
mod pullback;

pub use conjugate::{conjugate_green_gradient, PathOptions};
pub use constant::{green_constant, ConstantGreen};
pub use expint::expint_e1;
pub use fourier::{FourierGreen, FourierParams, FOURIER_TOLERANCE};
pub use probe::{cz_regularity_probe, CzReport};
pub use pullback::{green_graph_pullback, PullbackGreen};

use crate::coefficients::{CoefficientField, Profile};
use crate::error::{Error, Result};
use crate::linalg::{CVec2, Point, C64};
use std::sync::Arc;

/// `Gamma` at one (pole, point) pair with its gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSample {
    pub value: C64,
    /// Gradient in the evaluation point.
    pub grad_point: CVec2,
    /// Gradient in the pole.
    pub grad_pole: CVec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ConstantClosedForm,
    GraphPullback,
    FourierOde,
}

pub trait GreenFunction: Send + Sync {
    fn field(&self) -> &CoefficientField;

    fn route(&self) -> Route;

    /// `Gamma_pole(point)` and both gradients.
    fn eval(&self, pole: &Point, point: &Point) -> Result<GreenSample>;

    /// `grad_pole Gamma~_pole(point)`, where `Gamma~` is the conjugate of
    /// `Gamma` in the evaluation point: `grad Gamma~ = rot90 A grad Gamma`.
    fn conj_grad_pole(&self, pole: &Point, point: &Point) -> Result<CVec2>;

    /// The evaluator for the transposed field.
    fn transposed(&self) -> Arc<dyn GreenFunction>;

    /// Relative accuracy of evaluations; zero for closed forms. Adaptive
    /// quadrature does not refine below this level.
    fn tolerance(&self) -> f64 {
        0.0
    }
}

impl std::fmt::Debug for dyn GreenFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GreenFunction({:?})", self.route())
    }
}

pub(crate) fn check_distinct(a: &Point, b: &Point) -> Result<()> {
    if a == b {
        return Err(Error::CoincidentPoints { x: a.x, y: a.y });
    }
    Ok(())
}

/// Choose the route from the field's profile.
pub fn evaluator_for(
    field: &CoefficientField,
    params: &FourierParams,
) -> Result<Arc<dyn GreenFunction>> {
    match &field.profile {
        Profile::Constant(_) => Ok(Arc::new(ConstantGreen::new(field.clone())?)),
        Profile::GraphMetric { .. } => Ok(Arc::new(PullbackGreen::new(field.clone())?)),
        _ => Ok(Arc::new(FourierGreen::new(field.clone(), params.clone())?)),
    }
}
