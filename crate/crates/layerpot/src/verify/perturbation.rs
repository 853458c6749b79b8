use super::trig_densities;
use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{DomainGeometry, QuadratureMesh};
use crate::greens::{evaluator_for, FourierParams};
use crate::linalg::{c, CMat2, C64};
use crate::potentials::{jump_check, OpTag};
use crate::solvers::{condition_estimate, Setup};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    /// `||K_+^{A_eps} - K_+^{A_0}||` in the weighted discrete `L^2` norm.
    pub delta_norm: f64,
    /// `delta_norm / eps`, absent at `eps = 0`.
    pub ratio: Option<f64>,
    pub condition: f64,
    pub jump_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
    /// First `eps` at which the perturbed field stopped being elliptic.
    pub truncated_at: Option<f64>,
}

/// Operator norm on the weighted space `L^2(w)`, by power iteration on
/// `B^H B` with `B = W^(1/2) M W^(-1/2)`.
pub fn operator_norm(m: &DMatrix<C64>, w: &[f64]) -> f64 {
    let n = m.nrows();
    let b = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * (w[i] / w[j]).sqrt());
    let bh = b.adjoint();
    let mut x = DVector::from_fn(n, |i, _| c(1.0 + 0.1 * (i as f64).sin()));
    x /= c(x.norm());
    let mut lambda = 0.0;
    for _ in 0..500 {
        let y = &bh * (&b * &x);
        let ny = y.norm();
        if ny == 0.0 {
            return 0.0;
        }
        let converged = (ny - lambda).abs() <= 1e-12 * ny;
        lambda = ny;
        x = y / c(ny);
        if converged {
            break;
        }
    }
    lambda.sqrt()
}

fn perturbed(a0: &CoefficientField, direction: CMat2, eps: f64) -> Result<CoefficientField> {
    if a0.is_constant() {
        return CoefficientField::constant(a0.at(0.0) + direction * c(eps));
    }
    let base = a0.clone();
    let window = a0.window().unwrap_or((-1.0, 1.0));
    CoefficientField::analytic(move |x| base.at(x) + direction * c(eps), window)
}

/// `K_+` for `A_0 + eps D` against `K_+` for `A_0`, with conditioning and
/// jump residuals along the sweep.
pub fn perturbation_sweep(
    geometry: &DomainGeometry,
    mesh: &QuadratureMesh,
    a0: &CoefficientField,
    direction: CMat2,
    eps_list: &[f64],
) -> Result<SweepCurve> {
    if !a0.is_real() {
        return Err(Error::Coefficients("the reference field of a perturbation sweep must be real".into()));
    }
    let params = FourierParams::default();
    let setup_for = |field: &CoefficientField| -> Result<Setup> {
        Ok(Setup::from_parts(geometry.clone(), mesh.clone(), evaluator_for(field, &params)?))
    };
    let base = setup_for(a0)?.operator(OpTag::Kplus)?;
    let densities = trig_densities(mesh, 16);
    let mut points = Vec::new();
    for &eps in eps_list {
        let field = match perturbed(a0, direction, eps) {
            Ok(f) => f,
            Err(Error::NotElliptic { .. }) => return Ok(SweepCurve { points, truncated_at: Some(eps) }),
            Err(e) => return Err(e),
        };
        let s = setup_for(&field)?;
        let kp = s.operator(OpTag::Kplus)?;
        let km = s.operator(OpTag::Kminus)?;
        let delta = &kp.matrix - &base.matrix;
        let delta_norm = operator_norm(&delta, &mesh.weights);
        points.push(SweepPoint {
            eps,
            delta_norm,
            ratio: (eps != 0.0).then(|| delta_norm / eps.abs()),
            condition: condition_estimate(&kp.matrix)?,
            jump_residual: jump_check(&kp, &km, &densities)?.max_residual,
        });
    }
    Ok(SweepCurve { points, truncated_at: None })
}
