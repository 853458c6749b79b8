//! Green's function of a bounded domain, `G_X = Gamma_X - Phi_X`.
//!
//! The corrector is built for the transposed field, so that the weights
//! `nu . A^T grad G_X` represent solutions of the original equation:
//! `u(X) = sum_j w_j weight_j u(Y_j)`.

use super::{solve_dirichlet, Setup, Solution};
use crate::error::{Error, Result};
use crate::greens::GreenFunction;
use crate::linalg::{rdot, CVec2, Point, C64};
use crate::potentials::BoundaryDensity;
use std::sync::Arc;

/// Poles closer to the boundary than this multiple of the nearest panel's
/// length are refused.
pub const POLE_CLEARANCE: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct DomainGreen {
    pub pole: Point,
    /// Dirichlet solution for the transposed field with data `Gamma_X`.
    pub corrector: Solution,
    /// `nu . A^T grad G_X` at the mesh nodes.
    pub weights: Vec<C64>,
    green: Arc<dyn GreenFunction>,
}

impl DomainGreen {
    /// `G_X(Y)` and its gradient in `Y`.
    pub fn evaluate(&self, y: &Point) -> Result<(C64, CVec2)> {
        let s = self.green.eval(&self.pole, y)?;
        let (phi, dphi) = self.corrector.evaluate(y)?;
        Ok((s.value - phi, s.grad_point - dphi))
    }

    /// `sum_j w_j weight_j f_j`, the value at the pole of the solution with boundary values `f`.
    pub fn represent(&self, f: &[C64]) -> C64 {
        let w = &self.corrector.setup.mesh.weights;
        self.weights
            .iter()
            .zip(f)
            .zip(w)
            .map(|((g, f), w)| g * f * *w)
            .sum()
    }

    /// `sum_j w_j |weight_j|`.
    pub fn weight_l1(&self) -> f64 {
        let w = &self.corrector.setup.mesh.weights;
        self.weights.iter().zip(w).map(|(g, w)| g.norm() * w).sum()
    }
}

pub fn domain_green(setup: &Setup, pole: &Point) -> Result<DomainGreen> {
    setup.require_closed("the domain Green's function")?;
    let mesh = &setup.mesh;
    if !setup.geometry.contains(pole) {
        return Err(Error::Geometry(format!(
            "pole ({}, {}) is outside the domain",
            pole.x, pole.y
        )));
    }
    let (distance, floor) = mesh
        .panels
        .iter()
        .map(|p| (p.curve.distance(pole).0, POLE_CLEARANCE * p.length()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("mesh has panels");
    if distance < floor {
        return Err(Error::Resolution { distance, floor });
    }
    let transposed = setup.transposed();
    let green = transposed.green.clone();
    let samples = mesh
        .nodes
        .iter()
        .map(|y| green.eval(pole, y))
        .collect::<Result<Vec<_>>>()?;
    let data = BoundaryDensity::lp(samples.iter().map(|s| s.value).collect(), 2.0);
    let corrector = solve_dirichlet(&transposed, &data, 2.0)?;
    let weights = (0..mesh.len())
        .map(|j| {
            let at = green.field().at(mesh.nodes[j].x);
            rdot(&mesh.normals[j], &(at * samples[j].grad_point)) - corrector.conormal[j]
        })
        .collect();
    Ok(DomainGreen {
        pole: *pole,
        corrector,
        weights,
        green,
    })
}
