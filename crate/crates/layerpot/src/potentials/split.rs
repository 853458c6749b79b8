//! Reference double-layer traces for constant symmetric `A` on smooth closed
//! curves: `K_+- = +-I/2 + N`, where `N` is the Nyström matrix of the kernel
//! `-nu_Y . (X - Y) / (2 pi sqrt(det A) (X - Y)^T A^-1 (X - Y))`, whose
//! diagonal limit is `kappa / (4 pi sqrt(det A) tau^T A^-1 tau)`.

use super::Side;
use crate::error::{Error, Result};
use crate::geometry::{Curve, QuadratureMesh};
use crate::linalg::{c, cdet, CMat2, C64};
use nalgebra::DMatrix;
use std::f64::consts::PI;

#[allow(non_snake_case)]
pub fn assemble_K_split(a: &CMat2, mesh: &QuadratureMesh, side: Side) -> Result<DMatrix<C64>> {
    if (a - a.transpose()).norm() > 1e-14 * a.norm() {
        return Err(Error::UnsupportedMatrix(
            "the split reference needs symmetric A".into(),
        ));
    }
    if !mesh.closed || mesh.panels.iter().any(|p| p.corner_start || p.corner_end) {
        return Err(Error::Geometry(
            "the split reference needs a smooth closed curve".into(),
        ));
    }
    let inv = a
        .try_inverse()
        .ok_or_else(|| Error::UnsupportedMatrix("singular A".into()))?;
    let scale = c(1.0) / (cdet(a).sqrt() * (2.0 * PI));
    let quad = |d: &nalgebra::Vector2<f64>| -> C64 {
        d.x * d.x * inv[(0, 0)] + d.x * d.y * (inv[(0, 1)] + inv[(1, 0)]) + d.y * d.y * inv[(1, 1)]
    };
    let n = mesh.len();
    let jump = if side == Side::Plus { 0.5 } else { -0.5 };
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let kappa = match mesh.panels[mesh.panel_index[i]].curve {
                Curve::Arc {
                    radius,
                    theta0,
                    theta1,
                    ..
                } => (theta1 - theta0).signum() / radius,
                Curve::Segment { .. } => 0.0,
            };
            c(jump) + scale * (0.5 * kappa) / quad(&mesh.tangents[i]) * mesh.weights[i]
        } else {
            let d = mesh.nodes[i] - mesh.nodes[j];
            -scale * mesh.normals[j].dot(&d) / quad(&d) * mesh.weights[j]
        }
    }))
}
