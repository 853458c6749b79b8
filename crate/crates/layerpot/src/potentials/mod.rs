//! Single and double layer potentials and their boundary traces.
//!
//! With `Gamma_Y(X)` the fundamental solution with pole `Y`:
//!
//! - `S f(X) = int Gamma_Y(X) f(Y) dsigma(Y)`,
//! - `D f(X) = int nu(Y) . A^T(Y) grad_Y Gamma_Y(X) f(Y) dsigma(Y)`,
//! - `grad D f(X) = -int grad_X Gamma~^T_X(Y) d_tau f(Y) dsigma(Y)`, where
//!   `Gamma~^T` is the conjugate kernel of the transposed field.
//!
//! Pairings are bilinear: `<g, f> = sum_j w_j g_j f_j` with no conjugation.

mod near;
mod split;
mod traces;

pub use near::{BoundarySample, NearQuadrature};
pub use split::assemble_K_split;
pub use traces::ladder_start;
pub use traces::{
    assemble_K, assemble_K_with, assemble_Kt, assemble_Kt_with, assemble_Lt, assemble_Lt_with,
    assemble_single_trace, BoundaryOperator, OpTag, Side, TraceOptions,
};

use crate::error::{Error, Result};
use crate::geometry::QuadratureMesh;
use crate::greens::GreenFunction;
use crate::linalg::{c, rdot, wnorm2, CVec2, Point, C64};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceTag {
    Lp(f64),
    H1Atom {
        center: [f64; 2],
        radius: f64,
    },
    /// A Hardy-space density without atom structure, such as the solved
    /// density of an atom problem. Not differentiable on the mesh.
    H1,
    Bmo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity {
    pub values: Vec<C64>,
    pub space: SpaceTag,
}

impl BoundaryDensity {
    pub fn lp(values: Vec<C64>, p: f64) -> Self {
        Self {
            values,
            space: SpaceTag::Lp(p),
        }
    }

    pub fn from_fn(mesh: &QuadratureMesh, f: impl Fn(&Point) -> C64) -> Self {
        Self::lp(mesh.nodes.iter().map(f).collect(), 2.0)
    }

    /// A two-valued atom on the arc inside the ball: positive on the first
    /// half of the arc (in traversal order), negative on the second, weighted
    /// mean zero, sup norm equal to `1 / sigma(arc)`.
    pub fn atom(mesh: &QuadratureMesh, center: Point, radius: f64) -> Result<Self> {
        let inside: Vec<usize> = (0..mesh.len())
            .filter(|&j| (mesh.nodes[j] - center).norm() < radius)
            .collect();
        if inside.len() < 2 {
            return Err(Error::IncompatibleData(format!(
                "atom ball of radius {radius} holds fewer than two nodes"
            )));
        }
        let sigma: f64 = inside.iter().map(|&j| mesh.weights[j]).sum();
        // Order by arclength position; on closed curves the arc may wrap.
        let mut order = inside.clone();
        if mesh.closed && inside.first() == Some(&0) && inside.last() == Some(&(mesh.len() - 1)) {
            let gap = inside.windows(2).position(|w| w[1] != w[0] + 1);
            if let Some(g) = gap {
                order.rotate_left(g + 1);
            }
        }
        let mut acc = 0.0;
        let mut split = order.len() / 2;
        for (k, &j) in order.iter().enumerate() {
            if acc + 0.5 * mesh.weights[j] > 0.5 * sigma {
                split = k.max(1);
                break;
            }
            acc += mesh.weights[j];
        }
        let w_pos: f64 = order[..split].iter().map(|&j| mesh.weights[j]).sum();
        let w_neg: f64 = order[split..].iter().map(|&j| mesh.weights[j]).sum();
        let (pos, neg) = if w_pos >= w_neg {
            (w_neg / w_pos, 1.0)
        } else {
            (1.0, w_pos / w_neg)
        };
        let mut values = vec![c(0.0); mesh.len()];
        for &j in &order[..split] {
            values[j] = c(pos / sigma);
        }
        for &j in &order[split..] {
            values[j] = c(-neg / sigma);
        }
        Ok(Self {
            values,
            space: SpaceTag::H1Atom {
                center: [center.x, center.y],
                radius,
            },
        })
    }

    /// Check the atom conditions when tagged as an atom.
    pub fn validate(&self, mesh: &QuadratureMesh) -> Result<()> {
        if self.values.len() != mesh.len() {
            return Err(Error::Dimension(format!(
                "density has {} values for {} nodes",
                self.values.len(),
                mesh.len()
            )));
        }
        if let SpaceTag::H1Atom { center, radius } = self.space {
            let center = Point::new(center[0], center[1]);
            let mut mean = c(0.0);
            let mut sigma = 0.0;
            for j in 0..mesh.len() {
                let inside = (mesh.nodes[j] - center).norm() < radius;
                if inside {
                    sigma += mesh.weights[j];
                } else if self.values[j] != c(0.0) {
                    return Err(Error::IncompatibleData(format!(
                        "atom nonzero outside its ball at node {j}"
                    )));
                }
                mean += self.values[j] * mesh.weights[j];
            }
            if mean.norm() > 1e-10 {
                return Err(Error::IncompatibleData(format!(
                    "atom mean {mean} is not zero"
                )));
            }
            let sup = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if sup > (1.0 + 1e-10) / sigma || sup > (1.0 + 1e-10) / radius {
                return Err(Error::IncompatibleData(format!(
                    "atom sup norm {sup} exceeds 1/sigma = {}",
                    1.0 / sigma
                )));
            }
        }
        Ok(())
    }

    /// Whether the density is smooth enough for `d_tau`.
    pub fn differentiable(&self) -> bool {
        matches!(self.space, SpaceTag::Lp(_))
    }
}

/// Points closer than this multiple of the smallest panel length are refused.
pub const RESOLUTION_FLOOR: f64 = 1e-9;

fn check_resolution(mesh: &QuadratureMesh, x: &Point) -> Result<()> {
    let floor = RESOLUTION_FLOOR
        * mesh
            .panels
            .iter()
            .map(|p| p.length())
            .fold(f64::INFINITY, f64::min);
    let d = mesh
        .panels
        .iter()
        .map(|p| p.curve.distance(x).0)
        .fold(f64::INFINITY, f64::min);
    if d < floor {
        return Err(Error::Resolution { distance: d, floor });
    }
    Ok(())
}

/// Sum of `w_j k(Y_j) f_j`, with adaptive quadrature on near panels.
fn layer_sum<const Q: usize>(
    tol: f64,
    mesh: &QuadratureMesh,
    x: &Point,
    f: &[C64],
    kernel: &dyn Fn(&BoundarySample) -> Result<[C64; Q]>,
) -> Result<[C64; Q]> {
    let near = traces::near_panels(mesh, x, 1.0);
    let quad = NearQuadrature::with_tol(NearQuadrature::default().tol.max(tol));
    let m = mesh.order();
    let mut acc = [c(0.0); Q];
    for (p, panel) in mesh.panels.iter().enumerate() {
        let range = panel.first_node..panel.first_node + m;
        if near.contains(&p) {
            let ints = quad.integrate::<Q>(panel, &mesh.rule, kernel)?;
            for (j, row) in range.zip(ints) {
                for q in 0..Q {
                    acc[q] += row[q] * f[j];
                }
            }
        } else {
            for j in range {
                if f[j] == c(0.0) {
                    continue;
                }
                let s = BoundarySample {
                    point: mesh.nodes[j],
                    normal: mesh.normals[j],
                    tangent: mesh.tangents[j],
                };
                let k = kernel(&s)?;
                for q in 0..Q {
                    acc[q] += k[q] * (f[j] * mesh.weights[j]);
                }
            }
        }
    }
    Ok(acc)
}

/// `S f(X)` and its gradient.
pub fn eval_single(
    green: &dyn GreenFunction,
    mesh: &QuadratureMesh,
    f: &BoundaryDensity,
    x: &Point,
) -> Result<(C64, CVec2)> {
    f.validate(mesh)?;
    check_resolution(mesh, x)?;
    let r = layer_sum::<3>(green.tolerance(), mesh, x, &f.values, &|y| {
        let s = green.eval(&y.point, x)?;
        Ok([s.value, s.grad_point[0], s.grad_point[1]])
    })?;
    Ok((r[0], CVec2::new(r[1], r[2])))
}

/// `D f(X)` without the gradient.
pub fn eval_double_value(
    green: &dyn GreenFunction,
    mesh: &QuadratureMesh,
    f: &BoundaryDensity,
    x: &Point,
) -> Result<C64> {
    f.validate(mesh)?;
    check_resolution(mesh, x)?;
    let [value] = layer_sum::<1>(green.tolerance(), mesh, x, &f.values, &|y| {
        let g = green.eval(&y.point, x)?.grad_pole;
        let a = green.field().at(y.point.x);
        Ok([rdot(&y.normal, &(a.transpose() * g))])
    })?;
    Ok(value)
}

/// `D f(X)`; the gradient is `None` when the density has no tangential derivative.
pub fn eval_double(
    green: &dyn GreenFunction,
    mesh: &QuadratureMesh,
    f: &BoundaryDensity,
    x: &Point,
) -> Result<(C64, Option<CVec2>)> {
    let value = eval_double_value(green, mesh, f, x)?;
    if !f.differentiable() {
        return Ok((value, None));
    }
    let df = mesh.d_tau(&f.values);
    let gt = green.transposed();
    let r = layer_sum::<2>(gt.tolerance(), mesh, x, &df, &|y| {
        let v = gt.conj_grad_pole(x, &y.point)?;
        Ok([-v[0], -v[1]])
    })?;
    Ok((value, Some(CVec2::new(r[0], r[1]))))
}

/// An interior solution `X -> (u, grad u)` with a note of where it came from.
#[derive(Clone)]
pub struct InteriorField {
    pub provenance: String,
    eval: Arc<dyn Fn(&Point) -> Result<(C64, CVec2)> + Send + Sync>,
}

impl std::fmt::Debug for InteriorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "InteriorField({})", self.provenance)
    }
}

impl InteriorField {
    pub fn new(
        provenance: impl Into<String>,
        eval: impl Fn(&Point) -> Result<(C64, CVec2)> + Send + Sync + 'static,
    ) -> Self {
        Self {
            provenance: provenance.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<(C64, CVec2)> {
        (self.eval)(x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// `max ||(K_+ - K_-) f - f|| / ||f||` in the weighted discrete `L^2` norm.
pub fn jump_check(
    kplus: &BoundaryOperator,
    kminus: &BoundaryOperator,
    densities: &[Vec<C64>],
) -> Result<JumpReport> {
    if !Arc::ptr_eq(&kplus.mesh, &kminus.mesh) && kplus.len() != kminus.len() {
        return Err(Error::Dimension(
            "operators live on different meshes".into(),
        ));
    }
    let w = &kplus.mesh.weights;
    let residuals: Vec<f64> = densities
        .iter()
        .map(|f| {
            let a = kplus.apply(f);
            let b = kminus.apply(f);
            let r: Vec<C64> = a
                .iter()
                .zip(&b)
                .zip(f)
                .map(|((p, m), f)| p - m - f)
                .collect();
            wnorm2(w, &r) / wnorm2(w, f)
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(JumpReport {
        residuals,
        max_residual,
    })
}
