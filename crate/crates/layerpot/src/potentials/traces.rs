//! Nyström matrices for the boundary traces `K_+-`, `K^t_+-` and `L^t`.
//!
//! Entries against panels far from the target node use the mesh rule at the
//! node itself. Entries against near panels are integrated adaptively at
//! offsets `Z = X + sgn h nu` along a geometric ladder `h_k = h0 2^-k` and
//! extrapolated to `h = 0`.

use super::near::{BoundarySample, NearQuadrature};
use crate::error::{Error, Result};
use crate::geometry::QuadratureMesh;
use crate::greens::GreenFunction;
use crate::linalg::{c, rdot, Point, C64};
use crate::quadrature::extrapolation_weights;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpTag {
    Kplus,
    Kminus,
    KtPlus,
    KtMinus,
    Lt,
    /// Boundary values of `S`.
    SingleValue,
    /// `nu . A grad S` from the domain side.
    SingleFluxPlus,
    /// `nu . A grad S` from the complement.
    SingleFluxMinus,
    /// `tau . grad S`.
    SingleTangential,
}

/// `Plus` is the domain side, `Minus` its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceOptions {
    pub levels: usize,
    /// `h0 <= offset_fraction * panel length`.
    pub offset_fraction: f64,
    /// `h0 <= corner_fraction * distance to the nearest corner`.
    pub corner_fraction: f64,
    /// `h0 <= endpoint_fraction * distance to the ends of the node's panel`.
    pub endpoint_fraction: f64,
    /// A panel is near when its distance to the node is below this multiple
    /// of its length.
    pub near_factor: f64,
    pub quad_tol: f64,
    /// Reject a row when the extrapolated constant-density trace moves by more
    /// than this when the coarsest level is dropped.
    pub max_discrepancy: f64,
    /// Impose the constant-density identities on closed curves.
    pub enforce_constants: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            levels: 6,
            offset_fraction: 0.25,
            corner_fraction: 0.5,
            endpoint_fraction: 0.5,
            near_factor: 1.0,
            quad_tol: 1e-12,
            max_discrepancy: 1e-2,
            enforce_constants: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub matrix: DMatrix<C64>,
    pub tag: OpTag,
    pub mesh: Arc<QuadratureMesh>,
    /// Largest ladder step `h0` per node; level `k` uses `h0 2^-k`.
    pub limit_offsets: Vec<f64>,
    /// Largest change of an extrapolated constant-density row when the
    /// coarsest level is dropped, relative to the row's scale.
    pub tolerance: f64,
}

impl BoundaryOperator {
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let v = nalgebra::DVector::from_column_slice(f);
        (&self.matrix * v).iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }
}

#[derive(Clone, Copy)]
enum Kind {
    /// `nu_Y . A^T(Y) grad_pole Gamma_Y(Z)`.
    Double,
    /// `nu_X . A^T(X) grad_pole Gamma_Z(Y)`.
    FluxTranspose,
    /// `tau_X . grad_pole Gamma_Z(Y)`.
    Tangential,
    /// `Gamma_Y(Z)`.
    SingleValue,
    /// `nu_X . A(X) grad_point Gamma_Y(Z)`.
    SingleFlux,
    /// `tau_X . grad_point Gamma_Y(Z)`.
    SingleTangential,
}

fn kernel(
    green: &dyn GreenFunction,
    kind: Kind,
    target: &Point,
    node: &BoundarySample,
    y: &BoundarySample,
) -> Result<C64> {
    match kind {
        Kind::Double => {
            let g = green.eval(&y.point, target)?.grad_pole;
            let a = green.field().at(y.point.x);
            Ok(rdot(&y.normal, &(a.transpose() * g)))
        }
        Kind::FluxTranspose => {
            let g = green.eval(target, &y.point)?.grad_pole;
            let a = green.field().at(node.point.x);
            Ok(rdot(&node.normal, &(a.transpose() * g)))
        }
        Kind::Tangential => {
            let g = green.eval(target, &y.point)?.grad_pole;
            Ok(rdot(&node.tangent, &g))
        }
        Kind::SingleValue => Ok(green.eval(&y.point, target)?.value),
        Kind::SingleFlux => {
            let g = green.eval(&y.point, target)?.grad_point;
            let a = green.field().at(node.point.x);
            Ok(rdot(&node.normal, &(a * g)))
        }
        Kind::SingleTangential => Ok(rdot(
            &node.tangent,
            &green.eval(&y.point, target)?.grad_point,
        )),
    }
}

fn sample(mesh: &QuadratureMesh, j: usize) -> BoundarySample {
    BoundarySample {
        point: mesh.nodes[j],
        normal: mesh.normals[j],
        tangent: mesh.tangents[j],
    }
}

/// Panels within `near_factor` lengths of a point.
pub(crate) fn near_panels(mesh: &QuadratureMesh, p: &Point, near_factor: f64) -> Vec<usize> {
    mesh.panels
        .iter()
        .enumerate()
        .filter(|(_, panel)| panel.curve.distance(p).0 < near_factor * panel.length())
        .map(|(k, _)| k)
        .collect()
}

/// Ladder start for node `i`.
pub fn ladder_start(mesh: &QuadratureMesh, i: usize, opts: &TraceOptions) -> f64 {
    let len = mesh.panels[mesh.panel_index[i]].length();
    let s = mesh.rule.nodes[i - mesh.panels[mesh.panel_index[i]].first_node];
    let to_end = 0.5 * (1.0 - s.abs()) * len;
    (opts.offset_fraction * len)
        .min(opts.corner_fraction * mesh.corner_distance[i])
        .min(opts.endpoint_fraction * to_end)
}

struct Row {
    values: Vec<C64>,
    discrepancy: f64,
}

fn assemble_row(
    green: &dyn GreenFunction,
    mesh: &QuadratureMesh,
    kind: Kind,
    sgn: f64,
    i: usize,
    opts: &TraceOptions,
    quad: &NearQuadrature,
) -> Result<Row> {
    let n = mesh.len();
    let m = mesh.order();
    let node = sample(mesh, i);
    let near = near_panels(mesh, &node.point, opts.near_factor);
    let mut values = vec![c(0.0); n];
    for (p, panel) in mesh.panels.iter().enumerate() {
        if near.contains(&p) {
            continue;
        }
        for j in panel.first_node..panel.first_node + m {
            values[j] =
                kernel(green, kind, &node.point, &node, &sample(mesh, j))? * mesh.weights[j];
        }
    }
    let h0 = ladder_start(mesh, i, opts);
    let hs: Vec<f64> = (0..opts.levels)
        .map(|k| h0 * 0.5f64.powi(k as i32))
        .collect();
    let full = extrapolation_weights(&hs);
    let fine = extrapolation_weights(&hs[1..]);
    let mut sum_full = c(0.0);
    let mut sum_fine = c(0.0);
    for &p in &near {
        let panel = &mesh.panels[p];
        let mut ladder = Vec::with_capacity(hs.len());
        for h in &hs {
            let z = node.point + node.normal * (sgn * h);
            let ints = quad.integrate::<1>(panel, &mesh.rule, &|y| {
                Ok([kernel(green, kind, &z, &node, y)?])
            })?;
            ladder.push(ints);
        }
        for j in 0..m {
            let v: C64 = (0..hs.len()).map(|k| ladder[k][j][0] * full[k]).sum();
            let w: C64 = (1..hs.len()).map(|k| ladder[k][j][0] * fine[k - 1]).sum();
            values[panel.first_node + j] = v;
            sum_full += v;
            sum_fine += w;
        }
    }
    let scale = values.iter().map(|v| v.norm()).sum::<f64>().max(1e-300);
    Ok(Row {
        values,
        discrepancy: (sum_full - sum_fine).norm() / scale,
    })
}

fn assemble(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    kind: Kind,
    sgn: f64,
    tag: OpTag,
    opts: &TraceOptions,
) -> Result<BoundaryOperator> {
    if mesh.panels.len() < 8 {
        return Err(Error::Geometry(format!(
            "trace assembly needs at least 8 panels, got {}",
            mesh.panels.len()
        )));
    }
    let quad = NearQuadrature::with_tol(opts.quad_tol.max(green.tolerance()));
    let rows: Vec<Row> = (0..mesh.len())
        .into_par_iter()
        .map(|i| assemble_row(green, mesh, kind, sgn, i, opts, &quad))
        .collect::<Result<_>>()?;
    let n = mesh.len();
    let mut tolerance: f64 = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if r.discrepancy > opts.max_discrepancy {
            return Err(Error::Extrapolation {
                node: i,
                discrepancy: r.discrepancy,
            });
        }
        tolerance = tolerance.max(r.discrepancy);
    }
    let mut matrix = DMatrix::from_fn(n, n, |i, j| rows[i].values[j]);
    let limit_offsets = (0..n).map(|i| ladder_start(mesh, i, opts)).collect();
    if opts.enforce_constants && mesh.closed {
        enforce_constants(&mut matrix, mesh, tag);
    }
    Ok(BoundaryOperator {
        matrix,
        tag,
        mesh: mesh.clone(),
        limit_offsets,
        tolerance,
    })
}

/// `K_+ 1 = 1` and `K_- 1 = 0` through the diagonal. For the transposes the
/// dual identities `sum_i w_i (K^t_+ g)_i = sum_i w_i g_i` and
/// `sum_i w_i (K^t_- g)_i = 0` are imposed by a rank-one update with a
/// constant left factor, which leaves smooth data almost untouched.
fn enforce_constants(matrix: &mut DMatrix<C64>, mesh: &QuadratureMesh, tag: OpTag) {
    let n = mesh.len();
    let w = &mesh.weights;
    match tag {
        OpTag::Kplus | OpTag::Kminus => {
            let target = if tag == OpTag::Kplus { 1.0 } else { 0.0 };
            for i in 0..n {
                let s: C64 = matrix.row(i).iter().sum();
                matrix[(i, i)] += c(target) - s;
            }
        }
        OpTag::KtPlus | OpTag::KtMinus => {
            let target = if tag == OpTag::KtPlus { 1.0 } else { 0.0 };
            let total: f64 = w.iter().sum();
            let defect: Vec<C64> = (0..n)
                .map(|j| {
                    (c(target * w[j]) - (0..n).map(|i| matrix[(i, j)] * w[i]).sum::<C64>()) / total
                })
                .collect();
            for i in 0..n {
                for j in 0..n {
                    matrix[(i, j)] += defect[j];
                }
            }
        }
        _ => {}
    }
}

/// Nontangential trace of the double layer from the given side.
#[allow(non_snake_case)]
pub fn assemble_K(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    side: Side,
) -> Result<BoundaryOperator> {
    assemble_K_with(green, mesh, side, &TraceOptions::default())
}

#[allow(non_snake_case)]
pub fn assemble_K_with(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    side: Side,
    opts: &TraceOptions,
) -> Result<BoundaryOperator> {
    match side {
        Side::Plus => assemble(green, mesh, Kind::Double, -1.0, OpTag::Kplus, opts),
        Side::Minus => assemble(green, mesh, Kind::Double, 1.0, OpTag::Kminus, opts),
    }
}

/// `K^t_+` is the limit from the complement, `K^t_-` from the domain.
#[allow(non_snake_case)]
pub fn assemble_Kt(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    side: Side,
) -> Result<BoundaryOperator> {
    assemble_Kt_with(green, mesh, side, &TraceOptions::default())
}

#[allow(non_snake_case)]
pub fn assemble_Kt_with(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    side: Side,
    opts: &TraceOptions,
) -> Result<BoundaryOperator> {
    match side {
        Side::Plus => assemble(green, mesh, Kind::FluxTranspose, 1.0, OpTag::KtPlus, opts),
        Side::Minus => assemble(green, mesh, Kind::FluxTranspose, -1.0, OpTag::KtMinus, opts),
    }
}

/// Tangential derivative of the single layer; `from` selects the side the
/// limit is taken from.
#[allow(non_snake_case)]
pub fn assemble_Lt(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
) -> Result<BoundaryOperator> {
    assemble_Lt_with(green, mesh, Side::Plus, &TraceOptions::default())
}

#[allow(non_snake_case)]
pub fn assemble_Lt_with(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    from: Side,
    opts: &TraceOptions,
) -> Result<BoundaryOperator> {
    let sgn = if from == Side::Plus { -1.0 } else { 1.0 };
    assemble(green, mesh, Kind::Tangential, sgn, OpTag::Lt, opts)
}

/// Boundary traces of the single layer `S` of the field itself.
pub fn assemble_single_trace(
    green: &dyn GreenFunction,
    mesh: &Arc<QuadratureMesh>,
    tag: OpTag,
    opts: &TraceOptions,
) -> Result<BoundaryOperator> {
    match tag {
        OpTag::SingleValue => assemble(green, mesh, Kind::SingleValue, -1.0, tag, opts),
        OpTag::SingleFluxPlus => assemble(green, mesh, Kind::SingleFlux, -1.0, tag, opts),
        OpTag::SingleFluxMinus => assemble(green, mesh, Kind::SingleFlux, 1.0, tag, opts),
        OpTag::SingleTangential => assemble(green, mesh, Kind::SingleTangential, -1.0, tag, opts),
        _ => Err(Error::Dimension(format!(
            "{tag:?} is not a single-layer trace"
        ))),
    }
}
