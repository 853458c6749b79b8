//! Composite Gauss-Legendre panel meshes graded toward corners.

use super::{Curve, DomainGeometry};
use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::quadrature::GaussLegendre;

/// One quadrature panel: a sub-curve carrying `order` Gauss nodes.
#[derive(Debug, Clone)]
pub struct Panel {
    pub curve: Curve,
    /// Index of the first node of this panel in the mesh arrays.
    pub first_node: usize,
    /// Whether the start/end of the panel is a boundary corner.
    pub corner_start: bool,
    pub corner_end: bool,
    /// Whether an adjacent corner is reentrant (interior angle above pi).
    pub reentrant: bool,
}

impl Panel {
    /// Point at local parameter `s` in `[-1, 1]`.
    pub fn point(&self, s: f64) -> Point {
        self.curve.point(0.5 * (s + 1.0))
    }

    pub fn tangent(&self, s: f64) -> Point {
        self.curve.tangent(0.5 * (s + 1.0))
    }

    pub fn normal(&self, s: f64) -> Point {
        let t = self.tangent(s);
        Point::new(t.y, -t.x)
    }

    pub fn length(&self) -> f64 {
        self.curve.length()
    }

    /// Arclength per unit of `s`.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.curve.speed()
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureMesh {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub normals: Vec<Point>,
    pub tangents: Vec<Point>,
    pub panel_index: Vec<usize>,
    pub panels: Vec<Panel>,
    pub rule: GaussLegendre,
    pub grading_exponent: f64,
    pub closed: bool,
    /// Distance from each node to the nearest corner.
    pub corner_distance: Vec<f64>,
}

impl QuadratureMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// Length of the panel carrying node `j`.
    pub fn local_length(&self, j: usize) -> f64 {
        self.panels[self.panel_index[j]].length()
    }

    /// Tangential derivative of nodal values, by differentiating the Lagrange
    /// interpolant on each panel.
    pub fn d_tau(&self, f: &[crate::C64]) -> Vec<crate::C64> {
        let d = self.rule.diff_matrix();
        let p = self.order();
        let mut out = vec![crate::C64::new(0.0, 0.0); f.len()];
        for panel in &self.panels {
            let j0 = panel.first_node;
            let inv = 1.0 / panel.jacobian();
            for i in 0..p {
                out[j0 + i] = (0..p).map(|k| f[j0 + k] * d[i][k]).sum::<crate::C64>() * inv;
            }
        }
        out
    }

    /// Dense matrix form of [`Self::d_tau`], row-major.
    pub fn d_tau_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.rule.diff_matrix();
        let n = self.len();
        let p = self.order();
        let mut m = vec![vec![0.0; n]; n];
        for panel in &self.panels {
            let j0 = panel.first_node;
            let inv = 1.0 / panel.jacobian();
            for i in 0..p {
                for k in 0..p {
                    m[j0 + i][j0 + k] = d[i][k] * inv;
                }
            }
        }
        m
    }
}

/// Panel breakpoints on `[0,1]` graded toward the flagged ends.
fn graded_breaks(m: usize, q: f64, start: bool, end: bool) -> Vec<f64> {
    (0..=m)
        .map(|k| {
            let u = k as f64 / m as f64;
            match (start, end) {
                (true, true) => {
                    let a = u.powf(q);
                    let b = (1.0 - u).powf(q);
                    a / (a + b)
                }
                (true, false) => u.powf(q),
                (false, true) => 1.0 - (1.0 - u).powf(q),
                (false, false) => u,
            }
        })
        .collect()
}

/// Split `total` panels across pieces in proportion to their lengths, with at
/// least one panel per piece.
fn allocate(lengths: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = lengths.iter().sum();
    let n = lengths.len();
    let total = total.max(n);
    let share: Vec<f64> = lengths.iter().map(|l| l / sum * total as f64).collect();
    let mut m: Vec<usize> = share.iter().map(|s| (s.floor() as usize).max(1)).collect();
    while m.iter().sum::<usize>() < total {
        let i = (0..n)
            .max_by(|&a, &b| {
                (share[a] - m[a] as f64)
                    .partial_cmp(&(share[b] - m[b] as f64))
                    .unwrap()
            })
            .unwrap();
        m[i] += 1;
    }
    while m.iter().sum::<usize>() > total {
        let i = (0..n)
            .filter(|&i| m[i] > 1)
            .min_by(|&a, &b| {
                (share[a] - m[a] as f64)
                    .partial_cmp(&(share[b] - m[b] as f64))
                    .unwrap()
            })
            .unwrap();
        m[i] -= 1;
    }
    m
}

/// Mesh with the default panel order 8.
pub fn make_mesh(
    geom: &DomainGeometry,
    n_panels: usize,
    grading_exponent: f64,
) -> Result<QuadratureMesh> {
    make_mesh_with_order(geom, n_panels, grading_exponent, 8)
}

pub fn make_mesh_with_order(
    geom: &DomainGeometry,
    n_panels: usize,
    grading_exponent: f64,
    order: usize,
) -> Result<QuadratureMesh> {
    if n_panels < 8 {
        return Err(Error::Geometry(format!(
            "need at least 8 panels, got {n_panels}"
        )));
    }
    if !(grading_exponent >= 1.0) {
        return Err(Error::Geometry(format!(
            "grading exponent must be >= 1, got {grading_exponent}"
        )));
    }
    let rule = GaussLegendre::new(order);
    let npieces = geom.pieces.len();
    let lengths: Vec<f64> = geom.pieces.iter().map(Curve::length).collect();
    let counts = allocate(&lengths, n_panels);
    let is_corner = |piece: usize| geom.corners.iter().find(|c| c.piece == piece);

    let mut mesh = QuadratureMesh {
        nodes: vec![],
        weights: vec![],
        normals: vec![],
        tangents: vec![],
        panel_index: vec![],
        panels: vec![],
        rule: rule.clone(),
        grading_exponent,
        closed: geom.is_closed(),
        corner_distance: vec![],
    };
    for (i, piece) in geom.pieces.iter().enumerate() {
        let next = if geom.is_closed() {
            (i + 1) % npieces
        } else {
            i + 1
        };
        let c_start = is_corner(i);
        let c_end = is_corner(next);
        let reentrant =
            c_start.is_some_and(|c| c.reentrant()) || c_end.is_some_and(|c| c.reentrant());
        let breaks = graded_breaks(
            counts[i],
            grading_exponent,
            c_start.is_some(),
            c_end.is_some(),
        );
        for (k, w) in breaks.windows(2).enumerate() {
            let curve = piece.sub(w[0], w[1]);
            let len = curve.length();
            if !(len > 1e-14 * lengths[i]) {
                return Err(Error::DegeneratePanel {
                    index: mesh.panels.len(),
                    length: len,
                });
            }
            let panel = Panel {
                curve,
                first_node: mesh.nodes.len(),
                corner_start: k == 0 && c_start.is_some(),
                corner_end: k + 2 == breaks.len() && c_end.is_some(),
                reentrant,
            };
            let pid = mesh.panels.len();
            for (s, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = panel.point(*s);
                mesh.nodes.push(x);
                mesh.weights.push(w * panel.jacobian());
                mesh.normals.push(panel.normal(*s));
                mesh.tangents.push(panel.tangent(*s));
                mesh.panel_index.push(pid);
                mesh.corner_distance.push(geom.corner_distance(&x));
            }
            mesh.panels.push(panel);
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_respects_total_and_minimum() {
        let m = allocate(&[1.0, 1.0, 10.0], 8);
        assert_eq!(m.iter().sum::<usize>(), 8);
        assert!(m.iter().all(|&k| k >= 1));
        assert_eq!(allocate(&[1.0; 4], 16), vec![4; 4]);
    }

    #[test]
    fn grading_is_monotone() {
        for (s, e) in [(true, true), (true, false), (false, true)] {
            let b = graded_breaks(5, 3.0, s, e);
            assert!(b.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(b[0], 0.0);
            assert!((b[5] - 1.0).abs() < 1e-15);
        }
    }
}
