//! Conjugate solutions `u~` with `grad u~ = rot90 A grad u`, built by
//! integrating along straight segments from an interior anchor.

use super::Solution;
use crate::error::{Error, Result};
use crate::geometry::DomainGeometry;
use crate::linalg::{bdot, c, crot90, cvec, Point, C64};
use crate::potentials::InteriorField;
use crate::quadrature::GaussLegendre;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Loop integrals above this multiple of `2 pi r max |A grad u|` are refused.
pub const LOOP_TOL: f64 = 1e-6;
const LOOP_POINTS: usize = 64;
const SEGMENT_PIECES: usize = 8;
const SEGMENT_ORDER: usize = 16;
const PATH_CHECKS: usize = 64;

#[derive(Debug, Clone)]
pub struct ConjugateField {
    pub field: InteriorField,
    /// `u~` vanishes here.
    pub anchor: Point,
    /// Relative flux of `A grad u` through a circle around the anchor.
    pub loop_residual: f64,
}

impl ConjugateField {
    pub fn evaluate(&self, x: &Point) -> Result<(C64, crate::CVec2)> {
        self.field.evaluate(x)
    }
}

/// Interior points well away from the boundary, deepest first.
fn interior_candidates(sol: &Solution) -> Vec<Point> {
    let geom = &sol.setup.geometry;
    let mesh = &sol.setup.mesh;
    let mut pts = Vec::new();
    if mesh.closed {
        let n = mesh.len() as f64;
        pts.push(mesh.nodes.iter().fold(Point::zeros(), |a, p| a + p) / n);
    }
    let step = (mesh.len() / 32).max(1);
    for i in (0..mesh.len()).step_by(step) {
        for depth in [0.25, 0.5, 1.0] {
            let len = mesh.local_length(i) * 4.0;
            pts.push(mesh.nodes[i] - mesh.normals[i] * (depth * len));
        }
    }
    let mut scored: Vec<(f64, Point)> = pts
        .into_iter()
        .filter(|p| geom.contains(p))
        .map(|p| (geom.distance(&p), p))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.into_iter().map(|(_, p)| p).collect()
}

fn segment_inside(geom: &DomainGeometry, a: &Point, b: &Point) -> bool {
    (0..=PATH_CHECKS).all(|k| {
        let p = a + (b - a) * (k as f64 / PATH_CHECKS as f64);
        geom.contains(&p) && geom.distance(&p) > 0.0
    })
}

/// `int_a^b rot90(A grad u) . dl` by composite Gauss-Legendre.
fn segment_integral(sol: &Solution, rule: &GaussLegendre, a: &Point, b: &Point) -> Result<C64> {
    let field = sol.setup.green.field();
    let d = b - a;
    let mut acc = c(0.0);
    for piece in 0..SEGMENT_PIECES {
        let s0 = piece as f64 / SEGMENT_PIECES as f64;
        let s1 = (piece + 1) as f64 / SEGMENT_PIECES as f64;
        for (s, w) in rule.mapped(s0, s1) {
            let p = a + d * s;
            let (_, g) = sol.evaluate(&p)?;
            acc += bdot(&crot90(&(field.at(p.x) * g)), &cvec(&d)) * w;
        }
    }
    Ok(acc)
}

fn loop_residual(sol: &Solution, anchor: &Point, radius: f64) -> Result<f64> {
    let field = sol.setup.green.field();
    let mut flux = c(0.0);
    let mut size: f64 = 0.0;
    for k in 0..LOOP_POINTS {
        let th = TAU * k as f64 / LOOP_POINTS as f64;
        let n = Point::new(th.cos(), th.sin());
        let p = anchor + n * radius;
        let (_, g) = sol.evaluate(&p)?;
        let ag = field.at(p.x) * g;
        size = size.max(ag.iter().map(|z| z.norm()).fold(0.0, f64::max));
        flux += bdot(&cvec(&n), &ag) * (TAU * radius / LOOP_POINTS as f64);
    }
    Ok(if size > 0.0 {
        flux.norm() / (TAU * radius * size)
    } else {
        0.0
    })
}

/// The conjugate of a solution, zero at `anchor` (by default the deepest
/// interior candidate point).
pub fn conjugate_solution(sol: &Solution, anchor: Option<Point>) -> Result<ConjugateField> {
    let geom = sol.setup.geometry.clone();
    let candidates = interior_candidates(sol);
    let anchor = match anchor {
        Some(a) if geom.contains(&a) => a,
        Some(a) => {
            return Err(Error::Path(format!(
                "anchor ({}, {}) is outside the domain",
                a.x, a.y
            )))
        }
        None => *candidates
            .first()
            .ok_or_else(|| Error::Path("no interior anchor found".into()))?,
    };
    let loop_residual = loop_residual(sol, &anchor, 0.5 * geom.distance(&anchor))?;
    if loop_residual > LOOP_TOL {
        return Err(Error::Path(format!(
            "conormal flux {loop_residual:e} around the anchor; the conjugate is not single valued"
        )));
    }
    let waypoints: Vec<Point> = candidates
        .into_iter()
        .filter(|w| segment_inside(&geom, &anchor, w))
        .collect();
    let rule = Arc::new(GaussLegendre::new(SEGMENT_ORDER));
    let base = sol.clone();
    let field = InteriorField::new("conjugate", move |x| {
        let a = base.setup.green.field().at(x.x);
        let (_, g) = base.evaluate(x)?;
        let grad = crot90(&(a * g));
        let value = if segment_inside(&geom, &anchor, x) {
            segment_integral(&base, &rule, &anchor, x)?
        } else {
            let w = waypoints
                .iter()
                .find(|w| segment_inside(&geom, w, x))
                .ok_or_else(|| Error::Path(format!("no polygonal path to ({}, {})", x.x, x.y)))?;
            segment_integral(&base, &rule, &anchor, w)? + segment_integral(&base, &rule, w, x)?
        };
        Ok((value, grad))
    });
    Ok(ConjugateField {
        field,
        anchor,
        loop_residual,
    })
}
