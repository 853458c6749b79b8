//! Lipschitz domains, boundary quadrature meshes and nontangential cones.
//!
//! Every boundary is stored as an ordered chain of [`Curve`] pieces traversed
//! with the domain on the left. With `tau` the traversal direction the outward
//! normal is `nu = (tau_y, -tau_x)`, so that `tau = rot90(nu)`.

mod cone;
mod curve;
mod mesh;

pub use cone::{cone_points, ConeSampler};
pub use curve::Curve;
pub use mesh::{make_mesh, make_mesh_with_order, Panel, QuadratureMesh};

use crate::error::{Error, Result};
use crate::linalg::Point;
use serde::{Deserialize, Serialize};

/// Turning angle (radians) above which a vertex counts as a corner for
/// grading and metadata.
pub const CORNER_ANGLE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    SpecialGraph,
    ClosedCurve,
}

/// A vertex between two consecutive pieces whose turning angle exceeds
/// [`CORNER_ANGLE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub point: Point,
    /// Signed turning angle; negative for reentrant corners of a closed curve.
    pub turning: f64,
    /// Index of the piece that starts at this vertex.
    pub piece: usize,
}

impl Corner {
    pub fn reentrant(&self) -> bool {
        self.turning < 0.0
    }
}

#[derive(Debug, Clone)]
pub struct DomainGeometry {
    pub kind: DomainKind,
    /// Graph direction (special graphs); `(0,1)` for closed curves.
    pub e: Point,
    /// Graph samples `(x, phi(x))` (special graphs only).
    pub phi: Option<(Vec<f64>, Vec<f64>)>,
    pub lipschitz_k1: f64,
    pub truncation: f64,
    pub pieces: Vec<Curve>,
    pub corners: Vec<Corner>,
}

fn e_perp(e: &Point) -> Point {
    Point::new(e.y, -e.x)
}

impl DomainGeometry {
    pub fn is_closed(&self) -> bool {
        self.kind == DomainKind::ClosedCurve
    }

    pub fn perimeter(&self) -> f64 {
        self.pieces.iter().map(Curve::length).sum()
    }

    /// Piecewise-linear graph height, extended by constants outside the samples.
    pub fn phi_at(&self, x: f64) -> f64 {
        let (xs, ys) = self
            .phi
            .as_ref()
            .expect("phi is only defined on special graphs");
        interp_linear(xs, ys, x)
    }

    /// Brute-force distance to the (truncated) boundary.
    pub fn distance(&self, p: &Point) -> f64 {
        self.pieces
            .iter()
            .map(|c| c.distance(p).0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `p` lies in the open domain.
    pub fn contains(&self, p: &Point) -> bool {
        match self.kind {
            DomainKind::SpecialGraph => {
                let x = p.dot(&e_perp(&self.e));
                p.dot(&self.e) > self.phi_at(x)
            }
            DomainKind::ClosedCurve => self.winding(p).abs() > 0.5,
        }
    }

    /// Winding number of the closed boundary around `p`.
    ///
    /// Each piece contributes the angle its chord subtends at `p`. An arc
    /// adds a full turn when `p` lies in the region between the arc and its
    /// chord, which is exactly when the two are not homotopic in the
    /// punctured plane.
    fn winding(&self, p: &Point) -> f64 {
        let angle = |a: Point, b: Point| (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
        let mut total = 0.0;
        for c in &self.pieces {
            let a = c.point(0.0);
            let b = c.point(1.0);
            total += angle(a - p, b - p);
            if let Curve::Arc { center, radius, theta0, theta1 } = *c {
                if (p - center).norm() >= radius {
                    continue;
                }
                let sweep = theta1 - theta0;
                let chord = b - a;
                let inside = if chord.norm() <= 1e-14 * radius {
                    true
                } else {
                    let mid = c.point(0.5);
                    let side = |q: Point| chord.x * (q.y - a.y) - chord.y * (q.x - a.x);
                    side(*p) * side(mid) > 0.0
                };
                if inside {
                    total += std::f64::consts::TAU * sweep.signum();
                }
            }
        }
        total / std::f64::consts::TAU
    }

    /// Distance from `p` to the nearest corner (infinite if there is none).
    pub fn corner_distance(&self, p: &Point) -> f64 {
        self.corners
            .iter()
            .map(|c| (c.point - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Ahlfors-David ratio `sup sigma(B(X,r) cap boundary) / r` over the
    /// supplied centres and radii, with the boundary measure resolved by
    /// fine subsampling of each piece.
    pub fn ahlfors_david(&self, centers: &[Point], radii: &[f64]) -> f64 {
        let mut best: f64 = 0.0;
        for c in centers {
            for &r in radii {
                let mut len = 0.0;
                for piece in &self.pieces {
                    let n = ((piece.length() / r) * 64.0).ceil().clamp(16.0, 1.0e5) as usize;
                    let dl = piece.length() / n as f64;
                    len += (0..n)
                        .filter(|k| (piece.point((*k as f64 + 0.5) / n as f64) - c).norm() < r)
                        .count() as f64
                        * dl;
                }
                best = best.max(len / r);
            }
        }
        best
    }
}

pub fn interp_linear_pub(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    interp_linear(xs, ys, x)
}

pub(crate) fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|v| *v <= x).min(xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// Build the special Lipschitz domain above the graph of `phi` in direction
/// `e`, truncated to the parameter window `[-truncation, truncation]`.
pub fn build_special_domain(
    xs: &[f64],
    ys: &[f64],
    e: Point,
    truncation: f64,
) -> Result<DomainGeometry> {
    if !(truncation > 0.0) || !truncation.is_finite() {
        return Err(Error::Geometry(format!(
            "truncation must be positive, got {truncation}"
        )));
    }
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Geometry(
            "phi needs at least two samples with matching x and y".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Geometry("non-finite phi samples".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Geometry(
            "phi sample abscissae must be strictly increasing".into(),
        ));
    }
    if (e.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Geometry(format!(
            "e must be a unit vector, |e| = {}",
            e.norm()
        )));
    }
    let k1 = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
        .fold(0.0, f64::max);

    // Window samples: interior sample points plus the two truncation ends.
    let mut wx = vec![-truncation];
    wx.extend(xs.iter().copied().filter(|x| x.abs() < truncation));
    wx.push(truncation);
    let wy: Vec<f64> = wx.iter().map(|x| interp_linear(xs, ys, *x)).collect();

    let ep = e_perp(&e);
    let psi = |x: f64, y: f64| ep * x + e * y;
    // Merge collinear runs so that every piece is a maximal straight segment.
    let mut verts = vec![0usize];
    for k in 1..wx.len() - 1 {
        let s0 = (wy[k] - wy[k - 1]) / (wx[k] - wx[k - 1]);
        let s1 = (wy[k + 1] - wy[k]) / (wx[k + 1] - wx[k]);
        if (s1 - s0).abs() > 1e-12 * (1.0 + s0.abs()) {
            verts.push(k);
        }
    }
    verts.push(wx.len() - 1);
    let pieces: Vec<Curve> = verts
        .windows(2)
        .map(|v| Curve::Segment {
            a: psi(wx[v[0]], wy[v[0]]),
            b: psi(wx[v[1]], wy[v[1]]),
        })
        .collect();
    let corners = find_corners(&pieces, false);
    Ok(DomainGeometry {
        kind: DomainKind::SpecialGraph,
        e,
        phi: Some((xs.to_vec(), ys.to_vec())),
        lipschitz_k1: k1,
        truncation,
        pieces,
        corners,
    })
}

/// Build a bounded domain from polygon vertices; the orientation is fixed to
/// counter-clockwise.
pub fn build_closed_curve(vertices: &[Point]) -> Result<DomainGeometry> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::Geometry(format!(
            "a closed curve needs at least 3 vertices, got {n}"
        )));
    }
    if vertices
        .iter()
        .any(|v| !v.x.is_finite() || !v.y.is_finite())
    {
        return Err(Error::Geometry("non-finite vertex".into()));
    }
    let mut v = vertices.to_vec();
    let area: f64 = (0..n)
        .map(|i| v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y)
        .sum();
    if area.abs() < 1e-14 {
        return Err(Error::Geometry("polygon has zero area".into()));
    }
    if area < 0.0 {
        v.reverse();
    }
    for i in 0..n {
        if (v[(i + 1) % n] - v[i]).norm() == 0.0 {
            return Err(Error::Geometry(format!("repeated vertex at index {i}")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(Error::Geometry(format!(
                    "self-intersection between edges {i} and {j}"
                )));
            }
        }
    }
    let pieces: Vec<Curve> = (0..n)
        .map(|i| Curve::Segment {
            a: v[i],
            b: v[(i + 1) % n],
        })
        .collect();
    let k1 = edge_slope_proxy(&pieces);
    let corners = find_corners(&pieces, true);
    Ok(DomainGeometry {
        kind: DomainKind::ClosedCurve,
        e: Point::new(0.0, 1.0),
        phi: None,
        lipschitz_k1: k1,
        truncation: f64::INFINITY,
        pieces,
        corners,
    })
}

/// A smooth circle, represented exactly by one arc piece.
pub fn build_circle(center: Point, radius: f64) -> Result<DomainGeometry> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Geometry(format!(
            "circle radius must be positive, got {radius}"
        )));
    }
    Ok(DomainGeometry {
        kind: DomainKind::ClosedCurve,
        e: Point::new(0.0, 1.0),
        phi: None,
        lipschitz_k1: 0.0,
        truncation: f64::INFINITY,
        pieces: vec![Curve::Arc {
            center,
            radius,
            theta0: 0.0,
            theta1: std::f64::consts::TAU,
        }],
        corners: vec![],
    })
}

/// Maximum turning angle between consecutive edges, expressed as a slope.
fn edge_slope_proxy(pieces: &[Curve]) -> f64 {
    let n = pieces.len();
    (0..n)
        .map(|i| {
            let t0 = pieces[i].tangent(1.0);
            let t1 = pieces[(i + 1) % n].tangent(0.0);
            (t0.x * t1.y - t0.y * t1.x)
                .atan2(t0.dot(&t1))
                .abs()
                .tan()
                .abs()
        })
        .fold(0.0, f64::max)
}

fn find_corners(pieces: &[Curve], closed: bool) -> Vec<Corner> {
    let n = pieces.len();
    let start = if closed { 0 } else { 1 };
    (start..n)
        .filter_map(|i| {
            let prev = if i == 0 { n - 1 } else { i - 1 };
            let t0 = pieces[prev].tangent(1.0);
            let t1 = pieces[i].tangent(0.0);
            let turning = (t0.x * t1.y - t0.y * t1.x).atan2(t0.dot(&t1));
            (turning.abs() > CORNER_ANGLE).then(|| Corner {
                point: pieces[i].point(0.0),
                turning,
                piece: i,
            })
        })
        .collect()
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let cross = |o: Point, a: Point, b: Point| (a - o).x * (b - o).y - (a - o).y * (b - o).x;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0) != (d2 > 0.0))
        && ((d3 > 0.0) != (d4 > 0.0))
        && d1 != 0.0
        && d2 != 0.0
        && d3 != 0.0
        && d4 != 0.0
}

/// JSON form of a geometry document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GeometrySpec {
    Special {
        #[serde(default = "default_e")]
        e: [f64; 2],
        phi: PhiSamples,
        truncation: f64,
    },
    Closed {
        #[serde(default)]
        vertices: Vec<[f64; 2]>,
        /// Optional smooth circle `{center, radius}` used instead of vertices.
        #[serde(default)]
        circle: Option<CircleSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiSamples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

fn default_e() -> [f64; 2] {
    [0.0, 1.0]
}

impl GeometrySpec {
    pub fn build(&self) -> Result<DomainGeometry> {
        match self {
            GeometrySpec::Special { e, phi, truncation } => {
                build_special_domain(&phi.x, &phi.y, Point::new(e[0], e[1]), *truncation)
            }
            GeometrySpec::Closed { vertices, circle } => match circle {
                Some(c) => build_circle(Point::new(c.center[0], c.center[1]), c.radius),
                None => build_closed_curve(
                    &vertices
                        .iter()
                        .map(|v| Point::new(v[0], v[1]))
                        .collect::<Vec<_>>(),
                ),
            },
        }
    }
}
