//! Elementary boundary pieces: straight segments and circular arcs.

use crate::linalg::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Segment {
        a: Point,
        b: Point,
    },
    /// Counter-clockwise when `theta1 > theta0`, clockwise otherwise.
    Arc {
        center: Point,
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
}

impl Curve {
    /// Point at parameter `u` in `[0, 1]`.
    pub fn point(&self, u: f64) -> Point {
        match *self {
            Curve::Segment { a, b } => a + (b - a) * u,
            Curve::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let th = theta0 + (theta1 - theta0) * u;
                center + Point::new(th.cos(), th.sin()) * radius
            }
        }
    }

    /// Unit tangent in the direction of increasing `u`.
    pub fn tangent(&self, u: f64) -> Point {
        match *self {
            Curve::Segment { a, b } => (b - a).normalize(),
            Curve::Arc { theta0, theta1, .. } => {
                let th = theta0 + (theta1 - theta0) * u;
                Point::new(-th.sin(), th.cos()) * (theta1 - theta0).signum()
            }
        }
    }

    /// Arclength per unit parameter (constant for both kinds).
    pub fn speed(&self) -> f64 {
        self.length()
    }

    pub fn length(&self) -> f64 {
        match *self {
            Curve::Segment { a, b } => (b - a).norm(),
            Curve::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius * (theta1 - theta0).abs(),
        }
    }

    /// The sub-curve between parameters `u0 < u1`.
    pub fn sub(&self, u0: f64, u1: f64) -> Curve {
        match *self {
            Curve::Segment { .. } => Curve::Segment {
                a: self.point(u0),
                b: self.point(u1),
            },
            Curve::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Curve::Arc {
                center,
                radius,
                theta0: theta0 + (theta1 - theta0) * u0,
                theta1: theta0 + (theta1 - theta0) * u1,
            },
        }
    }

    /// Distance from `p` to the curve and the parameter of the closest point.
    pub fn distance(&self, p: &Point) -> (f64, f64) {
        match *self {
            Curve::Segment { a, b } => {
                let d = b - a;
                let l2 = d.norm_squared();
                let u = if l2 > 0.0 {
                    ((p - a).dot(&d) / l2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                ((p - (a + d * u)).norm(), u)
            }
            Curve::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let q = p - center;
                let mut best = ((p - self.point(0.0)).norm(), 0.0);
                let end = (p - self.point(1.0)).norm();
                if end < best.0 {
                    best = (end, 1.0);
                }
                if q.norm() > 0.0 {
                    let th = q.y.atan2(q.x);
                    let span = theta1 - theta0;
                    let tau = std::f64::consts::TAU;
                    // Parameter of the angular projection, unwrapped onto the arc.
                    let mut rel = (th - theta0) * span.signum();
                    rel = rel.rem_euclid(tau);
                    let u = rel / span.abs();
                    if u <= 1.0 {
                        let d = (q.norm() - radius).abs();
                        if d < best.0 {
                            best = (d, u);
                        }
                    }
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_distance_and_tangent() {
        let arc = Curve::Arc {
            center: Point::zeros(),
            radius: 1.0,
            theta0: 0.0,
            theta1: std::f64::consts::PI,
        };
        let (d, u) = arc.distance(&Point::new(0.0, 2.0));
        assert!((d - 1.0).abs() < 1e-14 && (u - 0.5).abs() < 1e-14);
        let (d, u) = arc.distance(&Point::new(0.5, -1.0));
        assert!((d - (0.25f64 + 1.0).sqrt()).abs() < 1e-14 && u == 0.0);
        let t = arc.tangent(0.5);
        assert!((t - Point::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((arc.length() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn segment_distance_clamps() {
        let s = Curve::Segment {
            a: Point::new(0.0, 0.0),
            b: Point::new(1.0, 0.0),
        };
        assert_eq!(s.distance(&Point::new(2.0, 0.0)), (1.0, 1.0));
        assert_eq!(s.distance(&Point::new(0.5, 3.0)), (3.0, 0.5));
    }
}
