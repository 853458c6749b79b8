//! Carleson functional `(1 / sigma(B cap bdry)) int_{B cap V} |grad u|^2 dist(., bdry) dX`.
//!
//! The ball is integrated in polar coordinates about its centre. For each
//! radius the arcs lying in the domain (and outside the collar
//! `dist < h_min`) are located by a scan followed by bisection, then
//! integrated by Gauss-Legendre, so that the integrand is smooth on every
//! cell.

use crate::error::Result;
use crate::geometry::{Curve, DomainGeometry};
use crate::linalg::Point;
use crate::potentials::InteriorField;
use crate::quadrature::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarlesonOptions {
    /// Width of the excluded boundary collar.
    pub h_min: f64,
    pub radial_panels: usize,
    pub order: usize,
    /// Number of angles scanned for domain membership on each circle.
    pub scan: usize,
}

impl Default for CarlesonOptions {
    fn default() -> Self {
        Self { h_min: 0.0, radial_panels: 8, order: 16, scan: 256 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarlesonSample {
    pub center: [f64; 2],
    pub radius: f64,
    pub sigma: f64,
    pub value: f64,
    /// `max |grad u|^2 h_min^2 / 2` on the collar edge: the size of the
    /// excluded contribution per unit boundary length.
    pub collar_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub samples: Vec<CarlesonSample>,
    pub sup: f64,
}

/// Length of the boundary inside the open ball `B(c, r)`.
pub fn boundary_measure_in_ball(geom: &DomainGeometry, c: &Point, r: f64) -> f64 {
    geom.pieces.iter().map(|p| piece_measure(p, c, r)).sum()
}

fn piece_measure(piece: &Curve, c: &Point, r: f64) -> f64 {
    match *piece {
        Curve::Segment { a, b } => {
            let d = b - a;
            let f = a - c;
            let qa = d.dot(&d);
            let qb = 2.0 * f.dot(&d);
            let qc = f.dot(&f) - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                return 0.0;
            }
            let s = disc.sqrt();
            let u0 = ((-qb - s) / (2.0 * qa)).max(0.0);
            let u1 = ((-qb + s) / (2.0 * qa)).min(1.0);
            (u1 - u0).max(0.0) * qa.sqrt()
        }
        Curve::Arc { center, radius, theta0, theta1 } => {
            let (lo, hi) = if theta1 >= theta0 { (theta0, theta1) } else { (theta1, theta0) };
            let v = c - center;
            let d = v.norm();
            let span = if d == 0.0 {
                if radius < r {
                    hi - lo
                } else {
                    0.0
                }
            } else {
                let kappa = (radius * radius + d * d - r * r) / (2.0 * radius * d);
                if kappa <= -1.0 {
                    hi - lo
                } else if kappa >= 1.0 {
                    0.0
                } else {
                    let alpha = kappa.acos();
                    let phi = v.y.atan2(v.x);
                    // Intersect [lo, hi] with every 2 pi shift of [phi - alpha, phi + alpha].
                    let k0 = ((lo - phi - alpha) / TAU).floor() as i64;
                    let k1 = ((hi - phi + alpha) / TAU).ceil() as i64;
                    (k0..=k1)
                        .map(|k| {
                            let a = phi - alpha + TAU * k as f64;
                            let b = phi + alpha + TAU * k as f64;
                            (b.min(hi) - a.max(lo)).max(0.0)
                        })
                        .sum()
                }
            };
            span * radius
        }
    }
}

/// Angular intervals of the circle `|X - c| = r` inside the region.
fn angular_intervals(inside: &dyn Fn(&Point) -> bool, c: &Point, r: f64, scan: usize) -> Vec<(f64, f64)> {
    let at = |th: f64| c + Point::new(th.cos(), th.sin()) * r;
    let flags: Vec<bool> = (0..scan).map(|k| inside(&at(TAU * k as f64 / scan as f64))).collect();
    if flags.iter().all(|f| *f) {
        return vec![(0.0, TAU)];
    }
    if flags.iter().all(|f| !*f) {
        return vec![];
    }
    let refine = |mut a: f64, mut b: f64, a_in: bool| {
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if inside(&at(m)) == a_in {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    // Start the sweep at an outside angle so that intervals do not wrap.
    let start = flags.iter().position(|f| !*f).unwrap();
    let mut out = Vec::new();
    let mut open: Option<f64> = None;
    for step in 0..scan {
        let k = start + step;
        let (t0, t1) = (TAU * k as f64 / scan as f64, TAU * (k + 1) as f64 / scan as f64);
        let (f0, f1) = (flags[k % scan], flags[(k + 1) % scan]);
        if !f0 && f1 {
            open = Some(refine(t0, t1, false));
        } else if f0 && !f1 {
            let close = refine(t0, t1, true);
            out.push((open.take().expect("interval opened before closing"), close));
        }
    }
    out
}

fn grad_sq(field: &InteriorField, p: &Point) -> Result<f64> {
    Ok(field.evaluate(p)?.1.iter().map(|z| z.norm_sqr()).sum())
}

fn one_ball(field: &InteriorField, geom: &DomainGeometry, c: &Point, r: f64, opts: &CarlesonOptions) -> Result<CarlesonSample> {
    let rule = GaussLegendre::new(opts.order);
    let inside = |p: &Point| geom.contains(p) && geom.distance(p) >= opts.h_min;
    let radial: Vec<(f64, f64)> = (0..opts.radial_panels)
        .flat_map(|k| {
            let a = r * k as f64 / opts.radial_panels as f64;
            let b = r * (k + 1) as f64 / opts.radial_panels as f64;
            rule.mapped(a, b).collect::<Vec<_>>()
        })
        .collect();
    let parts: Vec<(f64, f64)> = radial
        .par_iter()
        .map(|&(rho, wr)| {
            let mut acc = 0.0;
            let mut edge: f64 = 0.0;
            for (a, b) in angular_intervals(&inside, c, rho, opts.scan) {
                for (th, wt) in rule.mapped(a, b) {
                    let p = c + Point::new(th.cos(), th.sin()) * rho;
                    acc += grad_sq(field, &p)? * geom.distance(&p) * wt;
                }
                if opts.h_min > 0.0 && b - a < TAU {
                    for th in [a, b] {
                        edge = edge.max(grad_sq(field, &(c + Point::new(th.cos(), th.sin()) * rho))?);
                    }
                }
            }
            Ok((acc * rho * wr, edge))
        })
        .collect::<Result<_>>()?;
    let integral: f64 = parts.iter().map(|p| p.0).sum();
    let edge = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let sigma = boundary_measure_in_ball(geom, c, r);
    let value = if sigma > 0.0 { integral / sigma } else { integral / (PI * r) };
    Ok(CarlesonSample { center: [c.x, c.y], radius: r, sigma, value, collar_bound: 0.5 * edge * opts.h_min * opts.h_min })
}

/// The functional over every (centre, radius) pair, and its supremum.
pub fn carleson_functional(
    field: &InteriorField,
    geom: &DomainGeometry,
    radii: &[f64],
    centers: &[Point],
    opts: &CarlesonOptions,
) -> Result<CarlesonReport> {
    let mut samples = Vec::new();
    for c in centers {
        for &r in radii {
            samples.push(one_ball(field, geom, c, r, opts)?);
        }
    }
    let sup = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    Ok(CarlesonReport { samples, sup })
}
