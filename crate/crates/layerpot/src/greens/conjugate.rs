//! Pole gradient of the conjugate kernel by integration along a ray.
//!
//! With `grad_Z Gamma~_X(Z) = rot90 A(Z) grad_Z Gamma_X(Z)` and `Gamma~`
//! normalised at infinity along the ray `Z = Y + s d`,
//! `grad_X Gamma~_X(Y) = -int_0^inf grad_X [rot90 A(Z) grad_Z Gamma_X(Z)] . d ds`.
//! The mixed second derivatives come from a fourth-order difference of the
//! pole gradient in `Z`.

use super::GreenFunction;
use crate::error::{Error, Result};
use crate::linalg::{c, crot90, CVec2, Point};
use crate::quadrature::GaussLegendre;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathOptions {
    /// Ray direction; defaults to pointing away from the pole.
    pub direction: Option<[f64; 2]>,
    pub panels: usize,
    pub order: usize,
    /// Difference step relative to `|Z - X|`.
    pub fd_step: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            direction: None,
            panels: 24,
            order: 16,
            fd_step: 2e-3,
        }
    }
}

pub fn conjugate_green_gradient(
    green: &dyn GreenFunction,
    pole: &Point,
    point: &Point,
    opts: &PathOptions,
) -> Result<CVec2> {
    let r0 = (point - pole).norm();
    if r0 == 0.0 {
        return Err(Error::CoincidentPoints {
            x: pole.x,
            y: pole.y,
        });
    }
    let d = match opts.direction {
        Some([a, b]) => Point::new(a, b).normalize(),
        None => (point - pole) / r0,
    };
    // The ray must stay away from the pole.
    let closest = (pole - point).dot(&d).max(0.0);
    if (point + d * closest - pole).norm() < 0.05 * r0 {
        return Err(Error::Path("ray passes too close to the pole".into()));
    }
    let rule = GaussLegendre::new(opts.order);
    let field = green.field();
    let mixed = |z: &Point| -> Result<[CVec2; 2]> {
        // rows: d/dX_i of grad_Z Gamma, as vectors over j.
        let h = opts.fd_step * (z - pole).norm();
        let mut m = [CVec2::zeros(); 2];
        for j in 0..2 {
            let mut e = Point::zeros();
            e[j] = h;
            let gp = |k: f64| green.eval(pole, &(z + e * k)).map(|s| s.grad_pole);
            let diff = (gp(-2.0)? - gp(2.0)? + (gp(1.0)? - gp(-1.0)?) * c(8.0)) / c(12.0 * h);
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = diff[i];
            }
        }
        Ok(m)
    };
    let mut acc = CVec2::zeros();
    let n = opts.panels as f64;
    for p in 0..opts.panels {
        for (u, w) in rule.mapped(p as f64 / n, (p + 1) as f64 / n) {
            let s = r0 * u / (1.0 - u);
            let ds = r0 / ((1.0 - u) * (1.0 - u));
            let z = point + d * s;
            let a = field.at(z.x);
            let m = mixed(&z)?;
            for i in 0..2 {
                let v = crot90(&(a * m[i]));
                acc[i] -= (v.x * d.x + v.y * d.y) * (w * ds);
            }
        }
    }
    Ok(acc)
}
