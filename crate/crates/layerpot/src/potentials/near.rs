//! Adaptive quadrature of a nearly singular kernel against the Lagrange basis
//! of one panel.

use crate::error::Result;
use crate::geometry::Panel;
use crate::linalg::{Point, C64};
use crate::quadrature::GaussLegendre;

/// Boundary sample handed to kernels: position, outward normal, tangent.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySample {
    pub point: Point,
    pub normal: Point,
    pub tangent: Point,
}

pub struct NearQuadrature {
    rule: GaussLegendre,
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for NearQuadrature {
    fn default() -> Self {
        Self {
            rule: GaussLegendre::new(16),
            tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl NearQuadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Default::default()
        }
    }

    /// `out[j][q] = int_panel kernel(Y)[q] l_j(Y) dsigma(Y)` for the Lagrange
    /// basis `l_j` on the panel's nodes.
    pub fn integrate<const Q: usize>(
        &self,
        panel: &Panel,
        basis: &GaussLegendre,
        kernel: &dyn Fn(&BoundarySample) -> Result<[C64; Q]>,
    ) -> Result<Vec<[C64; Q]>> {
        let m = basis.order();
        let mut scratch = vec![0.0; m];
        let mut leaf = |a: f64, b: f64| -> Result<Vec<[C64; Q]>> {
            let mut acc = vec![[C64::new(0.0, 0.0); Q]; m];
            let half = 0.5 * (b - a);
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let s = a + half * (x + 1.0);
                let sample = BoundarySample {
                    point: panel.point(s),
                    normal: panel.normal(s),
                    tangent: panel.tangent(s),
                };
                let k = kernel(&sample)?;
                basis.lagrange_basis(s, &mut scratch);
                let jw = w * half * panel.jacobian();
                for (j, lj) in scratch.iter().enumerate() {
                    for q in 0..Q {
                        acc[j][q] += k[q] * (lj * jw);
                    }
                }
            }
            Ok(acc)
        };
        let whole = leaf(-1.0, 1.0)?;
        let scale = norm(&whole).max(1e-300);
        let mut stack = vec![(-1.0, 1.0, whole, 0usize)];
        let mut total = vec![[C64::new(0.0, 0.0); Q]; m];
        while let Some((a, b, est, depth)) = stack.pop() {
            let mid = 0.5 * (a + b);
            let left = leaf(a, mid)?;
            let right = leaf(mid, b)?;
            let mut diff = 0.0f64;
            for j in 0..m {
                for q in 0..Q {
                    diff = diff.max((left[j][q] + right[j][q] - est[j][q]).norm());
                }
            }
            if diff <= self.tol * scale || depth >= self.max_depth {
                for j in 0..m {
                    for q in 0..Q {
                        total[j][q] += left[j][q] + right[j][q];
                    }
                }
            } else {
                stack.push((a, mid, left, depth + 1));
                stack.push((mid, b, right, depth + 1));
            }
        }
        Ok(total)
    }
}

fn norm<const Q: usize>(v: &[[C64; Q]]) -> f64 {
    v.iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
