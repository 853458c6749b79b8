use crate::error::Result;
use crate::linalg::{c, Point, C64};
use crate::potentials::BoundaryDensity;
use crate::solvers::{domain_green, solve_dirichlet, Setup};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    /// `max |u(X)| / ||f||_inf` over the data set and the test points.
    pub c_solve: f64,
    /// `max_X ||nu . A grad G_X||_{L^1}`.
    pub c_green: f64,
    /// `|c_solve - c_green| / c_green`.
    pub disagreement: f64,
}

/// Measured maximum-principle constant.
///
/// For each test point the data set is extended by the extremal datum
/// `conj(weight) / |weight|`, whose solution attains `||weights||_{L^1}` at
/// that point, so the solve-based and Green-based constants measure the same
/// supremum.
pub fn max_principle(setup: &Setup, data: &[Vec<C64>], points: &[Point]) -> Result<MaxPrincipleReport> {
    let mut c_green: f64 = 0.0;
    let mut all = data.to_vec();
    for x in points {
        let g = domain_green(setup, x)?;
        c_green = c_green.max(g.weight_l1());
        all.push(g.weights.iter().map(|w| if w.norm() > 0.0 { w.conj() / w.norm() } else { c(0.0) }).collect());
    }
    let mut c_solve: f64 = 0.0;
    for f in all {
        let sup = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup == 0.0 {
            continue;
        }
        let sol = solve_dirichlet(setup, &BoundaryDensity::lp(f, f64::INFINITY), f64::INFINITY)?;
        for x in points {
            c_solve = c_solve.max(sol.evaluate(x)?.0.norm() / sup);
        }
    }
    Ok(MaxPrincipleReport { c_solve, c_green, disagreement: (c_solve - c_green).abs() / c_green })
}
