//! Dense LU and restarted GMRES for complex systems, with a 1-norm condition
//! estimate (Hager-Higham) reported alongside every solve.

use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Systems with a larger condition estimate are refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearMethod {
    DenseLu,
    Iterative {
        restart: usize,
        tol: f64,
        max_iter: usize,
    },
}

impl LinearMethod {
    pub fn gmres() -> Self {
        LinearMethod::Iterative {
            restart: 60,
            tol: 1e-10,
            max_iter: 3000,
        }
    }
}

impl Default for LinearMethod {
    fn default() -> Self {
        LinearMethod::DenseLu
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LinearReport {
    /// `||A x - b|| / ||b||`.
    pub residual: f64,
    pub iterations: usize,
    pub condition: f64,
}

pub fn solve_linear(
    a: &DMatrix<C64>,
    b: &[C64],
    method: &LinearMethod,
) -> Result<(Vec<C64>, LinearReport)> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "{}x{} system with {} right-hand side entries",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let condition = condition_estimate(a)?;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_column_slice(b);
    let (x, iterations) = match *method {
        LinearMethod::DenseLu => {
            let x = a
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::LinearSolve("singular matrix".into()))?;
            (x, 0)
        }
        LinearMethod::Iterative {
            restart,
            tol,
            max_iter,
        } => gmres(a, &rhs, restart, tol, max_iter)?,
    };
    let bn = rhs.norm();
    let residual = if bn > 0.0 {
        (a * &x - &rhs).norm() / bn
    } else {
        x.norm()
    };
    Ok((
        x.iter().copied().collect(),
        LinearReport {
            residual,
            iterations,
            condition,
        },
    ))
}

fn norm1(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `||A||_1 ||A^-1||_1`, the second factor from Hager's estimator.
pub fn condition_estimate(a: &DMatrix<C64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    let lu = a.clone().lu();
    let lu_adj = a.adjoint().lu();
    let singular = || Error::LinearSolve("singular matrix".into());
    let mut x = DVector::from_element(n, c(1.0 / n as f64));
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x).ok_or_else(singular)?;
        let new_est: f64 = y.iter().map(|z| z.norm()).sum();
        if !new_est.is_finite() {
            return Ok(f64::INFINITY);
        }
        let xi = y.map(|z| if z.norm() > 0.0 { z / z.norm() } else { c(1.0) });
        let z = lu_adj.solve(&xi).ok_or_else(singular)?;
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, 0.0), |m, v| if v.1 > m.1 { v } else { m });
        let zx = z.dotc(&x).re;
        if new_est <= est || zmax <= zx {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        x = DVector::from_element(n, c(0.0));
        x[jmax] = c(1.0);
    }
    Ok(norm1(a) * est)
}

fn gmres(
    a: &DMatrix<C64>,
    b: &DVector<C64>,
    restart: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<C64>, usize)> {
    let n = b.len();
    let bnorm = b.norm();
    let mut x = DVector::from_element(n, c(0.0));
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let m = restart.max(1).min(n);
    let mut iterations = 0;
    loop {
        let r = b - a * &x;
        let beta = r.norm();
        if beta / bnorm <= tol {
            return Ok((x, iterations));
        }
        if iterations >= max_iter {
            return Err(Error::LinearSolve(format!(
                "GMRES stalled at relative residual {:e}",
                beta / bnorm
            )));
        }
        let mut v: Vec<DVector<C64>> = vec![r / c(beta)];
        let mut h = DMatrix::<C64>::zeros(m + 1, m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![c(0.0); m];
        let mut g = DVector::<C64>::zeros(m + 1);
        g[0] = c(beta);
        let mut k_used = 0;
        for j in 0..m {
            let mut w = a * &v[j];
            for i in 0..=j {
                let hij = v[i].dotc(&w);
                h[(i, j)] = hij;
                w -= &v[i] * hij;
            }
            let wn = w.norm();
            h[(j + 1, j)] = c(wn);
            for i in 0..j {
                let t = h[(i, j)] * cs[i] + sn[i] * h[(i + 1, j)];
                h[(i + 1, j)] = -sn[i].conj() * h[(i, j)] + h[(i + 1, j)] * cs[i];
                h[(i, j)] = t;
            }
            let (aa, bb) = (h[(j, j)], h[(j + 1, j)]);
            let rr = (aa.norm_sqr() + bb.norm_sqr()).sqrt();
            if aa.norm() == 0.0 {
                cs[j] = 0.0;
                sn[j] = c(1.0);
            } else {
                cs[j] = aa.norm() / rr;
                sn[j] = aa / aa.norm() * bb.conj() / rr;
            }
            h[(j, j)] = h[(j, j)] * cs[j] + sn[j] * bb;
            h[(j + 1, j)] = c(0.0);
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            iterations += 1;
            k_used = j + 1;
            if g[j + 1].norm() / bnorm <= tol || wn == 0.0 || iterations >= max_iter {
                break;
            }
            v.push(w / c(wn));
        }
        // Back substitution on the leading k x k triangle.
        let mut y = vec![c(0.0); k_used];
        for i in (0..k_used).rev() {
            let s: C64 = (i + 1..k_used).map(|l| h[(i, l)] * y[l]).sum();
            y[i] = (g[i] - s) / h[(i, i)];
        }
        for (i, yi) in y.iter().enumerate() {
            x += &v[i] * *yi;
        }
    }
}

/// Least-squares solution of a tall full-column-rank system by Householder
/// QR. The condition estimate is that of the triangular factor.
pub fn solve_least_squares(a: &DMatrix<C64>, b: &[C64]) -> Result<(Vec<C64>, LinearReport)> {
    let (m, n) = a.shape();
    if m < n || b.len() != m {
        return Err(Error::Dimension(format!(
            "{m}x{n} least-squares system with {} right-hand side entries",
            b.len()
        )));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let condition = condition_estimate(&r)?;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_column_slice(b);
    let qb = qr.q().adjoint() * &rhs;
    let x = r
        .solve_upper_triangular(&qb)
        .ok_or_else(|| Error::LinearSolve("rank-deficient least-squares system".into()))?;
    let bn = rhs.norm();
    let res = (a * &x - &rhs).norm();
    let residual = if bn > 0.0 { res / bn } else { res };
    Ok((
        x.iter().copied().collect(),
        LinearReport {
            residual,
            iterations: 0,
            condition,
        },
    ))
}
