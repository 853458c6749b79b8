//! Finite-difference oracle for `div A(x) grad u = delta_X` with diagonal `A`.
//!
//! Conservative five-point scheme on a sinh-stretched tensor grid centred at
//! the pole, Dirichlet data from a supplied far-field function. The
//! `t`-direction has constant coefficients, so a generalised eigenbasis of the
//! one-dimensional `t` stiffness decouples the system into tridiagonal solves
//! in `x`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::sync::{Arc, Mutex};

type Basis = (Arc<DMatrix<f64>>, Arc<DVector<f64>>);

/// The `t` eigenbasis depends only on the grid shape, so it is shared.
static BASIS: Mutex<Option<((usize, u64, u64), Basis)>> = Mutex::new(None);

pub struct FdGrid {
    pub n: usize,
    pub stretch: f64,
    pub half_width: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        Self {
            n: 2048,
            stretch: 7.0,
            half_width: 500.0,
        }
    }
}

fn nodes(center: f64, g: &FdGrid) -> Vec<f64> {
    let c = g.half_width / g.stretch.sinh();
    (0..=g.n)
        .map(|i| center + c * (g.stretch * (2.0 * i as f64 / g.n as f64 - 1.0)).sinh())
        .collect()
}

/// Dual cell widths at interior nodes.
fn dual(z: &[f64]) -> Vec<f64> {
    (1..z.len() - 1)
        .map(|i| 0.5 * (z[i + 1] - z[i - 1]))
        .collect()
}

/// Tridiagonal solve with sub/diag/super diagonals (Thomas algorithm).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = sup[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / d } else { 0.0 };
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

fn lagrange(z: &[f64], k0: usize, s: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                w[a] *= (s - z[k0 + b]) / (z[k0 + a] - z[k0 + b]);
            }
        }
    }
    w
}

fn stencil_start(z: &[f64], s: f64) -> usize {
    let k = z.partition_point(|v| *v <= s);
    k.saturating_sub(2).min(z.len() - 4)
}

/// Solve with pole `(x0, t0)`, coefficients `a11(x)`, `a22(x)` and boundary
/// data `far(x, t)`; return `u` interpolated at each query point.
pub fn solve(
    x0: f64,
    t0: f64,
    a11: impl Fn(f64) -> f64,
    a22: impl Fn(f64) -> f64,
    far: impl Fn(f64, f64) -> f64,
    queries: &[(f64, f64)],
    g: &FdGrid,
) -> Vec<f64> {
    let xs = nodes(x0, g);
    let ts = nodes(t0, g);
    let m = g.n - 1;
    let wx = dual(&xs);
    let wt = dual(&ts);
    let (phi, lam) = t_basis(&ts, &wt, g);
    let (phi, lam) = (&*phi, &*lam);

    let ax_half: Vec<f64> = xs
        .windows(2)
        .map(|w| a11(0.5 * (w[0] + w[1])) / (w[1] - w[0]))
        .collect();
    let mx: Vec<f64> = (0..m).map(|i| wx[i] * a22(xs[i + 1])).collect();

    // Right-hand side b[i][j] for the operator -div A grad.
    let inv_dt: Vec<f64> = ts.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
    let mut b = DMatrix::<f64>::zeros(m, m);
    let ip = xs.iter().position(|v| *v == x0).expect("pole on grid") - 1;
    let jp = ts.iter().position(|v| *v == t0).expect("pole on grid") - 1;
    b[(ip, jp)] = -1.0;
    for j in 0..m {
        let t = ts[j + 1];
        b[(0, j)] += ax_half[0] * wt[j] * far(xs[0], t);
        b[(m - 1, j)] += ax_half[m] * wt[j] * far(xs[m + 1], t);
    }
    for i in 0..m {
        let x = xs[i + 1];
        b[(i, 0)] += mx[i] * inv_dt[0] * far(x, ts[0]);
        b[(i, m - 1)] += mx[i] * inv_dt[m] * far(x, ts[m + 1]);
    }
    // Project onto the eigenbasis: bh[i][k] = sum_j phi(j,k) b(i,j).
    let bh = &b * phi;

    let sub: Vec<f64> = (0..m)
        .map(|i| if i > 0 { -ax_half[i] } else { 0.0 })
        .collect();
    let sup: Vec<f64> = (0..m)
        .map(|i| if i + 1 < m { -ax_half[i + 1] } else { 0.0 })
        .collect();
    let mut coef = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let diag: Vec<f64> = (0..m)
            .map(|i| ax_half[i] + ax_half[i + 1] + lam[k] * mx[i])
            .collect();
        let mut r: Vec<f64> = (0..m).map(|i| bh[(i, k)]).collect();
        thomas(&sub, &diag, &sup, &mut r);
        for i in 0..m {
            coef[(i, k)] = r[i];
        }
    }
    let value = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 || i == g.n || j == g.n {
            return far(xs[i], ts[j]);
        }
        (0..m).map(|k| coef[(i - 1, k)] * phi[(j - 1, k)]).sum()
    };
    queries
        .iter()
        .map(|&(x, t)| {
            let i0 = stencil_start(&xs, x);
            let j0 = stencil_start(&ts, t);
            let wxl = lagrange(&xs, i0, x);
            let wtl = lagrange(&ts, j0, t);
            let mut acc = 0.0;
            for a in 0..4 {
                for c in 0..4 {
                    acc += wxl[a] * wtl[c] * value(i0 + a, j0 + c);
                }
            }
            acc
        })
        .collect()
}

/// Generalised eigenpairs `K phi = lambda W phi` of the `t` stiffness, with
/// `phi` orthonormal in the `W` inner product.
fn t_basis(ts: &[f64], wt: &[f64], g: &FdGrid) -> Basis {
    let key = (g.n, g.stretch.to_bits(), g.half_width.to_bits());
    let mut cache = BASIS.lock().unwrap();
    if let Some((k, basis)) = cache.as_ref() {
        if *k == key {
            return basis.clone();
        }
    }
    let m = g.n - 1;
    let inv_dt: Vec<f64> = ts.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
    let mut kt = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        kt[(j, j)] = (inv_dt[j] + inv_dt[j + 1]) / wt[j];
        if j + 1 < m {
            let off = -inv_dt[j + 1] / (wt[j] * wt[j + 1]).sqrt();
            kt[(j, j + 1)] = off;
            kt[(j + 1, j)] = off;
        }
    }
    let eig = SymmetricEigen::new(kt);
    let mut phi = eig.eigenvectors;
    for j in 0..m {
        let s = 1.0 / wt[j].sqrt();
        for k in 0..m {
            phi[(j, k)] *= s;
        }
    }
    let basis = (Arc::new(phi), Arc::new(eig.eigenvalues));
    *cache = Some((key, basis.clone()));
    basis
}
