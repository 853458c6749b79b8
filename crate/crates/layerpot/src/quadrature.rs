//! Gauss-Legendre rules, Lagrange interpolation on Gauss nodes and polynomial
//! extrapolation.

use crate::linalg::C64;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric weights for Lagrange interpolation through `nodes`.
    pub bary: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        let bary = barycentric_weights(&nodes);
        Self {
            nodes,
            weights,
            bary,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (m + h * x, h * w))
    }

    /// Values at `s` of the Lagrange basis polynomials through the nodes.
    pub fn lagrange_basis(&self, s: f64, out: &mut [f64]) {
        lagrange_basis(&self.nodes, &self.bary, s, out)
    }

    /// Differentiation matrix on the nodes, row-major: `(D f)_i = sum_j D[i][j] f_j`.
    pub fn diff_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.order();
        let x = &self.nodes;
        let b = &self.bary;
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    d[i][j] = b[j] / b[i] / (x[i] - x[j]);
                    diag -= d[i][j];
                }
            }
            d[i][i] = diag;
        }
        d
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= x[j] - x[k];
            }
        }
    }
    let scale = w.iter().map(|v| v.abs()).fold(0.0, f64::max);
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

/// Lagrange basis values at `s` via the barycentric formula.
pub fn lagrange_basis(x: &[f64], bary: &[f64], s: f64, out: &mut [f64]) {
    for (j, &xj) in x.iter().enumerate() {
        if s == xj {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
    }
    let mut denom = 0.0;
    for j in 0..x.len() {
        let t = bary[j] / (s - x[j]);
        out[j] = t;
        denom += t;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

/// Coefficients `c_k` such that `sum c_k f(h_k)` is the value at `h = 0` of
/// the interpolating polynomial through `(h_k, f(h_k))`.
pub fn extrapolation_weights(h: &[f64]) -> Vec<f64> {
    (0..h.len())
        .map(|k| {
            h.iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &hj)| hj / (hj - h[k]))
                .product()
        })
        .collect()
}

/// Composite Gauss-Legendre rule over the breakpoints `edges`.
pub fn composite(rule: &GaussLegendre, edges: &[f64]) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

/// Sum of complex samples against real weights.
pub fn integrate(samples: impl Iterator<Item = (f64, C64)>) -> C64 {
    samples.map(|(w, v)| v * w).sum()
}
