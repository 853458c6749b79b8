//! Natural cubic splines with complex values on a strictly increasing grid.

use crate::linalg::C64;

#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<C64>,
    /// Second derivatives at the knots.
    m: Vec<C64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<C64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let mut m = vec![C64::new(0.0, 0.0); n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives (Thomas algorithm).
            let mut diag = vec![0.0; n];
            let mut rhs = vec![C64::new(0.0, 0.0); n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = (ys[i + 1] - ys[i]) * (6.0 / h1) - (ys[i] - ys[i - 1]) * (6.0 / h0);
            }
            for i in 2..n - 1 {
                let w = (xs[i] - xs[i - 1]) / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                let r = rhs[i - 1] * w;
                rhs[i] -= r;
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - m[i + 1] * upper[i]) / diag[i];
            }
        }
        Self { xs, ys, m }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value at `x`; constant extension outside the grid.
    pub fn eval(&self, x: f64) -> C64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|v| *v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        self.ys[k - 1] * a
            + self.ys[k] * b
            + (self.m[k - 1] * (a * a * a - a) + self.m[k] * (b * b * b - b)) * (h * h / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let xs: Vec<f64> = (0..=200).map(|k| -4.0 + 0.04 * k as f64).collect();
        let f = |x: f64| C64::new((-x * x).exp(), x.sin() * 0.1);
        let s = CubicSpline::new(xs.clone(), xs.iter().map(|x| f(*x)).collect());
        for k in 0..97 {
            let x = -3.0 + 0.0623 * k as f64;
            assert!((s.eval(x) - f(x)).norm() < 1e-5, "x = {x}");
        }
        assert_eq!(s.eval(10.0), f(4.0));
    }
}
