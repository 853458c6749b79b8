//! Fundamental solution for x-dependent coefficients by partial Fourier
//! transform in the second coordinate.
//!
//! With `Gamma_X(Y) = (1/2pi) int g(y; x0, xi) e^{i xi (s - t0)} dxi`, the
//! transform solves `(a11 g' + i xi a12 g)' + i xi a21 g' - xi^2 a22 g = delta(y - x0)`.
//! Writing the flux as `F = rho g`, the ratio `rho` obeys the Riccati equation
//! `rho' = xi^2 a22 - (rho + i xi a21)(rho - i xi a12)/a11`, integrated from the
//! decaying frozen root at each end, and
//! `g(y) = exp(P(y) - P(x0)) / (rho_R(x0) - rho_L(x0))` with `P' = (rho - i xi a12)/a11`.
//!
//! The value is pinned by subtracting the transform of a constant reference
//! kernel at low frequency and of the frozen-midpoint kernel at high frequency;
//! both models are integrated in closed form above the split frequency.

use super::constant::ConstantKernel;
use super::expint::expint_e1;
use super::{check_distinct, GreenFunction, GreenSample, Route};
use crate::coefficients::CoefficientField;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat2, CVec2, Point, C64, I};
use crate::quadrature::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, OnceLock};

/// Accuracy of evaluations with the default parameters, relative to the
/// size of the kernel.
pub const FOURIER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FourierParams {
    /// Range of first coordinates where poles may lie; the table covers it
    /// together with the coefficient window.
    pub x_range: Option<(f64, f64)>,
    /// Smallest pole-point distance resolved at full accuracy.
    pub min_distance: f64,
    pub xi_min: f64,
    pub nodes_per_octave: usize,
    /// Spacing of the stored Riccati tables.
    pub grid_step: f64,
    /// Per-pair truncation `Xi = cutoff / |X - Y|`.
    pub cutoff: f64,
    /// Per-pair model switch `xi_s = split / |X - Y|`.
    pub split: f64,
    pub margin: f64,
    /// RK4 substeps are limited to `step_factor / (stiffness)`.
    pub step_factor: f64,
}

impl Default for FourierParams {
    fn default() -> Self {
        Self {
            x_range: None,
            min_distance: 0.02,
            xi_min: 1e-6,
            nodes_per_octave: 20,
            grid_step: 0.02,
            cutoff: 40.0,
            split: 1.0,
            margin: 1.0,
            step_factor: 0.4,
        }
    }
}

/// Riccati tables for one frequency and sign.
#[derive(Debug, Clone)]
struct NodeTable {
    rho_l: Vec<C64>,
    rho_r: Vec<C64>,
    p_l: Vec<C64>,
    p_r: Vec<C64>,
    /// Derivatives in the first coordinate at the grid, used by the Hermite
    /// interpolation; filled by [`NodeTable::with_slopes`].
    drho_l: Vec<C64>,
    drho_r: Vec<C64>,
    dp_l: Vec<C64>,
    dp_r: Vec<C64>,
}

impl NodeTable {
    fn with_slopes(mut self, grid_a: &[CMat2], xi: f64) -> Self {
        let slopes = |rho: &[C64]| -> (Vec<C64>, Vec<C64>) {
            rho.iter()
                .zip(grid_a)
                .map(|(r, a)| (riccati(*r, a, xi), p_rate(*r, a, xi)))
                .unzip()
        };
        (self.drho_l, self.dp_l) = slopes(&self.rho_l);
        (self.drho_r, self.dp_r) = slopes(&self.rho_r);
        self
    }
}

/// Hermite basis weights of a location, fixed for one evaluation.
#[derive(Debug, Clone, Copy)]
enum Stencil {
    Inside { k: usize, w: [f64; 4] },
    Left(f64),
    Right(f64),
}

#[derive(Debug)]
struct Inner {
    field: CoefficientField,
    params: FourierParams,
    real: bool,
    ya: f64,
    yb: f64,
    hy: f64,
    /// Coefficients at the table grid.
    grid_a: Vec<CMat2>,
    reference: ConstantKernel,
    edges: Vec<f64>,
    rule: GaussLegendre,
    /// Lazily built tables per octave: `[node][sign]`.
    octaves: Vec<OnceLock<Vec<[Option<NodeTable>; 2]>>>,
    stiffness: f64,
}

#[derive(Debug, Clone)]
pub struct FourierGreen {
    inner: Arc<Inner>,
    transposed: Arc<OnceLock<Arc<dyn GreenFunction>>>,
}

/// Normalised frozen roots `(n_R, n_L)` for sign `sigma`: `mu = eta n`,
/// `Re n_R < 0 < Re n_L`.
fn frozen_roots(a: &CMat2, sigma: f64) -> (C64, C64) {
    let s = a[(0, 1)] + a[(1, 0)];
    let d = (a[(0, 0)] * a[(1, 1)] * 4.0 - s * s).sqrt();
    let m1 = (-I * s + d) / (a[(0, 0)] * 2.0);
    let m2 = (-I * s - d) / (a[(0, 0)] * 2.0);
    let (neg, pos) = if m1.re < m2.re { (m1, m2) } else { (m2, m1) };
    if sigma > 0.0 {
        (neg, pos)
    } else {
        (-pos, -neg)
    }
}

fn riccati(rho: C64, a: &CMat2, xi: f64) -> C64 {
    c(xi * xi) * a[(1, 1)] - (rho + I * xi * a[(1, 0)]) * (rho - I * xi * a[(0, 1)]) / a[(0, 0)]
}

fn p_rate(rho: C64, a: &CMat2, xi: f64) -> C64 {
    (rho - I * xi * a[(0, 1)]) / a[(0, 0)]
}

/// Closed-form frequency model `alpha eta^{k-1} e^{eta beta}` of one quantity.
#[derive(Debug, Clone, Copy)]
struct Model {
    alpha: [C64; 5],
    beta: C64,
}

const KPOW: [i32; 5] = [0, 1, 1, 1, 1];

impl Model {
    /// Constant-matrix model for quantities (value, d_y, d_s, d_x0, conj_x).
    fn new(a: &CMat2, sigma: f64, right: bool, dx: f64, dt: f64) -> Self {
        let (nr, nl) = frozen_roots(a, sigma);
        let n = if right { nr } else { nl };
        let w = a[(0, 0)] * (nr - nl);
        let rho = a[(0, 0)] * n + I * sigma * a[(0, 1)];
        let is = I * sigma;
        Self {
            alpha: [w.inv(), n / w, is / w, -n / w, -(rho * n) / (is * w)],
            beta: n * dx + is * dt,
        }
    }

    fn at(&self, eta: f64) -> [C64; 5] {
        let e = (self.beta * eta).exp();
        std::array::from_fn(|q| {
            if KPOW[q] == 0 {
                self.alpha[q] * e / eta
            } else {
                self.alpha[q] * e
            }
        })
    }

    /// `int_{eta_s}^inf` of the model.
    fn tail(&self, eta_s: f64, q: usize) -> C64 {
        if KPOW[q] == 0 {
            self.alpha[q] * expint_e1(-self.beta * eta_s)
        } else {
            -self.alpha[q] * (self.beta * eta_s).exp() / self.beta
        }
    }
}

/// Where a coordinate sits relative to the table.
#[derive(Debug, Clone, Copy)]
enum Loc {
    Inside { k: usize, t: f64 },
    Left(f64),
    Right(f64),
}

impl FourierGreen {
    pub fn new(field: CoefficientField, params: FourierParams) -> Result<Self> {
        let (left, right) = field.ends();
        let anti = |a: &CMat2| a[(0, 1)] - a[(1, 0)];
        if (anti(&left) - anti(&right)).norm() > 1e-12 {
            return Err(Error::Fourier(
                "frozen ends have different antisymmetric parts; the far field is not logarithmic"
                    .into(),
            ));
        }
        let w = field.window();
        let (mut xa, mut xb) = w.unwrap_or((0.0, 0.0));
        if let Some((ra, rb)) = params.x_range {
            if w.is_none() {
                (xa, xb) = (ra, rb);
            }
            xa = xa.min(ra);
            xb = xb.max(rb);
        }
        let ya = xa - params.margin;
        let yb = xb + params.margin;
        let m = (((yb - ya) / params.grid_step).ceil() as usize).max(4);
        let hy = (yb - ya) / m as f64;
        let grid_a: Vec<CMat2> = (0..=m).map(|k| field.at(ya + hy * k as f64)).collect();

        let reference = if (left - right).norm() <= 1e-14 * (1.0 + left.norm()) {
            ConstantKernel::new(left)?
        } else {
            let sq =
                |a: &CMat2| (a[(0, 0)] * a[(1, 1)] * 4.0 - (a[(0, 1)] + a[(1, 0)]).powi(2)).sqrt();
            let kappa = (sq(&left) + sq(&right)) / 4.0;
            ConstantKernel::new(CMat2::identity() * kappa)?
        };
        let xi_max = 2.0 * params.cutoff / params.min_distance;
        let mut edges = vec![params.xi_min];
        while *edges.last().unwrap() < xi_max {
            edges.push(edges.last().unwrap() * 2.0);
        }
        let stiffness = grid_a
            .iter()
            .map(|a| {
                let (nr, nl) = frozen_roots(a, 1.0);
                (nr - nl).norm() + (a[(0, 1)].norm() + a[(1, 0)].norm()) / a[(0, 0)].norm()
            })
            .fold(0.0, f64::max);
        let octaves = (0..edges.len() - 1).map(|_| OnceLock::new()).collect();
        let real = field.is_real();
        Ok(Self {
            inner: Arc::new(Inner {
                rule: GaussLegendre::new(params.nodes_per_octave),
                field,
                params,
                real,
                ya,
                yb,
                hy,
                grid_a,
                reference,
                edges,
                octaves,
                stiffness,
            }),
            transposed: Arc::new(OnceLock::new()),
        })
    }

    pub fn params(&self) -> &FourierParams {
        &self.inner.params
    }

    /// Table range in the first coordinate.
    pub fn table_range(&self) -> (f64, f64) {
        (self.inner.ya, self.inner.yb)
    }

    /// Evaluate with the per-pair truncation multiplied by `xi_factor`; used for
    /// the self-consistency check.
    pub fn eval_scaled(&self, pole: &Point, point: &Point, xi_factor: f64) -> Result<[C64; 5]> {
        self.inner.quantities(pole, point, xi_factor)
    }

    /// Number of frequency octaves whose tables have been built so far.
    pub fn built_octaves(&self) -> usize {
        self.inner.octaves.iter().filter(|o| o.get().is_some()).count()
    }

    /// Write every built table as CSV, one row per (octave, node, sign, grid
    /// index). Returns the number of octaves written.
    pub fn write_tables(&self, out: &mut dyn Write) -> Result<usize> {
        writeln!(
            out,
            "octave,node,sign,grid,rho_l_re,rho_l_im,rho_r_re,rho_r_im,p_l_re,p_l_im,p_r_re,p_r_im"
        )?;
        let mut written = 0;
        for (o, cell) in self.inner.octaves.iter().enumerate() {
            let Some(tables) = cell.get() else { continue };
            written += 1;
            for (n, pair) in tables.iter().enumerate() {
                for (s, tab) in pair.iter().enumerate() {
                    let Some(t) = tab else { continue };
                    for k in 0..t.rho_l.len() {
                        let z = [t.rho_l[k], t.rho_r[k], t.p_l[k], t.p_r[k]];
                        write!(out, "{o},{n},{s},{k}")?;
                        for v in z {
                            write!(out, ",{},{}", v.re, v.im)?;
                        }
                        writeln!(out)?;
                    }
                }
            }
        }
        Ok(written)
    }

    /// Load tables written by [`FourierGreen::write_tables`] for an evaluator
    /// with the same field and parameters. Octaves that are already built are
    /// left alone. Returns the number of octaves loaded.
    pub fn read_tables(&self, input: &mut dyn BufRead) -> Result<usize> {
        let inner = &*self.inner;
        let m = inner.grid_a.len();
        let nodes = inner.rule.nodes.len();
        let signs = if inner.real { 1 } else { 2 };
        let bad = |line: usize, what: &str| Error::Fourier(format!("table line {line}: {what}"));
        let mut partial: BTreeMap<usize, Vec<[Option<NodeTable>; 2]>> = BTreeMap::new();
        for (line, text) in input.lines().enumerate().skip(1) {
            let text = text?;
            if text.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = text.split(',').collect();
            if fields.len() != 12 {
                return Err(bad(line + 1, "expected 12 columns"));
            }
            let idx: Vec<usize> = fields[..4]
                .iter()
                .map(|f| f.parse().map_err(|_| bad(line + 1, "bad index")))
                .collect::<Result<_>>()?;
            let v: Vec<f64> = fields[4..]
                .iter()
                .map(|f| f.parse().map_err(|_| bad(line + 1, "bad number")))
                .collect::<Result<_>>()?;
            let (o, n, s, k) = (idx[0], idx[1], idx[2], idx[3]);
            if o >= inner.octaves.len() || n >= nodes || s >= signs || k >= m {
                return Err(bad(line + 1, "index out of range for this evaluator"));
            }
            let octave = partial
                .entry(o)
                .or_insert_with(|| (0..nodes).map(|_| [None, None]).collect());
            let tab = octave[n][s].get_or_insert_with(|| NodeTable {
                rho_l: vec![C64::new(f64::NAN, 0.0); m],
                rho_r: vec![C64::new(f64::NAN, 0.0); m],
                p_l: vec![C64::new(f64::NAN, 0.0); m],
                p_r: vec![C64::new(f64::NAN, 0.0); m],
                drho_l: Vec::new(),
                drho_r: Vec::new(),
                dp_l: Vec::new(),
                dp_r: Vec::new(),
            });
            tab.rho_l[k] = C64::new(v[0], v[1]);
            tab.rho_r[k] = C64::new(v[2], v[3]);
            tab.p_l[k] = C64::new(v[4], v[5]);
            tab.p_r[k] = C64::new(v[6], v[7]);
        }
        let mut loaded = 0;
        for (o, tables) in partial {
            let complete = tables.iter().all(|pair| {
                (0..signs).all(|s| {
                    pair[s].as_ref().is_some_and(|t| {
                        [&t.rho_l, &t.rho_r, &t.p_l, &t.p_r]
                            .iter()
                            .all(|col| col.iter().all(|z| !z.re.is_nan()))
                    })
                })
            });
            if !complete {
                return Err(Error::Fourier(format!("octave {o} is incomplete")));
            }
            let etas = inner.rule.mapped(inner.edges[o], inner.edges[o + 1]);
            let tables: Vec<[Option<NodeTable>; 2]> = tables
                .into_iter()
                .zip(etas)
                .map(|(pair, (eta, _))| {
                    let [plus, minus] = pair;
                    [
                        plus.map(|t| t.with_slopes(&inner.grid_a, eta)),
                        minus.map(|t| t.with_slopes(&inner.grid_a, -eta)),
                    ]
                })
                .collect();
            if inner.octaves[o].set(tables).is_ok() {
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    /// Relative change of the value and gradients when the truncation doubles.
    pub fn self_consistency(&self, pole: &Point, point: &Point) -> Result<f64> {
        let a = self.eval_scaled(pole, point, 1.0)?;
        let b = self.eval_scaled(pole, point, 2.0)?;
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            / scale)
    }
}

impl Inner {
    fn loc(&self, x: f64) -> Loc {
        if x < self.ya {
            Loc::Left(x)
        } else if x >= self.yb {
            Loc::Right(x)
        } else {
            let u = (x - self.ya) / self.hy;
            let k = (u.floor() as usize).min(self.grid_a.len() - 2);
            Loc::Inside { k, t: u - k as f64 }
        }
    }

    fn octave(&self, o: usize) -> &Vec<[Option<NodeTable>; 2]> {
        self.octaves[o].get_or_init(|| {
            let nodes: Vec<f64> = self
                .rule
                .mapped(self.edges[o], self.edges[o + 1])
                .map(|(x, _)| x)
                .collect();
            nodes
                .par_iter()
                .map(|&eta| {
                    let plus = Some(self.build(eta, 1.0));
                    let minus = if self.real {
                        None
                    } else {
                        Some(self.build(eta, -1.0))
                    };
                    [plus, minus]
                })
                .collect()
        })
    }

    /// RK4 sweeps for `rho_L`, `P_L` (left to right) and `rho_R`, `P_R` (right to left).
    fn build(&self, eta: f64, sigma: f64) -> NodeTable {
        let xi = sigma * eta;
        let m = self.grid_a.len();
        let nsub =
            ((self.hy * eta * self.stiffness / self.params.step_factor).ceil() as usize).max(1);
        let h = self.hy / nsub as f64;
        let sweep = |rho0: C64, forward: bool| -> (Vec<C64>, Vec<C64>) {
            let mut rho = vec![c(0.0); m];
            let mut p = vec![c(0.0); m];
            let step = if forward { h } else { -h };
            let first = if forward { 0 } else { m - 1 };
            rho[first] = rho0;
            let (mut r, mut pp) = (rho0, c(0.0));
            for idx in 1..m {
                let (k_cur, k_next) = if forward {
                    (idx - 1, idx)
                } else {
                    (m - idx, m - 1 - idx)
                };
                let y0 = self.ya + self.hy * k_cur as f64;
                let mut a0 = self.grid_a[k_cur];
                for j in 0..nsub {
                    let yj = y0 + step * j as f64;
                    let a1 = self.field.at(yj + 0.5 * step);
                    let a2 = if j + 1 == nsub {
                        self.grid_a[k_next]
                    } else {
                        self.field.at(yj + step)
                    };
                    let k1 = (riccati(r, &a0, xi), p_rate(r, &a0, xi));
                    let r2 = r + k1.0 * (0.5 * step);
                    let k2 = (riccati(r2, &a1, xi), p_rate(r2, &a1, xi));
                    let r3 = r + k2.0 * (0.5 * step);
                    let k3 = (riccati(r3, &a1, xi), p_rate(r3, &a1, xi));
                    let r4 = r + k3.0 * step;
                    let k4 = (riccati(r4, &a2, xi), p_rate(r4, &a2, xi));
                    r += (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (step / 6.0);
                    pp += (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (step / 6.0);
                    a0 = a2;
                }
                rho[k_next] = r;
                p[k_next] = pp;
            }
            (rho, p)
        };
        let (_, nl) = frozen_roots(&self.grid_a[0], sigma);
        let a0 = &self.grid_a[0];
        let rho_l0 = (a0[(0, 0)] * nl + I * sigma * a0[(0, 1)]) * eta;
        let (nr, _) = frozen_roots(&self.grid_a[m - 1], sigma);
        let a1 = &self.grid_a[m - 1];
        let rho_r0 = (a1[(0, 0)] * nr + I * sigma * a1[(0, 1)]) * eta;
        let (rho_l, p_l) = sweep(rho_l0, true);
        let (rho_r, p_r) = sweep(rho_r0, false);
        NodeTable {
            rho_l,
            rho_r,
            p_l,
            p_r,
            drho_l: Vec::new(),
            drho_r: Vec::new(),
            dp_l: Vec::new(),
            dp_r: Vec::new(),
        }
        .with_slopes(&self.grid_a, xi)
    }

    fn stencil(&self, loc: Loc) -> Stencil {
        match loc {
            Loc::Inside { k, t } => {
                let (t2, t3) = (t * t, t * t * t);
                let h = self.hy;
                Stencil::Inside {
                    k,
                    w: [
                        2.0 * t3 - 3.0 * t2 + 1.0,
                        h * (t3 - 2.0 * t2 + t),
                        -2.0 * t3 + 3.0 * t2,
                        h * (t3 - t2),
                    ],
                }
            }
            Loc::Left(x) => Stencil::Left(x - self.ya),
            Loc::Right(x) => Stencil::Right(x - self.yb),
        }
    }

    /// `(rho, P)` of the requested branch at a location.
    fn branch(&self, tab: &NodeTable, st: Stencil, right: bool) -> (C64, C64) {
        let (rho, p, drho, dp) = if right {
            (&tab.rho_r, &tab.p_r, &tab.drho_r, &tab.dp_r)
        } else {
            (&tab.rho_l, &tab.p_l, &tab.drho_l, &tab.dp_l)
        };
        match st {
            Stencil::Inside { k, w } => (
                rho[k] * w[0] + drho[k] * w[1] + rho[k + 1] * w[2] + drho[k + 1] * w[3],
                p[k] * w[0] + dp[k] * w[1] + p[k + 1] * w[2] + dp[k + 1] * w[3],
            ),
            Stencil::Left(dx) => (rho[0], p[0] + dp[0] * dx),
            Stencil::Right(dx) => {
                let n = rho.len() - 1;
                (rho[n], p[n] + dp[n] * dx)
            }
        }
    }

    /// (value, d_y, d_s, d_x0, conj_x) at one pair.
    fn quantities(&self, pole: &Point, point: &Point, xi_factor: f64) -> Result<[C64; 5]> {
        check_distinct(pole, point)?;
        let (x0, t0) = (pole.x, pole.y);
        let (y, s) = (point.x, point.y);
        let (dx, dt) = (y - x0, s - t0);
        let dist = (point - pole).norm();
        let loc0 = self.loc(x0);
        if !matches!(loc0, Loc::Inside { .. }) {
            return Err(Error::Fourier(format!(
                "pole x = {x0} outside the table [{}, {}]",
                self.ya, self.yb
            )));
        }
        let locy = self.loc(y);
        let right = dx >= 0.0;
        // The branch beyond the table is only available on its own side.
        match (locy, right) {
            (Loc::Left(_), true) | (Loc::Right(_), false) => {
                return Err(Error::Fourier(
                    "evaluation point outside the table on the wrong side".into(),
                ))
            }
            _ => {}
        }
        let edges = &self.edges;
        let last = edges.len() - 1;
        let xi_top = (xi_factor * self.params.cutoff / dist).min(edges[last]);
        let o_top = edges.partition_point(|e| *e < xi_top).clamp(1, last);
        let o_split = edges
            .partition_point(|e| *e <= self.params.split / dist)
            .saturating_sub(1)
            .min(o_top);
        let eta_s = edges[o_split];

        let (st0, sty) = (self.stencil(loc0), self.stencil(locy));
        let a_x0 = self.field.at(x0);
        let a_y = self.field.at(y);
        let a_mid = self.field.at(0.5 * (x0 + y));
        let signs: &[f64] = if self.real { &[1.0] } else { &[1.0, -1.0] };
        let mut acc = [c(0.0); 5];
        for (si, &sigma) in signs.iter().enumerate() {
            let m_ref = Model::new(&self.reference.a, sigma, right, dx, dt);
            let m_mid = Model::new(&a_mid, sigma, right, dx, dt);
            for o in 0..o_top {
                let tables = self.octave(o);
                let model = if o < o_split { &m_ref } else { &m_mid };
                for ((eta, w), tab) in self.rule.mapped(edges[o], edges[o + 1]).zip(tables) {
                    let tab = tab[si].as_ref().expect("table for sign");
                    let xi = sigma * eta;
                    let (rr0, pr0) = self.branch(tab, st0, true);
                    let (rl0, pl0) = self.branch(tab, st0, false);
                    let (ry, py) = self.branch(tab, sty, right);
                    let (rho0, p0) = if right { (rr0, pr0) } else { (rl0, pl0) };
                    let wr = rr0 - rl0;
                    let g = (py - p0).exp() / wr;
                    let dwr = riccati(rr0, &a_x0, xi) - riccati(rl0, &a_x0, xi);
                    let dg_x0 = g * (-p_rate(rho0, &a_x0, xi) - dwr / wr);
                    let phase = C64::from_polar(1.0, xi * dt);
                    let q = [
                        g,
                        p_rate(ry, &a_y, xi) * g,
                        I * xi * g,
                        dg_x0,
                        ry * dg_x0 / (I * xi),
                    ];
                    let m = model.at(eta);
                    for k in 0..5 {
                        acc[k] += (q[k] * phase - m[k]) * w;
                    }
                }
            }
            for k in 0..5 {
                acc[k] += m_mid.tail(eta_s, k) - m_ref.tail(eta_s, k);
            }
        }
        let d = point - pole;
        let (v_ref, g_ref) = self.reference.eval_d(&d);
        let conj_ref = self.reference.conj_grad_pole_d(&d);
        let base = [v_ref, g_ref.x, g_ref.y, -g_ref.x, conj_ref.x];
        let mut out = [c(0.0); 5];
        for k in 0..5 {
            out[k] = if self.real {
                c(base[k].re + acc[k].re / PI)
            } else {
                base[k] + acc[k] / (2.0 * PI)
            };
        }
        Ok(out)
    }
}

impl GreenFunction for FourierGreen {
    fn field(&self) -> &CoefficientField {
        &self.inner.field
    }

    fn route(&self) -> Route {
        Route::FourierOde
    }

    fn eval(&self, pole: &Point, point: &Point) -> Result<GreenSample> {
        let q = self.inner.quantities(pole, point, 1.0)?;
        Ok(GreenSample {
            value: q[0],
            grad_point: CVec2::new(q[1], q[2]),
            grad_pole: CVec2::new(q[3], -q[2]),
        })
    }

    fn conj_grad_pole(&self, pole: &Point, point: &Point) -> Result<CVec2> {
        let q = self.inner.quantities(pole, point, 1.0)?;
        let a = self.inner.field.at(point.x);
        Ok(CVec2::new(q[4], -(a[(0, 0)] * q[1] + a[(0, 1)] * q[2])))
    }

    fn tolerance(&self) -> f64 {
        FOURIER_TOLERANCE
    }

    fn transposed(&self) -> Arc<dyn GreenFunction> {
        self.transposed
            .get_or_init(|| {
                if self.inner.field.is_symmetric() {
                    Arc::new(FourierGreen {
                        inner: self.inner.clone(),
                        transposed: Arc::new(OnceLock::new()),
                    })
                } else {
                    Arc::new(
                        FourierGreen::new(self.inner.field.transpose(), self.inner.params.clone())
                            .expect("transposed field shares the far-field structure"),
                    )
                }
            })
            .clone()
    }
}
