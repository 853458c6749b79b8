use crate::error::Result;
use crate::geometry::QuadratureMesh;
use crate::linalg::{wnorm2, C64};
use crate::potentials::OpTag;
use crate::solvers::Setup;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RellichReport {
    /// `||K_+^t f|| / ||L^t f||` for each retained density.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    /// Densities dropped because `L^t f` vanishes relative to `f`.
    pub excluded: Vec<usize>,
}

/// Relative size below which `L^t f` counts as zero.
pub const DEGENERATE: f64 = 1e-8;

pub fn rellich_comparability(setup: &Setup, densities: &[Vec<C64>]) -> Result<RellichReport> {
    let kt = setup.operator(OpTag::KtPlus)?;
    let lt = setup.operator(OpTag::Lt)?;
    let w = &setup.mesh.weights;
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    for (k, f) in densities.iter().enumerate() {
        let nf = wnorm2(w, f);
        let nk = wnorm2(w, &kt.apply(f));
        let nl = wnorm2(w, &lt.apply(f));
        if nf == 0.0 || nl <= DEGENERATE * nf {
            excluded.push(k);
            continue;
        }
        ratios.push(nk / nl);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(RellichReport { spread: super::spread(&ratios), ratios, min, max, excluded })
}

/// Dyadic-arc proxy for the BMO norm: the largest mean oscillation
/// `(1 / sigma(arc)) sum_{arc} w |f - avg|` over runs of `2^k` consecutive
/// nodes starting at multiples of `2^(k-1)`. Runs wrap on closed curves.
pub fn bmo_norm(mesh: &QuadratureMesh, f: &[C64]) -> f64 {
    let n = mesh.len();
    let w = &mesh.weights;
    let mut best: f64 = 0.0;
    let mut len = 2;
    while len <= n {
        let step = (len / 2).max(1);
        let mut start = 0;
        while start < n {
            if !mesh.closed && start + len > n {
                break;
            }
            let idx: Vec<usize> = (start..start + len).map(|j| j % n).collect();
            let sigma: f64 = idx.iter().map(|&j| w[j]).sum();
            let avg: C64 = idx.iter().map(|&j| f[j] * w[j]).sum::<C64>() / sigma;
            let osc: f64 = idx.iter().map(|&j| w[j] * (f[j] - avg).norm()).sum::<f64>() / sigma;
            best = best.max(osc);
            start += step;
        }
        len *= 2;
    }
    best
}
