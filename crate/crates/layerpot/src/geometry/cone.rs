//! Sampling of truncated nontangential cones.

use super::{DomainGeometry, QuadratureMesh};
use crate::error::{Error, Result};
use crate::linalg::Point;
use serde::{Deserialize, Serialize};

/// Discrete sampler of the cone `{Y : |X - Y| < (1 + a) dist(Y, boundary)}`
/// truncated at height `height_cap`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConeSampler {
    pub aperture: f64,
    pub height_cap: f64,
    pub levels: usize,
    /// Angular resolution: directions are spaced by `pi / (4 samples_per_level)`.
    pub samples_per_level: usize,
    /// Smallest sampled distance; defaults to half the local panel length.
    #[serde(default)]
    pub h_min: Option<f64>,
}

impl Default for ConeSampler {
    fn default() -> Self {
        Self {
            aperture: 1.0,
            height_cap: 0.25,
            levels: 6,
            samples_per_level: 5,
            h_min: None,
        }
    }
}

impl ConeSampler {
    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0)
            || !(self.height_cap > 0.0)
            || self.levels < 4
            || self.samples_per_level < 3
        {
            return Err(Error::Geometry(format!("invalid cone sampler {self:?}")));
        }
        Ok(())
    }
}

/// Interior points of the truncated cone at mesh node `node`, spaced
/// geometrically in the distance to the boundary. Each point is verified
/// against the cone condition by brute-force distance computation.
pub fn cone_points(
    geom: &DomainGeometry,
    mesh: &QuadratureMesh,
    node: usize,
    sampler: &ConeSampler,
) -> Result<Vec<Point>> {
    sampler.validate()?;
    let x = mesh.nodes[node];
    let inward = -mesh.normals[node];
    let h_min = sampler
        .h_min
        .unwrap_or(0.5 * mesh.local_length(node))
        .min(sampler.height_cap);
    let half_angle = (1.0 / (1.0 + sampler.aperture)).acos();
    // Angles lie on a grid that does not depend on the aperture, so that
    // narrower cones sample subsets of wider ones.
    let step = std::f64::consts::FRAC_PI_2 / (2 * sampler.samples_per_level) as f64;
    let reach = (0.9 * half_angle / step).floor() as i64;
    let levels = sampler.levels;
    let mut out = Vec::with_capacity(levels * (2 * reach as usize + 1));
    for l in 0..levels {
        let d =
            sampler.height_cap * (h_min / sampler.height_cap).powf(l as f64 / (levels - 1) as f64);
        for k in -reach..=reach {
            let theta = step * k as f64;
            let dir = Point::new(
                inward.x * theta.cos() - inward.y * theta.sin(),
                inward.x * theta.sin() + inward.y * theta.cos(),
            );
            let y = x + dir * (d / theta.cos());
            let dist = geom.distance(&y);
            if geom.contains(&y)
                && (x - y).norm() < (1.0 + sampler.aperture) * dist
                && dist <= sampler.height_cap * (1.0 + 1e-12)
            {
                out.push(y);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyCone {
            node,
            aperture: sampler.aperture,
        });
    }
    Ok(out)
}
