use super::ntm_gradient;
use crate::error::{Error, Result};
use crate::geometry::ConeSampler;
use crate::linalg::Point;
use crate::potentials::SpaceTag;
use crate::solvers::Solution;

/// `sum_j w_j N(grad u)_j (1 + |X_j - X_0| / r)^alpha` for a solution whose
/// data is an atom centred at `X_0` with radius `r`. Nodes with an empty cone
/// contribute nothing.
pub fn atom_decay(sol: &Solution, alpha: f64, sampler: &ConeSampler) -> Result<f64> {
    let SpaceTag::H1Atom { center, radius } = sol.data.space else {
        return Err(Error::IncompatibleData("decay functional needs atom data".into()));
    };
    let center = Point::new(center[0], center[1]);
    let mesh = &sol.setup.mesh;
    let n = ntm_gradient(&sol.field, &sol.setup.geometry, mesh, sampler)?;
    Ok((0..mesh.len())
        .filter_map(|j| n.values[j].map(|v| mesh.weights[j] * v * (1.0 + (mesh.nodes[j] - center).norm() / radius).powf(alpha)))
        .sum())
}
