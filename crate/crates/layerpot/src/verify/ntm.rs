use crate::error::{Error, Result};
use crate::geometry::{cone_points, ConeSampler, DomainGeometry, QuadratureMesh};
use crate::linalg::Point;
use crate::potentials::InteriorField;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NtmResult {
    /// `N f` at each node; `None` where the cone is empty.
    pub values: Vec<Option<f64>>,
    pub skipped: Vec<usize>,
}

impl NtmResult {
    /// Values with skipped nodes replaced by zero.
    pub fn filled(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(0.0)).collect()
    }

    /// `(sum w N^p)^(1/p)` over the nodes that were not skipped.
    pub fn lp(&self, w: &[f64], p: f64) -> f64 {
        let s: f64 = self.values.iter().zip(w).filter_map(|(v, w)| v.map(|v| w * v.powf(p))).sum();
        s.powf(1.0 / p)
    }
}

/// Discrete nontangential maximal function: the largest `|f|` over the sampled
/// cone at each node.
pub fn ntm(f: &(dyn Fn(&Point) -> Result<f64> + Sync), geom: &DomainGeometry, mesh: &QuadratureMesh, sampler: &ConeSampler) -> Result<NtmResult> {
    sampler.validate()?;
    let rows: Vec<Option<f64>> = (0..mesh.len())
        .into_par_iter()
        .map(|i| match cone_points(geom, mesh, i, sampler) {
            Ok(pts) => {
                let mut m: f64 = 0.0;
                for y in &pts {
                    m = m.max(f(y)?.abs());
                }
                Ok(Some(m))
            }
            Err(Error::EmptyCone { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let skipped = rows.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(i, _)| i).collect();
    Ok(NtmResult { values: rows, skipped })
}

/// `N(|grad u|)` of an interior field.
pub fn ntm_gradient(field: &InteriorField, geom: &DomainGeometry, mesh: &QuadratureMesh, sampler: &ConeSampler) -> Result<NtmResult> {
    ntm(&|y| Ok(field.evaluate(y)?.1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()), geom, mesh, sampler)
}
