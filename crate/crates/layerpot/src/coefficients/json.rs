//! JSON form of coefficient documents.

use super::CoefficientField;
use crate::error::{Error, Result};
use crate::linalg::{CMat2, C64};
use serde::{Deserialize, Serialize};

/// Row-major `[a11, a12, a21, a22]`, each as `[re, im]`.
pub type MatrixEntries = [[f64; 2]; 4];

fn to_mat(m: &MatrixEntries) -> CMat2 {
    let z = |k: usize| C64::new(m[k][0], m[k][1]);
    CMat2::new(z(0), z(1), z(2), z(3))
}

pub fn from_mat(a: &CMat2) -> MatrixEntries {
    let z = |i: usize, j: usize| [a[(i, j)].re, a[(i, j)].im];
    [z(0, 0), z(0, 1), z(1, 0), z(1, 1)]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub x: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<MatrixEntries>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSamples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientSpec {
    Constant {
        matrix: MatrixEntries,
        #[serde(default)]
        reference: Option<Box<CoefficientSpec>>,
    },
    Profile {
        grid: ProfileGrid,
        #[serde(default)]
        reference: Option<Box<CoefficientSpec>>,
    },
    /// The metric `[[1,phi'],[phi',1+phi'^2]]` of a graph.
    GraphMetric { phi: GraphSamples },
}

impl CoefficientSpec {
    pub fn build(&self) -> Result<CoefficientField> {
        let (field, reference) = match self {
            CoefficientSpec::Constant { matrix, reference } => {
                (CoefficientField::constant(to_mat(matrix))?, reference)
            }
            CoefficientSpec::Profile { grid, reference } => {
                if grid.x.len() != grid.a.len() {
                    return Err(Error::Coefficients(
                        "grid.x and grid.A lengths differ".into(),
                    ));
                }
                (
                    CoefficientField::sampled(grid.x.clone(), grid.a.iter().map(to_mat).collect())?,
                    reference,
                )
            }
            CoefficientSpec::GraphMetric { phi } => {
                return CoefficientField::graph_metric(phi.x.clone(), phi.y.clone());
            }
        };
        match reference {
            Some(r) => field.with_reference(r.build()?),
            None => Ok(field),
        }
    }

    pub fn constant(a: &CMat2) -> Self {
        CoefficientSpec::Constant {
            matrix: from_mat(a),
            reference: None,
        }
    }
}
