//! JSON shapes: a matrix is a row-major array of `[re, im]` pairs, either
//! nested by rows or flat; a `G` element is `{"matrix", "theta1", "theta2"}`.

use serde::{Deserialize, Serialize, Serializer};

use super::{c, ComplexMatrix3, GElement, Tolerances, U21Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixRepr {
    pub fn from_matrix(m: &ComplexMatrix3) -> Self {
        MatrixRepr::Rows(
            (0..3)
                .map(|r| (0..3).map(|s| [m[(r, s)].re, m[(r, s)].im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix3> {
        let flat: Vec<[f64; 2]> = match self {
            MatrixRepr::Rows(rows) => {
                if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
                    return Err(Error::InvalidArgument("matrix must be 3×3".into()));
                }
                rows.iter().flatten().copied().collect()
            }
            MatrixRepr::Flat(v) => v.clone(),
        };
        if flat.len() != 9 {
            return Err(Error::InvalidArgument("matrix must have 9 entries".into()));
        }
        Ok(ComplexMatrix3::from_fn(|r, s| {
            let [re, im] = flat[3 * r + s];
            c(re, im)
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GElementRepr {
    pub matrix: MatrixRepr,
    pub theta1: f64,
    pub theta2: f64,
}

impl GElementRepr {
    pub fn from_element(g: &GElement) -> Self {
        GElementRepr {
            matrix: MatrixRepr::from_matrix(g.matrix()),
            theta1: g.theta1,
            theta2: g.theta2,
        }
    }

    /// Validates membership and both congruences.
    pub fn to_element(&self, tol: &Tolerances) -> Result<GElement> {
        let m = U21Matrix::new(self.matrix.to_matrix()?, tol.group)?;
        GElement::new(m, self.theta1, self.theta2, tol)
    }
}

impl Serialize for U21Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from_matrix(self.matrix()).serialize(serializer)
    }
}

impl Serialize for GElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GElementRepr::from_element(self).serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::super::random_u21;
    use super::*;

    #[test]
    fn round_trip_nested_and_flat() {
        let m = random_u21(9, 0.5);
        let text = serde_json::to_string(&m).unwrap();
        let repr: MatrixRepr = serde_json::from_str(&text).unwrap();
        assert_eq!(repr.to_matrix().unwrap(), *m.matrix());

        let flat = "[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]";
        let repr: MatrixRepr = serde_json::from_str(flat).unwrap();
        assert_eq!(repr.to_matrix().unwrap(), ComplexMatrix3::identity());
    }

    #[test]
    fn rejects_bad_shapes() {
        let repr: MatrixRepr = serde_json::from_str("[[[1,0],[0,0]],[[0,0],[1,0]]]").unwrap();
        assert!(repr.to_matrix().is_err());
    }

    #[test]
    fn element_round_trip() {
        let g = super::super::lift_to_g(&random_u21(2, 0.4), 1, -2);
        let text = serde_json::to_string(&g).unwrap();
        let repr: GElementRepr = serde_json::from_str(&text).unwrap();
        assert_eq!(repr.to_element(&Tolerances::default()).unwrap(), g);
    }
}
