//! JSON descriptions of domains and maps.
//!
//! Domain document: `{"m": 2, "basis": [[1,0],[0,3]], "xi": [0,0]}` where
//! `basis[i]` is the i-th basis vector. Map document:
//! `{"beta": 2.5, "isometry": {...}, "domain": {...}}` with isometry kinds
//! `rotation {angle}`, `reflection {axisAngle}`, and `matrix {rows}`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Isometry, RotBetaMap};
use crate::error::{Error, Result};
use crate::geometry::LatticeDomain;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub m: usize,
    pub basis: Vec<Vec<f64>>,
    pub xi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum IsometrySpec {
    #[serde(rename = "rotation")]
    Rotation { angle: f64 },
    #[serde(rename = "reflection")]
    Reflection {
        #[serde(rename = "axisAngle")]
        axis_angle: f64,
    },
    #[serde(rename = "matrix")]
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub beta: f64,
    pub isometry: IsometrySpec,
    pub domain: DomainSpec,
}

impl DomainSpec {
    pub fn build(&self) -> Result<LatticeDomain> {
        if self.basis.len() != self.m {
            return Err(Error::InvalidParameter(format!(
                "domain declares m = {} but has {} basis vectors",
                self.m,
                self.basis.len()
            )));
        }
        LatticeDomain::new(&self.basis, &self.xi)
    }
}

impl IsometrySpec {
    pub fn build(&self, m: usize) -> Result<Isometry> {
        let iso = match self {
            IsometrySpec::Rotation { angle } => {
                if m != 2 {
                    return Err(Error::InvalidParameter(
                        "rotation isometries are planar; use kind=matrix otherwise".into(),
                    ));
                }
                Isometry::rotation(*angle)
            }
            IsometrySpec::Reflection { axis_angle } => {
                if m != 2 {
                    return Err(Error::InvalidParameter(
                        "reflection isometries are planar; use kind=matrix otherwise".into(),
                    ));
                }
                Isometry::reflection(*axis_angle)
            }
            IsometrySpec::Matrix { rows } => Isometry::from_matrix(rows)?,
        };
        if iso.dim() != m {
            return Err(Error::InvalidParameter(
                "isometry dimension disagrees with the domain".into(),
            ));
        }
        Ok(iso)
    }
}

impl MapSpec {
    pub fn build(&self) -> Result<RotBetaMap> {
        let domain = self.domain.build()?;
        let iso = self.isometry.build(domain.dim())?;
        RotBetaMap::new(self.beta, iso, domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_build_rotation_map() {
        let text = r#"{
            "beta": 2.5,
            "isometry": {"kind": "rotation", "angle": 1.5707963267948966},
            "domain": {"m": 2, "basis": [[1,0],[0,3]], "xi": [0,0]}
        }"#;
        let spec: MapSpec = serde_json::from_str(text).unwrap();
        let map = spec.build().unwrap();
        assert_eq!(map.dim(), 2);
        assert!((map.beta() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn reflection_and_matrix_kinds() {
        let refl: IsometrySpec =
            serde_json::from_str(r#"{"kind":"reflection","axisAngle":0.3}"#).unwrap();
        let iso = refl.build(2).unwrap();
        assert_eq!(iso.det_sign(), -1);

        let mat: IsometrySpec =
            serde_json::from_str(r#"{"kind":"matrix","rows":[[-1.0]]}"#).unwrap();
        let iso = mat.build(1).unwrap();
        assert_eq!(iso.det_sign(), -1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{"m":1,"basis":[[1]],"xi":[0],"extra":3}"#;
        assert!(serde_json::from_str::<DomainSpec>(bad).is_err());
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let spec: MapSpec = serde_json::from_str(
            r#"{
                "beta": 2.0,
                "isometry": {"kind": "rotation", "angle": 0.5},
                "domain": {"m": 1, "basis": [[1]], "xi": [0]}
            }"#,
        )
        .unwrap();
        assert!(spec.build().is_err());
    }
}
