//! JSON description of a graph map.
//!
//! ```json
//! { "kind": "chart-polynomial", "coefficients": [[0, 1, 0.5, 0.0]], "domain_radius": 1.0, "transposed": false }
//! { "kind": "constant", "value": [1.0, 0.0, 0.0] }
//! ```
//!
//! Each coefficient `[p, q, re, im]` contributes `(re + i im) z^p z̄^q`. A
//! missing or null `domain_radius` means the whole sphere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{ChartTerm, Domain, FibrationMap, MapKind};
use crate::quat::{ImagUnitQuaternion, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecKind {
    Constant,
    ChartPolynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationSpec {
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<(u32, u32, f64, f64)>,
    #[serde(default)]
    pub domain_radius: Option<f64>,
    #[serde(default)]
    pub transposed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 3]>,
}

impl FibrationSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_map(&self) -> Result<FibrationMap> {
        let domain = match self.domain_radius {
            None => Domain::FullSphere,
            Some(r) if r.is_finite() && r > 0.0 => Domain::Cap { radius: r },
            Some(r) => return Err(Error::Spec(format!("domain_radius must be positive, got {r}"))),
        };
        let kind = match self.kind {
            SpecKind::Constant => {
                if !self.coefficients.is_empty() {
                    return Err(Error::Spec("constant maps take `value`, not `coefficients`".into()));
                }
                let [x, y, z] = self
                    .value
                    .ok_or_else(|| Error::Spec("constant map without `value`".into()))?;
                let v = ImagUnitQuaternion::normalize(Quaternion::imag(x, y, z))
                    .map_err(|_| Error::Spec("`value` must be a non-zero 3-vector".into()))?;
                MapKind::Constant(v)
            }
            SpecKind::ChartPolynomial => {
                if self.value.is_some() {
                    return Err(Error::Spec("chart polynomials take `coefficients`, not `value`".into()));
                }
                if self.coefficients.is_empty() {
                    return Err(Error::Spec("chart polynomial without coefficients".into()));
                }
                let terms = self
                    .coefficients
                    .iter()
                    .map(|&(p, q, re, im)| {
                        if re.is_finite() && im.is_finite() {
                            Ok(ChartTerm::new(p, q, re, im))
                        } else {
                            Err(Error::Spec(format!("non-finite coefficient for z^{p} z̄^{q}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                MapKind::ChartPolynomial(terms)
            }
        };
        Ok(FibrationMap {
            kind,
            domain,
            transposed: self.transposed,
        })
    }

    pub fn from_map(map: &FibrationMap) -> Self {
        let domain_radius = match map.domain {
            Domain::FullSphere => None,
            Domain::Cap { radius } => Some(radius),
        };
        match &map.kind {
            MapKind::Constant(v) => Self {
                kind: SpecKind::Constant,
                coefficients: Vec::new(),
                domain_radius,
                transposed: map.transposed,
                value: Some(v.vector()),
            },
            MapKind::ChartPolynomial(terms) => Self {
                kind: SpecKind::ChartPolynomial,
                coefficients: terms
                    .iter()
                    .map(|t| {
                        let Complex64 { re, im } = t.coeff;
                        (t.p, t.q, re, im)
                    })
                    .collect(),
                domain_radius,
                transposed: map.transposed,
                value: None,
            },
        }
    }
}

pub fn parse_map(text: &str) -> Result<FibrationMap> {
    FibrationSpec::parse(text)?.to_map()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    #[test]
    fn parses_chart_polynomial() {
        let map =
            parse_map(r#"{"kind":"chart-polynomial","coefficients":[[0,1,0.5,0.0]],"domain_radius":1.0}"#).unwrap();
        assert_eq!(map, Fixture::Conf05.map());
    }

    #[test]
    fn fixtures_round_trip_through_json() {
        for f in Fixture::ALL {
            let spec = FibrationSpec::from_map(&f.map());
            assert_eq!(parse_map(&spec.to_json()).unwrap(), f.map(), "{f}");
        }
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            "not json",
            r#"{"kind":"constant"}"#,
            r#"{"kind":"constant","value":[0,0,0]}"#,
            r#"{"kind":"chart-polynomial","coefficients":[]}"#,
            r#"{"kind":"chart-polynomial","coefficients":[[1,0,1,0]],"domain_radius":-1}"#,
            r#"{"kind":"rational","coefficients":[[1,0,1,0]]}"#,
            r#"{"kind":"constant","value":[1,0,0],"colour":"red"}"#,
        ] {
            assert!(matches!(parse_map(text), Err(Error::Spec(_))), "{text}");
        }
    }
}
