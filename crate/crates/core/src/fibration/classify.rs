use serde::{Deserialize, Serialize};

use super::map::{Domain, FibrationMap, DIFFERENTIAL_STEP};
use crate::error::{Error, Result};
use crate::quat::{ImagUnitQuaternion, Quaternion};
use crate::sampling;

type Q = Quaternion<f64>;

/// Default scale for the holomorphy thresholds.
pub const CLASSIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapVerdict {
    Constant,
    #[serde(rename = "i-holomorphic")]
    Holomorphic,
    #[serde(rename = "i-antiholomorphic")]
    AntiHolomorphic,
    Generic,
}

impl MapVerdict {
    /// Verdict of `σ∘F` given the verdict of `F`.
    pub fn sigma_swapped(self) -> Self {
        match self {
            Self::Holomorphic => Self::AntiHolomorphic,
            Self::AntiHolomorphic => Self::Holomorphic,
            v => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapClass {
    pub verdict: MapVerdict,
    pub delta_hol: f64,
    pub delta_anti: f64,
    pub max_dilatation: f64,
    pub samples: usize,
}

impl MapClass {
    /// `|F_*| < 1` on the sample.
    pub fn is_distance_decreasing(&self) -> bool {
        self.max_dilatation < 1.0
    }
}

/// Rotation by π/2 on `T_m S²₋`: `u ↦ m × u`.
pub fn rotate_minus(m: Q, u: Q) -> Q {
    m.cross(u)
}

/// Rotation by π/2 on `T_n S²₊`: `u ↦ -(n × u)`.
pub fn rotate_plus(n: Q, u: Q) -> Q {
    -n.cross(u)
}

type Rotation = fn(Q, Q) -> Q;

/// Holomorphy defects `(δ_hol, δ_anti)` and dilatation of `F` at `a`.
pub fn holomorphy_defects(map: &FibrationMap, a: ImagUnitQuaternion<f64>) -> Result<(f64, f64, f64)> {
    let d = map.differential(a)?;
    let b = map.eval(a)?.get();
    let (dom, rng): (Rotation, Rotation) = if map.transposed {
        (rotate_plus, rotate_minus)
    } else {
        (rotate_minus, rotate_plus)
    };
    let (ex, ey) = d.domain_frame;
    let (mut hol, mut anti) = (0.0, 0.0);
    for (e, image) in [(ex, d.images[0]), (ey, d.images[1])] {
        let lhs = d.push(dom(a.get(), e));
        let rhs = rng(b, image);
        hol += (lhs - rhs).norm_sqr();
        anti += (lhs + rhs).norm_sqr();
    }
    Ok((hol.sqrt(), anti.sqrt(), d.singular_values[0]))
}

/// Sample points used by [`classify_map`]; they reach to within a few
/// differential steps of a cap boundary.
pub fn classification_sample(map: &FibrationMap, samples: usize) -> Vec<ImagUnitQuaternion<f64>> {
    let chart = map.domain_chart();
    match map.domain {
        Domain::Cap { radius } => sampling::cap_spiral(samples, radius - 10.0 * DIFFERENTIAL_STEP, true, 0.0)
            .into_iter()
            .map(|z| chart.from_chart(z))
            .collect(),
        Domain::FullSphere => sampling::fibonacci_sphere(samples),
    }
}

/// Holomorphic / anti-holomorphic / constant verdict over a deterministic
/// low-discrepancy sample of the domain.
pub fn classify_map(map: &FibrationMap, samples: usize, tol: f64) -> Result<MapClass> {
    if samples == 0 {
        return Err(Error::EmptySample);
    }
    let points = classification_sample(map, samples);
    let (mut delta_hol, mut delta_anti, mut max_dilatation) = (0.0f64, 0.0f64, 0.0f64);
    for a in points {
        let (h, an, dil) = holomorphy_defects(map, a)?;
        delta_hol = delta_hol.max(h);
        delta_anti = delta_anti.max(an);
        max_dilatation = max_dilatation.max(dil);
    }
    let scaled = tol * (1.0 + max_dilatation);
    let verdict = if max_dilatation <= tol {
        MapVerdict::Constant
    } else if delta_hol < scaled {
        MapVerdict::Holomorphic
    } else if delta_anti < scaled {
        MapVerdict::AntiHolomorphic
    } else {
        MapVerdict::Generic
    };
    Ok(MapClass {
        verdict,
        delta_hol,
        delta_anti,
        max_dilatation,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::map::ChartTerm;

    fn cap(terms: Vec<ChartTerm>) -> FibrationMap {
        FibrationMap::polynomial(terms, Domain::Cap { radius: 1.0 })
    }

    #[test]
    fn constant_map_is_constant() {
        let c = classify_map(&FibrationMap::constant(ImagUnitQuaternion::i()), 64, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, MapVerdict::Constant);
        assert_eq!((c.delta_hol, c.delta_anti), (0.0, 0.0));
    }

    #[test]
    fn chart_holomorphic_is_i_holomorphic() {
        let c = classify_map(&cap(vec![ChartTerm::new(1, 0, 0.5, 0.0)]), 200, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, MapVerdict::Holomorphic);
        assert!(c.delta_hol <= 1e-6);
        assert!(c.delta_anti > 0.5);
    }

    #[test]
    fn chart_antiholomorphic_reaches_dilatation_point_eight() {
        let c = classify_map(&cap(vec![ChartTerm::new(0, 1, 0.5, 0.0)]), 200, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, MapVerdict::AntiHolomorphic);
        assert!((c.max_dilatation - 0.8).abs() < 1e-3, "{}", c.max_dilatation);
    }

    #[test]
    fn transposed_maps_keep_chart_holomorphy() {
        let vol = cap(vec![ChartTerm::new(1, 0, 0.5, 0.0)]).with_transposed(true);
        assert_eq!(
            classify_map(&vol, 100, CLASSIFY_TOL).unwrap().verdict,
            MapVerdict::Holomorphic
        );
        let conf = cap(vec![ChartTerm::new(0, 1, 0.5, 0.0)]).with_transposed(true);
        assert_eq!(
            classify_map(&conf, 100, CLASSIFY_TOL).unwrap().verdict,
            MapVerdict::AntiHolomorphic
        );
    }

    #[test]
    fn mixed_map_is_generic() {
        let gen = cap(vec![ChartTerm::new(1, 0, 0.3, 0.0), ChartTerm::new(0, 1, 0.1, 0.0)]);
        let c = classify_map(&gen, 200, CLASSIFY_TOL).unwrap();
        assert_eq!(c.verdict, MapVerdict::Generic);
        assert!(c.is_distance_decreasing());
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(
            classify_map(&FibrationMap::constant(ImagUnitQuaternion::i()), 0, CLASSIFY_TOL),
            Err(Error::EmptySample)
        );
    }
}
