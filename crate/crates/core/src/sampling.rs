//! Deterministic point sets: low-discrepancy spirals on domain caps, covered
//! points of a fibration, and seeded random draws.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fibration::{Domain, FibrationMap};
use crate::grassmann::{circle_point, plane_from_pair, GrassPoint};
use crate::quat::{ImagUnitQuaternion, Quaternion, UnitQuaternion};

type Im = ImagUnitQuaternion<f64>;
type Q = Quaternion<f64>;

/// Covered points are generated from fibres with chart radius at most this
/// fraction of the cap radius.
pub const COVERED_CAP_FRACTION: f64 = 0.9;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653; // π (3 − √5)

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Area-uniform golden-angle spiral on the spherical cap `{|z| ≤ max_radius}`
/// of a stereographic chart. With `include_edge` the last point lies on the
/// rim.
pub fn cap_spiral(count: usize, max_radius: f64, include_edge: bool, angle_offset: f64) -> Vec<Complex64> {
    // Spherical area fraction of {|z| ≤ ρ} is ρ² / (1 + ρ²).
    let total = max_radius * max_radius / (1.0 + max_radius * max_radius);
    (0..count)
        .map(|k| {
            let s = if include_edge {
                (k + 1) as f64 / count as f64
            } else {
                (k as f64 + 0.5) / count as f64
            };
            let t = s * total;
            let rho = (t / (1.0 - t)).sqrt();
            Complex64::from_polar(rho, angle_offset + GOLDEN_ANGLE * k as f64)
        })
        .collect()
}

/// Fibonacci lattice on S²; never hits the poles.
pub fn fibonacci_sphere(count: usize) -> Vec<Im> {
    (0..count)
        .map(|k| {
            let c = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - c * c).sqrt();
            let th = GOLDEN_ANGLE * k as f64;
            Im::normalize(Q::imag(r * th.cos(), r * th.sin(), c)).expect("unit")
        })
        .collect()
}

/// A point of S³ on a known fibre of a fibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveredPoint {
    pub p: UnitQuaternion<f64>,
    /// Domain parameter of the fibre (`m`, or `n` for transposed maps).
    pub fibre: Im,
    pub grass: GrassPoint<f64>,
    /// Circle parameter from the deterministic base point of the plane.
    pub t: f64,
}

/// Fibre parameters spread over the domain interior.
pub fn fibre_parameters(map: &FibrationMap, count: usize, angle_offset: f64) -> Vec<Im> {
    match map.domain {
        Domain::Cap { radius } => cap_spiral(count, COVERED_CAP_FRACTION * radius, false, angle_offset)
            .into_iter()
            .map(|z| map.domain_chart().from_chart(z))
            .collect(),
        Domain::FullSphere => fibonacci_sphere(count),
    }
}

/// `count` points of the fibred region: fibre parameters from a
/// low-discrepancy spiral, circle parameters uniform in `[0, 2π)`.
pub fn covered_points(map: &FibrationMap, count: usize, seed: u64) -> Result<Vec<CoveredPoint>> {
    let mut rng = rng(seed);
    let offset = rng.random_range(0.0..2.0 * PI);
    fibre_parameters(map, count, offset)
        .into_iter()
        .map(|fibre| {
            let grass = map.grass_point(fibre)?;
            let x0 = UnitQuaternion::new(plane_from_pair(grass).f1)?;
            let t = rng.random_range(0.0..2.0 * PI);
            let p = circle_point(grass, x0, t)?;
            Ok(CoveredPoint { p, fibre, grass, t })
        })
        .collect()
}

/// Uniform random point of S³.
pub fn random_sphere3(rng: &mut impl Rng) -> UnitQuaternion<f64> {
    loop {
        let q = Q::new(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
        if let Ok(u) = UnitQuaternion::normalize(q) {
            if q.norm() > 1e-3 {
                return u;
            }
        }
    }
}

/// Uniform random point of S².
pub fn random_sphere2(rng: &mut impl Rng) -> Im {
    loop {
        let q = Q::imag(gauss(rng), gauss(rng), gauss(rng));
        if q.norm() > 1e-3 {
            return Im::normalize(q).expect("non-zero");
        }
    }
}

/// Random unit vector orthogonal to the given orthonormal vectors.
pub fn random_orthogonal(rng: &mut impl Rng, against: &[Q]) -> Q {
    loop {
        let mut q = Q::new(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
        for a in against {
            q = q.reject(*a);
        }
        if q.norm() > 1e-3 {
            return q.normalized().expect("non-zero");
        }
    }
}

/// Standard normal draw (Box–Muller).
pub fn gauss(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}
