//! Oriented 2-planes of ℝ⁴ as points of S²₋ × S²₊.
//!
//! The plane labelled `(m, n)` is `{x : m·x = x·n}`, the +1 eigenspace of the
//! symmetric involution `x ↦ -m·x·n`, oriented by `(x, m·x)`. Its great
//! circle is `t ↦ exp(t m)·x0 = x0·exp(t n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{wedge_split, ImagUnitQuaternion, Quaternion, UnitQuaternion, VALIDATION_TOL};
use crate::scalar::Scalar;

/// Ordered orthonormal frame of an oriented plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedPlane<T> {
    pub f1: Quaternion<T>,
    pub f2: Quaternion<T>,
}

impl<T: Scalar> OrientedPlane<T> {
    /// Validates orthonormality within 1e-8 and re-orthonormalizes.
    pub fn new(f1: Quaternion<T>, f2: Quaternion<T>) -> Result<Self> {
        let tol = T::lit(VALIDATION_TOL);
        if (f1.norm() - T::one()).abs() > tol || (f2.norm() - T::one()).abs() > tol || f1.dot(f2).abs() > tol {
            return Err(Error::InvalidFrame(format!(
                "|f1| = {}, |f2| = {}, <f1,f2> = {}",
                f1.norm(),
                f2.norm(),
                f1.dot(f2)
            )));
        }
        Ok(Self::span(f1, f2).expect("validated frame is non-degenerate"))
    }

    /// Gram–Schmidt on `(a, b)`, keeping the orientation of the pair.
    pub fn span(a: Quaternion<T>, b: Quaternion<T>) -> Option<Self> {
        let f1 = a.normalized()?;
        let f2 = b.reject(f1).normalized()?;
        Some(Self { f1, f2 })
    }

    /// The frame rotated in-plane by `theta`.
    pub fn rotated(self, theta: T) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        Self {
            f1: self.f1.scale(c) + self.f2.scale(s),
            f2: self.f2.scale(c) - self.f1.scale(s),
        }
    }

    /// Distance of `x` from the plane.
    pub fn distance(self, x: Quaternion<T>) -> T {
        (x - self.f1.scale(x.dot(self.f1)) - self.f2.scale(x.dot(self.f2))).norm()
    }
}

/// A point `(m, n)` of S²₋ × S²₊.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrassPoint<T> {
    pub m: ImagUnitQuaternion<T>,
    pub n: ImagUnitQuaternion<T>,
}

impl<T: Scalar> GrassPoint<T> {
    pub fn new(m: ImagUnitQuaternion<T>, n: ImagUnitQuaternion<T>) -> Self {
        Self { m, n }
    }

    /// `x ↦ -m·x·n`.
    pub fn involution(self, x: Quaternion<T>) -> Quaternion<T> {
        -(self.m.get() * x * self.n.get())
    }

    /// `‖m·x − x·n‖`, zero exactly on the plane.
    pub fn plane_defect(self, x: Quaternion<T>) -> T {
        (self.m.get() * x - x * self.n.get()).norm()
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        self.m
            .get()
            .max_abs_diff(o.m.get())
            .max(self.n.get().max_abs_diff(o.n.get()))
    }
}

/// Deterministic oriented frame `(f1, m·f1)` of the plane labelled by `g`.
pub fn plane_from_pair<T: Scalar>(g: GrassPoint<T>) -> OrientedPlane<T> {
    let half = T::lit(0.5);
    // The projector (Id + T)/2 has rank 2, so Σ |P eᵢ|² = 2 and some basis
    // vector projects with |P eᵢ|² ≥ 1/2.
    let projected = (0..4)
        .map(|i| {
            let e = Quaternion::basis(i);
            (e + g.involution(e)).scale(half)
        })
        .find(|v| v.norm_sqr() >= T::lit(0.25))
        .expect("rank-2 projector");
    let f1 = projected.normalized().expect("non-zero projection");
    let f2 = g.m.get() * f1;
    OrientedPlane { f1, f2 }
}

/// Grassmann label of an oriented plane.
pub fn pair_from_plane<T: Scalar>(plane: OrientedPlane<T>) -> Result<GrassPoint<T>> {
    let (m, n) = wedge_split(plane.f1, plane.f2)?;
    Ok(GrassPoint { m, n })
}

/// `exp(t·m)·x0` on the great circle of `g`.
pub fn circle_point<T: Scalar>(g: GrassPoint<T>, x0: UnitQuaternion<T>, t: T) -> Result<UnitQuaternion<T>> {
    let defect = g.plane_defect(x0.get());
    if defect > T::lit(VALIDATION_TOL) {
        return Err(Error::OffPlane(defect.to_f64().unwrap_or(f64::NAN)));
    }
    UnitQuaternion::normalize(Quaternion::exp_imag(g.m.get(), t) * x0.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type Q = Quaternion<f64>;
    type Im = ImagUnitQuaternion<f64>;

    #[test]
    fn plane_of_i_i_is_span_1_i() {
        let plane = plane_from_pair(GrassPoint::new(Im::i(), Im::i()));
        assert!(plane.f1.max_abs_diff(Q::one()) < 1e-15);
        assert!(plane.f2.max_abs_diff(Q::i()) < 1e-15);
    }

    #[test]
    fn plane_of_i_minus_i_is_span_j_k() {
        let g = GrassPoint::new(Im::i(), Im::i().antipode());
        let plane = plane_from_pair(g);
        for f in [plane.f1, plane.f2] {
            assert!(f.w.abs() < 1e-15 && f.x.abs() < 1e-15);
            assert!(g.plane_defect(f) < 1e-15);
        }
        assert!(pair_from_plane(plane).unwrap().max_abs_diff(g) < 1e-14);
    }

    #[test]
    fn pair_from_plane_examples() {
        let e = Q::basis;
        let g = pair_from_plane(OrientedPlane::new(e(0), e(1)).unwrap()).unwrap();
        assert!(g.max_abs_diff(GrassPoint::new(Im::i(), Im::i())) < 1e-15);
        let g = pair_from_plane(OrientedPlane::new(e(0), e(2)).unwrap()).unwrap();
        assert!(g.max_abs_diff(GrassPoint::new(Im::j(), Im::j())) < 1e-15);
        let p = OrientedPlane::new(e(0), e(2)).unwrap().rotated(0.7);
        assert!(pair_from_plane(p).unwrap().max_abs_diff(g) < 1e-15);
        assert!(matches!(OrientedPlane::new(e(0), e(0)), Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn circle_point_examples() {
        let g = GrassPoint::new(Im::i(), Im::i());
        let one = UnitQuaternion::one();
        assert!(circle_point(g, one, PI / 2.0).unwrap().get().max_abs_diff(Q::i()) < 1e-15);
        assert!(circle_point(g, one, 2.0 * PI).unwrap().get().max_abs_diff(Q::one()) < 1e-15);
        let off = UnitQuaternion::normalize(Q::new(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(matches!(circle_point(g, off, 0.3), Err(Error::OffPlane(_))));
    }

    #[test]
    fn left_and_right_exponentials_agree_on_the_plane() {
        let m = Im::normalize(Q::imag(0.3, -0.5, 0.8)).unwrap();
        let n = Im::normalize(Q::imag(-0.9, 0.1, 0.2)).unwrap();
        let g = GrassPoint::new(m, n);
        let x0 = UnitQuaternion::new(plane_from_pair(g).f1).unwrap();
        for step in 0..64 {
            let t = step as f64 * 0.1;
            let left = Q::exp_imag(m.get(), t) * x0.get();
            let right = x0.get() * Q::exp_imag(n.get(), t);
            assert!(left.max_abs_diff(right) < 1e-14);
        }
    }
}
