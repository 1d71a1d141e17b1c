//! Geodesic flow on the unit tangent bundle of S³ and its linearization.
//!
//! A vector of `ker α` at `(p, v)` is stored by its horizontal and vertical
//! parts, both orthogonal to `p` and `v`. On the unit sphere the linearized
//! flow rotates the pair `(ξ_H, ξ_V)` rigidly.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::FibrationMap;
use crate::geometry::FieldAt;
use crate::grassmann::{pair_from_plane, GrassPoint, OrientedPlane};
use crate::quat::{cross3_raw, Quaternion, UnitQuaternion, VALIDATION_TOL};

type Q = Quaternion<f64>;
type Unit = UnitQuaternion<f64>;

/// Step in the variation parameter for Grassmann tangents.
pub const VARIATION_STEP: f64 = 1e-5;
const SIGN_TOL: f64 = 1e-3;

/// A point `(p, v)` of the unit tangent bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmPoint {
    pub p: Unit,
    pub v: Q,
}

impl SmPoint {
    pub fn new(p: Unit, v: Q) -> Result<Self> {
        let d = p.get().dot(v);
        if d.abs() > VALIDATION_TOL {
            return Err(Error::NotTangent(d));
        }
        if (v.norm() - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotUnit(v.norm()));
        }
        let v = v.reject(p.get()).normalized().ok_or(Error::NotUnit(0.0))?;
        Ok(Self { p, v })
    }

    /// `j`: rotation by a quarter turn in `{p, v}⊥`.
    pub fn rotate(&self, u: Q) -> Q {
        cross3_raw(self.p.get(), self.v, u)
    }

    pub fn plane(&self) -> Option<OrientedPlane<f64>> {
        OrientedPlane::span(self.p.get(), self.v)
    }

    pub fn grass_point(&self) -> Result<GrassPoint<f64>> {
        pair_from_plane(
            self.plane()
                .ok_or_else(|| Error::InvalidFrame("degenerate (p, v)".into()))?,
        )
    }
}

/// `ξ = (ξ_H, ξ_V) ∈ ker α`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KerAlphaVector {
    pub horizontal: Q,
    pub vertical: Q,
}

impl KerAlphaVector {
    /// Validates both parts against `p` and `v` within 1e-8.
    pub fn new(q: &SmPoint, horizontal: Q, vertical: Q) -> Result<Self> {
        let xi = Self { horizontal, vertical };
        let worst = xi.invariant_defect(q);
        if worst > VALIDATION_TOL {
            return Err(Error::NotTangent(worst));
        }
        Ok(xi)
    }

    /// Both parts projected onto `{p, v}⊥`.
    pub fn project(q: &SmPoint, horizontal: Q, vertical: Q) -> Self {
        let clean = |u: Q| u.reject(q.p.get()).reject(q.v);
        Self {
            horizontal: clean(horizontal),
            vertical: clean(vertical),
        }
    }

    pub fn invariant_defect(&self, q: &SmPoint) -> f64 {
        [q.p.get(), q.v]
            .iter()
            .flat_map(|a| [self.horizontal.dot(*a).abs(), self.vertical.dot(*a).abs()])
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.horizontal.norm_sqr() + self.vertical.norm_sqr()
    }

    pub fn scale(self, s: f64) -> Self {
        Self {
            horizontal: self.horizontal.scale(s),
            vertical: self.vertical.scale(s),
        }
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm_sqr().sqrt()
    }
}

impl Add for KerAlphaVector {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            horizontal: self.horizontal + o.horizontal,
            vertical: self.vertical + o.vertical,
        }
    }
}

impl Sub for KerAlphaVector {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for KerAlphaVector {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// The two almost-complex structures on `ker α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlmostComplex {
    /// `(ξ_H, ξ_V) ↦ (−ξ_V, ξ_H)`
    Symplectic,
    /// `(ξ_H, ξ_V) ↦ (j ξ_H, j ξ_V)`
    Componentwise,
}

impl AlmostComplex {
    pub const BOTH: [AlmostComplex; 2] = [Self::Symplectic, Self::Componentwise];

    pub fn label(self) -> &'static str {
        match self {
            Self::Symplectic => "J",
            Self::Componentwise => "JJ",
        }
    }
}

impl fmt::Display for AlmostComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn geodesic_flow(q: &SmPoint, t: f64) -> SmPoint {
    let (s, c) = t.sin_cos();
    let p = q.p.get();
    let p_t = p.scale(c) + q.v.scale(s);
    let v_t = q.v.scale(c) - p.scale(s);
    SmPoint {
        p: Unit::normalize(p_t).expect("rotation of a unit vector"),
        v: v_t,
    }
}

fn rotate_pair(xi: KerAlphaVector, t: f64) -> KerAlphaVector {
    let (s, c) = t.sin_cos();
    KerAlphaVector {
        horizontal: xi.horizontal.scale(c) + xi.vertical.scale(s),
        vertical: xi.vertical.scale(c) - xi.horizontal.scale(s),
    }
}

/// `dφ_t ξ`, from the Jacobi field with `J(0) = ξ_H`, `J'(0) = ξ_V`.
pub fn dflow_ker_alpha(q: &SmPoint, xi: KerAlphaVector, t: f64) -> Result<KerAlphaVector> {
    let worst = xi.invariant_defect(q);
    if worst > VALIDATION_TOL {
        return Err(Error::NotTangent(worst));
    }
    Ok(rotate_pair(xi, t))
}

pub fn apply_acs(q: &SmPoint, xi: KerAlphaVector, which: AlmostComplex) -> KerAlphaVector {
    match which {
        AlmostComplex::Symplectic => KerAlphaVector {
            horizontal: -xi.vertical,
            vertical: xi.horizontal,
        },
        AlmostComplex::Componentwise => KerAlphaVector {
            horizontal: q.rotate(xi.horizontal),
            vertical: q.rotate(xi.vertical),
        },
    }
}

/// `dα(ξ, η) = ⟨ξ_V, η_H⟩ − ⟨ξ_H, η_V⟩` for `α = ⟨v, dp⟩`.
pub fn dalpha(xi: KerAlphaVector, eta: KerAlphaVector) -> f64 {
    xi.vertical.dot(eta.horizontal) - xi.horizontal.dot(eta.vertical)
}

/// `‖dφ_t(Aξ) − A(dφ_t ξ)‖`.
pub fn commutation_defect(q: &SmPoint, xi: KerAlphaVector, t: f64, which: AlmostComplex) -> Result<f64> {
    let q_t = geodesic_flow(q, t);
    let lhs = dflow_ker_alpha(q, apply_acs(q, xi, which), t)?;
    let rhs = apply_acs(&q_t, dflow_ker_alpha(q, xi, t)?, which);
    Ok(lhs.distance(rhs))
}

/// `X_* u = (u, ∇_u X)` for `u ⊥ X`.
pub fn pushforward(at: &FieldAt<'_>, u: Q) -> KerAlphaVector {
    let q = SmPoint { p: at.p, v: at.x.vec };
    KerAlphaVector::project(&q, u, at.shape.apply(u))
}

/// `‖ξ_V − β ξ_H‖`, zero exactly on `X_*(X⊥)`.
pub fn e_defect(at: &FieldAt<'_>, xi: KerAlphaVector) -> f64 {
    let frame = &at.shape.frame;
    let image = frame.vector(at.shape.b.apply(frame.coords(xi.horizontal)));
    let v = frame.vector(frame.coords(xi.vertical));
    (v - image).norm()
}

pub fn e_membership_defect(map: &FibrationMap, p: Unit, xi: KerAlphaVector) -> Result<f64> {
    let at = FieldAt::new(map, p, None)?;
    let q = SmPoint { p, v: at.x.vec };
    let worst = xi.invariant_defect(&q);
    if worst > VALIDATION_TOL {
        return Err(Error::NotTangent(worst));
    }
    Ok(e_defect(&at, xi))
}

/// The spiral vectors `(e, j e)` and `(e, −j e)` at `q`, for the first basis
/// vector `e` with a large component orthogonal to `p` and `v`.
pub fn spiral_pair(q: &SmPoint) -> Result<(KerAlphaVector, KerAlphaVector)> {
    let e = (0..4)
        .map(|i| Q::basis(i).reject(q.p.get()).reject(q.v))
        .find(|u| u.norm() >= 0.5)
        .and_then(Q::normalized)
        .ok_or_else(|| Error::InvalidFrame("no basis vector transverse to span{p, v}".into()))?;
    let je = q.rotate(e);
    Ok((
        KerAlphaVector {
            horizontal: e,
            vertical: je,
        },
        KerAlphaVector {
            horizontal: e,
            vertical: -je,
        },
    ))
}

/// First-order motion `(dm, dn)` of the Grassmann label of the plane
/// `span(p + s ξ_H, v + s ξ_V)`.
pub fn grass_variation(q: &SmPoint, xi: KerAlphaVector) -> Result<(Q, Q)> {
    let h = VARIATION_STEP;
    let at = |s: f64| -> Result<GrassPoint<f64>> {
        let plane = OrientedPlane::span(q.p.get() + xi.horizontal.scale(s), q.v + xi.vertical.scale(s))
            .ok_or_else(|| Error::DegenerateVariation("collapsed plane".into()))?;
        pair_from_plane(plane)
    };
    let (plus, minus) = (at(h)?, at(-h)?);
    Ok((
        (plus.m.get() - minus.m.get()).scale(0.5 / h),
        (plus.n.get() - minus.n.get()).scale(0.5 / h),
    ))
}

/// Rotation sense of the two almost-complex structures on each Grassmann
/// factor: `+1` anti-clockwise and `−1` clockwise about the outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chirality {
    /// `[S²₋, S²₊]` for [`AlmostComplex::Symplectic`].
    pub symplectic: [i8; 2],
    /// `[S²₋, S²₊]` for [`AlmostComplex::Componentwise`].
    pub componentwise: [i8; 2],
}

pub fn chirality_witness(q: &SmPoint) -> Result<Chirality> {
    let g = q.grass_point()?;
    let (xi, xi_prime) = spiral_pair(q)?;
    let variations = [(xi, grass_variation(q, xi)?), (xi_prime, grass_variation(q, xi_prime)?)];
    let factor = |d: (Q, Q), f: usize| if f == 0 { d.0 } else { d.1 };

    let sense = |f: usize, which: AlmostComplex| -> Result<i8> {
        // The spiral whose variation moves only this factor.
        let &(base, d) = variations
            .iter()
            .max_by(|a, b| factor(a.1, f).norm().total_cmp(&factor(b.1, f).norm()))
            .expect("two spirals");
        let t0 = factor(d, f);
        let other = factor(d, 1 - f).norm();
        if t0.norm() < 0.1 || other > SIGN_TOL * t0.norm() {
            return Err(Error::DegenerateVariation(format!(
                "spiral variation is not confined to one factor ({} vs {})",
                t0.norm(),
                other
            )));
        }
        let ta = factor(grass_variation(q, apply_acs(q, base, which))?, f);
        let normal = if f == 0 { g.m.get() } else { g.n.get() };
        let s = normal.cross(t0).dot(ta) / t0.norm_sqr();
        if (s.abs() - 1.0).abs() > SIGN_TOL {
            return Err(Error::DegenerateVariation(format!(
                "rotation is not a quarter turn: {s}"
            )));
        }
        Ok(s.signum() as i8)
    };

    Ok(Chirality {
        symplectic: [
            sense(0, AlmostComplex::Symplectic)?,
            sense(1, AlmostComplex::Symplectic)?,
        ],
        componentwise: [
            sense(0, AlmostComplex::Componentwise)?,
            sense(1, AlmostComplex::Componentwise)?,
        ],
    })
}

/// The point of the unit tangent bundle carried by a fibration at `at`.
pub fn field_point(at: &FieldAt<'_>) -> SmPoint {
    SmPoint { p: at.p, v: at.x.vec }
}
