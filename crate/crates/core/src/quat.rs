//! Quaternions and the exterior algebra of ℝ⁴ = ℍ.
//!
//! The basis `(1, i, j, k)` is identified with `(e0, e1, e2, e3)`. Bivectors
//! are stored in the order `(e01, e02, e03, e23, e31, e12)`.
//!
//! Orientation: the volume form is `vol = -det` in the `(e0, e1, e2, e3)`
//! coordinates, i.e. `(e1, e0, e2, e3)` is a positive basis. With this choice
//! the Hodge star maps `e01 ↦ -e23`, `e02 ↦ -e31`, `e03 ↦ -e12`, the
//! anti-self-dual part of a plane bivector carries the left-multiplication
//! factor of the plane and the self-dual part the right-multiplication factor.
//! The unit sphere S³ is oriented outward-normal-first.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rejection threshold when validating unit / imaginary / tangent inputs.
pub const VALIDATION_TOL: f64 = 1e-8;

/// A real quaternion `w + x i + y j + z k`, also used for vectors of ℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Standard basis vector `e_idx` of ℝ⁴.
    pub fn basis(idx: usize) -> Self {
        let mut a = [T::zero(); 4];
        a[idx] = T::one();
        Self::from_array(a)
    }

    /// Pure imaginary quaternion with vector part `(x, y, z)`.
    pub fn imag(x: T, y: T, z: T) -> Self {
        Self::new(T::zero(), x, y, z)
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Vector part as a 3-array.
    pub fn vector(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, o: Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `self / |self|`, or `None` for the zero quaternion.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero() && n.is_finite()).then(|| self.scale(T::one() / n))
    }

    /// Imaginary part (real component dropped).
    pub fn imag_part(self) -> Self {
        Self::new(T::zero(), self.x, self.y, self.z)
    }

    /// Component of `self` orthogonal to the unit vector `n`.
    pub fn reject(self, n: Self) -> Self {
        self - n.scale(self.dot(n))
    }

    /// Cross product of the vector parts, as an imaginary quaternion.
    pub fn cross(self, o: Self) -> Self {
        Self::imag(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Exponential of a pure imaginary quaternion `t·m` with `|m| = 1`.
    pub fn exp_imag(m: Self, t: T) -> Self {
        Self::one().scale(t.cos()) + m.scale(t.sin())
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        let d = self - o;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }

    pub fn cast<U: Scalar>(self) -> Quaternion<U> {
        let c = |v: T| U::from_f64(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        Quaternion::new(c(self.w), c(self.x), c(self.y), c(self.z))
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl<T: Scalar> Mul<T> for Quaternion<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Hamilton product `a·b`.
pub fn qmul<T: Scalar>(a: Quaternion<T>, b: Quaternion<T>) -> Quaternion<T> {
    a * b
}

/// A point of S³ ⊂ ℍ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitQuaternion<T>(Quaternion<T>);

pub type SpherePoint3<T> = UnitQuaternion<T>;

impl<T: Scalar> UnitQuaternion<T> {
    /// Validates `| |q| - 1 | ≤ 1e-8` and renormalizes.
    pub fn new(q: Quaternion<T>) -> Result<Self> {
        let n = q.norm();
        if (n - T::one()).abs() > T::lit(VALIDATION_TOL) || !n.is_finite() {
            return Err(Error::NotUnit(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self(q.scale(T::one() / n)))
    }

    /// Projects any non-zero quaternion onto S³.
    pub fn normalize(q: Quaternion<T>) -> Result<Self> {
        q.normalized()
            .map(Self)
            .ok_or_else(|| Error::NotUnit(q.norm().to_f64().unwrap_or(f64::NAN)))
    }

    pub fn one() -> Self {
        Self(Quaternion::one())
    }

    pub fn get(self) -> Quaternion<T> {
        self.0
    }

    /// The inverse `p̄`.
    pub fn inverse(self) -> Self {
        Self(self.0.conj())
    }
}

/// A point of S² ⊂ Im ℍ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImagUnitQuaternion<T>(Quaternion<T>);

pub type SpherePoint2<T> = ImagUnitQuaternion<T>;

impl<T: Scalar> ImagUnitQuaternion<T> {
    /// Validates a pure imaginary unit quaternion; the real part is zeroed and
    /// the result renormalized.
    pub fn new(q: Quaternion<T>) -> Result<Self> {
        if q.w.abs() > T::lit(VALIDATION_TOL) {
            return Err(Error::NotImaginary(q.w.to_f64().unwrap_or(f64::NAN)));
        }
        let v = q.imag_part();
        let n = v.norm();
        if (n - T::one()).abs() > T::lit(VALIDATION_TOL) || !n.is_finite() {
            return Err(Error::NotUnit(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self(v.scale(T::one() / n)))
    }

    /// Normalizes the vector part of any quaternion with non-zero imaginary part.
    pub fn normalize(q: Quaternion<T>) -> Result<Self> {
        let v = q.imag_part();
        v.normalized()
            .map(Self)
            .ok_or_else(|| Error::NotUnit(v.norm().to_f64().unwrap_or(f64::NAN)))
    }

    pub fn from_xyz(x: T, y: T, z: T) -> Result<Self> {
        Self::new(Quaternion::imag(x, y, z))
    }

    pub fn i() -> Self {
        Self(Quaternion::i())
    }

    pub fn j() -> Self {
        Self(Quaternion::j())
    }

    pub fn k() -> Self {
        Self(Quaternion::k())
    }

    pub fn get(self) -> Quaternion<T> {
        self.0
    }

    pub fn vector(self) -> [T; 3] {
        self.0.vector()
    }

    /// Antipodal point.
    pub fn antipode(self) -> Self {
        Self(-self.0)
    }

    /// Great-circle distance on S².
    pub fn distance(self, o: Self) -> T {
        let c = self.0.dot(o.0).max(-T::one()).min(T::one());
        c.acos()
    }
}

/// `p·a·p̄`: the rotation of S² induced by the unit quaternion `p`.
pub fn conjugate_rotate<T: Scalar>(p: UnitQuaternion<T>, a: ImagUnitQuaternion<T>) -> ImagUnitQuaternion<T> {
    let r = p.get() * a.get() * p.get().conj();
    // |p a p̄| = 1 up to rounding; the real part is rounding noise.
    ImagUnitQuaternion::normalize(r).expect("rotation preserves the unit norm")
}

/// Oriented volume form of ℝ⁴ (see the module docs).
pub fn vol<T: Scalar>(a: Quaternion<T>, b: Quaternion<T>, c: Quaternion<T>, d: Quaternion<T>) -> T {
    -det4([a.to_array(), b.to_array(), c.to_array(), d.to_array()])
}

/// Determinant of the 4×4 matrix whose rows are the given vectors.
pub fn det4<T: Scalar>(m: [[T; 4]; 4]) -> T {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    // Laplace expansion along the first two rows.
    minor(0, 1, 0, 1) * minor(2, 3, 2, 3) - minor(0, 1, 0, 2) * minor(2, 3, 1, 3)
        + minor(0, 1, 0, 3) * minor(2, 3, 1, 2)
        + minor(0, 1, 1, 2) * minor(2, 3, 0, 3)
        - minor(0, 1, 1, 3) * minor(2, 3, 0, 2)
        + minor(0, 1, 2, 3) * minor(2, 3, 0, 1)
}

/// A 2-vector of ℝ⁴ in the basis `(e01, e02, e03, e23, e31, e12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivector<T> {
    pub c: [T; 6],
}

impl<T: Scalar> Bivector<T> {
    pub fn new(c: [T; 6]) -> Self {
        Self { c }
    }

    /// `x ∧ y`.
    pub fn wedge(x: Quaternion<T>, y: Quaternion<T>) -> Self {
        let (x, y) = (x.to_array(), y.to_array());
        let w = |a: usize, b: usize| x[a] * y[b] - x[b] * y[a];
        Self::new([w(0, 1), w(0, 2), w(0, 3), w(2, 3), w(3, 1), w(1, 2)])
    }

    /// Hodge star for the orientation of [`vol`].
    pub fn hodge(self) -> Self {
        let c = self.c;
        Self::new([-c[3], -c[4], -c[5], -c[0], -c[1], -c[2]])
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.c.map(|v| v * s))
    }

    pub fn norm(self) -> T {
        self.c.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
    }

    /// Coefficient of `e0123` in `ω ∧ ω`.
    pub fn wedge_self(self) -> T {
        let c = self.c;
        T::lit(2.0) * (c[0] * c[3] + c[1] * c[4] + c[2] * c[5])
    }

    /// `(ω + *ω)/2`.
    pub fn self_dual_part(self) -> Self {
        (self + self.hodge()).scale(T::lit(0.5))
    }

    /// `(ω - *ω)/2`.
    pub fn anti_self_dual_part(self) -> Self {
        (self + self.hodge().scale(-T::one())).scale(T::lit(0.5))
    }

    /// Coordinates in the orthonormal basis `(e0k - *e0k)/√2` of the
    /// anti-self-dual subspace.
    pub fn anti_self_dual_coords(self) -> [T; 3] {
        let s = T::SQRT_2().recip();
        let c = self.c;
        [(c[0] + c[3]) * s, (c[1] + c[4]) * s, (c[2] + c[5]) * s]
    }

    /// Coordinates in the orthonormal basis `(e0k + *e0k)/√2` of the
    /// self-dual subspace.
    pub fn self_dual_coords(self) -> [T; 3] {
        let s = T::SQRT_2().recip();
        let c = self.c;
        [(c[0] - c[3]) * s, (c[1] - c[4]) * s, (c[2] - c[5]) * s]
    }

    /// Reassembles `(Σ aₖ τₖ + Σ bₖ σₖ)` from anti-self-dual coordinates `a`
    /// and self-dual coordinates `b`.
    pub fn from_dual_coords(a: [T; 3], b: [T; 3]) -> Self {
        let s = T::SQRT_2().recip();
        Self::new([
            (a[0] + b[0]) * s,
            (a[1] + b[1]) * s,
            (a[2] + b[2]) * s,
            (a[0] - b[0]) * s,
            (a[1] - b[1]) * s,
            (a[2] - b[2]) * s,
        ])
    }
}

impl<T: Scalar> Add for Bivector<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a = *a + b);
        Self::new(c)
    }
}

fn check_orthonormal<T: Scalar>(x: Quaternion<T>, y: Quaternion<T>) -> Result<()> {
    let tol = T::lit(VALIDATION_TOL);
    let bad = (x.norm() - T::one()).abs() > tol || (y.norm() - T::one()).abs() > tol || x.dot(y).abs() > tol;
    if bad {
        return Err(Error::InvalidFrame(format!(
            "|x| = {}, |y| = {}, <x,y> = {}",
            x.norm(),
            y.norm(),
            x.dot(y)
        )));
    }
    Ok(())
}

/// Splits the plane bivector `x ∧ y` into its Grassmann factors `(m, n)`.
///
/// `m` is the normalized anti-self-dual part and `n` the normalized
/// self-dual part, each read as an imaginary unit quaternion. For the
/// oriented plane spanned by `(x, m·x)` these satisfy `m·x = x·n`.
pub fn wedge_split<T: Scalar>(
    x: Quaternion<T>,
    y: Quaternion<T>,
) -> Result<(ImagUnitQuaternion<T>, ImagUnitQuaternion<T>)> {
    check_orthonormal(x, y)?;
    let omega = Bivector::wedge(x, y);
    let [a0, a1, a2] = omega.anti_self_dual_coords();
    let [b0, b1, b2] = omega.self_dual_coords();
    let m = ImagUnitQuaternion::normalize(Quaternion::imag(a0, a1, a2))?;
    let n = ImagUnitQuaternion::normalize(Quaternion::imag(b0, b1, b2))?;
    Ok((m, n))
}

/// A tangent vector of S³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector<T> {
    pub base: UnitQuaternion<T>,
    pub vec: Quaternion<T>,
}

impl<T: Scalar> TangentVector<T> {
    /// Validates `|<vec, base>| ≤ 1e-8 (1 + |vec|)` and projects onto `T_p S³`.
    pub fn new(base: UnitQuaternion<T>, vec: Quaternion<T>) -> Result<Self> {
        let d = vec.dot(base.get());
        if d.abs() > T::lit(VALIDATION_TOL) * (T::one() + vec.norm()) {
            return Err(Error::NotTangent(d.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self::project(base, vec))
    }

    /// Orthogonal projection of any ambient vector onto `T_p S³`.
    pub fn project(base: UnitQuaternion<T>, vec: Quaternion<T>) -> Self {
        Self {
            base,
            vec: vec.reject(base.get()),
        }
    }

    pub fn zero(base: UnitQuaternion<T>) -> Self {
        Self {
            base,
            vec: Quaternion::zero(),
        }
    }

    pub fn norm(self) -> T {
        self.vec.norm()
    }

    pub fn dot(self, o: Self) -> T {
        self.vec.dot(o.vec)
    }

    pub fn scale(self, s: T) -> Self {
        Self {
            base: self.base,
            vec: self.vec.scale(s),
        }
    }

    pub fn same_base(self, o: &Self) -> bool {
        self.base.get().max_abs_diff(o.base.get()) <= T::lit(1e-12)
    }
}

/// The unique `w` with `<w, y> = vol[p, v, u, y]` for all `y`.
///
/// For orthonormal `u ⊥ v` in `T_p S³` the triple `(u, w, v)` is a positive
/// orthonormal basis of `T_p S³`.
pub fn cross3<T: Scalar>(p: UnitQuaternion<T>, v: &TangentVector<T>, u: &TangentVector<T>) -> Result<TangentVector<T>> {
    let base = TangentVector::zero(p);
    if !v.same_base(&base) || !u.same_base(&base) {
        return Err(Error::BasePointMismatch);
    }
    Ok(TangentVector {
        base: p,
        vec: cross3_raw(p.get(), v.vec, u.vec),
    })
}

/// [`cross3`] on raw ambient vectors.
pub fn cross3_raw<T: Scalar>(p: Quaternion<T>, v: Quaternion<T>, u: Quaternion<T>) -> Quaternion<T> {
    Quaternion::from_array(std::array::from_fn(|i| vol(p, v, u, Quaternion::basis(i))))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    fn close(a: Q, b: Q, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn multiplication_table() {
        let (i, j, k) = (Q::i(), Q::j(), Q::k());
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Q::one());
        let q = Q::new(0.3, -1.2, 2.0, 0.5);
        assert_eq!(qmul(q, Q::one()), q);
        let h = Q::new(1.0, 1.0, 0.0, 0.0).scale(0.5f64.sqrt());
        assert!(close(h * h, i, 1e-15));
    }

    #[test]
    fn generic_over_f32() {
        let i = Quaternion::<f32>::i();
        let j = Quaternion::<f32>::j();
        assert_eq!(i * j, Quaternion::<f32>::k());
        let p = UnitQuaternion::<f32>::normalize(Quaternion::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        let r = conjugate_rotate(p, ImagUnitQuaternion::<f32>::i());
        assert!(r.get().max_abs_diff(Quaternion::j()) < 1e-6);
    }

    #[test]
    fn conjugate_rotate_examples() {
        let i = ImagUnitQuaternion::<f64>::i();
        assert_eq!(conjugate_rotate(UnitQuaternion::one(), i), i);
        let p = UnitQuaternion::normalize(Q::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert!(close(conjugate_rotate(p, i).get(), Q::j(), 1e-15));
    }

    #[test]
    fn unit_types_validate() {
        assert!(UnitQuaternion::new(Q::new(1.0 + 1e-10, 0.0, 0.0, 0.0)).is_ok());
        assert!(matches!(
            UnitQuaternion::new(Q::new(1.1, 0.0, 0.0, 0.0)),
            Err(Error::NotUnit(_))
        ));
        assert!(matches!(
            ImagUnitQuaternion::new(Q::new(0.1, 1.0, 0.0, 0.0)),
            Err(Error::NotImaginary(_))
        ));
        let m = ImagUnitQuaternion::new(Q::new(1e-12, 0.6, 0.8, 0.0)).unwrap();
        assert_eq!(m.get().w, 0.0);
    }

    #[test]
    fn wedge_split_examples() {
        let e = Q::basis;
        let (m, n) = wedge_split(e(0), e(1)).unwrap();
        assert!(close(m.get(), Q::i(), 1e-15) && close(n.get(), Q::i(), 1e-15));
        let (m, n) = wedge_split(e(0), e(2)).unwrap();
        assert!(close(m.get(), Q::j(), 1e-15) && close(n.get(), Q::j(), 1e-15));
        let (m, n) = wedge_split(e(1), e(0)).unwrap();
        assert!(close(m.get(), -Q::i(), 1e-15) && close(n.get(), -Q::i(), 1e-15));
        assert!(matches!(wedge_split(e(0), e(0)), Err(Error::InvalidFrame(_))));
        assert!(matches!(
            wedge_split(e(0), e(1).scale(1.1)),
            Err(Error::InvalidFrame(_))
        ));
    }

    #[test]
    fn hodge_star_is_an_involution_with_fixed_sign() {
        let w = Bivector::wedge(Q::basis(0), Q::basis(1));
        assert_eq!(w.hodge().c, [0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        let b = Bivector::new([0.1, -0.4, 0.3, 2.0, 0.5, -1.0]);
        assert_eq!(b.hodge().hodge(), b);
        // e01 ∧ *e01 = vol, which is -e0123.
        let w = Bivector::wedge(Q::basis(0), Q::basis(1));
        assert_eq!((w + w.hodge()).wedge_self() / 2.0, -1.0);
    }

    #[test]
    fn cross3_examples() {
        let p = UnitQuaternion::one();
        let tv = |q: Q| TangentVector::new(p, q).unwrap();
        let w = cross3(p, &tv(Q::k()), &tv(Q::i())).unwrap();
        assert!(close(w.vec, -Q::j(), 1e-15));
        let w = cross3(p, &tv(Q::i()), &tv(Q::i())).unwrap();
        assert_eq!(w.norm(), 0.0);
        let other = UnitQuaternion::normalize(Q::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        let u = TangentVector::new(other, Q::j()).unwrap();
        assert_eq!(cross3(p, &tv(Q::i()), &u), Err(Error::BasePointMismatch));
    }

    #[test]
    fn tangent_vector_rejects_normal_component() {
        let p = UnitQuaternion::<f64>::one();
        assert!(matches!(TangentVector::new(p, Q::one()), Err(Error::NotTangent(_))));
    }
}
