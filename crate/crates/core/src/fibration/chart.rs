//! Stereographic charts of the two Grassmann factors.

use num_complex::Complex64;

use crate::quat::{ImagUnitQuaternion, Quaternion};

type Im = ImagUnitQuaternion<f64>;
type Q = Quaternion<f64>;

/// Stereographic projection from `-k` (chart origin at `+k`), optionally
/// composed with complex conjugation.
///
/// The S²₋ chart is orientation-preserving for the outward normal, so
/// `u ↦ m × u` reads as multiplication by `i`. The S²₊ chart is reversed, so
/// `u ↦ -(n × u)` reads as multiplication by `i` there. Maps depending on
/// `z` only are then exactly the maps intertwining the two rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartSpec {
    pub reversed: bool,
}

impl ChartSpec {
    pub const MINUS: ChartSpec = ChartSpec { reversed: false };
    pub const PLUS: ChartSpec = ChartSpec { reversed: true };

    /// Chart coordinate, or `None` at the projection pole `-k`.
    pub fn to_chart(self, a: Im) -> Option<Complex64> {
        let [x, y, z] = a.vector();
        let d = 1.0 + z;
        if d <= f64::MIN_POSITIVE {
            return None;
        }
        let w = Complex64::new(x / d, y / d);
        Some(if self.reversed { w.conj() } else { w })
    }

    pub fn from_chart(self, w: Complex64) -> Im {
        let z = if self.reversed { w.conj() } else { w };
        let s = 1.0 + z.norm_sqr();
        Im::normalize(Q::imag(2.0 * z.re / s, 2.0 * z.im / s, (1.0 - z.norm_sqr()) / s))
            .expect("inverse stereographic image is a unit vector")
    }

    /// Length scale `|∂a/∂x| = 2 / (1 + |w|²)` of the chart at `w`.
    pub fn scale(w: Complex64) -> f64 {
        2.0 / (1.0 + w.norm_sqr())
    }

    /// Orthonormal tangent frame `(∂ₓ, ∂ᵧ)/scale` at chart point `w`.
    pub fn frame(self, w: Complex64) -> (Q, Q) {
        let z = if self.reversed { w.conj() } else { w };
        let (x, y) = (z.re, z.im);
        let s = 1.0 + x * x + y * y;
        let s2 = s * s;
        let dx = Q::imag(2.0 / s - 4.0 * x * x / s2, -4.0 * x * y / s2, -4.0 * x / s2);
        let dy = Q::imag(-4.0 * x * y / s2, 2.0 / s - 4.0 * y * y / s2, -4.0 * y / s2);
        let k = s / 2.0;
        let dy = if self.reversed { -dy } else { dy };
        (dx.scale(k), dy.scale(k))
    }
}
