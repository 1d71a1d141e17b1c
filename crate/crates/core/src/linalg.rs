//! 2×2 real matrices.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    /// Quarter-turn `[[0, -1], [1, 0]]` of a positively oriented frame.
    pub const QUARTER_TURN: Mat2 = Mat2([[0.0, -1.0], [1.0, 0.0]]);

    pub fn from_columns(c0: [f64; 2], c1: [f64; 2]) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn transpose(self) -> Self {
        let a = self.0;
        Mat2([[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(self) -> f64 {
        let a = self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    pub fn scale(self, s: f64) -> Self {
        Mat2(self.0.map(|r| r.map(|v| v * s)))
    }

    pub fn frobenius(self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn apply(self, v: [f64; 2]) -> [f64; 2] {
        let a = self.0;
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    /// Singular values, largest first.
    pub fn singular_values(self) -> [f64; 2] {
        let a = self.0;
        // σ₁ ± σ₂ are the norms of the conformal and anti-conformal parts.
        let p = ((a[0][0] + a[1][1]).powi(2) + (a[1][0] - a[0][1]).powi(2)).sqrt();
        let q = ((a[0][0] - a[1][1]).powi(2) + (a[1][0] + a[0][1]).powi(2)).sqrt();
        [(p + q) / 2.0, ((p - q) / 2.0).abs()]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
