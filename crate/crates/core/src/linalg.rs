//! Fixed-size 2×2 real matrices for phase-space propagators.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn symmetric(a11: f64, a12: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a12, a22]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    /// Inverse, or `None` when the determinant is exactly zero or not finite.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(self.0[1][1] / d, -self.0[0][1] / d, -self.0[1][0] / d, self.0[0][0] / d))
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(self.0[0][0] * s, self.0[0][1] * s, self.0[1][0] * s, self.0[1][1] * s)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.0[0][0] * v[0] + self.0[0][1] * v[1], self.0[1][0] * v[0] + self.0[1][1] * v[1]]
    }

    /// `vᵀ·self·v`.
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        let w = self.apply(v);
        v[0] * w[0] + v[1] * w[1]
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        let s: f64 = self.0.iter().flatten().map(|x| x * x).sum();
        let d = self.det().abs();
        let disc = (s * s - 4.0 * d * d).max(0.0).sqrt();
        let hi = ((s + disc) / 2.0).sqrt();
        let lo = if hi > 0.0 { d / hi } else { 0.0 };
        (hi, lo)
    }

    /// Spectral norm.
    pub fn norm2(&self) -> f64 {
        self.singular_values().0
    }

    pub fn condition_number(&self) -> f64 {
        let (hi, lo) = self.singular_values();
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Eigen-decomposition of a symmetric matrix: eigenvalues (descending)
    /// and the unit eigenvector of the largest one.
    pub fn symmetric_eigen(&self) -> ((f64, f64), [f64; 2]) {
        let a = self.0[0][0];
        let b = self.0[0][1];
        let c = self.0[1][1];
        let mean = 0.5 * (a + c);
        let half = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let l1 = mean + half;
        let l2 = mean - half;
        let v = if b.abs() > 1e-300 {
            let v = [l1 - c, b];
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            [v[0] / n, v[1] / n]
        } else if a >= c {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        ((l1, l2), v)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.0[0][0] + o.0[0][0],
            self.0[0][1] + o.0[0][1],
            self.0[1][0] + o.0[1][0],
            self.0[1][1] + o.0[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(s)
    }
}
