//! `F(w₁, w₂, s) = ∫₀^s sin w₂(s−s′) sin w₁s′ ds′
//!              = (w₁ sin w₂s − w₂ sin w₁s)/(w₁² − w₂²)`
//! and its first two `s`-derivatives, in forms that stay exact at `w₁ = w₂`.

use crate::special::sinc;

pub fn sine_convolution(w1: f64, w2: f64, s: f64) -> f64 {
    let sum = w1 + w2;
    let diff = w1 - w2;
    0.5 * (((w1 * s).sin() + (w2 * s).sin()) / sum - s * (0.5 * sum * s).cos() * sinc(0.5 * diff * s))
}

pub fn sine_convolution_dot(w1: f64, w2: f64, s: f64) -> f64 {
    let sum = w1 + w2;
    let diff = w1 - w2;
    w1 * w2 * s * (0.5 * sum * s).sin() * sinc(0.5 * diff * s) / sum
}

/// Uses `F̈ + w₂²F = w₂ sin w₁s`.
pub fn sine_convolution_ddot(w1: f64, w2: f64, s: f64) -> f64 {
    w2 * (w1 * s).sin() - w2 * w2 * sine_convolution(w1, w2, s)
}
