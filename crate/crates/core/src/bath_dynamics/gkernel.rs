use super::kernels::{sine_convolution, sine_convolution_ddot, sine_convolution_dot};
use super::spectral::SpectralDensity;
use crate::error::{invalid, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Minimum samples per period of the fastest frequency.
pub const POINTS_PER_PERIOD: f64 = 20.0;

#[derive(Debug, Clone)]
struct Level {
    step: f64,
    g: Vec<f64>,
    g_dot: Vec<f64>,
    g_ddot: Vec<f64>,
}

/// Solution of `g(t) = sin ω₀t + ∫₀ᵗ χ(t−t′) g(t′) dt′` on `[0, t_max]`.
///
/// The equation is solved by trapezoidal product integration at steps
/// `h, h/2, h/4`; values at the coarse nodes are Richardson-combined, which
/// removes the `h²` and `h⁴` terms of the trapezoid error expansion.
/// Quadratures against `g` ([`GTable::convolve`]) are combined the same way.
#[derive(Debug, Clone)]
pub struct GTable {
    pub spectral: SpectralDensity,
    pub mass: f64,
    pub bare_frequency: f64,
    pub t_max: f64,
    levels: [Level; 3],
}

fn richardson(x0: f64, x1: f64, x2: f64) -> f64 {
    (64.0 * x2 - 20.0 * x1 + x0) / 45.0
}

/// `χ`, `χ̇`, `χ̈` at lags `k·h` for `k = 0..=n`.
fn chi_tables(spectral: &SpectralDensity, mass: f64, w0: f64, h: f64, n: usize) -> [Vec<f64>; 3] {
    let pref = 2.0 / (mass * w0);
    let rows: Vec<[f64; 3]> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let tau = k as f64 * h;
            if k == 0 {
                return [0.0; 3];
            }
            [
                pref * spectral.integrate(|w| sine_convolution(w, w0, tau), tau),
                pref * spectral.integrate(|w| sine_convolution_dot(w, w0, tau), tau),
                pref * spectral.integrate(|w| sine_convolution_ddot(w, w0, tau), tau),
            ]
        })
        .collect();
    let mut out = [Vec::with_capacity(n + 1), Vec::with_capacity(n + 1), Vec::with_capacity(n + 1)];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            o.push(v);
        }
    }
    out
}

fn solve_level(chi: &[Vec<f64>; 3], stride: usize, w0: f64, h: f64, n: usize) -> Level {
    let mut g = vec![0.0; n + 1];
    for i in 1..=n {
        let mut s = 0.0;
        for k in 1..i {
            s += chi[0][(i - k) * stride] * g[k];
        }
        g[i] = (w0 * i as f64 * h).sin() + h * s;
    }
    let mut g_dot = vec![0.0; n + 1];
    let mut g_ddot = vec![0.0; n + 1];
    for i in 0..=n {
        let t = i as f64 * h;
        let (mut s1, mut s2) = (0.0, 0.0);
        for k in 1..i {
            s1 += chi[1][(i - k) * stride] * g[k];
            s2 += chi[2][(i - k) * stride] * g[k];
        }
        g_dot[i] = w0 * (w0 * t).cos() + h * s1;
        g_ddot[i] = -w0 * w0 * (w0 * t).sin() + h * s2;
    }
    Level { step: h, g, g_dot, g_ddot }
}

/// Tabulates `g`, `ġ`, `g̈`. `χ` and its derivatives come from the ω′-integral of the
/// spectral density; `ġ` and `g̈` from differentiating the integral equation,
/// using `χ(0) = χ̇(0) = χ̈(0) = 0`.
pub fn solve_g_kernel(
    spectral: &SpectralDensity,
    mass: f64,
    bare_frequency: f64,
    t_max: f64,
    step: f64,
) -> Result<GTable> {
    if !(mass > 0.0 && bare_frequency > 0.0 && t_max > 0.0 && step > 0.0) {
        return Err(invalid(format!(
            "g kernel needs m, ω₀, t_max, step > 0 (m = {mass}, ω₀ = {bare_frequency}, t_max = {t_max}, step = {step})"
        )));
    }
    let fastest = bare_frequency.max(spectral.max_frequency());
    let limit = 2.0 * PI / (POINTS_PER_PERIOD * fastest);
    if step > limit {
        return Err(invalid(format!(
            "step {step:e} too coarse: need ≤ {limit:e} ({POINTS_PER_PERIOD} points per period of ω = {fastest})"
        )));
    }
    let n = (t_max / step).ceil() as usize;
    let h = t_max / n as f64;
    let chi = chi_tables(spectral, mass, bare_frequency, h / 4.0, 4 * n);
    let levels = [
        solve_level(&chi, 4, bare_frequency, h, n),
        solve_level(&chi, 2, bare_frequency, h / 2.0, 2 * n),
        solve_level(&chi, 1, bare_frequency, h / 4.0, 4 * n),
    ];
    Ok(GTable { spectral: spectral.clone(), mass, bare_frequency, t_max, levels })
}

impl GTable {
    /// Coarse step.
    pub fn step(&self) -> f64 {
        self.levels[0].step
    }

    /// Coarse node index of `|t|`.
    pub fn index(&self, t: f64) -> Result<usize> {
        let u = t.abs() / self.step();
        let i = u.round();
        if (u - i).abs() > 1e-6 || t.abs() > self.t_max * (1.0 + 1e-12) {
            return Err(invalid(format!("t = {t} is not a table node (step {}, t_max {})", self.step(), self.t_max)));
        }
        Ok(i as usize)
    }

    fn combined(&self, i: usize, pick: impl Fn(&Level) -> &Vec<f64>) -> f64 {
        richardson(pick(&self.levels[0])[i], pick(&self.levels[1])[2 * i], pick(&self.levels[2])[4 * i])
    }

    /// `(g, ġ, g̈)` at a node; odd, even, odd in `t`.
    pub fn values(&self, t: f64) -> Result<(f64, f64, f64)> {
        let i = self.index(t)?;
        let s = t.signum();
        Ok((s * self.combined(i, |l| &l.g), self.combined(i, |l| &l.g_dot), s * self.combined(i, |l| &l.g_ddot)))
    }

    /// `∫₀ᵗ g(τ) K(t−τ) dτ` for a node `t ≥ 0`.
    pub fn convolve<K: Fn(f64) -> f64>(&self, t: f64, kernel: K) -> Result<f64> {
        if t < 0.0 {
            return Err(invalid("convolve needs t ≥ 0; use parity for negative times"));
        }
        let i = self.index(t)?;
        let est = |l: &Level, n: usize| {
            let h = l.step;
            // g(0) = 0, so only the upper trapezoid end carries a half weight
            let mut s = 0.5 * l.g[n] * kernel(0.0);
            for k in 1..n {
                s += l.g[k] * kernel((n - k) as f64 * h);
            }
            h * s
        };
        Ok(richardson(est(&self.levels[0], i), est(&self.levels[1], 2 * i), est(&self.levels[2], 4 * i)))
    }
}
