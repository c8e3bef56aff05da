use super::system::OscillatorSystemSpec;
use crate::special::{hermite_function, hermite_functions, laguerre_scaled};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `⟨x|n⟩` for the oscillator with parameters `system`.
pub fn eigenfunction_exact(n: usize, x: f64, system: &OscillatorSystemSpec) -> f64 {
    let l = system.length_scale();
    hermite_function(n, x / l) / l.sqrt()
}

/// `⟨x|k⟩` for `k = 0..=n_max`.
pub fn eigenfunctions_exact(n_max: usize, x: f64, system: &OscillatorSystemSpec) -> Vec<f64> {
    let l = system.length_scale();
    let s = l.sqrt();
    let mut v = hermite_functions(n_max, x / l);
    v.iter_mut().for_each(|e| *e /= s);
    v
}

/// Closed-form Wigner function of `|n⟩`:
/// `((−1)^n/πħ) e^{−2H/ħω} L_n(4H/ħω)`.
pub fn exact_oscillator_wigner(n: usize, x: f64, p: f64, system: &OscillatorSystemSpec) -> f64 {
    let (m, w, hbar) = (system.mass, system.frequency, system.hbar);
    let h = p * p / (2.0 * m) + 0.5 * m * w * w * x * x;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / (PI * hbar) * laguerre_scaled(n, 4.0 * h / (hbar * w))
}

/// `ψ̃(p) = (2πħ)^{−1/2} ∫ψ(x)e^{−ipx/ħ}dx` by the trapezoidal rule on
/// `[x_lo, x_hi]` with `count` nodes.
pub fn momentum_amplitude<F>(psi: F, p: f64, x_lo: f64, x_hi: f64, count: usize, hbar: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let h = (x_hi - x_lo) / (count - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..count {
        let x = x_lo + i as f64 * h;
        let w = if i == 0 || i + 1 == count { 0.5 } else { 1.0 };
        acc += psi(x) * Complex64::from_polar(w, -p * x / hbar);
    }
    acc * h / (2.0 * PI * hbar).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_peak_and_odd_parity() {
        let s = OscillatorSystemSpec::natural();
        assert!((eigenfunction_exact(0, 0.0, &s) - PI.powf(-0.25)).abs() < 1e-15);
        assert!((eigenfunction_exact(0, 0.0, &s) - 0.7511).abs() < 1e-4);
        assert_eq!(eigenfunction_exact(1, 0.0, &s), 0.0);
    }

    #[test]
    fn level_fifty_is_normalized() {
        let s = OscillatorSystemSpec::new(1.3, 1.0, 0.8, 0.9).unwrap();
        let l = s.length_scale();
        let (lo, hi, count) = (-16.0 * l, 16.0 * l, 6401);
        let h = (hi - lo) / (count - 1) as f64;
        let norm: f64 = (0..count).map(|i| eigenfunction_exact(50, lo + i as f64 * h, &s).powi(2)).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
    }

    #[test]
    fn eigenstates_are_orthogonal() {
        let s = OscillatorSystemSpec::natural();
        let count = 4001;
        let h = 24.0 / (count - 1) as f64;
        let mut g = [[0.0; 4]; 4];
        for i in 0..count {
            let v = eigenfunctions_exact(3, -12.0 + i as f64 * h, &s);
            for a in 0..4 {
                for b in 0..4 {
                    g[a][b] += v[a] * v[b] * h;
                }
            }
        }
        for (a, row) in g.iter().enumerate() {
            for (b, val) in row.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((val - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laguerre_wigner_values_at_origin() {
        let s = OscillatorSystemSpec::new(1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((exact_oscillator_wigner(0, 0.0, 0.0, &s) - 1.0 / (PI * 0.5)).abs() < 1e-14);
        assert!((exact_oscillator_wigner(1, 0.0, 0.0, &s) + 1.0 / (PI * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn ground_state_momentum_amplitude_is_gaussian() {
        let s = OscillatorSystemSpec::new(2.0, 1.0, 0.5, 1.0).unwrap();
        let psi = |x: f64| Complex64::new(eigenfunction_exact(0, x, &s), 0.0);
        for &p in &[0.0, 0.4, -1.1] {
            let got = momentum_amplitude(psi, p, -12.0, 12.0, 2001, s.hbar);
            let q = s.momentum_scale();
            let want = (PI.sqrt() * q).powf(-0.5) * (-0.5 * (p / q).powi(2)).exp();
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }
}
