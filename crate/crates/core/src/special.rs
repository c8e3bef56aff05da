//! Special functions evaluated by stable recurrences.

use std::f64::consts::PI;
use std::sync::LazyLock;

/// Rescaling threshold for the Hermite recurrence.
const RESCALE: f64 = 1e150;

/// Normalized Hermite functions `φ_k(ξ) = (2^k k! √π)^{-1/2} H_k(ξ) e^{-ξ²/2}`
/// for `k = 0..=n_max`, dimensionless argument.
///
/// The recurrence runs on `φ_k e^{ξ²/2}` with a running log-scale so that
/// neither the polynomial growth nor the Gaussian decay over- or underflows
/// before the final combination.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    hermite_functions_into(n_max, xi, &mut out);
    out
}

/// As [`hermite_functions`], writing into a reusable buffer.
pub fn hermite_functions_into(n_max: usize, xi: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0f64;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    out.push(cur * log_scale.exp());
    for k in 0..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(cur * log_scale.exp());
    }
}

/// Single normalized Hermite function `φ_n(ξ)`.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0f64;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    cur * log_scale.exp()
}

/// `Σ_k c_k φ_{lo+k}(ξ)` without storing the intermediate functions.
pub fn hermite_combination(lo: usize, coeffs: &[num_complex::Complex64], xi: f64) -> num_complex::Complex64 {
    let hi = lo + coeffs.len().saturating_sub(1);
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0f64;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    // Partial sums live in the current scale; rescaling divides them too.
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    if lo == 0 && !coeffs.is_empty() {
        acc += coeffs[0] * cur;
    }
    for k in 0..hi {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            acc /= RESCALE;
            log_scale += RESCALE.ln();
        }
        if k + 1 >= lo {
            acc += coeffs[k + 1 - lo] * cur;
        }
    }
    acc * log_scale.exp()
}

/// `e^{-z/2} L_k^{(α)}(z)` for `k = 0..=n_max`.
///
/// For `α ≥ 0, z ≥ 0` the scaled values are bounded by `C(k+α, k)`, so the
/// three-term recurrence cannot overflow. The leading factor underflows
/// for `z > ~1450`; callers only need that range for degrees below ~350.
pub fn laguerre_scaled_into(n_max: usize, alpha: f64, z: f64, out: &mut Vec<f64>) {
    out.clear();
    let e = (-0.5 * z).exp();
    out.push(e);
    if n_max == 0 {
        return;
    }
    let mut prev = e;
    let mut cur = (1.0 + alpha - z) * e;
    out.push(cur);
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - z) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        out.push(cur);
    }
}

/// `L_n(z)` (ordinary Laguerre polynomial) times `e^{-z/2}`.
pub fn laguerre_scaled(n: usize, z: f64) -> f64 {
    let e = (-0.5 * z).exp();
    if n == 0 {
        return e;
    }
    let mut prev = e;
    let mut cur = (1.0 - z) * e;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - z) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Smallest length `≥ n` whose prime factors are all in {2, 3, 5, 7}.
pub fn fast_fft_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// `u − sin u`, series below |u| = 0.5 to avoid cancellation.
pub fn u_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.5 {
        let u2 = u * u;
        u * u2 * (1.0 / 6.0 - u2 * (1.0 / 120.0 - u2 * (1.0 / 5040.0 - u2 * (1.0 / 362_880.0 - u2 / 39_916_800.0))))
    } else {
        u - u.sin()
    }
}

/// `sin u − u cos u`, series below |u| = 0.5.
pub fn sin_minus_u_cos(u: f64) -> f64 {
    if u.abs() < 0.5 {
        let u2 = u * u;
        u * u2
            * (1.0 / 3.0
                - u2 * (1.0 / 30.0
                    - u2 * (1.0 / 840.0 - u2 * (1.0 / 45_360.0 - u2 * (1.0 / 3_991_680.0 - u2 / 518_918_400.0)))))
    } else {
        u.sin() - u * u.cos()
    }
}

/// `1 − cos u` without cancellation.
pub fn one_minus_cos(u: f64) -> f64 {
    2.0 * (0.5 * u).sin().powi(2)
}

/// `sin u / u`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

static GL10: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| gauss_legendre(10));

/// Composite 10-point Gauss–Legendre over `[a, b]` split into `panels` equal panels.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = &*GL10;
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        sum += 0.5 * h * s;
    }
    sum
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
