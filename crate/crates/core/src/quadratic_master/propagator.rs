use super::coefficients::MasterEqCoefficients;
use crate::error::{invalid, numerical, Result};
use crate::linalg::Mat2;
use serde::{Deserialize, Serialize};

/// Default relative tolerance of the propagator integration.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const COND_LIMIT: f64 = 1e12;

/// `(A(t), M(t))` of the Gaussian Wigner propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPropagator {
    pub time: f64,
    pub a: Mat2,
    pub m: Mat2,
}

impl GaussianPropagator {
    pub fn identity() -> Self {
        Self { time: 0.0, a: Mat2::IDENTITY, m: Mat2::ZERO }
    }

    /// Propagator for `self` followed by `later`:
    /// `A = A₂A₁`, `M = M₁ + A₁⁻¹M₂A₁⁻ᵀ`.
    pub fn then(&self, later: &GaussianPropagator) -> Result<Self> {
        let ai = self.a.inverse().ok_or_else(|| numerical("singular A in composition"))?;
        Ok(Self { time: self.time + later.time, a: later.a * self.a, m: self.m + ai * later.m * ai.transpose() })
    }

    pub fn a_inverse(&self) -> Option<Mat2> {
        self.a.inverse()
    }

    pub fn det_m(&self) -> f64 {
        self.m.det()
    }
}

/// `A(t)` for the closed oscillator, solving `dA/dt = −KA` with
/// `K = [[0, −1/m], [mω², 0]]`.
pub fn free_oscillator_a(mass: f64, frequency: f64, t: f64) -> Mat2 {
    let (s, c) = (frequency * t).sin_cos();
    Mat2::new(c, s / (mass * frequency), -mass * frequency * s, c)
}

/// Leading short-time CL form `M ≈ 4Dt [[t²/3m², −t/2m], [−t/2m, 1]]`.
pub fn cl_short_time_m(diffusion: f64, mass: f64, t: f64) -> Mat2 {
    Mat2::symmetric(t * t / (3.0 * mass * mass), -t / (2.0 * mass), 1.0).scale(4.0 * diffusion * t)
}

type State = [f64; 7];

fn pack(a: &Mat2, m: &Mat2) -> State {
    [a.0[0][0], a.0[0][1], a.0[1][0], a.0[1][1], m.0[0][0], m.0[0][1], m.0[1][1]]
}

fn unpack(y: &State) -> (Mat2, Mat2) {
    (Mat2::new(y[0], y[1], y[2], y[3]), Mat2::symmetric(y[4], y[5], y[6]))
}

fn rhs(c: &MasterEqCoefficients, t: f64, y: &State) -> State {
    let (a, _) = unpack(y);
    let da = -(c.k(t) * a);
    let ai = a.inverse().unwrap_or(Mat2::ZERO);
    let dm = (ai * c.j(t) * ai.transpose()).scale(4.0);
    pack(&da, &dm)
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn check_step(t: f64, y: &State) -> Result<()> {
    let (a, m) = unpack(y);
    if !a.is_finite() || !m.is_finite() {
        return Err(numerical(format!("non-finite propagator at t = {t}")));
    }
    let cond = a.condition_number();
    if !(cond <= COND_LIMIT) {
        return Err(numerical(format!(
            "A(t) near-singular at t = {t}: condition number {cond:.3e} > {COND_LIMIT:.0e}"
        )));
    }
    let ((lo, _), _) = m.symmetric_eigen();
    if lo < -1e-10 * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(numerical(format!("M(t) lost positive semidefiniteness at t = {t}: eigenvalue {lo:e}")));
    }
    Ok(())
}

/// Integrates `dA/dt = −KA`, `dM/dt = 4A⁻¹J A⁻ᵀ` from 0 and records the
/// propagator at each of the non-decreasing `times`.
pub fn integrate_propagator_at(
    coeffs: &MasterEqCoefficients,
    times: &[f64],
    tolerance: f64,
) -> Result<Vec<GaussianPropagator>> {
    if !(tolerance > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("propagator times must be finite, non-negative and non-decreasing"));
    }
    let atol = 1e-6 * tolerance;
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = pack(&Mat2::IDENTITY, &Mat2::ZERO);
    let mut k0 = rhs(coeffs, t, &y);
    // Initial step from the generator scale.
    let scale = coeffs.k(0.0).max_abs().max(1e-300);
    let mut h = (0.01 / scale).min(times.last().copied().unwrap_or(0.0).max(1e-300));
    for &target in times {
        let mut rejects = 0usize;
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            let mut ks = [[0.0; 7]; 7];
            ks[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (i, v) in ys.iter_mut().enumerate() {
                    for r in 0..s {
                        *v += step * A[s][r] * ks[r][i];
                    }
                }
                ks[s] = rhs(coeffs, t + C[s] * step, &ys);
            }
            // Stage 7 is evaluated at the 5th-order solution (FSAL).
            let mut y_new = y;
            for (i, v) in y_new.iter_mut().enumerate() {
                for r in 0..6 {
                    *v += step * A[6][r] * ks[r][i];
                }
            }
            let k7 = rhs(coeffs, t + step, &y_new);
            ks[6] = k7;
            let mut err = 0.0;
            for i in 0..7 {
                let e: f64 = (0..7).map(|r| E[r] * ks[r][i]).sum::<f64>() * step;
                let sc = atol + tolerance * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / 7.0).sqrt();
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k0 = k7;
                check_step(t, &y)?;
                let fac = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
                if !last {
                    h = step * fac.clamp(0.2, 5.0);
                }
            } else {
                rejects += 1;
                if rejects > 10_000 {
                    return Err(numerical(format!("step size collapse near t = {t}")));
                }
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
                h = step * fac.min(0.9);
            }
        }
        let (a, m) = unpack(&y);
        out.push(GaussianPropagator { time: target, a, m });
    }
    Ok(out)
}

/// Propagator at a single time.
pub fn integrate_propagator(coeffs: &MasterEqCoefficients, t: f64, tolerance: f64) -> Result<GaussianPropagator> {
    Ok(integrate_propagator_at(coeffs, &[t], tolerance)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::OscillatorSystemSpec;
    use crate::quadratic_master::{assemble_cl_coefficients, CaldeiraLeggettParams, Coefficient};
    use proptest::prelude::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn starts_from_identity() {
        let c = MasterEqCoefficients::constant(1.0, 1.0, 0.0, 0.1, 0.0, 0.0, 1.0);
        let p = integrate_propagator(&c, 0.0, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(p.a, Mat2::IDENTITY);
        assert_eq!(p.m, Mat2::ZERO);
    }

    #[test]
    fn closed_oscillator_is_a_rotation() {
        let (m, w) = (1.7, 0.6);
        let c = MasterEqCoefficients::constant(m * w * w, 1.0 / m, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &t in &[0.1, 1.0, 7.3, 25.0] {
            let p = integrate_propagator(&c, t, DEFAULT_TOLERANCE).unwrap();
            assert!(close(&p.a, &free_oscillator_a(m, w, t), 1e-8), "t={t} {:?}", p.a);
            assert_eq!(p.m, Mat2::ZERO);
        }
    }

    #[test]
    fn short_time_cl_matrix() {
        let sys = OscillatorSystemSpec::natural();
        // D = 2mγk_BT = 1 with γ = 0.01.
        let c = assemble_cl_coefficients(&sys, &CaldeiraLeggettParams::new(0.01, 50.0, 1e3).unwrap());
        let p = integrate_propagator(&c, 0.1, DEFAULT_TOLERANCE).unwrap();
        let want = cl_short_time_m(1.0, 1.0, 0.1);
        assert!((want.get(0, 0) - 1.333e-3).abs() < 1e-6 && (want.get(0, 1) + 2e-2).abs() < 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.m.get(i, j) / want.get(i, j) - 1.0).abs() < 0.05);
            }
        }
    }

    #[test]
    fn matches_time_independent_matrix_exponential() {
        // A = exp(−Kt) for constant K; compare against a Taylor series.
        let c = MasterEqCoefficients::constant(2.0, 0.5, 0.3, 0.2, 0.1, -0.05, 0.4);
        let t = 1.3;
        let k = c.k(0.0).scale(-t);
        let mut term = Mat2::IDENTITY;
        let mut sum = Mat2::IDENTITY;
        for n in 1..40 {
            term = (term * k).scale(1.0 / n as f64);
            sum = sum + term;
        }
        let p = integrate_propagator(&c, t, 1e-11).unwrap();
        assert!(close(&p.a, &sum, 1e-9));
    }

    #[test]
    fn tabulated_constant_equals_constant() {
        let c = MasterEqCoefficients::constant(1.0, 1.0, 0.0, 0.05, 0.0, 0.0, 0.3);
        let mut d = c.clone();
        d.j22 = Coefficient::table(vec![0.0, 10.0], vec![0.3, 0.3]).unwrap();
        let a = integrate_propagator(&c, 2.0, DEFAULT_TOLERANCE).unwrap();
        let b = integrate_propagator(&d, 2.0, DEFAULT_TOLERANCE).unwrap();
        assert!(close(&a.m, &b.m, 1e-12) && close(&a.a, &b.a, 1e-12));
    }

    #[test]
    fn ill_conditioned_growth_aborts() {
        // Strongly hyperbolic K drives cond(A) past the limit.
        let c = MasterEqCoefficients::constant(-100.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let r = integrate_propagator(&c, 5.0, DEFAULT_TOLERANCE);
        assert!(matches!(r, Err(crate::Error::Numerical(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn semigroup_composition(t1 in 0.01f64..1.5, t2 in 0.01f64..1.5, g in 0.0f64..0.3, d in 0.0f64..2.0) {
            let c = MasterEqCoefficients::constant(1.3, 0.8, 0.1, g, 0.05 * d, -0.02 * d, d);
            let p1 = integrate_propagator(&c, t1, 1e-11).unwrap();
            let p2 = integrate_propagator(&c, t2, 1e-11).unwrap();
            let p12 = integrate_propagator(&c, t1 + t2, 1e-11).unwrap();
            let comp = p1.then(&p2).unwrap();
            prop_assert!(close(&comp.a, &p12.a, 1e-8));
            prop_assert!(close(&comp.m, &p12.m, 1e-8 * (1.0 + p12.m.max_abs())));
            let ((lo, _), _) = p12.m.symmetric_eigen();
            prop_assert!(lo >= -1e-10 * (1.0 + p12.m.max_abs()));
        }
    }
}
