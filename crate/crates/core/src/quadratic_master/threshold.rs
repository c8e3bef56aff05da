use super::coefficients::MasterEqCoefficients;
use super::propagator::{integrate_propagator, integrate_propagator_at, DEFAULT_TOLERANCE};
use crate::error::{invalid, Result};

/// Outcome of the `det M(t) = ħ²` search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Threshold {
    /// First crossing; `monotone` reports whether `det M` was nondecreasing
    /// on the scan up to the crossing.
    At {
        time: f64,
        monotone: bool,
    },
    NotReached {
        horizon: f64,
        max_det_m: f64,
    },
}

impl Threshold {
    pub fn time(&self) -> Option<f64> {
        match self {
            Threshold::At { time, .. } => Some(*time),
            Threshold::NotReached { .. } => None,
        }
    }
}

const SCAN_POINTS: usize = 400;

/// Smallest `t ≤ horizon` with `det M(t) = ħ²`, past which every propagated
/// Wigner function is non-negative. Scan, then bisection.
pub fn nonnegativity_threshold(coeffs: &MasterEqCoefficients, hbar: f64, horizon: f64) -> Result<Threshold> {
    if !(hbar > 0.0 && horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("ħ and horizon must be positive"));
    }
    if !coeffs.is_diffusive() {
        return Ok(Threshold::NotReached { horizon, max_det_m: 0.0 });
    }
    let target = hbar * hbar;
    let times: Vec<f64> = (1..=SCAN_POINTS).map(|k| horizon * k as f64 / SCAN_POINTS as f64).collect();
    let props = integrate_propagator_at(coeffs, &times, DEFAULT_TOLERANCE)?;
    let dets: Vec<f64> = props.iter().map(|p| p.det_m()).collect();
    let Some(k) = dets.iter().position(|&d| d >= target) else {
        return Ok(Threshold::NotReached { horizon, max_det_m: dets.iter().copied().fold(0.0, f64::max) });
    };
    let monotone = dets[..=k].windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let (mut lo, mut hi) = (if k == 0 { 0.0 } else { times[k - 1] }, times[k]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if integrate_propagator(coeffs, mid, DEFAULT_TOLERANCE)?.det_m() >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(Threshold::At { time: 0.5 * (lo + hi), monotone })
}
