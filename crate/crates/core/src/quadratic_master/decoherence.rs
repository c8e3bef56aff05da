use super::coefficients::CaldeiraLeggettParams;
use crate::error::{invalid, Error, Result};
use crate::phase_space::{OscillatorSystemSpec, WignerField};
use num_complex::Complex64;

/// Short-time position-basis suppression `exp[−Λt(x − x′)²]`, valid for
/// `ωt < 0.1` and `γt < 0.1`.
pub fn position_decoherence_factor(
    cl: &CaldeiraLeggettParams,
    system: &OscillatorSystemSpec,
    t: f64,
    x: f64,
    x_prime: f64,
) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("time must be finite and non-negative"));
    }
    let wt = system.frequency * t;
    let gt = cl.gamma * t;
    if wt >= 0.1 || gt >= 0.1 {
        return Err(Error::OutOfValidity(format!(
            "short-time factor needs ωt < 0.1 and γt < 0.1 (ωt = {wt}, γt = {gt}); use the full propagator"
        )));
    }
    Ok((-cl.localization_rate(system) * t * (x - x_prime).powi(2)).exp())
}

/// `ρ(x_i − y/2, x_i + y/2) = ∫dp W(x_i, p) e^{−ipy/ħ}` at grid column `i`.
pub fn density_matrix_element(w: &WignerField, i: usize, y: f64, hbar: f64) -> Complex64 {
    let g = &w.grid;
    let row = w.row(i);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in row.iter().enumerate() {
        let wt = if j == 0 || j + 1 == g.np { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(wt * v, -g.p(j) * y / hbar);
    }
    acc * g.dp
}
