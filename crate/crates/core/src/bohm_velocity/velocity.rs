use crate::error::{invalid, Error, Result};
use crate::phase_space::{ClassicalOrbit, OscillatorSystemSpec, WignerField};
use num_complex::Complex64;

/// Density floor relative to the peak position density.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// `(∫p W dp, ∫W dp)` at column `i` (trapezoid).
fn column_moments(w: &WignerField, i: usize) -> (f64, f64) {
    let g = &w.grid;
    let (mut s1, mut s0) = (0.0, 0.0);
    for (j, v) in w.row(i).iter().enumerate() {
        let wt = if j == 0 || j + 1 == g.np { 0.5 } else { 1.0 };
        s0 += wt * v;
        s1 += wt * v * g.p(j);
    }
    (s1 * g.dp, s0 * g.dp)
}

/// `v̄_E(x) = ∫p W dp / (m ∫W dp)`, with both moments linearly interpolated
/// between grid columns. `floor` is relative to the largest column density.
pub fn ensemble_velocity(w: &WignerField, x: f64, mass: f64, floor: f64) -> Result<f64> {
    let g = &w.grid;
    let u = (x - g.x_min) / g.dx;
    if !(u >= 0.0 && u <= (g.nx - 1) as f64) {
        return Err(invalid(format!("x = {x} outside the field's grid")));
    }
    let i0 = (u.floor() as usize).min(g.nx - 2);
    let f = u - i0 as f64;
    let (a1, a0) = column_moments(w, i0);
    let (b1, b0) = column_moments(w, i0 + 1);
    let num = (1.0 - f) * a1 + f * b1;
    let den = (1.0 - f) * a0 + f * b0;
    let peak = w.marginal_x().into_iter().fold(0.0, f64::max);
    let floor_abs = floor * peak;
    if !(den > floor_abs) {
        return Err(Error::UndefinedVelocity { x, density: den, floor: floor_abs });
    }
    Ok(num / (mass * den))
}

/// `v̄_E` at every grid column; `None` where the density is below the floor.
pub fn ensemble_velocity_profile(w: &WignerField, mass: f64, floor: f64) -> Vec<Option<f64>> {
    let moments: Vec<(f64, f64)> = (0..w.grid.nx).map(|i| column_moments(w, i)).collect();
    let peak = moments.iter().map(|m| m.1).fold(0.0, f64::max);
    moments.into_iter().map(|(m1, m0)| if m0 > floor * peak { Some(m1 / (mass * m0)) } else { None }).collect()
}

/// `(ħ/m) Im(ψ*∂ψ)/|ψ|²` with a five-point central difference of step `h`.
/// `floor` is an absolute density floor.
pub fn initial_velocity<F>(psi: F, x: f64, system: &OscillatorSystemSpec, h: f64, floor: f64) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    let c = psi(x);
    let dens = c.norm_sqr();
    if !(dens > floor) {
        return Err(Error::UndefinedVelocity { x, density: dens, floor });
    }
    let d = (psi(x - 2.0 * h) - psi(x - h) * 8.0 + psi(x + h) * 8.0 - psi(x + 2.0 * h)) / (12.0 * h);
    Ok(system.hbar / system.mass * (c.conj() * d).im / dens)
}

/// `(ħ/m) Im(∂_x ρ(x, x′)|_{x′=x}) / ρ(x, x)` from a density-matrix sampler.
pub fn density_matrix_velocity<F>(rho: F, x: f64, system: &OscillatorSystemSpec, h: f64, floor: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let diag = rho(x, x).re;
    if !(diag > floor) {
        return Err(Error::UndefinedVelocity { x, density: diag, floor });
    }
    let d = (rho(x - 2.0 * h, x) - rho(x - h, x) * 8.0 + rho(x + h, x) * 8.0 - rho(x + 2.0 * h, x)) / (12.0 * h);
    Ok(system.hbar / system.mass * d.im / diag)
}

/// `(p_cl/m − |v|)/(p_cl/m)`; non-negative inside the classical band.
pub fn classical_band_margin(v: f64, orbit: &ClassicalOrbit, x: f64) -> Result<f64> {
    if !orbit.is_inside(x) {
        return Err(Error::OutOfValidity(format!("band margin undefined at |x| = {} ≥ x_max", x.abs())));
    }
    let vcl = orbit.p_cl(x) / orbit.mass;
    Ok((vcl - v.abs()) / vcl)
}
