use super::propagator::GaussianPropagator;
use crate::error::{invalid, Result};
use crate::phase_space::{EnergyBandState, GridSpec, OscillatorSystemSpec, WignerField};
use crate::special::{laguerre_scaled_into, ln_factorials};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Characteristic function `∫W e^{−iq·η}dη = ⟨ψ|D(α)|ψ⟩` of a band state,
/// `α = (q_pħ/ℓ − iq_xℓ)/√2`.
struct BandCharacteristic<'a> {
    state: &'a EnergyBandState,
    ell: f64,
    hbar: f64,
    ln_fact: Vec<f64>,
    cutoff: f64,
}

impl BandCharacteristic<'_> {
    fn eval(&self, q: [f64; 2], buf: &mut Vec<f64>) -> Complex64 {
        let alpha = Complex64::new(q[1] * self.hbar / self.ell, -q[0] * self.ell) / 2f64.sqrt();
        let z = alpha.norm_sqr();
        if z.sqrt() > self.cutoff {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.state.coefficients();
        let lo = self.state.lowest_level();
        let hi = self.state.highest_level();
        let minus_conj = -alpha.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut apow = Complex64::new(1.0, 0.0);
        let mut mpow = Complex64::new(1.0, 0.0);
        for d in 0..=(hi - lo) {
            laguerre_scaled_into(hi - d, d as f64, z, buf);
            for n in lo..=(hi - d) {
                let m = n + d;
                let s = (0.5 * (self.ln_fact[n] - self.ln_fact[m])).exp() * buf[n];
                let (cm, cn) = (c[m - lo], c[n - lo]);
                acc += cm.conj() * cn * apow * s;
                if d > 0 {
                    acc += cn.conj() * cm * mpow * s;
                }
            }
            apow *= alpha;
            mpow *= minus_conj;
        }
        acc
    }
}

/// Frequency of FFT bin `a` for length `n` and spacing `h`.
fn wavenumber(a: usize, n: usize, h: f64) -> f64 {
    let f = if a < n.div_ceil(2) { a as i64 } else { a as i64 - n as i64 };
    2.0 * PI * f as f64 / (n as f64 * h)
}

/// Propagated Wigner function of a band state on `grid`, evaluated in
/// Fourier space: `χ_t(k) = χ₀(Aᵀk)·exp(−(Aᵀk)ᵀM(Aᵀk)/4)` followed by one
/// inverse 2D FFT.
///
/// The grid must contain the propagated state; images outside it alias.
pub fn propagate_band_state(
    prop: &GaussianPropagator,
    state: &EnergyBandState,
    system: &OscillatorSystemSpec,
    grid: &GridSpec,
) -> Result<WignerField> {
    if grid.nx < 2 || grid.np < 2 {
        return Err(invalid("grid too small"));
    }
    let ch = BandCharacteristic {
        state,
        ell: system.length_scale(),
        hbar: system.hbar,
        ln_fact: ln_factorials(state.highest_level() + 1),
        cutoff: 2.0 * ((state.highest_level() + 1) as f64).sqrt() + 8.0,
    };
    let at = prop.a.transpose();
    let (nx, np) = (grid.nx, grid.np);
    let mut spec = vec![Complex64::new(0.0, 0.0); nx * np];
    spec.par_chunks_mut(np).enumerate().for_each_init(Vec::new, |buf, (a, row)| {
        let kx = wavenumber(a, nx, grid.dx);
        for (b, v) in row.iter_mut().enumerate() {
            let kp = wavenumber(b, np, grid.dp);
            let q = at.apply([kx, kp]);
            let damp = 0.25 * prop.m.quadratic_form(q);
            if damp > 46.0 {
                continue;
            }
            let chi = ch.eval(q, buf);
            *v = chi * Complex64::from_polar((-damp).exp(), kx * grid.x_min + kp * grid.p_min);
        }
    });

    let mut planner = FftPlanner::<f64>::new();
    let row_plan = planner.plan_fft_inverse(np);
    spec.par_chunks_mut(np).for_each(|row| row_plan.process(row));
    let col_plan = planner.plan_fft_inverse(nx);
    let mut cols = vec![Complex64::new(0.0, 0.0); nx * np];
    for i in 0..nx {
        for j in 0..np {
            cols[j * nx + i] = spec[i * np + j];
        }
    }
    cols.par_chunks_mut(nx).for_each(|col| col_plan.process(col));
    let scale = 1.0 / (nx as f64 * grid.dx * np as f64 * grid.dp);
    let mut values = vec![0.0; nx * np];
    let (mut re_max, mut im_max) = (0.0f64, 0.0f64);
    for j in 0..np {
        for i in 0..nx {
            let v = cols[j * nx + i];
            values[i * np + j] = v.re * scale;
            re_max = re_max.max(v.re.abs());
            im_max = im_max.max(v.im.abs());
        }
    }
    let mut field = WignerField::new(*grid, values, prop.time)?;
    field.imag_residue = if re_max > 0.0 { im_max / re_max } else { 0.0 };
    Ok(field)
}
