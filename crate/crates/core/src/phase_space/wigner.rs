use super::grid::{GridSpec, WignerField};
use super::orbit::ClassicalOrbit;
use crate::error::{invalid, Error, Result};
use crate::special::fast_fft_len;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Quadrature controls for the `y`-integral of the Wigner transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerTransformOptions {
    pub hbar: f64,
    /// Upper bound on the trapezoid step in `y`.
    pub y_step_max: f64,
    /// Amplitudes below this fraction of the peak are treated as zero.
    pub envelope_cutoff: f64,
    /// Allowed `|ψ|²` mass outside the `x` range of the grid.
    pub coverage_tolerance: f64,
    /// Skip the FFT and sum each `p` node directly.
    pub force_direct: bool,
}

impl WignerTransformOptions {
    pub fn new(hbar: f64, y_step_max: f64) -> Self {
        Self { hbar, y_step_max, envelope_cutoff: 1e-12, coverage_tolerance: 1e-8, force_direct: false }
    }

    /// Step `λ_B/8` for states near `orbit`.
    pub fn for_orbit(orbit: &ClassicalOrbit) -> Self {
        Self::new(orbit.hbar, orbit.de_broglie / 8.0)
    }
}

/// Locates the support of `ψ` and checks that the grid covers it.
fn support<F>(psi: &F, grid: &GridSpec, opts: &WignerTransformOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let lo = grid.x_min;
    let hi = grid.x_last();
    let width = hi - lo;
    let h = 0.5 * grid.dx.min(opts.y_step_max);
    let n = (2.0 * width / h).ceil() as usize + 1;
    let start = lo - 0.5 * width;
    let dens: Vec<f64> = (0..n).into_par_iter().map(|k| psi(start + k as f64 * h).norm_sqr()).collect();
    let peak = dens.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(invalid("wavefunction vanishes or is not finite on the probe range"));
    }
    let cut = (opts.envelope_cutoff * opts.envelope_cutoff) * peak;
    let total: f64 = dens.iter().sum::<f64>() * h;
    let outside: f64 = dens
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let x = start + *k as f64 * h;
            x < lo || x > hi
        })
        .map(|(_, d)| d)
        .sum::<f64>()
        * h;
    if dens[0] > cut || dens[n - 1] > cut || outside > opts.coverage_tolerance * total {
        return Err(Error::GridCoverage(format!(
            "|ψ|² mass outside x ∈ [{lo}, {hi}] is {:.3e} of the total (allowed {:.1e})",
            outside / total,
            opts.coverage_tolerance
        )));
    }
    let first = dens.iter().position(|&d| d > cut).unwrap_or(0);
    let last = dens.iter().rposition(|&d| d > cut).unwrap_or(n - 1);
    Ok((start + first.saturating_sub(1) as f64 * h, start + (last + 1).min(n - 1) as f64 * h))
}

/// `W(x,p) = (1/h)∫dy e^{ipy/ħ} ψ(x − y/2)ψ*(x + y/2)` on every grid node.
///
/// Per column the `y` samples are taken on a lattice `Δy = 2πħ/(L·dp)` so
/// that all `p` nodes follow from one length-`L` inverse FFT. The lattice is
/// truncated where the product envelope vanishes and `Δy ≤ y_step_max`.
pub fn wigner_transform<F>(psi: F, grid: &GridSpec, opts: &WignerTransformOptions) -> Result<WignerField>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(opts.hbar > 0.0 && opts.y_step_max > 0.0) {
        return Err(invalid("wigner_transform needs positive ħ and y step"));
    }
    let hbar = opts.hbar;
    let (s_lo, s_hi) = support(&psi, grid, opts)?;
    let y_span = s_hi - s_lo;

    // Aliasing-free FFT needs 2J + 1 ≤ L with J = ⌈Y/Δy⌉, i.e. Y·dp < πħ.
    let ratio = y_span * grid.dp / (PI * hbar);
    let mut fft_len = None;
    if !opts.force_direct && ratio < 0.9 {
        let l0 = (2.0 * PI * hbar / (grid.dp * opts.y_step_max)).ceil() as usize;
        let l1 = (3.0 / (1.0 - ratio)).ceil() as usize + 1;
        let mut l = fast_fft_len(l0.max(grid.np).max(l1));
        loop {
            let dy = 2.0 * PI * hbar / (l as f64 * grid.dp);
            let j = (y_span / dy).ceil() as usize;
            if 2 * j + 1 <= l {
                break;
            }
            l = fast_fft_len(l + 1);
        }
        fft_len = Some(l);
    }

    let dy = match fft_len {
        Some(l) => 2.0 * PI * hbar / (l as f64 * grid.dp),
        None => {
            let j = (y_span / opts.y_step_max).ceil().max(1.0);
            y_span / j
        }
    };
    let norm = dy / (2.0 * PI * hbar);
    let plan = fft_len.map(|l| FftPlanner::<f64>::new().plan_fft_inverse(l));

    let mut values = vec![0.0; grid.len()];
    let residues: Vec<f64> = values
        .par_chunks_mut(grid.np)
        .enumerate()
        .map(|(i, row)| {
            let x = grid.x(i);
            let reach = 2.0 * (x - s_lo).min(s_hi - x);
            if reach <= 0.0 {
                return 0.0;
            }
            let jx = (reach / dy).ceil() as usize;
            // F(−y) = F(y)*, so only y ≥ 0 is sampled.
            let samples: Vec<Complex64> = (0..=jx)
                .map(|j| {
                    let y = j as f64 * dy;
                    psi(x - 0.5 * y) * psi(x + 0.5 * y).conj() * Complex64::from_polar(1.0, grid.p_min * y / hbar)
                })
                .collect();
            match (&plan, fft_len) {
                (Some(plan), Some(l)) => {
                    let mut buf = vec![Complex64::new(0.0, 0.0); l];
                    buf[0] = samples[0];
                    for (j, s) in samples.iter().enumerate().skip(1) {
                        buf[j] = *s;
                        buf[l - j] = s.conj();
                    }
                    plan.process(&mut buf);
                    let mut re_max = 0.0f64;
                    let mut im_max = 0.0f64;
                    for (v, b) in row.iter_mut().zip(&buf) {
                        *v = norm * b.re;
                        re_max = re_max.max(b.re.abs());
                        im_max = im_max.max(b.im.abs());
                    }
                    if re_max > 0.0 {
                        im_max / re_max
                    } else {
                        0.0
                    }
                }
                _ => {
                    for (jp, v) in row.iter_mut().enumerate() {
                        let k = jp as f64 * grid.dp;
                        let step = Complex64::from_polar(1.0, k * dy / hbar);
                        let mut rot = Complex64::new(1.0, 0.0);
                        let mut acc = samples[0].re;
                        for s in samples.iter().skip(1) {
                            rot *= step;
                            acc += 2.0 * (s * rot).re;
                        }
                        *v = norm * acc;
                    }
                    0.0
                }
            }
        })
        .collect();

    let mut field = WignerField::new(*grid, values, 0.0)?;
    field.imag_residue = residues.into_iter().fold(0.0, f64::max);
    Ok(field)
}
