use super::propagator::GaussianPropagator;
use crate::error::{invalid, numerical, Result};
use crate::phase_space::{GridSpec, WignerField};
use rayon::prelude::*;
use std::f64::consts::PI;

/// How the propagator kernel was applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum KernelMode {
    /// Full-rank Gaussian smoothing.
    Gaussian,
    /// `det M` below the floor but `M` not negligible: rank-deficient smoothing.
    Degenerate,
    /// `M` negligible: pure pullback `W₀(A⁻¹η)/det A`.
    DeltaPullback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub field: WignerField,
    pub mode: KernelMode,
}

/// `det M` below `DET_FLOOR·ħ²` counts as singular.
const DET_FLOOR: f64 = 1e-14;
/// Kernel truncation in standard deviations.
const KERNEL_SIGMAS: f64 = 6.0;

fn gauss(u: f64, var: f64) -> f64 {
    (-0.5 * u * u / var).exp() / (2.0 * PI * var).sqrt()
}

/// Symmetric trapezoid nodes for `N(0, var)`: spacing `h`, `±6σ`.
fn nodes(var: f64, h: f64) -> Vec<(f64, f64)> {
    let k = (KERNEL_SIGMAS * var.sqrt() / h).ceil() as i64;
    (-k..=k).map(|j| (j as f64 * h, h * gauss(j as f64 * h, var))).collect()
}

/// Interpolates one row-major field along `x` only at row `j`.
fn interp_x(field: &WignerField, x: f64, j: usize) -> f64 {
    let g = &field.grid;
    match crate::phase_space::grid_stencil((x - g.x_min) / g.dx, g.nx) {
        Some((i0, w)) => (0..6).map(|a| w[a] * field.values[(i0 + a) * g.np + j]).sum(),
        None => 0.0,
    }
}

/// Smooths along `x` with variance `var`.
fn smooth_x(w0: &WignerField, var: f64) -> WignerField {
    let g = w0.grid;
    if var <= (1e-4 * g.dx).powi(2) {
        return w0.clone();
    }
    let mut out = vec![0.0; g.len()];
    if var.sqrt() >= g.dx {
        let taps = nodes(var, g.dx);
        let half = (taps.len() / 2) as i64;
        out.par_chunks_mut(g.np).enumerate().for_each(|(i, row)| {
            for (k, (_, wk)) in taps.iter().enumerate() {
                let src = i as i64 - (k as i64 - half);
                if src < 0 || src >= g.nx as i64 {
                    continue;
                }
                for (o, v) in row.iter_mut().zip(w0.row(src as usize)) {
                    *o += wk * v;
                }
            }
        });
    } else {
        let taps = nodes(var, 0.5 * var.sqrt());
        out.par_chunks_mut(g.np).enumerate().for_each(|(i, row)| {
            let x = g.x(i);
            for (j, o) in row.iter_mut().enumerate() {
                *o = taps.iter().map(|(u, wk)| wk * interp_x(w0, x - u, j)).sum();
            }
        });
    }
    WignerField { grid: g, values: out, time: w0.time, imag_residue: w0.imag_residue }
}

/// Smooths along the line `(κ, 1)u` with `u ~ N(0, var)`.
fn smooth_line(wx: &WignerField, var: f64, kappa: f64) -> WignerField {
    let g = wx.grid;
    if var <= (1e-4 * g.dp).powi(2) {
        return wx.clone();
    }
    let sd = var.sqrt();
    let mut h = g.dp.min(0.5 * sd);
    if kappa != 0.0 {
        h = h.min(g.dx / kappa.abs());
    }
    let on_grid = h == g.dp;
    let taps = nodes(var, h);
    let half = (taps.len() / 2) as i64;
    let mut out = vec![0.0; g.len()];
    out.par_chunks_mut(g.np).enumerate().for_each(|(i, row)| {
        let x = g.x(i);
        for (j, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            if on_grid {
                for (k, (u, wk)) in taps.iter().enumerate() {
                    let src = j as i64 - (k as i64 - half);
                    if src < 0 || src >= g.np as i64 {
                        continue;
                    }
                    acc += wk * interp_x(wx, x - kappa * u, src as usize);
                }
            } else {
                let p = g.p(j);
                for (u, wk) in &taps {
                    acc += wk * wx.interpolate(x - kappa * u, p - u);
                }
            }
            *o = acc;
        }
    });
    WignerField { grid: g, values: out, time: wx.time, imag_residue: wx.imag_residue }
}

/// Applies the Gaussian propagator to `w0` on its own grid.
pub fn propagate_wigner(prop: &GaussianPropagator, w0: &WignerField, hbar: f64) -> Result<Propagated> {
    propagate_wigner_onto(prop, w0, &w0.grid, hbar)
}

/// `W(t,η) = (π det A √det M)⁻¹ ∫d²η' exp[−(η' − A⁻¹η)ᵀM⁻¹(η' − A⁻¹η)] W₀(η')`,
/// evaluated on `out_grid`.
///
/// The kernel is `N(A⁻¹η, M/2)`. It is factored into a smoothing along `x`
/// with the conditional variance and a sheared line integral along the
/// principal `p` direction, then pulled back through `A⁻¹`.
pub fn propagate_wigner_onto(
    prop: &GaussianPropagator,
    w0: &WignerField,
    out_grid: &GridSpec,
    hbar: f64,
) -> Result<Propagated> {
    if !(hbar > 0.0) {
        return Err(invalid("ħ must be positive"));
    }
    let a_inv = prop.a.inverse().ok_or_else(|| numerical("propagator A is singular"))?;
    let det_a = prop.a.det();
    let g = w0.grid;
    let (sxx, sxp, spp) = (0.5 * prop.m.get(0, 0), 0.5 * prop.m.get(0, 1), 0.5 * prop.m.get(1, 1));
    let negligible = sxx.max(0.0).sqrt() < 1e-3 * g.dx && spp.max(0.0).sqrt() < 1e-3 * g.dp;
    let singular = prop.det_m() < DET_FLOOR * hbar * hbar;
    let mode = match (singular, negligible) {
        (true, true) => KernelMode::DeltaPullback,
        (true, false) => KernelMode::Degenerate,
        _ => KernelMode::Gaussian,
    };

    let smoothed = if mode == KernelMode::DeltaPullback {
        w0.clone()
    } else if spp > 0.0 {
        let kappa = sxp / spp;
        let wx = smooth_x(w0, (sxx - sxp * kappa).max(0.0));
        smooth_line(&wx, spp, kappa)
    } else {
        smooth_x(w0, sxx.max(0.0))
    };

    let same_grid = *out_grid == g;
    let field = if same_grid && a_inv == crate::linalg::Mat2::IDENTITY {
        smoothed
    } else {
        WignerField::from_fn(*out_grid, 0.0, |x, p| {
            let z = a_inv.apply([x, p]);
            smoothed.interpolate(z[0], z[1]) / det_a
        })
    };
    Ok(Propagated { field: WignerField { time: w0.time + prop.time, ..field }, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat2;
    use crate::quadratic_master::{free_oscillator_a, integrate_propagator, MasterEqCoefficients, DEFAULT_TOLERANCE};

    /// Normalized Gaussian with mean `mu` and covariance `s`.
    fn gaussian_field(grid: GridSpec, mu: [f64; 2], s: Mat2) -> WignerField {
        let si = s.inverse().unwrap();
        let norm = 1.0 / (2.0 * PI * s.det().sqrt());
        WignerField::from_fn(grid, 0.0, move |x, p| norm * (-0.5 * si.quadratic_form([x - mu[0], p - mu[1]])).exp())
    }

    fn moments(w: &WignerField) -> ([f64; 2], Mat2) {
        let g = w.grid;
        let (mut n, mut mx, mut mp) = (0.0, 0.0, 0.0);
        for i in 0..g.nx {
            for j in 0..g.np {
                let v = w.at(i, j);
                n += v;
                mx += v * g.x(i);
                mp += v * g.p(j);
            }
        }
        let (mx, mp) = (mx / n, mp / n);
        let (mut sxx, mut sxp, mut spp) = (0.0, 0.0, 0.0);
        for i in 0..g.nx {
            for j in 0..g.np {
                let v = w.at(i, j) / n;
                let (dx, dp) = (g.x(i) - mx, g.p(j) - mp);
                sxx += v * dx * dx;
                sxp += v * dx * dp;
                spp += v * dp * dp;
            }
        }
        ([mx, mp], Mat2::symmetric(sxx, sxp, spp))
    }

    #[test]
    fn zero_kernel_is_identity() {
        let g = GridSpec::symmetric(5.0, 0.1, 5.0, 0.1).unwrap();
        let w0 = gaussian_field(g, [0.3, -0.2], Mat2::symmetric(0.5, 0.1, 0.7));
        let out = propagate_wigner(&GaussianPropagator::identity(), &w0, 1.0).unwrap();
        assert_eq!(out.mode, KernelMode::DeltaPullback);
        assert_eq!(out.field.values, w0.values);
    }

    #[test]
    fn pure_rotation_pulls_back() {
        let g = GridSpec::symmetric(6.0, 0.05, 6.0, 0.05).unwrap();
        let w0 = gaussian_field(g, [1.0, 0.0], Mat2::symmetric(0.5, 0.0, 0.5));
        let prop = GaussianPropagator { time: 0.7, a: free_oscillator_a(1.0, 1.0, 0.7), m: Mat2::ZERO };
        let out = propagate_wigner(&prop, &w0, 1.0).unwrap();
        let want = gaussian_field(g, [0.7f64.cos(), -0.7f64.sin()], Mat2::symmetric(0.5, 0.0, 0.5));
        assert!(out.field.max_abs_diff(&want) < 1e-6, "{}", out.field.max_abs_diff(&want));
    }

    #[test]
    fn gaussian_moments_follow_moment_equations() {
        // dμ/dt = −Kμ, dΣ/dt = −KΣ − ΣKᵀ + 2J, integrated by RK4 as an oracle.
        let c = MasterEqCoefficients::constant(1.0, 1.0, 0.0, 0.05, 0.0, 0.0, 1.0);
        let t = 0.3;
        let g = GridSpec::symmetric(7.0, 0.05, 7.0, 0.05).unwrap();
        let s0 = Mat2::symmetric(0.5, 0.0, 0.5);
        let mu0 = [0.8, -0.4];
        let w0 = gaussian_field(g, mu0, s0);
        let prop = integrate_propagator(&c, t, DEFAULT_TOLERANCE).unwrap();
        let out = propagate_wigner(&prop, &w0, 1.0).unwrap();
        assert_eq!(out.mode, KernelMode::Gaussian);

        let k = c.k(0.0);
        let j = c.j(0.0);
        let f = |mu: [f64; 2], s: Mat2| -> ([f64; 2], Mat2) {
            let km = k.apply(mu);
            ([-km[0], -km[1]], -(k * s) - s * k.transpose() + j.scale(2.0))
        };
        let (mut mu, mut s) = (mu0, s0);
        let n = 3000;
        let h = t / n as f64;
        for _ in 0..n {
            let (a1, b1) = f(mu, s);
            let (a2, b2) = f([mu[0] + 0.5 * h * a1[0], mu[1] + 0.5 * h * a1[1]], s + b1.scale(0.5 * h));
            let (a3, b3) = f([mu[0] + 0.5 * h * a2[0], mu[1] + 0.5 * h * a2[1]], s + b2.scale(0.5 * h));
            let (a4, b4) = f([mu[0] + h * a3[0], mu[1] + h * a3[1]], s + b3.scale(h));
            for d in 0..2 {
                mu[d] += h / 6.0 * (a1[d] + 2.0 * a2[d] + 2.0 * a3[d] + a4[d]);
            }
            s = s + (b1 + b2.scale(2.0) + b3.scale(2.0) + b4).scale(h / 6.0);
        }
        let (got_mu, got_s) = moments(&out.field);
        assert!((got_mu[0] - mu[0]).abs() < 1e-4 && (got_mu[1] - mu[1]).abs() < 1e-4);
        assert!((got_s - s).max_abs() < 1e-4, "{got_s:?} vs {s:?}");
        assert!((out.field.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rank_one_kernel_smooths_only_momentum() {
        let g = GridSpec::symmetric(6.0, 0.05, 6.0, 0.05).unwrap();
        let w0 = gaussian_field(g, [0.0, 0.0], Mat2::symmetric(0.5, 0.0, 0.5));
        let prop = GaussianPropagator { time: 0.0, a: Mat2::IDENTITY, m: Mat2::symmetric(0.0, 0.0, 0.8) };
        let out = propagate_wigner(&prop, &w0, 1.0).unwrap();
        assert_eq!(out.mode, KernelMode::Degenerate);
        let want = gaussian_field(g, [0.0, 0.0], Mat2::symmetric(0.5, 0.0, 0.9));
        assert!(out.field.max_abs_diff(&want) < 1e-6);
    }
}
