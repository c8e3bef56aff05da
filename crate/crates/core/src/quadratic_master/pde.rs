use super::coefficients::MasterEqCoefficients;
use crate::error::{invalid, numerical, Result};
use crate::phase_space::WignerField;

/// Step control for [`pde_oracle_evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeOptions {
    /// Courant number for the advective part.
    pub cfl: f64,
    /// Lower bound on the number of time steps.
    pub min_steps: usize,
}

impl Default for PdeOptions {
    fn default() -> Self {
        Self { cfl: 0.4, min_steps: 1 }
    }
}

/// Fifth-order upwind-biased reconstruction of a split flux at `i + ½`
/// from the stencil `f[i−2..=i+2]`.
#[inline]
fn recon5(a: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    (2.0 * a - 13.0 * b + 47.0 * c + 27.0 * d - 3.0 * e) / 60.0
}

/// Adds `−∂(vW)/∂s` along one line with Lax–Friedrichs splitting.
/// `get(k)` returns `(v, W)` at node `k`; ghosts beyond the ends are zero.
fn advect_line(n: usize, h: f64, vw: &[(f64, f64)], out: &mut [f64]) {
    let alpha = vw.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max);
    if alpha == 0.0 {
        return;
    }
    let fp = |k: i64| -> f64 {
        if k < 0 || k >= n as i64 {
            0.0
        } else {
            let (v, w) = vw[k as usize];
            0.5 * (v * w + alpha * w)
        }
    };
    let fm = |k: i64| -> f64 {
        if k < 0 || k >= n as i64 {
            0.0
        } else {
            let (v, w) = vw[k as usize];
            0.5 * (v * w - alpha * w)
        }
    };
    let flux = |i: i64| -> f64 {
        recon5(fp(i - 2), fp(i - 1), fp(i), fp(i + 1), fp(i + 2))
            + recon5(fm(i + 3), fm(i + 2), fm(i + 1), fm(i), fm(i - 1))
    };
    let mut left = flux(-1);
    for (i, o) in out.iter_mut().enumerate().take(n) {
        let right = flux(i as i64);
        *o -= (right - left) / h;
        left = right;
    }
}

#[inline]
fn at(line: &[f64], k: i64) -> f64 {
    if k < 0 || k >= line.len() as i64 {
        0.0
    } else {
        line[k as usize]
    }
}

fn d1(line: &[f64], i: i64, h: f64) -> f64 {
    (at(line, i - 2) - 8.0 * at(line, i - 1) + 8.0 * at(line, i + 1) - at(line, i + 2)) / (12.0 * h)
}

fn d2(line: &[f64], i: i64, h: f64) -> f64 {
    (-at(line, i - 2) + 16.0 * at(line, i - 1) - 30.0 * at(line, i) + 16.0 * at(line, i + 1) - at(line, i + 2))
        / (12.0 * h * h)
}

fn rhs(c: &MasterEqCoefficients, t: f64, w: &WignerField, values: &[f64]) -> Vec<f64> {
    let g = w.grid;
    let (nx, np) = (g.nx, g.np);
    let k = c.k(t);
    let j = c.j(t);
    let mut out = vec![0.0; nx * np];
    // v = −Kη.
    let vx = |x: f64, p: f64| -(k.get(0, 0) * x + k.get(0, 1) * p);
    let vp = |x: f64, p: f64| -(k.get(1, 0) * x + k.get(1, 1) * p);

    let mut line = vec![(0.0, 0.0); nx.max(np)];
    let mut acc = vec![0.0; nx.max(np)];
    for jj in 0..np {
        let p = g.p(jj);
        for i in 0..nx {
            line[i] = (vx(g.x(i), p), values[i * np + jj]);
        }
        acc[..nx].iter_mut().for_each(|a| *a = 0.0);
        advect_line(nx, g.dx, &line[..nx], &mut acc[..nx]);
        for i in 0..nx {
            out[i * np + jj] += acc[i];
        }
    }
    for i in 0..nx {
        let x = g.x(i);
        for jj in 0..np {
            line[jj] = (vp(x, g.p(jj)), values[i * np + jj]);
        }
        advect_line(np, g.dp, &line[..np], &mut out[i * np..(i + 1) * np]);
    }

    let (j11, j12, j22) = (j.get(0, 0), j.get(0, 1), j.get(1, 1));
    if j22 != 0.0 || j12 != 0.0 {
        let mut dp_field = vec![0.0; nx * np];
        for i in 0..nx {
            let row = &values[i * np..(i + 1) * np];
            for jj in 0..np {
                out[i * np + jj] += j22 * d2(row, jj as i64, g.dp);
                dp_field[i * np + jj] = d1(row, jj as i64, g.dp);
            }
        }
        if j12 != 0.0 {
            let mut col = vec![0.0; nx];
            for jj in 0..np {
                for i in 0..nx {
                    col[i] = dp_field[i * np + jj];
                }
                for i in 0..nx {
                    out[i * np + jj] += 2.0 * j12 * d1(&col, i as i64, g.dx);
                }
            }
        }
    }
    if j11 != 0.0 {
        let mut col = vec![0.0; nx];
        for jj in 0..np {
            for i in 0..nx {
                col[i] = values[i * np + jj];
            }
            for i in 0..nx {
                out[i * np + jj] += j11 * d2(&col, i as i64, g.dx);
            }
        }
    }
    out
}

/// Finite-difference solution of
/// `∂W/∂t = Σ K_rs ∂_r(η_s W) + J_rs ∂_r∂_s W` on the grid of `w0`:
/// upwind-biased fifth-order advection, fourth-order centered diffusion,
/// SSP-RK3 in time, zero boundary values.
pub fn pde_oracle_evolve(
    coeffs: &MasterEqCoefficients,
    w0: &WignerField,
    t: f64,
    opts: &PdeOptions,
) -> Result<WignerField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("evolution time must be finite and non-negative"));
    }
    let g = w0.grid;
    // Stability limits over the horizon (coefficients sampled on a coarse time grid).
    let samples = if coeffs.is_time_independent() { 1 } else { 64 };
    let (x_ext, p_ext) = (g.x_min.abs().max(g.x_last().abs()), g.p_min.abs().max(g.p_last().abs()));
    let mut rate: f64 = 0.0;
    let mut diff: f64 = 0.0;
    for s in 0..samples {
        let ts = t * s as f64 / samples.max(1) as f64;
        let k = coeffs.k(ts);
        let j = coeffs.j(ts);
        let vx = k.get(0, 0).abs() * x_ext + k.get(0, 1).abs() * p_ext;
        let vp = k.get(1, 0).abs() * x_ext + k.get(1, 1).abs() * p_ext;
        rate = rate.max(vx / g.dx + vp / g.dp);
        diff = diff.max(
            j.get(0, 0).abs() / (g.dx * g.dx)
                + j.get(1, 1).abs() / (g.dp * g.dp)
                + 2.0 * j.get(0, 1).abs() / (g.dx * g.dp),
        );
    }
    let mut dt = f64::INFINITY;
    if rate > 0.0 {
        dt = dt.min(opts.cfl / rate);
    }
    if diff > 0.0 {
        dt = dt.min(0.3 / diff);
    }
    let steps = if t == 0.0 { 0 } else { ((t / dt).ceil() as usize).max(opts.min_steps.max(1)) };
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };

    let l1_0 = w0.l1();
    let mut u = w0.values.clone();
    let mut time = 0.0;
    for _ in 0..steps {
        let k1 = rhs(coeffs, time, w0, &u);
        let u1: Vec<f64> = u.iter().zip(&k1).map(|(a, b)| a + h * b).collect();
        let k2 = rhs(coeffs, time + h, w0, &u1);
        let u2: Vec<f64> = u.iter().zip(u1.iter().zip(&k2)).map(|(a, (b, c))| 0.75 * a + 0.25 * (b + h * c)).collect();
        let k3 = rhs(coeffs, time + 0.5 * h, w0, &u2);
        u = u.iter().zip(u2.iter().zip(&k3)).map(|(a, (b, c))| a / 3.0 + 2.0 / 3.0 * (b + h * c)).collect();
        time += h;
        let l1 = u.iter().map(|v| v.abs()).sum::<f64>() * g.dx * g.dp;
        if !(l1 <= 10.0 * l1_0) {
            return Err(numerical(format!("finite-difference evolution unstable at t = {time}: L¹ grew to {l1:.3e}")));
        }
    }
    Ok(WignerField { grid: g, values: u, time: w0.time + t, imag_residue: w0.imag_residue })
}
