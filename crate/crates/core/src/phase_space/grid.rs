use super::orbit::ClassicalOrbit;
use crate::error::{invalid, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform phase-space lattice `x_i = x_min + i·dx`, `p_j = p_min + j·dp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub dx: f64,
    pub nx: usize,
    pub p_min: f64,
    pub dp: f64,
    pub np: usize,
}

/// Smallest odd count `≥ n` whose factors are all in {3, 5, 7}.
fn odd_smooth_at_least(n: usize) -> usize {
    let mut m = n.max(1) | 1;
    loop {
        let mut r = m;
        for p in [3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 2;
    }
}

impl GridSpec {
    /// Inclusive endpoints on both axes.
    pub fn new(x_lo: f64, x_hi: f64, nx: usize, p_lo: f64, p_hi: f64, np: usize) -> Result<Self> {
        if nx < 2 || np < 2 || !(x_hi > x_lo) || !(p_hi > p_lo) {
            return Err(invalid("grid needs at least two nodes per axis and increasing bounds"));
        }
        Ok(Self {
            x_min: x_lo,
            dx: (x_hi - x_lo) / (nx - 1) as f64,
            nx,
            p_min: p_lo,
            dp: (p_hi - p_lo) / (np - 1) as f64,
            np,
        })
    }

    /// Grid symmetric about the origin with odd counts (so 0 is a node),
    /// half-widths at least the requested ones and spacings at most the requested
    /// ones. Counts are kept 3-5-7 smooth for transform speed.
    pub fn symmetric(x_half: f64, dx_max: f64, p_half: f64, dp_max: f64) -> Result<Self> {
        if !(x_half > 0.0 && dx_max > 0.0 && p_half > 0.0 && dp_max > 0.0) {
            return Err(invalid("symmetric grid needs positive extents and spacings"));
        }
        let axis = |half: f64, step: f64| {
            let n = odd_smooth_at_least(2 * (half / step).ceil() as usize + 1);
            // Spacing stays at `step`; the extent grows to k·step ≥ half.
            (n, step)
        };
        let (nx, dx) = axis(x_half, dx_max);
        let (np, dp) = axis(p_half, dp_max);
        Ok(Self { x_min: -dx * ((nx - 1) / 2) as f64, dx, nx, p_min: -dp * ((np - 1) / 2) as f64, dp, np })
    }

    /// Default resolution for a band state around `orbit`: `|x| ≤ 1.5x_max`,
    /// `|p| ≤ 3mωx_max`, `dx ≤ λ_B/4`, `dp ≤ ħ/(4x_max)`.
    pub fn for_orbit(orbit: &ClassicalOrbit) -> Self {
        Self::symmetric(
            1.5 * orbit.x_max,
            orbit.de_broglie / 4.0,
            3.0 * orbit.p_max(),
            orbit.hbar / (4.0 * orbit.x_max),
        )
        .expect("orbit scales are positive")
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp
    }

    pub fn x_last(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn p_last(&self) -> f64 {
        self.p(self.np - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node set invariant under `(x, p) → (−x, −p)` (to rounding).
    pub fn is_symmetric(&self) -> bool {
        let tol = 1e-12;
        (self.x_min + self.x_last()).abs() <= tol * self.dx && (self.p_min + self.p_last()).abs() <= tol * self.dp
    }
}

/// Trapezoid weight of node `i` among `n`.
#[inline]
pub(crate) fn trap_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Lagrange weights on the six nodes `−2..=3` evaluated at offset `f`.
#[inline]
pub(crate) fn lagrange6(f: f64) -> [f64; 6] {
    let mut w = [0.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        let xk = k as f64 - 2.0;
        let mut v = 1.0;
        for j in 0..6 {
            if j != k {
                let xj = j as f64 - 2.0;
                v *= (f - xj) / (xk - xj);
            }
        }
        *wk = v;
    }
    w
}

/// Stencil start and weights along one axis; `None` outside the sampled range.
#[inline]
pub(crate) fn stencil(u: f64, n: usize) -> Option<(usize, [f64; 6])> {
    if !(u >= 0.0 && u <= (n - 1) as f64) || n < 6 {
        return None;
    }
    let cell = (u.floor() as usize).min(n - 2);
    let start = cell.saturating_sub(2).min(n - 6);
    // Near the edges the offset leaves [0, 1) and the stencil is one-sided.
    let f = u - (start + 2) as f64;
    Some((start, lagrange6(f)))
}

/// Sampled `W(x, p)` with row-major storage (`x` outer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
    /// Largest imaginary part relative to the largest real part seen while
    /// building the field (zero when built from real data).
    pub imag_residue: f64,
}

impl WignerField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("field has {} values for a {}-node grid", values.len(), grid.len())));
        }
        Ok(Self { grid, values, time, imag_residue: 0.0 })
    }

    /// Evaluates `f(x, p)` at every node, parallel over `x`.
    pub fn from_fn<F>(grid: GridSpec, time: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let mut values = vec![0.0; grid.len()];
        values.par_chunks_mut(grid.np).enumerate().for_each(|(i, row)| {
            let x = grid.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, grid.p(j));
            }
        });
        Self { grid, values, time, imag_residue: 0.0 }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.grid.np..(i + 1) * self.grid.np]
    }

    /// Trapezoidal `∫∫W dx dp`.
    pub fn integral(&self) -> f64 {
        let g = &self.grid;
        self.marginal_x().iter().enumerate().map(|(i, m)| trap_weight(i, g.nx) * m).sum::<f64>() * g.dx
    }

    /// `∫W dp` at each `x` node.
    pub fn marginal_x(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.nx)
            .map(|i| self.row(i).iter().enumerate().map(|(j, w)| trap_weight(j, g.np) * w).sum::<f64>() * g.dp)
            .collect()
    }

    /// `∫W dx` at each `p` node.
    pub fn marginal_p(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.np];
        for i in 0..g.nx {
            let w = trap_weight(i, g.nx) * g.dx;
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += w * v;
            }
        }
        out
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sum of `|W|` over nodes times the cell area.
    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.dx * self.grid.dp
    }

    /// Sixth-order tensor Lagrange interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64, p: f64) -> f64 {
        let g = &self.grid;
        let (Some((i0, wx)), Some((j0, wp))) =
            (stencil((x - g.x_min) / g.dx, g.nx), stencil((p - g.p_min) / g.dp, g.np))
        else {
            return 0.0;
        };
        let mut acc = 0.0;
        for (a, wa) in wx.iter().enumerate() {
            let row = &self.values[(i0 + a) * g.np + j0..(i0 + a) * g.np + j0 + 6];
            let s: f64 = row.iter().zip(wp.iter()).map(|(v, w)| v * w).sum();
            acc += wa * s;
        }
        acc
    }

    /// `max |W − other|` on a shared grid.
    pub fn max_abs_diff(&self, other: &WignerField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Node-wise mean of `|W − other|` times the cell area.
    pub fn l1_diff(&self, other: &WignerField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.dx * self.grid.dp
    }
}
