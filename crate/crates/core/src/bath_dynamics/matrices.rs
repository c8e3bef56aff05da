use super::gkernel::GTable;
use super::kernels::{sine_convolution, sine_convolution_ddot, sine_convolution_dot};
use super::spectral::{BathSpec, SpectralDensity};
use crate::error::{invalid, numerical, Result};
use crate::linalg::Mat2;
use crate::phase_space::OscillatorSystemSpec;
use crate::quadratic_master::free_oscillator_a;
use crate::special::{one_minus_cos, u_minus_sin};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Above this many modes the dense `D_rr′` correction is never assembled.
pub const DENSE_D_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagatorMode {
    Exact,
    /// First order in the couplings; `short_time` additionally sets `A ≈ 1` and
    /// expands `h_r⁽⁰⁾` for `ωt ≪ 1`.
    WeakCoupling {
        short_time: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockSet {
    All,
    /// `A`, `B_r`, `C_r` and the free part of `D`; enough for the reduced `M`.
    SystemOnly,
}

/// `D_rr′ = δ_rr′ e^{ω_r t σ_r} + correction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DCorrection {
    /// Weak coupling: `D` is exactly block diagonal.
    Diagonal,
    /// Not assembled ([`BlockSet::SystemOnly`]).
    Omitted,
    /// Row-major `N × N` blocks.
    Dense(Vec<Mat2>),
}

/// Transfer blocks of `η(t) = Aη(0) + Σ B_r η_r(0)`, `η_r(t) = C_r η(0) + Σ D_rr′ η_r′(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathPropagators {
    pub time: f64,
    pub mode: PropagatorMode,
    pub system: OscillatorSystemSpec,
    pub a: Mat2,
    pub b: Vec<Mat2>,
    pub c: Vec<Mat2>,
    pub d_free: Vec<Mat2>,
    pub d_correction: DCorrection,
    pub warnings: Vec<String>,
}

impl BathPropagators {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn d(&self, r: usize, rp: usize) -> Result<Mat2> {
        let free = if r == rp { self.d_free[r] } else { Mat2::ZERO };
        match &self.d_correction {
            DCorrection::Diagonal => Ok(free),
            DCorrection::Omitted => Err(invalid("D blocks were not assembled (BlockSet::SystemOnly)")),
            DCorrection::Dense(blocks) => Ok(free + blocks[r * self.len() + rp]),
        }
    }

    /// Full `2(N+1)`-dimensional transfer matrix, ordered `(x, p, x₁, p₁, …)`.
    pub fn transfer_matrix(&self) -> Result<DMatrix<f64>> {
        let n = self.len();
        let dim = 2 * (n + 1);
        let mut t = DMatrix::zeros(dim, dim);
        let put = |t: &mut DMatrix<f64>, bi: usize, bj: usize, m: &Mat2| {
            for i in 0..2 {
                for j in 0..2 {
                    t[(2 * bi + i, 2 * bj + j)] = m.get(i, j);
                }
            }
        };
        put(&mut t, 0, 0, &self.a);
        for r in 0..n {
            put(&mut t, 0, r + 1, &self.b[r]);
            put(&mut t, r + 1, 0, &self.c[r]);
            for rp in 0..n {
                put(&mut t, r + 1, rp + 1, &self.d(r, rp)?);
            }
        }
        Ok(t)
    }
}

/// `e^{ω t σ}` for an oscillator of mass `m`.
fn rotation(m: f64, w: f64, t: f64) -> Mat2 {
    free_oscillator_a(m, w, t)
}

/// Exact blocks from the `g`-function closed forms. `h_r`, `f_rr′` and their
/// derivatives come from quadratures against `g` (second derivatives through the
/// oscillator equations they satisfy), never from differencing `g`.
/// Negative `t` uses the parities of `g`, `h_r`, `f_rr′`.
pub fn exact_bath_matrices(
    bath: &BathSpec,
    system: &OscillatorSystemSpec,
    table: &GTable,
    t: f64,
    blocks: BlockSet,
) -> Result<BathPropagators> {
    if table.spectral != SpectralDensity::Discrete(bath.clone()) {
        return Err(invalid("g table was not built from this bath"));
    }
    let (m, w0) = (system.mass, system.bare_frequency);
    if (table.mass - m).abs() > 1e-12 * m || (table.bare_frequency - w0).abs() > 1e-12 * w0 {
        return Err(invalid("g table was built for a different system mass or bare frequency"));
    }
    let n = bath.len();
    if blocks == BlockSet::All && n > DENSE_D_LIMIT {
        return Err(invalid(format!("dense D blocks refused for N = {n} > {DENSE_D_LIMIT}")));
    }
    let s = if t < 0.0 { -1.0 } else { 1.0 };
    let ta = t.abs();
    let (g, gd, gdd) = table.values(t)?;
    let a = Mat2::new(m * gd, g, m * m * gdd, m * gd).scale(1.0 / (m * w0));
    let osc = bath.oscillators();

    let hs: Vec<(f64, f64, f64)> = osc
        .par_iter()
        .map(|o| {
            let wr = o.frequency;
            let h = -table.convolve(ta, |u| (wr * u).sin())?;
            let hd = -table.convolve(ta, |u| wr * (wr * u).cos())?;
            // ḧ_r + ω_r² h_r = −ω_r g, evaluated at |t|
            let hdd = -wr * (s * g) - wr * wr * h;
            Ok((s * h, hd, s * hdd))
        })
        .collect::<Result<_>>()?;
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for (o, &(h, hd, hdd)) in osc.iter().zip(&hs) {
        let pref = o.coupling / (m * o.mass * w0 * o.frequency);
        b.push(Mat2::new(o.mass * hd, h, m * o.mass * hdd, m * hd).scale(pref));
        c.push(Mat2::new(m * hd, h, m * o.mass * hdd, o.mass * hd).scale(pref));
    }
    let d_free = osc.iter().map(|o| rotation(o.mass, o.frequency, t)).collect();
    let d_correction = match blocks {
        BlockSet::SystemOnly => DCorrection::Omitted,
        BlockSet::All => {
            let pairs: Vec<Mat2> = (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let (r, rp) = (k / n, k % n);
                    let (or, op) = (osc[r], osc[rp]);
                    let (w1, w2) = (or.frequency, op.frequency);
                    let f = s * table.convolve(ta, |u| sine_convolution(w1, w2, u))?;
                    let fd = table.convolve(ta, |u| sine_convolution_dot(w1, w2, u))?;
                    let fdd = s * table.convolve(ta, |u| sine_convolution_ddot(w1, w2, u))?;
                    let pref = or.coupling * op.coupling / (m * or.mass * op.mass * w0 * w1 * w2);
                    Ok(Mat2::new(op.mass * fd, f, or.mass * op.mass * fdd, or.mass * fd).scale(pref))
                })
                .collect::<Result<_>>()?;
            DCorrection::Dense(pairs)
        }
    };
    Ok(BathPropagators {
        time: t,
        mode: PropagatorMode::Exact,
        system: *system,
        a,
        b,
        c,
        d_free,
        d_correction,
        warnings: Vec::new(),
    })
}

/// Largest `κ_r²/(m m_r ω ω_r)`; weak coupling needs it ≤ 0.01 ω².
pub fn coupling_strength(bath: &BathSpec, system: &OscillatorSystemSpec) -> f64 {
    let (m, w) = (system.mass, system.frequency);
    bath.oscillators().iter().map(|o| o.coupling.powi(2) / (m * o.mass * w * o.frequency)).fold(0.0, f64::max)
}

/// `(h_r⁽⁰⁾, ḣ_r⁽⁰⁾, ḧ_r⁽⁰⁾)`.
pub fn weak_h(wr: f64, w: f64, t: f64, short_time: bool) -> (f64, f64, f64) {
    if short_time {
        let u = wr * t;
        (-w * u_minus_sin(u) / (wr * wr), -w * one_minus_cos(u) / wr, -w * u.sin())
    } else {
        (-sine_convolution(wr, w, t), -sine_convolution_dot(wr, w, t), -sine_convolution_ddot(wr, w, t))
    }
}

/// Closed-form first-order blocks with `ω₀ = ω`.
pub fn weak_coupling_matrices(
    bath: &BathSpec,
    system: &OscillatorSystemSpec,
    t: f64,
    short_time: bool,
) -> BathPropagators {
    let (m, w) = (system.mass, system.frequency);
    let mut warnings = Vec::new();
    let strength = coupling_strength(bath, system);
    if strength > 0.01 * w * w {
        warnings.push(format!(
            "coupling not weak: max κ_r²/(m m_r ω ω_r) = {strength:.3e} > 0.01 ω² = {:.3e}",
            0.01 * w * w
        ));
    }
    if short_time && w * t.abs() > 0.1 {
        warnings.push(format!("short-time forms used at ωt = {:.3}", w * t));
    }
    let a = if short_time { Mat2::IDENTITY } else { free_oscillator_a(m, w, t) };
    let mut b = Vec::with_capacity(bath.len());
    let mut c = Vec::with_capacity(bath.len());
    for o in bath.oscillators() {
        let (h, hd, hdd) = weak_h(o.frequency, w, t, short_time);
        let pref = o.coupling / (m * o.mass * w * o.frequency);
        b.push(Mat2::new(o.mass * hd, h, m * o.mass * hdd, m * hd).scale(pref));
        c.push(Mat2::new(m * hd, h, m * o.mass * hdd, o.mass * hd).scale(pref));
    }
    BathPropagators {
        time: t,
        mode: PropagatorMode::WeakCoupling { short_time },
        system: *system,
        a,
        b,
        c,
        d_free: bath.oscillators().iter().map(|o| rotation(o.mass, o.frequency, t)).collect(),
        d_correction: DCorrection::Diagonal,
        warnings,
    }
}

/// `M = A⁻¹ (Σ_r coth(β_r/2) B_r Λ_r⁻¹ B_rᵀ) A⁻ᵀ`. With `high_temperature` the
/// coth is replaced by its limit `2k_BT/(ħω_r)`.
pub fn reduced_m_from_bath(props: &BathPropagators, bath: &BathSpec, high_temperature: bool) -> Result<Mat2> {
    if props.len() != bath.len() {
        return Err(invalid("propagators and bath have different sizes"));
    }
    let ai = props.a.inverse().ok_or_else(|| numerical(format!("singular A at t = {}", props.time)))?;
    let mut sum = Mat2::ZERO;
    for (r, br) in props.b.iter().enumerate() {
        let weight = if high_temperature {
            2.0 * bath.kbt() / (bath.hbar() * bath.oscillators()[r].frequency)
        } else {
            1.0 / (0.5 * bath.beta(r)).tanh()
        };
        let li = bath.lambda_matrix(r).inverse().expect("Λ_r is diagonal positive");
        sum = sum + (*br * li * br.transpose()).scale(weight);
    }
    Ok(ai * sum * ai.transpose())
}

/// Matrix 2-norm maxima of the four time-reversal identities, from blocks at `t` and `−t`.
pub fn reversibility_residuals(fwd: &BathPropagators, bwd: &BathPropagators) -> Result<[f64; 4]> {
    let n = fwd.len();
    let mut rev = [0.0f64; 4];
    let mut acc = fwd.a * bwd.a;
    for r in 0..n {
        acc = acc + fwd.b[r] * bwd.c[r];
    }
    rev[0] = (acc - Mat2::IDENTITY).norm2();
    for r in 0..n {
        for rp in 0..n {
            let mut s = fwd.c[r] * bwd.b[rp];
            for k in 0..n {
                s = s + fwd.d(r, k)? * bwd.d(k, rp)?;
            }
            if r == rp {
                s = s - Mat2::IDENTITY;
            }
            rev[1] = rev[1].max(s.norm2());
        }
        let mut s = fwd.a * bwd.b[r];
        for k in 0..n {
            s = s + fwd.b[k] * bwd.d(k, r)?;
        }
        rev[2] = rev[2].max(s.norm2());
        let mut s = fwd.c[r] * bwd.a;
        for k in 0..n {
            s = s + fwd.d(r, k)? * bwd.c[k];
        }
        rev[3] = rev[3].max(s.norm2());
    }
    Ok(rev)
}

/// `D⁻¹_rr′(t) = D_rr′(−t) − C_r(−t) A⁻¹(−t) B_r′(−t)`, row-major.
pub fn d_inverse(bwd: &BathPropagators) -> Result<Vec<Mat2>> {
    let n = bwd.len();
    let ai = bwd.a.inverse().ok_or_else(|| numerical("singular A(−t)"))?;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for rp in 0..n {
            out.push(bwd.d(r, rp)? - bwd.c[r] * ai * bwd.b[rp]);
        }
    }
    Ok(out)
}

/// The two block identities that follow from `D⁻¹`, as 2-norm maxima:
/// `Σ B_r′(−t) D⁻¹_r′r(−t) + A⁻¹(t) B_r(t)` and `A(−t) − Σ B(−t) D⁻¹(−t) C(−t) − A⁻¹(t)`.
pub fn auxiliary_residuals(fwd: &BathPropagators, bwd: &BathPropagators) -> Result<[f64; 2]> {
    let n = fwd.len();
    let dinv_bwd = d_inverse(fwd)?;
    let ai = fwd.a.inverse().ok_or_else(|| numerical("singular A(t)"))?;
    let mut first = 0.0f64;
    let mut acc = bwd.a - ai;
    for r in 0..n {
        let mut s = Mat2::ZERO;
        for rp in 0..n {
            s = s + bwd.b[rp] * dinv_bwd[rp * n + r];
        }
        first = first.max((s + ai * fwd.b[r]).norm2());
        acc = acc - s * bwd.c[r];
    }
    Ok([first, acc.norm2()])
}

/// `max |TᵀJT − J|` for the full transfer matrix.
pub fn symplectic_residual(props: &BathPropagators) -> Result<f64> {
    let t = props.transfer_matrix()?;
    let dim = t.nrows();
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..dim / 2 {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok((t.transpose() * &j * &t - j).amax())
}
