use super::spectral::BathSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Coherent-state labels `(x̄_r, p̄_r)` drawn from the thermal P-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentBathSample {
    pub x_bar: Vec<f64>,
    pub p_bar: Vec<f64>,
    pub seed: u64,
}

impl CoherentBathSample {
    /// All labels at the origin, the zero-temperature sample.
    pub fn vacuum(n: usize) -> Self {
        Self { x_bar: vec![0.0; n], p_bar: vec![0.0; n], seed: 0 }
    }
}

/// Seed for sub-task `index` of a run seeded with `seed` (SplitMix64 finalizer
/// over the counter), so parallel tasks draw independent, order-free streams.
pub fn task_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `(Var x̄_r, Var p̄_r) = (λ_r², ħ²/λ_r²)/(e^{β_r} − 1)`.
pub fn p_function_variances(bath: &BathSpec, r: usize) -> (f64, f64) {
    let occ = 1.0 / bath.beta(r).exp_m1();
    let l2 = bath.lambda(r).powi(2);
    (l2 * occ, bath.hbar().powi(2) / l2 * occ)
}

/// Independent Gaussian draws per mode, `x̄_r` before `p̄_r`, from a ChaCha8 stream.
pub fn sample_bath(bath: &BathSpec, seed: u64) -> CoherentBathSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let n = bath.len();
    let mut x_bar = Vec::with_capacity(n);
    let mut p_bar = Vec::with_capacity(n);
    for r in 0..n {
        let (vx, vp) = p_function_variances(bath, r);
        x_bar.push(vx.sqrt() * std.sample(&mut rng));
        p_bar.push(vp.sqrt() * std.sample(&mut rng));
    }
    CoherentBathSample { x_bar, p_bar, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath_dynamics::BathOscillator;

    fn two_modes(kbt: f64) -> BathSpec {
        let o = |m, w| BathOscillator { mass: m, frequency: w, coupling: 0.1 };
        BathSpec::new(vec![o(1.0, 0.5), o(2.0, 3.0)], kbt, 1.0).unwrap()
    }

    #[test]
    fn zero_temperature_collapses_to_origin() {
        let s = sample_bath(&two_modes(0.0), 7);
        assert_eq!(s, CoherentBathSample { seed: 7, ..CoherentBathSample::vacuum(2) });
    }

    #[test]
    fn same_seed_same_stream() {
        let bath = two_modes(2.0);
        assert_eq!(sample_bath(&bath, 11), sample_bath(&bath, 11));
        assert_ne!(sample_bath(&bath, 11), sample_bath(&bath, 12));
    }

    #[test]
    fn empirical_variances_match_p_function() {
        let bath = two_modes(2.0);
        let draws = 100_000;
        let mut sums = [[0.0f64; 2]; 2];
        let mut cross = 0.0;
        for k in 0..draws {
            let s = sample_bath(&bath, k);
            for r in 0..2 {
                sums[r][0] += s.x_bar[r].powi(2);
                sums[r][1] += s.p_bar[r].powi(2);
            }
            cross += s.x_bar[0] * s.p_bar[0];
        }
        for r in 0..2 {
            // oracle: λ_r² = ħ/(m_rω_r), occupation 1/(e^{ħω_r/kT} − 1)
            let o = bath.oscillators()[r];
            let occ = 1.0 / ((o.frequency / 2.0f64).exp() - 1.0);
            let vx = occ / (o.mass * o.frequency);
            let vp = occ * o.mass * o.frequency;
            assert!((sums[r][0] / draws as f64 / vx - 1.0).abs() < 0.03);
            assert!((sums[r][1] / draws as f64 / vp - 1.0).abs() < 0.03);
        }
        let (vx, vp) = p_function_variances(&bath, 0);
        assert!((cross / draws as f64).abs() < 0.02 * (vx * vp).sqrt());
    }
}
