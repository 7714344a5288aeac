//! Seeded random streams and random test objects.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, tag)` with the trial
//! index as stream id, so results do not depend on trial execution order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, HermitianMatrix};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Independent stream for trial `trial` of the experiment named `tag`.
pub fn substream(seed: u64, tag: &str, trial: u64) -> TrialRng {
    let mut state = seed ^ fnv1a(tag);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex gaussian with unit variance.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

/// GUE-like sample `(G + G*) / 2`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&random_complex_matrix(rng, n, n))
}

/// Random hermitian matrix rescaled to spectral radius `radius` (Frobenius-normalized sample).
pub fn random_hermitian_scaled(rng: &mut impl Rng, n: usize, radius: f64) -> HermitianMatrix {
    let h = random_hermitian(rng, n);
    let f = h.as_matrix().frobenius_norm();
    if f == 0.0 {
        return h;
    }
    h.scaled(radius / f)
}

/// Positive semidefinite `G G*` with trace normalized to `trace`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize, trace: f64) -> HermitianMatrix {
    let g = random_complex_matrix(rng, n, rank.max(1));
    let p = HermitianMatrix::symmetrize(&(&g * &g.adjoint()));
    let t = p.trace_re();
    p.scaled(trace / t)
}

pub fn random_complex_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v = random_complex_vector(rng, n);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Matrix with trace norm 1.
pub fn random_unit_trace_norm(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let m = random_complex_matrix(rng, n, n);
    let t = crate::linalg::trace_norm(&m).expect("finite gaussian matrix");
    m.scale_re(1.0 / t)
}

/// Each index kept independently with probability 1/2.
pub fn random_subset(rng: &mut impl Rng, range: std::ops::Range<usize>) -> Vec<usize> {
    range.filter(|_| rng.random_bool(0.5)).collect()
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| substream(7, "x", 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| substream(7, "x", 3).random()).collect();
        assert_eq!(a, b);
        let mut r1 = substream(7, "x", 3);
        let mut r2 = substream(7, "x", 4);
        let mut r3 = substream(7, "y", 3);
        let x1: u64 = r1.random();
        assert_ne!(x1, r2.random::<u64>());
        assert_ne!(x1, r3.random::<u64>());
    }

    #[test]
    fn psd_sample_is_psd() {
        let mut rng = substream(1, "psd", 0);
        let p = random_psd(&mut rng, 5, 2, 3.0);
        let e = crate::linalg::eig_hermitian(&p).unwrap();
        assert!(e.eigenvalues()[0] > -1e-12);
        assert!((p.trace_re() - 3.0).abs() < 1e-12);
    }
}
