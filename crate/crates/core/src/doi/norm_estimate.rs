//! Norm estimates for transformers.
//!
//! Only the Hilbert–Schmidt norm of a Schur multiplier is computable in closed form. On
//! `C_p` for `p != 2` every value reported here comes from evaluating the transformer on
//! concrete operands, so it is a lower bound for the true norm.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{doi_apply, SpectralPair, SymbolGrid};
use crate::error::Result;
use crate::linalg::norms::{lp_norm, norming_dual, singular_values};
use crate::linalg::{ComplexMatrix, SchattenP};
use crate::rng::random_complex_matrix;

pub const SAMPLED_LABEL: &str = "sampled lower bound";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledNorm {
    pub value: f64,
    pub p: f64,
    pub evaluations: usize,
    pub label: &'static str,
}

fn schatten(m: &ComplexMatrix, p: SchattenP) -> Result<f64> {
    Ok(lp_norm(&singular_values(m)?, p))
}

/// Power iteration on `T ↦ Φ*(Φ(T))` in the Frobenius inner product; returns the estimate
/// of `‖Φ‖_{C_2 → C_2}`.
pub fn hs_norm_power_iteration(
    pair: &SpectralPair,
    phi: &SymbolGrid,
    iterations: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    let n = pair.dim();
    let adjoint = phi.conj();
    let mut t = random_complex_matrix(rng, n, n);
    t = t.scale_re(1.0 / t.frobenius_norm());
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let image = doi_apply(pair, phi, &t)?;
        estimate = image.frobenius_norm();
        let back = doi_apply(pair, &adjoint, &image)?;
        let norm = back.frobenius_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        t = back.scale_re(1.0 / norm);
    }
    Ok(estimate)
}

/// Rayleigh–Ritz estimate of `‖Φ‖_{C_2 → C_2}` on the Krylov space of power iterates of
/// `Φ*Φ` from a random start, with full reorthogonalization.
///
/// Once the space reaches the number of distinct values of `|φ|` the estimate is exact, so
/// ties near the maximum do not stall it the way plain power iteration does.
pub fn hs_norm_krylov(pair: &SpectralPair, phi: &SymbolGrid, max_dim: usize, rng: &mut impl Rng) -> Result<f64> {
    let n = pair.dim();
    let adjoint = phi.conj();
    let inner = |x: &ComplexMatrix, y: &ComplexMatrix| -> Complex64 {
        x.data().iter().zip(y.data()).map(|(a, b)| a.conj() * b).sum()
    };
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut images: Vec<ComplexMatrix> = Vec::new();
    let mut v = random_complex_matrix(rng, n, n);
    for _ in 0..max_dim.min(n * n).max(1) {
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &v);
                v = &v - &q.scale(c);
            }
        }
        let norm = v.frobenius_norm();
        if norm <= 1e-12 * images.iter().map(|m| m.frobenius_norm()).fold(1e-300, f64::max) {
            break;
        }
        let q = v.scale_re(1.0 / norm);
        let image = doi_apply(pair, &adjoint, &doi_apply(pair, phi, &q)?)?;
        v = image.clone();
        basis.push(q);
        images.push(image);
    }
    let k = basis.len();
    let mut h = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            h[(i, j)] = inner(&basis[i], &images[j]);
        }
    }
    let top = crate::linalg::eig_hermitian(&crate::linalg::HermitianMatrix::symmetrize(&h))?
        .eigenvalues()
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// `max ‖Φ(T)‖_p / ‖T‖_p` over the given operands.
pub fn sampled_lower_bound_random(
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    p: SchattenP,
    samples: &[ComplexMatrix],
) -> Result<SampledNorm> {
    let mut best: f64 = 0.0;
    for t in samples {
        let tn = schatten(t, p)?;
        if tn == 0.0 {
            continue;
        }
        best = best.max(schatten(&map(t)?, p)? / tn);
    }
    Ok(SampledNorm { value: best, p: p.value(), evaluations: samples.len(), label: SAMPLED_LABEL })
}

/// Alternating dual ascent for `sup ‖Φ(T)‖_p` over the unit ball of `C_p`.
///
/// From `T` the step forms the norming functional `X` of `Φ(T)` in `C_q`, then replaces `T`
/// by the norming element of `Φ*(X)`. `Re tr(X* Φ(T))` never decreases, and each visited
/// `T` certifies a lower bound.
pub fn sampled_multiplier_norm(
    pair: &SpectralPair,
    phi: &SymbolGrid,
    p: SchattenP,
    starts: &[ComplexMatrix],
    steps: usize,
) -> Result<SampledNorm> {
    let adjoint = phi.conj();
    let q = p.conjugate();
    let mut best: f64 = 0.0;
    let mut evaluations = 0;
    for start in starts {
        let norm = schatten(start, p)?;
        if norm == 0.0 {
            continue;
        }
        let mut t = start.scale_re(1.0 / norm);
        for _ in 0..=steps {
            let image = doi_apply(pair, phi, &t)?;
            evaluations += 1;
            let value = schatten(&image, p)?;
            best = best.max(value);
            if value == 0.0 {
                break;
            }
            let x = norming_dual(&image, p)?;
            let w = doi_apply(pair, &adjoint, &x)?;
            let next = norming_dual(&w, q)?;
            if next.max_abs() == 0.0 {
                break;
            }
            t = next;
        }
    }
    Ok(SampledNorm { value: best, p: p.value(), evaluations, label: SAMPLED_LABEL })
}

/// Toeplitz start `T_jk = 1/(j - k + 1/2)`, a near-extremal operand for triangular truncation.
pub fn hilbert_start(n: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            t[(j, k)] = Complex64::new(1.0 / (j as f64 - k as f64 + 0.5), 0.0);
        }
    }
    t
}
