//! Singular values and Schatten norms.

use num_complex::Complex64;

use super::eigen::eig_hermitian;
use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Schatten exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchattenP(f64);

impl SchattenP {
    pub const ONE: SchattenP = SchattenP(1.0);
    pub const TWO: SchattenP = SchattenP(2.0);
    pub const INF: SchattenP = SchattenP(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("Schatten exponent must be >= 1, got {p}")));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Self {
        if self.0 == 1.0 {
            Self::INF
        } else if self.0.is_infinite() {
            Self::ONE
        } else {
            Self(self.0 / (self.0 - 1.0))
        }
    }
}

/// Singular values in descending order.
///
/// Computed as the non-negative eigenvalues of the hermitian dilation `[[0, M], [M*, 0]]`
/// rather than of `M* M`, so small singular values keep absolute accuracy `~eps·‖M‖`.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let e = eig_hermitian(&dilation(m))?;
    let k = m.rows().min(m.cols());
    Ok(e.eigenvalues().iter().rev().take(k).map(|&x| x.max(0.0)).collect())
}

fn dilation(m: &ComplexMatrix) -> HermitianMatrix {
    let (r, c) = (m.rows(), m.cols());
    let mut d = ComplexMatrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            d[(i, r + j)] = m[(i, j)];
            d[(r + j, i)] = m[(i, j)].conj();
        }
    }
    HermitianMatrix::symmetrize(&d)
}

/// ℓ^p norm of the singular values.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    let p = SchattenP::new(p)?;
    Ok(lp_norm(&singular_values(m)?, p))
}

pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

pub(crate) fn lp_norm(s: &[f64], p: SchattenP) -> f64 {
    if p.is_infinite() {
        return s.iter().fold(0.0, |m, &x| m.max(x.abs()));
    }
    let max = s.iter().fold(0.0, |m: f64, &x| m.max(x.abs()));
    if max == 0.0 {
        return 0.0;
    }
    // scaled to avoid overflow for large p
    let sum: f64 = s.iter().map(|&x| (x.abs() / max).powf(p.0)).sum();
    max * sum.powf(1.0 / p.0)
}

/// Thin singular value decomposition restricted to singular values above `rel_tol · σ_max`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub values: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
}

pub fn svd(m: &ComplexMatrix, rel_tol: f64) -> Result<Svd> {
    let (r, c) = (m.rows(), m.cols());
    let e = eig_hermitian(&dilation(m))?;
    let dim = e.dim();
    let smax = e.eigenvalues()[dim - 1].max(0.0);
    let mut out = Svd { values: vec![], left: vec![], right: vec![] };
    for k in (0..dim).rev().take(r.min(c)) {
        let s = e.eigenvalues()[k];
        if s <= 0.0 || s <= rel_tol * smax {
            break;
        }
        let vec = e.eigenvector(k);
        let unit = |part: &[Complex64]| {
            let n = part.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            part.iter().map(|z| z / n).collect::<Vec<_>>()
        };
        out.values.push(s);
        out.left.push(unit(&vec[..r]));
        out.right.push(unit(&vec[r..]));
    }
    Ok(out)
}

/// The norming functional of `m` in `C_p`: an `X` with `‖X‖_q = 1` and `tr(X* m) = ‖m‖_p`.
pub fn norming_dual(m: &ComplexMatrix, p: SchattenP) -> Result<ComplexMatrix> {
    let d = svd(m, 1e-12)?;
    let mut x = ComplexMatrix::zeros(m.rows(), m.cols());
    if d.values.is_empty() {
        return Ok(x);
    }
    let weights: Vec<f64> = if p.is_infinite() {
        let mut w = vec![0.0; d.values.len()];
        w[0] = 1.0;
        w
    } else if p.0 == 1.0 {
        vec![1.0; d.values.len()]
    } else {
        let norm = lp_norm(&d.values, p);
        d.values.iter().map(|s| (s / norm).powf(p.0 - 1.0)).collect()
    };
    for ((u, v), w) in d.left.iter().zip(&d.right).zip(weights) {
        if w == 0.0 {
            continue;
        }
        x = &x + &ComplexMatrix::outer(u, v).scale_re(w);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_complex_matrix, random_unit_vector, substream};

    #[test]
    fn identity_trace_norm() {
        for n in 1..6 {
            let i = ComplexMatrix::identity(n);
            assert!((schatten_norm(&i, 1.0).unwrap() - n as f64).abs() < 1e-12);
            assert!((schatten_norm(&i, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_projector_has_unit_norm() {
        let mut rng = substream(1, "norms", 0);
        let w = random_unit_vector(&mut rng, 5);
        let p = ComplexMatrix::outer(&w, &w);
        for q in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            assert!((schatten_norm(&p, q).unwrap() - 1.0).abs() < 1e-12, "p={q}");
        }
    }

    #[test]
    fn two_norm_is_frobenius() {
        let mut rng = substream(2, "norms", 0);
        for _ in 0..20 {
            let m = random_complex_matrix(&mut rng, 4, 4);
            let oracle = m.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((schatten_norm(&m, 2.0).unwrap() - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_p_below_one() {
        assert!(matches!(schatten_norm(&ComplexMatrix::identity(2), 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn norming_dual_attains_norm() {
        let mut rng = substream(3, "norms", 0);
        let m = random_complex_matrix(&mut rng, 4, 4);
        for p in [SchattenP::ONE, SchattenP::new(3.0).unwrap(), SchattenP::TWO, SchattenP::INF] {
            let x = norming_dual(&m, p).unwrap();
            let pairing = (&x.adjoint() * &m).trace();
            let norm = schatten_norm(&m, p.value()).unwrap();
            assert!((pairing.re - norm).abs() < 1e-9 * norm.max(1.0), "p={p:?}");
            assert!(pairing.im.abs() < 1e-9);
            let qn = schatten_norm(&x, p.conjugate().value()).unwrap();
            assert!((qn - 1.0).abs() < 1e-9);
        }
    }
}
