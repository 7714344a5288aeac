//! Double operator integrals realized as Schur multipliers in joint eigenbases.
//!
//! For hermitian `A = U diag(λ) U*` and `B = V diag(μ) V*` the transformer with symbol `φ`
//! acts as
//!
//! ```text
//! T  ↦  U · (Φ ⊙ (U* T V)) · V*,      Φ_ij = φ(λ_i, μ_j)
//! ```
//!
//! so `φ = χ_{E×F}` gives exactly `P_A(E) T P_B(F)`.

mod decomposition;
pub mod experiment;
mod fourier;
mod norm_estimate;
mod symbol;

pub use decomposition::{peller_bound, symbol_from_decomposition, Decomposition, DecompositionTerm};
pub use experiment::{lipschitz_ratio_experiment, ExperimentReport, Histogram, LipschitzConfig};
pub use fourier::{doi_fourier, FourierDoi};
pub use norm_estimate::{
    hilbert_start, hs_norm_krylov, hs_norm_power_iteration, sampled_lower_bound_random, sampled_multiplier_norm, SampledNorm,
    SAMPLED_LABEL,
};
pub use symbol::SymbolGrid;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, EigenSystem, HermitianMatrix};

/// Relative gap below which two nodes count as coincident in a divided difference.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Eigensystems of `A` (left) and `B` (right).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPair {
    left: EigenSystem,
    right: EigenSystem,
}

pub fn make_spectral_pair(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<SpectralPair> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    Ok(SpectralPair { left: eig_hermitian(a)?, right: eig_hermitian(b)? })
}

impl SpectralPair {
    pub fn from_systems(left: EigenSystem, right: EigenSystem) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::dims(left.dim(), right.dim()));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &EigenSystem {
        &self.left
    }

    pub fn right(&self) -> &EigenSystem {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// Largest spectral radius of the two operators.
    pub fn scale(&self) -> f64 {
        self.left.spectral_radius().max(self.right.spectral_radius())
    }

    /// Samples a closed-form symbol on `σ(A) × σ(B)`.
    pub fn symbol(&self, f: impl Fn(f64, f64) -> Complex64) -> Result<SymbolGrid> {
        SymbolGrid::from_fn(self.left.eigenvalues(), self.right.eigenvalues(), f)
    }

    /// `U* T V`.
    pub fn to_eigenbasis(&self, t: &ComplexMatrix) -> ComplexMatrix {
        &(&self.left.unitary().adjoint() * t) * self.right.unitary()
    }

    /// `U S V*`.
    pub fn from_eigenbasis(&self, s: &ComplexMatrix) -> ComplexMatrix {
        &(self.left.unitary() * s) * &self.right.unitary().adjoint()
    }

    fn check_operand(&self, t: &ComplexMatrix) -> Result<()> {
        let n = self.dim();
        if t.rows() != n || t.cols() != n {
            return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", t.rows(), t.cols())));
        }
        Ok(())
    }

    fn check_symbol(&self, phi: &SymbolGrid) -> Result<()> {
        let n = self.dim();
        if phi.shape() != (n, n) {
            return Err(Error::dims(format!("({n}, {n}) symbol grid"), format!("{:?}", phi.shape())));
        }
        Ok(())
    }
}

/// Applies the double operator integral with symbol `phi` to `t`.
pub fn doi_apply(pair: &SpectralPair, phi: &SymbolGrid, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    pair.check_symbol(phi)?;
    pair.check_operand(t)?;
    let n = pair.dim();
    let grid = ComplexMatrix::new(n, n, phi.values().to_vec())?;
    Ok(pair.from_eigenbasis(&grid.hadamard(&pair.to_eigenbasis(t))))
}

/// Divided difference `(f(λ) - f(μ)) / (λ - μ)`, with `f'((λ+μ)/2)` once
/// `|λ - μ| <= 1e-9 · scale`.
pub fn divided_difference_symbol(
    pair: &SpectralPair,
    f: impl Fn(f64) -> f64,
    f_prime: impl Fn(f64) -> f64,
) -> Result<SymbolGrid> {
    let cutoff = COINCIDENCE_TOL * pair.scale();
    let eval = |g: &dyn Fn(f64) -> f64, x: f64| -> Result<f64> {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { at: x, value: v.to_string() })
        }
    };
    let (left, right) = (pair.left.eigenvalues(), pair.right.eigenvalues());
    let mut values = Vec::with_capacity(left.len() * right.len());
    for &l in left {
        let fl = eval(&f, l)?;
        for &m in right {
            let v = if (l - m).abs() > cutoff {
                (fl - eval(&f, m)?) / (l - m)
            } else {
                eval(&f_prime, 0.5 * (l + m))?
            };
            values.push(Complex64::new(v, 0.0));
        }
    }
    SymbolGrid::new(left.to_vec(), right.to_vec(), values)
}

/// Norm of the transformer on Hilbert–Schmidt operators: `max |φ(λ_i, μ_j)|`.
pub fn hs_multiplier_norm(pair: &SpectralPair, phi: &SymbolGrid) -> Result<f64> {
    pair.check_symbol(phi)?;
    Ok(phi.max_abs())
}

/// `χ_{λ > μ}` on the pair's spectra (ties map to 0).
pub fn triangular_symbol(pair: &SpectralPair) -> Result<SymbolGrid> {
    pair.symbol(|l, m| Complex64::new(if l > m { 1.0 } else { 0.0 }, 0.0))
}

pub fn triangular_truncation(pair: &SpectralPair, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    doi_apply(pair, &triangular_symbol(pair)?, t)
}

/// Spectral pair of `diag(1..=n)` with itself; its transformers act in the standard basis.
pub fn standard_pair(n: usize) -> Result<SpectralPair> {
    let d: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let h = HermitianMatrix::from_real_diag(&d);
    make_spectral_pair(&h, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::apply_function;
    use crate::rng::{random_complex_matrix, random_hermitian, substream};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_pair(seed: u64, n: usize) -> (HermitianMatrix, HermitianMatrix, SpectralPair) {
        let mut rng = substream(seed, "doi-test", 0);
        let a = random_hermitian(&mut rng, n);
        let b = random_hermitian(&mut rng, n);
        let pair = make_spectral_pair(&a, &b).unwrap();
        (a, b, pair)
    }

    #[test]
    fn spectral_pair_examples() {
        let p = make_spectral_pair(&HermitianMatrix::from_real_diag(&[0.0, 1.0]), &HermitianMatrix::from_real_diag(&[0.0, 2.0]))
            .unwrap();
        assert_eq!(p.left().eigenvalues(), &[0.0, 1.0]);
        assert_eq!(p.right().eigenvalues(), &[0.0, 2.0]);
        let (a, b, pair) = random_pair(1, 5);
        for (h, e) in [(&a, pair.left()), (&b, pair.right())] {
            let r = (&e.reconstruct() - h.as_matrix()).frobenius_norm() / h.as_matrix().frobenius_norm();
            assert!(r <= 1e-10);
        }
        let same = make_spectral_pair(&a, &a).unwrap();
        assert_eq!(same.left(), same.right());
        assert!(make_spectral_pair(&a, &HermitianMatrix::zeros(2)).is_err());
    }

    #[test]
    fn identity_symbol_is_identity_transformer() {
        let (_, _, pair) = random_pair(2, 4);
        let mut rng = substream(2, "t", 0);
        let t = random_complex_matrix(&mut rng, 4, 4);
        let one = pair.symbol(|_, _| c(1.0)).unwrap();
        assert!(doi_apply(&pair, &one, &t).unwrap().max_abs_diff(&t) < 1e-13);
    }

    #[test]
    fn indicator_gives_projector_sandwich() {
        let (_, _, pair) = random_pair(3, 5);
        let mut rng = substream(3, "t", 0);
        let t = random_complex_matrix(&mut rng, 5, 5);
        let lmin = pair.left().eigenvalues()[0];
        let phi = SymbolGrid::indicator(pair.left().eigenvalues(), pair.right().eigenvalues(), |l| l <= lmin, |_| true)
            .unwrap();
        let expected = &pair.left().projector(|l| l <= lmin) * &t;
        assert!(doi_apply(&pair, &phi, &t).unwrap().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn divided_difference_reproduces_perturbation() {
        let (a, b, pair) = random_pair(4, 6);
        let phi = divided_difference_symbol(&pair, |x| x * x, |x| 2.0 * x).unwrap();
        let diff = (&a - &b).into_matrix();
        let lhs = doi_apply(&pair, &phi, &diff).unwrap();
        let a2 = apply_function(pair.left(), |x| x * x).unwrap();
        let b2 = apply_function(pair.right(), |x| x * x).unwrap();
        let rhs = (&a2 - &b2).into_matrix();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn divided_difference_examples() {
        let (_, _, pair) = random_pair(5, 3);
        let phi = divided_difference_symbol(&pair, |x| x, |_| 1.0).unwrap();
        assert!(phi.values().iter().all(|z| (z - c(1.0)).norm() < 1e-12));

        let p = make_spectral_pair(&HermitianMatrix::from_real_diag(&[1.0]), &HermitianMatrix::from_real_diag(&[3.0]))
            .unwrap();
        let phi = divided_difference_symbol(&p, |x| x * x, |x| 2.0 * x).unwrap();
        assert_eq!(phi.get(0, 0), c(4.0));

        let p = make_spectral_pair(&HermitianMatrix::from_real_diag(&[2.0]), &HermitianMatrix::from_real_diag(&[2.0]))
            .unwrap();
        let phi = divided_difference_symbol(&p, |x| x * x, |x| 2.0 * x).unwrap();
        assert_eq!(phi.get(0, 0), c(4.0));

        assert!(matches!(
            divided_difference_symbol(&p, |x| (x - 2.0).ln(), |x| 1.0 / (x - 2.0)),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn hs_norm_examples() {
        let (_, _, pair) = random_pair(6, 3);
        let phi = pair.symbol(|_, _| Complex64::new(0.0, -2.5)).unwrap();
        assert_eq!(hs_multiplier_norm(&pair, &phi).unwrap(), 2.5);
        let p = make_spectral_pair(&HermitianMatrix::from_real_diag(&[0.0, 1.0]), &HermitianMatrix::from_real_diag(&[0.0, 2.0]))
            .unwrap();
        let phi = p.symbol(|l, m| c(l + m)).unwrap();
        assert_eq!(hs_multiplier_norm(&p, &phi).unwrap(), 3.0);
        let wrong = SymbolGrid::constant(&[0.0], &[0.0], c(1.0)).unwrap();
        assert!(hs_multiplier_norm(&p, &wrong).is_err());
    }

    #[test]
    fn triangular_truncation_in_standard_basis() {
        let n = 5;
        let pair = standard_pair(n).unwrap();
        let mut rng = substream(7, "t", 0);
        let t = random_complex_matrix(&mut rng, n, n);
        let out = triangular_truncation(&pair, &t).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i > j { t[(i, j)] } else { Complex64::new(0.0, 0.0) };
                assert!((out[(i, j)] - expected).norm() < 1e-15);
            }
        }
        let twice = triangular_truncation(&pair, &out).unwrap();
        assert!(twice.max_abs_diff(&out) < 1e-15);
        assert_eq!(hs_multiplier_norm(&pair, &triangular_symbol(&pair).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn rejects_mismatched_operands() {
        let (_, _, pair) = random_pair(8, 3);
        let phi = pair.symbol(|_, _| c(1.0)).unwrap();
        assert!(doi_apply(&pair, &phi, &ComplexMatrix::identity(2)).is_err());
    }
}
