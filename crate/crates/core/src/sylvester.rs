//! `AX - XB = Y` for hermitian `A`, `B` with separated spectra.
//!
//! The solution is the double operator integral of `Y` against `1/(λ - μ)`. With
//! `δ = dist(σ(A), σ(B))`, `‖X‖_p <= (π / 2δ) ‖Y‖_p` in every Schatten class.
//! [`kron_oracle`] solves the vectorized `n² × n²` system directly and serves as an
//! independent check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::doi::{doi_apply, make_spectral_pair, SpectralPair};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, schatten_norm, ComplexMatrix, HermitianMatrix, SchattenP};

/// Gaps below this fraction of the spectral scale are refused as ill-posed.
pub const MIN_RELATIVE_GAP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub delta: f64,
    pub p: f64,
    pub x_norm: f64,
    pub y_norm: f64,
    /// `π / (2δ) · ‖Y‖_p`
    pub bound: f64,
    /// `‖AX - XB - Y‖_p`
    pub residual: f64,
}

impl GapReport {
    pub fn bound_holds(&self) -> bool {
        self.x_norm <= self.bound * (1.0 + 1e-12) + 1e-300
    }
}

/// `(δ, λ, μ)` with `δ = |λ - μ|` minimal over `λ ∈ σ(A)`, `μ ∈ σ(B)`.
fn closest_pair(left: &[f64], right: &[f64]) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, f64::NAN, f64::NAN);
    for &l in left {
        for &m in right {
            let d = (l - m).abs();
            if d < best.0 {
                best = (d, l, m);
            }
        }
    }
    best
}

pub fn spectral_gap(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    let (ea, eb) = (eig_hermitian(a)?, eig_hermitian(b)?);
    Ok(closest_pair(ea.eigenvalues(), eb.eigenvalues()).0)
}

/// Solves by the spectral representation and reports norms in `C_p`.
pub fn solve_gap(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    y: &ComplexMatrix,
    p: f64,
) -> Result<(ComplexMatrix, GapReport)> {
    let p = SchattenP::new(p)?;
    let pair = make_spectral_pair(a, b)?;
    let x = solve_with_pair(&pair, y)?;
    let delta = closest_pair(pair.left().eigenvalues(), pair.right().eigenvalues()).0;
    let residual_m = &(&(a.as_matrix() * &x) - &(&x * b.as_matrix())) - y;
    let y_norm = schatten_norm(y, p.value())?;
    let report = GapReport {
        delta,
        p: p.value(),
        x_norm: schatten_norm(&x, p.value())?,
        y_norm,
        bound: PI / (2.0 * delta) * y_norm,
        residual: schatten_norm(&residual_m, p.value())?,
    };
    Ok((x, report))
}

/// `X = ∫∫ dP_A(λ) Y dP_B(μ) / (λ - μ)` on a precomputed pair.
pub fn solve_with_pair(pair: &SpectralPair, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (delta, lambda, mu) = closest_pair(pair.left().eigenvalues(), pair.right().eigenvalues());
    let scale = pair.scale();
    if delta == 0.0 || delta < MIN_RELATIVE_GAP * scale {
        return Err(Error::IllPosed { lambda, mu, distance: delta });
    }
    let phi = pair.symbol(|l, m| Complex64::new(1.0 / (l - m), 0.0))?;
    doi_apply(pair, &phi, y)
}

/// Direct solve of `(I ⊗ A - Bᵀ ⊗ I) vec(X) = vec(Y)` (column-stacking `vec`) by Gaussian
/// elimination with partial pivoting.
pub fn kron_oracle(a: &HermitianMatrix, b: &HermitianMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    if b.dim() != n || y.rows() != n || y.cols() != n {
        return Err(Error::dims(format!("{n}x{n} operands"), format!("B {}x{}, Y {}x{}", b.dim(), b.dim(), y.rows(), y.cols())));
    }
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let size = n * n;
    // index of X_ij in vec(X) is j*n + i
    let mut m = vec![Complex64::new(0.0, 0.0); size * size];
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            rhs[row] = y[(i, j)];
            // (AX)_ij = Σ_k A_ik X_kj
            for k in 0..n {
                m[row * size + j * n + k] += am[(i, k)];
            }
            // (XB)_ij = Σ_k X_ik B_kj
            for k in 0..n {
                m[row * size + k * n + i] -= bm[(k, j)];
            }
        }
    }
    let sol = gaussian_solve(&mut m, &mut rhs, size)?;
    let mut x = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            x[(i, j)] = sol[j * n + i];
        }
    }
    Ok(x)
}

fn gaussian_solve(m: &mut [Complex64], rhs: &mut [Complex64], size: usize) -> Result<Vec<Complex64>> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = scale * 1e-14 * size as f64;
    for col in 0..size {
        let (piv, piv_abs) = (col..size)
            .map(|r| (r, m[r * size + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= tiny {
            return Err(Error::Singular { column: col, pivot: piv_abs });
        }
        if piv != col {
            for k in 0..size {
                m.swap(col * size + k, piv * size + k);
            }
            rhs.swap(col, piv);
        }
        let pivot = m[col * size + col];
        for r in (col + 1)..size {
            let factor = m[r * size + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..size {
                let v = m[col * size + k];
                m[r * size + k] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); size];
    for r in (0..size).rev() {
        let mut acc = rhs[r];
        for k in (r + 1)..size {
            acc -= m[r * size + k] * x[k];
        }
        x[r] = acc / m[r * size + r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_complex_matrix, random_hermitian, substream};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gap_examples() {
        let a = HermitianMatrix::from_real_diag(&[2.0, 3.0]);
        let b = HermitianMatrix::from_real_diag(&[0.0, 1.0]);
        assert_eq!(spectral_gap(&a, &b).unwrap(), 1.0);
        assert_eq!(spectral_gap(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn shifted_pair_gap_bound() {
        let mut rng = substream(1, "gap", 0);
        let a0 = random_hermitian(&mut rng, 5);
        let b = random_hermitian(&mut rng, 5);
        let ra = eig_hermitian(&a0).unwrap().spectral_radius();
        let rb = eig_hermitian(&b).unwrap().spectral_radius();
        let radius = ra.max(rb);
        let a = a0.shifted(10.0 * radius);
        assert!(spectral_gap(&a, &b).unwrap() >= 10.0 * radius - (ra + rb) - 1e-12);
    }

    #[test]
    fn diagonal_solution_is_entrywise() {
        let a = HermitianMatrix::from_real_diag(&[2.0, 3.0]);
        let b = HermitianMatrix::from_real_diag(&[0.0, 1.0]);
        let y = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (x, report) = solve_gap(&a, &b, &y, 2.0).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![0.5, 1.0], vec![1.0 / 3.0, 0.5]]).unwrap();
        assert!(x.max_abs_diff(&expected) < 1e-15);
        assert!(report.residual < 1e-15);
        assert!(report.bound_holds());
        let (x0, _) = solve_gap(&a, &b, &ComplexMatrix::zeros(2, 2), 1.0).unwrap();
        assert_eq!(x0.max_abs(), 0.0);
    }

    #[test]
    fn zero_gap_is_ill_posed() {
        let a = HermitianMatrix::from_real_diag(&[1.0, 2.0]);
        let b = HermitianMatrix::from_real_diag(&[2.0, 5.0]);
        match solve_gap(&a, &b, &ComplexMatrix::identity(2), 2.0) {
            Err(Error::IllPosed { lambda, mu, distance }) => {
                assert_eq!((lambda, mu, distance), (2.0, 2.0, 0.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oracle_small_cases() {
        let a = HermitianMatrix::from_real_diag(&[2.0]);
        let b = HermitianMatrix::from_real_diag(&[0.0]);
        let x = kron_oracle(&a, &b, &ComplexMatrix::from_real_diag(&[3.0])).unwrap();
        assert_eq!(x[(0, 0)], c(1.5));

        let mut rng = substream(2, "kron", 0);
        let b = random_hermitian(&mut rng, 4);
        let a = b.shifted(2.5);
        let y = b.as_matrix() * b.as_matrix();
        let x = kron_oracle(&a, &b, &y).unwrap();
        assert!(x.max_abs_diff(&y.scale_re(1.0 / 2.5)) < 1e-12);

        assert!(matches!(kron_oracle(&b, &b, &y), Err(Error::Singular { .. })));
    }

    #[test]
    fn routes_agree_on_random_gapped_pairs() {
        for trial in 0..20 {
            let mut rng = substream(3, "sylv", trial);
            let n = 2 + (trial as usize % 5);
            let a = random_hermitian(&mut rng, n).shifted(8.0);
            let b = random_hermitian(&mut rng, n);
            let y = random_complex_matrix(&mut rng, n, n);
            let (x, report) = solve_gap(&a, &b, &y, f64::INFINITY).unwrap();
            let x2 = kron_oracle(&a, &b, &y).unwrap();
            assert!(x.max_abs_diff(&x2) <= 1e-8);
            assert!(report.residual <= 1e-9);
            assert!(report.bound_holds());
        }
    }
}
