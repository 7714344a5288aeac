//! Cyclic Jacobi eigensolver for hermitian matrices and the functional calculus built on it.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies a real plane
//! rotation that annihilates it. Sweeps visit `(p, q)` in row order, so the output is a
//! deterministic function of the input. Eigenvalues are returned ascending (stable for ties)
//! and each eigenvector is normalized so its first component with modulus above `1e-8` is
//! real and positive.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius threshold that ends the sweeps.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
const PHASE_THRESHOLD: f64 = 1e-8;

/// Diagonalization `H = U diag(eigenvalues) U*`; the columns of `unitary` are eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    unitary: ComplexMatrix,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.unitary.column(i)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.conjugate_diag(&diag)
    }

    /// `U diag(d) U*`.
    pub fn conjugate_diag(&self, d: &[Complex64]) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(d.len(), n);
        let u = &self.unitary;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, dk) in d.iter().enumerate() {
                    acc += u[(i, k)] * dk * u[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Spectral projection onto the eigenvectors whose eigenvalue satisfies `pred`.
    pub fn projector(&self, pred: impl Fn(f64) -> bool) -> ComplexMatrix {
        let d: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&x| Complex64::new(if pred(x) { 1.0 } else { 0.0 }, 0.0))
            .collect();
        self.conjugate_diag(&d)
    }

    /// Complex functional calculus `f(H) = U diag(f(λ_i)) U*`.
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> Result<ComplexMatrix> {
        let mut d = Vec::with_capacity(self.dim());
        for &x in &self.eigenvalues {
            let v = f(x);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Evaluation { at: x, value: v.to_string() });
            }
            d.push(v);
        }
        Ok(self.conjugate_diag(&d))
    }

    /// `tr f(H) = Σ f(λ_i)`.
    pub fn trace_of(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.eigenvalues.iter().map(|&x| f(x)).sum()
    }

    /// `(H - z I)^{-1}` for non-real `z` (or `z` off the spectrum).
    pub fn resolvent(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.apply_complex(|x| 1.0 / (Complex64::new(x, 0.0) - z))
    }
}

/// Diagonalizes a hermitian matrix with cyclic Jacobi sweeps.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenSystem> {
    let m = h.as_matrix();
    if !m.is_finite() {
        return Err(Error::Domain("hermitian matrix has non-finite entries".into()));
    }
    let n = h.dim();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);

    let total = a.frobenius_norm();
    let threshold = JACOBI_TOL * total;
    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }
    if !converged {
        return Err(Error::Convergence { sweeps, residual: off_diagonal_norm(&a) });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut unitary = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let vec = v.column(src);
        let phase = vec
            .iter()
            .find(|z| z.norm() > PHASE_THRESHOLD)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        for (row, z) in vec.iter().enumerate() {
            unitary[(row, col)] = z * phase;
        }
    }
    Ok(EigenSystem { eigenvalues, unitary })
}

/// Real functional calculus; the result is hermitian.
pub fn apply_function(e: &EigenSystem, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let m = e.apply_complex(|x| Complex64::new(f(x), 0.0))?;
    Ok(HermitianMatrix::symmetrize(&m))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`: `A <- G* A G`, `V <- V G` with
/// `G = diag(1, e^{-iθ}) · [[c, s], [-s, c]]` on the `(p, q)` plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip entries that are already negligible next to both diagonal entries
    if r < 1e-300 || (app.abs() + r == app.abs() && aqq.abs() + r == aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r; // e^{iθ}
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    let ph_conj = phase.conj();
    // columns: A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // rows: A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_hermitian, substream};

    fn rel_residual(h: &HermitianMatrix, e: &EigenSystem) -> f64 {
        let diff = &e.reconstruct() - h.as_matrix();
        diff.frobenius_norm() / h.as_matrix().frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn diagonal_input_gives_permutation() {
        let h = HermitianMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 2.0, 3.0]);
        let u = e.unitary();
        for i in 0..3 {
            for j in 0..3 {
                let m = u[(i, j)].norm();
                assert!(m == 0.0 || (m - 1.0).abs() < 1e-15);
            }
        }
        assert_eq!(u[(1, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn swap_matrix() {
        let h = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-15);
        assert!(rel_residual(&h, &e) < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = substream(11, "eig", 0);
        for n in [1, 2, 6, 16, 32] {
            let h = random_hermitian(&mut rng, n);
            let e = eig_hermitian(&h).unwrap();
            assert!(rel_residual(&h, &e) <= 1e-10, "n={n}");
            let uu = e.unitary() * &e.unitary().adjoint();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            assert!(e.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            for k in 0..n {
                let first = e.eigenvector(k).into_iter().find(|z| z.norm() > 1e-8).unwrap();
                assert!(first.im.abs() < 1e-15 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let h = HermitianMatrix::from_real_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ])
        .unwrap();
        let e = eig_hermitian(&h).unwrap();
        let ev = e.eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14 && (ev[2] - 2.0).abs() < 1e-14);
        assert!(rel_residual(&h, &e) < 1e-14);
    }

    #[test]
    fn zero_matrix_and_nonfinite() {
        let e = eig_hermitian(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(e.eigenvalues(), &[0.0, 0.0, 0.0]);
        let bad = HermitianMatrix::symmetrize(&ComplexMatrix::from_real_diag(&[f64::INFINITY]));
        assert!(matches!(eig_hermitian(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn functional_calculus_examples() {
        let mut rng = substream(3, "fc", 0);
        let h = random_hermitian(&mut rng, 5);
        let e = eig_hermitian(&h).unwrap();
        let id = apply_function(&e, |x| x).unwrap();
        assert!(id.as_matrix().max_abs_diff(h.as_matrix()) < 1e-12);

        let z = eig_hermitian(&HermitianMatrix::zeros(4)).unwrap();
        let ex = apply_function(&z, f64::exp).unwrap();
        assert_eq!(ex.as_matrix(), &ComplexMatrix::identity(4));

        let one = eig_hermitian(&HermitianMatrix::from_real_diag(&[1.0])).unwrap();
        let at = apply_function(&one, f64::atan).unwrap();
        assert!((at.as_matrix()[(0, 0)].re - std::f64::consts::FRAC_PI_4).abs() < 1e-16);
    }

    #[test]
    fn functional_calculus_is_additive_in_f() {
        let mut rng = substream(5, "fc-add", 0);
        let h = random_hermitian(&mut rng, 6);
        let e = eig_hermitian(&h).unwrap();
        let f = |x: f64| x.sin();
        let g = |x: f64| x * x;
        let lhs = apply_function(&e, |x| f(x) + g(x)).unwrap();
        let rhs = &apply_function(&e, f).unwrap() + &apply_function(&e, g).unwrap();
        assert!(lhs.as_matrix().max_abs_diff(rhs.as_matrix()) < 1e-13);
    }

    #[test]
    fn evaluation_error_names_eigenvalue() {
        let e = eig_hermitian(&HermitianMatrix::from_real_diag(&[-1.0, 4.0])).unwrap();
        match apply_function(&e, f64::sqrt) {
            Err(Error::Evaluation { at, .. }) => assert_eq!(at, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
