use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Unitary DFT on `Z_n`: `F[j][k] = n^{-1/2} exp(-2πi jk/n)`.
pub fn dft_unitary(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::Domain("DFT size must be at least 1".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut f = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            // reduce jk mod n first so the angle stays exact for large products
            let r = (j * k) % n;
            let theta = -2.0 * PI * r as f64 / n as f64;
            f[(j, k)] = Complex64::from_polar(scale, theta);
        }
    }
    Ok(f)
}
