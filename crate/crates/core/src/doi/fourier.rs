//! Fourier route: for `φ(λ, μ) = f̂(λ - μ)` with `f̂(ξ) = ∫ e^{-itξ} f(t) dt`,
//!
//! ```text
//! ∫ φ d(P_A ⊗ P_B) (T) = ∫ e^{-itA} T e^{itB} f(t) dt
//! ```
//!
//! evaluated by quadrature with each exponential formed through the functional calculus.

use num_complex::Complex64;

use super::SpectralPair;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quadrature::QuadConfig;

/// Quadrature samples `(t_m, w_m f(t_m))` bound to a spectral pair.
#[derive(Clone, Debug)]
pub struct FourierDoi<'a> {
    pair: &'a SpectralPair,
    samples: Vec<(f64, Complex64)>,
}

impl<'a> FourierDoi<'a> {
    pub fn new(pair: &'a SpectralPair, f: impl Fn(f64) -> Complex64, quad: &QuadConfig) -> Result<Self> {
        let points = quad.points()?;
        if points.is_empty() {
            return Err(Error::Quadrature("empty quadrature".into()));
        }
        let mut samples = Vec::with_capacity(points.len());
        for (t, w) in points {
            let v = f(t);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Evaluation { at: t, value: v.to_string() });
            }
            samples.push((t, v * w));
        }
        Ok(Self { pair, samples })
    }

    /// Quadrature value of `∫ f`.
    pub fn integral_of_f(&self) -> Complex64 {
        self.samples.iter().map(|&(_, c)| c).sum()
    }

    pub fn apply(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.apply_batch(std::slice::from_ref(t))?.remove(0))
    }

    /// Applies the transformer to several operands, forming each `e^{∓itA}` once.
    pub fn apply_batch(&self, ts: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        let n = self.pair.dim();
        for t in ts {
            if t.rows() != n || t.cols() != n {
                return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", t.rows(), t.cols())));
            }
        }
        let mut acc = vec![ComplexMatrix::zeros(n, n); ts.len()];
        for &(s, c) in &self.samples {
            let left = self.pair.left().apply_complex(|x| Complex64::from_polar(1.0, -s * x))?;
            let right = self.pair.right().apply_complex(|x| Complex64::from_polar(1.0, s * x))?;
            for (out, t) in acc.iter_mut().zip(ts) {
                let term = &(&left * t) * &right;
                *out = &*out + &term.scale(c);
            }
        }
        Ok(acc)
    }
}

pub fn doi_fourier(
    pair: &SpectralPair,
    f: impl Fn(f64) -> Complex64,
    t: &ComplexMatrix,
    quad: &QuadConfig,
) -> Result<ComplexMatrix> {
    FourierDoi::new(pair, f, quad)?.apply(t)
}
