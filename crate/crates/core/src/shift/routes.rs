use std::f64::consts::PI;

use num_complex::Complex64;

use super::SampledCurve;
use crate::error::{Error, Result};
use crate::linalg::{apply_function, eig_hermitian, EigenSystem, HermitianMatrix};
use crate::quadrature::QuadConfig;

pub const DEFAULT_EPSILON: f64 = 1e-2;
pub const DEFAULT_ETA: f64 = 1e-6;

/// Eigendecompositions of `A` and `B`, shared by the sampled routes.
#[derive(Clone, Debug)]
pub struct ShiftPair {
    a: EigenSystem,
    b: EigenSystem,
}

impl ShiftPair {
    pub fn new(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::dims(a.dim(), b.dim()));
        }
        Ok(Self { a: eig_hermitian(a)?, b: eig_hermitian(b)? })
    }

    pub fn a(&self) -> &EigenSystem {
        &self.a
    }

    pub fn b(&self) -> &EigenSystem {
        &self.b
    }

    /// Eigenvalues of both operators.
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        self.a.eigenvalues().iter().chain(self.b.eigenvalues()).copied().collect()
    }

    /// `(1/π) tr[arctan((A - x)/y) - arctan((B - x)/y)]`.
    pub fn h(&self, x: f64, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("need finite x and y > 0, got ({x}, {y})")));
        }
        let fa = apply_function(&self.a, |t| ((t - x) / y).atan())?;
        let fb = apply_function(&self.b, |t| ((t - x) / y).atan())?;
        Ok((fa.trace_re() - fb.trace_re()) / PI)
    }

    pub fn arctan_curve(&self, epsilon: f64, grid: &[f64]) -> Result<SampledCurve> {
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        let ys = grid.iter().map(|&s| self.h(s, epsilon)).collect::<Result<Vec<_>>>()?;
        SampledCurve::new(grid.to_vec(), ys)
    }

    /// `tr(e^{-ixA} - e^{-ixB}) / x`, continued by `i tr(B - A)` at 0.
    pub fn fourier_integrand(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            let d: f64 = self.b.eigenvalues().iter().sum::<f64>() - self.a.eigenvalues().iter().sum::<f64>();
            return Complex64::new(0.0, d);
        }
        let e = |l: &[f64]| l.iter().map(|&v| Complex64::from_polar(1.0, -x * v)).sum::<Complex64>();
        (e(self.a.eigenvalues()) - e(self.b.eigenvalues())) / x
    }

    pub fn fourier_curve(&self, epsilon: f64, grid: &[f64], quad: &QuadConfig) -> Result<SampledCurve> {
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if quad.has_node_at_zero()? {
            return Err(Error::Quadrature("fourier route needs a quadrature without a node at 0".into()));
        }
        let weighted: Vec<(f64, Complex64)> = quad
            .points()?
            .into_iter()
            .map(|(x, w)| (x, self.fourier_integrand(x) * (w * (-epsilon * x.abs()).exp())))
            .collect();
        // ξ_ε(s) = -(1/2πi) ∫ e^{isx - ε|x|} g(x) dx
        let prefactor = -1.0 / Complex64::new(0.0, 2.0 * PI);
        let ys = grid
            .iter()
            .map(|&s| {
                let acc: Complex64 = weighted.iter().map(|&(x, c)| c * Complex64::from_polar(1.0, s * x)).sum();
                (prefactor * acc).re
            })
            .collect();
        SampledCurve::new(grid.to_vec(), ys)
    }
}

pub fn xi_arctan(a: &HermitianMatrix, b: &HermitianMatrix, epsilon: f64, grid: &[f64]) -> Result<SampledCurve> {
    ShiftPair::new(a, b)?.arctan_curve(epsilon, grid)
}

/// Two-term Richardson value `2 ξ_{ε/2} - ξ_ε`.
pub fn xi_arctan_extrapolated(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    epsilon: f64,
    grid: &[f64],
) -> Result<SampledCurve> {
    let pair = ShiftPair::new(a, b)?;
    let coarse = pair.arctan_curve(epsilon, grid)?;
    let fine = pair.arctan_curve(epsilon / 2.0, grid)?;
    let ys = fine.ordinates.iter().zip(&coarse.ordinates).map(|(f, c)| 2.0 * f - c).collect();
    SampledCurve::new(grid.to_vec(), ys)
}

pub fn xi_fourier(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    epsilon: f64,
    grid: &[f64],
    quad: &QuadConfig,
) -> Result<SampledCurve> {
    ShiftPair::new(a, b)?.fourier_curve(epsilon, grid, quad)
}

pub fn fourier_integrand(a: &HermitianMatrix, b: &HermitianMatrix, x: f64) -> Result<Complex64> {
    Ok(ShiftPair::new(a, b)?.fourier_integrand(x))
}

/// Gauss–Legendre rule on `[-L, L]` with `L = 20/ε` (so `e^{-εL} ≈ 2e-9`) and panels short
/// enough for oscillations of frequency up to `spread`.
pub fn fourier_quad(epsilon: f64, spread: f64) -> QuadConfig {
    let half = 20.0 / epsilon;
    let panel = 2.0 / spread.max(1.0);
    let panels = ((2.0 * half / panel).ceil() as usize).max(2);
    QuadConfig::gauss(-half, half, panels * crate::quadrature::GAUSS_ORDER)
}

pub fn harmonic_h(a: &HermitianMatrix, b: &HermitianMatrix, x: f64, y: f64) -> Result<f64> {
    ShiftPair::new(a, b)?.h(x, y)
}

/// `(1/π) Arg(1 + α F(x + iη))` with `F(z) = Σ |⟨v_i, w⟩|² / (μ_i - z)` and `Arg ∈ [0, 2π)`.
pub fn xi_rank_one(b: &HermitianMatrix, w: &[Complex64], alpha: f64, grid: &[f64], eta: f64) -> Result<SampledCurve> {
    if w.len() != b.dim() {
        return Err(Error::dims(b.dim(), w.len()));
    }
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("w must be a unit vector, has norm {norm}")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let eb = eig_hermitian(b)?;
    let u = eb.unitary();
    let n = b.dim();
    let weights: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|k| u[(k, i)].conj() * w[k]).sum::<Complex64>().norm_sqr())
        .collect();
    let ys = grid
        .iter()
        .map(|&x| {
            let z = Complex64::new(x, eta);
            let f: Complex64 = eb.eigenvalues().iter().zip(&weights).map(|(&mu, &c)| c / (mu - z)).sum();
            let mut arg = (Complex64::new(1.0, 0.0) + f * alpha).arg();
            if arg < 0.0 {
                arg += 2.0 * PI;
            }
            arg / PI
        })
        .collect();
    SampledCurve::new(grid.to_vec(), ys)
}
