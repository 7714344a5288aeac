use num_complex::Complex64;
use serde::Serialize;

use super::{xi_counting, AtomicMeasure};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix};
use crate::quadrature::QuadConfig;

/// `f(x) = i Σ w_m (e^{-i s_m x} - 1)/s_m`, `f′(x) = Σ w_m e^{-i s_m x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleFunction {
    measure: AtomicMeasure,
}

impl AdmissibleFunction {
    pub fn f(&self, x: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.measure.atoms.iter().map(|&(s, w)| i * (Complex64::from_polar(1.0, -s * x) - 1.0) * (w / s)).sum()
    }

    pub fn f_prime(&self, x: f64) -> Complex64 {
        self.measure.atoms.iter().map(|&(s, w)| Complex64::from_polar(w, -s * x)).sum()
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }
}

pub fn admissible_f(mu: &AtomicMeasure) -> Result<AdmissibleFunction> {
    mu.validate()?;
    Ok(AdmissibleFunction { measure: mu.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceFormulaCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
}

/// `tr(f(A) - f(B))` by functional calculus against `∫ f′ ξ`, the latter integrated exactly
/// over the constancy intervals of `ξ` through the antiderivative `f`.
pub fn trace_formula_check(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    f: impl Fn(f64) -> Complex64,
) -> Result<TraceFormulaCheck> {
    let (ea, eb) = (eig_hermitian(a)?, eig_hermitian(b)?);
    let lhs = ea.apply_complex(&f)?.trace() - eb.apply_complex(&f)?.trace();
    let xi = xi_counting(a, b)?;
    let mut bad = None;
    let rhs = xi.integrate_derivative(|x| {
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            bad.get_or_insert((x, v));
        }
        v
    });
    if let Some((at, v)) = bad {
        return Err(Error::Evaluation { at, value: v.to_string() });
    }
    Ok(TraceFormulaCheck { lhs, rhs, gap: (lhs - rhs).norm() })
}

/// `|tr((A-z)^{-1} - (B-z)^{-1}) + ∫ ξ(λ)/(λ-z)² dλ|`.
pub fn resolvent_identity_check(a: &HermitianMatrix, b: &HermitianMatrix, z: Complex64) -> Result<f64> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::Domain(format!("z must have non-zero imaginary part, got {z}")));
    }
    let (ea, eb) = (eig_hermitian(a)?, eig_hermitian(b)?);
    let r = |l: &[f64]| l.iter().map(|&x| 1.0 / (x - z)).sum::<Complex64>();
    let lhs = r(ea.eigenvalues()) - r(eb.eigenvalues());
    // -∫_l^r dλ/(λ-z)² = 1/(r-z) - 1/(l-z)
    let rhs = xi_counting(a, b)?.integrate_derivative(|x| 1.0 / (x - z));
    Ok((lhs - rhs).norm())
}

/// Quadrature value of `(1/2i) ∫ (e^{ist} - 1)/s · e^{-|s|} ds`.
pub fn arctan_rep_value(t: f64, quad: &QuadConfig) -> Result<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, w) in quad.points()? {
        let g = if s == 0.0 {
            Complex64::new(0.0, t)
        } else {
            (Complex64::from_polar(1.0, s * t) - 1.0) / s
        };
        acc += g * (w * (-s.abs()).exp());
    }
    Ok((acc / Complex64::new(0.0, 2.0)).re)
}

pub fn arctan_rep_check(t: f64, quad: &QuadConfig) -> Result<f64> {
    Ok((arctan_rep_value(t, quad)? - t.atan()).abs())
}
