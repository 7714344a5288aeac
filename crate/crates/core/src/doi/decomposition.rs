use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SpectralPair, SymbolGrid};
use crate::error::{Error, Result};

/// One atom `w · α(λ) β(μ)` of a separated representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub weight: f64,
}

/// Finite atomic representation `φ(λ, μ) = Σ_t w_t α_t(λ) β_t(μ)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    pub fn new(terms: Vec<DecompositionTerm>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if !t.weight.is_finite() || t.weight < 0.0 {
                return Err(Error::Domain(format!("term {k}: weight must be finite and non-negative, got {}", t.weight)));
            }
            let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite(&t.alpha) || !finite(&t.beta) {
                return Err(Error::Domain(format!("term {k}: non-finite factor")));
            }
        }
        Ok(Self { terms })
    }

    pub fn push(&mut self, alpha: Vec<Complex64>, beta: Vec<Complex64>, weight: f64) {
        self.terms.push(DecompositionTerm { alpha, beta, weight });
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Checks every factor against the grid sizes `(left, right)`.
    pub fn check_sizes(&self, left: usize, right: usize) -> Result<()> {
        for (k, t) in self.terms.iter().enumerate() {
            if t.alpha.len() != left || t.beta.len() != right {
                return Err(Error::dims(
                    format!("term {k} sized ({left}, {right})"),
                    format!("({}, {})", t.alpha.len(), t.beta.len()),
                ));
            }
        }
        Ok(())
    }

    /// Gridwise values `ψ(j, k) = Σ_t w_t α_t(j) β_t(k)`, row-major.
    pub fn grid_values(&self, left: usize, right: usize) -> Result<Vec<Complex64>> {
        self.check_sizes(left, right)?;
        let mut out = vec![Complex64::new(0.0, 0.0); left * right];
        for t in &self.terms {
            if t.weight == 0.0 {
                continue;
            }
            for (j, a) in t.alpha.iter().enumerate() {
                let wa = a * t.weight;
                for (k, b) in t.beta.iter().enumerate() {
                    out[j * right + k] += wa * b;
                }
            }
        }
        Ok(out)
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ_t w_t ‖α_t‖_∞ ‖β_t‖_∞`.
pub fn peller_bound(d: &Decomposition) -> f64 {
    d.terms.iter().map(|t| t.weight * sup(&t.alpha) * sup(&t.beta)).sum()
}

pub fn symbol_from_decomposition(pair: &SpectralPair, d: &Decomposition) -> Result<SymbolGrid> {
    let (l, r) = (pair.left().eigenvalues(), pair.right().eigenvalues());
    let values = d.grid_values(l.len(), r.len())?;
    SymbolGrid::new(l.to_vec(), r.to_vec(), values)
}
