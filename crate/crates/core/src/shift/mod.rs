//! Krein's spectral shift function for pairs of hermitian matrices.
//!
//! For matrices `ξ(λ) = N_B(λ) - N_A(λ)` with `N_X(λ) = #{eigenvalues of X <= λ}`, which turns
//! `tr(f(A) - f(B)) = ∫ f′ ξ` into an identity. The other routes (regularized arctan,
//! Fourier, rank-one Cauchy transform) approximate the same function and are compared
//! against it.

mod checks;
mod routes;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix};

pub use checks::{
    admissible_f, arctan_rep_check, arctan_rep_value, resolvent_identity_check, trace_formula_check,
    AdmissibleFunction, TraceFormulaCheck,
};
pub use routes::{
    fourier_integrand, fourier_quad, harmonic_h, xi_arctan, xi_arctan_extrapolated, xi_fourier, xi_rank_one,
    ShiftPair, DEFAULT_EPSILON, DEFAULT_ETA,
};

/// Piecewise-constant integer function, zero outside `[first, last)` breakpoint.
///
/// Kept canonical: breakpoints strictly ascending, adjacent values distinct, first and last
/// value non-zero. The zero function has no breakpoints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftFunction {
    breakpoints: Vec<f64>,
    values: Vec<i64>,
}

impl ShiftFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<i64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::default());
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::dims(
                format!("{} values", breakpoints.len().saturating_sub(1)),
                values.len(),
            ));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly ascending".into()));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    fn canonical(breakpoints: Vec<f64>, values: Vec<i64>) -> Self {
        let mut bp: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<i64> = Vec::with_capacity(values.len());
        // value in force to the left of each breakpoint starts at 0
        let mut prev = 0i64;
        for (k, &x) in breakpoints.iter().enumerate() {
            let next = values.get(k).copied().unwrap_or(0);
            if next != prev {
                bp.push(x);
                vals.push(next);
                prev = next;
            }
        }
        // vals now holds the value to the right of each kept breakpoint; the last one is 0
        if let Some(last) = vals.pop() {
            debug_assert_eq!(last, 0);
        }
        Self { breakpoints: bp, values: vals }
    }

    /// Step function with jumps `+1` at each `up` point and `-1` at each `down` point.
    pub fn from_jumps(up: &[f64], down: &[f64]) -> Result<Self> {
        let mut events: Vec<(f64, i64)> = up.iter().map(|&x| (x, 1)).chain(down.iter().map(|&x| (x, -1))).collect();
        if events.iter().any(|e| !e.0.is_finite()) {
            return Err(Error::Domain("jump points must be finite".into()));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut bp = Vec::new();
        let mut vals = Vec::new();
        let mut level = 0i64;
        let mut k = 0;
        while k < events.len() {
            let x = events[k].0;
            while k < events.len() && events[k].0 == x {
                level += events[k].1;
                k += 1;
            }
            bp.push(x);
            vals.push(level);
        }
        vals.pop();
        Ok(Self::canonical(bp, vals))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `(left, right, value)` for each constancy interval inside the support.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, i64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (self.breakpoints[k], self.breakpoints[k + 1], v))
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn evaluate(&self, x: f64) -> i64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 || k == self.breakpoints.len() {
            0
        } else {
            self.values[k - 1]
        }
    }

    pub fn sample(&self, grid: &[f64]) -> SampledCurve {
        SampledCurve { abscissae: grid.to_vec(), ordinates: grid.iter().map(|&x| self.evaluate(x) as f64).collect() }
    }

    /// `∫ ξ`.
    pub fn integral(&self) -> f64 {
        self.intervals().map(|(l, r, v)| v as f64 * (r - l)).sum()
    }

    /// `∫ |ξ|`.
    pub fn l1_norm(&self) -> f64 {
        self.intervals().map(|(l, r, v)| v.unsigned_abs() as f64 * (r - l)).sum()
    }

    pub fn min_value(&self) -> i64 {
        self.values.iter().copied().min().map_or(0, |m| m.min(0))
    }

    /// `ξ - other`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut points: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let values = points.windows(2).map(|w| self.evaluate(w[0]) - other.evaluate(w[0])).collect();
        Self::canonical(points, values)
    }

    /// Exact `∫ F′ ξ` given the antiderivative `F`.
    pub fn integrate_derivative<T>(&self, mut antiderivative: impl FnMut(f64) -> T) -> T
    where
        T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        self.intervals().map(|(l, r, v)| (antiderivative(r) - antiderivative(l)) * v as f64).sum()
    }

    /// CSV with columns `lambda,xi`: one row per breakpoint holding the value to its right.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,xi\n");
        for (k, x) in self.breakpoints.iter().enumerate() {
            out.push_str(&format!("{x},{}\n", self.values.get(k).copied().unwrap_or(0)));
        }
        out
    }
}

/// `ξ = N_B - N_A`.
pub fn xi_counting(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ShiftFunction> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    let (ea, eb) = (eig_hermitian(a)?, eig_hermitian(b)?);
    ShiftFunction::from_jumps(eb.eigenvalues(), ea.eigenvalues())
}

/// Values of a function on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub abscissae: Vec<f64>,
    pub ordinates: Vec<f64>,
}

impl SampledCurve {
    pub fn new(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self> {
        if abscissae.len() != ordinates.len() {
            return Err(Error::dims(abscissae.len(), ordinates.len()));
        }
        if abscissae.iter().chain(&ordinates).any(|x| !x.is_finite()) {
            return Err(Error::Domain("curve entries must be finite".into()));
        }
        if abscissae.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("abscissae must be ascending".into()));
        }
        Ok(Self { abscissae, ordinates })
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.abscissae.iter().copied().zip(self.ordinates.iter().copied())
    }

    /// Max `|curve - ξ|` over grid points at distance `>= min_dist` from every `avoid` point;
    /// `None` when no grid point qualifies.
    pub fn max_error(&self, xi: &ShiftFunction, avoid: &[f64], min_dist: f64) -> Option<f64> {
        self.points()
            .filter(|&(x, _)| avoid.iter().all(|&e| (x - e).abs() >= min_dist))
            .map(|(x, y)| (y - xi.evaluate(x) as f64).abs())
            .reduce(f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,xi\n");
        for (x, y) in self.points() {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// `count` equispaced points from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max < min || count == 0 || (count == 1 && max != min) {
            return Err(Error::Parse(format!("invalid grid {min}:{max}:{count}")));
        }
        Ok(Self { min, max, count })
    }

    /// Parses `min:max:count`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid must be min:max:count, got {s:?}")));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid {s:?}: {e}")));
        let count = n.trim().parse::<usize>().map_err(|e| Error::Parse(format!("grid {s:?}: {e}")))?;
        Self::new(num(lo)?, num(hi)?, count)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let m = (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + (self.max - self.min) * (k as f64 / m)).collect()
    }
}

/// Finite positive measure `Σ w_m δ_{s_m}` with every `s_m != 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = Self { atoms };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for &(s, w) in &self.atoms {
            if !s.is_finite() || s == 0.0 {
                return Err(Error::Domain(format!("atom location must be finite and non-zero, got {s}")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Domain(format!("atom weight must be finite and positive, got {w}")));
            }
        }
        Ok(())
    }

    /// `μ(ℝ)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}
