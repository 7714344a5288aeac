use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values `φ(λ_i, μ_j)` of a two-variable symbol on the product of two node sets.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolGrid {
    left_nodes: Vec<f64>,
    right_nodes: Vec<f64>,
    /// row-major, `values[i * right.len() + j]`
    values: Vec<Complex64>,
}

impl SymbolGrid {
    pub fn new(left_nodes: Vec<f64>, right_nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if left_nodes.is_empty() || right_nodes.is_empty() {
            return Err(Error::Domain("symbol grid needs at least one node on each side".into()));
        }
        if values.len() != left_nodes.len() * right_nodes.len() {
            return Err(Error::dims(left_nodes.len() * right_nodes.len(), values.len()));
        }
        if let Some(k) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            let (i, j) = (k / right_nodes.len(), k % right_nodes.len());
            return Err(Error::Domain(format!(
                "non-finite symbol value at (λ={}, μ={})",
                left_nodes[i], right_nodes[j]
            )));
        }
        Ok(Self { left_nodes, right_nodes, values })
    }

    /// Samples a closed-form symbol on the grid.
    pub fn from_fn(left: &[f64], right: &[f64], f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let values = left.iter().flat_map(|&l| right.iter().map(move |&r| (l, r))).map(|(l, r)| f(l, r)).collect();
        Self::new(left.to_vec(), right.to_vec(), values)
    }

    pub fn constant(left: &[f64], right: &[f64], c: Complex64) -> Result<Self> {
        Self::from_fn(left, right, |_, _| c)
    }

    /// `χ_{E×F}` for spectral sets given as predicates.
    pub fn indicator(left: &[f64], right: &[f64], e: impl Fn(f64) -> bool, f: impl Fn(f64) -> bool) -> Result<Self> {
        Self::from_fn(left, right, |l, r| Complex64::new(if e(l) && f(r) { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn left_nodes(&self) -> &[f64] {
        &self.left_nodes
    }

    pub fn right_nodes(&self) -> &[f64] {
        &self.right_nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.left_nodes.len(), self.right_nodes.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.right_nodes.len() + j]
    }

    /// `sup |φ|` over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            left_nodes: self.left_nodes.clone(),
            right_nodes: self.right_nodes.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Pointwise product; both grids must share shape.
    pub fn times(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims(format!("{:?}", self.shape()), format!("{:?}", other.shape())));
        }
        Ok(Self {
            left_nodes: self.left_nodes.clone(),
            right_nodes: self.right_nodes.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// CSV with a header row of right nodes and a first column of left nodes.
    /// Real values print as plain numbers, complex ones as `a+bi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda\\mu");
        for r in &self.right_nodes {
            let _ = write!(out, ",{r}");
        }
        out.push('\n');
        for (i, l) in self.left_nodes.iter().enumerate() {
            let _ = write!(out, "{l}");
            for j in 0..self.right_nodes.len() {
                let z = self.get(i, j);
                if z.im == 0.0 {
                    let _ = write!(out, ",{}", z.re);
                } else {
                    let _ = write!(out, ",{z}");
                }
            }
            out.push('\n');
        }
        out
    }
}
