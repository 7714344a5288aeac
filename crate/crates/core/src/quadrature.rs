//! Composite quadrature rules on a finite interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points per Gauss–Legendre panel.
pub const GAUSS_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    /// `nodes` equispaced points including both endpoints.
    Trapezoid,
    /// `nodes` cells, one node at each cell centre.
    Midpoint,
    /// `nodes / 8` panels of 8-point Gauss–Legendre; the panel count is rounded up to an
    /// even number so a symmetric interval has a panel boundary at 0.
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
    pub rule: QuadRule,
}

impl QuadConfig {
    pub fn new(lo: f64, hi: f64, nodes: usize, rule: QuadRule) -> Self {
        Self { lo, hi, nodes, rule }
    }

    pub fn trapezoid(lo: f64, hi: f64, nodes: usize) -> Self {
        Self::new(lo, hi, nodes, QuadRule::Trapezoid)
    }

    pub fn midpoint(lo: f64, hi: f64, nodes: usize) -> Self {
        Self::new(lo, hi, nodes, QuadRule::Midpoint)
    }

    pub fn gauss(lo: f64, hi: f64, nodes: usize) -> Self {
        Self::new(lo, hi, nodes, QuadRule::GaussLegendre)
    }

    pub fn with_nodes(self, nodes: usize) -> Self {
        Self { nodes, ..self }
    }

    /// `(node, weight)` pairs.
    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.hi <= self.lo {
            return Err(Error::Quadrature(format!("invalid interval [{}, {}]", self.lo, self.hi)));
        }
        let (lo, hi) = (self.lo, self.hi);
        match self.rule {
            QuadRule::Trapezoid => {
                if self.nodes < 2 {
                    return Err(Error::Quadrature("trapezoid needs at least 2 nodes".into()));
                }
                let m = self.nodes - 1;
                let h = (hi - lo) / m as f64;
                Ok((0..=m)
                    .map(|k| {
                        let w = if k == 0 || k == m { 0.5 * h } else { h };
                        (node_at(lo, hi, k, m), w)
                    })
                    .collect())
            }
            QuadRule::Midpoint => {
                if self.nodes == 0 {
                    return Err(Error::Quadrature("empty quadrature".into()));
                }
                let m = self.nodes;
                let h = (hi - lo) / m as f64;
                Ok((0..m).map(|k| (0.5 * (node_at(lo, hi, k, m) + node_at(lo, hi, k + 1, m)), h)).collect())
            }
            QuadRule::GaussLegendre => {
                if self.nodes == 0 {
                    return Err(Error::Quadrature("empty quadrature".into()));
                }
                let mut panels = self.nodes.div_ceil(GAUSS_ORDER);
                if panels % 2 == 1 {
                    panels += 1;
                }
                let (x, w) = gauss_legendre(GAUSS_ORDER);
                let mut out = Vec::with_capacity(panels * GAUSS_ORDER);
                for k in 0..panels {
                    let a = node_at(lo, hi, k, panels);
                    let b = node_at(lo, hi, k + 1, panels);
                    let half = 0.5 * (b - a);
                    let mid = 0.5 * (a + b);
                    for (xi, wi) in x.iter().zip(&w) {
                        out.push((mid + half * xi, half * wi));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn has_node_at_zero(&self) -> Result<bool> {
        Ok(self.points()?.iter().any(|&(x, _)| x == 0.0))
    }
}

/// Breakpoint `k` of `m` uniform cells; symmetric intervals give exactly mirrored nodes.
fn node_at(lo: f64, hi: f64, k: usize, m: usize) -> f64 {
    if 2 * k == m {
        return 0.5 * (lo + hi);
    }
    if 2 * k < m {
        lo + (hi - lo) * (k as f64 / m as f64)
    } else {
        hi - (hi - lo) * ((m - k) as f64 / m as f64)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
