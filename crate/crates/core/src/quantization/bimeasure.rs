//! The sequence bimeasure `m(E × F) = (Σ_{j∈E} φ(j)(-1)^j)(Σ_{k∈F} φ(k)(-1)^k)` on
//! `{1..n} × {1..n}` and norms of separated representations.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::doi::{peller_bound, Decomposition, ExperimentReport, Histogram};
use crate::error::{Error, Result};
use crate::rng::{complex_normal, substream};

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceBimeasure {
    phi: Vec<Complex64>,
}

impl SequenceBimeasure {
    pub fn new(phi: Vec<Complex64>) -> Result<Self> {
        if phi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("phi entries must be finite".into()));
        }
        Ok(Self { phi })
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    /// `φ(j)(-1)^j` for `j = 1..n`, stored at `j - 1`.
    fn signed(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.phi.iter().enumerate().map(|(i, &z)| if (i + 1) % 2 == 0 { z } else { -z })
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.phi.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.phi.iter().map(|z| z.norm()).sum()
    }

    /// `Σ_j v(j) φ(j)(-1)^j`.
    fn pair(&self, v: &[Complex64]) -> Complex64 {
        v.iter().zip(self.signed()).map(|(a, s)| a * s).sum()
    }

    fn set_sum(&self, set: &[usize]) -> Result<Complex64> {
        let unique: BTreeSet<usize> = set.iter().copied().collect();
        let signed: Vec<Complex64> = self.signed().collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in unique {
            if j == 0 || j > self.n() {
                return Err(Error::IndexOutOfRange { index: j, len: self.n() });
            }
            acc += signed[j - 1];
        }
        Ok(acc)
    }

    /// `m(f ⊗ g)`.
    pub fn eval_functions(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        if f.len() != self.n() || g.len() != self.n() {
            return Err(Error::dims(self.n(), if f.len() != self.n() { f.len() } else { g.len() }));
        }
        Ok(self.pair(f) * self.pair(g))
    }
}

/// `m(E × F)` with 1-based index sets.
pub fn bimeasure_eval(b: &SequenceBimeasure, e: &[usize], f: &[usize]) -> Result<Complex64> {
    Ok(b.set_sum(e)? * b.set_sum(f)?)
}

/// `Σ_t w_t m(α_t ⊗ β_t)`.
pub fn bimeasure_integrate(b: &SequenceBimeasure, d: &Decomposition) -> Result<Complex64> {
    d.check_sizes(b.n(), b.n())?;
    Ok(d.terms.iter().map(|t| b.pair(&t.alpha) * b.pair(&t.beta) * t.weight).sum())
}

/// `‖(Σ_t |α_t|²)^{1/2}‖_∞ · ‖(Σ_t |β_t|²)^{1/2}‖_∞` after each term is rescaled to
/// `√w_t · (α_t, β_t)` with `‖α_t‖_∞ = ‖β_t‖_∞`.
///
/// The balancing makes the value depend only on the products `w_t α_t ⊗ β_t`; without it a
/// rescaling `α_t ↦ cα_t`, `β_t ↦ β_t/c` changes the square functions arbitrarily.
pub fn grothendieck_norm(d: &Decomposition) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::Domain("grothendieck_norm needs a non-empty decomposition".into()));
    }
    let sup = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut left: Vec<f64> = Vec::new();
    let mut right: Vec<f64> = Vec::new();
    for t in &d.terms {
        let (a, b) = (sup(&t.alpha), sup(&t.beta));
        if a == 0.0 || b == 0.0 || t.weight == 0.0 {
            continue;
        }
        let (sa, sb) = (t.weight * b / a, t.weight * a / b);
        accumulate(&mut left, &t.alpha, sa);
        accumulate(&mut right, &t.beta, sb);
    }
    let max_sqrt = |v: &[f64]| v.iter().copied().fold(0.0, f64::max).sqrt();
    Ok(max_sqrt(&left) * max_sqrt(&right))
}

fn accumulate(acc: &mut Vec<f64>, v: &[Complex64], scale_sqr: f64) {
    if acc.len() < v.len() {
        acc.resize(v.len(), 0.0);
    }
    for (a, z) in acc.iter_mut().zip(v) {
        *a += scale_sqr * z.norm_sqr();
    }
}

/// Max over seeded random decompositions of `Σ_t w_t‖α_t‖_∞‖β_t‖_∞ / grothendieck_norm`.
pub fn grothendieck_ratio_experiment(n: usize, terms: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if n == 0 || terms == 0 || trials == 0 {
        return Err(Error::Domain("n, terms and trials must be positive".into()));
    }
    let mut per_trial = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = substream(seed, "grothendieck", trial as u64);
        let d = random_decomposition(&mut rng, n, terms);
        per_trial.push(peller_bound(&d) / grothendieck_norm(&d)?);
    }
    let params = BTreeMap::from([("n".to_string(), n as f64), ("terms".to_string(), terms as f64)]);
    Ok(ExperimentReport {
        op: "grothendieck_ratio".into(),
        params,
        seed,
        trials,
        max_ratio: Some(per_trial.iter().copied().fold(0.0, f64::max)),
        norm: None,
        label: Some("observed ratio".into()),
        skipped: 0,
        histogram: Some(Histogram::new(&per_trial, 10)),
        per_trial,
    })
}

/// Random decomposition with gaussian factors and positive weights.
pub fn random_decomposition(rng: &mut impl Rng, n: usize, terms: usize) -> Decomposition {
    let mut d = Decomposition::default();
    for _ in 0..terms {
        let alpha = (0..n).map(|_| complex_normal(rng)).collect();
        let beta = (0..n).map(|_| complex_normal(rng)).collect();
        d.push(alpha, beta, rng.random_range(0.1..2.0));
    }
    d
}

/// Lower estimate of `sup{|m(f ⊗ g)| : ‖f‖_∞, ‖g‖_∞ <= 1}` by alternating phase alignment.
///
/// Each half-step replaces `f` (then `g`) by the unimodular vector maximizing `|m(f ⊗ g)|` with
/// the other held fixed. For this rank-one bimeasure one step reaches `‖φ‖₁²`.
pub fn semivariation_estimate(b: &SequenceBimeasure, sweeps: usize) -> f64 {
    let signed: Vec<Complex64> = b.signed().collect();
    let align = |w: &[Complex64]| -> Vec<Complex64> {
        w.iter().map(|z| if z.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { z.conj() / z.norm() }).collect()
    };
    let mut g = vec![Complex64::new(1.0, 0.0); b.n()];
    let mut best: f64 = 0.0;
    for _ in 0..sweeps.max(1) {
        // m(f ⊗ g) = (Σ f s)(Σ g s): the f-step only depends on s
        let f = align(&signed);
        g = align(&signed.iter().map(|s| s * b.pair(&f)).collect::<Vec<_>>());
        best = best.max(b.pair(&f).norm() * b.pair(&g).norm());
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub l2_norm_sqr: f64,
    /// `Σ_{j,k} max(Re m({j}×{k}), 0)`: value forced on the union of positive cells.
    pub positive_union: f64,
    /// `Σ_{j,k} |m({j}×{k})| = ‖φ‖₁²`, reached with adversarial unimodular signs.
    pub signed_total: f64,
}

/// For `φ(j) = 1/j` truncated at each `n`, the values an additive extension would have to
/// take on unions of disjoint cells.
pub fn unboundedness_growth(sizes: &[usize]) -> Result<Vec<GrowthPoint>> {
    sizes
        .iter()
        .map(|&n| {
            let b = SequenceBimeasure::new((1..=n).map(|j| Complex64::new(1.0 / j as f64, 0.0)).collect())?;
            let s: Vec<Complex64> = b.signed().collect();
            let mut positive = 0.0;
            for a in &s {
                for c in &s {
                    positive += (a * c).re.max(0.0);
                }
            }
            Ok(GrowthPoint { n, l2_norm_sqr: b.l2_norm_sqr(), positive_union: positive, signed_total: b.l1_norm().powi(2) })
        })
        .collect()
}
