//! Operator-Lipschitz ratio experiment and the JSON report shared by experiment harnesses.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{apply_function, eig_hermitian, schatten_norm, HermitianMatrix, SchattenP};
use crate::rng::{random_hermitian, substream, uniform};

/// `{op, params, seed, trials, max_ratio | norm, per_trial}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub op: String,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub skipped: usize,
    pub per_trial: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Equal-width bins over `[0, max]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let bins = bins.max(1);
        let width = if max > 0.0 { max / bins as f64 } else { 1.0 };
        let edges = (0..=bins).map(|k| k as f64 * width).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let k = ((v / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzConfig {
    pub lip_const: f64,
    pub p: f64,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
}

/// Ratio `‖f(A) - f(B)‖_p / ‖A - B‖_p`, or `None` when `A = B`.
pub fn lipschitz_ratio(f: &impl Fn(f64) -> f64, a: &HermitianMatrix, b: &HermitianMatrix, p: f64) -> Result<Option<f64>> {
    let diff = (a - b).into_matrix();
    let denom = schatten_norm(&diff, p)?;
    if denom == 0.0 {
        return Ok(None);
    }
    let fa = apply_function(&eig_hermitian(a)?, f)?;
    let fb = apply_function(&eig_hermitian(b)?, f)?;
    Ok(Some(schatten_norm((&fa - &fb).as_matrix(), p)? / denom))
}

/// Max of the ratio over seeded random hermitian pairs `B`, `A = B + s·H` with the scale `s`
/// spread over `[1e-3, 3]` so both local and global behaviour is probed.
pub fn lipschitz_ratio_experiment(f: impl Fn(f64) -> f64, cfg: &LipschitzConfig) -> Result<ExperimentReport> {
    if !(cfg.p > 1.0 && cfg.p.is_finite()) {
        return Err(Error::Domain(format!("p must lie in (1, ∞), got {}", cfg.p)));
    }
    SchattenP::new(cfg.p)?;
    if cfg.trials == 0 || cfg.dim == 0 {
        return Err(Error::Domain("trials and dim must be at least 1".into()));
    }
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut skipped = 0;
    for trial in 0..cfg.trials {
        let mut rng = substream(cfg.seed, "lipschitz", trial as u64);
        let b = random_hermitian(&mut rng, cfg.dim);
        let s = 10f64.powf(uniform(&mut rng, -3.0, 0.5));
        let a = &b + &random_hermitian(&mut rng, cfg.dim).scaled(s);
        match lipschitz_ratio(&f, &a, &b, cfg.p)? {
            Some(r) => per_trial.push(r),
            None => skipped += 1,
        }
    }
    let max_ratio = per_trial.iter().copied().fold(0.0, f64::max);
    let params = BTreeMap::from([
        ("lip_const".to_string(), cfg.lip_const),
        ("p".to_string(), cfg.p),
        ("dim".to_string(), cfg.dim as f64),
    ]);
    Ok(ExperimentReport {
        op: "lipschitz_ratio".into(),
        params,
        seed: cfg.seed,
        trials: cfg.trials,
        max_ratio: Some(max_ratio),
        norm: None,
        label: Some("observed max ratio".into()),
        skipped,
        histogram: Some(Histogram::new(&per_trial, 10)),
        per_trial,
    })
}
