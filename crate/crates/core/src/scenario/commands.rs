//! Single-command scenarios: one computation on file or seeded inputs, its artifacts, and the
//! checks that apply to it.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::suite::{arctan_bias_excess, fourier_spread, gapped_pair, shift_properties, Ctx};
use super::{Recorder, Route, ScenarioConfig};
use crate::doi::{
    divided_difference_symbol, hs_multiplier_norm, hs_norm_krylov, lipschitz_ratio_experiment, make_spectral_pair,
    peller_bound, sampled_lower_bound_random, symbol_from_decomposition, doi_apply, ExperimentReport, Histogram,
    LipschitzConfig,
};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, SchattenP};
use crate::quantization::{
    cotlar_stein_bound, qp_norm_upper_estimate, quantize, random_decomposition, random_terms, CycleSpace, IndexSymbol,
};
use crate::rng::{random_complex_matrix, random_hermitian, random_unit_trace_norm};
use crate::shift::{fourier_quad, xi_rank_one, GridSpec, ShiftPair, DEFAULT_EPSILON, DEFAULT_ETA};
use crate::sylvester::{kron_oracle, solve_gap};

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

fn first_dim(cfg: &ScenarioConfig) -> usize {
    cfg.dims[0]
}

/// `(A, B)` from the input files, or a seeded pair of the first configured dimension.
fn input_pair(cfg: &ScenarioConfig, tag: &str) -> Result<(HermitianMatrix, HermitianMatrix)> {
    match (&cfg.inputs.a, &cfg.inputs.b) {
        (Some(a), Some(b)) => {
            let (a, b) = (HermitianMatrix::read_json(a)?, HermitianMatrix::read_json(b)?);
            if a.dim() != b.dim() {
                return Err(Error::dims(a.dim(), b.dim()));
            }
            Ok((a, b))
        }
        (None, None) => {
            let mut rng = Ctx::new(cfg).rng(tag, 0);
            let n = first_dim(cfg);
            Ok((random_hermitian(&mut rng, n), random_hermitian(&mut rng, n)))
        }
        _ => Err(Error::Config { path: "inputs".into(), message: "a and b must be given together".into() }),
    }
}

fn grid_points(cfg: &ScenarioConfig, eigs: &[f64]) -> Result<Vec<f64>> {
    if let Some(spec) = cfg.grid_spec()? {
        return Ok(spec.points());
    }
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let count = (((hi - lo) / 0.01).ceil() as usize + 1).min(4001);
    Ok(GridSpec::new(lo, hi, count)?.points())
}

/// `A - B = α w w*` with `α > 0`, or a domain error.
fn rank_one_part(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(f64, Vec<Complex64>)> {
    let e = eig_hermitian(&(a - b))?;
    let cutoff = 1e-10 * (1.0 + e.spectral_radius());
    let nonzero: Vec<usize> = (0..e.dim()).filter(|&i| e.eigenvalues()[i].abs() > cutoff).collect();
    match nonzero.as_slice() {
        [i] if e.eigenvalues()[*i] > 0.0 => Ok((e.eigenvalues()[*i], e.eigenvector(*i))),
        _ => Err(Error::Domain("rank1 route needs A - B = αww* with α > 0".into())),
    }
}

pub(super) fn shift(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let route = cfg.route.unwrap_or(Route::Counting);
    let (a, b) = match (route, &cfg.inputs.a, &cfg.inputs.b) {
        (Route::RankOne, None, None) => {
            let mut rng = Ctx::new(cfg).rng("shift.input", 0);
            let n = first_dim(cfg);
            let b = random_hermitian(&mut rng, n);
            let w = crate::rng::random_unit_vector(&mut rng, n);
            (b.rank_one_update(crate::rng::uniform(&mut rng, 0.2, 2.0), &w), b)
        }
        _ => input_pair(cfg, "shift.input")?,
    };
    let tol = cfg.tolerances;
    let (xi, p) = shift_properties(&a, &b)?;
    rec.le("shift.property_a.integral", p.integral, 0.0, tol.algebraic);
    rec.le("shift.property_b.l1_identity", p.l1_identity, 0.0, tol.algebraic);
    rec.le("shift.property_b.l1_bound", p.l1_bound, 0.0, tol.algebraic);
    if let Some(c) = p.negative {
        rec.none("shift.property_c.negative_values", c);
    }
    rec.none("shift.property_d.outside_hull", p.outside);

    let pair = ShiftPair::new(&a, &b)?;
    let eigs = pair.all_eigenvalues();
    let eps = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
    let grid = || grid_points(cfg, &eigs);
    let near = "max |curve - ξ| at grid points at least 0.1 from every eigenvalue";
    match route {
        Route::Counting => rec.artifact("xi.csv", xi.to_csv()),
        Route::Arctan | Route::ArctanExtrapolated | Route::Fourier => {
            let grid = grid()?;
            let arctan = pair.arctan_curve(eps, &grid)?;
            let curve = match route {
                Route::Arctan => arctan.clone(),
                Route::ArctanExtrapolated => crate::shift::xi_arctan_extrapolated(&a, &b, eps, &grid)?,
                _ => {
                    let quad = cfg.quad.unwrap_or_else(|| fourier_quad(eps, fourier_spread(&eigs, &grid)));
                    let f = pair.fourier_curve(eps, &grid, &quad)?;
                    let gap = f.ordinates.iter().zip(&arctan.ordinates).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                    rec.le("shift.route.fourier_vs_arctan", gap, 0.0, tol.quadrature);
                    f
                }
            };
            rec.le("shift.route.arctan_bias_bound", arctan_bias_excess(&arctan, &xi, &eigs, eps), 0.0, tol.algebraic);
            if let Some(e) = curve.max_error(&xi, &eigs, 0.1) {
                rec.observe("shift.route.max_error", e, near);
            }
            rec.artifact("xi.csv", curve.to_csv());
            rec.artifact("xi_counting.csv", xi.to_csv());
        }
        Route::RankOne => {
            let (alpha, w) = rank_one_part(&a, &b)?;
            let eta = cfg.eta.unwrap_or(DEFAULT_ETA);
            let grid = grid()?;
            let curve = xi_rank_one(&b, &w, alpha, &grid, eta)?;
            if let Some(e) = curve.max_error(&xi, &eigs, 0.05) {
                rec.le("shift.rank_one.vs_counting", e, 0.0, tol.boundary);
            }
            rec.artifact("xi.csv", curve.to_csv());
            rec.artifact("xi_counting.csv", xi.to_csv());
        }
    }
    Ok(())
}

pub(super) fn doi(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let (a, b) = input_pair(cfg, "doi.input")?;
    let pair = make_spectral_pair(&a, &b)?;
    let phi = divided_difference_symbol(&pair, f64::atan, |x| 1.0 / (1.0 + x * x))?;
    rec.artifact("symbol.csv", phi.to_csv());
    let mut rng = Ctx::new(cfg).rng("doi.krylov", 0);
    let n = pair.dim();
    let exact = hs_multiplier_norm(&pair, &phi)?;
    rec.le("doi.hs_norm_vs_krylov", (hs_norm_krylov(&pair, &phi, n * n, &mut rng)? - exact).abs(), 0.0, cfg.tolerances.estimate);
    rec.le("doi.hs_norm_le_lipschitz", exact, 1.0, cfg.tolerances.algebraic);

    let p = cfg.p.unwrap_or(2.0);
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Config { path: "p".into(), message: format!("doi experiment needs p in (1, ∞), got {p}") });
    }
    let lip = LipschitzConfig { lip_const: 1.0, p, trials: cfg.trials_or(100), dim: n, seed: cfg.seed };
    let report = lipschitz_ratio_experiment(f64::atan, &lip)?;
    let max = report.max_ratio.unwrap_or(0.0);
    if p == 2.0 {
        rec.le("doi.lipschitz.p2_ratio", max, 1.0, cfg.tolerances.algebraic);
    } else {
        rec.observe("doi.lipschitz.max_ratio", max, "sampled ratio for f = arctan, not a bound");
    }
    rec.artifact("experiment.json", json(&report));
    Ok(())
}

pub(super) fn peller(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = Ctx::new(cfg);
    let trials = cfg.trials_or(20);
    let mut per_trial = Vec::with_capacity(trials * cfg.dims.len());
    for (k, n) in ctx.cases(trials) {
        let mut rng = ctx.rng("peller", k);
        let (a, b) = (random_hermitian(&mut rng, n), random_hermitian(&mut rng, n));
        let pair = make_spectral_pair(&a, &b)?;
        let d = random_decomposition(&mut rng, n, 3);
        let phi = symbol_from_decomposition(&pair, &d)?;
        let samples: Vec<ComplexMatrix> = (0..500).map(|_| random_unit_trace_norm(&mut rng, n)).collect();
        let s = sampled_lower_bound_random(|t| doi_apply(&pair, &phi, t), SchattenP::ONE, &samples)?;
        per_trial.push(s.value / peller_bound(&d));
    }
    let max = per_trial.iter().copied().fold(0.0, f64::max);
    rec.le("peller.sampled_c1_over_bound", max, 1.0, cfg.tolerances.algebraic);
    let report = ExperimentReport {
        op: "peller_ratio".into(),
        params: BTreeMap::from([("samples".to_string(), 500.0), ("terms".to_string(), 3.0)]),
        seed: cfg.seed,
        trials: per_trial.len(),
        max_ratio: Some(max),
        norm: None,
        label: Some("sampled lower bound over peller_bound".into()),
        skipped: 0,
        histogram: Some(Histogram::new(&per_trial, 10)),
        per_trial,
    };
    rec.artifact("experiment.json", json(&report));
    Ok(())
}

pub(super) fn sylvester(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let (a, b, y) = match (&cfg.inputs.a, &cfg.inputs.b, &cfg.inputs.y) {
        (Some(_), Some(_), Some(y)) => {
            let (a, b) = input_pair(cfg, "sylvester.input")?;
            (a, b, ComplexMatrix::read_json(y)?)
        }
        (None, None, None) => {
            let mut rng = Ctx::new(cfg).rng("sylvester.input", 0);
            let n = first_dim(cfg);
            let (a, b) = gapped_pair(&mut rng, n, 0, 0.02)?;
            (a, b, random_complex_matrix(&mut rng, n, n))
        }
        _ => return Err(Error::Config { path: "inputs".into(), message: "a, b and y must be given together".into() }),
    };
    let p = cfg.p.unwrap_or(2.0);
    let (x, report) = solve_gap(&a, &b, &y, p)?;
    let residual = (&(&(a.as_matrix() * &x) - &(&x * b.as_matrix())) - &y).max_abs();
    rec.le("sylvester.residual", residual, 0.0, cfg.tolerances.residual);
    rec.le("sylvester.bound_ratio", report.x_norm / report.bound, 1.0, cfg.tolerances.algebraic);
    rec.le("sylvester.kron_oracle", kron_oracle(&a, &b, &y)?.max_abs_diff(&x), 0.0, cfg.tolerances.solver);
    rec.artifact("gap.json", json(&report));
    rec.artifact("x.json", json(&x.to_json()));
    Ok(())
}

fn input_symbol(cfg: &ScenarioConfig, tag: &str) -> Result<IndexSymbol> {
    match &cfg.inputs.symbol {
        Some(path) => IndexSymbol::from_csv(&std::fs::read_to_string(path)?),
        None => {
            let mut rng = Ctx::new(cfg).rng(tag, 0);
            let n = first_dim(cfg);
            IndexSymbol::new(random_complex_matrix(&mut rng, n, n))
        }
    }
}

pub(super) fn quantize_command(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let sigma = input_symbol(cfg, "quantize.input")?;
    let space = CycleSpace::new(sigma.n())?;
    let m = quantize(&space, &sigma)?;
    let mut rng = Ctx::new(cfg).rng("quantize.search", 0);
    let est = qp_norm_upper_estimate(&space, &sigma, cfg.trials_or(16), &mut rng)?;
    rec.le("quantize.actual_over_certificate", est.actual / est.norm_value.max(1e-300), 1.0, cfg.tolerances.algebraic);
    rec.artifact("quantized.json", json(&m.to_json()));
    rec.artifact("qp_estimate.json", json(&est));
    Ok(())
}

pub(super) fn cotlar(cfg: &ScenarioConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = Ctx::new(cfg);
    let mut reports = Vec::new();
    match &cfg.inputs.symbol {
        Some(_) => {
            // one term per rank-one piece of the given symbol: σ = Σ_ξ σ(·, ξ) ⊗ δ_ξ
            let sigma = input_symbol(cfg, "cotlar.input")?;
            let n = sigma.n();
            let space = CycleSpace::new(n)?;
            let terms: Vec<_> = (0..n)
                .map(|xi| {
                    let f = (0..n).map(|x| sigma.values()[(x, xi)]).collect();
                    let g = (0..n).map(|k| Complex64::new(if k == xi { 1.0 } else { 0.0 }, 0.0)).collect();
                    (f, g)
                })
                .collect();
            reports.push(cotlar_stein_bound(&space, &terms)?);
        }
        None => {
            for (k, n) in ctx.cases(cfg.trials_or(20)) {
                let mut rng = ctx.rng("cotlar", k);
                let space = CycleSpace::new(n)?;
                reports.push(cotlar_stein_bound(&space, &random_terms(&mut rng, n, 1 + k % 5))?);
            }
        }
    }
    rec.none("cotlar.failures", reports.iter().filter(|r| !r.holds).count());
    rec.artifact("cotlar.json", json(&reports));
    Ok(())
}
