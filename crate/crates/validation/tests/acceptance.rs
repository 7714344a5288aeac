//! Acceptance criteria 1-13. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use opcalc::doi::{
    doi_apply, doi_fourier, hilbert_start, hs_multiplier_norm, hs_norm_krylov, hs_norm_power_iteration,
    make_spectral_pair, sampled_multiplier_norm, standard_pair, triangular_symbol, Decomposition, SpectralPair, SymbolGrid,
};
use opcalc::linalg::{eig_hermitian, operator_norm, schatten_norm, ComplexMatrix, HermitianMatrix, SchattenP};
use opcalc::quadrature::QuadConfig;
use opcalc::quantization::{
    bimeasure_eval, bimeasure_integrate, cotlar_stein_bound, momentum_projector, position_projector, quantize,
    random_decomposition, random_terms, CycleSpace, IndexSymbol, SequenceBimeasure,
};
use opcalc::rng::{
    complex_normal, random_complex_matrix, random_complex_vector, random_hermitian, random_hermitian_scaled, random_psd,
    random_subset, random_unit_vector, substream, uniform, TrialRng,
};
use opcalc::scenario::{run, Command, ScenarioConfig};
use opcalc::shift::{
    admissible_f, arctan_rep_value, fourier_quad, trace_formula_check, xi_arctan, xi_counting, xi_fourier, xi_rank_one,
    AtomicMeasure, SampledCurve, ShiftFunction,
};
use opcalc::sylvester::{kron_oracle, solve_gap, spectral_gap};
use rand::Rng;

const SEED: u64 = 2024;

type Outcome = opcalc::Result<(bool, String)>;

fn rng(tag: &str, trial: usize) -> TrialRng {
    substream(SEED, tag, trial as u64)
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Independent, `A = B + PSD`, or integer diagonals with ties.
fn shift_pair(rng: &mut TrialRng, n: usize, kind: usize) -> (HermitianMatrix, HermitianMatrix) {
    match kind % 3 {
        0 => (random_hermitian(rng, n), random_hermitian(rng, n)),
        1 => {
            let b = random_hermitian(rng, n);
            let rank = rng.random_range(1..=n);
            let trace = uniform(rng, 0.1, 3.0);
            let a = &b + &random_psd(rng, n, rank, trace);
            (a, b)
        }
        _ => {
            let mut diag = || (0..n).map(|_| rng.random_range(0..4) as f64).collect::<Vec<_>>();
            let (da, db) = (diag(), diag());
            (HermitianMatrix::from_real_diag(&da), HermitianMatrix::from_real_diag(&db))
        }
    }
}

fn random_measure(rng: &mut TrialRng) -> opcalc::Result<AtomicMeasure> {
    let atoms = rng.random_range(1..=4);
    let mut list = Vec::with_capacity(atoms);
    for _ in 0..atoms {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        list.push((sign * uniform(rng, 0.2, 3.0), uniform(rng, 0.1, 1.0)));
    }
    AtomicMeasure::new(list)
}

/// 200 pairs, 50 at each of dims 2, 4, 6, 8.
fn pair_cases() -> impl Iterator<Item = (usize, usize)> {
    (0..200).map(|k| (k, [2, 4, 6, 8][k / 50]))
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (k, n) in pair_cases() {
        let mut r = rng("acceptance.1", k);
        let (a, b) = shift_pair(&mut r, n, k);
        for _ in 0..5 {
            let f = admissible_f(&random_measure(&mut r)?)?;
            let check = trace_formula_check(&a, &b, |x| f.f(x))?;
            let rel = check.gap / (1.0 + check.lhs.norm());
            worst = worst.max(rel);
            if !(check.gap <= 1e-9 * (1.0 + check.lhs.norm())) {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("1000 (pair, f) cases, worst gap/(1+|lhs|) = {worst:.2e}, failures = {failures}")))
}

fn criterion_2() -> Outcome {
    let (mut a_err, mut b_err, mut b_excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let (mut negative, mut psd_cases, mut outside) = (0, 0, 0);
    for (k, n) in pair_cases() {
        let mut r = rng("acceptance.2", k);
        let (a, b) = shift_pair(&mut r, n, k);
        let xi = xi_counting(&a, &b)?;
        let (ea, eb) = (eig_hermitian(&a)?, eig_hermitian(&b)?);
        let diff = &a - &b;
        a_err = a_err.max((xi.integral() - (a.trace_re() - b.trace_re())).abs());
        let sorted: f64 = ea.eigenvalues().iter().zip(eb.eigenvalues()).map(|(x, y)| (x - y).abs()).sum();
        b_err = b_err.max((xi.l1_norm() - sorted).abs());
        b_excess = b_excess.max(xi.l1_norm() - schatten_norm(diff.as_matrix(), 1.0)?);
        let ed = eig_hermitian(&diff)?;
        if k % 3 == 1 || ed.eigenvalues()[0] >= 0.0 {
            psd_cases += 1;
            negative += xi.values().iter().filter(|&&v| v < 0).count();
        }
        let all: Vec<f64> = ea.eigenvalues().iter().chain(eb.eigenvalues()).copied().collect();
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some((s, t)) = xi.support() {
            if s < lo || t > hi {
                outside += 1;
            }
        }
    }
    let pass = a_err <= 1e-10 && b_err <= 1e-10 && b_excess <= 1e-10 && negative == 0 && outside == 0 && psd_cases > 0;
    Ok((
        pass,
        format!(
            "200 pairs: a) {a_err:.1e}; b) identity {b_err:.1e}, ∫|ξ| - ‖A-B‖₁ <= {b_excess:.1e}; \
             c) {negative} negative values over {psd_cases} psd cases; d) {outside} supports outside the hull"
        ),
    ))
}

/// Points `min σ - 0.5 + 0.05k` up to `max σ + 0.5`, at distance >= `min_dist` from `eigs`.
fn far_grid(eigs: &[f64], step: f64, min_dist: f64) -> Vec<f64> {
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min) - 0.5;
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5;
    let count = ((hi - lo) / step).floor() as usize + 1;
    (0..count).map(|k| lo + k as f64 * step).filter(|x| eigs.iter().all(|e| (x - e).abs() >= min_dist)).collect()
}

fn curve_error(curve: &SampledCurve, xi: &ShiftFunction) -> f64 {
    max(curve.points().map(|(x, y)| (y - xi.evaluate(x) as f64).abs()))
}

fn criterion_3() -> Outcome {
    let ladder = [0.04, 0.02, 0.01];
    let mut arctan_err = [0.0f64; 3];
    let mut fourier_err = [0.0f64; 3];
    let mut over = 0;
    let mut factors = (f64::INFINITY, f64::NEG_INFINITY);
    let pairs = 20;
    for k in 0..pairs {
        let n = [2, 4, 6, 8][k % 4];
        let mut r = rng("acceptance.3", k);
        let (a, b) = (random_hermitian(&mut r, n), random_hermitian(&mut r, n));
        let xi = xi_counting(&a, &b)?;
        let eigs: Vec<f64> = eig_hermitian(&a)?.eigenvalues().iter().chain(eig_hermitian(&b)?.eigenvalues()).copied().collect();
        let grid = far_grid(&eigs, 0.05, 0.1);
        if grid.is_empty() {
            continue;
        }
        let lo = eigs.iter().chain(&grid).copied().fold(f64::INFINITY, f64::min);
        let hi = eigs.iter().chain(&grid).copied().fold(f64::NEG_INFINITY, f64::max);
        let mut errs = [0.0; 3];
        for (i, &eps) in ladder.iter().enumerate() {
            let at = curve_error(&xi_arctan(&a, &b, eps, &grid)?, &xi);
            let fo = curve_error(&xi_fourier(&a, &b, eps, &grid, &fourier_quad(eps, hi - lo))?, &xi);
            over += usize::from(at > 0.05) + usize::from(fo > 0.05);
            arctan_err[i] = arctan_err[i].max(at);
            fourier_err[i] = fourier_err[i].max(fo);
            errs[i] = at;
        }
        for r in [errs[0] / errs[1], errs[1] / errs[2]] {
            factors = (factors.0.min(r), factors.1.max(r));
        }
    }
    let within = arctan_err.iter().chain(&fourier_err).all(|&e| e <= 0.05);
    let factor_ok = factors.0 >= 1.5 && factors.1 <= 2.5;
    Ok((
        within && factor_ok,
        format!(
            "{pairs} pairs; max error arctan {:.3}/{:.3}/{:.3}, fourier {:.3}/{:.3}/{:.3} at ε = 0.04/0.02/0.01 \
             (limit 0.05, {over} of {} route evaluations over); halving factors in [{:.2}, {:.2}]",
            arctan_err[0],
            arctan_err[1],
            arctan_err[2],
            fourier_err[0],
            fourier_err[1],
            fourier_err[2],
            2 * 3 * pairs,
            factors.0,
            factors.1
        ),
    ))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let mut r = rng("acceptance.4", k);
        let n = r.random_range(4..=8);
        let b = random_hermitian(&mut r, n);
        let w = random_unit_vector(&mut r, n);
        let alpha = uniform(&mut r, 0.2, 2.0);
        let a = b.rank_one_update(alpha, &w);
        let xi = xi_counting(&a, &b)?;
        let eigs: Vec<f64> = eig_hermitian(&a)?.eigenvalues().iter().chain(eig_hermitian(&b)?.eigenvalues()).copied().collect();
        let grid = far_grid(&eigs, 0.01, 0.05);
        worst = worst.max(curve_error(&xi_rank_one(&b, &w, alpha, &grid, 1e-6)?, &xi));
    }
    Ok((worst <= 0.05, format!("100 perturbations at dims 4-8, η = 1e-6: max error {worst:.2e} at distance >= 0.05")))
}

fn gapped_pair(r: &mut TrialRng, n: usize, k: usize) -> opcalc::Result<(HermitianMatrix, HermitianMatrix)> {
    loop {
        let b = random_hermitian(r, n);
        let a = if k % 2 == 0 {
            let top = *eig_hermitian(&b)?.eigenvalues().last().unwrap();
            random_hermitian_scaled(r, n, 1.0).shifted(top + uniform(r, 1.1, 3.0))
        } else {
            random_hermitian(r, n)
        };
        if spectral_gap(&a, &b)? >= 0.02 {
            return Ok((a, b));
        }
    }
}

fn criterion_5() -> Outcome {
    let (mut residual, mut oracle) = (0.0f64, 0.0f64);
    let mut ratio = [0.0f64; 3];
    for k in 0..300 {
        let n = [2, 4, 6, 8][k % 4];
        let mut r = rng("acceptance.5", k);
        let (a, b) = gapped_pair(&mut r, n, k)?;
        let y = random_complex_matrix(&mut r, n, n);
        for (i, p) in [1.0, 2.0, f64::INFINITY].into_iter().enumerate() {
            let (x, rep) = solve_gap(&a, &b, &y, p)?;
            ratio[i] = ratio[i].max(rep.x_norm / rep.bound);
            if i == 0 {
                let res = &(&(a.as_matrix() * &x) - &(&x * b.as_matrix())) - &y;
                residual = residual.max(res.max_abs());
                oracle = oracle.max(kron_oracle(&a, &b, &y)?.max_abs_diff(&x));
            }
        }
    }
    let pass = residual <= 1e-9 && oracle <= 1e-8 && ratio.iter().all(|&q| q <= 1.0);
    Ok((
        pass,
        format!(
            "300 trials: residual {residual:.1e}, kron oracle {oracle:.1e}, max ‖X‖_p/bound {:.3}/{:.3}/{:.3} for p = 1/2/∞",
            ratio[0], ratio[1], ratio[2]
        ),
    ))
}

fn random_symbol(pair: &SpectralPair, r: &mut TrialRng) -> opcalc::Result<SymbolGrid> {
    let (l, m) = (pair.left().eigenvalues().to_vec(), pair.right().eigenvalues().to_vec());
    let values = (0..l.len() * m.len()).map(|_| complex_normal(r)).collect();
    SymbolGrid::new(l, m, values)
}

fn criterion_6() -> Outcome {
    let (mut worst, mut power_worst) = (0.0f64, 0.0f64);
    let mut power_misses = 0;
    for k in 0..100 {
        let n = 1 + k % 8;
        let mut r = rng("acceptance.6", k);
        let pair = make_spectral_pair(&random_hermitian(&mut r, n), &random_hermitian(&mut r, n))?;
        let phi = random_symbol(&pair, &mut r)?;
        let exact = hs_multiplier_norm(&pair, &phi)?;
        worst = worst.max((hs_norm_krylov(&pair, &phi, n * n, &mut r)? - exact).abs());
        let plain = (hs_norm_power_iteration(&pair, &phi, 500, &mut r)? - exact).abs();
        power_worst = power_worst.max(plain);
        if plain > 1e-6 {
            power_misses += 1;
        }
    }
    Ok((
        worst <= 1e-6,
        format!(
            "100 symbols at dims 1-8: Krylov power-iterate estimate within {worst:.1e}; \
             plain 500-step power iteration within {power_worst:.1e} ({power_misses} above 1e-6)"
        ),
    ))
}

fn criterion_7() -> Outcome {
    let f = |s: f64| Complex64::new((-s.abs()).exp(), 0.0);
    let quad = QuadConfig::gauss(-40.0, 40.0, 4000);
    let (mut cross, mut norm) = (0.0f64, 0.0f64);
    for k in 0..40 {
        let n = [2, 4, 6, 8][k % 4];
        let mut r = rng("acceptance.7", k);
        let pair = make_spectral_pair(&random_hermitian_scaled(&mut r, n, 2.0), &random_hermitian_scaled(&mut r, n, 2.0))?;
        let symbol = pair.symbol(|l, m| Complex64::new(2.0 / (1.0 + (l - m).powi(2)), 0.0))?;
        let t = random_complex_matrix(&mut r, n, n);
        let t = t.scale_re(1.0 / operator_norm(&t)?);
        let via_fourier = doi_fourier(&pair, f, &t, &quad)?;
        cross = cross.max(via_fourier.max_abs_diff(&doi_apply(&pair, &symbol, &t)?));
        norm = norm.max(operator_norm(&via_fourier)?);
    }
    Ok((
        cross <= 1e-6 && norm <= 2.0 + 1e-9,
        format!("40 trials: cross-route gap {cross:.1e}; max sampled ‖Φ(T)‖/‖T‖ = {norm:.4} <= ‖f‖₁ = 2"),
    ))
}

fn criterion_8() -> Outcome {
    let mut failures = 0;
    let mut tight: f64 = 0.0;
    for k in 0..200 {
        let n = [4, 8, 16][k % 3];
        let mut r = rng("acceptance.8", k);
        let terms = random_terms(&mut r, n, 1 + k % 6);
        let rep = cotlar_stein_bound(&CycleSpace::new(n)?, &terms)?;
        if !rep.holds {
            failures += 1;
        }
        tight = tight.max(rep.actual / rep.m);
    }
    Ok((failures == 0, format!("200 decompositions at n = 4/8/16: {failures} failures, max actual/M = {tight:.3}")))
}

fn resplit(d: &Decomposition, r: &mut TrialRng) -> Decomposition {
    let mut out = Decomposition::default();
    for term in d.terms.iter().rev() {
        let cut: Vec<Complex64> = term.alpha.iter().map(|&z| z * uniform(r, 0.0, 1.0)).collect();
        let rest: Vec<Complex64> = term.alpha.iter().zip(&cut).map(|(z, c)| z - c).collect();
        out.push(cut.iter().map(|z| z * 2.0).collect(), term.beta.clone(), term.weight / 2.0);
        out.push(rest, term.beta.clone(), term.weight);
    }
    out
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn criterion_9() -> Outcome {
    let (mut rect_over, mut decomp_over) = (0, 0);
    let (mut rect_ratio, mut decomp_ratio) = (0.0f64, 0.0f64);
    let (mut l1_excess, mut independence) = (f64::NEG_INFINITY, 0.0f64);
    for k in 0..500 {
        let n = 1 + k % 16;
        let mut r = rng("acceptance.9", k);
        let b = SequenceBimeasure::new(random_complex_vector(&mut r, n))?;
        let l2sq = b.phi().iter().map(|z| z.norm_sqr()).sum::<f64>();
        let l1sq = b.phi().iter().map(|z| z.norm()).sum::<f64>().powi(2);
        let (e, f) = (random_subset(&mut r, 1..n + 1), random_subset(&mut r, 1..n + 1));
        let rect = bimeasure_eval(&b, &e, &f)?.norm();
        rect_ratio = rect_ratio.max(rect / l2sq);
        if rect > l2sq * (1.0 + 1e-12) {
            rect_over += 1;
        }
        l1_excess = l1_excess.max(rect - l1sq);

        let d = random_decomposition(&mut r, n, 3);
        let value = bimeasure_integrate(&b, &d)?;
        let dominated: f64 = d.terms.iter().map(|t| t.weight * sup(&t.alpha) * sup(&t.beta)).sum();
        decomp_ratio = decomp_ratio.max(value.norm() / (l2sq * dominated));
        if value.norm() > l2sq * dominated * (1.0 + 1e-12) {
            decomp_over += 1;
        }
        l1_excess = l1_excess.max(value.norm() - l1sq * dominated);
        independence = independence.max((bimeasure_integrate(&b, &resplit(&d, &mut r))? - value).norm());
    }
    Ok((
        rect_over == 0 && decomp_over == 0 && independence <= 1e-10,
        format!(
            "500 cases: |m(E×F)| <= ‖φ‖₂² violated {rect_over} times (max ratio {rect_ratio:.2}); \
             decomposition bound with ‖φ‖₂² violated {decomp_over} times (max ratio {decomp_ratio:.2}); \
             same bounds with ‖φ‖₁² hold (max excess {l1_excess:.1e}); decomposition independence {independence:.1e}"
        ),
    ))
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let space = CycleSpace::new(n)?;
        let mut r = rng("acceptance.10", n);
        let sigma = IndexSymbol::new(random_complex_matrix(&mut r, n, n))?;
        let m = quantize(&space, &sigma)?;
        let subsets: Vec<Vec<usize>> = (0..1usize << n).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect();
        let ps: Vec<ComplexMatrix> = subsets.iter().map(|f| momentum_projector(&space, f)).collect::<opcalc::Result<_>>()?;
        for e in &subsets {
            let left = &position_projector(&space, e)? * &m;
            for (f, p) in subsets.iter().zip(&ps) {
                worst = worst.max((&left * p).max_abs_diff(&quantize(&space, &sigma.restrict(e, f)?)?));
            }
        }
    }
    let space = CycleSpace::new(16)?;
    for k in 0..100 {
        let mut r = rng("acceptance.10.16", k);
        let sigma = IndexSymbol::new(random_complex_matrix(&mut r, 16, 16))?;
        let (e, f) = (random_subset(&mut r, 0..16), random_subset(&mut r, 0..16));
        let lhs = &(&position_projector(&space, &e)? * &quantize(&space, &sigma)?) * &momentum_projector(&space, &f)?;
        worst = worst.max(lhs.max_abs_diff(&quantize(&space, &sigma.restrict(&e, &f)?)?));
    }
    Ok((worst <= 1e-10, format!("all subset pairs at n <= 6 and 100 cases at n = 16: max deviation {worst:.1e}")))
}

fn criterion_11() -> Outcome {
    let mut hs_dev: f64 = 0.0;
    let mut sampled = Vec::new();
    for n in [4, 8, 16, 32] {
        let pair = standard_pair(n)?;
        let tri = triangular_symbol(&pair)?;
        hs_dev = hs_dev.max((hs_multiplier_norm(&pair, &tri)? - 1.0).abs());
        sampled.push(sampled_multiplier_norm(&pair, &tri, SchattenP::INF, &[hilbert_start(n)], 6)?.value);
    }
    let monotone = sampled.windows(2).all(|w| w[1] >= w[0]);
    Ok((
        hs_dev == 0.0 && monotone,
        format!(
            "C₂ norm deviation from 1: {hs_dev:.1e}; sampled C_∞ norms {:.3}, {:.3}, {:.3}, {:.3} at n = 4, 8, 16, 32",
            sampled[0], sampled[1], sampled[2], sampled[3]
        ),
    ))
}

fn criterion_12() -> Outcome {
    let quad = QuadConfig::gauss(-60.0, 60.0, 8000);
    let mut worst: f64 = 0.0;
    for t in -3..=3 {
        worst = worst.max((arctan_rep_value(t as f64, &quad)? - (t as f64).atan()).abs());
    }
    Ok((worst <= 1e-6, format!("t = -3..3: max |quadrature - arctan t| = {worst:.1e}")))
}

fn criterion_13() -> Outcome {
    let seeds: Vec<u64> = (0..20).collect();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(seeds.len());
    let results: Vec<opcalc::Result<(u64, bool, bool, usize)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let seeds = &seeds;
                s.spawn(move || {
                    seeds
                        .iter()
                        .skip(w)
                        .step_by(threads)
                        .map(|&seed| {
                            let cfg = ScenarioConfig { seed, ..ScenarioConfig::new(Command::Suite) };
                            let first = run(&cfg)?;
                            let second = run(&cfg)?;
                            Ok((seed, first.passed, first.to_json() == second.to_json(), first.checks.len()))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite thread")).collect()
    });
    let mut failed = Vec::new();
    let mut unstable = Vec::new();
    let mut checks = 0;
    for r in results {
        let (seed, passed, identical, count) = r?;
        checks = checks.max(count);
        if !passed {
            failed.push(seed);
        }
        if !identical {
            unstable.push(seed);
        }
    }
    Ok((
        failed.is_empty() && unstable.is_empty(),
        format!("suite at seeds 0-19 ({checks} checks each): failing seeds {failed:?}, non-identical reruns {unstable:?}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 13] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
    ];
    let mut failing = Vec::new();
    for (id, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} criterion {id}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        if !pass {
            failing.push(id);
        }
    }
    if failing.is_empty() {
        println!("acceptance: all 13 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failing:?}");
        ExitCode::FAILURE
    }
}
