//! Position and momentum on the cyclic group `Z_n`.
//!
//! `Q(E)` multiplies by `χ_E`; `P(E) = F* Q(E) F` with `F` the unitary DFT. A symbol
//! `σ(x, ξ)` is quantized as `Σ σ(x, ξ) Q_x P_ξ`.

mod bimeasure;

use std::collections::BTreeSet;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norms::svd;
use crate::linalg::{dft_unitary, eig_hermitian, operator_norm, ComplexMatrix, HermitianMatrix};
use crate::rng::{complex_normal, random_complex_vector};

pub use bimeasure::{
    bimeasure_eval, bimeasure_integrate, grothendieck_norm, grothendieck_ratio_experiment, random_decomposition, semivariation_estimate,
    unboundedness_growth, GrowthPoint, SequenceBimeasure,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CycleSpace {
    n: usize,
    dft: ComplexMatrix,
}

impl CycleSpace {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { n, dft: dft_unitary(n)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dft(&self) -> &ComplexMatrix {
        &self.dft
    }

    /// `F* diag(g) F`.
    pub fn momentum_multiplier(&self, g: &[Complex64]) -> Result<ComplexMatrix> {
        self.check_len(g.len())?;
        Ok(&(&self.dft.adjoint() * &ComplexMatrix::from_diag(g)) * &self.dft)
    }

    /// `diag(f) F* diag(g) F`.
    pub fn product_term(&self, f: &[Complex64], g: &[Complex64]) -> Result<ComplexMatrix> {
        self.check_len(f.len())?;
        Ok(&ComplexMatrix::from_diag(f) * &self.momentum_multiplier(g)?)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::dims(self.n, len));
        }
        Ok(())
    }

    fn indicator(&self, set: &[usize]) -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.n];
        for &i in set {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, len: self.n });
            }
            v[i] = Complex64::new(1.0, 0.0);
        }
        Ok(v)
    }
}

pub fn position_projector(space: &CycleSpace, e: &[usize]) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::from_diag(&space.indicator(e)?))
}

pub fn momentum_projector(space: &CycleSpace, f: &[usize]) -> Result<ComplexMatrix> {
    space.momentum_multiplier(&space.indicator(f)?)
}

/// `σ(x, ξ)` on `Z_n × Z_n`; rows are positions, columns frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSymbol {
    values: ComplexMatrix,
}

impl IndexSymbol {
    pub fn new(values: ComplexMatrix) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::dims(format!("{0}x{0}", values.rows()), format!("{}x{}", values.rows(), values.cols())));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(ComplexMatrix::new(n, n, data)?)
    }

    /// `f ⊗ g`.
    pub fn tensor(f: &[Complex64], g: &[Complex64]) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::dims(f.len(), g.len()));
        }
        Self::from_fn(f.len(), |x, k| f[x] * g[k])
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    /// `σ · (χ_E ⊗ χ_F)`.
    pub fn restrict(&self, e: &[usize], f: &[usize]) -> Result<Self> {
        let n = self.n();
        let (es, fs): (BTreeSet<usize>, BTreeSet<usize>) = (e.iter().copied().collect(), f.iter().copied().collect());
        if let Some(&i) = es.iter().chain(&fs).find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        Self::from_fn(n, |x, k| if es.contains(&x) && fs.contains(&k) { self.values[(x, k)] } else { Complex64::new(0.0, 0.0) })
    }

    /// One row per position, comma-separated entries; each entry real or `a+bi`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .enumerate()
            .map(|(r, line)| {
                line.split(',')
                    .map(|cell| {
                        Complex64::from_str(cell.trim())
                            .map_err(|e| Error::Parse(format!("symbol row {r}: {cell:?}: {e}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("symbol CSV must be a non-empty square grid, got {n} rows")));
        }
        Self::new(ComplexMatrix::new(n, n, rows.concat())?)
    }
}

/// `M[x, y] = (1/n) Σ_ξ σ(x, ξ) e^{2πi ξ (x - y)/n}`.
pub fn quantize(space: &CycleSpace, sigma: &IndexSymbol) -> Result<ComplexMatrix> {
    let n = space.n();
    space.check_len(sigma.n())?;
    let phase: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0 / n as f64, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    let mut m = ComplexMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let d = (x + n - y) % n;
            m[(x, y)] = (0..n).map(|xi| sigma.values()[(x, xi)] * phase[(xi * d) % n]).sum();
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CotlarSteinReport {
    #[serde(rename = "M")]
    pub m: f64,
    pub actual: f64,
    pub holds: bool,
    pub terms: usize,
}

/// Relative slack allowed in `actual <= M`.
pub const COTLAR_STEIN_SLACK: f64 = 1e-9;

/// Row/column certificate `M` for `Σ_k Q(f_k) P(g_k)` together with its actual norm.
///
/// `M = max_k max(Σ_j c_{kj}, Σ_j c_{jk})` with `c_{kj} = ‖Q(|f_k|²) P(|g_j|²)‖^{1/2}`. The
/// mixed-index sums are read as row and column sums of the array `c`.
pub fn cotlar_stein_bound(space: &CycleSpace, terms: &[(Vec<Complex64>, Vec<Complex64>)]) -> Result<CotlarSteinReport> {
    if terms.is_empty() {
        return Err(Error::Domain("cotlar_stein_bound needs at least one term".into()));
    }
    let n = space.n();
    let mut sum = ComplexMatrix::zeros(n, n);
    let mut qs = Vec::with_capacity(terms.len());
    let mut ps = Vec::with_capacity(terms.len());
    for (f, g) in terms {
        sum = &sum + &space.product_term(f, g)?;
        let sq = |v: &[Complex64]| v.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect::<Vec<_>>();
        qs.push(ComplexMatrix::from_diag(&sq(f)));
        ps.push(space.momentum_multiplier(&sq(g))?);
    }
    let k = terms.len();
    let mut c = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            c[i * k + j] = operator_norm(&(&qs[i] * &ps[j]))?.sqrt();
        }
    }
    let m = (0..k)
        .map(|i| {
            let row: f64 = (0..k).map(|j| c[i * k + j]).sum();
            let col: f64 = (0..k).map(|j| c[j * k + i]).sum();
            row.max(col)
        })
        .fold(0.0, f64::max);
    let actual = operator_norm(&sum)?;
    Ok(CotlarSteinReport { m, actual, holds: actual <= m * (1.0 + COTLAR_STEIN_SLACK), terms: k })
}

/// `k` random terms: a mix of gaussian vectors and indicator pairs.
pub fn random_terms(rng: &mut impl Rng, n: usize, k: usize) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    (0..k)
        .map(|_| {
            if rng.random_bool(0.3) {
                let ind = |rng: &mut _| {
                    (0..n).map(|_| Complex64::new(if rand::Rng::random_bool(rng, 0.5) { 1.0 } else { 0.0 }, 0.0)).collect()
                };
                (ind(rng), ind(rng))
            } else {
                (random_complex_vector(rng, n), random_complex_vector(rng, n))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QpUpperEstimate {
    pub norm_value: f64,
    pub decomposition_size: usize,
    pub candidates: usize,
    pub actual: f64,
    pub label: &'static str,
}

/// Smallest Cotlar–Stein certificate over `candidates` random exact decompositions of `σ`.
///
/// Each candidate mixes the rank factorization `σ = Σ s_r u_r ⊗ v̄_r` by a random invertible
/// matrix, so every candidate represents `σ` exactly.
pub fn qp_norm_upper_estimate(
    space: &CycleSpace,
    sigma: &IndexSymbol,
    candidates: usize,
    rng: &mut impl Rng,
) -> Result<QpUpperEstimate> {
    let n = space.n();
    space.check_len(sigma.n())?;
    let s = svd(sigma.values(), 1e-12)?;
    let r = s.values.len();
    let actual = operator_norm(&quantize(space, sigma)?)?;
    if r == 0 {
        return Ok(QpUpperEstimate { norm_value: 0.0, decomposition_size: 0, candidates, actual, label: "best-of-N certificate" });
    }
    // σ = L R with L = U S (n×r), R = V* (r×n)
    let mut best = (f64::INFINITY, r);
    for c in 0..candidates.max(1) {
        let (g, ginv) = if c == 0 {
            (ComplexMatrix::identity(r), ComplexMatrix::identity(r))
        } else {
            random_invertible(rng, r)?
        };
        let mut terms = Vec::with_capacity(r);
        for t in 0..r {
            let f: Vec<Complex64> = (0..n)
                .map(|x| (0..r).map(|q| s.left[q][x] * s.values[q] * g[(q, t)]).sum())
                .collect();
            let h: Vec<Complex64> =
                (0..n).map(|k| (0..r).map(|q| ginv[(t, q)] * s.right[q][k].conj()).sum()).collect();
            terms.push((f, h));
        }
        let report = cotlar_stein_bound(space, &terms)?;
        if report.m < best.0 {
            best = (report.m, r);
        }
    }
    Ok(QpUpperEstimate {
        norm_value: best.0,
        decomposition_size: best.1,
        candidates: candidates.max(1),
        actual,
        label: "best-of-N certificate",
    })
}

/// Random well-conditioned `G` and its inverse, `G = I + 0.3 Z / ‖Z‖`.
fn random_invertible(rng: &mut impl Rng, r: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let z = ComplexMatrix::new(r, r, (0..r * r).map(|_| complex_normal(rng)).collect())?;
    let z = z.scale_re(0.3 / operator_norm(&z)?.max(1e-300));
    let g = &ComplexMatrix::identity(r) + &z;
    // Neumann series converges since ‖Z‖ = 0.3
    let mut inv = ComplexMatrix::identity(r);
    let mut power = ComplexMatrix::identity(r);
    let neg = z.scale_re(-1.0);
    for _ in 0..80 {
        power = &power * &neg;
        inv = &inv + &power;
    }
    Ok((g, inv))
}

/// `diag(f_n) e^{-i(t_n - t_{n-1})H} ⋯ diag(f_1) e^{-i t_1 H} diag(f_0)`.
pub fn polymeasure_eval(f_list: &[Vec<Complex64>], times: &[f64], h: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = h.dim();
    if f_list.len() != times.len() + 1 {
        return Err(Error::dims(format!("{} factor vectors", times.len() + 1), f_list.len()));
    }
    if let Some(f) = f_list.iter().find(|f| f.len() != n) {
        return Err(Error::dims(n, f.len()));
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t > prev) || !t.is_finite() {
            return Err(Error::Domain(format!("times must be positive and strictly increasing, got {times:?}")));
        }
        prev = t;
    }
    let eh = eig_hermitian(h)?;
    let mut out = ComplexMatrix::from_diag(&f_list[0]);
    let mut prev = 0.0;
    for (f, &t) in f_list[1..].iter().zip(times) {
        let dt = t - prev;
        let step = eh.apply_complex(|x| Complex64::from_polar(1.0, -dt * x))?;
        out = &ComplexMatrix::from_diag(f) * &(&step * &out);
        prev = t;
    }
    Ok(out)
}
