//! Approximation quasi-norms of operators and their dyadic block
//! representations.
//!
//! The approximation scheme on operators is `A_n = {rank < n}` under the
//! spectral norm, so `α_n(T) = s_n(T)` and the quasi-triangle constant is 1.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hop::{HCertificate, HVerdict};
use crate::operators::{self, op_norm, singular_system, ComplexMatrix, NormKind, SingularSystem};
use crate::search::stream_rng;
use crate::seqspace::{approx_space_norm, lmu_norm, ApproxSpaceParams, ExtReal};

/// `‖T‖` in the eigenvalue space and in the approximation space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorApproxNorm {
    pub params: ApproxSpaceParams,
    /// `‖(n^{ρ−1/μ}|λ_n|)‖_{ℓ_μ}`.
    pub value_lambda: f64,
    /// `‖(n^{ρ−1/μ}α_n)‖_{ℓ_μ}`.
    pub value_alpha: f64,
    /// `value_alpha / value_lambda`; `None` when `value_lambda = 0`.
    pub ratio: Option<f64>,
    pub c: f64,
    /// `[1/(8C(C+1)), 2√2·C]`, implied by the Markus chain.
    pub sandwich: (f64, f64),
    pub within_sandwich: bool,
}

fn abs_eigenvalues(t: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(operators::eigenvalues(t)?.iter().map(|z| z.norm()).collect())
}

/// Both quasi-norms of a certified H-operator over `n = 1..dim`.
pub fn operator_approx_norm(t: &ComplexMatrix, cert: &HCertificate, ap: ApproxSpaceParams) -> Result<OperatorApproxNorm> {
    let c = match (cert.verdict, cert.c_upper) {
        (HVerdict::Certified, Some(c)) => c,
        _ => {
            return Err(Error::domain(format!(
                "operator is not a certified H-operator (verdict {:?})",
                cert.verdict
            )))
        }
    };
    let value_lambda = approx_space_norm(&abs_eigenvalues(t)?, ap)?.value;
    let value_alpha = approx_space_norm(&operators::singular_values(t), ap)?.value;
    let sandwich = (1.0 / (8.0 * c * (c + 1.0)), 2.0 * 2f64.sqrt() * c);
    let ratio = (value_lambda > 0.0).then(|| value_alpha / value_lambda);
    let within_sandwich = match ratio {
        Some(r) => r >= sandwich.0 * (1.0 - 1e-10) && r <= sandwich.1 * (1.0 + 1e-10),
        None => value_alpha == 0.0,
    };
    Ok(OperatorApproxNorm {
        params: ap,
        value_lambda,
        value_alpha,
        ratio,
        c,
        sandwich,
        within_sandwich,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub rho: f64,
    pub mu1: ExtReal,
    pub mu2: ExtReal,
    pub samples: usize,
    /// `‖T‖_{A_{μ2}} / ‖T‖_{A_{μ1}}` per sample (1 for the zero operator).
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Largest ratio over the first half of the corpus.
    pub max_ratio_half: f64,
    /// `min(‖T‖_{A_{μ1}} − ‖T‖_{A_{μ2}})` relative to `‖T‖_{A_{μ1}}`.
    pub min_relative_slack: f64,
    pub finite: bool,
}

/// Embedding ratios of the eigenvalue quasi-norms over a corpus of
/// H-operators.
pub fn inclusion_experiment(
    corpus: &[ComplexMatrix],
    rho: f64,
    mu1: ExtReal,
    mu2: ExtReal,
    exec: Exec,
) -> Result<InclusionReport> {
    if mu1 > mu2 {
        return Err(Error::domain(format!("need μ1 ≤ μ2, got {mu1} > {mu2}")));
    }
    if corpus.is_empty() {
        return Err(Error::domain("empty corpus"));
    }
    let ap1 = ApproxSpaceParams::new(rho, mu1)?;
    let ap2 = ApproxSpaceParams::new(rho, mu2)?;
    let pairs = exec.map(corpus, |t| -> Result<(f64, f64)> {
        let lam = abs_eigenvalues(t)?;
        Ok((approx_space_norm(&lam, ap1)?.value, approx_space_norm(&lam, ap2)?.value))
    });
    let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| if a == 0.0 { 1.0 } else { b / a })
        .collect();
    let min_relative_slack = pairs
        .iter()
        .map(|&(a, b)| if a == 0.0 { 0.0 } else { (a - b) / a })
        .fold(f64::INFINITY, f64::min);
    let max_of = |r: &[f64]| r.iter().copied().fold(0.0, f64::max);
    Ok(InclusionReport {
        rho,
        mu1,
        mu2,
        samples: ratios.len(),
        max_ratio: max_of(&ratios),
        max_ratio_half: max_of(&ratios[..ratios.len().div_ceil(2)]),
        finite: ratios.iter().all(|r| r.is_finite()),
        min_relative_slack,
        ratios,
    })
}

/// One row of the per-block table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockRow {
    pub n: usize,
    /// Numerical rank at threshold `1e-10·s_1`.
    pub rank: usize,
    pub rank_cap: usize,
    pub norm: f64,
    /// `4·α_{2^{n−2}}` for `n ≥ 2`, `0` for `n < 2`.
    pub bound: f64,
    pub slack: f64,
}

/// Blocks `g_0..g_M` with `g_0 = g_1 = 0` and
/// `g_{n+2} = g*_{n+1} − g*_n`, `g*_n` the best rank-`(2^n − 1)` approximant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicDecomposition {
    pub params: ApproxSpaceParams,
    pub m: usize,
    #[serde(skip)]
    pub blocks: Vec<ComplexMatrix>,
    pub rows: Vec<BlockRow>,
    /// `‖T − Σ_{n≤N} g_n‖` for `N = 0..=M`.
    pub residuals: Vec<f64>,
    /// `max_N ‖Σ_{n≤N} g_n − g*_{N−1}‖`.
    pub telescoping_error: f64,
    /// `α_{2^{M−1}}`: the residual left by the last approximant.
    pub floor: f64,
    /// Set when `M` is too small to exhaust the rank.
    pub floor_flagged: bool,
    /// `‖(2^{nρ}‖g_n‖)_{n=0..M}‖_{ℓ_μ}`.
    pub rep_norm: f64,
    pub s1: f64,
}

impl DyadicDecomposition {
    pub fn block_norms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.norm).collect()
    }

    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("M ≥ 2")
    }

    pub fn ranks_within_cap(&self) -> bool {
        self.rows.iter().all(|r| r.rank <= r.rank_cap)
    }

    pub fn block_bounds_hold(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.slack >= -tol)
    }
}

/// Smallest `M ≥ 2` with `2^{M−1} − 1 ≥ rank`, for which the blocks sum to `T`.
pub fn default_levels(rank: usize) -> usize {
    let mut m = 2;
    while (1usize << (m - 1)) - 1 < rank {
        m += 1;
    }
    m
}

fn numerical_rank(s: &[f64], s1: f64) -> usize {
    s.iter().filter(|&&x| x > 1e-10 * s1).count()
}

/// `s_k` (1-based) or 0 past the end.
fn sv(s: &[f64], k: usize) -> f64 {
    if k == 0 {
        return s.first().copied().unwrap_or(0.0);
    }
    s.get(k - 1).copied().unwrap_or(0.0)
}

/// Dyadic decomposition from truncated SVDs.
pub fn dyadic_decompose(t: &ComplexMatrix, ap: ApproxSpaceParams, m: usize) -> Result<DyadicDecomposition> {
    if m < 2 {
        return Err(Error::domain(format!("need M ≥ 2 levels, got {m}")));
    }
    if m > 40 {
        return Err(Error::domain(format!("M = {m} exceeds the supported 40 levels")));
    }
    let sys = singular_system(t);
    let s = sys.s.clone();
    let s1 = sv(&s, 1);
    let cap = |n: usize| ((1usize << n) - 1).min(s.len());
    let star = |n: usize| sys.truncate(cap(n));
    let zero = ComplexMatrix::zeros(t.rows(), t.cols());
    let mut blocks = vec![zero.clone(), zero.clone()];
    for n in 0..=m - 2 {
        blocks.push(sys.slice(cap(n), cap(n + 1)));
    }
    let mut rows = Vec::with_capacity(m + 1);
    let mut residuals = Vec::with_capacity(m + 1);
    let mut telescoping_error: f64 = 0.0;
    let mut partial = zero;
    for (n, g) in blocks.iter().enumerate() {
        let gs = operators::singular_values(g);
        let norm = gs.first().copied().unwrap_or(0.0);
        let bound = if n >= 2 { 4.0 * sv(&s, 1 << (n - 2)) } else { 0.0 };
        rows.push(BlockRow {
            n,
            rank: numerical_rank(&gs, s1),
            rank_cap: 1 << n,
            norm,
            bound,
            slack: bound - norm,
        });
        partial = partial.add(g)?;
        residuals.push(op_norm(&t.sub(&partial)?, NormKind::Spectral));
        let target = if n == 0 { ComplexMatrix::zeros(t.rows(), t.cols()) } else { star(n - 1) };
        telescoping_error = telescoping_error.max(op_norm(&partial.sub(&target)?, NormKind::Spectral));
    }
    let floor = sv(&s, 1 << (m - 1));
    let floor_flagged = floor > 1e-10 * s1;
    let rep_norm = lmu_norm(
        rows.iter().map(|r| (r.n as f64 * ap.rho).exp2() * r.norm),
        ap.mu,
    );
    Ok(DyadicDecomposition {
        params: ap,
        m,
        blocks,
        rows,
        residuals,
        telescoping_error,
        floor,
        floor_flagged,
        rep_norm,
        s1,
    })
}

/// Cost `‖(2^{nρ}‖g_n‖)‖_{ℓ_μ}` of the decomposition whose block `n` is the
/// SVD slice `[k_{n−1}, k_n)`; block norms are leading singular values.
fn slice_cost(s: &[f64], cuts: &[usize], ap: ApproxSpaceParams) -> f64 {
    let mut prev = 0;
    let terms = cuts.iter().enumerate().map(|(n, &k)| {
        let norm = if k > prev { s[prev] } else { 0.0 };
        prev = k;
        (n as f64 * ap.rho).exp2() * norm
    });
    lmu_norm(terms.collect::<Vec<_>>(), ap.mu)
}

/// Cumulative cuts with increments `≤ 2^n` that reach `rank`.
fn random_cuts<R: Rng>(rng: &mut R, rank: usize) -> Vec<usize> {
    let mut cuts = Vec::new();
    let mut k = 0;
    let mut n = 0;
    while k < rank {
        let room = (1usize << n).min(rank - k);
        let inc = if rng.gen_bool(0.5) { room } else { rng.gen_range(0..=room) };
        k += inc;
        cuts.push(k);
        n += 1;
    }
    cuts
}

fn greedy_cuts(rank: usize) -> Vec<usize> {
    let mut cuts = Vec::new();
    let mut n = 0;
    let mut k = 0;
    while k < rank {
        k = (k + (1usize << n)).min(rank);
        cuts.push(k);
        n += 1;
    }
    cuts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepSource {
    Canonical,
    Greedy,
    Randomized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepEquivalenceReport {
    pub params: ApproxSpaceParams,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub canonical_rep_norm: f64,
    /// Smallest representation cost found; an upper bound on the infimum.
    pub rep_norm_upper: f64,
    pub best_source: RepSource,
    /// `‖T‖` in the approximation space, from `α_n = s_n`.
    pub a_norm: f64,
    /// `rep_norm_upper / a_norm`; `None` for the zero operator.
    pub ratio: Option<f64>,
    pub canonical_ratio: Option<f64>,
    pub band: (f64, f64),
    pub within_band: bool,
    pub floor_flagged: bool,
}

/// Default two-sided band `[4^{−(ρ+1)}, 4^{ρ+1}]` for the ratio.
pub fn default_rep_band(rho: f64) -> (f64, f64) {
    let b = 4f64.powf(rho + 1.0);
    (1.0 / b, b)
}

/// Compares representation costs with the approximation-space norm.
///
/// Candidates are the canonical decomposition, the greedy SVD slicing
/// (block `n` takes the next `2^n` singular triplets) and `trials` random
/// slicings with the same rank caps.
pub fn representation_equivalence(
    t: &ComplexMatrix,
    ap: ApproxSpaceParams,
    m: usize,
    trials: usize,
    seed: u64,
    band: Option<(f64, f64)>,
) -> Result<RepEquivalenceReport> {
    let dec = dyadic_decompose(t, ap, m)?;
    let sys: SingularSystem = singular_system(t);
    let s = &sys.s;
    let rank = numerical_rank(s, sv(s, 1));
    let a_norm = approx_space_norm(s, ap)?.value;
    let mut best = (dec.rep_norm, RepSource::Canonical);
    let greedy = slice_cost(s, &greedy_cuts(rank), ap);
    if greedy < best.0 {
        best = (greedy, RepSource::Greedy);
    }
    let mut rng = stream_rng(seed, 0x5eed);
    for _ in 0..trials {
        let c = slice_cost(s, &random_cuts(&mut rng, rank), ap);
        if c < best.0 {
            best = (c, RepSource::Randomized);
        }
    }
    let band = band.unwrap_or_else(|| default_rep_band(ap.rho));
    let ratio = (a_norm > 0.0).then(|| best.0 / a_norm);
    let canonical_ratio = (a_norm > 0.0).then(|| dec.rep_norm / a_norm);
    Ok(RepEquivalenceReport {
        params: ap,
        m,
        trials,
        seed,
        canonical_rep_norm: dec.rep_norm,
        rep_norm_upper: best.0,
        best_source: best.1,
        a_norm,
        within_band: match ratio {
            Some(r) => r >= band.0 && r <= band.1,
            None => best.0 == 0.0,
        },
        ratio,
        canonical_ratio,
        band,
        floor_flagged: dec.floor_flagged,
    })
}
