//! Seeded random operators and sequences.
//!
//! Sample `i` of a corpus draws from its own ChaCha stream, so corpora are
//! reproducible and independent of evaluation order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operators::{ComplexMatrix, C64};
use crate::search::{gaussian_matrix, orthonormalize, stream_rng};
use crate::seqspace::SeqSample;

pub const MAX_DIM: usize = 500;
pub const MAX_COUNT: usize = 100_000;
pub const DEFAULT_KAPPA_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    /// `diag(d)`, `d_i` uniform in `[−1, 1]`.
    RealDiagonal,
    /// `P·diag(d)·P⁻¹` with real `d` and `κ(P)` capped.
    ConjugatedH,
    /// `(G + G*)/2` for a complex Gaussian `G`.
    Hermitian,
    /// Complex Gaussian scaled by `1/√dim`.
    RandomDense,
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-diagonal" => Ok(CorpusKind::RealDiagonal),
            "conjugated-h" | "conjugated-H" => Ok(CorpusKind::ConjugatedH),
            "hermitian" => Ok(CorpusKind::Hermitian),
            "random-dense" => Ok(CorpusKind::RandomDense),
            other => Err(Error::domain(format!(
                "unknown corpus kind {other:?} (expected real-diagonal, conjugated-h, hermitian, random-dense)"
            ))),
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::RealDiagonal => "real-diagonal",
            CorpusKind::ConjugatedH => "conjugated-h",
            CorpusKind::Hermitian => "hermitian",
            CorpusKind::RandomDense => "random-dense",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub kappa_cap: f64,
}

impl CorpusSpec {
    pub fn new(kind: CorpusKind, dim: usize, count: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::domain(format!("dim must lie in 1..={MAX_DIM}, got {dim}")));
        }
        if count == 0 || count > MAX_COUNT {
            return Err(Error::domain(format!("count must lie in 1..={MAX_COUNT}, got {count}")));
        }
        Ok(CorpusSpec {
            kind,
            dim,
            count,
            seed,
            kappa_cap: DEFAULT_KAPPA_CAP,
        })
    }

    pub fn with_kappa_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap > 1.0 && cap.is_finite()) {
            return Err(Error::domain(format!("κ cap must exceed 1, got {cap}")));
        }
        self.kappa_cap = cap;
        Ok(self)
    }

    pub fn generate(&self, exec: Exec) -> Vec<ComplexMatrix> {
        exec.map_range(self.count, |i| sample(self.kind, self.dim, self.seed, i as u64, self.kappa_cap))
    }
}

fn uniform_reals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn condition(m: &DMatrix<C64>) -> f64 {
    let s = m.singular_values();
    let hi = s.iter().copied().fold(0.0, f64::max);
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Real eigenvalues in `[−1, 1]` separated by at least `0.1/dim`.
fn separated_reals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let d = uniform_reals(rng, n);
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[1] - w[0] >= 0.1 / n as f64) {
            return d;
        }
    }
}

/// Real `P = Q1·diag(σ)·Q2` with `σ` in `[1, κ]`, columns normalized, and
/// `κ(P) ≤ cap` after normalization.
fn capped_basis(rng: &mut ChaCha8Rng, n: usize, cap: f64) -> DMatrix<C64> {
    let real_orth = |rng: &mut ChaCha8Rng| {
        let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.sample::<f64, _>(StandardNormal), 0.0));
        orthonormalize(g)
    };
    loop {
        let kappa = rng.gen_range(1.0..cap);
        let sigma: Vec<f64> = (0..n)
            .map(|i| if n == 1 { 1.0 } else { kappa.powf(i as f64 / (n - 1) as f64) })
            .collect();
        let q1 = real_orth(rng);
        let q2 = real_orth(rng);
        let mut p = q1 * DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(sigma[i], 0.0) } else { C64::new(0.0, 0.0) }) * q2;
        for mut col in p.column_iter_mut() {
            let nrm = col.norm();
            col /= C64::new(nrm, 0.0);
        }
        if condition(&p) <= cap {
            return p;
        }
    }
}

/// Sample `index` of a corpus.
pub fn sample(kind: CorpusKind, dim: usize, seed: u64, index: u64, kappa_cap: f64) -> ComplexMatrix {
    let mut rng = stream_rng(seed, index);
    match kind {
        CorpusKind::RealDiagonal => ComplexMatrix::diag_real(&uniform_reals(&mut rng, dim)),
        CorpusKind::Hermitian => {
            let g = gaussian_matrix(&mut rng, dim, dim);
            let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
            ComplexMatrix::from_inner(h)
        }
        CorpusKind::RandomDense => {
            let g = gaussian_matrix(&mut rng, dim, dim);
            ComplexMatrix::from_inner(g * C64::new(1.0 / (dim as f64).sqrt(), 0.0))
        }
        CorpusKind::ConjugatedH => {
            let d = separated_reals(&mut rng, dim);
            let p = capped_basis(&mut rng, dim, kappa_cap);
            let inv = p.clone().try_inverse().expect("κ(P) is capped");
            let lam = DMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) });
            ComplexMatrix::from_inner(&p * lam * inv)
        }
    }
}

/// Real Gaussian sequence of length `n` from stream `index`.
pub fn random_sequence(n: usize, seed: u64, index: u64) -> SeqSample {
    let mut rng = stream_rng(seed, index);
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    SeqSample::from_real(&v).expect("finite entries")
}

/// Non-increasing positive sequence with random log-gaps; samples a broad
/// range of decay profiles.
pub fn random_decreasing(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, index);
    let rate: f64 = rng.gen_range(0.0..2.0);
    let mut x = 1.0;
    (0..n)
        .map(|_| {
            let v = x;
            x *= (-rate * rng.gen::<f64>()).exp();
            v
        })
        .collect()
}
