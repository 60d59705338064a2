//! Dense complex matrices standing in for bounded operators, together with the
//! spectral data the rest of the crate is built on: eigenvalues, singular
//! values, induced operator norms and truncated singular expansions.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{self, SearchConfig};

pub type C64 = Complex64;

/// Moduli closer than this (relative) are treated as ties when ordering
/// eigenvalues.
const MODULUS_TIE: f64 = 1e-12;

/// A dense complex `rows × cols` matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {:?}", self.rows(), self.cols(), self.row_major())
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::domain(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain(format!(
                "entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Real matrix from a list of rows. Panics on ragged input; meant for fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_real(rows.len(), cols, &flat).expect("valid fixture")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        ComplexMatrix(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::diag(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        ComplexMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn min_dim(&self) -> usize {
        self.rows().min(self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix(&self.0 - &other.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::domain(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    /// `‖T − T*‖_max ≤ tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows())
                .all(|i| (0..self.cols()).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Which induced operator norm `‖·‖` is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// ℓ2 → ℓ2.
    #[default]
    Spectral,
    /// ℓ1 → ℓ1, max column sum.
    One,
    /// ℓ∞ → ℓ∞, max row sum.
    Inf,
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" | "2" => Ok(NormKind::Spectral),
            "one" | "1" => Ok(NormKind::One),
            "inf" => Ok(NormKind::Inf),
            other => Err(Error::domain(format!("unknown norm kind `{other}`"))),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Spectral => "spectral",
            NormKind::One => "one",
            NormKind::Inf => "inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Eigenvalues with multiplicity, non-increasing in modulus.
    pub eigenvalues: Vec<C64>,
    /// Singular values, non-increasing.
    pub singular_values: Vec<f64>,
}

impl SpectrumResult {
    pub fn abs_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Singular system `T = U · diag(s) · V*` with `s` non-increasing.
#[derive(Debug, Clone)]
pub struct SingularSystem {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v_adjoint: DMatrix<C64>,
}

impl SingularSystem {
    /// Sum of the first `k` singular triplets.
    pub fn truncate(&self, k: usize) -> ComplexMatrix {
        self.slice(0, k)
    }

    /// Sum of the triplets with (0-based) indices `from..to`.
    pub fn slice(&self, from: usize, to: usize) -> ComplexMatrix {
        let (m, n) = (self.u.nrows(), self.v_adjoint.ncols());
        let to = to.min(self.s.len());
        let mut out = DMatrix::<C64>::zeros(m, n);
        for idx in from..to {
            let s = C64::new(self.s[idx], 0.0);
            out += self.u.column(idx) * s * self.v_adjoint.row(idx);
        }
        ComplexMatrix(out)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.truncate(self.s.len())
    }
}

/// Full singular value decomposition, ordered.
pub fn singular_system(t: &ComplexMatrix) -> SingularSystem {
    let svd = t.0.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V*");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_columns(&order.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    let v_adjoint = DMatrix::from_rows(&order.iter().map(|&i| v_t.row(i)).collect::<Vec<_>>());
    SingularSystem { u, s, v_adjoint }
}

/// Singular values of any shape, non-increasing; `min(rows, cols)` of them.
pub fn singular_values(t: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = t.0.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a square matrix, ordered by non-increasing modulus.
///
/// Near-ties in modulus are ordered by decreasing imaginary part, then
/// decreasing real part, so conjugate pairs come out as `a + bi, a − bi`.
pub fn eigenvalues(t: &ComplexMatrix) -> Result<Vec<C64>> {
    if !t.is_square() {
        return Err(Error::domain(format!(
            "eigenvalues requested for a non-square {}x{} matrix",
            t.rows(),
            t.cols()
        )));
    }
    let schur = t.0.clone().schur();
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::domain("Schur form did not converge to triangular"))?;
    Ok(sort_by_modulus(ev.iter().copied().collect()))
}

pub(crate) fn sort_by_modulus(mut ev: Vec<C64>) -> Vec<C64> {
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let mut start = 0;
    while start < ev.len() {
        let lead = ev[start].norm();
        let mut end = start + 1;
        while end < ev.len() && (lead - ev[end].norm()) <= MODULUS_TIE * lead.max(1.0) {
            end += 1;
        }
        ev[start..end].sort_by(|a, b| b.im.total_cmp(&a.im).then(b.re.total_cmp(&a.re)));
        start = end;
    }
    ev
}

pub fn spectrum(t: &ComplexMatrix) -> Result<SpectrumResult> {
    Ok(SpectrumResult {
        eigenvalues: eigenvalues(t)?,
        singular_values: singular_values(t),
    })
}

/// Eigenvalues of the positive semidefinite `T*T`, non-increasing.
pub fn gram_eigenvalues(t: &ComplexMatrix) -> Vec<f64> {
    let g = t.0.adjoint() * &t.0;
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Coefficients `c_1..c_n` of `det(λI − T) = λⁿ + c_1 λⁿ⁻¹ + … + c_n`, by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly(t: &ComplexMatrix) -> Result<Vec<C64>> {
    if !t.is_square() {
        return Err(Error::domain("characteristic polynomial needs a square matrix"));
    }
    let n = t.rows();
    let a = &t.0;
    let mut coeffs = Vec::with_capacity(n);
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut c = C64::new(1.0, 0.0);
    for k in 1..=n {
        m = a * &m + DMatrix::<C64>::identity(n, n) * c;
        let am = a * &m;
        c = -am.trace() / k as f64;
        coeffs.push(c);
    }
    Ok(coeffs)
}

/// Induced operator norm of `T`.
pub fn op_norm(t: &ComplexMatrix, nk: NormKind) -> f64 {
    matrix_norm(&t.0, nk)
}

pub(crate) fn matrix_norm(m: &DMatrix<C64>, nk: NormKind) -> f64 {
    match nk {
        NormKind::Spectral => {
            if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                0.0
            } else {
                m.singular_values().iter().copied().fold(0.0, f64::max)
            }
        }
        NormKind::One => m
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Inf => m
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

/// A rank-constrained approximant and its error.
#[derive(Debug, Clone)]
pub struct RankApprox {
    pub approx: ComplexMatrix,
    /// `‖T − A‖` in the requested norm.
    pub err: f64,
    /// True when `err` is the optimum; false when it is only a certified
    /// upper bound from local search.
    pub exact: bool,
}

/// Best approximant of rank at most `k`.
///
/// Under the spectral norm this is the truncated singular expansion and the
/// error is `s_{k+1}`. Under the one/inf norms the approximant comes from a
/// local search seeded at the spectral optimum; its error is achieved, hence
/// an upper bound on the infimum, and is flagged as such.
pub fn best_rank_k(t: &ComplexMatrix, k: usize, nk: NormKind, cfg: &SearchConfig) -> Result<RankApprox> {
    if k >= t.min_dim() {
        return Err(Error::domain(format!(
            "rank {k} out of range for a {}x{} matrix (need k < {})",
            t.rows(),
            t.cols(),
            t.min_dim()
        )));
    }
    if k == 0 {
        return Ok(RankApprox {
            approx: ComplexMatrix::zeros(t.rows(), t.cols()),
            err: op_norm(t, nk),
            exact: true,
        });
    }
    let sys = singular_system(t);
    match nk {
        NormKind::Spectral => Ok(RankApprox {
            approx: sys.truncate(k),
            err: sys.s[k],
            exact: true,
        }),
        _ => {
            let (approx, err) = search::low_rank_search(t, &sys, k, nk, cfg);
            Ok(RankApprox { approx, err, exact: false })
        }
    }
}

/// Rebuilds `T` from its full singular system and returns the spectral-norm
/// residual `‖T − Σ s_n ⟨ψ_n, ·⟩ φ_n‖`.
pub fn schmidt_reconstruct(t: &ComplexMatrix) -> f64 {
    let rebuilt = singular_system(t).reconstruct();
    matrix_norm(&(&t.0 - rebuilt.0), NormKind::Spectral)
}

/// Eigenvector basis `T = V Λ V⁻¹` for a diagonalizable square matrix.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    /// Eigenvalues, ordered as [`eigenvalues`] orders them.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, aligned with `eigenvalues`.
    pub vectors: DMatrix<C64>,
    /// `‖TV − VΛ‖ / ‖T‖`.
    pub residual: f64,
    /// Spectral condition number of `vectors`.
    pub condition: f64,
}

/// Condition numbers beyond this mark the eigenvector basis as numerically
/// singular, i.e. the matrix as non-diagonalizable.
pub const MAX_EIGENBASIS_CONDITION: f64 = 1e8;

/// Diagonalizes `T` through its Schur form `T = Q R Q*`, back-substituting
/// for the eigenvectors of `R`. Returns `None` when the eigenvector basis is
/// numerically singular (defective or nearly defective matrices).
pub fn diagonalize(t: &ComplexMatrix) -> Result<Option<Diagonalization>> {
    if !t.is_square() {
        return Err(Error::domain("diagonalization needs a square matrix"));
    }
    let n = t.rows();
    let (q, r) = t.0.clone().schur().unpack();
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = r[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += r[(j, l)] * y[(l, k)];
            }
            let mut denom = r[(j, j)] - lam;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[(j, k)] = -acc / denom;
        }
    }
    let mut v = q * y;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    let lam: Vec<C64> = (0..n).map(|k| r[(k, k)]).collect();

    let sv = v.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > MAX_EIGENBASIS_CONDITION {
        return Ok(None);
    }
    let lam_mat = DMatrix::from_fn(n, n, |i, j| if i == j { lam[i] } else { C64::new(0.0, 0.0) });
    let tnorm = matrix_norm(&t.0, NormKind::Spectral).max(f64::MIN_POSITIVE);
    let residual = matrix_norm(&(&t.0 * &v - &v * lam_mat), NormKind::Spectral) / tnorm;

    // reorder to match `eigenvalues`
    let sorted = sort_by_modulus(lam.clone());
    let mut used = vec![false; n];
    let mut cols = Vec::with_capacity(n);
    for z in &sorted {
        let idx = (0..n)
            .filter(|&i| !used[i])
            .min_by(|&a, &b| (lam[a] - z).norm().total_cmp(&(lam[b] - z).norm()))
            .expect("same multiset");
        used[idx] = true;
        cols.push(v.column(idx).into_owned());
    }
    Ok(Some(Diagonalization {
        eigenvalues: sorted,
        vectors: DMatrix::from_columns(&cols),
        residual,
        condition,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex25() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[1.0, 1.0, 1.0]])
    }

    fn ex26() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[2.0, -3.0], &[3.0, 2.0]])
    }

    #[test]
    fn nonnormal_fixture_spectrum() {
        let sp = spectrum(&ex25()).unwrap();
        let expected = [2.0, 2.0, 1.0];
        for (z, e) in sp.eigenvalues.iter().zip(expected) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-8, "{z}");
        }
        let g = gram_eigenvalues(&ex25());
        for (x, e) in g.iter().zip([8.796, 2.466, 0.738]) {
            assert!((x - e).abs() < 1e-3, "{x} vs {e}");
        }
        for (x, e) in sp.singular_values.iter().zip(&g) {
            assert!((x * x - e).abs() < 1e-10);
        }
    }

    #[test]
    fn gram_char_poly_matches_integer_coefficients() {
        let t = ex25();
        let g = t.adjoint().matmul(&t).unwrap();
        let c = char_poly(&g).unwrap();
        for (z, e) in c.iter().zip([-12.0, 30.0, -16.0]) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-9);
        }
        let ct = char_poly(&t).unwrap();
        for (z, e) in ct.iter().zip([-5.0, 8.0, -4.0]) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn normal_fixture_spectrum() {
        let sp = spectrum(&ex26()).unwrap();
        assert!((sp.eigenvalues[0] - C64::new(2.0, 3.0)).norm() < 1e-10);
        assert!((sp.eigenvalues[1] - C64::new(2.0, -3.0)).norm() < 1e-10);
        for s in &sp.singular_values {
            assert!((s - 13f64.sqrt()).abs() < 1e-10);
        }
        assert!((op_norm(&ex26(), NormKind::Spectral) - 13f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_and_norms() {
        let d = ComplexMatrix::diag_real(&[3.0, 2.0, 1.0]);
        let sp = spectrum(&d).unwrap();
        assert_eq!(sp.abs_eigenvalues(), vec![3.0, 2.0, 1.0]);
        for (s, e) in sp.singular_values.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
        for nk in [NormKind::Spectral, NormKind::One, NormKind::Inf] {
            assert!((op_norm(&d, nk) - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn induced_one_and_inf_norms() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, -2.0], &[3.0, 4.0]]);
        assert_eq!(op_norm(&t, NormKind::One), 6.0);
        assert_eq!(op_norm(&t, NormKind::Inf), 7.0);
    }

    #[test]
    fn eigenvalues_of_rectangular_is_domain_error() {
        let t = ComplexMatrix::zeros(2, 3);
        assert!(matches!(spectrum(&t), Err(Error::Domain(_))));
        assert_eq!(singular_values(&t).len(), 2);
    }

    #[test]
    fn rank_zero_and_out_of_range() {
        let t = ex25();
        let cfg = SearchConfig::default();
        let a = best_rank_k(&t, 0, NormKind::Spectral, &cfg).unwrap();
        assert_eq!(a.approx.max_abs(), 0.0);
        assert!((a.err - op_norm(&t, NormKind::Spectral)).abs() < 1e-14);
        assert!(best_rank_k(&t, 3, NormKind::Spectral, &cfg).is_err());
    }

    #[test]
    fn rank_one_error_is_second_singular_value() {
        let a = best_rank_k(&ex25(), 1, NormKind::Spectral, &SearchConfig::default()).unwrap();
        assert!((a.err - 2.466206434192981f64.sqrt()).abs() < 1e-9);
        assert!((a.err - 1.570).abs() < 1e-3);
        assert!(a.exact);
    }

    #[test]
    fn zero_matrix_reconstructs_exactly() {
        assert_eq!(schmidt_reconstruct(&ComplexMatrix::zeros(3, 4)), 0.0);
    }

    #[test]
    fn defective_matrix_is_not_diagonalized() {
        assert!(diagonalize(&ex25()).unwrap().is_none());
        let d = diagonalize(&ComplexMatrix::diag_real(&[3.0, 2.0, 1.0])).unwrap().unwrap();
        assert!((d.condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![C64::new(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(0, 1, vec![]).is_err());
    }
}
