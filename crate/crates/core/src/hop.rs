//! H-operator certification and numerical checks of the Markus inequality
//! chain
//!
//! ```text
//! δ_{n−1}(T) ≤ α_n(T) ≤ 2√2·C·|λ_n(T)| ≤ 8C(C+1)·δ_{n−1}(T)
//! ```
//!
//! and of the resulting equivalence of `ℓ_μ` membership for `|λ_n|`, `δ_n`
//! and `α_n`.
//!
//! The resolvent constant `C` is a supremum over the whole resolvent set and
//! cannot be computed exactly. A certificate therefore carries two numbers:
//! a sampled lower estimate of `sup |Im λ|·‖(T − λI)⁻¹‖` over a grid, and,
//! when `T = V Λ V⁻¹` is diagonalizable with real `Λ`, the analytic upper
//! bound `κ(V)`. Inequality checks use the upper bound whenever it exists.
//! All resolvent norms are spectral norms.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operators::{self, matrix_norm, op_norm, ComplexMatrix, NormKind, C64};
use crate::seqspace::{lmu_norm, ExtReal};
use crate::snumbers::SNumberTable;

pub const DEFAULT_TOL_REAL_SPECTRUM: f64 = 1e-8;

/// Where the resolvent is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Points across `[min Re λ_i − ‖T‖, max Re λ_i + ‖T‖]`.
    pub re_points: usize,
    /// Log-spaced points for `|Im λ|`, mirrored to both half-planes.
    pub im_points: usize,
    /// Smallest `|Im λ|`, relative to `‖T‖`.
    pub im_min: f64,
    /// Largest `|Im λ|`, relative to `‖T‖`.
    pub im_max: f64,
    /// Also sample directly above/below each eigenvalue's real part.
    pub include_eigen_re: bool,
    /// Pattern-search refinement around the best sample.
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            re_points: 64,
            im_points: 32,
            im_min: 1e-6,
            im_max: 1.0,
            include_eigen_re: true,
            refine: true,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.re_points < 2 || self.im_points < 2 {
            return Err(Error::domain("resolvent grid needs at least 2 points per axis"));
        }
        if !(self.im_min > 0.0 && self.im_max > self.im_min && self.im_max.is_finite()) {
            return Err(Error::domain(format!(
                "imaginary range must satisfy 0 < im_min < im_max, got [{}, {}]",
                self.im_min, self.im_max
            )));
        }
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Spectral norm of `(T − zI)⁻¹` from the Schur factor `R` of `T = QRQ*`.
///
/// Power iteration on `(R − z)⁻*(R − z)⁻¹` with triangular solves; falls back
/// to a dense singular value computation when the iteration has not settled.
struct Resolvent {
    r: DMatrix<C64>,
}

impl Resolvent {
    fn new(t: &ComplexMatrix) -> Self {
        let (_, r) = t.inner().clone().schur().unpack();
        Resolvent { r }
    }

    #[allow(clippy::needless_range_loop)]
    fn norm(&self, z: C64) -> Option<f64> {
        let n = self.r.nrows();
        let scale = self.r.iter().map(|v| v.norm()).fold(0.0, f64::max).max(z.norm()).max(1.0);
        if (0..n).any(|j| (self.r[(j, j)] - z).norm() <= f64::EPSILON * scale) {
            return None;
        }
        let mut x: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(1.0, 0.7 + 1.3 * j as f64) * (1.0 + 0.1 * (j % 3) as f64))
            .collect();
        normalize(&mut x);
        let mut est = 0.0f64;
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut y = vec![C64::new(0.0, 0.0); n];
        for _ in 0..40 {
            // (R − z) w = x
            for i in (0..n).rev() {
                let mut acc = x[i];
                for k in (i + 1)..n {
                    acc -= self.r[(i, k)] * w[k];
                }
                w[i] = acc / (self.r[(i, i)] - z);
            }
            // (R − z)* y = w
            for i in 0..n {
                let mut acc = w[i];
                for k in 0..i {
                    acc -= self.r[(k, i)].conj() * y[k];
                }
                y[i] = acc / (self.r[(i, i)] - z).conj();
            }
            let wn = vec_norm(&w);
            let next = wn.max(vec_norm(&y) / wn);
            let settled = (next - est).abs() <= 1e-12 * next;
            est = est.max(next);
            x.copy_from_slice(&y);
            normalize(&mut x);
            if settled {
                return Some(est);
            }
        }
        let shifted = DMatrix::from_fn(n, n, |i, j| if i == j { self.r[(i, j)] - z } else { self.r[(i, j)] });
        let smin = shifted.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
        (smin > 0.0).then(|| (1.0 / smin).max(est))
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = vec_norm(v);
    for z in v.iter_mut() {
        *z /= n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HVerdict {
    /// Real spectrum and a finite resolvent constant bound `κ(V)`.
    Certified,
    /// Real spectrum, but the matrix is (numerically) not diagonalizable, so
    /// no finite constant is certified.
    RealSpectrumUncertified,
    NotRealSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleGrid {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub re_points: usize,
    pub im_points: usize,
    pub samples: usize,
    pub discarded: usize,
    /// Location of the largest sample.
    pub argmax: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HCertificate {
    pub verdict: HVerdict,
    pub is_real_spectrum: bool,
    pub max_abs_imag: f64,
    pub tol_real_spectrum: f64,
    /// Sampled lower estimate of `sup |Im λ|·‖(T − λI)⁻¹‖`.
    pub c_estimate: f64,
    /// `κ(V)` for a unit-column eigenvector basis, when `T` is diagonalizable
    /// with real spectrum.
    pub c_upper: Option<f64>,
    pub sample_grid: SampleGrid,
    pub notes: Vec<String>,
}

impl HCertificate {
    /// The constant used in inequality checks: `c_upper` when present.
    pub fn c_for_bounds(&self) -> (f64, CSource) {
        match self.c_upper {
            Some(c) => (c, CSource::Upper),
            None => (self.c_estimate, CSource::Estimate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CSource {
    Upper,
    Estimate,
}

/// Certifies (or refutes) the H-operator property of a square matrix.
pub fn certify_h(t: &ComplexMatrix, tol_real: f64, grid: &GridSpec, exec: Exec) -> Result<HCertificate> {
    if !t.is_square() {
        return Err(Error::domain(format!(
            "H-operator certification needs a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    grid.validate()?;
    let mut notes = Vec::new();
    let ev = operators::eigenvalues(t)?;
    let tnorm = op_norm(t, NormKind::Spectral);
    let scale = if tnorm > 0.0 { tnorm } else { 1.0 };
    let max_abs_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let is_real_spectrum = max_abs_imag <= tol_real * scale;

    let re_lo = ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min) - scale;
    let re_hi = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + scale;
    let mut res = linspace(re_lo, re_hi, grid.re_points);
    if grid.include_eigen_re {
        res.extend(ev.iter().map(|z| z.re));
    }
    let ims = logspace(grid.im_min * scale, grid.im_max * scale, grid.im_points);
    let points: Vec<C64> = res
        .iter()
        .flat_map(|&a| ims.iter().flat_map(move |&b| [C64::new(a, b), C64::new(a, -b)]))
        .collect();

    let resolvent = Resolvent::new(t);
    let values = exec.map(&points, |&z| resolvent.norm(z).map(|r| z.im.abs() * r));
    let discarded = values.iter().filter(|v| v.is_none()).count();
    if discarded > 0 {
        notes.push(format!("{discarded} grid samples hit a singular T − λI and were discarded"));
    }
    let mut best = (C64::new(0.0, 0.0), f64::NEG_INFINITY);
    for (z, v) in points.iter().zip(&values) {
        if let Some(v) = v {
            if *v > best.1 {
                best = (*z, *v);
            }
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return Err(Error::domain("every resolvent sample was singular"));
    }
    if grid.refine {
        let refined = refine(&resolvent, best, (re_hi - re_lo) / (grid.re_points - 1) as f64, &ims);
        if refined.1 > best.1 {
            best = refined;
        }
    }

    let c_upper = if is_real_spectrum {
        match operators::diagonalize(t)? {
            Some(d) => Some(d.condition),
            None => {
                notes.push("eigenvector basis numerically singular: no finite resolvent constant certified".into());
                None
            }
        }
    } else {
        None
    };
    let verdict = match (is_real_spectrum, c_upper) {
        (false, _) => HVerdict::NotRealSpectrum,
        (true, Some(_)) => HVerdict::Certified,
        (true, None) => HVerdict::RealSpectrumUncertified,
    };
    Ok(HCertificate {
        verdict,
        is_real_spectrum,
        max_abs_imag,
        tol_real_spectrum: tol_real,
        c_estimate: best.1,
        c_upper,
        sample_grid: SampleGrid {
            re_range: (re_lo, re_hi),
            im_range: (grid.im_min * scale, grid.im_max * scale),
            re_points: grid.re_points,
            im_points: grid.im_points,
            samples: points.len(),
            discarded,
            argmax: (best.0.re, best.0.im),
        },
        notes,
    })
}

/// Compass search in `(Re λ, log|Im λ|)` around the best grid sample, never
/// crossing the real axis.
fn refine(res: &Resolvent, start: (C64, f64), re_step: f64, ims: &[f64]) -> (C64, f64) {
    let sign = start.0.im.signum();
    let log_step = if ims.len() > 1 { (ims[1] / ims[0]).ln() } else { 1.0 };
    let mut x = start.0.re;
    let mut ly = start.0.im.abs().ln();
    let mut best = start.1;
    let (mut hx, mut hy) = (re_step / 2.0, log_step / 2.0);
    // stay inside the sampled |Im λ| range; below it the solve is dominated
    // by Schur roundoff
    let (ly_lo, ly_hi) = (ims[0].ln(), ims[ims.len() - 1].ln());
    let eval = |x: f64, ly: f64| {
        if ly < ly_lo || ly > ly_hi {
            return None;
        }
        let b = ly.exp();
        res.norm(C64::new(x, sign * b)).map(|r| b * r)
    };
    for _ in 0..60 {
        let mut improved = false;
        for (dx, dy) in [(hx, 0.0), (-hx, 0.0), (0.0, hy), (0.0, -hy)] {
            if let Some(v) = eval(x + dx, ly + dy) {
                if v > best {
                    best = v;
                    x += dx;
                    ly += dy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            hx /= 2.0;
            hy /= 2.0;
            if hx < 1e-12 * re_step.max(1e-300) && hy < 1e-9 {
                break;
            }
        }
    }
    (C64::new(x, sign * ly.exp()), best)
}

/// One index of the Markus chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkusRecord {
    pub n: usize,
    pub delta_prev: f64,
    pub alpha: f64,
    pub abs_lambda: f64,
    /// `α_n − δ_{n−1}`.
    pub slack_left: f64,
    /// `2√2·C·|λ_n| − α_n`.
    pub slack_middle: f64,
    /// `8C(C+1)·δ_{n−1} − 2√2·C·|λ_n|`.
    pub slack_right: f64,
    /// Sign of `α_n − |λ_n|`: `1`, `-1` or `0` (within `1e-10·‖T‖`).
    pub alpha_vs_lambda: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkusReport {
    pub c: f64,
    pub c_source: CSource,
    pub h_certified: bool,
    pub table_exact: bool,
    /// Slacks are divided by this (`‖T‖`, or 1 for the zero matrix).
    pub scale: f64,
    pub tolerance: f64,
    pub records: Vec<MarkusRecord>,
    pub min_relative_slack: f64,
    pub verdict: bool,
    pub notes: Vec<String>,
}

pub const MARKUS_TOLERANCE: f64 = 1e-8;

/// Evaluates the three inequalities of the Markus chain for every index of
/// `table`, with `C` taken from the certificate's upper bound when present.
pub fn markus_verify(t: &ComplexMatrix, cert: &HCertificate, table: &SNumberTable) -> Result<MarkusReport> {
    if !cert.is_real_spectrum {
        return Err(Error::domain(format!(
            "not an H-operator: spectrum is not real (max |Im λ| = {:e})",
            cert.max_abs_imag
        )));
    }
    if table.abs_eigen.len() != table.n_max {
        return Err(Error::domain("s-number table lacks eigenvalue moduli"));
    }
    let mut notes = Vec::new();
    let (c, c_source) = cert.c_for_bounds();
    let h_certified = cert.verdict == HVerdict::Certified;
    if !h_certified {
        notes.push(format!(
            "not certified H with a finite constant; chain evaluated with the sampled C = {c:e}"
        ));
    }
    let table_exact = table.is_exact();
    if !table_exact {
        notes.push("table holds upper bounds; slacks are one-sided".into());
    }
    let tn = op_norm(t, NormKind::Spectral);
    let scale = if tn > 0.0 { tn } else { 1.0 };
    let mid = 2.0 * 2f64.sqrt() * c;
    let right = 8.0 * c * (c + 1.0);
    let records: Vec<MarkusRecord> = (0..table.n_max)
        .map(|i| {
            let (d, a, l) = (table.delta[i], table.alpha[i], table.abs_eigen[i]);
            let diff = a - l;
            MarkusRecord {
                n: i + 1,
                delta_prev: d,
                alpha: a,
                abs_lambda: l,
                slack_left: a - d,
                slack_middle: mid * l - a,
                slack_right: right * d - mid * l,
                alpha_vs_lambda: if diff.abs() <= 1e-10 * scale {
                    0
                } else if diff > 0.0 {
                    1
                } else {
                    -1
                },
            }
        })
        .collect();
    let min_relative_slack = records
        .iter()
        .flat_map(|r| [r.slack_left, r.slack_middle, r.slack_right])
        .map(|s| s / scale)
        .fold(f64::INFINITY, f64::min);
    Ok(MarkusReport {
        c,
        c_source,
        h_certified,
        table_exact,
        scale,
        tolerance: MARKUS_TOLERANCE,
        verdict: min_relative_slack >= -MARKUS_TOLERANCE,
        min_relative_slack,
        records,
        notes,
    })
}

/// A family of operators indexed by truncation size.
#[derive(Debug, Clone)]
pub enum OperatorFamily {
    /// `diag(d_1, d_2, …)` with real entries, truncated to its first `N`.
    Diagonal(Vec<f64>),
    /// Leading `N×N` principal sections of a dense square matrix.
    Sections(ComplexMatrix),
}

impl OperatorFamily {
    fn dim(&self) -> usize {
        match self {
            OperatorFamily::Diagonal(d) => d.len(),
            OperatorFamily::Sections(t) => t.rows(),
        }
    }

    /// `(|λ_n|, α_n, δ_{n−1})` for `n = 1..N` of the `N`-th member.
    fn sequences(&self, n: usize) -> Result<[Vec<f64>; 3]> {
        match self {
            OperatorFamily::Diagonal(d) => {
                // real diagonal: eigenvalues are the entries, singular values their moduli
                let mut lam: Vec<f64> = d[..n].iter().map(|x| x.abs()).collect();
                lam.sort_by(|a, b| b.total_cmp(a));
                let s = lam.clone();
                Ok([lam, s.clone(), s])
            }
            OperatorFamily::Sections(t) => {
                let sec = ComplexMatrix::from_inner(t.inner().view((0, 0), (n, n)).into_owned());
                let tab = SNumberTable::spectral(&sec)?;
                Ok([tab.abs_eigen, tab.alpha, tab.delta])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub horizon: usize,
    pub norm_lambda: f64,
    pub norm_alpha: f64,
    pub norm_delta: f64,
    /// Largest pairwise ratio among the three norms (1 when all vanish).
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub mu: ExtReal,
    pub c: f64,
    /// `8C(C+1)`.
    pub ratio_bound: f64,
    pub rows: Vec<CorollaryRow>,
    pub within_bound: bool,
    /// Relative growth of each norm over the last horizon step
    /// (`λ`, `α`, `δ`).
    pub last_growth: [f64; 3],
    /// All three norms moved by less than `1e-6` relative over the last step.
    pub saturated: bool,
}

/// `ℓ_μ` partial norms of `|λ_n|`, `α_n`, `δ_{n−1}` across growing members of
/// a family, and their mutual ratios.
pub fn corollary_equivalence(
    family: &OperatorFamily,
    mu: ExtReal,
    horizons: &[usize],
    c: f64,
) -> Result<CorollaryReport> {
    if horizons.is_empty() || horizons.iter().any(|&h| h == 0 || h > family.dim()) {
        return Err(Error::domain(format!(
            "horizons must lie in 1..={}",
            family.dim()
        )));
    }
    if c.is_nan() || c < 1.0 - 1e-6 {
        return Err(Error::domain(format!("resolvent constant must be ≥ 1, got {c}")));
    }
    let ratio_bound = 8.0 * c * (c + 1.0);
    let mut rows = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let [lam, alpha, delta] = family.sequences(h)?;
        let norms = [lam, alpha, delta].map(|s| lmu_norm(s, mu));
        let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = norms.iter().copied().fold(0.0, f64::max);
        let max_ratio = if hi == 0.0 { 1.0 } else if lo == 0.0 { f64::INFINITY } else { hi / lo };
        rows.push(CorollaryRow {
            horizon: h,
            norm_lambda: norms[0],
            norm_alpha: norms[1],
            norm_delta: norms[2],
            max_ratio,
        });
    }
    let growth = |a: f64, b: f64| if a == 0.0 { 0.0 } else { b / a - 1.0 };
    let last_growth = match rows.len() {
        1 => [0.0; 3],
        k => {
            let (p, q) = (&rows[k - 2], &rows[k - 1]);
            [
                growth(p.norm_lambda, q.norm_lambda),
                growth(p.norm_alpha, q.norm_alpha),
                growth(p.norm_delta, q.norm_delta),
            ]
        }
    };
    Ok(CorollaryReport {
        mu,
        c,
        ratio_bound,
        within_bound: rows.iter().all(|r| r.max_ratio <= ratio_bound),
        saturated: last_growth.iter().all(|g| g.abs() < 1e-6),
        last_growth,
        rows,
    })
}

/// `|Im λ|·‖(T − λI)⁻¹‖` at a single point; `None` on the spectrum.
pub fn resolvent_weight(t: &ComplexMatrix, z: C64) -> Result<Option<f64>> {
    if !t.is_square() {
        return Err(Error::domain("resolvent needs a square matrix"));
    }
    let shifted = t.inner() - DMatrix::<C64>::identity(t.rows(), t.rows()) * z;
    let smin = shifted.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= f64::EPSILON * matrix_norm(t.inner(), NormKind::Spectral).max(z.norm()) {
        return Ok(None);
    }
    Ok(Some(z.im.abs() / smin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex25() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[1.0, 1.0, 1.0]])
    }

    #[test]
    fn real_diagonal_has_unit_constant() {
        let t = ComplexMatrix::diag_real(&[3.0, -1.0, 0.5, 2.0]);
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
        assert_eq!(cert.verdict, HVerdict::Certified);
        assert!((cert.c_estimate - 1.0).abs() < 1e-6, "{}", cert.c_estimate);
        assert!((cert.c_upper.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_like_matrix_is_not_h() {
        let t = ComplexMatrix::from_real_rows(&[&[2.0, -3.0], &[3.0, 2.0]]);
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
        assert!(!cert.is_real_spectrum);
        assert_eq!(cert.verdict, HVerdict::NotRealSpectrum);
        assert!((cert.max_abs_imag - 3.0).abs() < 1e-10);
        let tab = SNumberTable::spectral(&t).unwrap();
        assert!(matches!(markus_verify(&t, &cert, &tab), Err(Error::Domain(_))));
    }

    #[test]
    fn defective_fixture_is_uncertified_and_incomparable() {
        let t = ex25();
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
        assert_eq!(cert.verdict, HVerdict::RealSpectrumUncertified);
        assert!(cert.c_upper.is_none());
        // Jordan block at 2: the weighted resolvent blows up as Im λ → 0
        assert!(cert.c_estimate > 1e3);
        let rep = markus_verify(&t, &cert, &SNumberTable::spectral(&t).unwrap()).unwrap();
        assert!(!rep.h_certified);
        assert_eq!(rep.c_source, CSource::Estimate);
        assert_eq!(rep.records[0].alpha_vs_lambda, 1);
        assert_eq!(rep.records[1].alpha_vs_lambda, -1);
        assert_eq!(rep.records[2].alpha_vs_lambda, -1);
    }

    #[test]
    fn diagonal_chain_has_nonnegative_slack() {
        let t = ComplexMatrix::diag_real(&[3.0, 2.0, 1.0]);
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
        let rep = markus_verify(&t, &cert, &SNumberTable::spectral(&t).unwrap()).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.c, 1.0);
        for (r, d) in rep.records.iter().zip([3.0, 2.0, 1.0]) {
            assert!(r.slack_left.abs() < 1e-12);
            assert!((r.slack_middle - (2.0 * 2f64.sqrt() - 1.0) * d).abs() < 1e-12);
            assert!((r.slack_right - (16.0 - 2.0 * 2f64.sqrt()) * d).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_resolvent_matches_dense() {
        let t = ComplexMatrix::from_real_rows(&[
            &[1.0, 4.0, 0.0, 2.0],
            &[0.0, 2.0, 1.0, 0.0],
            &[0.5, 0.0, -1.0, 3.0],
            &[0.0, 1.0, 0.0, 0.5],
        ]);
        let r = Resolvent::new(&t);
        for z in [C64::new(0.3, 0.2), C64::new(-2.0, 1e-3), C64::new(5.0, -4.0), C64::new(1.0, 1e-6)] {
            let fast = r.norm(z).unwrap() * z.im.abs();
            let dense = resolvent_weight(&t, z).unwrap().unwrap();
            assert!((fast - dense).abs() <= 1e-9 * dense, "{z}: {fast} vs {dense}");
        }
    }

    #[test]
    fn non_square_and_bad_grid() {
        let g = GridSpec::default();
        assert!(certify_h(&ComplexMatrix::zeros(2, 3), 1e-8, &g, Exec::Sequential).is_err());
        let bad = GridSpec { im_min: 2.0, ..g };
        assert!(certify_h(&ComplexMatrix::identity(2), 1e-8, &bad, Exec::Sequential).is_err());
    }

    #[test]
    fn zero_operator_corollary() {
        let rep = corollary_equivalence(&OperatorFamily::Diagonal(vec![0.0; 8]), ExtReal::Finite(1.0), &[4, 8], 1.0)
            .unwrap();
        assert!(rep.rows.iter().all(|r| r.norm_lambda == 0.0 && r.max_ratio == 1.0));
        assert!(rep.within_bound);
    }

    #[test]
    fn geometric_diagonal_corollary_saturates() {
        let d: Vec<f64> = (1..=64).map(|n| 0.5f64.powi(n)).collect();
        let rep = corollary_equivalence(&OperatorFamily::Diagonal(d.clone()), ExtReal::Finite(1.0), &[16, 32, 64], 1.0)
            .unwrap();
        assert!(rep.within_bound);
        assert_eq!(rep.ratio_bound, 16.0);
        assert!(rep.saturated);
        let direct: f64 = d.iter().sum();
        assert!((rep.rows[2].norm_lambda - direct).abs() < 1e-14);

        // the dense path agrees on the same operator
        let dense = corollary_equivalence(
            &OperatorFamily::Sections(ComplexMatrix::diag_real(&d[..16])),
            ExtReal::Finite(1.0),
            &[8, 16],
            1.0,
        )
        .unwrap();
        assert!((dense.rows[1].norm_alpha - rep.rows[0].norm_alpha).abs() < 1e-12);
        assert!(dense.within_bound);
    }
}
