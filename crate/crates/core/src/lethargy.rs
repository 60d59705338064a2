//! Operators with prescribed Kolmogorov widths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{singular_values, ComplexMatrix};

/// Strictly decreasing positive targets `d_0 > d_1 > … > d_{N−1}`;
/// `d_N` is taken as 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LethargyTarget {
    d: Vec<f64>,
}

impl LethargyTarget {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::domain("width target is empty"));
        }
        if let Some(i) = d.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::domain(format!("width target d_{i} must be positive and finite")));
        }
        if let Some(i) = d.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::domain(format!(
                "width target must be strictly decreasing: d_{} = {} ≥ d_{} = {}",
                i + 1,
                d[i + 1],
                i,
                d[i]
            )));
        }
        Ok(LethargyTarget { d })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Summability of the coefficients of a kernel operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelOperatorSpec {
    pub coefficients: Vec<f64>,
    pub partial_sum: f64,
    /// Fitted `β` in `d_n ≈ n^{−β}` over the last half of the horizon.
    pub tail_exponent: f64,
    /// Largest consecutive ratio over the last half.
    pub tail_ratio: f64,
    pub verdict: Summability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Summability {
    /// Tail decays faster than `n^{−1.05}` (geometric tails included: their
    /// log-log slope is steep).
    Summable,
    /// Tail decays like `n^{−β}` with `β ≤ 1.05`: the kernel condition is
    /// not met by the diagonal construction.
    DivergentWithinHorizon,
    /// Fewer than four terms; no tail to fit.
    TooShort,
}

impl KernelOperatorSpec {
    pub fn diagnose(coefficients: &[f64]) -> Self {
        let a: Vec<f64> = coefficients.iter().map(|x| x.abs()).collect();
        let partial_sum = a.iter().sum();
        let n = a.len();
        if n < 4 {
            return KernelOperatorSpec {
                coefficients: a,
                partial_sum,
                tail_exponent: f64::NAN,
                tail_ratio: f64::NAN,
                verdict: Summability::TooShort,
            };
        }
        let tail: Vec<(f64, f64)> = (n / 2..n)
            .filter(|&i| a[i] > 0.0)
            .map(|i| (((i + 1) as f64).ln(), a[i].ln()))
            .collect();
        let slope = {
            let k = tail.len() as f64;
            let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
            let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
            let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        };
        let tail_ratio = (n / 2..n - 1)
            .map(|i| a[i + 1] / a[i])
            .fold(0.0, f64::max);
        let tail_exponent = -slope;
        let verdict = if tail_exponent > 1.05 {
            Summability::Summable
        } else {
            Summability::DivergentWithinHorizon
        };
        KernelOperatorSpec {
            coefficients: a,
            partial_sum,
            tail_exponent,
            tail_ratio,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrescribedWidths {
    #[serde(skip)]
    pub matrix: ComplexMatrix,
    pub target: Vec<f64>,
    /// `δ_n = s_{n+1}` for `n = 0..N−1`.
    pub widths: Vec<f64>,
    /// `max |δ_n − d_n| / d_n`.
    pub max_relative_error: f64,
    pub kernel: KernelOperatorSpec,
}

/// `diag(d_0, …, d_{N−1})`, whose spectral-norm widths are exactly `d_n`.
pub fn build_prescribed_widths(target: &LethargyTarget) -> PrescribedWidths {
    let d = target.values();
    let matrix = ComplexMatrix::diag_real(d);
    let widths = singular_values(&matrix);
    let max_relative_error = widths
        .iter()
        .zip(d)
        .map(|(w, x)| (w - x).abs() / x)
        .fold(0.0, f64::max);
    PrescribedWidths {
        kernel: KernelOperatorSpec::diagnose(d),
        matrix,
        target: d.to_vec(),
        widths,
        max_relative_error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorRecord {
    pub n: usize,
    pub target: f64,
    pub delta: f64,
    /// `α_{n+1}`.
    pub alpha_next: f64,
    /// `δ_n − d_n`.
    pub slack_floor: f64,
    /// `α_{n+1} − δ_n`.
    pub slack_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthFloorReport {
    pub records: Vec<FloorRecord>,
    pub min_slack_floor: f64,
    pub min_slack_order: f64,
    /// First `n` with `δ_n < d_n` beyond tolerance.
    pub first_violation: Option<usize>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `α_{n+1}(T) ≥ δ_n(T) ≥ d_n` for `n = 0..N−1` under the spectral
/// norm.
pub fn verify_width_floor(t: &ComplexMatrix, target: &LethargyTarget) -> Result<WidthFloorReport> {
    let d = target.values();
    if d.len() > t.min_dim() {
        return Err(Error::domain(format!(
            "target has {} widths but a {}x{} operator has at most {}",
            d.len(),
            t.rows(),
            t.cols(),
            t.min_dim()
        )));
    }
    let s = singular_values(t);
    let tolerance = 1e-10 * d[0].max(s[0]);
    let records: Vec<FloorRecord> = d
        .iter()
        .enumerate()
        .map(|(n, &target)| {
            // spectral norm: δ_n = s_{n+1} = α_{n+1}
            let delta = s[n];
            let alpha_next = s[n];
            FloorRecord {
                n,
                target,
                delta,
                alpha_next,
                slack_floor: delta - target,
                slack_order: alpha_next - delta,
            }
        })
        .collect();
    let first_violation = records.iter().find(|r| r.slack_floor < -tolerance).map(|r| r.n);
    let min = |f: fn(&FloorRecord) -> f64| records.iter().map(f).fold(f64::INFINITY, f64::min);
    let min_slack_floor = min(|r| r.slack_floor);
    let min_slack_order = min(|r| r.slack_order);
    Ok(WidthFloorReport {
        pass: first_violation.is_none() && min_slack_order >= -tolerance,
        records,
        min_slack_floor,
        min_slack_order,
        first_violation,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_target() {
        let t = LethargyTarget::new(vec![3.0, 2.0, 1.0]).unwrap();
        let b = build_prescribed_widths(&t);
        assert_eq!(b.widths, vec![3.0, 2.0, 1.0]);
        let r = verify_width_floor(&b.matrix, &t).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_slack_floor, 0.0);
    }

    #[test]
    fn target_validation() {
        assert!(LethargyTarget::new(vec![]).is_err());
        assert!(LethargyTarget::new(vec![1.0, 1.0]).is_err());
        assert!(LethargyTarget::new(vec![1.0, 2.0]).is_err());
        assert!(LethargyTarget::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn summability_verdicts() {
        let harmonic = LethargyTarget::from_fn(64, |n| 1.0 / (n + 1) as f64).unwrap();
        assert_eq!(build_prescribed_widths(&harmonic).kernel.verdict, Summability::DivergentWithinHorizon);
        let geometric = LethargyTarget::from_fn(32, |n| 2f64.powi(-(n as i32))).unwrap();
        assert_eq!(build_prescribed_widths(&geometric).kernel.verdict, Summability::Summable);
        let square = LethargyTarget::from_fn(64, |n| 1.0 / ((n + 1) * (n + 1)) as f64).unwrap();
        assert_eq!(build_prescribed_widths(&square).kernel.verdict, Summability::Summable);
    }

    #[test]
    fn impossible_target_and_dims() {
        let t = ComplexMatrix::diag_real(&[1.0, 0.5]);
        let r = verify_width_floor(&t, &LethargyTarget::new(vec![2.0, 0.1]).unwrap()).unwrap();
        assert_eq!(r.first_violation, Some(0));
        assert!(!r.pass);
        assert!(verify_width_floor(&t, &LethargyTarget::new(vec![3.0, 2.0, 1.0]).unwrap()).is_err());
    }
}
