//! Finite-sequence kernel: non-increasing rearrangements, Lorentz and
//! approximation-space quasi-norms, and decay diagnostics against `1/n`.
//!
//! Indices are 1-based throughout (`k, n = 1, 2, …`). Infinite sequences are
//! represented by truncations; every norm reports the horizon it was computed
//! on together with the magnitude of its last term, so a reader can judge how
//! much of the tail was cut off.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operators::C64;

/// A positive extended real: a finite positive number or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_finite() && x > 0.0 {
            Ok(ExtReal::Finite(x))
        } else {
            Err(Error::domain(format!("exponent must be positive and finite, got {x}")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    /// `1/x`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            ExtReal::Finite(x) => 1.0 / x,
            ExtReal::Infinity => 0.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Infinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Ok(ExtReal::Infinity),
            other => {
                let x: f64 = other
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse exponent `{other}`")))?;
                ExtReal::finite(x)
            }
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => ExtReal::finite(x).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A finite sequence together with its non-increasing rearrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqSample {
    values: Vec<C64>,
    rearrangement: Vec<f64>,
}

impl SeqSample {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sequence must be non-empty"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("sequence entries must be finite"));
        }
        let rearrangement = rearranged_abs(&values);
        Ok(SeqSample { values, rearrangement })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `(f(1), f(2), …, f(n))`.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::from_real(&(1..=n).map(f).collect::<Vec<_>>())
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `s_1 ≥ s_2 ≥ … ≥ s_N ≥ 0`.
    pub fn rearrangement(&self) -> &[f64] {
        &self.rearrangement
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: C64) -> SeqSample {
        SeqSample::new(self.values.iter().map(|z| z * c).collect()).expect("scaling keeps entries finite")
    }

    /// Entrywise sum; the shorter sequence is padded with zeros.
    pub fn add(&self, other: &SeqSample) -> SeqSample {
        let n = self.len().max(other.len());
        let at = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_default();
        SeqSample::new((0..n).map(|i| at(&self.values, i) + at(&other.values, i)).collect())
            .expect("sum of finite sequences")
    }
}

/// Stable descending sort of `|values|`; ties keep their original order.
fn rearranged_abs(values: &[C64]) -> Vec<f64> {
    let mut abs: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    abs
}

/// Recomputes the rearrangement from the raw values. Idempotent.
pub fn rearrange(x: &SeqSample) -> SeqSample {
    SeqSample {
        values: x.values.clone(),
        rearrangement: rearranged_abs(&x.values),
    }
}

/// Lorentz exponents `(p, q)`, `0 < p < ∞`, `0 < q ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    pub p: f64,
    pub q: ExtReal,
}

impl LorentzParams {
    pub fn new(p: f64, q: ExtReal) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::domain(format!("Lorentz p must be in (0, ∞), got {p}")));
        }
        Ok(LorentzParams { p, q })
    }
}

/// Approximation-space exponents `(ρ, μ)`, `0 < ρ < ∞`, `0 < μ ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxSpaceParams {
    pub rho: f64,
    pub mu: ExtReal,
}

impl ApproxSpaceParams {
    pub fn new(rho: f64, mu: ExtReal) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::domain(format!("ρ must be in (0, ∞), got {rho}")));
        }
        Ok(ApproxSpaceParams { rho, mu })
    }
}

/// Constant `c_X ≥ 1` of a quasi-triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormSpec {
    pub c_x: f64,
}

impl QuasiNormSpec {
    pub fn new(c_x: f64) -> Result<Self> {
        if !(c_x >= 1.0 && c_x.is_finite()) {
            return Err(Error::domain(format!("quasi-triangle constant must be ≥ 1, got {c_x}")));
        }
        Ok(QuasiNormSpec { c_x })
    }

    pub fn admits(&self, sum: f64, a: f64, b: f64) -> bool {
        sum <= self.c_x * (a + b) * (1.0 + 1e-12)
    }
}

/// A truncated norm value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub horizon: usize,
    /// Magnitude of the last weighted term, a tail indicator.
    pub tail_last_term: f64,
}

/// ℓ_μ norm of `(w_n)`: `(Σ w_n^μ)^{1/μ}` or `sup w_n`. Terms are assumed
/// nonnegative.
pub(crate) fn lmu_norm(terms: impl IntoIterator<Item = f64>, mu: ExtReal) -> f64 {
    match mu {
        ExtReal::Infinity => terms.into_iter().fold(0.0, f64::max),
        ExtReal::Finite(m) => {
            let terms: Vec<f64> = terms.into_iter().collect();
            let big = terms.iter().copied().fold(0.0, f64::max);
            if big == 0.0 {
                return 0.0;
            }
            // factor out the largest term so large μ does not overflow
            let sum: f64 = terms.iter().map(|t| (t / big).powf(m)).sum();
            big * sum.powf(1.0 / m)
        }
    }
}

/// Lorentz quasi-norm `λ_{p,q}` over the available terms.
pub fn lorentz_norm(x: &SeqSample, lp: LorentzParams) -> NormValue {
    let exponent = 1.0 / lp.p - lp.q.recip();
    let terms: Vec<f64> = x
        .rearrangement()
        .iter()
        .enumerate()
        .map(|(i, s)| ((i + 1) as f64).powf(exponent) * s)
        .collect();
    NormValue {
        value: lmu_norm(terms.iter().copied(), lp.q),
        horizon: terms.len(),
        tail_last_term: *terms.last().expect("non-empty"),
    }
}

/// Checks that `seq` is nonnegative and non-increasing up to roundoff.
pub(crate) fn check_nonincreasing(seq: &[f64], what: &str) -> Result<()> {
    let scale = seq.iter().copied().fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    if let Some(i) = seq.iter().position(|a| !a.is_finite() || *a < -tol) {
        return Err(Error::domain(format!("{what}: entry {} is negative or not finite", i + 1)));
    }
    if let Some(i) = seq.windows(2).position(|w| w[1] > w[0] + tol) {
        return Err(Error::domain(format!(
            "{what} must be non-increasing, but entry {} exceeds entry {}",
            i + 2,
            i + 1
        )));
    }
    Ok(())
}

/// `‖(n^{ρ−1/μ} α_n)‖_{ℓ_μ}` over `n = 1..N`; for `μ = ∞` the weight is `n^ρ`
/// and the norm is the supremum.
pub fn approx_space_norm(alphas: &[f64], ap: ApproxSpaceParams) -> Result<NormValue> {
    if alphas.is_empty() {
        return Err(Error::domain("approximation-number table is empty"));
    }
    check_nonincreasing(alphas, "approximation numbers")?;
    let exponent = ap.rho - ap.mu.recip();
    let terms: Vec<f64> = alphas
        .iter()
        .enumerate()
        .map(|(i, a)| ((i + 1) as f64).powf(exponent) * a.max(0.0))
        .collect();
    Ok(NormValue {
        value: lmu_norm(terms.iter().copied(), ap.mu),
        horizon: terms.len(),
        tail_last_term: *terms.last().expect("non-empty"),
    })
}

/// `λ(x+y) / (λ(x)+λ(y))`, the quasi-triangle ratio for one pair.
pub fn quasi_triangle_ratio(x: &SeqSample, y: &SeqSample, lp: LorentzParams) -> f64 {
    let denom = lorentz_norm(x, lp).value + lorentz_norm(y, lp).value;
    if denom == 0.0 {
        return 0.0;
    }
    lorentz_norm(&x.add(y), lp).value / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    /// `n·s_n^q ≥ 1` along the whole second half of the horizon: `s_n^q`
    /// decays no faster than `1/n`, so the sequence is not in `ℓ_q`.
    SlowerThanHarmonic,
    /// `n·s_n^q = 1` along the second half.
    Boundary,
    /// `n·s_n^q < 1` and falling: ℓ_q-compatible decay.
    Compatible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub q: f64,
    pub horizon: usize,
    /// Smallest `N` such that `n·s_n^q ≥ 1` for every `n` in `[N, horizon]`.
    pub threshold_index: Option<usize>,
    /// `n·s_n^q` at the midpoint and at the last index.
    pub mid_statistic: f64,
    pub last_statistic: f64,
    pub verdict: DecayVerdict,
}

/// Compares `s_n^q` against `1/n` along the rearrangement of `x`.
pub fn decay_class(x: &SeqSample, q: f64, horizon: usize) -> Result<DecayReport> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::domain(format!("q must be positive, got {q}")));
    }
    if horizon < x.len() {
        return Err(Error::domain(format!(
            "horizon {horizon} is shorter than the sequence ({})",
            x.len()
        )));
    }
    let stat: Vec<f64> = x
        .rearrangement()
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1) as f64 * s.powf(q))
        .collect();
    let n = stat.len();
    let threshold_index = match stat.iter().rposition(|v| *v < 1.0) {
        None => Some(1),
        Some(i) if i + 1 < n => Some(i + 2),
        Some(_) => None,
    };
    let half = n / 2;
    let tail = &stat[half..];
    let last = stat[n - 1];
    let mid = stat[half];
    let verdict = if tail.iter().all(|v| (v - 1.0).abs() <= 1e-9) {
        DecayVerdict::Boundary
    } else if threshold_index.is_some_and(|t| t <= half.max(1)) {
        DecayVerdict::SlowerThanHarmonic
    } else if tail.iter().all(|v| *v < 1.0) && (last < mid || last == 0.0) {
        DecayVerdict::Compatible
    } else {
        DecayVerdict::Inconclusive
    };
    Ok(DecayReport {
        q,
        horizon,
        threshold_index,
        mid_statistic: mid,
        last_statistic: last,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rearrange_uses_moduli() {
        let x = SeqSample::new(vec![c(3.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(x.rearrangement(), &[3.0, 2.0, 1.0]);
        let z = SeqSample::from_real(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(z.rearrangement(), &[0.0, 0.0, 0.0]);
        assert!(SeqSample::new(vec![]).is_err());
    }

    #[test]
    fn rearrange_is_idempotent() {
        let x = SeqSample::from_real(&[0.5, -4.0, 2.0, 2.0, -0.5]).unwrap();
        let once = rearrange(&x);
        assert_eq!(rearrange(&once), once);
    }

    #[test]
    fn lorentz_spike_and_harmonic() {
        let spike = SeqSample::from_real(&[2.5, 0.0, 0.0, 0.0]).unwrap();
        for (p, q) in [(1.0, ExtReal::Finite(1.0)), (2.0, ExtReal::Finite(4.0)), (0.5, ExtReal::Infinity)] {
            let v = lorentz_norm(&spike, LorentzParams::new(p, q).unwrap()).value;
            assert!((v - 2.5).abs() < 1e-14);
        }
        let h = SeqSample::from_fn(100, |k| 1.0 / k as f64).unwrap();
        let v = lorentz_norm(&h, LorentzParams::new(1.0, ExtReal::Finite(1.0)).unwrap());
        let harmonic: f64 = (1..=100).map(|k| 1.0 / k as f64).sum();
        assert!((v.value - harmonic).abs() < 1e-12);
        assert_eq!(v.horizon, 100);
        assert!((v.tail_last_term - 0.01).abs() < 1e-15);
    }

    #[test]
    fn approx_norm_examples() {
        let spike = [1.0, 0.0, 0.0];
        for mu in [ExtReal::Finite(0.5), ExtReal::Finite(2.0), ExtReal::Infinity] {
            let v = approx_space_norm(&spike, ApproxSpaceParams::new(1.5, mu).unwrap()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-14);
        }
        let harm: Vec<f64> = (1..=50).map(|n| 1.0 / n as f64).collect();
        let v = approx_space_norm(&harm, ApproxSpaceParams::new(1.0, ExtReal::Infinity).unwrap()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn approx_norm_rejects_increasing() {
        let err = approx_space_norm(&[1.0, 2.0], ApproxSpaceParams::new(1.0, ExtReal::Finite(1.0)).unwrap());
        assert!(matches!(err, Err(Error::Domain(_))));
        assert!(approx_space_norm(&[1.0, -0.5], ApproxSpaceParams::new(1.0, ExtReal::Infinity).unwrap()).is_err());
    }

    #[test]
    fn decay_examples() {
        let geo = SeqSample::from_fn(1000, |n| 0.5f64.powi(n as i32)).unwrap();
        let r = decay_class(&geo, 1.0, 1000).unwrap();
        assert_eq!(r.verdict, DecayVerdict::Compatible);
        assert!(r.last_statistic < 1e-200);

        let harm = SeqSample::from_fn(1000, |n| 1.0 / n as f64).unwrap();
        let r = decay_class(&harm, 1.0, 1000).unwrap();
        assert_eq!(r.verdict, DecayVerdict::Boundary);

        let slow = SeqSample::from_fn(10_000, |n| 1.0 / ((n + 1) as f64).ln()).unwrap();
        let r = decay_class(&slow, 2.0, 10_000).unwrap();
        assert_eq!(r.verdict, DecayVerdict::SlowerThanHarmonic);
        assert_eq!(r.threshold_index, Some(1));

        assert!(decay_class(&slow, 2.0, 10).is_err());
    }

    #[test]
    fn ext_real_parsing() {
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::Infinity);
        assert_eq!("2.5".parse::<ExtReal>().unwrap(), ExtReal::Finite(2.5));
        assert!("-1".parse::<ExtReal>().is_err());
        assert!(ExtReal::Finite(1.0) < ExtReal::Infinity);
        let j = serde_json::to_string(&ExtReal::Infinity).unwrap();
        assert_eq!(serde_json::from_str::<ExtReal>(&j).unwrap(), ExtReal::Infinity);
    }

    #[test]
    fn lmu_norm_large_exponent_is_stable() {
        let v = lmu_norm([1e200, 1e200], ExtReal::Finite(4.0));
        assert!((v / 1e200 - 2f64.powf(0.25)).abs() < 1e-12);
    }
}
