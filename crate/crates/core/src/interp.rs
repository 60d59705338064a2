//! Real interpolation between sequence spaces `(ℓ_r, ℓ_s)`: the K-functional,
//! `(θ, p)` interpolation norms by quadrature in `log t`, the embedding in the
//! second index, the Lorentz identification of interpolation spaces, and a
//! Jackson/Bernstein scan for the n-term scheme in `ℓ_∞`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::seqspace::{approx_space_norm, lmu_norm, lorentz_norm, ApproxSpaceParams, ExtReal, LorentzParams, SeqSample};

/// `(θ, p)` with `0 < θ < 1`, `1 ≤ p ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpParams {
    pub theta: f64,
    pub p: ExtReal,
}

impl InterpParams {
    pub fn new(theta: f64, p: ExtReal) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::domain(format!("θ must lie in (0, 1), got {theta}")));
        }
        if p.as_f64() < 1.0 {
            return Err(Error::domain(format!("interpolation index must be ≥ 1, got {p}")));
        }
        Ok(InterpParams { theta, p })
    }
}

/// The couple `(ℓ_r, ℓ_s)`, `1 ≤ r, s ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupleSpec {
    pub r: ExtReal,
    pub s: ExtReal,
}

impl CoupleSpec {
    pub fn new(r: ExtReal, s: ExtReal) -> Result<Self> {
        if r.as_f64() < 1.0 || s.as_f64() < 1.0 {
            return Err(Error::domain(format!("couple exponents must be ≥ 1, got ({r}, {s})")));
        }
        Ok(CoupleSpec { r, s })
    }

    pub fn l1_linf() -> Self {
        CoupleSpec {
            r: ExtReal::Finite(1.0),
            s: ExtReal::Infinity,
        }
    }

    /// `1/p = (1 − θ)/r + θ/s`; `None` when `1/p = 0`.
    pub fn lorentz_p(&self, theta: f64) -> Option<f64> {
        let inv = (1.0 - theta) * self.r.recip() + theta * self.s.recip();
        (inv > 0.0).then(|| 1.0 / inv)
    }

    fn kind(&self) -> CoupleKind {
        match (self.r, self.s) {
            (ExtReal::Finite(1.0), ExtReal::Infinity) => CoupleKind::L1Linf,
            (ExtReal::Infinity, ExtReal::Finite(1.0)) => CoupleKind::LinfL1,
            _ => CoupleKind::General,
        }
    }
}

enum CoupleKind {
    L1Linf,
    LinfL1,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMethod {
    ClosedForm,
    ConvexSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KValue {
    pub value: f64,
    pub method: KMethod,
}

/// `ℓ_r` norm of nonnegative amplitudes.
fn amp_norm(x: &[f64], r: ExtReal) -> f64 {
    lmu_norm(x.iter().copied(), r)
}

/// `K(f, t; ℓ1, ℓ∞) = ∫_0^t f*(u) du` on the step function of the
/// rearrangement.
fn k_l1_linf(s: &[f64], t: f64) -> f64 {
    let whole = t.floor();
    let k = whole as usize;
    if k >= s.len() {
        return s.iter().sum();
    }
    s[..k].iter().sum::<f64>() + (t - whole) * s[k]
}

/// `K(f, t)` on the couple; closed form for `(ℓ1, ℓ∞)` and `(ℓ∞, ℓ1)`,
/// convex search otherwise.
pub fn k_functional(f: &SeqSample, t: f64, cs: CoupleSpec) -> Result<KValue> {
    check_t(t)?;
    let s = f.rearrangement();
    Ok(match cs.kind() {
        CoupleKind::L1Linf => KValue {
            value: k_l1_linf(s, t),
            method: KMethod::ClosedForm,
        },
        // K(f, t; X1, X0) = t·K(f, 1/t; X0, X1)
        CoupleKind::LinfL1 => KValue {
            value: t * k_l1_linf(s, 1.0 / t),
            method: KMethod::ClosedForm,
        },
        CoupleKind::General => KValue {
            value: split_search(s, t, cs),
            method: KMethod::ConvexSearch,
        },
    })
}

/// `K(f, t)` by convex search regardless of the couple.
pub fn k_functional_search(f: &SeqSample, t: f64, cs: CoupleSpec) -> Result<f64> {
    check_t(t)?;
    Ok(split_search(f.rearrangement(), t, cs))
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("K-functional needs t > 0, got {t}")));
    }
    Ok(())
}

/// Minimizes a convex function of one variable on `[lo, hi]` by golden
/// section; returns the smallest value seen (endpoints included).
fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = f(lo).min(f(hi));
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

/// `inf ‖m − a‖_r + t‖a‖_s` over `0 ≤ a ≤ m`, for amplitudes `m`.
///
/// Phases of `f` are carried by both parts, so only amplitudes matter. When
/// one side is `ℓ∞` the optimal split is a clipping at a common level and
/// the problem is one-dimensional and convex; otherwise projected gradient
/// descent with backtracking runs to `1e-8` relative stationarity.
fn split_search(m: &[f64], t: f64, cs: CoupleSpec) -> f64 {
    let top = m.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    match (cs.r, cs.s) {
        (r, ExtReal::Infinity) => golden_min(0.0, top, |c| {
            let rest: Vec<f64> = m.iter().map(|x| (x - c).max(0.0)).collect();
            amp_norm(&rest, r) + t * c
        }),
        (ExtReal::Infinity, s) => golden_min(0.0, top, |c| {
            let rest: Vec<f64> = m.iter().map(|x| (x - c).max(0.0)).collect();
            c + t * amp_norm(&rest, s)
        }),
        (ExtReal::Finite(r), ExtReal::Finite(s)) => box_descent(m, t, r, s),
    }
}

fn pnorm(x: &[f64], p: f64) -> f64 {
    amp_norm(x, ExtReal::Finite(p))
}

/// Gradient of `‖x‖_p` for `x ≥ 0`; zero at the origin.
fn pnorm_grad(x: &[f64], p: f64, out: &mut [f64]) {
    let n = pnorm(x, p);
    for (o, xi) in out.iter_mut().zip(x) {
        *o = if n == 0.0 {
            0.0
        } else if p == 1.0 {
            1.0
        } else {
            (xi / n).powf(p - 1.0)
        };
    }
}

fn box_descent(m: &[f64], t: f64, r: f64, s: f64) -> f64 {
    let obj = |a: &[f64]| {
        let rest: Vec<f64> = m.iter().zip(a).map(|(x, y)| (x - y).max(0.0)).collect();
        pnorm(&rest, r) + t * pnorm(a, s)
    };
    // the two trivial splits
    let mut best = pnorm(m, r).min(t * pnorm(m, s));
    // start near the asymptotically optimal split, inside the box
    let frac = if t >= 1.0 { 0.01 } else { 0.99 };
    let mut a: Vec<f64> = m.iter().map(|x| frac * x).collect();
    let mut val = obj(&a);
    best = best.min(val);
    let n = m.len();
    let (mut g0, mut g1) = (vec![0.0; n], vec![0.0; n]);
    let mut step = m.iter().copied().fold(0.0, f64::max);
    let mut quiet = 0;
    for _ in 0..20_000 {
        let rest: Vec<f64> = m.iter().zip(&a).map(|(x, y)| (x - y).max(0.0)).collect();
        pnorm_grad(&rest, r, &mut g0);
        pnorm_grad(&a, s, &mut g1);
        let grad: Vec<f64> = g0.iter().zip(&g1).map(|(u, v)| -u + t * v).collect();
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = a
                .iter()
                .zip(&grad)
                .zip(m)
                .map(|((ai, gi), mi)| (ai - step * gi).clamp(0.0, *mi))
                .collect();
            let moved: f64 = cand.iter().zip(&a).map(|(c, x)| (c - x) * (c - x)).sum();
            let cv = obj(&cand);
            if moved == 0.0 {
                break;
            }
            if cv <= val - 1e-4 * moved / step {
                let gain = val - cv;
                a = cand;
                val = cv;
                accepted = true;
                step *= 1.5;
                quiet = if gain <= 1e-12 * val { quiet + 1 } else { 0 };
                break;
            }
            step *= 0.5;
        }
        best = best.min(val);
        if !accepted || quiet >= 20 {
            break;
        }
    }
    best
}

/// `K(f, ·)` sampled on a geometric grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCurve {
    pub t_grid: Vec<f64>,
    pub k_values: Vec<f64>,
    pub methods: Vec<KMethod>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KCurveCheck {
    pub monotone: bool,
    pub concave: bool,
    pub bounded: bool,
}

impl KCurveCheck {
    pub fn all(&self) -> bool {
        self.monotone && self.concave && self.bounded
    }
}

impl KCurve {
    /// `t = 2^{j/m}` for `j = −J·m ..= J·m`.
    pub fn compute(f: &SeqSample, cs: CoupleSpec, quad: QuadSpec, exec: Exec) -> Result<Self> {
        let t_grid = quad.grid();
        let vals = exec.map(&t_grid, |&t| k_functional(f, t, cs));
        let vals: Vec<KValue> = vals.into_iter().collect::<Result<_>>()?;
        Ok(KCurve {
            t_grid,
            k_values: vals.iter().map(|v| v.value).collect(),
            methods: vals.iter().map(|v| v.method).collect(),
        })
    }

    /// Monotone, concave on the grid (midpoint test), and below
    /// `min(‖f‖_{X0}, t‖f‖_{X1})`, all up to `rel_tol`.
    pub fn check(&self, f: &SeqSample, cs: CoupleSpec, rel_tol: f64) -> KCurveCheck {
        let s = f.rearrangement();
        let (n0, n1) = (amp_norm(s, cs.r), amp_norm(s, cs.s));
        let tol = |v: f64| rel_tol * v.abs().max(f64::MIN_POSITIVE);
        let k = &self.k_values;
        let monotone = k.windows(2).all(|w| w[1] >= w[0] - tol(w[1]));
        let concave = (1..k.len().saturating_sub(1)).all(|i| {
            let (t0, t1, t2) = (self.t_grid[i - 1], self.t_grid[i], self.t_grid[i + 1]);
            let lam = (t1 - t0) / (t2 - t0);
            let chord = (1.0 - lam) * k[i - 1] + lam * k[i + 1];
            k[i] >= chord - tol(k[i]).max(tol(chord))
        });
        let bounded = self
            .t_grid
            .iter()
            .zip(k)
            .all(|(t, v)| *v <= n0.min(t * n1) + tol(n0.min(t * n1)));
        KCurveCheck {
            monotone,
            concave,
            bounded,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,K,method\n");
        for ((t, k), m) in self.t_grid.iter().zip(&self.k_values).zip(&self.methods) {
            let m = match m {
                KMethod::ClosedForm => "closed-form",
                KMethod::ConvexSearch => "convex-search",
            };
            out.push_str(&format!("{t:e},{k:e},{m}\n"));
        }
        out
    }
}

/// Quadrature grid `t = 2^{j/m}`, `|j| ≤ J·m`, trapezoid rule in `log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    /// `J`: the grid spans `2^{−J}..2^{J}`.
    pub j_max: u32,
    /// `m`: nodes per octave.
    pub per_octave: u32,
    /// Fraction of integrand mass in an end decade above which the
    /// truncation warning is raised.
    pub warn_fraction: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            j_max: 40,
            per_octave: 8,
            warn_fraction: 1e-6,
        }
    }
}

impl QuadSpec {
    pub fn doubled(self) -> Self {
        QuadSpec {
            per_octave: self.per_octave * 2,
            ..self
        }
    }

    fn grid(&self) -> Vec<f64> {
        let m = self.per_octave.max(1) as i64;
        let j = self.j_max as i64 * m;
        (-j..=j).map(|i| (i as f64 / m as f64).exp2()).collect()
    }

    fn log_step(&self) -> f64 {
        std::f64::consts::LN_2 / self.per_octave.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpNorm {
    pub value: f64,
    /// Share of the integrand (or of the sup, for `p = ∞`) carried by the
    /// first and last decade of the grid.
    pub low_decade_fraction: f64,
    pub high_decade_fraction: f64,
    pub truncation_warning: bool,
}

/// `‖f‖_{θ,p} = (∫ (t^{−θ} K(f,t))^p dt/t)^{1/p}` by trapezoid in `log t`, or
/// the grid maximum of `t^{−θ} K(f,t)` for `p = ∞`.
pub fn interp_norm(f: &SeqSample, ip: InterpParams, cs: CoupleSpec, quad: QuadSpec) -> Result<InterpNorm> {
    let t_grid = quad.grid();
    let mut w = Vec::with_capacity(t_grid.len());
    for &t in &t_grid {
        w.push(t.powf(-ip.theta) * k_functional(f, t, cs)?.value);
    }
    let decade = (std::f64::consts::LN_10 / quad.log_step()).round() as usize;
    let decade = decade.clamp(1, w.len());
    let n = w.len();
    match ip.p {
        ExtReal::Infinity => {
            let top = w.iter().copied().fold(0.0, f64::max);
            let lo = w[..decade].iter().copied().fold(0.0, f64::max);
            let hi = w[n - decade..].iter().copied().fold(0.0, f64::max);
            let (lf, hf) = if top > 0.0 { (lo / top, hi / top) } else { (0.0, 0.0) };
            Ok(InterpNorm {
                value: top,
                low_decade_fraction: lf,
                high_decade_fraction: hf,
                truncation_warning: lf.max(hf) > quad.warn_fraction.max(1e-3),
            })
        }
        ExtReal::Finite(p) => {
            let top = w.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return Ok(InterpNorm {
                    value: 0.0,
                    low_decade_fraction: 0.0,
                    high_decade_fraction: 0.0,
                    truncation_warning: false,
                });
            }
            let g: Vec<f64> = w.iter().map(|v| (v / top).powf(p)).collect();
            let h = quad.log_step();
            let trap = |xs: &[f64]| {
                if xs.len() < 2 {
                    return 0.0;
                }
                h * (xs.iter().sum::<f64>() - 0.5 * (xs[0] + xs[xs.len() - 1]))
            };
            let total = trap(&g);
            let lf = trap(&g[..decade]) / total;
            let hf = trap(&g[n - decade..]) / total;
            Ok(InterpNorm {
                value: top * total.powf(1.0 / p),
                low_decade_fraction: lf,
                high_decade_fraction: hf,
                truncation_warning: lf.max(hf) > quad.warn_fraction,
            })
        }
    }
}

/// Minimum and maximum of a set of ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn of(values: &[f64]) -> Self {
        Band {
            lo: values.iter().copied().fold(f64::INFINITY, f64::min),
            hi: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Multiplicative width `hi / lo`.
    pub fn width(&self) -> f64 {
        self.hi / self.lo
    }

    /// Relative change of the width from `self` to `other`.
    pub fn drift_to(&self, other: &Band) -> f64 {
        (other.width() - self.width()).abs() / self.width()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub theta: f64,
    pub mu1: ExtReal,
    pub mu2: ExtReal,
    pub samples: usize,
    /// `max ‖f‖_{θ,μ2} / ‖f‖_{θ,μ1}` over the corpus.
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Constant from the monotonicity/Hölder argument:
    /// `(θ μ1)^{(1/μ1)(1 − μ1/μ2)}`.
    pub proof_constant: f64,
    pub cap: f64,
    pub within_cap: bool,
    pub ratios: Vec<f64>,
}

/// Ratios `‖f‖_{θ,μ2} / ‖f‖_{θ,μ1}` over a corpus.
pub fn embedding_check(
    corpus: &[SeqSample],
    ip1: InterpParams,
    ip2: InterpParams,
    cs: CoupleSpec,
    quad: QuadSpec,
    cap: Option<f64>,
    exec: Exec,
) -> Result<EmbeddingReport> {
    if ip1.theta != ip2.theta {
        return Err(Error::domain(format!(
            "embedding needs a common θ, got {} and {}",
            ip1.theta, ip2.theta
        )));
    }
    if ip1.p > ip2.p {
        return Err(Error::domain(format!("need μ1 ≤ μ2, got {} > {}", ip1.p, ip2.p)));
    }
    if corpus.is_empty() {
        return Err(Error::domain("empty corpus"));
    }
    let theta = ip1.theta;
    let m1 = ip1.p.as_f64();
    let proof_constant = if ip1.p == ip2.p {
        1.0
    } else {
        let exponent = (1.0 / m1) * (1.0 - ip1.p.as_f64() * ip2.p.recip());
        (theta * m1).powf(exponent)
    };
    let cap = cap.unwrap_or(proof_constant);
    let ratios = exec.map(corpus, |f| -> Result<f64> {
        if ip1.p == ip2.p {
            return Ok(1.0);
        }
        let a = interp_norm(f, ip1, cs, quad)?.value;
        let b = interp_norm(f, ip2, cs, quad)?.value;
        Ok(if a == 0.0 { 0.0 } else { b / a })
    });
    let ratios: Vec<f64> = ratios.into_iter().collect::<Result<_>>()?;
    let band = Band::of(&ratios);
    Ok(EmbeddingReport {
        theta,
        mu1: ip1.p,
        mu2: ip2.p,
        samples: ratios.len(),
        max_ratio: band.hi,
        min_ratio: band.lo,
        proof_constant,
        cap,
        within_cap: band.hi <= cap * (1.0 + 1e-9),
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorentzIdReport {
    pub theta: f64,
    pub q: ExtReal,
    pub couple: CoupleSpec,
    /// `1/p = (1 − θ)/r + θ/s`.
    pub p: f64,
    pub samples: usize,
    /// Band of `‖f‖_{θ,q} / λ_{p,q}(f)`.
    pub band: Band,
    pub bounded: bool,
    pub ratios: Vec<f64>,
}

/// Compares the `(θ, q)` interpolation norm with the Lorentz `λ_{p,q}` norm
/// over a corpus.
pub fn lorentz_identification(
    corpus: &[SeqSample],
    ip: InterpParams,
    cs: CoupleSpec,
    quad: QuadSpec,
    exec: Exec,
) -> Result<LorentzIdReport> {
    let p = cs
        .lorentz_p(ip.theta)
        .ok_or_else(|| Error::domain("couple and θ give 1/p = 0"))?;
    if corpus.is_empty() {
        return Err(Error::domain("empty corpus"));
    }
    let lp = LorentzParams::new(p, ip.p)?;
    let ratios = exec.map(corpus, |f| -> Result<f64> {
        let a = interp_norm(f, ip, cs, quad)?.value;
        let b = lorentz_norm(f, lp).value;
        Ok(if b == 0.0 { f64::NAN } else { a / b })
    });
    let ratios: Vec<f64> = ratios
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| !r.is_nan())
        .collect();
    if ratios.is_empty() {
        return Err(Error::domain("corpus has only zero sequences"));
    }
    let band = Band::of(&ratios);
    Ok(LorentzIdReport {
        theta: ip.theta,
        q: ip.p,
        couple: cs,
        p,
        samples: ratios.len(),
        bounded: band.lo > 0.0 && band.hi.is_finite(),
        band,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacksonBernsteinReport {
    pub sigma: f64,
    /// The space `Y = X_μ^ρ` of the n-term scheme in `ℓ_∞`.
    pub y_params: ApproxSpaceParams,
    /// Smallest `C` with `E_n(f) ≤ C (n+1)^{−σ} ‖f‖_Y` corpus-wide.
    pub jackson_constant: f64,
    /// Largest `C` with `‖p‖_∞ ≥ C (n+1)^{−σ} ‖p‖_Y` over the `n`-term sample.
    pub bernstein_constant: f64,
    pub jackson_min_residual: f64,
    pub bernstein_min_residual: f64,
    /// Exponent at which both constants are most stable under doubling the
    /// index range, scanned on a `0.05` grid.
    pub r_exponent: f64,
    pub samples: usize,
    pub verdict: bool,
}

/// `(C_J, C_B)` for exponent `sigma`, over indices `n ≤ limit`.
fn jb_constants(
    jackson: &[(usize, f64, f64)],
    bernstein: &[(usize, f64, f64)],
    sigma: f64,
    limit: usize,
) -> (f64, f64) {
    let cj = jackson
        .iter()
        .filter(|(n, _, _)| *n <= limit)
        .map(|&(n, e, y)| if y > 0.0 { e * ((n + 1) as f64).powf(sigma) / y } else { 0.0 })
        .fold(0.0, f64::max);
    let cb = bernstein
        .iter()
        .filter(|(n, _, _)| *n <= limit)
        .map(|&(n, x, y)| x * ((n + 1) as f64).powf(sigma) / y)
        .fold(f64::INFINITY, f64::min);
    (cj, cb)
}

/// Jackson/Bernstein constants for the scheme `X = ℓ_∞`,
/// `A_n = {at most n nonzero coordinates}`, `Y = X_μ^ρ`.
///
/// Here `E_n(f) = dist(f, A_n) = s_{n+1}(f)`. The Jackson sample is the
/// corpus plus the profile `k^{−ρ}`; the Bernstein sample is every best `n`-term approximant of the
/// corpus together with the flat `n`-term vectors `(1, …, 1, 0, …)`.
pub fn jackson_bernstein_scan(corpus: &[SeqSample], sigma: f64, y: ApproxSpaceParams) -> Result<JacksonBernsteinReport> {
    if corpus.iter().all(|f| f.rearrangement()[0] == 0.0) {
        return Err(Error::domain("degenerate corpus: every sequence is zero"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("σ must be positive, got {sigma}")));
    }
    let mut jackson = Vec::new();
    let mut bernstein = Vec::new();
    let mut horizon = 0;
    for f in corpus {
        let s = f.rearrangement();
        horizon = horizon.max(s.len());
        if s[0] == 0.0 {
            continue;
        }
        let fy = approx_space_norm(s, y)?.value;
        for n in 0..s.len() {
            jackson.push((n, s.get(n).copied().unwrap_or(0.0), fy));
        }
        for n in 1..=s.len() {
            let head = &s[..n];
            if head[n - 1] == 0.0 {
                break;
            }
            bernstein.push((n, head[0], approx_space_norm(head, y)?.value));
        }
    }
    for n in 1..=horizon {
        bernstein.push((n, 1.0, approx_space_norm(&vec![1.0; n], y)?.value));
    }
    // extremal decay profile k^{−ρ}
    let probe: Vec<f64> = (1..=horizon).map(|k| (k as f64).powf(-y.rho)).collect();
    let probe_y = approx_space_norm(&probe, y)?.value;
    for n in 0..horizon {
        jackson.push((n, probe.get(n).copied().unwrap_or(0.0), probe_y));
    }
    let (cj, cb) = jb_constants(&jackson, &bernstein, sigma, usize::MAX);
    let jackson_min_residual = jackson
        .iter()
        .map(|&(n, e, fy)| cj * ((n + 1) as f64).powf(-sigma) * fy - e)
        .fold(f64::INFINITY, f64::min);
    let bernstein_min_residual = bernstein
        .iter()
        .map(|&(n, x, py)| x - cb * ((n + 1) as f64).powf(-sigma) * py)
        .fold(f64::INFINITY, f64::min);

    let half = (horizon / 2).max(1);
    let mut r_exponent = sigma;
    let mut best = f64::INFINITY;
    for i in 1..=((3.0 * y.rho.max(sigma)) / 0.05).round() as usize {
        let cand = i as f64 * 0.05;
        let (j_half, b_half) = jb_constants(&jackson, &bernstein, cand, half);
        let (j_full, b_full) = jb_constants(&jackson, &bernstein, cand, usize::MAX);
        let instability = (j_full / j_half).ln().abs() + (b_half / b_full).ln().abs();
        if instability < best - 1e-12 {
            best = instability;
            r_exponent = cand;
        }
    }
    let scale = jackson.iter().map(|j| j.1).fold(0.0, f64::max);
    Ok(JacksonBernsteinReport {
        sigma,
        y_params: y,
        jackson_constant: cj,
        bernstein_constant: cb,
        jackson_min_residual,
        bernstein_min_residual,
        r_exponent,
        samples: corpus.len(),
        verdict: cj.is_finite()
            && cj >= 0.0
            && cb.is_finite()
            && cb > 0.0
            && jackson_min_residual >= -1e-12 * scale
            && bernstein_min_residual >= -1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spike(c: f64) -> SeqSample {
        SeqSample::from_real(&[c, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn spike_k_is_min_one_t() {
        let cs = CoupleSpec::l1_linf();
        for t in [0.01, 0.5, 1.0, 3.0, 100.0] {
            let k = k_functional(&spike(1.0), t, cs).unwrap();
            assert!((k.value - t.min(1.0)).abs() < 1e-15);
            assert_eq!(k.method, KMethod::ClosedForm);
            let s = k_functional_search(&spike(1.0), t, cs).unwrap();
            assert!((s - t.min(1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn large_t_approaches_x0_norm() {
        let f = SeqSample::from_real(&[0.3, -2.0, 1.1, 0.4]).unwrap();
        let cs = CoupleSpec::new(ExtReal::Finite(2.0), ExtReal::Finite(1.0)).unwrap();
        let k = k_functional(&f, 1e6, cs).unwrap();
        let l2 = (0.09f64 + 4.0 + 1.21 + 0.16).sqrt();
        assert!((k.value - l2).abs() < 1e-8 * l2);
        assert_eq!(k.method, KMethod::ConvexSearch);
        let closed = k_functional(&f, 1e6, CoupleSpec::l1_linf()).unwrap();
        assert!((closed.value - 3.8).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_t_rejected() {
        assert!(k_functional(&spike(1.0), 0.0, CoupleSpec::l1_linf()).is_err());
        assert!(k_functional(&spike(1.0), -1.0, CoupleSpec::l1_linf()).is_err());
    }

    #[test]
    fn swapped_couple_closed_form_matches_search() {
        let f = SeqSample::from_real(&[0.3, -2.0, 1.1, 0.4, 0.9]).unwrap();
        let cs = CoupleSpec::new(ExtReal::Infinity, ExtReal::Finite(1.0)).unwrap();
        for t in [0.05, 0.3, 1.0, 2.5, 7.0] {
            let a = k_functional(&f, t, cs).unwrap().value;
            let b = k_functional_search(&f, t, cs).unwrap();
            assert!((a - b).abs() < 1e-9 * a, "{t}: {a} {b}");
        }
    }

    #[test]
    fn zero_sequence_norm_is_zero() {
        let z = SeqSample::from_real(&[0.0; 5]).unwrap();
        let ip = InterpParams::new(0.5, ExtReal::Finite(2.0)).unwrap();
        let v = interp_norm(&z, ip, CoupleSpec::l1_linf(), QuadSpec::default()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn spike_norm_matches_closed_integral() {
        // ∫ (t^{−θ} min(1,t))^p dt/t = 1/((1−θ)p) + 1/(θp)
        let theta = 0.3;
        let p = 2.0;
        let ip = InterpParams::new(theta, ExtReal::Finite(p)).unwrap();
        let exact = (1.0 / ((1.0 - theta) * p) + 1.0 / (theta * p)).powf(1.0 / p);
        let quad = QuadSpec { per_octave: 32, ..Default::default() };
        for c in [1.0, 2.0] {
            let v = interp_norm(&spike(c), ip, CoupleSpec::l1_linf(), quad).unwrap();
            assert!((v.value - c * exact).abs() < 1e-4 * c * exact, "{} vs {}", v.value, c * exact);
            assert!(!v.truncation_warning);
        }
        let sup = interp_norm(&spike(1.0), InterpParams::new(theta, ExtReal::Infinity).unwrap(), CoupleSpec::l1_linf(), quad)
            .unwrap();
        assert!((sup.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_grid_raises_truncation_warning() {
        let ip = InterpParams::new(0.5, ExtReal::Finite(1.0)).unwrap();
        let quad = QuadSpec { j_max: 3, ..Default::default() };
        let v = interp_norm(&spike(1.0), ip, CoupleSpec::l1_linf(), quad).unwrap();
        assert!(v.truncation_warning);
    }

    #[test]
    fn embedding_identity_and_mismatch() {
        let corpus = vec![spike(1.0), SeqSample::from_real(&[1.0, 0.5, 0.25]).unwrap()];
        let ip = InterpParams::new(0.5, ExtReal::Finite(2.0)).unwrap();
        let rep = embedding_check(&corpus, ip, ip, CoupleSpec::l1_linf(), QuadSpec::default(), None, Exec::Sequential)
            .unwrap();
        assert!(rep.ratios.iter().all(|r| *r == 1.0));
        let other = InterpParams::new(0.4, ExtReal::Finite(2.0)).unwrap();
        assert!(embedding_check(&corpus, ip, other, CoupleSpec::l1_linf(), QuadSpec::default(), None, Exec::Sequential)
            .is_err());
    }

    #[test]
    fn lorentz_identification_on_spikes_is_constant() {
        let corpus = vec![spike(1.0), spike(3.0), spike(0.2)];
        let ip = InterpParams::new(0.5, ExtReal::Finite(2.0)).unwrap();
        let rep = lorentz_identification(&corpus, ip, CoupleSpec::l1_linf(), QuadSpec::default(), Exec::Sequential)
            .unwrap();
        assert!((rep.p - 2.0).abs() < 1e-15);
        assert!(rep.band.width() - 1.0 < 1e-12);
    }

    #[test]
    fn jackson_bernstein_examples() {
        let y = ApproxSpaceParams::new(1.0, ExtReal::Infinity).unwrap();
        let rep = jackson_bernstein_scan(&[spike(1.0)], 1.0, y).unwrap();
        assert!(rep.verdict);

        let f = SeqSample::from_fn(40, |k| 1.0 / (k * k) as f64).unwrap();
        let rep = jackson_bernstein_scan(&[f], 1.0, y).unwrap();
        // E_n = 1/(n+1)², ‖f‖_Y = sup n·s_n = 1 → C_J = sup (n+1)^{-1} = 1
        assert!((rep.jackson_constant - 1.0).abs() < 1e-12);
        assert!(rep.verdict);
        assert!((rep.r_exponent - 1.0).abs() <= 0.05 + 1e-9, "{}", rep.r_exponent);

        let zero = SeqSample::from_real(&[0.0, 0.0]).unwrap();
        assert!(jackson_bernstein_scan(&[zero], 1.0, y).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(InterpParams::new(0.0, ExtReal::Finite(1.0)).is_err());
        assert!(InterpParams::new(0.5, ExtReal::Finite(0.5)).is_err());
        assert!(CoupleSpec::new(ExtReal::Finite(0.5), ExtReal::Infinity).is_err());
        assert_eq!(CoupleSpec::l1_linf().lorentz_p(0.5), Some(2.0));
    }
}
