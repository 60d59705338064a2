//! The acceptance battery: fixtures and property sweeps with pinned
//! tolerances. Each criterion yields check records for the suite report.

use serde::Serialize;
use serde_json::json;

use crate::corpus::{self, CorpusKind};
use crate::error::Result;
use crate::exec::Exec;
use crate::hop::{certify_h, markus_verify, GridSpec, HVerdict, DEFAULT_TOL_REAL_SPECTRUM};
use crate::interp::{
    embedding_check, k_functional, k_functional_search, lorentz_identification, Band, CoupleSpec, InterpParams,
    QuadSpec,
};
use crate::lethargy::{build_prescribed_widths, verify_width_floor, LethargyTarget, Summability};
use crate::operators::{char_poly, eigenvalues, gram_eigenvalues, singular_values, ComplexMatrix, C64};
use crate::report::{CheckRecord, ExperimentReport, Verdict};
use crate::represent::{default_levels, dyadic_decompose, inclusion_experiment, representation_equivalence};
use crate::seqspace::{decay_class, ApproxSpaceParams, ExtReal, SeqSample};
use crate::snumbers::SNumberTable;

pub const CRITERIA: u8 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl BatteryConfig {
    pub fn new(seed: u64) -> Self {
        BatteryConfig {
            seed,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
}

impl CriterionOutcome {
    fn new(id: u8, title: &'static str, records: Vec<CheckRecord>) -> Self {
        CriterionOutcome {
            id,
            title,
            pass: records.iter().all(|r| r.verdict != Verdict::Fail),
            records,
        }
    }
}

fn check(name: &str, anchor: &'static str, values: impl Serialize, slack: f64) -> CheckRecord {
    CheckRecord::new(name, anchor, values, Some(slack), Verdict::from_bool(slack >= 0.0))
}

/// Reduced resolvent grid for sweeps whose checks rely on `C_upper`.
pub fn sweep_grid() -> GridSpec {
    GridSpec {
        re_points: 16,
        im_points: 8,
        refine: false,
        ..GridSpec::default()
    }
}

/// Smallest admissible grid. The verdict depends only on the spectrum and the
/// eigenvector basis, so sweeps that need nothing but the verdict use this.
pub fn verdict_grid() -> GridSpec {
    GridSpec {
        re_points: 2,
        im_points: 2,
        include_eigen_re: false,
        refine: false,
        ..GridSpec::default()
    }
}

pub fn run_criterion(id: u8, cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    match id {
        1 => defective_fixture(),
        2 => rotation_fixture(cfg),
        3 => markus_sweep(cfg),
        4 => hermitian_constant(cfg),
        5 => slow_decay(),
        6 => k_functional_oracle(cfg),
        7 => lorentz_band(cfg),
        8 => embedding_constant(cfg),
        9 => inclusion_sweep(cfg),
        10 => representation(cfg),
        11 => lethargy(),
        _ => Err(crate::Error::Domain(format!("no criterion {id}; valid ids are 1..={CRITERIA}"))),
    }
}

pub fn run_all(cfg: &BatteryConfig) -> Result<Vec<CriterionOutcome>> {
    (1..=CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}

/// Full battery as a report.
pub fn suite_report(cfg: &BatteryConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("suite", cfg.seed, cfg);
    for outcome in run_all(cfg)? {
        report.extend(outcome.records);
    }
    Ok(report)
}

fn max_abs_diff(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn defective_example() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 0.0], &[1.0, 1.0, 1.0]])
}

pub fn rotation_example() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[2.0, -3.0], &[3.0, 2.0]])
}

fn defective_fixture() -> Result<CriterionOutcome> {
    let t = defective_example();
    let ev = eigenvalues(&t)?;
    let ev_err = ev
        .iter()
        .zip([2.0, 2.0, 1.0])
        .map(|(z, e)| (z - C64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);
    let gram = gram_eigenvalues(&t);
    let gram_err = max_abs_diff(gram.iter().copied(), [8.796, 2.466, 0.738]);
    let cp = char_poly(&t.adjoint().matmul(&t)?)?;
    let cp_err = cp
        .iter()
        .zip([-12.0, 30.0, -16.0])
        .map(|(z, e)| (z - C64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);
    let records = vec![
        check(
            "defective fixture eigenvalues",
            "example-defective-real-spectrum",
            json!({ "eigenvalues": ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), "max_error": ev_err, "tolerance": 1e-8 }),
            1e-8 - ev_err,
        ),
        check(
            "defective fixture gram eigenvalues",
            "singular-values",
            json!({ "gram_eigenvalues": gram, "max_error": gram_err, "tolerance": 1e-3 }),
            1e-3 - gram_err,
        ),
        check(
            "defective fixture gram characteristic polynomial",
            "singular-values",
            json!({ "coefficients": cp.iter().map(|z| z.re).collect::<Vec<_>>(), "max_error": cp_err, "tolerance": 1e-6 }),
            1e-6 - cp_err,
        ),
    ];
    Ok(CriterionOutcome::new(1, "defective fixture spectrum", records))
}

fn rotation_fixture(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    let t = rotation_example();
    let ev = eigenvalues(&t)?;
    let ev_err = ev
        .iter()
        .zip([C64::new(2.0, 3.0), C64::new(2.0, -3.0)])
        .map(|(z, e)| (z - e).norm())
        .fold(0.0, f64::max);
    let s = singular_values(&t);
    let s_err = max_abs_diff(s.iter().copied(), [13f64.sqrt(); 2]);
    let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), cfg.exec)?;
    let not_h = cert.verdict == HVerdict::NotRealSpectrum;
    let records = vec![
        check(
            "rotation fixture eigenvalues",
            "example-non-real-spectrum",
            json!({ "eigenvalues": ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), "max_error": ev_err }),
            1e-10 - ev_err,
        ),
        check(
            "rotation fixture singular values",
            "singular-values",
            json!({ "singular_values": s, "max_error": s_err, "tolerance": 1e-10 }),
            1e-10 - s_err,
        ),
        CheckRecord::new(
            "rotation fixture is not an H-operator",
            "h-operator",
            json!({ "verdict": cert.verdict, "max_abs_imag": cert.max_abs_imag }),
            None,
            Verdict::from_bool(not_h),
        ),
    ];
    Ok(CriterionOutcome::new(2, "rotation fixture", records))
}

fn markus_sweep(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 1000;
    let grid = sweep_grid();
    let runs = cfg.exec.map_range(COUNT, |i| -> Result<(usize, bool, f64, f64)> {
        let dim = 4 + i % 13;
        let t = corpus::sample(CorpusKind::ConjugatedH, dim, cfg.seed, i as u64, corpus::DEFAULT_KAPPA_CAP);
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &grid, Exec::Sequential)?;
        let certified = cert.verdict == HVerdict::Certified;
        let table = SNumberTable::spectral(&t)?;
        let rep = markus_verify(&t, &cert, &table)?;
        Ok((dim, certified, rep.min_relative_slack, rep.c))
    });
    let runs: Vec<_> = runs.into_iter().collect::<Result<_>>()?;
    let uncertified = runs.iter().filter(|r| !r.1).count();
    let min_slack = runs.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let max_c = runs.iter().map(|r| r.3).fold(0.0, f64::max);
    let records = vec![
        CheckRecord::new(
            "conjugated corpus certifies with C_upper within cap",
            "h-operator",
            json!({ "samples": COUNT, "uncertified": uncertified, "max_c_upper": max_c, "cap": corpus::DEFAULT_KAPPA_CAP }),
            None,
            Verdict::from_bool(uncertified == 0 && max_c <= corpus::DEFAULT_KAPPA_CAP * (1.0 + 1e-9)),
        ),
        check(
            "markus chain on conjugated corpus",
            "markus-chain",
            json!({ "samples": COUNT, "dims": [4, 16], "min_relative_slack": min_slack, "tolerance": 1e-8 }),
            min_slack + 1e-8,
        ),
    ];
    Ok(CriterionOutcome::new(3, "Markus chain sweep", records))
}

fn hermitian_constant(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 100;
    let grid = GridSpec::default();
    let cs = cfg.exec.map_range(COUNT, |i| -> Result<f64> {
        let t = corpus::sample(CorpusKind::Hermitian, 8, cfg.seed ^ 0x4e, i as u64, corpus::DEFAULT_KAPPA_CAP);
        Ok(certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &grid, Exec::Sequential)?.c_estimate)
    });
    let cs: Vec<f64> = cs.into_iter().collect::<Result<_>>()?;
    let band = Band::of(&cs);
    let slack = (band.lo - (1.0 - 1e-4)).min(1.01 - band.hi);
    let records = vec![check(
        "self-adjoint resolvent constant",
        "self-adjoint-constant",
        json!({ "samples": COUNT, "min_c_estimate": band.lo, "max_c_estimate": band.hi, "interval": [1.0 - 1e-4, 1.01] }),
        slack,
    )];
    Ok(CriterionOutcome::new(4, "Hermitian resolvent constant", records))
}

fn slow_decay() -> Result<CriterionOutcome> {
    const HORIZON: usize = 1_000_000;
    let slow = SeqSample::from_fn(HORIZON, |n| 1.0 / ((n + 1) as f64).ln())?;
    let mut records = Vec::new();
    for q in [1.0, 2.0, 4.0] {
        let rep = decay_class(&slow, q, HORIZON)?;
        // direct scan of the defining inequality on [N(q), horizon]
        let ok = rep.threshold_index.is_some_and(|start| {
            (start..=HORIZON).all(|n| n as f64 * (1.0 / ((n + 1) as f64).ln()).powf(q) >= 1.0)
        });
        records.push(CheckRecord::new(
            format!("inverse-log sequence is not in l_{q}"),
            "example-not-in-lq",
            json!({ "q": q, "threshold_index": rep.threshold_index, "last_statistic": rep.last_statistic, "verdict": rep.verdict }),
            None,
            Verdict::from_bool(ok),
        ));
    }
    let geo = SeqSample::from_fn(1000, |n| 2f64.powi(-(n as i32)))?;
    let rep = decay_class(&geo, 1.0, 1000)?;
    records.push(CheckRecord::new(
        "geometric sequence statistic vanishes",
        "example-not-in-lq",
        json!({ "q": 1.0, "mid_statistic": rep.mid_statistic, "last_statistic": rep.last_statistic, "verdict": rep.verdict }),
        None,
        Verdict::from_bool(rep.last_statistic < 1e-12 && rep.last_statistic <= rep.mid_statistic),
    ));
    Ok(CriterionOutcome::new(5, "inverse-log decay", records))
}

/// Exhaustive minimization of `‖f − a‖_1 + t‖a‖_∞` over a product grid.
///
/// Each coordinate `a_k` ranges over `{m·j/G : j ≤ G} ∪ {|f_k|}`. For a
/// fixed level `M = max_k a_k` the objective separates, so the product grid
/// is searched exactly by enumerating `M` and minimizing per coordinate.
pub fn brute_force_k_l1_linf(f: &[f64], t: f64, levels: usize) -> f64 {
    let m: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let top = m.iter().copied().fold(0.0, f64::max);
    let mut grid: Vec<f64> = (0..=levels).map(|j| top * j as f64 / levels as f64).collect();
    grid.extend(&m);
    let mut best = f64::INFINITY;
    for &cap in &grid {
        let mut cost = t * cap;
        for &mk in &m {
            // best admissible a_k: m_k itself, or the level `cap` (a grid point)
            cost += (mk - mk.min(cap)).abs();
        }
        best = best.min(cost);
    }
    best
}

fn k_functional_oracle(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 100;
    let cs = CoupleSpec::l1_linf();
    let mut worst_grid: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for i in 0..COUNT {
        let f = corpus::random_sequence(8, cfg.seed ^ 0x6b, i as u64);
        let re: Vec<f64> = f.values().iter().map(|z| z.re).collect();
        for t in [0.1, 1.0, 10.0] {
            let search = k_functional_search(&f, t, cs)?;
            let closed = k_functional(&f, t, cs)?.value;
            let brute = brute_force_k_l1_linf(&re, t, 2000);
            worst_grid = worst_grid.max((search - brute).abs() / brute);
            worst_closed = worst_closed.max((search - closed).abs() / closed);
        }
    }
    let records = vec![
        check(
            "K-functional search versus brute-force grid",
            "k-functional",
            json!({ "samples": COUNT, "t": [0.1, 1.0, 10.0], "max_relative_gap": worst_grid, "tolerance": 5e-3 }),
            5e-3 - worst_grid,
        ),
        check(
            "K-functional search versus closed form",
            "k-functional",
            json!({ "samples": COUNT, "max_relative_gap": worst_closed, "tolerance": 1e-6 }),
            1e-6 - worst_closed,
        ),
    ];
    Ok(CriterionOutcome::new(6, "K-functional oracles", records))
}

fn sequences(n: usize, len: usize, seed: u64) -> Vec<SeqSample> {
    (0..n).map(|i| corpus::random_sequence(len, seed, i as u64)).collect()
}

fn lorentz_band(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 1000;
    let corpus = sequences(2 * COUNT, 64, cfg.seed ^ 0x4c);
    let ip = InterpParams::new(0.5, ExtReal::Finite(2.0))?;
    let quad = QuadSpec::default();
    let rep = lorentz_identification(&corpus, ip, CoupleSpec::l1_linf(), quad, cfg.exec)?;
    let first = Band::of(&rep.ratios[..COUNT]);
    let drift = first.drift_to(&rep.band);
    let records = vec![check(
        "interpolation versus Lorentz norm band",
        "lorentz-interpolation",
        json!({
            "p": rep.p, "q": 2.0, "theta": 0.5,
            "band_n": [first.lo, first.hi], "band_2n": [rep.band.lo, rep.band.hi],
            "samples": [COUNT, 2 * COUNT], "width_drift": drift, "tolerance": 0.1
        }),
        0.1 - drift,
    )];
    Ok(CriterionOutcome::new(7, "Lorentz identification", records))
}

fn embedding_constant(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 1000;
    let corpus = sequences(2 * COUNT, 32, cfg.seed ^ 0x45);
    let ip1 = InterpParams::new(0.5, ExtReal::Finite(1.0))?;
    let ip2 = InterpParams::new(0.5, ExtReal::Infinity)?;
    let rep = embedding_check(&corpus, ip1, ip2, CoupleSpec::l1_linf(), QuadSpec::default(), None, cfg.exec)?;
    let c_n = rep.ratios[..COUNT].iter().copied().fold(0.0, f64::max);
    let c_2n = rep.max_ratio;
    let records = vec![
        check(
            "embedding constant stable under corpus doubling",
            "embedding-second-index",
            json!({ "c_n": c_n, "c_2n": c_2n, "samples": [COUNT, 2 * COUNT], "tolerance": 0.1 }),
            1.1 * c_n - c_2n,
        ),
        check(
            "embedding constant within proof constant",
            "embedding-second-index",
            json!({ "c_2n": c_2n, "proof_constant": rep.proof_constant }),
            rep.proof_constant - c_2n,
        ),
    ];
    Ok(CriterionOutcome::new(8, "embedding in the second index", records))
}

fn inclusion_sweep(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 1000;
    let spec = corpus::CorpusSpec::new(CorpusKind::RealDiagonal, 32, COUNT, cfg.seed ^ 0x49)?;
    let corpus = spec.generate(cfg.exec);
    let grid = verdict_grid();
    let verdicts = cfg.exec.map(&corpus, |t| {
        certify_h(t, DEFAULT_TOL_REAL_SPECTRUM, &grid, Exec::Sequential).map(|c| c.verdict)
    });
    let certified = verdicts
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .iter()
        .filter(|v| **v == HVerdict::Certified)
        .count();
    let rep = inclusion_experiment(&corpus, 1.0, ExtReal::Finite(1.0), ExtReal::Finite(2.0), cfg.exec)?;
    let records = vec![
        CheckRecord::new(
            "diagonal corpus certifies",
            "h-operator",
            json!({ "samples": COUNT, "certified": certified }),
            None,
            Verdict::from_bool(certified == COUNT),
        ),
        check(
            "eigenvalue quasi-norm inclusion",
            "inclusion",
            json!({ "rho": 1.0, "mu1": 1.0, "mu2": 2.0, "max_ratio": rep.max_ratio, "min_relative_slack": rep.min_relative_slack }),
            rep.min_relative_slack + 1e-10,
        ),
    ];
    Ok(CriterionOutcome::new(9, "inclusion sweep", records))
}

/// `(lo, hi)` of the best representation ratio over a corpus.
fn rep_band(corpus: &[ComplexMatrix], ap: ApproxSpaceParams, trials: usize, seed: u64, exec: Exec) -> Result<(Band, bool)> {
    let reps = exec.map(corpus, |t| {
        let m = default_levels(t.min_dim());
        representation_equivalence(t, ap, m, trials, seed, None)
    });
    let reps: Vec<_> = reps.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = reps.iter().filter_map(|r| r.ratio).collect();
    Ok((Band::of(&ratios), reps.iter().all(|r| r.within_band)))
}

fn representation(cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    const COUNT: usize = 100;
    const TRIALS: usize = 16;
    let ap = ApproxSpaceParams::new(1.0, ExtReal::Finite(1.0))?;
    let geometric = ComplexMatrix::diag_real(&(1..=16).map(|n| 2f64.powi(-n)).collect::<Vec<_>>());
    let spec = corpus::CorpusSpec::new(CorpusKind::RealDiagonal, 32, COUNT, cfg.seed ^ 0x52)?;
    let mut corpus = vec![geometric];
    corpus.extend(spec.generate(cfg.exec));

    let decs = cfg.exec.map(&corpus, |t| dyadic_decompose(t, ap, default_levels(t.min_dim())));
    let decs: Vec<_> = decs.into_iter().collect::<Result<_>>()?;
    let ranks_ok = decs.iter().all(|d| d.ranks_within_cap());
    let min_block_slack = decs
        .iter()
        .flat_map(|d| d.rows.iter().map(|r| r.slack))
        .fold(f64::INFINITY, f64::min);
    let residual_slack = decs
        .iter()
        .map(|d| 1e-10 * d.s1 - d.final_residual())
        .fold(f64::INFINITY, f64::min);
    let (band1, in1) = rep_band(&corpus, ap, TRIALS, cfg.seed, cfg.exec)?;
    let (band2, in2) = rep_band(&corpus, ap, 2 * TRIALS, cfg.seed, cfg.exec)?;
    let drift = band1.drift_to(&band2);
    let records = vec![
        CheckRecord::new(
            "dyadic block ranks",
            "dyadic-representation",
            json!({ "samples": corpus.len() }),
            None,
            Verdict::from_bool(ranks_ok),
        ),
        check(
            "dyadic block norm bound",
            "dyadic-representation",
            json!({ "min_slack": min_block_slack, "tolerance": 1e-10 }),
            min_block_slack + 1e-10,
        ),
        check(
            "dyadic reconstruction residual",
            "dyadic-representation",
            json!({ "min_slack": residual_slack }),
            residual_slack,
        ),
        check(
            "representation ratio band stability",
            "dyadic-representation",
            json!({
                "band": [band1.lo, band1.hi], "band_doubled_trials": [band2.lo, band2.hi],
                "trials": [TRIALS, 2 * TRIALS], "width_drift": drift, "within_configured_band": in1 && in2
            }),
            if in1 && in2 { 0.1 - drift } else { -1.0 },
        ),
        CheckRecord::new(
            "representation norm is an upper bound on the infimum",
            "dyadic-representation",
            json!({ "band": [band2.lo, band2.hi] }),
            None,
            Verdict::BoundOnly,
        ),
    ];
    Ok(CriterionOutcome::new(10, "dyadic representation", records))
}

fn lethargy() -> Result<CriterionOutcome> {
    let targets = [
        ("harmonic", LethargyTarget::from_fn(64, |n| 1.0 / (n + 1) as f64)?),
        ("geometric", LethargyTarget::from_fn(64, |n| 2f64.powi(-(n as i32)))?),
    ];
    let mut records = Vec::new();
    for (name, target) in &targets {
        let built = build_prescribed_widths(target);
        let floor = verify_width_floor(&built.matrix, target)?;
        let zero_slack = floor
            .records
            .iter()
            .all(|r| r.slack_floor.abs() <= 1e-10 * r.target && r.slack_order.abs() <= 1e-10 * r.target);
        records.push(check(
            &format!("{name} target widths"),
            "prescribed-widths",
            json!({ "max_relative_error": built.max_relative_error, "tolerance": 1e-10 }),
            1e-10 - built.max_relative_error,
        ));
        records.push(CheckRecord::new(
            format!("{name} target width floor"),
            "width-order",
            json!({ "min_slack_floor": floor.min_slack_floor, "min_slack_order": floor.min_slack_order, "zero_slack": zero_slack }),
            Some(floor.min_slack_floor),
            Verdict::from_bool(floor.pass && zero_slack),
        ));
        records.push(CheckRecord::new(
            format!("{name} target kernel summability"),
            "kernel-operator",
            json!({ "partial_sum": built.kernel.partial_sum, "tail_exponent": built.kernel.tail_exponent, "verdict": built.kernel.verdict }),
            None,
            if built.kernel.verdict == Summability::Summable {
                Verdict::Pass
            } else {
                Verdict::BoundOnly
            },
        ));
    }
    Ok(CriterionOutcome::new(11, "prescribed widths", records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_closed_form_on_small_case() {
        let f = [3.0, -1.0, 2.0];
        // K(f, t) = Σ_{k≤⌊t⌋} s_k + (t − ⌊t⌋) s_{⌊t⌋+1}
        assert!((brute_force_k_l1_linf(&f, 1.5, 1000) - 4.0).abs() < 1e-12);
        assert!((brute_force_k_l1_linf(&f, 0.1, 1000) - 0.3).abs() < 1e-12);
        assert!((brute_force_k_l1_linf(&f, 10.0, 1000) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn fixtures_pass() {
        let cfg = BatteryConfig::new(42);
        for id in [1, 2, 5, 11] {
            let out = run_criterion(id, &cfg).unwrap();
            assert!(out.pass, "{out:?}");
        }
        assert!(run_criterion(0, &cfg).is_err());
    }
}
