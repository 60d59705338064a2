use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use snlab::battery::{run_criterion, suite_report, BatteryConfig};
use snlab::corpus::{self, CorpusKind, CorpusSpec};
use snlab::hop::{certify_h, markus_verify, GridSpec, HVerdict, DEFAULT_TOL_REAL_SPECTRUM};
use snlab::interp::{
    embedding_check, interp_norm, jackson_bernstein_scan, lorentz_identification, CoupleSpec, InterpParams, KCurve,
    QuadSpec,
};
use snlab::io;
use snlab::lethargy::{build_prescribed_widths, verify_width_floor, LethargyTarget};
use snlab::operators::{char_poly, spectrum, gram_eigenvalues, ComplexMatrix, NormKind};
use snlab::report::{CheckRecord, ExperimentReport, Verdict};
use snlab::represent::{default_levels, dyadic_decompose, inclusion_experiment, representation_equivalence};
use snlab::search::SearchConfig;
use snlab::seqspace::{approx_space_norm, lorentz_norm, ApproxSpaceParams, ExtReal, LorentzParams, SeqSample};
use snlab::snumbers::{order_checks, SNumberTable};
use snlab::{Error, Exec};

#[derive(Parser, Debug)]
#[command(name = "snlab", version, about = "s-numbers, H-operators and approximation quasi-norms on finite matrices and sequences")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Seed for every random choice.
    #[arg(long, global = true, env = "SNLAB_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Evaluate sequentially instead of on the thread pool.
    #[arg(long, global = true)]
    sequential: bool,

    /// Record wall time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn ext(s: &str) -> Result<ExtReal, String> {
    s.parse::<ExtReal>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct MatrixIn {
    /// Matrix file (`.json` or CSV).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct SeqIn {
    /// Sequence file (`.json` or CSV).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_TOL_REAL_SPECTRUM)]
    tol_real_spectrum: f64,
    #[arg(long, default_value_t = 64)]
    re_points: usize,
    #[arg(long, default_value_t = 32)]
    im_points: usize,
    #[arg(long, default_value_t = 1e-6)]
    im_min: f64,
    #[arg(long, default_value_t = 1.0)]
    im_max: f64,
    /// Skip the pattern-search refinement of the best sample.
    #[arg(long)]
    no_refine: bool,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            re_points: self.re_points,
            im_points: self.im_points,
            im_min: self.im_min,
            im_max: self.im_max,
            refine: !self.no_refine,
            ..GridSpec::default()
        }
    }
}

#[derive(Args, Debug)]
struct CoupleArgs {
    #[arg(long, value_parser = ext, default_value = "1")]
    r: ExtReal,
    #[arg(long, value_parser = ext, default_value = "inf")]
    s: ExtReal,
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Quadrature grid spans `2^{-J}..2^{J}`.
    #[arg(long, default_value_t = 40)]
    grid_j: u32,
    #[arg(long, default_value_t = 8)]
    per_octave: u32,
}

impl QuadArgs {
    fn spec(&self) -> QuadSpec {
        QuadSpec {
            j_max: self.grid_j,
            per_octave: self.per_octave,
            ..QuadSpec::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Eigenvalues, singular values and the Gram characteristic polynomial.
    Spectrum(MatrixIn),
    /// Approximation numbers and Kolmogorov diameters.
    Snumbers {
        #[command(flatten)]
        m: MatrixIn,
        #[arg(long, default_value = "spectral")]
        norm: NormKind,
        /// Largest index (defaults to min(rows, cols)).
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
    /// H-operator certificate.
    Hcert {
        #[command(flatten)]
        m: MatrixIn,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Markus chain for a square matrix with real spectrum.
    Markus {
        #[command(flatten)]
        m: MatrixIn,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Lorentz quasi-norm of a sequence.
    Lorentz {
        #[command(flatten)]
        x: SeqIn,
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = ext)]
        q: ExtReal,
    },
    /// Approximation-space quasi-norm of a non-increasing sequence.
    ApproxNorm {
        #[command(flatten)]
        x: SeqIn,
        #[arg(long)]
        rho: f64,
        #[arg(long, value_parser = ext)]
        mu: ExtReal,
    },
    /// K-functional on a geometric grid of t.
    Kfunc {
        #[command(flatten)]
        x: SeqIn,
        #[command(flatten)]
        couple: CoupleArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Interpolation norm by quadrature.
    InterpNorm {
        #[command(flatten)]
        x: SeqIn,
        #[arg(long)]
        theta: f64,
        /// Interpolation index.
        #[arg(long, value_parser = ext)]
        q: ExtReal,
        #[command(flatten)]
        couple: CoupleArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Embedding ratios between two interpolation indices on a random corpus.
    Embed {
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, value_parser = ext, default_value = "1")]
        mu: ExtReal,
        #[arg(long, value_parser = ext, default_value = "inf")]
        mu2: ExtReal,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Sequence length.
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        #[command(flatten)]
        couple: CoupleArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Interpolation norm against the Lorentz norm on a random corpus.
    LorentzId {
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, value_parser = ext, default_value = "2")]
        q: ExtReal,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[command(flatten)]
        couple: CoupleArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Jackson and Bernstein constants of the n-term scheme in l_inf.
    JacksonBernstein {
        /// Sequence file; a random corpus is used when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_parser = ext, default_value = "inf")]
        mu: ExtReal,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
    },
    /// Eigenvalue quasi-norm inclusion on a random real-diagonal corpus.
    Inclusion {
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_parser = ext, default_value = "1")]
        mu: ExtReal,
        #[arg(long, value_parser = ext, default_value = "2")]
        mu2: ExtReal,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 32)]
        dim: usize,
    },
    /// Dyadic block decomposition.
    Decompose {
        #[command(flatten)]
        m: MatrixIn,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_parser = ext, default_value = "1")]
        mu: ExtReal,
        /// Number of levels M (defaults to the smallest exact one).
        #[arg(long)]
        levels: Option<usize>,
        /// Directory for the manifest and one file per block.
        #[arg(long)]
        blocks_dir: Option<PathBuf>,
    },
    /// Representation quasi-norm against the approximation quasi-norm.
    RepEquiv {
        #[command(flatten)]
        m: MatrixIn,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_parser = ext, default_value = "1")]
        mu: ExtReal,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Operator with prescribed widths, and its width floor check.
    Lethargy {
        /// Target widths file; otherwise `--profile` over `--horizon` terms.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Profile::Harmonic)]
        profile: Profile,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        /// Check the floor on this matrix instead of the constructed one.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Full acceptance battery.
    Suite {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
    /// Write a seeded corpus of matrices.
    GenCorpus {
        #[arg(long, value_parser = |s: &str| s.parse::<CorpusKind>().map_err(|e| e.to_string()))]
        kind: CorpusKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = corpus::DEFAULT_KAPPA_CAP)]
        kappa_cap: f64,
        /// Output directory.
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Profile {
    /// `d_n = 1/(n+1)`.
    Harmonic,
    /// `d_n = 2^{-n}`.
    Geometric,
}

/// What a command produced: a report, plus an optional CSV table that
/// replaces the record CSV.
struct Output {
    report: ExperimentReport,
    table_csv: Option<String>,
}

impl From<ExperimentReport> for Output {
    fn from(report: ExperimentReport) -> Self {
        Output { report, table_csv: None }
    }
}

fn info(name: &str, anchor: &'static str, values: impl serde::Serialize) -> CheckRecord {
    CheckRecord::new(name, anchor, values, None, Verdict::Pass)
}

fn pairs(z: &[snlab::operators::C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn read_matrix(p: &Path) -> snlab::Result<ComplexMatrix> {
    io::read_matrix(p)
}

fn sequences(count: usize, len: usize, seed: u64) -> snlab::Result<Vec<SeqSample>> {
    if count == 0 || len == 0 {
        return Err(Error::Domain("count and horizon must be positive".into()));
    }
    Ok((0..count).map(|i| corpus::random_sequence(len, seed, i as u64)).collect())
}

fn run(cli: &Cli) -> snlab::Result<Output> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let seed = cli.seed;
    let out: Output = match &cli.command {
        Cmd::Spectrum(m) => {
            let t = read_matrix(&m.input)?;
            let mut rep = ExperimentReport::new("spectrum", seed, json!({ "in": m.input }));
            if t.is_square() {
                let sp = spectrum(&t)?;
                rep.push(info("eigenvalues", "singular-values", json!({ "eigenvalues": pairs(&sp.eigenvalues) })));
                let gram = t.adjoint().matmul(&t)?;
                rep.push(info(
                    "gram characteristic polynomial",
                    "singular-values",
                    json!({ "coefficients": pairs(&char_poly(&gram)?) }),
                ));
            }
            rep.push(info(
                "singular values",
                "singular-values",
                json!({ "singular_values": snlab::operators::singular_values(&t), "gram_eigenvalues": gram_eigenvalues(&t) }),
            ));
            rep.into()
        }
        Cmd::Snumbers { m, norm, horizon, restarts } => {
            let t = read_matrix(&m.input)?;
            let n_max = horizon.unwrap_or(t.min_dim());
            let cfg = SearchConfig { restarts: *restarts, seed, exec, ..SearchConfig::default() };
            let table = SNumberTable::compute(&t, *norm, n_max, &cfg)?;
            let order = order_checks(&table, 1e-10);
            let mut rep = ExperimentReport::new("snumbers", seed, json!({ "in": m.input, "norm": norm, "horizon": n_max, "restarts": restarts }));
            let exact = table.is_exact();
            rep.push(CheckRecord::new(
                "s-number table",
                "approximation-numbers",
                json!({ "rows": table.rows() }),
                None,
                if exact { Verdict::Pass } else { Verdict::BoundOnly },
            ));
            if let Some(holds) = order.same_index_holds {
                let slack = order.same_index.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
                rep.push(CheckRecord::new("diameters below approximation numbers", "width-order", &order.same_index, Some(slack), Verdict::from_bool(holds)));
            }
            if let Some(holds) = order.shifted_holds {
                // the shifted form is reported, not required
                rep.push(CheckRecord::new("shifted diameter order", "width-order", json!({ "holds": holds, "checks": order.shifted }), None, Verdict::BoundOnly));
            }
            Output { table_csv: Some(table.to_csv()), report: rep }
        }
        Cmd::Hcert { m, grid } => {
            let t = read_matrix(&m.input)?;
            let cert = certify_h(&t, grid.tol_real_spectrum, &grid.spec(), exec)?;
            let mut rep = ExperimentReport::new("hcert", seed, json!({ "in": m.input, "grid": grid.spec(), "tol_real_spectrum": grid.tol_real_spectrum }));
            let verdict = match cert.verdict {
                HVerdict::Certified => Verdict::Pass,
                HVerdict::RealSpectrumUncertified => Verdict::BoundOnly,
                HVerdict::NotRealSpectrum => Verdict::Fail,
            };
            rep.push(CheckRecord::new("H-operator certificate", "h-operator", &cert, None, verdict));
            rep.into()
        }
        Cmd::Markus { m, grid } => {
            let t = read_matrix(&m.input)?;
            let cert = certify_h(&t, grid.tol_real_spectrum, &grid.spec(), exec)?;
            let table = SNumberTable::spectral(&t)?;
            let mr = markus_verify(&t, &cert, &table)?;
            let mut rep = ExperimentReport::new("markus", seed, json!({ "in": m.input, "grid": grid.spec() }));
            let verdict = if !mr.verdict {
                Verdict::Fail
            } else if mr.h_certified {
                Verdict::Pass
            } else {
                Verdict::BoundOnly
            };
            rep.push(CheckRecord::new("Markus chain", "markus-chain", &mr, Some(mr.min_relative_slack), verdict));
            rep.into()
        }
        Cmd::Lorentz { x, p, q } => {
            let seq = io::read_sequence(&x.input)?;
            let lp = LorentzParams::new(*p, *q)?;
            let v = lorentz_norm(&seq, lp);
            let mut rep = ExperimentReport::new("lorentz", seed, json!({ "in": x.input, "p": p, "q": q }));
            rep.push(info("Lorentz quasi-norm", "lorentz-space", v));
            rep.into()
        }
        Cmd::ApproxNorm { x, rho, mu } => {
            let seq = io::read_sequence(&x.input)?;
            let ap = ApproxSpaceParams::new(*rho, *mu)?;
            let alphas: Vec<f64> = seq.values().iter().map(|z| z.norm()).collect();
            let v = approx_space_norm(&alphas, ap)?;
            let mut rep = ExperimentReport::new("approx-norm", seed, json!({ "in": x.input, "rho": rho, "mu": mu }));
            rep.push(info("approximation-space quasi-norm", "approximation-space", v));
            rep.into()
        }
        Cmd::Kfunc { x, couple, quad } => {
            let seq = io::read_sequence(&x.input)?;
            let cs = CoupleSpec::new(couple.r, couple.s)?;
            let curve = KCurve::compute(&seq, cs, quad.spec(), exec)?;
            let chk = curve.check(&seq, cs, 1e-9);
            let mut rep = ExperimentReport::new("kfunc", seed, json!({ "in": x.input, "couple": cs, "quad": quad.spec() }));
            rep.push(CheckRecord::new(
                "K-functional curve",
                "k-functional",
                json!({ "check": chk, "curve": curve }),
                None,
                Verdict::from_bool(chk.all()),
            ));
            Output { table_csv: Some(curve.to_csv()), report: rep }
        }
        Cmd::InterpNorm { x, theta, q, couple, quad } => {
            let seq = io::read_sequence(&x.input)?;
            let cs = CoupleSpec::new(couple.r, couple.s)?;
            let ip = InterpParams::new(*theta, *q)?;
            let v = interp_norm(&seq, ip, cs, quad.spec())?;
            let mut rep = ExperimentReport::new("interp-norm", seed, json!({ "in": x.input, "theta": theta, "q": q, "couple": cs, "quad": quad.spec() }));
            let verdict = if v.truncation_warning { Verdict::BoundOnly } else { Verdict::Pass };
            rep.push(CheckRecord::new("interpolation norm", "interpolation-space", v, None, verdict));
            rep.into()
        }
        Cmd::Embed { theta, mu, mu2, count, horizon, couple, quad } => {
            let cs = CoupleSpec::new(couple.r, couple.s)?;
            let corpus = sequences(*count, *horizon, seed)?;
            let ip1 = InterpParams::new(*theta, *mu)?;
            let ip2 = InterpParams::new(*theta, *mu2)?;
            let r = embedding_check(&corpus, ip1, ip2, cs, quad.spec(), None, exec)?;
            let mut rep = ExperimentReport::new("embed", seed, json!({ "theta": theta, "mu": mu, "mu2": mu2, "count": count, "horizon": horizon, "couple": cs }));
            let slack = r.cap - r.max_ratio;
            rep.push(CheckRecord::new(
                "embedding ratios",
                "embedding-second-index",
                json!({ "max_ratio": r.max_ratio, "min_ratio": r.min_ratio, "proof_constant": r.proof_constant, "samples": r.samples }),
                Some(slack),
                Verdict::from_bool(r.within_cap),
            ));
            rep.into()
        }
        Cmd::LorentzId { theta, q, count, horizon, couple, quad } => {
            let cs = CoupleSpec::new(couple.r, couple.s)?;
            let corpus = sequences(*count, *horizon, seed)?;
            let ip = InterpParams::new(*theta, *q)?;
            let r = lorentz_identification(&corpus, ip, cs, quad.spec(), exec)?;
            let mut rep = ExperimentReport::new("lorentz-id", seed, json!({ "theta": theta, "q": q, "count": count, "horizon": horizon, "couple": cs }));
            rep.push(CheckRecord::new(
                "interpolation versus Lorentz band",
                "lorentz-interpolation",
                json!({ "p": r.p, "band": r.band, "width": r.band.width(), "samples": r.samples }),
                None,
                Verdict::from_bool(r.bounded),
            ));
            rep.into()
        }
        Cmd::JacksonBernstein { input, sigma, rho, mu, count, horizon } => {
            let corpus = match input {
                Some(p) => vec![io::read_sequence(p)?],
                None => (0..*count)
                    .map(|i| SeqSample::from_real(&corpus::random_decreasing(*horizon, seed, i as u64)))
                    .collect::<snlab::Result<_>>()?,
            };
            let y = ApproxSpaceParams::new(*rho, *mu)?;
            let r = jackson_bernstein_scan(&corpus, *sigma, y)?;
            let mut rep = ExperimentReport::new("jackson-bernstein", seed, json!({ "in": input, "sigma": sigma, "rho": rho, "mu": mu, "count": count, "horizon": horizon }));
            rep.push(CheckRecord::new("Jackson and Bernstein constants", "jackson-bernstein", &r, None, Verdict::from_bool(r.verdict)));
            rep.into()
        }
        Cmd::Inclusion { rho, mu, mu2, count, dim } => {
            let spec = CorpusSpec::new(CorpusKind::RealDiagonal, *dim, *count, seed)?;
            let corpus = spec.generate(exec);
            let r = inclusion_experiment(&corpus, *rho, *mu, *mu2, exec)?;
            let mut rep = ExperimentReport::new("inclusion", seed, json!({ "rho": rho, "mu": mu, "mu2": mu2, "count": count, "dim": dim }));
            rep.push(CheckRecord::new(
                "eigenvalue quasi-norm inclusion",
                "inclusion",
                json!({ "max_ratio": r.max_ratio, "max_ratio_half": r.max_ratio_half, "min_relative_slack": r.min_relative_slack, "samples": r.samples }),
                Some(r.min_relative_slack),
                Verdict::from_bool(r.finite && r.min_relative_slack >= -1e-10),
            ));
            rep.into()
        }
        Cmd::Decompose { m, rho, mu, levels, blocks_dir } => {
            let t = read_matrix(&m.input)?;
            let ap = ApproxSpaceParams::new(*rho, *mu)?;
            let levels = levels.unwrap_or_else(|| default_levels(t.min_dim()));
            let d = dyadic_decompose(&t, ap, levels)?;
            if let Some(dir) = blocks_dir {
                io::write_decomposition(dir, &d)?;
            }
            let mut rep = ExperimentReport::new("decompose", seed, json!({ "in": m.input, "rho": rho, "mu": mu, "levels": levels }));
            let slack = d.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
            rep.push(CheckRecord::new(
                "dyadic block bounds",
                "dyadic-representation",
                &d,
                Some(slack),
                Verdict::from_bool(d.ranks_within_cap() && d.block_bounds_hold(1e-10)),
            ));
            rep.push(CheckRecord::new(
                "dyadic reconstruction",
                "dyadic-representation",
                json!({ "final_residual": d.final_residual(), "floor": d.floor, "floor_flagged": d.floor_flagged }),
                None,
                if d.floor_flagged { Verdict::BoundOnly } else { Verdict::Pass },
            ));
            rep.into()
        }
        Cmd::RepEquiv { m, rho, mu, levels, trials } => {
            let t = read_matrix(&m.input)?;
            let ap = ApproxSpaceParams::new(*rho, *mu)?;
            let levels = levels.unwrap_or_else(|| default_levels(t.min_dim()));
            let r = representation_equivalence(&t, ap, levels, *trials, seed, None)?;
            let mut rep = ExperimentReport::new("rep-equiv", seed, json!({ "in": m.input, "rho": rho, "mu": mu, "levels": levels, "trials": trials }));
            rep.push(CheckRecord::new("representation ratio within band", "dyadic-representation", &r, None, Verdict::from_bool(r.within_band)));
            rep.into()
        }
        Cmd::Lethargy { input, profile, horizon, matrix } => {
            let target = match input {
                Some(p) => LethargyTarget::new(io::read_sequence(p)?.values().iter().map(|z| z.re).collect())?,
                None => match profile {
                    Profile::Harmonic => LethargyTarget::from_fn(*horizon, |n| 1.0 / (n + 1) as f64)?,
                    Profile::Geometric => LethargyTarget::from_fn(*horizon, |n| 2f64.powi(-(n as i32)))?,
                },
            };
            let built = build_prescribed_widths(&target);
            let t = match matrix {
                Some(p) => read_matrix(p)?,
                None => built.matrix.clone(),
            };
            let floor = verify_width_floor(&t, &target)?;
            let mut rep = ExperimentReport::new("lethargy", seed, json!({ "in": input, "profile": format!("{profile:?}").to_lowercase(), "horizon": target.len(), "matrix": matrix }));
            rep.push(CheckRecord::new(
                "prescribed widths",
                "prescribed-widths",
                &built,
                Some(-built.max_relative_error),
                Verdict::from_bool(built.max_relative_error <= 1e-10),
            ));
            rep.push(CheckRecord::new("width floor", "width-order", &floor, Some(floor.min_slack_floor), Verdict::from_bool(floor.pass)));
            rep.into()
        }
        Cmd::Suite { criterion } => {
            let cfg = BatteryConfig { seed, exec };
            match criterion {
                Some(id) => {
                    let o = run_criterion(*id, &cfg)?;
                    let mut rep = ExperimentReport::new("suite", seed, json!({ "criterion": id }));
                    rep.extend(o.records);
                    rep.into()
                }
                None => suite_report(&cfg)?.into(),
            }
        }
        Cmd::GenCorpus { kind, dim, count, kappa_cap, dir } => {
            let spec = CorpusSpec::new(*kind, *dim, *count, seed)?.with_kappa_cap(*kappa_cap)?;
            fs::create_dir_all(dir)?;
            let corpus = spec.generate(exec);
            let width = count.to_string().len();
            let mut files = Vec::with_capacity(corpus.len());
            for (i, t) in corpus.iter().enumerate() {
                let name = format!("{kind}_{i:0width$}.json");
                fs::write(dir.join(&name), io::matrix_to_json(t))?;
                files.push(name);
            }
            let mut rep = ExperimentReport::new("gen-corpus", seed, spec);
            rep.push(info("corpus files", "corpus", json!({ "dir": dir, "files": files })));
            rep.into()
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("snlab: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        out.report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text = match (cli.format, out.table_csv) {
        (Format::Json, _) => out.report.to_json(),
        (Format::Csv, Some(t)) => t,
        (Format::Csv, None) => out.report.to_csv(),
    };
    let written = match &cli.out {
        Some(p) => fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("snlab: {e}");
        return ExitCode::from(2);
    }
    if out.report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn criteria_count_matches_battery() {
        assert_eq!(snlab::battery::CRITERIA, 11);
    }
}
