use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use snlab::corpus::{self, CorpusKind, CorpusSpec};
use snlab::hop::{certify_h, markus_verify, GridSpec, DEFAULT_TOL_REAL_SPECTRUM};
use snlab::interp::{lorentz_identification, CoupleSpec, InterpParams, QuadSpec};
use snlab::seqspace::{ExtReal, SeqSample};
use snlab::snumbers::SNumberTable;
use snlab::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn resolvent_grid(c: &mut Criterion) {
    let t = corpus::sample(CorpusKind::ConjugatedH, 16, 7, 0, corpus::DEFAULT_KAPPA_CAP);
    let grid = GridSpec::default();
    let mut g = c.benchmark_group("resolvent_grid");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &grid, exec).expect("certificate"))
        });
    }
    g.finish();
}

fn markus_sweep(c: &mut Criterion) {
    let corpus = CorpusSpec::new(CorpusKind::ConjugatedH, 8, 64, 11)
        .expect("spec")
        .generate(Exec::Sequential);
    let grid = GridSpec {
        re_points: 16,
        im_points: 8,
        refine: false,
        ..GridSpec::default()
    };
    let mut g = c.benchmark_group("markus_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&corpus, |t| {
                    let cert = certify_h(t, DEFAULT_TOL_REAL_SPECTRUM, &grid, Exec::Sequential).expect("certificate");
                    let table = SNumberTable::spectral(t).expect("table");
                    markus_verify(t, &cert, &table).expect("chain").min_relative_slack
                })
            })
        });
    }
    g.finish();
}

fn interpolation_corpus(c: &mut Criterion) {
    let corpus: Vec<SeqSample> = (0..200).map(|i| corpus::random_sequence(64, 3, i)).collect();
    let cs = CoupleSpec::new(ExtReal::Finite(1.0), ExtReal::Infinity).expect("couple");
    let ip = InterpParams::new(0.5, ExtReal::Finite(2.0)).expect("params");
    let mut g = c.benchmark_group("interpolation_corpus");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| lorentz_identification(&corpus, ip, cs, QuadSpec::default(), exec).expect("report"))
        });
    }
    g.finish();
}

criterion_group!(benches, resolvent_grid, markus_sweep, interpolation_corpus);
criterion_main!(benches);
