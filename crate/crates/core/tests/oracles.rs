//! Library results against independent oracles written here from first
//! principles: cyclic Jacobi for symmetric eigenvalues, literal sums for
//! the sequence quasi-norms, breakpoint enumeration for the K-functional.

use snlab::battery::{defective_example, rotation_example};
use snlab::corpus::{self, CorpusKind, CorpusSpec};
use snlab::hop::{certify_h, GridSpec, HVerdict, DEFAULT_TOL_REAL_SPECTRUM};
use snlab::interp::{k_functional, CoupleSpec};
use snlab::lethargy::{build_prescribed_widths, verify_width_floor, LethargyTarget};
use snlab::operators::{
    best_rank_k, char_poly, eigenvalues, gram_eigenvalues, op_norm, singular_values, ComplexMatrix, NormKind, C64,
};
use snlab::represent::{default_levels, dyadic_decompose};
use snlab::search::SearchConfig;
use snlab::seqspace::{approx_space_norm, lorentz_norm, ApproxSpaceParams, ExtReal, LorentzParams, SeqSample};
use snlab::Exec;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted non-increasing.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn real_rows(t: &ComplexMatrix) -> Vec<Vec<f64>> {
    (0..t.rows()).map(|i| (0..t.cols()).map(|j| t.get(i, j).re).collect()).collect()
}

fn gram(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, n) = (a.len(), a[0].len());
    (0..n).map(|i| (0..n).map(|j| (0..m).map(|k| a[k][i] * a[k][j]).sum()).collect()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn defective_example_matches_published_values() {
    let t = defective_example();
    let mut ev: Vec<f64> = eigenvalues(&t).unwrap().iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    for (got, want) in ev.iter().zip([2.0, 2.0, 1.0]) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
    let cp = char_poly(&t).unwrap();
    for (got, want) in cp.iter().zip([-5.0, 8.0, -4.0]) {
        assert!((got - C64::new(want, 0.0)).norm() < 1e-9);
    }
    let gram_cp = char_poly(&t.adjoint().matmul(&t).unwrap()).unwrap();
    for (got, want) in gram_cp.iter().zip([-12.0, 30.0, -16.0]) {
        assert!((got - C64::new(want, 0.0)).norm() < 1e-9);
    }
    // published to three decimals
    for (got, want) in gram_eigenvalues(&t).iter().zip([8.796, 2.466, 0.738]) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
}

#[test]
fn rotation_example_matches_published_values() {
    let t = rotation_example();
    let r13 = 13f64.sqrt();
    for z in eigenvalues(&t).unwrap() {
        assert!((z.re - 2.0).abs() < 1e-12 && (z.im.abs() - 3.0).abs() < 1e-12);
        assert!((z.norm() - r13).abs() < 1e-12);
    }
    for s in singular_values(&t) {
        assert!((s - r13).abs() < 1e-12);
    }
    let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
    assert_eq!(cert.verdict, HVerdict::NotRealSpectrum);
}

#[test]
fn singular_values_match_jacobi_on_gram() {
    for i in 0..20 {
        let t = corpus::sample(CorpusKind::RandomDense, 3 + i % 6, 5, i as u64, corpus::DEFAULT_KAPPA_CAP);
        let a = real_rows(&t);
        if t.inner().iter().any(|z| z.im != 0.0) {
            continue;
        }
        let oracle: Vec<f64> = jacobi_eigenvalues(gram(&a)).iter().map(|x| x.max(0.0).sqrt()).collect();
        let got = singular_values(&t);
        for (g, o) in got.iter().zip(&oracle) {
            assert!(close(*g, *o, 1e-9), "{g} vs {o}");
        }
        assert!(close(op_norm(&t, NormKind::Spectral), oracle[0], 1e-9));
    }
}

#[test]
fn induced_norms_match_row_and_column_sums() {
    let t = ComplexMatrix::from_real_rows(&[&[1.0, -2.0, 3.0], &[-4.0, 5.0, 0.5]]);
    assert!(close(op_norm(&t, NormKind::One), 7.0, 1e-14));
    assert!(close(op_norm(&t, NormKind::Inf), 9.5, 1e-14));
}

#[test]
fn best_rank_k_error_is_next_singular_value() {
    let t = corpus::sample(CorpusKind::RandomDense, 7, 9, 0, corpus::DEFAULT_KAPPA_CAP);
    let s = singular_values(&t);
    for k in 0..7 {
        let r = best_rank_k(&t, k, NormKind::Spectral, &SearchConfig::default()).unwrap();
        assert!(r.exact);
        let direct = op_norm(&t.sub(&r.approx).unwrap(), NormKind::Spectral);
        let want = if k < s.len() { s[k] } else { 0.0 };
        assert!(close(direct, want, 1e-9), "k={k}: {direct} vs {want}");
    }
}

/// `λ_{p,q}` straight from the definition: sort moduli by hand, weight by
/// `n^{1/p − 1/q}`, take the ℓ_q sum.
fn lorentz_oracle(x: &[f64], p: f64, q: Option<f64>) -> f64 {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    for i in 0..a.len() {
        for j in 0..a.len() - 1 - i {
            if a[j] < a[j + 1] {
                a.swap(j, j + 1);
            }
        }
    }
    match q {
        Some(q) => a
            .iter()
            .enumerate()
            .map(|(i, s)| ((i + 1) as f64).powf(q / p - 1.0) * s.powf(q))
            .sum::<f64>()
            .powf(1.0 / q),
        None => a.iter().enumerate().map(|(i, s)| ((i + 1) as f64).powf(1.0 / p) * s).fold(0.0, f64::max),
    }
}

#[test]
fn lorentz_norm_matches_literal_formula() {
    for i in 0..30 {
        let x = corpus::random_sequence(1 + i % 17, 77, i as u64);
        let re: Vec<f64> = x.values().iter().map(|z| z.norm()).collect();
        for (p, q) in [(1.0, Some(1.0)), (2.0, Some(1.0)), (0.5, Some(3.0)), (1.5, None), (3.0, Some(0.7))] {
            let lp = LorentzParams::new(p, q.map_or(ExtReal::Infinity, ExtReal::Finite)).unwrap();
            let got = lorentz_norm(&x, lp).value;
            let want = lorentz_oracle(&re, p, q);
            assert!(close(got, want, 1e-12), "p={p} q={q:?}: {got} vs {want}");
        }
    }
}

#[test]
fn approx_space_norm_matches_direct_summation() {
    let alphas: Vec<f64> = (1..=50).map(|n| 1.0 / (n as f64).powf(1.3)).collect();
    for (rho, mu) in [(0.5, 1.0), (1.0, 2.0), (0.2, 0.5)] {
        let ap = ApproxSpaceParams::new(rho, ExtReal::Finite(mu)).unwrap();
        let mut sum = 0.0;
        for (i, a) in alphas.iter().enumerate() {
            let n = (i + 1) as f64;
            sum += (n.powf(rho - 1.0 / mu) * a).powf(mu);
        }
        let want = sum.powf(1.0 / mu);
        assert!(close(approx_space_norm(&alphas, ap).unwrap().value, want, 1e-12));
    }
    let ap = ApproxSpaceParams::new(1.0, ExtReal::Infinity).unwrap();
    let want = alphas.iter().enumerate().map(|(i, a)| (i + 1) as f64 * a).fold(0.0, f64::max);
    assert!(close(approx_space_norm(&alphas, ap).unwrap().value, want, 1e-12));
}

/// `K(t) = inf_λ Σ(|f_k| − λ)_+ + tλ`; piecewise linear in λ, so the
/// infimum sits at λ = 0 or at one of the `|f_k|`.
fn k_l1_linf_oracle(f: &[f64], t: f64) -> f64 {
    std::iter::once(0.0)
        .chain(f.iter().map(|x| x.abs()))
        .map(|lam| f.iter().map(|x| (x.abs() - lam).max(0.0)).sum::<f64>() + t * lam)
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn k_functional_matches_breakpoint_enumeration() {
    for i in 0..50 {
        let f = corpus::random_sequence(12, 31, i);
        let re: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
        for t in [0.01, 0.5, 1.0, 3.7, 20.0] {
            let got = k_functional(&f, t, CoupleSpec::l1_linf()).unwrap().value;
            let want = k_l1_linf_oracle(&re, t);
            assert!(close(got, want, 1e-12), "t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn conjugated_corpus_certifies_within_cap() {
    let spec = CorpusSpec::new(CorpusKind::ConjugatedH, 6, 40, 3).unwrap();
    let grid = GridSpec { re_points: 16, im_points: 8, refine: false, ..GridSpec::default() };
    for t in spec.generate(Exec::Sequential) {
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &grid, Exec::Sequential).unwrap();
        assert_eq!(cert.verdict, HVerdict::Certified);
        let cap = cert.c_upper.unwrap();
        assert!(cap <= corpus::DEFAULT_KAPPA_CAP * (1.0 + 1e-9));
        // the sampled constant is a lower bound on the true one
        assert!(cert.c_estimate <= cap * (1.0 + 1e-6), "{} > {}", cert.c_estimate, cap);
    }
}

#[test]
fn hermitian_resolvent_constant_is_one() {
    let spec = CorpusSpec::new(CorpusKind::Hermitian, 5, 10, 8).unwrap();
    for t in spec.generate(Exec::Sequential) {
        assert!(t.is_hermitian(1e-12));
        let cert = certify_h(&t, DEFAULT_TOL_REAL_SPECTRUM, &GridSpec::default(), Exec::Sequential).unwrap();
        assert!((cert.c_estimate - 1.0).abs() < 1e-4, "{}", cert.c_estimate);
    }
}

#[test]
fn dyadic_blocks_sum_to_operator() {
    let t = corpus::sample(CorpusKind::RandomDense, 12, 4, 2, corpus::DEFAULT_KAPPA_CAP);
    let ap = ApproxSpaceParams::new(1.0, ExtReal::Finite(1.0)).unwrap();
    let d = dyadic_decompose(&t, ap, default_levels(12)).unwrap();
    let mut sum = ComplexMatrix::zeros(12, 12);
    for b in &d.blocks {
        sum = sum.add(b).unwrap();
    }
    let err = op_norm(&t.sub(&sum).unwrap(), NormKind::Spectral);
    assert!(err <= 1e-10 * singular_values(&t)[0], "{err}");
    // block n has rank at most 2^{n-2}
    for (n, b) in d.blocks.iter().enumerate().skip(2) {
        let rank = singular_values(b).iter().filter(|s| **s > 1e-10).count();
        assert!(rank <= 1 << (n - 2), "block {n} rank {rank}");
    }
}

#[test]
fn prescribed_widths_on_diagonal() {
    let target = LethargyTarget::from_fn(20, |n| 1.0 / ((n + 1) as f64).sqrt()).unwrap();
    let built = build_prescribed_widths(&target);
    assert!(built.max_relative_error < 1e-12);
    assert!(verify_width_floor(&built.matrix, &target).unwrap().pass);
    let shrunk = built.matrix.scale(C64::new(0.5, 0.0));
    let r = verify_width_floor(&shrunk, &target).unwrap();
    assert_eq!(r.first_violation, Some(0));
}

#[test]
fn seq_sample_rejects_non_finite() {
    assert!(SeqSample::from_real(&[1.0, f64::NAN]).is_err());
    assert!(SeqSample::from_real(&[]).is_err());
}
