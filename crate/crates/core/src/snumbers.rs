//! Approximation numbers and Kolmogorov diameters.
//!
//! Index convention: `α_n` is the distance to operators of rank `≤ n − 1`
//! (so `α_1 = ‖T‖`) and `δ_n` the infimum of `‖Q_G T‖` over subspaces with
//! `dim G ≤ n` (so `δ_0 = ‖T‖`). Under the spectral norm both are exact:
//! `α_n = s_n`, `δ_n = s_{n+1}`. Under the one/inf norms they come from local
//! search and are upper bounds only; each entry carries an exactness flag.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{self, op_norm, singular_system, ComplexMatrix, NormKind};
use crate::search::{self, SearchConfig};

/// One s-number value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SNumber {
    pub value: f64,
    pub exact: bool,
}

fn check_n_max(t: &ComplexMatrix, n_max: usize) -> Result<()> {
    if n_max == 0 || n_max > t.min_dim() {
        return Err(Error::domain(format!(
            "n_max = {n_max} out of range 1..={} for a {}x{} matrix",
            t.min_dim(),
            t.rows(),
            t.cols()
        )));
    }
    Ok(())
}

/// Replaces each bound by the running minimum. Valid for upper bounds on a
/// non-increasing sequence: a bound on `a_{n−1}` also bounds `a_n`.
fn monotone_envelope(values: &mut [SNumber]) {
    for i in 1..values.len() {
        if values[i].value > values[i - 1].value {
            values[i].value = values[i - 1].value;
        }
    }
}

/// `α_1, …, α_{n_max}`.
pub fn approximation_numbers(
    t: &ComplexMatrix,
    nk: NormKind,
    n_max: usize,
    cfg: &SearchConfig,
) -> Result<Vec<SNumber>> {
    check_n_max(t, n_max)?;
    if nk == NormKind::Spectral {
        let s = operators::singular_values(t);
        return Ok(s[..n_max].iter().map(|&value| SNumber { value, exact: true }).collect());
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let approx = operators::best_rank_k(t, n - 1, nk, cfg)?;
        out.push(SNumber {
            value: approx.err,
            exact: approx.exact,
        });
    }
    monotone_envelope(&mut out);
    Ok(out)
}

/// Kolmogorov diameters together with the restart count spent on them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diameters {
    /// `δ_0, …, δ_{n_max−1}`.
    pub values: Vec<SNumber>,
    pub restarts: usize,
}

/// `δ_0, …, δ_{n_max−1}`.
pub fn kolmogorov_diameters(
    t: &ComplexMatrix,
    nk: NormKind,
    n_max: usize,
    cfg: &SearchConfig,
) -> Result<Diameters> {
    check_n_max(t, n_max)?;
    if nk == NormKind::Spectral {
        let s = operators::singular_values(t);
        return Ok(Diameters {
            values: s[..n_max].iter().map(|&value| SNumber { value, exact: true }).collect(),
            restarts: 0,
        });
    }
    let sys = singular_system(t);
    let mut restarts = 0;
    let mut values = Vec::with_capacity(n_max);
    for n in 0..n_max {
        if n == 0 {
            values.push(SNumber {
                value: op_norm(t, nk),
                exact: true,
            });
            continue;
        }
        let w = search::width_search(t, &sys, n, nk, cfg);
        restarts += w.restarts;
        values.push(SNumber {
            value: w.value,
            exact: false,
        });
    }
    monotone_envelope(&mut values);
    Ok(Diameters { values, restarts })
}

/// Per-index s-number records of one operator under one norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SNumberTable {
    pub n_max: usize,
    pub norm: NormKind,
    /// `α_1..α_{n_max}`.
    pub alpha: Vec<f64>,
    /// `δ_0..δ_{n_max−1}`.
    pub delta: Vec<f64>,
    /// `s_1..s_{n_max}`.
    pub singular: Vec<f64>,
    /// `|λ_1|..|λ_{n_max}|`; empty for rectangular operators.
    pub abs_eigen: Vec<f64>,
    pub alpha_exact: Vec<bool>,
    pub delta_exact: Vec<bool>,
    pub restarts: usize,
}

/// One exported row: `alpha = α_n`, `delta = δ_{n−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub singular: f64,
    pub abs_eigen: Option<f64>,
    pub exact: bool,
}

impl SNumberTable {
    pub fn compute(t: &ComplexMatrix, nk: NormKind, n_max: usize, cfg: &SearchConfig) -> Result<Self> {
        let alpha = approximation_numbers(t, nk, n_max, cfg)?;
        let delta = kolmogorov_diameters(t, nk, n_max, cfg)?;
        let singular = operators::singular_values(t)[..n_max].to_vec();
        let abs_eigen = if t.is_square() {
            let ev = operators::eigenvalues(t)?;
            ev[..n_max].iter().map(|z| z.norm()).collect()
        } else {
            Vec::new()
        };
        Ok(SNumberTable {
            n_max,
            norm: nk,
            alpha_exact: alpha.iter().map(|a| a.exact).collect(),
            alpha: alpha.iter().map(|a| a.value).collect(),
            delta_exact: delta.values.iter().map(|d| d.exact).collect(),
            delta: delta.values.iter().map(|d| d.value).collect(),
            singular,
            abs_eigen,
            restarts: delta.restarts,
        })
    }

    /// Exact spectral-norm table for all indices.
    pub fn spectral(t: &ComplexMatrix) -> Result<Self> {
        Self::compute(t, NormKind::Spectral, t.min_dim(), &SearchConfig::default())
    }

    pub fn is_exact(&self) -> bool {
        self.alpha_exact.iter().chain(&self.delta_exact).all(|e| *e)
    }

    pub fn rows(&self) -> Vec<TableRow> {
        (0..self.n_max)
            .map(|i| TableRow {
                n: i + 1,
                alpha: self.alpha[i],
                delta: self.delta[i],
                singular: self.singular[i],
                abs_eigen: self.abs_eigen.get(i).copied(),
                exact: self.alpha_exact[i] && self.delta_exact[i],
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,alpha,delta,singular,abs_eigen,exact\n");
        for r in self.rows() {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{},{}\n",
                r.n,
                r.alpha,
                r.delta,
                r.singular,
                r.abs_eigen.map(|v| format!("{v:e}")).unwrap_or_default(),
                r.exact
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCheck {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative means violated.
    pub slack: f64,
}

/// Both index alignments between `δ` and `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    /// `δ_n ≤ α_n`, `n = 1..n_max−1`. Empty when skipped.
    pub same_index: Vec<OrderCheck>,
    pub same_index_holds: Option<bool>,
    /// `δ_{n−1} ≤ α_{n+1}`, `n = 1..n_max−1`. Empty when skipped.
    pub shifted: Vec<OrderCheck>,
    pub shifted_holds: Option<bool>,
    pub notes: Vec<String>,
}

/// Compares Kolmogorov diameters with approximation numbers. Checks are only
/// meaningful when both sides are exact; otherwise they are skipped and the
/// skip is noted.
pub fn order_checks(table: &SNumberTable, tol: f64) -> OrderReport {
    let mut notes = Vec::new();
    if !table.is_exact() {
        notes.push(format!(
            "{} norm table contains upper bounds only; δ/α order checks skipped",
            table.norm
        ));
        return OrderReport {
            same_index: Vec::new(),
            same_index_holds: None,
            shifted: Vec::new(),
            shifted_holds: None,
            notes,
        };
    }
    let scale = table.alpha.first().copied().unwrap_or(0.0).max(1.0);
    let mk = |n: usize, lhs: f64, rhs: f64| OrderCheck {
        n,
        lhs,
        rhs,
        slack: rhs - lhs,
    };
    let same_index: Vec<_> = (1..table.n_max)
        .map(|n| mk(n, table.delta[n], table.alpha[n - 1]))
        .collect();
    let shifted: Vec<_> = (1..table.n_max)
        .map(|n| mk(n, table.delta[n - 1], table.alpha[n]))
        .collect();
    let holds = |v: &[OrderCheck]| v.iter().all(|c| c.slack >= -tol * scale);
    OrderReport {
        same_index_holds: Some(holds(&same_index)),
        shifted_holds: Some(holds(&shifted)),
        same_index,
        shifted,
        notes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub alpha_t: Vec<f64>,
    pub alpha_nonincreasing: bool,
    pub alpha1_sum: f64,
    pub alpha1_t_plus_alpha1_s: f64,
    pub additivity_slack: f64,
    pub additivity_holds: bool,
    /// Numerical rank of `T` at threshold `1e-10·s_1`.
    pub rank: usize,
    /// `α_{rank+1}(T)` when `rank < min(rows, cols)`.
    pub alpha_after_rank: Option<f64>,
}

/// Sanity checks of the s-number axioms on a concrete pair.
pub fn snumber_axioms_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    nk: NormKind,
    cfg: &SearchConfig,
) -> Result<AxiomReport> {
    t.check_same_shape(s)?;
    let n_max = t.min_dim();
    let alpha: Vec<f64> = approximation_numbers(t, nk, n_max, cfg)?
        .iter()
        .map(|a| a.value)
        .collect();
    let alpha_nonincreasing = alpha.windows(2).all(|w| w[1] <= w[0]);
    let sum = t.add(s)?;
    let lhs = op_norm(&sum, nk);
    let rhs = op_norm(t, nk) + op_norm(s, nk);
    let sv = operators::singular_values(t);
    let s1 = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|x| **x > 1e-10 * s1).count();
    let alpha_after_rank = (rank < n_max).then(|| alpha[rank]);
    Ok(AxiomReport {
        alpha_nonincreasing,
        alpha1_sum: lhs,
        alpha1_t_plus_alpha1_s: rhs,
        additivity_slack: rhs - lhs,
        additivity_holds: lhs <= rhs + 1e-10 * rhs.max(1.0),
        rank,
        alpha_after_rank,
        alpha_t: alpha,
    })
}
