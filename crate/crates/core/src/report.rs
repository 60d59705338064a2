//! Machine-readable experiment reports.

use serde::Serialize;
use serde_json::Value;

/// Anchors a check record may cite. Each names a result or example of the
/// theory the check exercises.
pub const ANCHORS: &[&str] = &[
    "schmidt-representation",
    "singular-values",
    "h-operator",
    "approximation-numbers",
    "kolmogorov-diameters",
    "markus-chain",
    "markus-corollary",
    "example-not-in-lq",
    "example-defective-real-spectrum",
    "example-non-real-spectrum",
    "self-adjoint-constant",
    "quasi-norm",
    "approximation-space",
    "lorentz-space",
    "k-functional",
    "interpolation-space",
    "lorentz-interpolation",
    "jackson-bernstein",
    "embedding-second-index",
    "eigenvalue-approximation-space",
    "inclusion",
    "dyadic-representation",
    "kernel-operator",
    "prescribed-widths",
    "width-order",
    "corpus",
];

pub fn is_anchor(a: &str) -> bool {
    ANCHORS.contains(&a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The computed value is an upper or lower bound, not an exact check.
    BoundOnly,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: &'static str,
    pub values: Value,
    pub slack: Option<f64>,
    pub verdict: Verdict,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: &'static str, values: impl Serialize, slack: Option<f64>, verdict: Verdict) -> Self {
        debug_assert!(is_anchor(anchor), "unknown anchor {anchor}");
        CheckRecord {
            name: name.into(),
            anchor,
            values: serde_json::to_value(values).expect("serializable"),
            slack,
            verdict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub bound_only: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    /// Present only when timing was requested; omitted otherwise so reports
    /// are byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn new(command: impl Into<String>, seed: u64, config: impl Serialize) -> Self {
        ExperimentReport {
            tool: "snlab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed,
            config: serde_json::to_value(config).expect("serializable"),
            records: Vec::new(),
            summary: Summary::default(),
            wall_time_ms: None,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        match record.verdict {
            Verdict::Pass => self.summary.pass += 1,
            Verdict::Fail => self.summary.fail += 1,
            Verdict::BoundOnly => self.summary.bound_only += 1,
        }
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        for r in records {
            self.push(r);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// One line per record: `name,anchor,verdict,slack`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,anchor,verdict,slack\n");
        for r in &self.records {
            let verdict = match r.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::BoundOnly => "bound-only",
            };
            let slack = r.slack.map(|s| format!("{s:e}")).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.name, r.anchor, verdict, slack));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts() {
        let mut r = ExperimentReport::new("test", 1, serde_json::json!({}));
        r.push(CheckRecord::new("a", "h-operator", 1.0, Some(0.0), Verdict::Pass));
        r.push(CheckRecord::new("b", "inclusion", 1.0, None, Verdict::BoundOnly));
        assert!(r.all_pass());
        r.push(CheckRecord::new("c", "inclusion", 1.0, Some(-1.0), Verdict::Fail));
        assert!(!r.all_pass());
        assert_eq!(r.summary, Summary { pass: 1, fail: 1, bound_only: 1 });
        assert!(!r.to_json().contains("wall_time"));
        assert_eq!(r.to_csv().lines().count(), 4);
    }

    #[test]
    fn anchors_are_unique() {
        let mut a = ANCHORS.to_vec();
        a.sort();
        a.dedup();
        assert_eq!(a.len(), ANCHORS.len());
    }
}
