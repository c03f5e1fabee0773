//! Machine-readable results of identity checks.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    #[serde(rename = "test")]
    pub id: String,
    /// The identity being checked, in words.
    pub anchor: String,
    #[serde(rename = "defect")]
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl CheckResult {
    pub fn new(suite: &str, id: &str, anchor: &str, max_defect: f64, tolerance: f64) -> Self {
        Self {
            suite: suite.into(),
            id: id.into(),
            anchor: anchor.into(),
            max_defect,
            tolerance,
            pass: max_defect < tolerance,
            wall_ms: None,
        }
    }

    /// A check that must come out *above* a threshold, e.g. a counterexample witness.
    /// `pass` holds when the defect exceeds `threshold`.
    pub fn witness(suite: &str, id: &str, anchor: &str, defect: f64, threshold: f64) -> Self {
        Self { pass: defect > threshold, ..Self::new(suite, id, anchor, defect, threshold) }
    }
}

/// Runs `f` and records its defect and wall time.
pub fn timed(suite: &str, id: &str, anchor: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> Result<CheckResult> {
    let start = Instant::now();
    let d = f()?;
    let mut r = CheckResult::new(suite, id, anchor, d, tol);
    r.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(seed: u64, mut results: Vec<CheckResult>) -> Self {
        results.sort_by(|a, b| (&a.suite, &a.id).cmp(&(&b.suite, &b.id)));
        Self { seed, results }
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    /// JSON, optionally with the wall-time fields removed so that runs with the same
    /// seed compare byte for byte.
    pub fn to_json(&self, with_timing: bool) -> String {
        let mut r = self.clone();
        if !with_timing {
            r.results.iter_mut().for_each(|c| c.wall_ms = None);
        }
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,test,defect,tolerance,pass,wall_ms\n");
        for r in &self.results {
            out.push_str(&format!(
                "{},{},{:e},{:e},{},{}\n",
                r.suite,
                r.id,
                r.max_defect,
                r.tolerance,
                r.pass,
                r.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default()
            ));
        }
        out
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        self.results
            .iter()
            .map(|r| {
                format!(
                    "[{}] {}/{}: defect {:.3e} (tol {:.1e}) {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.suite,
                    r.id,
                    r.max_defect,
                    r.tolerance,
                    r.anchor
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_and_timing_strip() {
        let mut a = CheckResult::new("s", "b", "x", 1e-14, 1e-12);
        a.wall_ms = Some(3.0);
        let b = CheckResult::new("s", "a", "x", 1.0, 1e-12);
        let r = SuiteReport::new(7, vec![a, b]);
        assert_eq!(r.results[0].id, "a");
        assert!(!r.all_pass());
        assert!(!r.to_json(false).contains("wall_ms"));
        assert!(r.to_json(true).contains("wall_ms"));
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn nan_defect_fails() {
        assert!(!CheckResult::new("s", "a", "x", f64::NAN, 1.0).pass);
        assert!(CheckResult::witness("s", "w", "x", 0.5, 1e-3).pass);
    }
}
