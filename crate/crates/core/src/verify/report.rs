use std::fmt::Write as _;

use serde::Serialize;

/// `|a − b| / max(|a|, |b|, 1e-30)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-30)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The oracle could not be evaluated, e.g. a difference quotient hit NaN.
    Inconclusive,
}

/// One comparison between an AD quantity and its oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub op: String,
    pub check: String,
    pub point: Vec<f64>,
    pub analytic: f64,
    pub oracle: f64,
    pub error: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    /// Record a comparison whose error is already computed.
    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &mut self,
        op: &str,
        check: &str,
        point: &[f64],
        analytic: f64,
        oracle: f64,
        error: f64,
        tolerance: f64,
    ) {
        let status = if error <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.push(CheckEntry {
            op: op.to_owned(),
            check: check.to_owned(),
            point: point.to_vec(),
            analytic,
            oracle,
            error,
            tolerance,
            status,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries
            .iter()
            .filter(|e| e.status == CheckStatus::Fail)
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes to JSON")
    }

    /// Summary line followed by one line per failed check.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} checks: {} passed, {} failed, {} inconclusive\n",
            self.entries.len(),
            self.count(CheckStatus::Pass),
            self.count(CheckStatus::Fail),
            self.count(CheckStatus::Inconclusive),
        );
        for e in self.failures() {
            let _ = writeln!(
                out,
                "FAIL {} [{}] at {:?}: analytic {:e}, oracle {:e}, error {:e} > {:e}",
                e.op, e.check, e.point, e.analytic, e.oracle, e.error, e.tolerance
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_denominator() {
        assert_eq!(relative_error(2.0, 1.0), 0.5);
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert_eq!(relative_error(1e-31, 0.0), 1e-31 / 1e-30);
    }

    #[test]
    fn report_verdicts() {
        let mut r = CheckReport::default();
        r.record("sin(R)", "fd", &[0.5], 1.0, 1.0, 0.0, 1e-6);
        assert!(r.passed());
        r.record("cos(R)", "fd", &[0.5], 1.0, 2.0, 0.5, 1e-6);
        assert!(!r.passed());
        let text = r.to_text();
        assert!(text.starts_with("2 checks: 1 passed, 1 failed, 0 inconclusive"));
        assert!(text.contains("FAIL cos(R) [fd]"));
        assert!(r.to_json().contains("\"status\": \"fail\""));
    }
}
