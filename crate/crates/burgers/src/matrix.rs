use aggad::tape::{TapeKind, TapeStatistics};
use serde::Serialize;

use crate::config::{BurgersConfig, Mode};
use crate::solver::{solve_burgers, BenchResult};

/// One row of the memory and timing table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub mode: String,
    pub tape: String,
    pub grid: usize,
    pub iters: usize,
    pub record_s: f64,
    pub reverse_s: f64,
    /// Statement stream (Jacobian tape) or statement headers (primal tape).
    pub stmts_bytes: usize,
    /// Argument identifiers of the Jacobian tape. Primal tapes keep theirs in
    /// the payload and report zero here.
    pub ids_bytes: usize,
    /// Jacobian entries or the primal-tape payload.
    pub jac_or_payload_bytes: usize,
    pub adjoint_bytes: usize,
    pub primal_bytes: usize,
    pub total_bytes: usize,
    pub value_checksum: f64,
    pub grad_checksum: f64,
}

impl Row {
    pub fn from_result(r: &BenchResult) -> Row {
        let (stmts, ids, data, adjoint, primal) = match r.statistics {
            TapeStatistics::Jacobian(s) => (
                s.stmts_bytes,
                s.identifier_bytes,
                s.jacobian_bytes,
                s.adjoint_bytes,
                0,
            ),
            TapeStatistics::Primal(s) => (
                s.header_bytes,
                0,
                s.payload_bytes,
                s.adjoint_bytes,
                s.primal_vector_bytes,
            ),
        };
        Row {
            mode: r.config.mode.to_string(),
            tape: r.config.tape.to_string(),
            grid: r.config.grid,
            iters: r.config.iterations,
            record_s: r.record_seconds,
            reverse_s: r.reverse_seconds,
            stmts_bytes: stmts,
            ids_bytes: ids,
            jac_or_payload_bytes: data,
            adjoint_bytes: adjoint,
            primal_bytes: primal,
            total_bytes: r.statistics.total_bytes(),
            value_checksum: r.value_checksum,
            grad_checksum: r.gradient_checksum,
        }
    }
}

/// A configuration that failed to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFailure {
    pub mode: String,
    pub tape: String,
    pub message: String,
}

/// Total-memory ratio between two modes on one tape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub tape: String,
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatrixReport {
    pub rows: Vec<Row>,
    pub failures: Vec<RowFailure>,
    /// Complex-handled over real.
    pub memory_factors: Vec<Ratio>,
    /// Complex-handled over complex-unhandled.
    pub handled_ratios: Vec<Ratio>,
}

impl MatrixReport {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn row(&self, mode: Mode, tape: TapeKind) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.mode == mode.name() && r.tape == tape.name())
    }

    fn ratio(&self, tape: TapeKind, numerator: Mode, denominator: Mode) -> Option<Ratio> {
        let top = self.row(numerator, tape)?;
        let bottom = self.row(denominator, tape)?;
        Some(Ratio {
            tape: tape.to_string(),
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
            value: top.total_bytes as f64 / bottom.total_bytes as f64,
        })
    }

    pub fn memory_factor(&self, tape: TapeKind) -> Option<f64> {
        self.ratio(tape, Mode::ComplexHandled, Mode::Real)
            .map(|r| r.value)
    }

    pub fn handled_ratio(&self, tape: TapeKind) -> Option<f64> {
        self.ratio(tape, Mode::ComplexHandled, Mode::ComplexUnhandled)
            .map(|r| r.value)
    }

    fn derive_ratios(&mut self) {
        self.memory_factors = TapeKind::ALL
            .into_iter()
            .filter_map(|t| self.ratio(t, Mode::ComplexHandled, Mode::Real))
            .collect();
        self.handled_ratios = TapeKind::ALL
            .into_iter()
            .filter_map(|t| self.ratio(t, Mode::ComplexHandled, Mode::ComplexUnhandled))
            .collect();
    }

    /// The rows as CSV with a header line.
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes to JSON")
    }
}

/// Every mode on every tape kind, built from `base`.
pub fn full_matrix(base: &BurgersConfig) -> Vec<BurgersConfig> {
    Mode::ALL
        .into_iter()
        .flat_map(|m| {
            TapeKind::ALL
                .into_iter()
                .map(move |t| base.with_mode(m).with_tape(t))
        })
        .collect()
}

/// Run each configuration in turn. Failures are collected per row.
pub fn run_matrix(configs: &[BurgersConfig]) -> MatrixReport {
    let mut report = MatrixReport::default();
    for config in configs {
        match solve_burgers(config) {
            Ok(result) => report.rows.push(Row::from_result(&result)),
            Err(e) => report.failures.push(RowFailure {
                mode: config.mode.to_string(),
                tape: config.tape.to_string(),
                message: e.to_string(),
            }),
        }
    }
    report.derive_ratios();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BurgersConfig {
        BurgersConfig {
            grid: 5,
            iterations: 1,
            repetitions: 1,
            ..Default::default()
        }
    }

    #[test]
    fn full_matrix_has_twelve_rows() {
        let report = run_matrix(&full_matrix(&tiny()));
        assert!(report.succeeded());
        assert_eq!(report.rows.len(), 12);
        assert_eq!(report.memory_factors.len(), 4);
        assert_eq!(report.handled_ratios.len(), 4);
    }

    #[test]
    fn csv_has_the_documented_columns() {
        let report = run_matrix(&[tiny()]);
        let csv = report.to_csv().unwrap();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "mode,tape,grid,iters,record_s,reverse_s,stmts_bytes,ids_bytes,jac_or_payload_bytes,\
             adjoint_bytes,primal_bytes,total_bytes,value_checksum,grad_checksum"
        );
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn failures_are_reported_per_row() {
        let bad = BurgersConfig { grid: 2, ..tiny() };
        let report = run_matrix(&[tiny(), bad]);
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.failures.len(), 1);
        assert!(!report.succeeded());
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["failures"][0]["mode"], "complex-handled");
    }
}
