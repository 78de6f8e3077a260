//! Finite-difference gate on a small instance.

use aggad::tape::TapeKind;
use aggad::verify::{
    fd_directional, relative_error, CheckEntry, CheckReport, CheckStatus, FdConfig,
};

use crate::config::{BurgersConfig, Mode};
use crate::solver::{evaluate, initial_field, output_value, Field, Result};

/// Relative tolerance of the Burgers gradient check.
pub const TOLERANCE: f64 = 1e-5;

/// The 9×9, two-step instance the gate runs on.
pub fn gate_config(mode: Mode, tape: TapeKind) -> BurgersConfig {
    BurgersConfig {
        grid: 9,
        iterations: 2,
        mode,
        tape,
        repetitions: 1,
        ..Default::default()
    }
}

fn flatten(field: &Field, complex: bool) -> Vec<f64> {
    field
        .u
        .iter()
        .chain(&field.v)
        .flat_map(|z| {
            if complex {
                vec![z.re, z.im]
            } else {
                vec![z.re]
            }
        })
        .collect()
}

fn unflatten(x: &[f64], points: usize, complex: bool) -> Field {
    let w = if complex { 2 } else { 1 };
    let at = |k: usize| {
        let re = x[k * w];
        let im = if complex { x[k * w + 1] } else { 0.0 };
        aggad::prelude::Complex64::new(re, im)
    };
    Field {
        u: (0..points).map(at).collect(),
        v: (points..2 * points).map(at).collect(),
    }
}

/// Compare every adjoint of an interior input with a central difference of
/// the output functional.
pub fn gradient_check(config: &BurgersConfig) -> Result<CheckReport> {
    let field = initial_field(config);
    let complex = config.mode.is_complex();
    let n = config.grid;
    let points = n * n;
    let x = flatten(&field, complex);
    let gradient = evaluate(config, &field)?.gradient;
    let width = x.len() / (2 * points);
    let fd = FdConfig {
        tolerance: TOLERANCE,
        ..FdConfig::default()
    };
    let op = format!("burgers/{}/{}", config.mode, config.tape);

    let mut report = CheckReport::default();
    for index in 0..x.len() {
        let k = (index / width) % points;
        let (i, j) = (k % n, k / n);
        if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
            continue;
        }
        let mut direction = vec![0.0; x.len()];
        direction[index] = 1.0;
        let f =
            |p: &[f64]| output_value(config, &unflatten(p, points, complex)).unwrap_or(f64::NAN);
        let analytic = gradient[index];
        let point = vec![index as f64];
        match fd_directional(f, &x, &direction, &fd) {
            Some(oracle) => report.record(
                &op,
                "finite-difference",
                &point,
                analytic,
                oracle,
                relative_error(analytic, oracle),
                TOLERANCE,
            ),
            None => report.push(CheckEntry {
                op: op.clone(),
                check: "finite-difference".to_owned(),
                point,
                analytic,
                oracle: f64::NAN,
                error: f64::NAN,
                tolerance: TOLERANCE,
                status: CheckStatus::Inconclusive,
            }),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_round_trips() {
        for complex in [false, true] {
            let config = gate_config(
                if complex {
                    Mode::ComplexHandled
                } else {
                    Mode::Real
                },
                TapeKind::JacobianLinear,
            );
            let field = initial_field(&config);
            let x = flatten(&field, complex);
            assert_eq!(unflatten(&x, 81, complex), field);
        }
    }

    #[test]
    fn real_gate_passes() {
        let report = gradient_check(&gate_config(Mode::Real, TapeKind::PrimalReuse)).unwrap();
        assert_eq!(report.entries.len(), 2 * 49);
        assert!(report.passed(), "{}", report.to_text());
    }
}
