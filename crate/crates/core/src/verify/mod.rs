//! Derivative oracles.
//!
//! * [`fd_directional`]: central finite differences, a loose sanity gate.
//! * [`dot_product_check`]: `⟨ȳ, ẏ⟩ = ⟨x̄, ẋ⟩` between a forward run and a
//!   reverse sweep of the same recording. Both sides are AD, so the identity
//!   holds to rounding.
//! * [`op_sweep`]: every elemental operation and overload at several
//!   domain-safe points, checked with both of the above, across all four tape
//!   configurations, and against the decomposed complex implementation.
//! * [`programs`]: random mixed real/complex programs for cross-tape checks.

pub mod aliasing;
pub mod identifiers;
pub mod programs;
mod report;
mod sweep;

pub use report::{relative_error, CheckEntry, CheckReport, CheckStatus};
pub use sweep::{
    op_cases, op_sweep, op_sweep_with, projection_rule_check, required_case_names, ArgKind, OpCase,
    PairVar, Run, SweepConfig, Var, COMPLEX_OPS, REAL_OPS,
};

use crate::tape::{self, Tape, TapeKind};

/// Finite-difference settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step relative to `max(‖x‖∞, 1)`; about the cube root of machine epsilon.
    pub relative_step: f64,
    pub tolerance: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            relative_step: 6e-6,
            tolerance: 1e-6,
        }
    }
}

impl FdConfig {
    pub fn step(&self, x: &[f64]) -> f64 {
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        scale * self.relative_step
    }
}

/// `(f(x + h·dx) − f(x − h·dx)) / 2h`, or `None` if either evaluation is not
/// finite.
pub fn fd_directional<F>(mut f: F, x: &[f64], dx: &[f64], config: &FdConfig) -> Option<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x.len(), dx.len(), "direction length must match the point");
    let h = config.step(x);
    let shifted =
        |sign: f64| -> Vec<f64> { x.iter().zip(dx).map(|(a, d)| a + sign * h * d).collect() };
    let plus = f(&shifted(1.0));
    let minus = f(&shifted(-1.0));
    (plus.is_finite() && minus.is_finite()).then(|| (plus - minus) / (2.0 * h))
}

/// Absolute tolerance of the dot-product identity.
pub const DOT_PRODUCT_TOLERANCE: f64 = 1e-12;

/// `|⟨ȳ,ẏ⟩ − ⟨x̄,ẋ⟩| ≤ 1e-12·max(|⟨ȳ,ẏ⟩|, 1)`; returns the scaled error and the
/// verdict.
pub fn dot_product_check(ybar_ydot: f64, xbar_xdot: f64) -> (f64, bool) {
    let err = (ybar_ydot - xbar_xdot).abs() / ybar_ydot.abs().max(1.0);
    (err, err <= DOT_PRODUCT_TOLERANCE)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Run `f` with a fresh tape of the given kind bound to this thread, then
/// restore whatever was bound before.
pub fn with_scratch_tape<R>(kind: TapeKind, f: impl FnOnce() -> R) -> R {
    let previous = tape::activate(Tape::new(kind));
    let out = f();
    match previous {
        Some(t) => tape::activate(t),
        None => tape::deactivate(),
    };
    out
}

/// Run `f` with no tape bound, so that assignments only compute values.
pub fn without_tape<R>(f: impl FnOnce() -> R) -> R {
    let previous = tape::deactivate();
    let out = f();
    if let Some(t) = previous {
        tape::activate(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_of_square() {
        let cfg = FdConfig::default();
        let d = fd_directional(|x| x[0] * x[0], &[3.0], &[1.0], &cfg).unwrap();
        assert!((d - 6.0).abs() < 1e-6);
        assert_eq!(fd_directional(|_| 4.0, &[3.0], &[1.0], &cfg), Some(0.0));
    }

    #[test]
    fn fd_of_complex_norm() {
        let d = fd_directional(
            |z| z[0] * z[0] + z[1] * z[1],
            &[3.0, 4.0],
            &[1.0, 0.0],
            &FdConfig::default(),
        )
        .unwrap();
        assert!((d - 6.0).abs() < 1e-6);
    }

    #[test]
    fn fd_non_finite_is_inconclusive() {
        let d = fd_directional(|x| x[0].ln(), &[0.0], &[1.0], &FdConfig::default());
        assert_eq!(d, None);
    }

    #[test]
    fn dot_product_on_linear_program() {
        use crate::prelude::*;
        let (xdot, ybar) = (0.7, -1.3);
        let (lhs, rhs) = with_scratch_tape(TapeKind::JacobianReuse, || {
            tape::with_active_tape(|t| t.set_tangent_tracking(true)).unwrap();
            let mut x = ActiveReal::new(2.0);
            x.register_input().unwrap();
            x.set_tangent(xdot).unwrap();
            let y = ActiveReal::from_expr(3.0 * &x);
            y.set_gradient(ybar).unwrap();
            let ydot = y.tangent();
            tape::evaluate_reverse().unwrap();
            (ybar * ydot, x.gradient() * xdot)
        });
        assert_eq!(lhs, 3.0 * xdot * ybar);
        assert!(dot_product_check(lhs, rhs).1);
    }
}
