use std::time::Instant;

use aggad::complex::PairComplex;
use aggad::expr::{norm, square};
use aggad::prelude::Complex64;
use aggad::tape::{self, TapeStatistics};
use aggad::verify::{with_scratch_tape, without_tape};
use aggad::{ActiveComplex, ActiveReal, TapeError};
use serde::Serialize;
use thiserror::Error;

use crate::config::{BurgersConfig, ConfigError, Mode};

#[derive(Debug, Error)]
pub enum BurgersError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Tape(#[from] TapeError),
    #[error("solution blew up (output {value}) for {config:?}")]
    NonFinite { value: f64, config: BurgersConfig },
}

pub type Result<T> = std::result::Result<T, BurgersError>;

/// Initial values of both velocity components on every grid point, indexed
/// `j·N + i` for `x = i·h`, `y = j·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// Exact solution at time `t`, shifted by `i` in complex modes.
pub fn exact(x: f64, y: f64, t: f64, complex: bool) -> (Complex64, Complex64) {
    let d = 1.0 - 2.0 * t * t;
    let shift = if complex { 1.0 } else { 0.0 };
    (
        Complex64::new((x + y - 2.0 * x * t) / d, shift),
        Complex64::new((x - y - 2.0 * y * t) / d, shift),
    )
}

pub fn initial_field(config: &BurgersConfig) -> Field {
    let n = config.grid;
    let h = config.spacing();
    let (u, v) = (0..n * n)
        .map(|k| {
            exact(
                (k % n) as f64 * h,
                (k / n) as f64 * h,
                0.0,
                config.mode.is_complex(),
            )
        })
        .unzip();
    Field { u, v }
}

/// One record-and-reverse pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    /// Output functional: the squared norm of the final interior solution.
    pub value: f64,
    /// Adjoints of the inputs, `u` then `v`, one entry per real component.
    pub gradient: Vec<f64>,
    pub statistics: TapeStatistics,
    pub record_seconds: f64,
    pub reverse_seconds: f64,
}

/// Averages over the repetitions of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub config: BurgersConfig,
    pub record_seconds: f64,
    pub reverse_seconds: f64,
    pub statistics: TapeStatistics,
    pub value_checksum: f64,
    /// Sum of all input adjoints.
    pub gradient_checksum: f64,
}

/// A grid value of one of the three modes.
trait Cell: Sized {
    fn passive(z: Complex64) -> Self;
    fn register(&mut self) -> std::result::Result<(), TapeError>;
    /// Explicit Euler update of the centre value `c` of the field being
    /// advanced, from its four neighbours and the two velocity components.
    #[allow(clippy::too_many_arguments)]
    fn update(
        c: &Self,
        e: &Self,
        w: &Self,
        n: &Self,
        s: &Self,
        u: &Self,
        v: &Self,
        a: f64,
        b: f64,
    ) -> Self;
    fn accumulate_norm(total: &mut ActiveReal, u: &Self, v: &Self);
    fn push_gradient(&self, out: &mut Vec<f64>);
}

// c − a·(u·(e − w) + v·(n − s)) + b·(e + w + n + s − 4c)
macro_rules! euler_update {
    ($c:expr, $e:expr, $w:expr, $n:expr, $s:expr, $u:expr, $v:expr, $a:expr, $b:expr) => {
        $c - $a * ($u * ($e - $w) + $v * ($n - $s)) + $b * ($e + $w + $n + $s - 4.0 * $c)
    };
}

impl Cell for ActiveReal {
    fn passive(z: Complex64) -> Self {
        ActiveReal::new(z.re)
    }

    fn register(&mut self) -> std::result::Result<(), TapeError> {
        self.register_input()
    }

    fn update(
        c: &Self,
        e: &Self,
        w: &Self,
        n: &Self,
        s: &Self,
        u: &Self,
        v: &Self,
        a: f64,
        b: f64,
    ) -> Self {
        ActiveReal::from_expr(euler_update!(c, e, w, n, s, u, v, a, b))
    }

    fn accumulate_norm(total: &mut ActiveReal, u: &Self, v: &Self) {
        *total += square(u) + square(v);
    }

    fn push_gradient(&self, out: &mut Vec<f64>) {
        out.push(self.gradient());
    }
}

impl Cell for ActiveComplex {
    fn passive(z: Complex64) -> Self {
        ActiveComplex::new(z)
    }

    fn register(&mut self) -> std::result::Result<(), TapeError> {
        self.register_input()
    }

    fn update(
        c: &Self,
        e: &Self,
        w: &Self,
        n: &Self,
        s: &Self,
        u: &Self,
        v: &Self,
        a: f64,
        b: f64,
    ) -> Self {
        ActiveComplex::from_expr(euler_update!(c, e, w, n, s, u, v, a, b))
    }

    fn accumulate_norm(total: &mut ActiveReal, u: &Self, v: &Self) {
        *total += norm(u) + norm(v);
    }

    fn push_gradient(&self, out: &mut Vec<f64>) {
        let g = self.gradient();
        out.extend([g.re, g.im]);
    }
}

impl Cell for PairComplex {
    fn passive(z: Complex64) -> Self {
        PairComplex::constant(z)
    }

    fn register(&mut self) -> std::result::Result<(), TapeError> {
        self.register_input()
    }

    fn update(
        c: &Self,
        e: &Self,
        w: &Self,
        n: &Self,
        s: &Self,
        u: &Self,
        v: &Self,
        a: f64,
        b: f64,
    ) -> Self {
        euler_update!(c, e, w, n, s, u, v, a, b)
    }

    fn accumulate_norm(total: &mut ActiveReal, u: &Self, v: &Self) {
        *total += &u.norm_sqr() + &v.norm_sqr();
    }

    fn push_gradient(&self, out: &mut Vec<f64>) {
        let g = self.gradient();
        out.extend([g.re, g.im]);
    }
}

/// Advance the grid and return the output functional. Inputs are registered
/// only when `record` is set.
fn solve<C: Cell>(
    config: &BurgersConfig,
    field: &Field,
    record: bool,
) -> Result<(ActiveReal, Vec<C>, Vec<C>)> {
    let n = config.grid;
    let h = config.spacing();
    let a = config.dt / (2.0 * h);
    let b = config.dt / (config.reynolds * h * h);
    let complex = config.mode.is_complex();

    let mut u0: Vec<C> = field.u.iter().map(|&z| C::passive(z)).collect();
    let mut v0: Vec<C> = field.v.iter().map(|&z| C::passive(z)).collect();
    if record {
        for cell in u0.iter_mut().chain(v0.iter_mut()) {
            cell.register()?;
        }
    }

    // The inputs stay untouched so their adjoints survive identifier reuse.
    let mut current: Option<(Vec<C>, Vec<C>)> = None;
    for step in 1..=config.iterations {
        let (u, v) = match &current {
            Some((u, v)) => (u, v),
            None => (&u0, &v0),
        };
        let t = step as f64 * config.dt;
        let mut un = Vec::with_capacity(n * n);
        let mut vn = Vec::with_capacity(n * n);
        for k in 0..n * n {
            let (i, j) = (k % n, k / n);
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                let (ue, ve) = exact(i as f64 * h, j as f64 * h, t, complex);
                un.push(C::passive(ue));
                vn.push(C::passive(ve));
            } else {
                let (e, w, no, s) = (k + 1, k - 1, k + n, k - n);
                un.push(C::update(
                    &u[k], &u[e], &u[w], &u[no], &u[s], &u[k], &v[k], a, b,
                ));
                vn.push(C::update(
                    &v[k], &v[e], &v[w], &v[no], &v[s], &u[k], &v[k], a, b,
                ));
            }
        }
        current = Some((un, vn));
    }

    let (u, v) = match &current {
        Some((u, v)) => (u, v),
        None => (&u0, &v0),
    };
    let mut total = ActiveReal::new(0.0);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            C::accumulate_norm(&mut total, &u[j * n + i], &v[j * n + i]);
        }
    }
    let value = total.value();
    if !value.is_finite() {
        return Err(BurgersError::NonFinite {
            value,
            config: *config,
        });
    }
    drop(current);
    Ok((total, u0, v0))
}

fn evaluate_on<C: Cell>(config: &BurgersConfig, field: &Field) -> Result<Evaluation> {
    with_scratch_tape(config.tape, || {
        let start = Instant::now();
        let (total, u0, v0) = solve::<C>(config, field, true)?;
        let record_seconds = start.elapsed().as_secs_f64();

        total.set_gradient(1.0)?;
        let start = Instant::now();
        tape::evaluate_reverse()?;
        let reverse_seconds = start.elapsed().as_secs_f64();

        let mut gradient = Vec::new();
        for cell in u0.iter().chain(v0.iter()) {
            cell.push_gradient(&mut gradient);
        }
        Ok(Evaluation {
            value: total.value(),
            gradient,
            statistics: tape::statistics()?,
            record_seconds,
            reverse_seconds,
        })
    })
}

/// Record the solve from `field` on a fresh tape of the configured kind,
/// seed the output adjoint with 1 and reverse.
pub fn evaluate(config: &BurgersConfig, field: &Field) -> Result<Evaluation> {
    config.validate()?;
    match config.mode {
        Mode::Real => evaluate_on::<ActiveReal>(config, field),
        Mode::ComplexHandled => evaluate_on::<ActiveComplex>(config, field),
        Mode::ComplexUnhandled => evaluate_on::<PairComplex>(config, field),
    }
}

/// The output functional alone, computed with no tape bound.
pub fn output_value(config: &BurgersConfig, field: &Field) -> Result<f64> {
    config.validate()?;
    without_tape(|| {
        Ok(match config.mode {
            Mode::Real => solve::<ActiveReal>(config, field, false)?.0.value(),
            Mode::ComplexHandled => solve::<ActiveComplex>(config, field, false)?.0.value(),
            Mode::ComplexUnhandled => solve::<PairComplex>(config, field, false)?.0.value(),
        })
    })
}

/// Run the configuration `repetitions` times from the exact initial field and
/// average the timings.
pub fn solve_burgers(config: &BurgersConfig) -> Result<BenchResult> {
    config.validate()?;
    let field = initial_field(config);
    let mut record = 0.0;
    let mut reverse = 0.0;
    let mut last = None;
    for _ in 0..config.repetitions {
        let e = evaluate(config, &field)?;
        record += e.record_seconds;
        reverse += e.reverse_seconds;
        last = Some(e);
    }
    let e = last.expect("at least one repetition");
    let reps = config.repetitions as f64;
    Ok(BenchResult {
        config: *config,
        record_seconds: record / reps,
        reverse_seconds: reverse / reps,
        statistics: e.statistics,
        value_checksum: e.value,
        gradient_checksum: e.gradient.iter().sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aggad::tape::TapeKind;

    fn small(mode: Mode, iterations: usize) -> BurgersConfig {
        BurgersConfig {
            grid: 7,
            iterations,
            mode,
            repetitions: 1,
            ..Default::default()
        }
    }

    #[test]
    fn exact_solution_at_origin_time() {
        let (u, v) = exact(0.25, 0.5, 0.0, true);
        assert_eq!(u, Complex64::new(0.75, 1.0));
        assert_eq!(v, Complex64::new(-0.25, 1.0));
        assert_eq!(exact(0.25, 0.5, 0.0, false).0.im, 0.0);
    }

    #[test]
    fn zero_iterations_gives_twice_the_interior_values() {
        for mode in Mode::ALL {
            let config = small(mode, 0);
            let field = initial_field(&config);
            let e = evaluate(&config, &field).unwrap();
            let n = config.grid;
            let width = if mode.is_complex() { 2 } else { 1 };
            for (f, values) in [&field.u, &field.v].into_iter().enumerate() {
                for (k, z) in values.iter().enumerate() {
                    let (i, j) = (k % n, k / n);
                    let interior = i > 0 && j > 0 && i < n - 1 && j < n - 1;
                    let at = (f * n * n + k) * width;
                    let expected = if interior {
                        2.0 * z
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    assert_eq!(e.gradient[at], expected.re, "{mode} {k}");
                    if mode.is_complex() {
                        assert_eq!(e.gradient[at + 1], expected.im, "{mode} {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn passive_value_matches_recorded_value() {
        for mode in Mode::ALL {
            let config = small(mode, 3);
            let field = initial_field(&config);
            assert_eq!(
                output_value(&config, &field).unwrap(),
                evaluate(&config, &field).unwrap().value
            );
        }
    }

    #[test]
    fn one_statement_per_real_update() {
        let config = BurgersConfig {
            tape: TapeKind::JacobianLinear,
            ..small(Mode::Real, 1)
        };
        let e = evaluate(&config, &initial_field(&config)).unwrap();
        let interior = 5 * 5;
        assert_eq!(e.statistics.statements(), 2 * interior + interior);
    }

    #[test]
    fn blow_up_is_reported() {
        let config = BurgersConfig {
            dt: 0.4,
            iterations: 1,
            reynolds: 1e-6,
            ..small(Mode::Real, 1)
        };
        let mut field = initial_field(&config);
        field.u.iter_mut().for_each(|z| *z *= 1e300);
        assert!(matches!(
            evaluate(&config, &field),
            Err(BurgersError::NonFinite { .. })
        ));
    }
}
