use std::fmt;
use std::str::FromStr;

use aggad::tape::TapeKind;
use serde::Serialize;
use thiserror::Error;

/// Value type the solver runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Real,
    /// Complex numbers as a pair of real variables; every complex operation
    /// is recorded as several real statements.
    ComplexUnhandled,
    /// Complex numbers as an aggregated type; one fused assignment per update.
    ComplexHandled,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Real, Mode::ComplexUnhandled, Mode::ComplexHandled];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Real => "real",
            Mode::ComplexUnhandled => "complex-unhandled",
            Mode::ComplexHandled => "complex-handled",
        }
    }

    pub fn is_complex(self) -> bool {
        self != Mode::Real
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mode `{0}` (expected real, complex-unhandled or complex-handled)")]
pub struct ParseModeError(String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ParseModeError(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("grid must have at least 3 points per side, got {0}")]
    GridTooSmall(usize),
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("Reynolds number must be positive and finite, got {0}")]
    InvalidReynolds(f64),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("final time {0} drives 1 - 2t² to {1}, below the 0.5 limit")]
    FinalTimeTooLarge(f64, f64),
}

/// One benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurgersConfig {
    /// Points per side of the square grid.
    pub grid: usize,
    /// Explicit Euler steps. Zero makes the output the norm of the input.
    pub iterations: usize,
    pub reynolds: f64,
    pub dt: f64,
    pub mode: Mode,
    #[serde(serialize_with = "serialize_kind")]
    pub tape: TapeKind,
    pub repetitions: usize,
}

fn serialize_kind<S: serde::Serializer>(kind: &TapeKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(kind.name())
}

impl Default for BurgersConfig {
    fn default() -> Self {
        BurgersConfig {
            grid: 61,
            iterations: 16,
            reynolds: 100.0,
            dt: 1e-4,
            mode: Mode::ComplexHandled,
            tape: TapeKind::JacobianLinear,
            repetitions: 5,
        }
    }
}

impl BurgersConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid < 3 {
            return Err(ConfigError::GridTooSmall(self.grid));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ConfigError::InvalidTimeStep(self.dt));
        }
        if !(self.reynolds.is_finite() && self.reynolds > 0.0) {
            return Err(ConfigError::InvalidReynolds(self.reynolds));
        }
        if self.repetitions == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        let t = self.dt * self.iterations as f64;
        let denominator = 1.0 - 2.0 * t * t;
        if denominator < 0.5 {
            return Err(ConfigError::FinalTimeTooLarge(t, denominator));
        }
        Ok(())
    }

    /// Grid spacing on the unit square.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.grid - 1) as f64
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        BurgersConfig { mode, ..self }
    }

    pub fn with_tape(self, tape: TapeKind) -> Self {
        BurgersConfig { tape, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_round_trips() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>(), Ok(m));
        }
        assert!("complex".parse::<Mode>().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        assert_eq!(BurgersConfig::default().validate(), Ok(()));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = BurgersConfig::default();
        let bad = [
            (
                BurgersConfig { grid: 2, ..base },
                ConfigError::GridTooSmall(2),
            ),
            (
                BurgersConfig { dt: 0.0, ..base },
                ConfigError::InvalidTimeStep(0.0),
            ),
            (
                BurgersConfig {
                    reynolds: -1.0,
                    ..base
                },
                ConfigError::InvalidReynolds(-1.0),
            ),
            (
                BurgersConfig {
                    repetitions: 0,
                    ..base
                },
                ConfigError::NoRepetitions,
            ),
        ];
        for (config, err) in bad {
            assert_eq!(config.validate(), Err(err));
        }
        let late = BurgersConfig {
            dt: 0.1,
            iterations: 10,
            ..base
        };
        assert!(matches!(
            late.validate(),
            Err(ConfigError::FinalTimeTooLarge(..))
        ));
    }
}
