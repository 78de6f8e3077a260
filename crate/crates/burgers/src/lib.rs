//! Coupled Burgers' equation on the unit square, solved with explicit Euler
//! steps and central differences, recorded on an `aggad` tape. The output is
//! the squared norm of the final interior solution; the inputs are the
//! initial values on every grid point.

pub mod check;
pub mod config;
pub mod matrix;
pub mod solver;

pub use config::{BurgersConfig, ConfigError, Mode};
pub use matrix::{full_matrix, run_matrix, MatrixReport, Row};
pub use solver::{
    evaluate, initial_field, output_value, solve_burgers, BenchResult, BurgersError, Evaluation,
    Field,
};
