//! Complex numbers as an aggregated type.
//!
//! [`ActiveComplex`](crate::ActiveComplex) is `Active<Complex64>`: both
//! components live in one variable and every complex assignment is recorded
//! as a single multi-output statement. [`PairComplex`] is the decomposed
//! alternative that records real statements only.

mod decomposed;
mod ops;

pub use decomposed::PairComplex;
