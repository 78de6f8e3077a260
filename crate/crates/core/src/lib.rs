//! Reverse-mode algorithmic differentiation with expression templates.
//!
//! Arithmetic on [`Active`] variables builds lazy expression trees. Assigning
//! a tree to a variable records one statement on the thread's active tape:
//! either a [`JacobianTape`](tape::JacobianTape), which stores the partial
//! derivatives, or a [`PrimalTape`](tape::PrimalTape), which stores primal
//! values and recomputes partials during the reverse sweep. Complex values are
//! first-class aggregates, so a complex assignment is one fused statement
//! rather than a cascade of real ones.
//!
//! ```
//! use aggad::prelude::*;
//!
//! tape::activate(Tape::new(TapeKind::JacobianLinear));
//! let mut u = ActiveReal::new(3.0);
//! let mut v = ActiveReal::new(4.0);
//! u.register_input().unwrap();
//! v.register_input().unwrap();
//! let w = ActiveReal::from_expr(sqrt(square(&u) + square(&v)));
//! w.set_gradient(1.0).unwrap();
//! tape::evaluate_reverse().unwrap();
//! assert_eq!(w.value(), 5.0);
//! assert!((u.gradient() - 0.6).abs() < 1e-15);
//! ```

pub mod active;
pub mod aggregate;
pub mod complex;
pub mod error;
pub mod expr;
pub mod identifier;
pub mod index;
pub mod tape;
pub mod verify;

pub use active::{Active, ActiveComplex, ActiveReal};
pub use aggregate::Aggregated;
pub use error::{Result, TapeError};
pub use identifier::Identifier;

pub mod prelude {
    pub use crate::active::{Active, ActiveComplex, ActiveReal};
    pub use crate::aggregate::Aggregated;
    pub use crate::complex::PairComplex;
    pub use crate::expr::*;
    pub use crate::identifier::Identifier;
    pub use crate::tape::{self, Tape, TapeKind, TapeRecorder};
    pub use num_complex::Complex64;
}
