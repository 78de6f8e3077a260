//! Active variables.

use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex64;

use crate::aggregate::Aggregated;
use crate::error::Result;
use crate::expr::{
    self as ops, complex, Binary, BinaryOp, Ex, Expression, IntoExpr, Leaf, ValueOf,
};
use crate::identifier::Identifier;
use crate::tape::{self, TapeRecorder};

/// A value whose derivatives are tracked by the active tape.
///
/// Each real component carries one identifier. A fresh variable is passive
/// (all identifiers zero) until it is registered as an input or assigned an
/// expression with an active leaf.
pub struct Active<V: Aggregated> {
    value: V,
    ids: V::Ids,
}

pub type ActiveReal = Active<f64>;
pub type ActiveComplex = Active<Complex64>;

impl<V: Aggregated> Active<V> {
    /// A passive variable.
    pub fn new(value: V) -> Self {
        Active {
            value,
            ids: V::Ids::default(),
        }
    }

    /// A variable assigned from `rhs`.
    pub fn from_expr<R>(rhs: R) -> Self
    where
        R: IntoExpr,
        R::Expr: Expression<Value = V>,
    {
        let expr = rhs.into_expr();
        let mut out = Active::new(expr.value());
        out.assign(Ex(expr));
        out
    }

    #[inline]
    pub fn value(&self) -> V {
        self.value
    }

    pub fn ids(&self) -> &[Identifier] {
        self.ids.as_ref()
    }

    pub fn is_active(&self) -> bool {
        self.ids.as_ref().iter().any(|id| id.is_active())
    }

    /// Capture the current value and identifiers as an expression leaf.
    #[inline]
    pub fn leaf(&self) -> Leaf<V> {
        Leaf::new(self.value, self.ids)
    }

    /// Record `self = rhs` on the active tape.
    ///
    /// # Panics
    ///
    /// If the tape rejects the statement; see [`Active::try_assign`].
    pub fn assign<R>(&mut self, rhs: R)
    where
        R: IntoExpr,
        R::Expr: Expression<Value = V>,
    {
        if let Err(e) = self.try_assign(rhs) {
            panic!("{e}");
        }
    }

    /// Record `self = rhs`, reporting statements the tape cannot hold.
    pub fn try_assign<R>(&mut self, rhs: R) -> Result<()>
    where
        R: IntoExpr,
        R::Expr: Expression<Value = V>,
    {
        let expr = rhs.into_expr();
        let value = expr.value();
        let (slot, ids) = (&mut self.value, &mut self.ids);
        match tape::with_active_tape(|t| t.store_assignment(slot, ids, expr)) {
            Ok(stored) => stored,
            Err(_) => {
                self.value = value;
                self.ids = V::Ids::default();
                Ok(())
            }
        }
    }

    /// Mark the variable as an independent input of the active tape.
    pub fn register_input(&mut self) -> Result<()> {
        let (value, ids) = (self.value, &mut self.ids);
        tape::with_active_tape(|t| t.register_input(value, ids))?
    }

    /// Adjoint after a reverse sweep, one component per real component.
    pub fn gradient(&self) -> V {
        let ids = self.ids;
        tape::with_active_tape(|t| V::from_fn(|i| t.gradient(ids.as_ref()[i])))
            .unwrap_or_else(|_| V::zero())
    }

    /// Seed the adjoint before a reverse sweep. Passive components are skipped.
    pub fn set_gradient(&self, seed: V) -> Result<()> {
        let ids = self.ids;
        tape::with_active_tape(|t| {
            for (i, &id) in ids.as_ref().iter().enumerate() {
                t.set_gradient(id, seed.component(i));
            }
        })
    }

    /// Tangent recorded by the active tape when tangent tracking is on.
    pub fn tangent(&self) -> V {
        let ids = self.ids;
        tape::with_active_tape(|t| V::from_fn(|i| t.tangent(ids.as_ref()[i])))
            .unwrap_or_else(|_| V::zero())
    }

    /// Set the tangent of an input when tangent tracking is on.
    pub fn set_tangent(&self, dot: V) -> Result<()> {
        let ids = self.ids;
        tape::with_active_tape(|t| {
            for (i, &id) in ids.as_ref().iter().enumerate() {
                t.set_tangent(id, dot.component(i));
            }
        })
    }
}

impl ActiveComplex {
    /// `complex(re, im)` from two real expressions or variables.
    pub fn from_parts<A, B>(re: A, im: B) -> Self
    where
        A: IntoExpr,
        B: IntoExpr,
        A::Expr: Expression<Value = f64>,
        B::Expr: Expression<Value = f64>,
    {
        Active::from_expr(complex(re, im))
    }

    /// `complex(x, 0)`.
    pub fn from_real<A>(re: A) -> Self
    where
        A: IntoExpr,
        A::Expr: Expression<Value = f64>,
    {
        Active::from_expr(complex(re, 0.0))
    }
}

impl<V: Aggregated> Default for Active<V> {
    fn default() -> Self {
        Active::new(V::zero())
    }
}

impl From<f64> for ActiveReal {
    fn from(value: f64) -> Self {
        Active::new(value)
    }
}

impl From<Complex64> for ActiveComplex {
    fn from(value: Complex64) -> Self {
        Active::new(value)
    }
}

/// Copies are recorded as statements so that the copy owns its own
/// identifiers.
impl<V: Aggregated> Clone for Active<V> {
    fn clone(&self) -> Self {
        let mut out = Active::new(self.value);
        out.assign(self);
        out
    }
}

impl<V: Aggregated> Drop for Active<V> {
    fn drop(&mut self) {
        if self.is_active() {
            let ids = self.ids;
            tape::try_with_active_tape(|t| t.free(ids.as_ref()));
        }
    }
}

impl<V: Aggregated> fmt::Debug for Active<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Active")
            .field("value", &self.value)
            .field("ids", &self.ids)
            .finish()
    }
}

impl<V: Aggregated> IntoExpr for &Active<V> {
    type Expr = Leaf<V>;

    #[inline]
    fn into_expr(self) -> Leaf<V> {
        self.leaf()
    }
}

macro_rules! compound_assign {
    ($($Trait:ident, $method:ident, $Op:ident;)*) => {
        $(
            /// Aliasing-safe: the right-hand side captures `self` by value
            /// before the assignment updates it.
            impl<V, R> $Trait<R> for Active<V>
            where
                V: Aggregated,
                R: IntoExpr,
                ops::$Op: BinaryOp<V, ValueOf<R>, Output = V>,
            {
                fn $method(&mut self, rhs: R) {
                    let expr = Binary::<ops::$Op, _, _>::new(self.leaf(), rhs.into_expr());
                    self.assign(Ex(expr));
                }
            }
        )*
    };
}

compound_assign! {
    AddAssign, add_assign, Add;
    SubAssign, sub_assign, Sub;
    MulAssign, mul_assign, Mul;
    DivAssign, div_assign, Div;
}
