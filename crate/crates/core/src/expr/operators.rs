//! Operator overloads and member-style access on expressions.

use std::ops;

use num_complex::Complex64;

use super::ops as op;
use super::{Binary, BinaryOp, Component, Ex, Expression, IntoExpr, Unary, UnaryOp, ValueOf};
use crate::active::Active;
use crate::aggregate::Aggregated;
use crate::expr::Leaf;

macro_rules! binary_operators {
    ($($Trait:ident, $method:ident, $Op:ident;)*) => {
        $(
            impl<E: Expression, R: IntoExpr> ops::$Trait<R> for Ex<E>
            where
                op::$Op: BinaryOp<E::Value, ValueOf<R>>,
            {
                type Output = Ex<Binary<op::$Op, E, R::Expr>>;

                #[inline]
                fn $method(self, rhs: R) -> Self::Output {
                    Ex(Binary::new(self.0, rhs.into_expr()))
                }
            }

            impl<'a, V: Aggregated, R: IntoExpr> ops::$Trait<R> for &'a Active<V>
            where
                op::$Op: BinaryOp<V, ValueOf<R>>,
            {
                type Output = Ex<Binary<op::$Op, Leaf<V>, R::Expr>>;

                #[inline]
                fn $method(self, rhs: R) -> Self::Output {
                    Ex(Binary::new(self.leaf(), rhs.into_expr()))
                }
            }

            binary_operators!(@constant f64, $Trait, $method, $Op);
            binary_operators!(@constant Complex64, $Trait, $method, $Op);
        )*
    };
    (@constant $C:ty, $Trait:ident, $method:ident, $Op:ident) => {
        impl<E: Expression> ops::$Trait<Ex<E>> for $C
        where
            op::$Op: BinaryOp<$C, E::Value>,
        {
            type Output = Ex<Binary<op::$Op, super::Const<$C>, E>>;

            #[inline]
            fn $method(self, rhs: Ex<E>) -> Self::Output {
                Ex(Binary::new(super::Const(self), rhs.0))
            }
        }

        impl<'a, V: Aggregated> ops::$Trait<&'a Active<V>> for $C
        where
            op::$Op: BinaryOp<$C, V>,
        {
            type Output = Ex<Binary<op::$Op, super::Const<$C>, Leaf<V>>>;

            #[inline]
            fn $method(self, rhs: &'a Active<V>) -> Self::Output {
                Ex(Binary::new(super::Const(self), rhs.leaf()))
            }
        }
    };
}

binary_operators! {
    Add, add, Add;
    Sub, sub, Sub;
    Mul, mul, Mul;
    Div, div, Div;
}

impl<E: Expression> ops::Neg for Ex<E>
where
    op::Neg: UnaryOp<E::Value>,
{
    type Output = Ex<Unary<op::Neg, E>>;

    #[inline]
    fn neg(self) -> Self::Output {
        Ex(Unary::new(self.0))
    }
}

impl<V: Aggregated> ops::Neg for &Active<V>
where
    op::Neg: UnaryOp<V>,
{
    type Output = Ex<Unary<op::Neg, Leaf<V>>>;

    #[inline]
    fn neg(self) -> Self::Output {
        Ex(Unary::new(self.leaf()))
    }
}

/// `real()` and `imag()` on anything whose value is complex: variables,
/// constants and arbitrary expressions alike.
pub trait ComplexMembers: IntoExpr + Sized {
    #[inline]
    fn real(self) -> Ex<Component<Self::Expr, 0>>
    where
        Self::Expr: Expression<Value = Complex64>,
    {
        Ex(Component::new(self.into_expr()))
    }

    #[inline]
    fn imag(self) -> Ex<Component<Self::Expr, 1>>
    where
        Self::Expr: Expression<Value = Complex64>,
    {
        Ex(Component::new(self.into_expr()))
    }
}

impl<T: IntoExpr> ComplexMembers for T {}

/// Component access on any aggregated expression.
pub trait AggregateMembers: IntoExpr + Sized {
    #[inline]
    fn extract<const K: usize>(self) -> Ex<Component<Self::Expr, K>> {
        Ex(Component::new(self.into_expr()))
    }
}

impl<T: IntoExpr> AggregateMembers for T {}
