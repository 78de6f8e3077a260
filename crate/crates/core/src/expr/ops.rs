//! Elemental operation markers and the free functions that build nodes.
//!
//! Each marker implements [`UnaryOp`] or [`BinaryOp`] for every value-type
//! combination it supports, so `sin(&x)` works for real and complex `x`, and
//! `pow` accepts (ℂ, ℂ), (ℂ, ℝ), (ℝ, ℂ) and (ℝ, ℝ) arguments.

use num_complex::Complex64;

use super::{
    Binary, BinaryOp, Component, Construct, Ex, Expression, IntoExpr, Unary, UnaryOp, ValueOf,
};

macro_rules! markers {
    ($($(#[$m:meta])* $name:ident),* $(,)?) => {
        $(
            $(#[$m])*
            #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
            pub struct $name;
        )*
    };
}

markers!(
    Add, Sub, Mul, Div, Pow, Atan2, Min, Max,
    /// `polar(r, θ) = r·e^{iθ}`.
    Polar,
    Neg,
    /// Unary plus: the identity.
    Pos,
    Sqrt, Exp, Log, Log10, Sin, Cos, Tan, Asin, Acos, Atan, Sinh, Cosh, Tanh, Asinh, Acosh,
    Atanh, Abs,
    /// `x²` without a constant exponent.
    Square,
    Conj,
    /// Riemann-sphere projection; the identity on finite values.
    Proj,
    Arg,
    /// Squared magnitude `x² + y²`.
    Norm,
);

macro_rules! unary_fns {
    ($($(#[$m:meta])* $fn_name:ident => $Op:ident),* $(,)?) => {
        $(
            $(#[$m])*
            #[inline]
            pub fn $fn_name<A: IntoExpr>(arg: A) -> Ex<Unary<$Op, A::Expr>>
            where
                $Op: UnaryOp<ValueOf<A>>,
            {
                Ex(Unary::new(arg.into_expr()))
            }
        )*
    };
}

unary_fns!(
    neg => Neg,
    pos => Pos,
    sqrt => Sqrt,
    exp => Exp,
    /// Natural logarithm.
    log => Log,
    log10 => Log10,
    sin => Sin,
    cos => Cos,
    tan => Tan,
    asin => Asin,
    acos => Acos,
    atan => Atan,
    sinh => Sinh,
    cosh => Cosh,
    tanh => Tanh,
    asinh => Asinh,
    acosh => Acosh,
    atanh => Atanh,
    /// `|x|` for reals, the modulus for complex values.
    abs => Abs,
    square => Square,
    conj => Conj,
    proj => Proj,
    arg => Arg,
    norm => Norm,
);

macro_rules! binary_fns {
    ($($(#[$m:meta])* $fn_name:ident => $Op:ident),* $(,)?) => {
        $(
            $(#[$m])*
            #[inline]
            pub fn $fn_name<A: IntoExpr, B: IntoExpr>(lhs: A, rhs: B) -> Ex<Binary<$Op, A::Expr, B::Expr>>
            where
                $Op: BinaryOp<ValueOf<A>, ValueOf<B>>,
            {
                Ex(Binary::new(lhs.into_expr(), rhs.into_expr()))
            }
        )*
    };
}

binary_fns!(
    pow => Pow,
    /// `atan2(y, x)`.
    atan2 => Atan2,
    min => Min,
    max => Max,
    polar => Polar,
);

/// Real part of a complex expression.
#[inline]
pub fn real<A>(arg: A) -> Ex<Component<A::Expr, 0>>
where
    A: IntoExpr,
    A::Expr: Expression<Value = Complex64>,
{
    Ex(Component::new(arg.into_expr()))
}

#[inline]
pub fn imag<A>(arg: A) -> Ex<Component<A::Expr, 1>>
where
    A: IntoExpr,
    A::Expr: Expression<Value = Complex64>,
{
    Ex(Component::new(arg.into_expr()))
}

/// Component `K` of any aggregated expression.
#[inline]
pub fn extract_component<const K: usize, A: IntoExpr>(arg: A) -> Ex<Component<A::Expr, K>> {
    Ex(Component::new(arg.into_expr()))
}

/// Complex number from real and imaginary parts.
#[inline]
pub fn complex<A, B>(re: A, im: B) -> Ex<Construct<Complex64, A::Expr, B::Expr>>
where
    A: IntoExpr,
    B: IntoExpr,
    A::Expr: Expression<Value = f64>,
    B::Expr: Expression<Value = f64>,
{
    Ex(Construct::new(re.into_expr(), im.into_expr()))
}
