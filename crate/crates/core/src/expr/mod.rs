//! Lazy expression trees.
//!
//! Overloaded operators on [`Ex`], `&Active<V>` and plain constants build a
//! tree whose type mirrors the right-hand side, e.g. `sqrt(square(&u) +
//! square(&v))` has type `Ex<Unary<Sqrt, Binary<Add, Unary<Square, Leaf<f64>>,
//! Unary<Square, Leaf<f64>>>>>`. Nothing touches a tape until the tree is
//! assigned to an active variable; the tape then stores one statement for the
//! whole tree (one per output component on a Jacobian tape).
//!
//! Every node caches its primal value when it is built. Leaves are copies of
//! the variable's value and identifiers, so a tree never borrows the variables
//! it was built from and `c *= &a`-style self references need no special
//! handling at this layer.

mod nodes;
mod operators;
mod ops;
mod real;

pub use nodes::{Binary, Component, Const, Construct, Leaf, Unary};
pub use operators::{AggregateMembers, ComplexMembers};
pub use ops::*;

use std::collections::HashMap;

use crate::aggregate::Aggregated;
use crate::identifier::Identifier;

/// Receives one `(identifier, partial)` pair per variable-leaf slot, in
/// left-to-right leaf order. Passive slots arrive with the passive identifier.
pub trait AdjointSink {
    fn leaf(&mut self, id: Identifier, partial: f64);
}

impl<F: FnMut(Identifier, f64)> AdjointSink for F {
    #[inline]
    fn leaf(&mut self, id: Identifier, partial: f64) {
        self(id, partial)
    }
}

/// Tangent lookup for active leaves. Missing entries count as zero.
pub trait TangentSource {
    fn tangent(&self, id: Identifier) -> f64;
}

impl TangentSource for HashMap<Identifier, f64> {
    fn tangent(&self, id: Identifier) -> f64 {
        self.get(&id).copied().unwrap_or(0.0)
    }
}

impl TangentSource for [f64] {
    fn tangent(&self, id: Identifier) -> f64 {
        self.get(id.index()).copied().unwrap_or(0.0)
    }
}

impl TangentSource for Vec<f64> {
    fn tangent(&self, id: Identifier) -> f64 {
        self.as_slice().tangent(id)
    }
}

/// Replays the leaves and constants of a recorded statement so that the
/// primal-value tape can rebuild the expression during the reverse sweep.
///
/// The payload is a byte stream without alignment guarantees; every value is
/// decoded from little-endian bytes.
pub struct RebuildSource<'a> {
    arg_ids: &'a [u8],
    inactive: &'a [u8],
    constants: &'a [u8],
    primal: &'a [f64],
}

impl<'a> RebuildSource<'a> {
    pub(crate) fn new(
        arg_ids: &'a [u8],
        inactive: &'a [u8],
        constants: &'a [u8],
        primal: &'a [f64],
    ) -> Self {
        RebuildSource {
            arg_ids,
            inactive,
            constants,
            primal,
        }
    }

    #[inline]
    pub fn next_leaf(&mut self) -> (Identifier, f64) {
        let (head, rest) = self.arg_ids.split_at(4);
        self.arg_ids = rest;
        let id = Identifier::new(u32::from_le_bytes(head.try_into().unwrap()));
        if id.is_active() {
            (id, self.primal[id.index()])
        } else {
            let (head, rest) = self.inactive.split_at(8);
            self.inactive = rest;
            (id, f64::from_le_bytes(head.try_into().unwrap()))
        }
    }

    #[inline]
    pub fn next_constant(&mut self) -> f64 {
        let (head, rest) = self.constants.split_at(8);
        self.constants = rest;
        f64::from_le_bytes(head.try_into().unwrap())
    }

    /// True once every section has been consumed.
    pub fn is_exhausted(&self) -> bool {
        self.arg_ids.is_empty() && self.inactive.is_empty() && self.constants.is_empty()
    }
}

/// A node of a lazy expression tree.
///
/// `LEAVES` counts variable-leaf slots (one per component of every
/// `Leaf<V>`), `CONSTANTS` counts constant slots. Both are properties of the
/// tree's type, which is what lets the primal-value tape avoid storing them.
pub trait Expression: Sized + 'static {
    type Value: Aggregated;

    const LEAVES: usize;
    const CONSTANTS: usize;

    fn value(&self) -> Self::Value;

    /// Propagate the adjoint of this node's result to every leaf slot.
    ///
    /// Every node visits all of its children even when the propagated adjoint
    /// is zero, so the sink always sees `LEAVES` calls in leaf order.
    fn push_adjoint<S: AdjointSink>(&self, adjoint: Self::Value, sink: &mut S);

    /// Forward-mode tangent of this node given tangents of the active leaves.
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> Self::Value;

    /// Visit `(identifier, value)` of every variable-leaf slot in leaf order.
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F);

    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F);

    /// Rebuild a tree of the same shape from recorded leaves and constants.
    fn rebuild(src: &mut RebuildSource<'_>) -> Self;

    /// True if at least one leaf slot carries an active identifier.
    fn has_active_leaf(&self) -> bool {
        let mut any = false;
        self.visit_leaves(&mut |id, _| any |= id.is_active());
        any
    }
}

/// Elemental operation with one argument.
pub trait UnaryOp<V: Aggregated>: Copy + Default + std::fmt::Debug + 'static {
    type Output: Aggregated;

    fn eval(arg: V) -> Self::Output;

    /// `v̄ = (∂φ/∂v)ᵀ w̄` for the real-component view of `V` and the output.
    fn reverse(arg: V, result: Self::Output, adjoint: Self::Output) -> V;

    /// `ẇ = (∂φ/∂v) v̇`.
    fn tangent(arg: V, result: Self::Output, dot: V) -> Self::Output;
}

/// Elemental operation with two arguments.
pub trait BinaryOp<L: Aggregated, R: Aggregated>:
    Copy + Default + std::fmt::Debug + 'static
{
    type Output: Aggregated;

    fn eval(lhs: L, rhs: R) -> Self::Output;

    fn reverse(lhs: L, rhs: R, result: Self::Output, adjoint: Self::Output) -> (L, R);

    fn tangent(lhs: L, rhs: R, result: Self::Output, lhs_dot: L, rhs_dot: R) -> Self::Output;
}

/// User-facing wrapper around an expression node.
///
/// Operators are implemented on `Ex<E>` so that any combination of
/// expressions, variables and constants composes into a single tree.
#[derive(Clone, Copy, Debug)]
pub struct Ex<E>(pub E);

impl<E: Expression> Ex<E> {
    #[inline]
    pub fn value(&self) -> E::Value {
        self.0.value()
    }

    #[inline]
    pub fn into_inner(self) -> E {
        self.0
    }
}

/// Anything that can stand on either side of an elemental operation.
pub trait IntoExpr {
    type Expr: Expression;
    fn into_expr(self) -> Self::Expr;
}

impl<E: Expression> IntoExpr for Ex<E> {
    type Expr = E;
    #[inline]
    fn into_expr(self) -> E {
        self.0
    }
}

impl IntoExpr for f64 {
    type Expr = Const<f64>;
    #[inline]
    fn into_expr(self) -> Const<f64> {
        Const(self)
    }
}

impl IntoExpr for num_complex::Complex64 {
    type Expr = Const<num_complex::Complex64>;
    #[inline]
    fn into_expr(self) -> Const<num_complex::Complex64> {
        Const(self)
    }
}

/// Value type of whatever `T` turns into.
pub type ValueOf<T> = <<T as IntoExpr>::Expr as Expression>::Value;

/// Tangent `ẇ` of `expr` for the given leaf tangents, computed alongside the
/// primal value. Identifiers absent from `seed` have zero tangent.
pub fn forward_sweep_dot<T: IntoExpr>(expr: T, seed: &HashMap<Identifier, f64>) -> ValueOf<T> {
    expr.into_expr().tangent(seed)
}

/// `(partial, identifier)` rows of the real Jacobian of `expr`, one row per
/// output component, in leaf order. Passive slots are included with the
/// passive identifier.
pub fn jacobian_rows<T: IntoExpr>(expr: T) -> Vec<Vec<(f64, Identifier)>> {
    let e = expr.into_expr();
    (0..<ValueOf<T> as Aggregated>::ARITY)
        .map(|k| {
            let mut row = Vec::with_capacity(<T::Expr as Expression>::LEAVES);
            e.push_adjoint(<ValueOf<T> as Aggregated>::unit(k), &mut |id, p| {
                row.push((p, id))
            });
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::{ActiveComplex, ActiveReal};
    use crate::tape::{self, use_fresh_tape, TapeKind};
    use num_complex::Complex64 as C;
    use proptest::prelude::*;

    fn leaf(value: f64, id: u32) -> Ex<Leaf<f64>> {
        Ex(Leaf::new(value, [Identifier::new(id)]))
    }

    fn cleaf(value: C, re: u32, im: u32) -> Ex<Leaf<C>> {
        Ex(Leaf::new(value, [Identifier::new(re), Identifier::new(im)]))
    }

    #[test]
    fn tangents_of_simple_trees() {
        let seed: HashMap<Identifier, f64> = [(Identifier::new(1), 1.0)].into();
        assert_eq!(forward_sweep_dot(leaf(3.0, 1) * leaf(5.0, 2), &seed), 5.0);

        let both: HashMap<Identifier, f64> =
            [(Identifier::new(1), 1.0), (Identifier::new(2), 1.0)].into();
        assert_eq!(forward_sweep_dot(leaf(3.0, 1) + leaf(5.0, 2), &both), 2.0);

        let w = sqrt(square(leaf(3.0, 1)) + square(leaf(4.0, 2)));
        assert_eq!(w.value(), 5.0);
        assert!((forward_sweep_dot(w, &seed) - 3.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn unary_plus_is_identity() {
        let x = leaf(-2.5, 1);
        assert_eq!(pos(x).value(), -2.5);
        assert_eq!(jacobian_rows(pos(x)), vec![vec![(1.0, Identifier::new(1))]]);
    }

    #[test]
    fn product_partials() {
        let rows = jacobian_rows(leaf(3.0, 1) * leaf(5.0, 2));
        assert_eq!(
            rows,
            vec![vec![(5.0, Identifier::new(1)), (3.0, Identifier::new(2))]]
        );
    }

    #[test]
    fn component_access_on_expressions() {
        let a = cleaf(C::new(1.0, 2.0), 1, 2);
        let b = cleaf(C::new(3.0, 4.0), 3, 4);
        assert_eq!((a * b).real().value(), -5.0);
        assert_eq!(cleaf(C::new(3.0, 4.0), 1, 2).imag().value(), 4.0);
        assert_eq!((a * b).extract::<1>().value(), 10.0);

        // Row of the real Jacobian of a·b restricted to a: (Re b, -Im b).
        let rows = jacobian_rows(real(a * b));
        assert_eq!(rows.len(), 1);
        assert_eq!(
            &rows[0][..2],
            &[(3.0, Identifier::new(1)), (-4.0, Identifier::new(2))]
        );
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn component_out_of_range_panics() {
        let _ = extract_component::<1, _>(leaf(1.0, 1));
    }

    #[test]
    fn one_statement_per_assignment() {
        use_fresh_tape(TapeKind::JacobianLinear);
        let mut u = ActiveReal::new(3.0);
        let mut v = ActiveReal::new(4.0);
        u.register_input().unwrap();
        v.register_input().unwrap();
        let w = ActiveReal::from_expr(sqrt(square(&u) + square(&v)));
        assert_eq!(w.value(), 5.0);
        assert_eq!(tape::statistics().unwrap().statements(), 1);

        let mut z = ActiveComplex::new(C::new(1.0, 1.0));
        z.register_input().unwrap();
        let _y = ActiveComplex::from_expr(exp(&z) * sin(&z) / (&z + 1.0) - conj(&z));
        assert_eq!(tape::statistics().unwrap().statements(), 3);
    }

    #[test]
    fn leaves_are_visited_in_order() {
        let e = leaf(1.0, 3) * (Ex(Const(2.0)) + leaf(4.0, 0)) - leaf(5.0, 7);
        let mut seen = Vec::new();
        e.0.visit_leaves(&mut |id, v| seen.push((id.raw(), v)));
        assert_eq!(seen, vec![(3, 1.0), (0, 4.0), (7, 5.0)]);
        let mut consts = Vec::new();
        e.0.visit_constants(&mut |c| consts.push(c));
        assert_eq!(consts, vec![2.0]);
        assert_eq!(<Binary<Sub, Binary<Mul, Leaf<f64>, Binary<Add, Const<f64>, Leaf<f64>>>, Leaf<f64>> as Expression>::LEAVES, 3);
    }

    proptest! {
        #[test]
        fn evaluation_is_deterministic(x in -3.0f64..3.0, y in 0.1f64..3.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let build = || {
                let a = leaf(x, 1);
                let b = leaf(y, 2);
                let z = cleaf(C::new(re, im), 3, 4);
                let r = atan2(a, b) * exp(a) + log(b) / max(a, b) - tanh(a * b);
                let c = sqrt(z * z + 1.0) * cos(z) + pow(z, b);
                (r.value(), c.value())
            };
            let (r1, c1) = build();
            let (r2, c2) = build();
            prop_assert_eq!(r1.to_bits(), r2.to_bits());
            prop_assert_eq!(c1.re.to_bits(), c2.re.to_bits());
            prop_assert_eq!(c1.im.to_bits(), c2.im.to_bits());
        }
    }
}
