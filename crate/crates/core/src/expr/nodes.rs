use std::marker::PhantomData;

use super::{AdjointSink, BinaryOp, Expression, RebuildSource, TangentSource, UnaryOp};
use crate::aggregate::Aggregated;
use crate::identifier::Identifier;

/// A variable captured by value: its primal value and one identifier per
/// component. Passive variables carry passive identifiers.
#[derive(Clone, Copy, Debug)]
pub struct Leaf<V: Aggregated> {
    pub(crate) value: V,
    pub(crate) ids: V::Ids,
}

impl<V: Aggregated> Leaf<V> {
    pub fn new(value: V, ids: V::Ids) -> Self {
        Leaf { value, ids }
    }

    pub fn passive(value: V) -> Self {
        Leaf {
            value,
            ids: V::Ids::default(),
        }
    }

    pub fn ids(&self) -> &[Identifier] {
        self.ids.as_ref()
    }
}

impl<V: Aggregated> Expression for Leaf<V> {
    type Value = V;
    const LEAVES: usize = V::ARITY;
    const CONSTANTS: usize = 0;

    #[inline]
    fn value(&self) -> V {
        self.value
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, adjoint: V, sink: &mut S) {
        for (i, &id) in self.ids.as_ref().iter().enumerate() {
            sink.leaf(id, adjoint.construct_adjoint(i));
        }
    }

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> V {
        let ids = self.ids.as_ref();
        V::from_fn(|i| {
            if ids[i].is_active() {
                seed.tangent(ids[i])
            } else {
                0.0
            }
        })
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F) {
        for (i, &id) in self.ids.as_ref().iter().enumerate() {
            f(id, self.value.component(i));
        }
    }

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, _f: &mut F) {}

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        let mut ids = V::Ids::default();
        let value = V::from_fn(|i| {
            let (id, v) = src.next_leaf();
            ids.as_mut()[i] = id;
            v
        });
        Leaf { value, ids }
    }
}

/// A literal constant. It has no identifier and receives no adjoint.
#[derive(Clone, Copy, Debug)]
pub struct Const<V>(pub V);

impl<V: Aggregated> Expression for Const<V> {
    type Value = V;
    const LEAVES: usize = 0;
    const CONSTANTS: usize = V::ARITY;

    #[inline]
    fn value(&self) -> V {
        self.0
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, _adjoint: V, _sink: &mut S) {}

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, _seed: &T) -> V {
        V::zero()
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, _f: &mut F) {}

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F) {
        for i in 0..V::ARITY {
            f(self.0.component(i));
        }
    }

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        Const(V::from_fn(|_| src.next_constant()))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Unary<Op, A>
where
    A: Expression,
    Op: UnaryOp<A::Value>,
{
    arg: A,
    value: Op::Output,
    op: PhantomData<Op>,
}

impl<Op, A> Unary<Op, A>
where
    A: Expression,
    Op: UnaryOp<A::Value>,
{
    #[inline]
    pub fn new(arg: A) -> Self {
        let value = Op::eval(arg.value());
        Unary {
            arg,
            value,
            op: PhantomData,
        }
    }
}

impl<Op, A> Expression for Unary<Op, A>
where
    A: Expression,
    Op: UnaryOp<A::Value>,
{
    type Value = Op::Output;
    const LEAVES: usize = A::LEAVES;
    const CONSTANTS: usize = A::CONSTANTS;

    #[inline]
    fn value(&self) -> Op::Output {
        self.value
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, adjoint: Op::Output, sink: &mut S) {
        let a = Op::reverse(self.arg.value(), self.value, adjoint);
        self.arg.push_adjoint(a, sink);
    }

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> Op::Output {
        Op::tangent(self.arg.value(), self.value, self.arg.tangent(seed))
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F) {
        self.arg.visit_leaves(f)
    }

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F) {
        self.arg.visit_constants(f)
    }

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        Self::new(A::rebuild(src))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Binary<Op, A, B>
where
    A: Expression,
    B: Expression,
    Op: BinaryOp<A::Value, B::Value>,
{
    lhs: A,
    rhs: B,
    value: Op::Output,
    op: PhantomData<Op>,
}

impl<Op, A, B> Binary<Op, A, B>
where
    A: Expression,
    B: Expression,
    Op: BinaryOp<A::Value, B::Value>,
{
    #[inline]
    pub fn new(lhs: A, rhs: B) -> Self {
        let value = Op::eval(lhs.value(), rhs.value());
        Binary {
            lhs,
            rhs,
            value,
            op: PhantomData,
        }
    }
}

impl<Op, A, B> Expression for Binary<Op, A, B>
where
    A: Expression,
    B: Expression,
    Op: BinaryOp<A::Value, B::Value>,
{
    type Value = Op::Output;
    const LEAVES: usize = A::LEAVES + B::LEAVES;
    const CONSTANTS: usize = A::CONSTANTS + B::CONSTANTS;

    #[inline]
    fn value(&self) -> Op::Output {
        self.value
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, adjoint: Op::Output, sink: &mut S) {
        let (a, b) = Op::reverse(self.lhs.value(), self.rhs.value(), self.value, adjoint);
        self.lhs.push_adjoint(a, sink);
        self.rhs.push_adjoint(b, sink);
    }

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> Op::Output {
        Op::tangent(
            self.lhs.value(),
            self.rhs.value(),
            self.value,
            self.lhs.tangent(seed),
            self.rhs.tangent(seed),
        )
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F) {
        self.lhs.visit_leaves(f);
        self.rhs.visit_leaves(f);
    }

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F) {
        self.lhs.visit_constants(f);
        self.rhs.visit_constants(f);
    }

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        let lhs = A::rebuild(src);
        let rhs = B::rebuild(src);
        Self::new(lhs, rhs)
    }
}

/// Component `K` of an aggregated expression: the vector access `d[K]`.
#[derive(Clone, Copy, Debug)]
pub struct Component<A, const K: usize> {
    arg: A,
}

impl<A: Expression, const K: usize> Component<A, K> {
    #[inline]
    pub fn new(arg: A) -> Self {
        assert!(
            K < <A::Value as Aggregated>::ARITY,
            "component {K} out of range for arity {}",
            <A::Value as Aggregated>::ARITY
        );
        Component { arg }
    }
}

impl<A: Expression, const K: usize> Expression for Component<A, K> {
    type Value = f64;
    const LEAVES: usize = A::LEAVES;
    const CONSTANTS: usize = A::CONSTANTS;

    #[inline]
    fn value(&self) -> f64 {
        self.arg.value().component(K)
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, adjoint: f64, sink: &mut S) {
        self.arg
            .push_adjoint(<A::Value as Aggregated>::access_adjoint(K, adjoint), sink);
    }

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> f64 {
        self.arg.tangent(seed).component(K)
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F) {
        self.arg.visit_leaves(f)
    }

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F) {
        self.arg.visit_constants(f)
    }

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        Self::new(A::rebuild(src))
    }
}

/// Construction of an arity-two aggregate from two real expressions.
#[derive(Clone, Copy, Debug)]
pub struct Construct<V, A, B> {
    first: A,
    second: B,
    value: V,
}

impl<V, A, B> Construct<V, A, B>
where
    V: Aggregated,
    A: Expression<Value = f64>,
    B: Expression<Value = f64>,
{
    #[inline]
    pub fn new(first: A, second: B) -> Self {
        assert_eq!(
            V::ARITY,
            2,
            "two-argument construction needs an arity-two aggregate"
        );
        let parts = [first.value(), second.value()];
        Construct {
            first,
            second,
            value: V::from_fn(|i| parts[i]),
        }
    }
}

impl<V, A, B> Expression for Construct<V, A, B>
where
    V: Aggregated,
    A: Expression<Value = f64>,
    B: Expression<Value = f64>,
{
    type Value = V;
    const LEAVES: usize = A::LEAVES + B::LEAVES;
    const CONSTANTS: usize = A::CONSTANTS + B::CONSTANTS;

    #[inline]
    fn value(&self) -> V {
        self.value
    }

    #[inline]
    fn push_adjoint<S: AdjointSink>(&self, adjoint: V, sink: &mut S) {
        self.first.push_adjoint(adjoint.construct_adjoint(0), sink);
        self.second.push_adjoint(adjoint.construct_adjoint(1), sink);
    }

    #[inline]
    fn tangent<T: TangentSource + ?Sized>(&self, seed: &T) -> V {
        let parts = [self.first.tangent(seed), self.second.tangent(seed)];
        V::from_fn(|i| parts[i])
    }

    #[inline]
    fn visit_leaves<F: FnMut(Identifier, f64)>(&self, f: &mut F) {
        self.first.visit_leaves(f);
        self.second.visit_leaves(f);
    }

    #[inline]
    fn visit_constants<F: FnMut(f64)>(&self, f: &mut F) {
        self.first.visit_constants(f);
        self.second.visit_constants(f);
    }

    #[inline]
    fn rebuild(src: &mut RebuildSource<'_>) -> Self {
        let first = A::rebuild(src);
        let second = B::rebuild(src);
        Self::new(first, second)
    }
}
