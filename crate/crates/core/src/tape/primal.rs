//! Primal-value taping.
//!
//! Each assignment becomes one statement regardless of the arity of its
//! left-hand side. A statement is an 11-byte header on the header stack
//!
//! | bytes | field |
//! |-------|-------|
//! | 1 | number of inactive arguments |
//! | 8 | handle of the reverse routine |
//! | 2 | payload size in bytes |
//!
//! and a payload on the byte stream holding, in order, the left-hand-side
//! identifiers (4·p), the primal values those identifiers held before the
//! assignment (8·p), one identifier per variable-leaf slot (4·d, passive slots
//! included as zero), the values of the passive slots (8 each) and the
//! literal constants (8 each). `p`, `d` and the constant count are properties
//! of the expression shape and live in the handle registry, not on the tape.
//!
//! The reverse sweep restores the old left-hand-side values, rebuilds the
//! expression from the primal vector and the payload, and evaluates its
//! partials on the fly. Afterwards the primal vector is back at its state
//! before recording; it is replayed forward lazily when the tape is used again.

use std::any::{type_name, TypeId};
use std::collections::HashMap;
use std::marker::PhantomData;

use serde::Serialize;

use super::jacobian::adjoint_bytes;
use super::stack::{ChunkedStack, DEFAULT_CHUNK_BYTES};
use super::{Shadow, TapeRecorder, TapeStatistics};
use crate::aggregate::Aggregated;
use crate::error::{Result, TapeError};
use crate::expr::{Expression, RebuildSource};
use crate::identifier::Identifier;
use crate::index::IndexManager;

pub const HEADER_BYTES: usize = 11;
const MAX_PAYLOAD: usize = u16::MAX as usize;

/// Byte counts of a primal-value tape.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PrimalStatistics {
    pub header_bytes: usize,
    pub payload_bytes: usize,
    pub primal_vector_bytes: usize,
    pub adjoint_bytes: usize,
    pub registry_entries: usize,
    pub total_bytes: usize,
    /// Statements, input registrations included.
    #[serde(skip)]
    pub statements: usize,
    #[serde(skip)]
    pub input_statements: usize,
    #[serde(skip)]
    pub reserved_bytes: usize,
}

impl PrimalStatistics {
    /// Bytes of the header stack and the payload stream together.
    pub fn recorded_bytes(&self) -> usize {
        self.header_bytes + self.payload_bytes
    }
}

/// Payload of one statement, split into its sections.
#[derive(Debug, Clone, Copy)]
pub struct StatementView<'a> {
    pub lhs_ids: &'a [u8],
    pub old_values: &'a [u8],
    pub arg_ids: &'a [u8],
    pub inactive: &'a [u8],
    pub constants: &'a [u8],
}

impl StatementView<'_> {
    pub fn lhs(&self, k: usize) -> usize {
        read_u32(&self.lhs_ids[4 * k..]) as usize
    }

    pub fn old_value(&self, k: usize) -> f64 {
        read_f64(&self.old_values[8 * k..])
    }
}

type ReverseFn = fn(&StatementView<'_>, &[f64], &mut [f64]);
type ForwardFn = fn(&StatementView<'_>, &mut [f64]);

/// What the registry knows about a statement shape.
#[derive(Debug, Clone, Copy)]
pub struct HandleEntry {
    pub name: &'static str,
    /// Variable-leaf slots.
    pub leaves: usize,
    /// Left-hand-side components.
    pub arity: usize,
    pub constants: usize,
    reverse: ReverseFn,
    forward: ForwardFn,
}

impl HandleEntry {
    /// Payload size for a statement of this shape.
    pub fn payload_bytes(&self, n_inactive: usize) -> usize {
        12 * self.arity + 4 * self.leaves + 8 * n_inactive + 8 * self.constants
    }

    pub fn view<'a>(&self, payload: &'a [u8], n_inactive: usize) -> StatementView<'a> {
        let (lhs_ids, rest) = payload.split_at(4 * self.arity);
        let (old_values, rest) = rest.split_at(8 * self.arity);
        let (arg_ids, rest) = rest.split_at(4 * self.leaves);
        let (inactive, constants) = rest.split_at(8 * n_inactive);
        StatementView {
            lhs_ids,
            old_values,
            arg_ids,
            inactive,
            constants,
        }
    }
}

trait Shape: 'static {
    const LEAVES: usize;
    const ARITY: usize;
    const CONSTANTS: usize;
    fn reverse(view: &StatementView<'_>, primal: &[f64], adjoints: &mut [f64]);
    fn forward(view: &StatementView<'_>, primal: &mut [f64]);
}

struct ExprShape<E>(PhantomData<E>);

impl<E: Expression> Shape for ExprShape<E> {
    const LEAVES: usize = E::LEAVES;
    const ARITY: usize = <E::Value as Aggregated>::ARITY;
    const CONSTANTS: usize = E::CONSTANTS;

    fn reverse(view: &StatementView<'_>, primal: &[f64], adjoints: &mut [f64]) {
        let mut src = RebuildSource::new(view.arg_ids, view.inactive, view.constants, primal);
        let expr = E::rebuild(&mut src);
        for k in (0..Self::ARITY).rev() {
            let lhs = view.lhs(k);
            let w = adjoints[lhs];
            adjoints[lhs] = 0.0;
            let seed = <E::Value as Aggregated>::unit(k);
            expr.push_adjoint(seed, &mut |id: Identifier, partial: f64| {
                if id.is_active() && partial != 0.0 {
                    adjoints[id.index()] += partial * w;
                }
            });
        }
    }

    fn forward(view: &StatementView<'_>, primal: &mut [f64]) {
        let value = {
            let mut src = RebuildSource::new(view.arg_ids, view.inactive, view.constants, primal);
            E::rebuild(&mut src).value()
        };
        for k in 0..Self::ARITY {
            primal[view.lhs(k)] = value.component(k);
        }
    }
}

/// Registration of an input under identifier reuse: the value sits in the
/// constant section so that forward replay can put it back.
struct InputShape<V>(PhantomData<V>);

impl<V: Aggregated> Shape for InputShape<V> {
    const LEAVES: usize = 0;
    const ARITY: usize = V::ARITY;
    const CONSTANTS: usize = V::ARITY;

    fn reverse(_view: &StatementView<'_>, _primal: &[f64], _adjoints: &mut [f64]) {}

    fn forward(view: &StatementView<'_>, primal: &mut [f64]) {
        for k in 0..Self::ARITY {
            primal[view.lhs(k)] = read_f64(&view.constants[8 * k..]);
        }
    }
}

/// Handles keyed by the type of the recorded shape.
#[derive(Debug, Default, Clone)]
pub struct HandleRegistry {
    by_type: HashMap<TypeId, u64>,
    entries: Vec<HandleEntry>,
}

impl HandleRegistry {
    fn handle<S: Shape>(&mut self) -> u64 {
        let entries = &mut self.entries;
        *self.by_type.entry(TypeId::of::<S>()).or_insert_with(|| {
            entries.push(HandleEntry {
                name: type_name::<S>(),
                leaves: S::LEAVES,
                arity: S::ARITY,
                constants: S::CONSTANTS,
                reverse: S::reverse,
                forward: S::forward,
            });
            (entries.len() - 1) as u64
        })
    }

    /// Handle of the statement shape of `E`, registering it on first use.
    pub fn register<E: Expression>(&mut self) -> u64 {
        self.handle::<ExprShape<E>>()
    }

    pub fn get(&self, handle: u64) -> Result<&HandleEntry> {
        usize::try_from(handle)
            .ok()
            .and_then(|i| self.entries.get(i))
            .ok_or(TapeError::UnknownHandle(handle))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Decoded statement header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub n_inactive: u8,
    pub handle: u64,
    pub dyn_size: u16,
}

impl Header {
    fn encode(&self) -> [u8; HEADER_BYTES] {
        let mut out = [0u8; HEADER_BYTES];
        out[0] = self.n_inactive;
        out[1..9].copy_from_slice(&self.handle.to_le_bytes());
        out[9..].copy_from_slice(&self.dyn_size.to_le_bytes());
        out
    }

    fn decode(bytes: &[u8]) -> Self {
        Header {
            n_inactive: bytes[0],
            handle: u64::from_le_bytes(bytes[1..9].try_into().unwrap()),
            dyn_size: u16::from_le_bytes([bytes[9], bytes[10]]),
        }
    }
}

/// Payload size of a statement, checked against the 2-byte size field.
pub fn payload_size(
    arity: usize,
    leaves: usize,
    n_inactive: usize,
    constants: usize,
) -> Result<usize> {
    if n_inactive > u8::MAX as usize {
        return Err(TapeError::TooManyInactive(n_inactive));
    }
    let size = 12 * arity + 4 * leaves + 8 * n_inactive + 8 * constants;
    if size > MAX_PAYLOAD {
        return Err(TapeError::StatementTooLarge(size));
    }
    Ok(size)
}

#[inline]
fn read_u32(bytes: &[u8]) -> u32 {
    u32::from_le_bytes(bytes[..4].try_into().unwrap())
}

#[inline]
fn read_f64(bytes: &[u8]) -> f64 {
    f64::from_le_bytes(bytes[..8].try_into().unwrap())
}

#[derive(Debug)]
pub struct PrimalTape<I: IndexManager> {
    headers: ChunkedStack<u8>,
    payload: ChunkedStack<u8>,
    statement_count: usize,
    input_count: usize,
    primal: Vec<f64>,
    // false after a reverse sweep until the forward replay has run
    primal_current: bool,
    shadow: Shadow,
    registry: HandleRegistry,
    manager: I,
    recording: bool,
    scratch: Vec<u8>,
    fresh: Vec<Identifier>,
}

impl<I: IndexManager> Default for PrimalTape<I> {
    fn default() -> Self {
        Self::with_chunk_bytes(DEFAULT_CHUNK_BYTES)
    }
}

impl<I: IndexManager> PrimalTape<I> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_chunk_bytes(chunk_bytes: usize) -> Self {
        PrimalTape {
            headers: ChunkedStack::new(chunk_bytes),
            payload: ChunkedStack::new(chunk_bytes),
            statement_count: 0,
            input_count: 0,
            primal: Vec::new(),
            primal_current: true,
            shadow: Shadow::default(),
            registry: HandleRegistry::default(),
            manager: I::default(),
            recording: true,
            scratch: Vec::new(),
            fresh: Vec::new(),
        }
    }

    pub fn index_manager(&self) -> &I {
        &self.manager
    }

    pub fn registry(&self) -> &HandleRegistry {
        &self.registry
    }

    /// Statements recorded, input registrations included.
    pub fn statement_count(&self) -> usize {
        self.statement_count
    }

    /// The primal vector as it is now. Right after a reverse sweep it holds
    /// the values from before recording; the next use of the tape replays the
    /// statements forward.
    pub fn primal_vector(&self) -> &[f64] {
        &self.primal
    }

    /// Headers and payloads in recording order.
    pub fn statements(&self) -> Vec<(Header, &[u8])> {
        let mut hc = self.headers.start();
        let mut pc = self.payload.start();
        (0..self.statement_count)
            .map(|_| {
                let header = Header::decode(self.headers.take_front(&mut hc, HEADER_BYTES));
                (
                    header,
                    self.payload.take_front(&mut pc, header.dyn_size as usize),
                )
            })
            .collect()
    }

    pub fn primal_statistics(&self) -> PrimalStatistics {
        let header_bytes = self.headers.len();
        let payload_bytes = self.payload.len();
        let vector_bytes = adjoint_bytes(self.manager.max_identifier());
        PrimalStatistics {
            header_bytes,
            payload_bytes,
            primal_vector_bytes: vector_bytes,
            adjoint_bytes: vector_bytes,
            registry_entries: self.registry.len(),
            total_bytes: header_bytes + payload_bytes + 2 * vector_bytes,
            statements: self.statement_count,
            input_statements: self.input_count,
            reserved_bytes: self.headers.reserved_bytes() + self.payload.reserved_bytes(),
        }
    }

    /// Walk the payload stream front to back using only the size fields and
    /// check that every statement's size matches its registered shape and
    /// that the walk consumes the stream exactly.
    pub fn check_layout(&self) -> Result<()> {
        let mut consumed = 0;
        for (index, (header, _)) in self.statements().into_iter().enumerate() {
            let entry = self.registry.get(header.handle)?;
            let expected = entry.payload_bytes(header.n_inactive as usize);
            if expected != header.dyn_size as usize {
                return Err(TapeError::PayloadMismatch {
                    index,
                    expected,
                    found: header.dyn_size as usize,
                });
            }
            consumed += header.dyn_size as usize;
        }
        if consumed != self.payload.len() {
            return Err(TapeError::PayloadMismatch {
                index: self.statement_count,
                expected: self.payload.len(),
                found: consumed,
            });
        }
        Ok(())
    }

    fn ensure_primal(&mut self) {
        let n = self.manager.max_identifier().index() + 1;
        if self.primal.len() < n {
            self.primal.resize(n, 0.0);
        }
    }

    fn replay_forward(&mut self) {
        if self.primal_current {
            return;
        }
        self.ensure_primal();
        let mut hc = self.headers.start();
        let mut pc = self.payload.start();
        for _ in 0..self.statement_count {
            let header = Header::decode(self.headers.take_front(&mut hc, HEADER_BYTES));
            let bytes = self.payload.take_front(&mut pc, header.dyn_size as usize);
            let entry = self
                .registry
                .get(header.handle)
                .expect("statement handle recorded by this tape");
            let view = entry.view(bytes, header.n_inactive as usize);
            (entry.forward)(&view, &mut self.primal);
        }
        self.primal_current = true;
    }

    fn new_lhs_ids(&mut self, lhs: &[Identifier]) -> Result<Vec<Identifier>> {
        let mut fresh = std::mem::take(&mut self.fresh);
        fresh.clear();
        fresh.resize(lhs.len(), Identifier::PASSIVE);
        if lhs.len() == 1 {
            fresh[0] = self.manager.assign_scalar(lhs[0])?;
        } else {
            self.manager.acquire_aggregate(lhs, &mut fresh)?;
        }
        Ok(fresh)
    }

    /// Append lhs ids, old values and the new values' primal-vector update.
    fn write_lhs<V: Aggregated>(&mut self, new_ids: &[Identifier], value: V) {
        self.ensure_primal();
        for id in new_ids {
            self.scratch.extend_from_slice(&id.to_le_bytes());
        }
        for (k, id) in new_ids.iter().enumerate() {
            let slot = &mut self.primal[id.index()];
            self.scratch.extend_from_slice(&slot.to_le_bytes());
            *slot = value.component(k);
        }
    }

    fn push_statement(&mut self, n_inactive: usize, handle: u64) {
        let header = Header {
            n_inactive: n_inactive as u8,
            handle,
            dyn_size: self.scratch.len() as u16,
        };
        self.headers.push_block(&header.encode());
        self.payload.push_block(&self.scratch);
        self.statement_count += 1;
    }

    fn release(&mut self, ids: &mut [Identifier]) {
        for id in ids.iter_mut() {
            self.manager.free(*id);
            *id = Identifier::PASSIVE;
        }
    }
}

impl<I: IndexManager> TapeRecorder for PrimalTape<I> {
    fn register_input<V: Aggregated>(&mut self, value: V, ids: &mut V::Ids) -> Result<()> {
        self.replay_forward();
        let fresh = self.new_lhs_ids(ids.as_ref())?;
        ids.as_mut().copy_from_slice(&fresh);
        self.scratch.clear();
        self.write_lhs(&fresh, value);
        self.fresh = fresh;
        // Linear identifiers are never overwritten, so only reuse needs the
        // input's value back during forward replay.
        if self.recording && I::REUSES {
            for k in 0..V::ARITY {
                self.scratch
                    .extend_from_slice(&value.component(k).to_le_bytes());
            }
            let handle = self.registry.handle::<InputShape<V>>();
            self.push_statement(0, handle);
            self.input_count += 1;
        }
        self.shadow.write_tangents::<V>(ids, Some(V::zero()));
        Ok(())
    }

    fn store_assignment<E: Expression>(
        &mut self,
        value: &mut E::Value,
        ids: &mut <E::Value as Aggregated>::Ids,
        rhs: E,
    ) -> Result<()> {
        let new_value = rhs.value();
        if !self.recording {
            self.release(ids.as_mut());
            *value = new_value;
            return Ok(());
        }
        if !rhs.has_active_leaf() && !ids.as_ref().iter().any(|id| id.is_active()) {
            *value = new_value;
            return Ok(());
        }

        let mut n_inactive = 0;
        rhs.visit_leaves(&mut |id, _| n_inactive += usize::from(!id.is_active()));
        let size = payload_size(
            <E::Value as Aggregated>::ARITY,
            E::LEAVES,
            n_inactive,
            E::CONSTANTS,
        )?;

        self.replay_forward();
        let handle = self.registry.register::<E>();
        let dot = self.shadow.tangent_of(&rhs);
        let fresh = self.new_lhs_ids(ids.as_ref())?;

        self.scratch.clear();
        self.write_lhs(&fresh, new_value);
        let scratch = &mut self.scratch;
        rhs.visit_leaves(&mut |id, _| scratch.extend_from_slice(&id.to_le_bytes()));
        rhs.visit_leaves(&mut |id, v| {
            if !id.is_active() {
                scratch.extend_from_slice(&v.to_le_bytes());
            }
        });
        rhs.visit_constants(&mut |c| scratch.extend_from_slice(&c.to_le_bytes()));
        debug_assert_eq!(self.scratch.len(), size);
        self.push_statement(n_inactive, handle);

        ids.as_mut().copy_from_slice(&fresh);
        self.fresh = fresh;
        self.shadow.write_tangents::<E::Value>(ids, dot);
        *value = new_value;
        Ok(())
    }

    fn free(&mut self, ids: &[Identifier]) {
        for &id in ids {
            self.manager.free(id);
        }
    }

    fn evaluate_reverse(&mut self) -> Result<()> {
        self.replay_forward();
        self.shadow.ensure_adjoints(self.manager.max_identifier());
        let adjoints = &mut self.shadow.adjoints;
        let mut hc = self.headers.end();
        let mut pc = self.payload.end();
        for _ in 0..self.statement_count {
            let header = Header::decode(self.headers.take_back(&mut hc, HEADER_BYTES));
            let bytes = self.payload.take_back(&mut pc, header.dyn_size as usize);
            let entry = self.registry.get(header.handle)?;
            let view = entry.view(bytes, header.n_inactive as usize);
            for k in 0..entry.arity {
                self.primal[view.lhs(k)] = view.old_value(k);
            }
            (entry.reverse)(&view, &self.primal, adjoints);
        }
        self.primal_current = self.statement_count == 0;
        Ok(())
    }

    fn reset(&mut self) {
        self.replay_forward();
        self.headers.clear();
        self.payload.clear();
        self.statement_count = 0;
        self.input_count = 0;
        self.shadow.clear();
        self.manager.reset();
    }

    fn statistics(&self) -> TapeStatistics {
        TapeStatistics::Primal(self.primal_statistics())
    }

    fn is_recording(&self) -> bool {
        self.recording
    }

    fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    fn shadow(&self) -> &Shadow {
        &self.shadow
    }

    fn shadow_mut(&mut self) -> &mut Shadow {
        &mut self.shadow
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{LinearIndexManager, ReuseIndexManager};
    use crate::prelude::*;
    use crate::tape::use_fresh_tape;
    use num_complex::Complex64 as C;

    fn primal_stats() -> PrimalStatistics {
        match tape::statistics().unwrap() {
            TapeStatistics::Primal(s) => s,
            other => panic!("expected primal statistics, got {other:?}"),
        }
    }

    fn input<V: Aggregated>(value: V) -> Active<V> {
        let mut x = Active::new(value);
        x.register_input().unwrap();
        x
    }

    fn with_primal<R>(f: impl FnOnce(&PrimalTape<ReuseIndexManager>) -> R) -> R {
        tape::with_active_tape(|t| match t {
            Tape::PrimalReuse(p) => f(p),
            _ => panic!("expected a primal-reuse tape"),
        })
        .unwrap()
    }

    #[test]
    fn empty_tape_has_no_bytes() {
        let tape = PrimalTape::<LinearIndexManager>::new();
        assert_eq!(tape.primal_statistics(), PrimalStatistics::default());
    }

    #[test]
    fn real_product_layout() {
        use_fresh_tape(TapeKind::PrimalLinear);
        let u = input(3.0);
        let v = input(5.0);
        assert_eq!(primal_stats().statements, 0);
        let _w = ActiveReal::from_expr(&u * &v);
        let s = primal_stats();
        assert_eq!((s.statements, s.header_bytes, s.payload_bytes), (1, 11, 20));
        assert_eq!(s.primal_vector_bytes, 32);
        assert_eq!(s.total_bytes, 11 + 20 + 32 + 32);
    }

    #[test]
    fn fused_complex_statement_is_one_statement() {
        use_fresh_tape(TapeKind::PrimalLinear);
        let u = input(C::new(1.0, 2.0));
        let v = input(C::new(0.5, -1.5));
        let _w = ActiveComplex::from_expr(sqrt(square(&u) + square(&v)));
        let s = primal_stats();
        assert_eq!((s.statements, s.header_bytes, s.payload_bytes), (1, 11, 40));
        tape::with_active_tape(|t| match t {
            Tape::PrimalLinear(p) => {
                let (header, _) = p.statements()[0];
                let entry = p.registry().get(header.handle).unwrap();
                assert_eq!((entry.arity, entry.leaves, entry.constants), (2, 4, 0));
            }
            _ => unreachable!(),
        })
        .unwrap();
    }

    #[test]
    fn constants_go_to_their_own_section() {
        use_fresh_tape(TapeKind::PrimalReuse);
        let a = input(2.5);
        let w = ActiveReal::from_expr(4.0 * &a);
        assert_eq!(w.value(), 10.0);
        with_primal(|p| {
            let (header, payload) = *p.statements().last().unwrap();
            assert_eq!(header.n_inactive, 0);
            assert_eq!(header.dyn_size, 4 + 8 + 4 + 8);
            let view = p.registry().get(header.handle).unwrap().view(payload, 0);
            assert_eq!(view.constants, &4.0f64.to_le_bytes());
            assert!(view.inactive.is_empty());
        });
    }

    #[test]
    fn passive_leaves_store_their_values() {
        use_fresh_tape(TapeKind::PrimalReuse);
        let a = input(2.5);
        let c = ActiveReal::new(-1.0);
        let _w = ActiveReal::from_expr(&a * &c);
        with_primal(|p| {
            let (header, payload) = *p.statements().last().unwrap();
            assert_eq!(header.n_inactive, 1);
            let view = p.registry().get(header.handle).unwrap().view(payload, 1);
            assert_eq!(view.inactive, &(-1.0f64).to_le_bytes());
            assert_eq!(&view.arg_ids[4..], &[0, 0, 0, 0]);
        });
    }

    #[test]
    fn handles_are_per_shape() {
        let mut registry = HandleRegistry::default();
        type Prod = crate::expr::Binary<crate::expr::Mul, Leaf<f64>, Leaf<f64>>;
        type Sum = crate::expr::Binary<crate::expr::Add, Leaf<f64>, Leaf<f64>>;
        let h1 = registry.register::<Prod>();
        let h2 = registry.register::<Prod>();
        let h3 = registry.register::<Sum>();
        assert_eq!(h1, h2);
        assert_ne!(h1, h3);
        assert_eq!(registry.len(), 2);
        assert!(matches!(registry.get(7), Err(TapeError::UnknownHandle(7))));
    }

    #[test]
    fn payload_limits() {
        assert_eq!(payload_size(1, 2, 0, 0), Ok(20));
        assert_eq!(payload_size(2, 4, 0, 0), Ok(40));
        assert_eq!(
            payload_size(1, 0, 256, 0),
            Err(TapeError::TooManyInactive(256))
        );
        assert_eq!(
            payload_size(1, 16381, 0, 0),
            Err(TapeError::StatementTooLarge(65536))
        );
        assert_eq!(payload_size(1, 16380, 0, 0), Ok(65532));
    }

    #[test]
    fn overwrite_chain_restores_primals() {
        for kind in [TapeKind::PrimalReuse, TapeKind::PrimalLinear] {
            use_fresh_tape(kind);
            let x0 = 1.1;
            let mut x = input(x0);
            let x_in = x.ids()[0];
            let k = 5;
            for _ in 0..k {
                x.assign(&x * &x);
            }
            if kind == TapeKind::PrimalReuse {
                assert_eq!(x.ids()[0], x_in);
            }
            x.set_gradient(1.0).unwrap();
            tape::evaluate_reverse().unwrap();
            let n = 2f64.powi(k);
            let expected = n * x0.powf(n - 1.0);
            let got = tape::with_active_tape(|t| t.gradient(x_in)).unwrap();
            assert!(
                (got - expected).abs() <= 1e-14 * expected,
                "{kind}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn doubling_chain() {
        use_fresh_tape(TapeKind::PrimalReuse);
        let mut x = input(0.3);
        let x_in = x.ids()[0];
        for _ in 0..10 {
            x.assign(2.0 * &x);
        }
        x.set_gradient(1.0).unwrap();
        tape::evaluate_reverse().unwrap();
        assert_eq!(
            tape::with_active_tape(|t| t.gradient(x_in)).unwrap(),
            1024.0
        );
    }

    #[test]
    fn reverse_restores_the_primal_vector_and_replays() {
        use_fresh_tape(TapeKind::PrimalReuse);
        let start = with_primal(|p| p.primal_vector().to_vec());
        let a = input(C::new(0.5, 0.25));
        let b = input(1.5);
        let mut c = ActiveComplex::from_expr(&a * &b);
        c *= &a;
        c.assign(exp(&c) + &b);
        let t = ActiveReal::from_expr(c.real() * &b);
        t.set_gradient(1.0).unwrap();
        tape::evaluate_reverse().unwrap();
        let g1 = (a.gradient(), b.gradient());
        with_primal(|p| {
            let restored = p.primal_vector();
            for (i, v) in restored.iter().enumerate() {
                assert_eq!(*v, start.get(i).copied().unwrap_or(0.0), "slot {i}");
            }
            p.check_layout().unwrap();
        });

        tape::clear_adjoints().unwrap();
        t.set_gradient(1.0).unwrap();
        tape::evaluate_reverse().unwrap();
        assert_eq!((a.gradient(), b.gradient()), g1);
    }

    #[test]
    fn aliased_product_matches_jacobian_tape() {
        let run = |kind| {
            use_fresh_tape(kind);
            let a = input(C::new(0.5, -1.25));
            let mut c = input(C::new(2.0, 0.75));
            let c_in = c.ids().to_vec();
            c *= &a;
            c.set_gradient(C::new(0.3, -0.9)).unwrap();
            tape::evaluate_reverse().unwrap();
            let g = tape::with_active_tape(|t| (t.gradient(c_in[0]), t.gradient(c_in[1]))).unwrap();
            (g, a.gradient())
        };
        assert_eq!(run(TapeKind::PrimalReuse), run(TapeKind::JacobianReuse));
        assert_eq!(run(TapeKind::PrimalLinear), run(TapeKind::JacobianLinear));
    }
}
