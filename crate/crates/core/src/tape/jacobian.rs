//! Jacobian taping.
//!
//! Every scalar statement stores `d` (1 byte), the left-hand-side identifier
//! (4 bytes) and one `(partial, identifier)` pair per surviving argument
//! (8 + 4 bytes). Partials are evaluated when the statement is stored.
//! Arguments with a passive identifier or a partial of exactly zero are not
//! stored. An aggregated assignment of arity `n` becomes `n` scalar
//! statements, one per output component, and all of their rows are computed
//! before any left-hand-side identifier changes.

use serde::Serialize;

use super::stack::{ChunkedStack, DEFAULT_CHUNK_BYTES};
use super::{Shadow, TapeRecorder, TapeStatistics};
use crate::aggregate::Aggregated;
use crate::error::{Result, TapeError};
use crate::expr::Expression;
use crate::identifier::Identifier;
use crate::index::IndexManager;

const STATEMENT_BYTES: usize = 5;
const MAX_ARGUMENTS: usize = u8::MAX as usize;

/// Byte counts of a Jacobian tape.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct JacobianStatistics {
    pub stmts_bytes: usize,
    pub jacobian_bytes: usize,
    pub identifier_bytes: usize,
    pub adjoint_bytes: usize,
    pub total_bytes: usize,
    #[serde(skip)]
    pub statements: usize,
    /// Allocated stack capacity, including slack.
    #[serde(skip)]
    pub reserved_bytes: usize,
}

impl JacobianStatistics {
    /// Bytes of the statement, Jacobian and identifier stacks together.
    pub fn recorded_bytes(&self) -> usize {
        self.stmts_bytes + self.jacobian_bytes + self.identifier_bytes
    }
}

#[derive(Debug)]
pub struct JacobianTape<I: IndexManager> {
    statements: ChunkedStack<u8>,
    jacobians: ChunkedStack<f64>,
    identifiers: ChunkedStack<u32>,
    statement_count: usize,
    shadow: Shadow,
    manager: I,
    recording: bool,
    row_jacobians: Vec<f64>,
    row_ids: Vec<u32>,
    row_ends: Vec<usize>,
    fresh: Vec<Identifier>,
}

impl<I: IndexManager> Default for JacobianTape<I> {
    fn default() -> Self {
        Self::with_chunk_bytes(DEFAULT_CHUNK_BYTES)
    }
}

impl<I: IndexManager> JacobianTape<I> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_chunk_bytes(chunk_bytes: usize) -> Self {
        JacobianTape {
            statements: ChunkedStack::new(chunk_bytes),
            jacobians: ChunkedStack::new(chunk_bytes),
            identifiers: ChunkedStack::new(chunk_bytes),
            statement_count: 0,
            shadow: Shadow::default(),
            manager: I::default(),
            recording: true,
            row_jacobians: Vec::new(),
            row_ids: Vec::new(),
            row_ends: Vec::new(),
            fresh: Vec::new(),
        }
    }

    pub fn index_manager(&self) -> &I {
        &self.manager
    }

    pub fn statement_count(&self) -> usize {
        self.statement_count
    }

    pub fn jacobian_statistics(&self) -> JacobianStatistics {
        let stmts_bytes = self.statements.len();
        let jacobian_bytes = 8 * self.jacobians.len();
        let identifier_bytes = 4 * self.identifiers.len();
        let adjoint_bytes = adjoint_bytes(self.manager.max_identifier());
        JacobianStatistics {
            stmts_bytes,
            jacobian_bytes,
            identifier_bytes,
            adjoint_bytes,
            total_bytes: stmts_bytes + jacobian_bytes + identifier_bytes + adjoint_bytes,
            statements: self.statement_count,
            reserved_bytes: self.statements.reserved_bytes()
                + self.jacobians.reserved_bytes()
                + self.identifiers.reserved_bytes(),
        }
    }

    /// Store one scalar statement from explicit `(partial, identifier)` pairs.
    /// Passive and zero entries are dropped; repeated identifiers are kept as
    /// separate entries.
    pub fn store_scalar_statement(
        &mut self,
        lhs: &mut Identifier,
        leaves: &[(f64, Identifier)],
    ) -> Result<()> {
        let mut lhs_ids = [*lhs];
        self.store_aggregate_statement(&mut lhs_ids, &[leaves])?;
        *lhs = lhs_ids[0];
        Ok(())
    }

    /// Store one statement per row. `rows[k]` holds the partials of output
    /// component `k`; every row is captured before `lhs` is updated.
    pub fn store_aggregate_statement(
        &mut self,
        lhs: &mut [Identifier],
        rows: &[&[(f64, Identifier)]],
    ) -> Result<()> {
        assert_eq!(
            lhs.len(),
            rows.len(),
            "one row per left-hand-side component"
        );
        self.begin_rows();
        for row in rows {
            for &(partial, id) in row.iter() {
                self.push_entry(id, partial);
            }
            self.end_row()?;
        }
        self.commit_rows(lhs)
    }

    fn begin_rows(&mut self) {
        self.row_jacobians.clear();
        self.row_ids.clear();
        self.row_ends.clear();
    }

    #[inline]
    fn push_entry(&mut self, id: Identifier, partial: f64) {
        if id.is_active() && partial != 0.0 {
            self.row_jacobians.push(partial);
            self.row_ids.push(id.raw());
        }
    }

    fn end_row(&mut self) -> Result<()> {
        let start = self.row_ends.last().copied().unwrap_or(0);
        let d = self.row_ids.len() - start;
        if d > MAX_ARGUMENTS {
            return Err(TapeError::TooManyArguments(d));
        }
        self.row_ends.push(self.row_ids.len());
        Ok(())
    }

    fn commit_rows(&mut self, lhs: &mut [Identifier]) -> Result<()> {
        let mut fresh = std::mem::take(&mut self.fresh);
        fresh.clear();
        fresh.resize(lhs.len(), Identifier::PASSIVE);
        if lhs.len() == 1 {
            fresh[0] = self.manager.assign_scalar(lhs[0])?;
        } else {
            self.manager.acquire_aggregate(lhs, &mut fresh)?;
        }
        self.push_rows(&fresh);
        lhs.copy_from_slice(&fresh);
        self.fresh = fresh;
        Ok(())
    }

    fn push_rows(&mut self, new_ids: &[Identifier]) {
        let mut start = 0;
        for (k, &end) in self.row_ends.iter().enumerate() {
            let mut head = [0u8; STATEMENT_BYTES];
            head[0] = (end - start) as u8;
            head[1..].copy_from_slice(&new_ids[k].to_le_bytes());
            self.statements.push_block(&head);
            self.jacobians.push_block(&self.row_jacobians[start..end]);
            self.identifiers.push_block(&self.row_ids[start..end]);
            start = end;
        }
        self.statement_count += new_ids.len();
    }

    fn release(&mut self, ids: &mut [Identifier]) {
        for id in ids.iter_mut() {
            self.manager.free(*id);
            *id = Identifier::PASSIVE;
        }
    }
}

pub(super) fn adjoint_bytes(max: Identifier) -> usize {
    if max.is_active() {
        8 * (max.index() + 1)
    } else {
        0
    }
}

impl<I: IndexManager> TapeRecorder for JacobianTape<I> {
    fn register_input<V: Aggregated>(&mut self, _value: V, ids: &mut V::Ids) -> Result<()> {
        let lhs = ids.as_mut();
        if lhs.len() == 1 {
            lhs[0] = self.manager.assign_scalar(lhs[0])?;
        } else {
            let mut new_ids = V::Ids::default();
            self.manager.acquire_aggregate(lhs, new_ids.as_mut())?;
            *ids = new_ids;
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
        let active_rhs = rhs.has_active_leaf();
        if !active_rhs && !ids.as_ref().iter().any(|id| id.is_active()) {
            *value = new_value;
            return Ok(());
        }

        self.begin_rows();
        for k in 0..<E::Value as Aggregated>::ARITY {
            if active_rhs {
                let seed = <E::Value as Aggregated>::unit(k);
                rhs.push_adjoint(seed, &mut |id, partial| self.push_entry(id, partial));
            }
            self.end_row()?;
        }
        let dot = self.shadow.tangent_of(&rhs);
        self.commit_rows(ids.as_mut())?;
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
        self.shadow.ensure_adjoints(self.manager.max_identifier());
        let adjoints = &mut self.shadow.adjoints;
        let mut sc = self.statements.end();
        let mut jc = self.jacobians.end();
        let mut ic = self.identifiers.end();
        for _ in 0..self.statement_count {
            let head = self.statements.take_back(&mut sc, STATEMENT_BYTES);
            let d = head[0] as usize;
            let lhs = u32::from_le_bytes([head[1], head[2], head[3], head[4]]) as usize;
            let jac = self.jacobians.take_back(&mut jc, d);
            let args = self.identifiers.take_back(&mut ic, d);
            let w = adjoints[lhs];
            adjoints[lhs] = 0.0;
            for (&partial, &arg) in jac.iter().zip(args) {
                adjoints[arg as usize] += partial * w;
            }
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.statements.clear();
        self.jacobians.clear();
        self.identifiers.clear();
        self.statement_count = 0;
        self.shadow.clear();
        self.manager.reset();
    }

    fn statistics(&self) -> TapeStatistics {
        TapeStatistics::Jacobian(self.jacobian_statistics())
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
