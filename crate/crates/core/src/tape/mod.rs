//! Tapes and the per-thread active-tape binding.
//!
//! A thread has at most one active tape. [`Active`](crate::Active) variables
//! talk to it when they are assigned, registered or dropped; with no active
//! tape, assignments only copy values.

mod jacobian;
mod primal;
mod stack;

pub use jacobian::{JacobianStatistics, JacobianTape};
pub use primal::{
    payload_size, HandleEntry, HandleRegistry, Header, PrimalStatistics, PrimalTape, StatementView,
    HEADER_BYTES,
};
pub use stack::{ChunkedStack, Cursor, DEFAULT_CHUNK_BYTES};

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::aggregate::Aggregated;
use crate::error::{Result, TapeError};
use crate::expr::Expression;
use crate::identifier::Identifier;
use crate::index::{LinearIndexManager, ReuseIndexManager};

/// Adjoint vector plus an optional tangent vector indexed by identifier.
///
/// With tangent tracking on, every stored statement also propagates forward
/// tangents, which gives a forward-mode run of the recorded program for free.
#[derive(Debug, Default, Clone)]
pub struct Shadow {
    adjoints: Vec<f64>,
    tangents: Option<Vec<f64>>,
}

impl Shadow {
    pub(crate) fn ensure_adjoints(&mut self, max: Identifier) {
        let n = max.index() + 1;
        if self.adjoints.len() < n {
            self.adjoints.resize(n, 0.0);
        }
    }

    pub fn adjoints(&self) -> &[f64] {
        &self.adjoints
    }

    pub fn gradient(&self, id: Identifier) -> f64 {
        if id.is_active() {
            self.adjoints.get(id.index()).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    }

    /// Passive identifiers are ignored.
    pub fn set_gradient(&mut self, id: Identifier, value: f64) {
        if id.is_active() {
            self.ensure_adjoints(id);
            self.adjoints[id.index()] = value;
        }
    }

    pub fn clear_adjoints(&mut self) {
        self.adjoints.iter_mut().for_each(|a| *a = 0.0);
    }

    pub fn set_tangent_tracking(&mut self, on: bool) {
        match (on, self.tangents.is_some()) {
            (true, false) => self.tangents = Some(Vec::new()),
            (false, true) => self.tangents = None,
            _ => {}
        }
    }

    pub fn tangent(&self, id: Identifier) -> f64 {
        match &self.tangents {
            Some(t) if id.is_active() => t.get(id.index()).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Ignored unless tangent tracking is on.
    pub fn set_tangent(&mut self, id: Identifier, value: f64) {
        if let Some(t) = &mut self.tangents {
            if id.is_active() {
                if t.len() <= id.index() {
                    t.resize(id.index() + 1, 0.0);
                }
                t[id.index()] = value;
            }
        }
    }

    pub(crate) fn tangent_of<E: Expression>(&self, rhs: &E) -> Option<E::Value> {
        self.tangents.as_ref().map(|t| rhs.tangent(t.as_slice()))
    }

    pub(crate) fn write_tangents<V: Aggregated>(&mut self, ids: &V::Ids, dot: Option<V>) {
        if let Some(dot) = dot {
            for (k, &id) in ids.as_ref().iter().enumerate() {
                self.set_tangent(id, dot.component(k));
            }
        }
    }

    pub(crate) fn clear(&mut self) {
        self.adjoints.clear();
        if let Some(t) = &mut self.tangents {
            t.clear();
        }
    }
}

/// The contract shared by both tape kinds.
pub trait TapeRecorder {
    /// Give the variable fresh identifiers (per the index manager) and mark it
    /// as an independent input.
    fn register_input<V: Aggregated>(&mut self, value: V, ids: &mut V::Ids) -> Result<()>;

    /// Record `lhs = rhs` for a scalar or aggregated left-hand side and update
    /// its value and identifiers.
    fn store_assignment<E: Expression>(
        &mut self,
        value: &mut E::Value,
        ids: &mut <E::Value as Aggregated>::Ids,
        rhs: E,
    ) -> Result<()>;

    /// Release identifiers of a variable that goes out of scope.
    fn free(&mut self, ids: &[Identifier]);

    /// Interpret the tape from the last statement to the first, starting from
    /// the adjoints seeded with [`TapeRecorder::set_gradient`].
    fn evaluate_reverse(&mut self) -> Result<()>;

    /// Drop all statements and adjoints.
    fn reset(&mut self);

    fn statistics(&self) -> TapeStatistics;

    fn is_recording(&self) -> bool;

    fn set_recording(&mut self, on: bool);

    fn shadow(&self) -> &Shadow;

    fn shadow_mut(&mut self) -> &mut Shadow;

    fn gradient(&self, id: Identifier) -> f64 {
        self.shadow().gradient(id)
    }

    fn set_gradient(&mut self, id: Identifier, value: f64) {
        self.shadow_mut().set_gradient(id, value)
    }

    fn clear_adjoints(&mut self) {
        self.shadow_mut().clear_adjoints()
    }
}

/// One of the four tape configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum TapeKind {
    JacobianLinear,
    JacobianReuse,
    PrimalLinear,
    PrimalReuse,
}

impl TapeKind {
    pub const ALL: [TapeKind; 4] = [
        TapeKind::JacobianLinear,
        TapeKind::JacobianReuse,
        TapeKind::PrimalLinear,
        TapeKind::PrimalReuse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TapeKind::JacobianLinear => "jacobian-linear",
            TapeKind::JacobianReuse => "jacobian-reuse",
            TapeKind::PrimalLinear => "primal-linear",
            TapeKind::PrimalReuse => "primal-reuse",
        }
    }

    pub fn is_jacobian(self) -> bool {
        matches!(self, TapeKind::JacobianLinear | TapeKind::JacobianReuse)
    }

    pub fn reuses_identifiers(self) -> bool {
        matches!(self, TapeKind::JacobianReuse | TapeKind::PrimalReuse)
    }
}

impl fmt::Display for TapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<TapeKind> for String {
    fn from(kind: TapeKind) -> String {
        kind.name().to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tape kind `{0}` (expected jacobian-linear, jacobian-reuse, primal-linear or primal-reuse)")]
pub struct ParseTapeKindError(String);

impl FromStr for TapeKind {
    type Err = ParseTapeKindError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TapeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ParseTapeKindError(s.to_owned()))
    }
}

/// Byte counts of either tape kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TapeStatistics {
    Jacobian(JacobianStatistics),
    Primal(PrimalStatistics),
}

impl TapeStatistics {
    pub fn total_bytes(&self) -> usize {
        match self {
            TapeStatistics::Jacobian(s) => s.total_bytes,
            TapeStatistics::Primal(s) => s.total_bytes,
        }
    }

    /// Bytes of the recorded streams, excluding the identifier-indexed vectors.
    pub fn recorded_bytes(&self) -> usize {
        match self {
            TapeStatistics::Jacobian(s) => s.recorded_bytes(),
            TapeStatistics::Primal(s) => s.recorded_bytes(),
        }
    }

    pub fn statements(&self) -> usize {
        match self {
            TapeStatistics::Jacobian(s) => s.statements,
            TapeStatistics::Primal(s) => s.statements,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("statistics serialize to JSON")
    }

    /// Header line and one data row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            TapeStatistics::Jacobian(s) => w.serialize(s),
            TapeStatistics::Primal(s) => w.serialize(s),
        }
        .expect("statistics serialize to CSV");
        String::from_utf8(w.into_inner().expect("in-memory CSV writer")).expect("CSV is UTF-8")
    }
}

/// A tape of any of the four configurations.
#[derive(Debug)]
pub enum Tape {
    JacobianLinear(JacobianTape<LinearIndexManager>),
    JacobianReuse(JacobianTape<ReuseIndexManager>),
    PrimalLinear(PrimalTape<LinearIndexManager>),
    PrimalReuse(PrimalTape<ReuseIndexManager>),
}

macro_rules! dispatch {
    ($self:expr, $t:ident => $body:expr) => {
        match $self {
            Tape::JacobianLinear($t) => $body,
            Tape::JacobianReuse($t) => $body,
            Tape::PrimalLinear($t) => $body,
            Tape::PrimalReuse($t) => $body,
        }
    };
}

impl Tape {
    pub fn new(kind: TapeKind) -> Self {
        match kind {
            TapeKind::JacobianLinear => Tape::JacobianLinear(JacobianTape::new()),
            TapeKind::JacobianReuse => Tape::JacobianReuse(JacobianTape::new()),
            TapeKind::PrimalLinear => Tape::PrimalLinear(PrimalTape::new()),
            TapeKind::PrimalReuse => Tape::PrimalReuse(PrimalTape::new()),
        }
    }

    pub fn kind(&self) -> TapeKind {
        match self {
            Tape::JacobianLinear(_) => TapeKind::JacobianLinear,
            Tape::JacobianReuse(_) => TapeKind::JacobianReuse,
            Tape::PrimalLinear(_) => TapeKind::PrimalLinear,
            Tape::PrimalReuse(_) => TapeKind::PrimalReuse,
        }
    }

    pub fn set_tangent_tracking(&mut self, on: bool) {
        self.shadow_mut().set_tangent_tracking(on)
    }

    pub fn tangent(&self, id: Identifier) -> f64 {
        self.shadow().tangent(id)
    }

    pub fn set_tangent(&mut self, id: Identifier, value: f64) {
        self.shadow_mut().set_tangent(id, value)
    }
}

impl TapeRecorder for Tape {
    fn register_input<V: Aggregated>(&mut self, value: V, ids: &mut V::Ids) -> Result<()> {
        dispatch!(self, t => t.register_input(value, ids))
    }

    fn store_assignment<E: Expression>(
        &mut self,
        value: &mut E::Value,
        ids: &mut <E::Value as Aggregated>::Ids,
        rhs: E,
    ) -> Result<()> {
        dispatch!(self, t => t.store_assignment(value, ids, rhs))
    }

    fn free(&mut self, ids: &[Identifier]) {
        dispatch!(self, t => t.free(ids))
    }

    fn evaluate_reverse(&mut self) -> Result<()> {
        dispatch!(self, t => t.evaluate_reverse())
    }

    fn reset(&mut self) {
        dispatch!(self, t => t.reset())
    }

    fn statistics(&self) -> TapeStatistics {
        dispatch!(self, t => t.statistics())
    }

    fn is_recording(&self) -> bool {
        dispatch!(self, t => t.is_recording())
    }

    fn set_recording(&mut self, on: bool) {
        dispatch!(self, t => t.set_recording(on))
    }

    fn shadow(&self) -> &Shadow {
        dispatch!(self, t => t.shadow())
    }

    fn shadow_mut(&mut self) -> &mut Shadow {
        dispatch!(self, t => t.shadow_mut())
    }
}

thread_local! {
    static ACTIVE_TAPE: RefCell<Option<Tape>> = const { RefCell::new(None) };
}

/// Make `tape` the active tape of this thread and return the previous one.
pub fn activate(tape: Tape) -> Option<Tape> {
    ACTIVE_TAPE.with(|t| t.borrow_mut().replace(tape))
}

/// Unbind and return the active tape.
pub fn deactivate() -> Option<Tape> {
    ACTIVE_TAPE.with(|t| t.borrow_mut().take())
}

pub fn is_active() -> bool {
    ACTIVE_TAPE.with(|t| t.borrow().is_some())
}

/// Run `f` on the active tape.
pub fn with_active_tape<R>(f: impl FnOnce(&mut Tape) -> R) -> Result<R> {
    ACTIVE_TAPE.with(|t| match t.borrow_mut().as_mut() {
        Some(tape) => Ok(f(tape)),
        None => Err(TapeError::NoActiveTape),
    })
}

/// Like [`with_active_tape`], but silently does nothing during thread
/// teardown or when no tape is active. Used from destructors.
pub(crate) fn try_with_active_tape(f: impl FnOnce(&mut Tape)) {
    let _ = ACTIVE_TAPE.try_with(|t| {
        if let Ok(mut guard) = t.try_borrow_mut() {
            if let Some(tape) = guard.as_mut() {
                f(tape);
            }
        }
    });
}

pub fn evaluate_reverse() -> Result<()> {
    with_active_tape(|t| t.evaluate_reverse())?
}

pub fn set_recording(on: bool) -> Result<()> {
    with_active_tape(|t| t.set_recording(on))
}

pub fn statistics() -> Result<TapeStatistics> {
    with_active_tape(|t| t.statistics())
}

pub fn reset() -> Result<()> {
    with_active_tape(|t| t.reset())
}

pub fn clear_adjoints() -> Result<()> {
    with_active_tape(|t| t.clear_adjoints())
}

#[cfg(test)]
pub(crate) fn use_fresh_tape(kind: TapeKind) {
    activate(Tape::new(kind));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for kind in TapeKind::ALL {
            assert_eq!(kind.name().parse::<TapeKind>().unwrap(), kind);
            assert_eq!(Tape::new(kind).kind(), kind);
        }
        assert!("jacobian".parse::<TapeKind>().is_err());
    }

    #[test]
    fn statistics_serialize_with_fixed_keys() {
        let j = TapeStatistics::Jacobian(JacobianStatistics {
            stmts_bytes: 5,
            jacobian_bytes: 16,
            identifier_bytes: 8,
            adjoint_bytes: 32,
            total_bytes: 61,
            statements: 1,
            reserved_bytes: 0,
        });
        assert_eq!(
            j.to_json(),
            r#"{"stmts_bytes":5,"jacobian_bytes":16,"identifier_bytes":8,"adjoint_bytes":32,"total_bytes":61}"#
        );
        assert_eq!(
            j.to_csv(),
            "stmts_bytes,jacobian_bytes,identifier_bytes,adjoint_bytes,total_bytes\n5,16,8,32,61\n"
        );
        let p = TapeStatistics::Primal(PrimalStatistics::default());
        assert_eq!(
            p.to_csv().lines().next().unwrap(),
            "header_bytes,payload_bytes,primal_vector_bytes,adjoint_bytes,registry_entries,total_bytes"
        );
    }

    #[test]
    fn no_active_tape_is_reported() {
        deactivate();
        assert_eq!(evaluate_reverse(), Err(TapeError::NoActiveTape));
    }
}
