//! Identifier management.
//!
//! [`LinearIndexManager`] hands out strictly increasing identifiers and never
//! recycles them. [`ReuseIndexManager`] keeps a LIFO free list of released
//! identifiers and reissues them before the counter grows.
//!
//! Aggregated left-hand sides go through [`IndexManager::acquire_aggregate`],
//! which acquires every new identifier before any of the old ones is released.
//! Without that ordering a reused identifier could alias a component that the
//! same statement still reads, and the reverse sweep would consume an adjoint
//! after it had already been overwritten.

use crate::error::{Result, TapeError};
use crate::identifier::Identifier;

pub trait IndexManager: Default + std::fmt::Debug + Send + 'static {
    /// Short name used in reports.
    const NAME: &'static str;

    /// Whether the manager recycles released identifiers.
    const REUSES: bool;

    fn acquire(&mut self) -> Result<Identifier>;

    /// Release `id`. Passive identifiers are ignored.
    fn free(&mut self, id: Identifier);

    /// Identifier for the left-hand side of a scalar assignment whose current
    /// identifier is `old`.
    fn assign_scalar(&mut self, old: Identifier) -> Result<Identifier>;

    /// Fill `new` with fresh identifiers disjoint from `old`, then release `old`.
    fn acquire_aggregate(&mut self, old: &[Identifier], new: &mut [Identifier]) -> Result<()> {
        for slot in new.iter_mut() {
            *slot = self.acquire()?;
        }
        for &id in old {
            self.free(id);
        }
        Ok(())
    }

    /// Largest identifier issued so far; the adjoint vector needs one more slot.
    fn max_identifier(&self) -> Identifier;

    /// Called when the owning tape is reset.
    fn reset(&mut self);
}

#[derive(Debug, Default, Clone)]
pub struct LinearIndexManager {
    last: u32,
}

impl LinearIndexManager {
    pub fn new() -> Self {
        Self::default()
    }
}

impl IndexManager for LinearIndexManager {
    const NAME: &'static str = "linear";
    const REUSES: bool = false;

    #[inline]
    fn acquire(&mut self) -> Result<Identifier> {
        self.last = self
            .last
            .checked_add(1)
            .ok_or(TapeError::IdentifierOverflow(self.last))?;
        Ok(Identifier::new(self.last))
    }

    #[inline]
    fn free(&mut self, _id: Identifier) {}

    #[inline]
    fn assign_scalar(&mut self, _old: Identifier) -> Result<Identifier> {
        self.acquire()
    }

    fn max_identifier(&self) -> Identifier {
        Identifier::new(self.last)
    }

    /// Restarts numbering. Variables that still hold identifiers from before the
    /// reset must be registered again.
    fn reset(&mut self) {
        self.last = 0;
    }
}

#[derive(Debug, Default, Clone)]
pub struct ReuseIndexManager {
    last: u32,
    free_list: Vec<Identifier>,
    // released[id] is true while id sits on the free list
    released: Vec<bool>,
}

impl ReuseIndexManager {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of identifiers waiting on the free list.
    pub fn free_count(&self) -> usize {
        self.free_list.len()
    }

    /// Identifier the counter hands out once the free list is empty.
    pub fn next_fresh(&self) -> Identifier {
        Identifier::new(self.last + 1)
    }

    fn mark(&mut self, id: Identifier, released: bool) {
        let i = id.index();
        if self.released.len() <= i {
            self.released.resize(i + 1, false);
        }
        self.released[i] = released;
    }
}

impl IndexManager for ReuseIndexManager {
    const NAME: &'static str = "reuse";
    const REUSES: bool = true;

    #[inline]
    fn acquire(&mut self) -> Result<Identifier> {
        if let Some(id) = self.free_list.pop() {
            self.mark(id, false);
            return Ok(id);
        }
        self.last = self
            .last
            .checked_add(1)
            .ok_or(TapeError::IdentifierOverflow(self.last))?;
        Ok(Identifier::new(self.last))
    }

    #[inline]
    fn free(&mut self, id: Identifier) {
        if !id.is_active() || id.raw() > self.last {
            return;
        }
        debug_assert!(
            !self.released.get(id.index()).copied().unwrap_or(false),
            "identifier {id} released twice"
        );
        self.mark(id, true);
        self.free_list.push(id);
    }

    #[inline]
    fn assign_scalar(&mut self, old: Identifier) -> Result<Identifier> {
        if old.is_active() {
            Ok(old)
        } else {
            self.acquire()
        }
    }

    fn max_identifier(&self) -> Identifier {
        Identifier::new(self.last)
    }

    /// Live variables keep their identifiers across a reset.
    fn reset(&mut self) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(raw: &[u32]) -> Vec<Identifier> {
        raw.iter().copied().map(Identifier::new).collect()
    }

    #[test]
    fn linear_is_sequential() {
        let mut m = LinearIndexManager::new();
        let got: Vec<_> = (0..3).map(|_| m.acquire().unwrap().raw()).collect();
        assert_eq!(got, [1, 2, 3]);
    }

    #[test]
    fn linear_never_reissues() {
        let mut m = LinearIndexManager::new();
        for _ in 0..4 {
            m.acquire().unwrap();
        }
        m.free(Identifier::new(4));
        assert_eq!(m.acquire().unwrap().raw(), 5);
    }

    #[test]
    fn reuse_prefers_free_list() {
        let mut m = ReuseIndexManager::new();
        for _ in 0..3 {
            m.acquire().unwrap();
        }
        m.free(Identifier::new(2));
        assert_eq!(m.acquire().unwrap().raw(), 2);
        assert_eq!(m.acquire().unwrap().raw(), 4);
    }

    #[test]
    fn reuse_free_then_acquire() {
        let mut m = ReuseIndexManager::new();
        for _ in 0..6 {
            m.acquire().unwrap();
        }
        m.free(Identifier::new(4));
        assert_eq!(m.acquire().unwrap().raw(), 4);
    }

    #[test]
    fn reuse_counter_when_list_empty() {
        let mut m = ReuseIndexManager::new();
        for _ in 0..6 {
            m.acquire().unwrap();
        }
        assert_eq!(m.next_fresh().raw(), 7);
        assert_eq!(m.acquire().unwrap().raw(), 7);
    }

    #[test]
    fn free_passive_is_noop() {
        let mut m = ReuseIndexManager::new();
        m.free(Identifier::PASSIVE);
        assert_eq!(m.free_count(), 0);
        let mut l = LinearIndexManager::new();
        l.free(Identifier::PASSIVE);
        assert_eq!(l.acquire().unwrap().raw(), 1);
    }

    #[test]
    fn reuse_is_lifo() {
        let mut m = ReuseIndexManager::new();
        for _ in 0..5 {
            m.acquire().unwrap();
        }
        m.free(Identifier::new(2));
        m.free(Identifier::new(5));
        assert_eq!(m.acquire().unwrap().raw(), 5);
        assert_eq!(m.acquire().unwrap().raw(), 2);
    }

    #[test]
    fn aggregate_acquires_before_freeing() {
        let mut m = ReuseIndexManager::new();
        for _ in 0..8 {
            m.acquire().unwrap();
        }
        let old = ids(&[5, 6]);
        let mut new = [Identifier::PASSIVE; 2];
        m.acquire_aggregate(&old, &mut new).unwrap();
        assert_eq!(new, [Identifier::new(9), Identifier::new(10)]);
        assert_eq!(m.free_count(), 2);
        // 6 was released last
        assert_eq!(m.acquire().unwrap().raw(), 6);
        assert_eq!(m.acquire().unwrap().raw(), 5);
    }

    #[test]
    fn aggregate_linear_is_sequential() {
        let mut m = LinearIndexManager::new();
        for _ in 0..8 {
            m.acquire().unwrap();
        }
        let mut new = [Identifier::PASSIVE; 2];
        m.acquire_aggregate(&ids(&[5, 6]), &mut new).unwrap();
        assert_eq!(new, [Identifier::new(9), Identifier::new(10)]);
    }

    #[test]
    fn aggregate_from_passive_frees_nothing() {
        let mut m = ReuseIndexManager::new();
        let mut new = [Identifier::PASSIVE; 2];
        m.acquire_aggregate(&ids(&[0, 0]), &mut new).unwrap();
        assert!(new.iter().all(|id| id.is_active()));
        assert_ne!(new[0], new[1]);
        assert_eq!(m.free_count(), 0);
    }

    #[test]
    fn scalar_reuse_keeps_own_id() {
        let mut m = ReuseIndexManager::new();
        let a = m.acquire().unwrap();
        assert_eq!(m.assign_scalar(a).unwrap(), a);
        assert_eq!(m.assign_scalar(Identifier::PASSIVE).unwrap().raw(), 2);
    }

    #[test]
    #[should_panic(expected = "released twice")]
    #[cfg(debug_assertions)]
    fn double_free_is_caught() {
        let mut m = ReuseIndexManager::new();
        let a = m.acquire().unwrap();
        m.free(a);
        m.free(a);
    }

    #[test]
    fn overflow_is_an_error() {
        let mut m = LinearIndexManager { last: u32::MAX };
        assert_eq!(m.acquire(), Err(TapeError::IdentifierOverflow(u32::MAX)));
    }
}
