//! Randomized acquire/free schedules against the identifier managers.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::CheckReport;
use crate::identifier::Identifier;
use crate::index::{IndexManager, ReuseIndexManager};

fn take(held: &mut HashSet<Identifier>, id: Identifier, outcome: &mut ScheduleOutcome) {
    if !held.insert(id) {
        outcome.duplicated += 1;
    }
}

/// Violations found in one schedule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScheduleOutcome {
    /// `acquire_aggregate` returned an identifier of the old left-hand side.
    pub aliased: usize,
    /// An identifier was issued while another live variable still held it.
    pub duplicated: usize,
    pub aggregate_assignments: usize,
}

/// Run one random schedule of `steps` operations over variables of arity one
/// and two.
pub fn run_schedule<I: IndexManager>(rng: &mut ChaCha8Rng, steps: usize) -> ScheduleOutcome {
    let mut manager = I::default();
    let mut live: Vec<Vec<Identifier>> = Vec::new();
    let mut held: HashSet<Identifier> = HashSet::new();
    let mut outcome = ScheduleOutcome::default();
    for _ in 0..steps {
        match rng.gen_range(0..4) {
            0 | 1 if live.len() < 64 => {
                let arity = rng.gen_range(1..=2);
                let ids: Vec<Identifier> = (0..arity)
                    .map(|_| manager.acquire().expect("identifier space"))
                    .collect();
                ids.iter().for_each(|&id| take(&mut held, id, &mut outcome));
                live.push(ids);
            }
            2 if !live.is_empty() => {
                let victim = live.swap_remove(rng.gen_range(0..live.len()));
                for id in victim {
                    held.remove(&id);
                    manager.free(id);
                }
            }
            _ if !live.is_empty() => {
                let k = rng.gen_range(0..live.len());
                let old = live[k].clone();
                let mut new = vec![Identifier::PASSIVE; old.len()];
                manager
                    .acquire_aggregate(&old, &mut new)
                    .expect("identifier space");
                outcome.aggregate_assignments += 1;
                if new.iter().any(|id| old.contains(id)) {
                    outcome.aliased += 1;
                }
                old.iter().for_each(|id| {
                    held.remove(id);
                });
                new.iter().for_each(|&id| take(&mut held, id, &mut outcome));
                live[k] = new;
            }
            _ => {}
        }
    }
    outcome
}

/// `schedules` random schedules of 10 to 200 steps under the reuse manager.
pub fn anti_aliasing_check(schedules: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    for n in 0..schedules {
        let steps = rng.gen_range(10..=200);
        let o = run_schedule::<ReuseIndexManager>(&mut rng, steps);
        let violations = (o.aliased + o.duplicated) as f64;
        report.record(
            &format!("schedule-{n}"),
            "anti-aliasing",
            &[steps as f64],
            violations,
            0.0,
            violations,
            0.0,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::LinearIndexManager;

    #[test]
    fn schedules_exercise_aggregate_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = run_schedule::<ReuseIndexManager>(&mut rng, 500);
        assert!(o.aggregate_assignments > 50);
        assert_eq!((o.aliased, o.duplicated), (0, 0));
        let o = run_schedule::<LinearIndexManager>(&mut rng, 500);
        assert_eq!((o.aliased, o.duplicated), (0, 0));
    }

    /// Releases the old identifiers first, which is the ordering the rule forbids.
    #[derive(Debug, Default)]
    struct FreeFirst(ReuseIndexManager);

    impl IndexManager for FreeFirst {
        const NAME: &'static str = "free-first";
        const REUSES: bool = true;

        fn acquire(&mut self) -> crate::Result<Identifier> {
            self.0.acquire()
        }

        fn free(&mut self, id: Identifier) {
            self.0.free(id)
        }

        fn assign_scalar(&mut self, old: Identifier) -> crate::Result<Identifier> {
            self.0.assign_scalar(old)
        }

        fn acquire_aggregate(
            &mut self,
            old: &[Identifier],
            new: &mut [Identifier],
        ) -> crate::Result<()> {
            old.iter().for_each(|&id| self.0.free(id));
            for slot in new.iter_mut() {
                *slot = self.0.acquire()?;
            }
            Ok(())
        }

        fn max_identifier(&self) -> Identifier {
            self.0.max_identifier()
        }

        fn reset(&mut self) {}
    }

    #[test]
    fn freeing_first_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = run_schedule::<FreeFirst>(&mut rng, 500);
        assert!(o.aliased > 0);
    }

    #[test]
    fn check_passes() {
        assert!(anti_aliasing_check(100, 2).passed());
    }
}
