//! Compound assignments whose left-hand side also appears on the right.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::CheckReport;
use super::with_scratch_tape;
use crate::active::ActiveComplex;
use crate::identifier::Identifier;
use crate::tape::{self, TapeKind, TapeRecorder};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompoundOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl CompoundOp {
    pub const ALL: [CompoundOp; 4] = [
        CompoundOp::Add,
        CompoundOp::Sub,
        CompoundOp::Mul,
        CompoundOp::Div,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CompoundOp::Add => "+=",
            CompoundOp::Sub => "-=",
            CompoundOp::Mul => "*=",
            CompoundOp::Div => "/=",
        }
    }
}

/// Whether the update is written in place or through a temporary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `c op= a`
    Aliased,
    /// `t = c op a; c = t`
    Temporary,
}

fn gradient_of(ids: &[Identifier]) -> Vec<f64> {
    tape::with_active_tape(|t| ids.iter().map(|&id| t.gradient(id)).collect()).unwrap()
}

/// Adjoints of the inputs `c`, `a` after `c op= a` (in the given form) is
/// reversed from `c̄ = cbar`.
pub fn compound_adjoints(
    kind: TapeKind,
    op: CompoundOp,
    form: Form,
    c0: Complex64,
    a0: Complex64,
    cbar: Complex64,
) -> [f64; 4] {
    with_scratch_tape(kind, || {
        let mut c = ActiveComplex::new(c0);
        let mut a = ActiveComplex::new(a0);
        c.register_input().unwrap();
        a.register_input().unwrap();
        let c_ids = c.ids().to_vec();
        let a_ids = a.ids().to_vec();
        match form {
            Form::Aliased => match op {
                CompoundOp::Add => c += &a,
                CompoundOp::Sub => c -= &a,
                CompoundOp::Mul => c *= &a,
                CompoundOp::Div => c /= &a,
            },
            Form::Temporary => {
                let t = match op {
                    CompoundOp::Add => ActiveComplex::from_expr(&c + &a),
                    CompoundOp::Sub => ActiveComplex::from_expr(&c - &a),
                    CompoundOp::Mul => ActiveComplex::from_expr(&c * &a),
                    CompoundOp::Div => ActiveComplex::from_expr(&c / &a),
                };
                c.assign(&t);
            }
        }
        c.set_gradient(cbar).unwrap();
        tape::evaluate_reverse().unwrap();
        let g = [gradient_of(&c_ids), gradient_of(&a_ids)].concat();
        [g[0], g[1], g[2], g[3]]
    })
}

/// Aliased against temporary form for every compound operator at `points`
/// random points on every tape configuration. Agreement must be exact.
pub fn aliasing_check(points: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    let sample =
        |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    for _ in 0..points {
        let c0 = sample(&mut rng);
        let mut a0 = sample(&mut rng);
        while a0.norm() < 0.3 {
            a0 = sample(&mut rng);
        }
        let cbar = sample(&mut rng);
        let point = [c0.re, c0.im, a0.re, a0.im];
        for op in CompoundOp::ALL {
            for kind in TapeKind::ALL {
                let aliased = compound_adjoints(kind, op, Form::Aliased, c0, a0, cbar);
                let temporary = compound_adjoints(kind, op, Form::Temporary, c0, a0, cbar);
                let err = super::sweep::vector_error(&aliased, &temporary);
                let err = if aliased == temporary {
                    0.0
                } else {
                    err.max(f64::MIN_POSITIVE)
                };
                report.record(
                    &format!("c {} a", op.symbol()),
                    &format!("aliasing/{kind}"),
                    &point,
                    0.0,
                    0.0,
                    err,
                    0.0,
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_adjoints_by_hand() {
        // c = c·a with c̄ = 1: c̄₀ = conj(a), ā = conj(c₀).
        let c0 = Complex64::new(1.0, 2.0);
        let a0 = Complex64::new(3.0, -1.0);
        for kind in TapeKind::ALL {
            let g = compound_adjoints(
                kind,
                CompoundOp::Mul,
                Form::Aliased,
                c0,
                a0,
                Complex64::new(1.0, 0.0),
            );
            assert_eq!(g, [3.0, 1.0, 1.0, -2.0], "{kind}");
        }
    }

    #[test]
    fn aliased_equals_temporary() {
        let report = aliasing_check(5, 1);
        assert_eq!(report.entries.len(), 5 * 4 * 4);
        assert!(report.passed(), "{}", report.to_text());
    }
}
