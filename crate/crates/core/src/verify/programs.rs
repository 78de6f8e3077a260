//! Randomized straight-line programs over real and complex registers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::CheckReport;
use super::sweep::{vector_error, Run};
use super::with_scratch_tape;
use crate::active::{ActiveComplex, ActiveReal};
use crate::expr::*;
use crate::tape::{self, TapeKind};
use num_complex::Complex64;

/// One instruction shape. Every shape is non-expanding on bounded registers,
/// so long programs stay finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// `r[d] = sin(r[a]) * r[b]`
    SinTimes,
    /// `r[d] = tanh(r[a] + r[b])`
    TanhSum,
    /// `r[d] = atan(r[a] * r[b])`
    AtanProduct,
    /// `r[d] = exp(-square(r[a]))`
    Gaussian,
    /// `r[d] = r[a] / (1 + square(r[b]))`
    Damped,
    /// `r[d] = max(r[a], r[b])`
    Max,
    /// `r[d] *= cos(r[a])`
    RealScale,
    /// `r[d] += 0.5 * (r[a] - r[d])`
    RealRelax,
    /// `r[d] = tanh(real(c[a]) * imag(c[b]))`
    RealImagProduct,
    /// `r[d] = norm(c[a]) / (1 + norm(c[a]))`
    NormRatio,
    /// `r[d] = arg(c[a])`
    Arg,
    /// `r[d] = 0.5 * abs(c[a])`
    HalfAbs,
    /// `c[d] = 0.5 * (c[a] + c[b])`
    Mean,
    /// `c[d] = c[a] * c[b] / (1 + norm(c[b]))`
    NormalizedProduct,
    /// `c[d] = exp(-norm(c[a])) * c[b]`
    GaussianScale,
    /// `c[d] = exp(0.5 * c[a]) / (1 + norm(c[a]))`
    ComplexExp,
    /// `c[d] = log(0.5 * c[a] + 2)`
    ComplexLog,
    /// `c[d] = sqrt(c[a] + 2) * 0.5`
    ComplexSqrt,
    /// `c[d] *= c[a] / (1 + abs(c[a]))`
    ComplexScale,
    /// `c[d] /= 1 + norm(c[a])`
    ComplexShrink,
    /// `c[d] += 0.3 * (c[a] - c[d])`
    ComplexRelax,
    /// `c[d] -= 0.3 * (c[d] - c[a])`
    ComplexRelaxSub,
    /// `c[d] = complex(r[a], r[b])`
    Construct,
    /// `c[d] = polar(tanh(r[a]), r[b])`
    Polar,
    /// `c[d] = c[a] * r[b] * 0.5`
    MixedProduct,
    /// `c[d] = c[a].clone()`
    CloneComplex,
    /// `r[d] = r[a].clone()`
    CloneReal,
    /// `r[d]` becomes a passive constant with its current value.
    KillReal,
    /// `c[d]` becomes a passive constant with its current value.
    KillComplex,
}

impl Op {
    pub const ALL: [Op; 29] = [
        Op::SinTimes,
        Op::TanhSum,
        Op::AtanProduct,
        Op::Gaussian,
        Op::Damped,
        Op::Max,
        Op::RealScale,
        Op::RealRelax,
        Op::RealImagProduct,
        Op::NormRatio,
        Op::Arg,
        Op::HalfAbs,
        Op::Mean,
        Op::NormalizedProduct,
        Op::GaussianScale,
        Op::ComplexExp,
        Op::ComplexLog,
        Op::ComplexSqrt,
        Op::ComplexScale,
        Op::ComplexShrink,
        Op::ComplexRelax,
        Op::ComplexRelaxSub,
        Op::Construct,
        Op::Polar,
        Op::MixedProduct,
        Op::CloneComplex,
        Op::CloneReal,
        Op::KillReal,
        Op::KillComplex,
    ];

    /// Register kinds of (destination, first operand, second operand).
    fn kinds(self) -> (Reg, Reg, Reg) {
        use Op::*;
        use Reg::{C, R};
        match self {
            SinTimes | TanhSum | AtanProduct | Gaussian | Damped | Max | RealScale | RealRelax
            | CloneReal | KillReal => (R, R, R),
            RealImagProduct => (R, C, C),
            NormRatio | Arg | HalfAbs => (R, C, C),
            Mean | NormalizedProduct | GaussianScale | ComplexExp | ComplexLog | ComplexSqrt
            | ComplexScale | ComplexShrink | ComplexRelax | ComplexRelaxSub | CloneComplex
            | KillComplex => (C, C, C),
            Construct | Polar => (C, R, R),
            MixedProduct => (C, C, R),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reg {
    R,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instruction {
    pub op: Op,
    pub dst: usize,
    pub a: usize,
    pub b: usize,
}

/// A program over `reals` real and `complexes` complex registers. All
/// registers are initialized from the inputs and all are outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub reals: usize,
    pub complexes: usize,
    /// Per input register: `false` leaves it passive.
    pub active: Vec<bool>,
    pub body: Vec<Instruction>,
}

impl Program {
    pub fn random(rng: &mut ChaCha8Rng, min_statements: usize, max_statements: usize) -> Program {
        let reals = rng.gen_range(2..=5);
        let complexes = rng.gen_range(2..=5);
        let active = (0..reals + complexes).map(|_| rng.gen_bool(0.8)).collect();
        let len = rng.gen_range(min_statements..=max_statements);
        let body = (0..len)
            .map(|_| {
                let op = *Op::ALL.choose(rng).expect("non-empty");
                let (kd, ka, kb) = op.kinds();
                let mut pick = |k: Reg| match k {
                    Reg::R => rng.gen_range(0..reals),
                    Reg::C => rng.gen_range(0..complexes),
                };
                Instruction {
                    op,
                    dst: pick(kd),
                    a: pick(ka),
                    b: pick(kb),
                }
            })
            .collect();
        Program {
            reals,
            complexes,
            active,
            body,
        }
    }

    /// Length of the flattened input and output vectors.
    pub fn width(&self) -> usize {
        self.reals + 2 * self.complexes
    }

    /// Random inputs in `[-1, 1]`.
    pub fn sample_inputs(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.width())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect()
    }

    /// Record the program on a fresh tape of `kind` with tangents `xdot`
    /// propagated alongside, then reverse from `ybar`. Adjoints of passive
    /// inputs are reported as zero.
    pub fn run(&self, kind: TapeKind, x: &[f64], xdot: &[f64], ybar: &[f64]) -> Run {
        with_scratch_tape(kind, || {
            tape::with_active_tape(|t| t.set_tangent_tracking(true)).unwrap();
            let (mut rin, mut cin) = self.inputs(x);
            for (i, v) in rin.iter_mut().enumerate() {
                if self.active[i] {
                    v.register_input().unwrap();
                    v.set_tangent(xdot[i]).unwrap();
                }
            }
            for (j, v) in cin.iter_mut().enumerate() {
                if self.active[self.reals + j] {
                    let k = self.reals + 2 * j;
                    v.register_input().unwrap();
                    v.set_tangent(Complex64::new(xdot[k], xdot[k + 1])).unwrap();
                }
            }
            // Inputs stay alive and untouched so their adjoints survive
            // identifier reuse in the registers.
            let mut r: Vec<ActiveReal> = rin.clone();
            let mut c: Vec<ActiveComplex> = cin.clone();
            for ins in &self.body {
                execute(ins, &mut r, &mut c);
            }
            let (y, ydot) = flatten(
                &r,
                &c,
                |v| v.value(),
                |v| v.value(),
                |v| v.tangent(),
                |v| v.tangent(),
            );
            for (i, v) in r.iter().enumerate() {
                v.set_gradient(ybar[i]).unwrap();
            }
            for (j, v) in c.iter().enumerate() {
                let k = self.reals + 2 * j;
                v.set_gradient(Complex64::new(ybar[k], ybar[k + 1]))
                    .unwrap();
            }
            tape::evaluate_reverse().unwrap();
            let (xbar, _) = flatten(
                &rin,
                &cin,
                |v| v.gradient(),
                |v| v.gradient(),
                |_| 0.0,
                |_| Complex64::new(0.0, 0.0),
            );
            Run { y, ydot, xbar }
        })
    }

    /// Primal outputs with no tape bound.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        super::without_tape(|| {
            let (mut r, mut c) = self.inputs(x);
            for ins in &self.body {
                execute(ins, &mut r, &mut c);
            }
            flatten(
                &r,
                &c,
                |v| v.value(),
                |v| v.value(),
                |_| 0.0,
                |_| Complex64::new(0.0, 0.0),
            )
            .0
        })
    }

    /// Activity flag per flattened input component.
    pub fn flat_active(&self) -> Vec<bool> {
        let mut flags = self.active[..self.reals].to_vec();
        for &a in &self.active[self.reals..] {
            flags.extend([a, a]);
        }
        flags
    }

    fn inputs(&self, x: &[f64]) -> (Vec<ActiveReal>, Vec<ActiveComplex>) {
        let r = (0..self.reals).map(|i| ActiveReal::new(x[i])).collect();
        let c = (0..self.complexes)
            .map(|j| {
                let k = self.reals + 2 * j;
                ActiveComplex::new(Complex64::new(x[k], x[k + 1]))
            })
            .collect();
        (r, c)
    }
}

fn flatten(
    r: &[ActiveReal],
    c: &[ActiveComplex],
    fr: impl Fn(&ActiveReal) -> f64,
    fc: impl Fn(&ActiveComplex) -> Complex64,
    gr: impl Fn(&ActiveReal) -> f64,
    gc: impl Fn(&ActiveComplex) -> Complex64,
) -> (Vec<f64>, Vec<f64>) {
    let mut a: Vec<f64> = r.iter().map(&fr).collect();
    let mut b: Vec<f64> = r.iter().map(&gr).collect();
    for v in c {
        let (z, t) = (fc(v), gc(v));
        a.extend([z.re, z.im]);
        b.extend([t.re, t.im]);
    }
    (a, b)
}

fn execute(ins: &Instruction, r: &mut [ActiveReal], c: &mut [ActiveComplex]) {
    let Instruction { op, dst: d, a, b } = *ins;
    match op {
        Op::SinTimes => {
            let e = sin(&r[a]) * &r[b];
            r[d].assign(e);
        }
        Op::TanhSum => {
            let e = tanh(&r[a] + &r[b]);
            r[d].assign(e);
        }
        Op::AtanProduct => {
            let e = atan(&r[a] * &r[b]);
            r[d].assign(e);
        }
        Op::Gaussian => {
            let e = exp(-square(&r[a]));
            r[d].assign(e);
        }
        Op::Damped => {
            let e = &r[a] / (1.0 + square(&r[b]));
            r[d].assign(e);
        }
        Op::Max => {
            let e = max(&r[a], &r[b]);
            r[d].assign(e);
        }
        Op::RealScale => {
            let e = cos(&r[a]);
            r[d] *= e;
        }
        Op::RealRelax => {
            let e = 0.5 * (&r[a] - &r[d]);
            r[d] += e;
        }
        Op::RealImagProduct => {
            let e = tanh(c[a].real() * c[b].imag());
            r[d].assign(e);
        }
        Op::NormRatio => {
            let e = norm(&c[a]) / (1.0 + norm(&c[a]));
            r[d].assign(e);
        }
        Op::Arg => {
            let e = arg(&c[a]);
            r[d].assign(e);
        }
        Op::HalfAbs => {
            let e = 0.5 * abs(&c[a]);
            r[d].assign(e);
        }
        Op::Mean => {
            let e = 0.5 * (&c[a] + &c[b]);
            c[d].assign(e);
        }
        Op::NormalizedProduct => {
            let e = &c[a] * &c[b] / (1.0 + norm(&c[b]));
            c[d].assign(e);
        }
        Op::GaussianScale => {
            let e = exp(-norm(&c[a])) * &c[b];
            c[d].assign(e);
        }
        Op::ComplexExp => {
            let e = exp(0.5 * &c[a]) / (1.0 + norm(&c[a]));
            c[d].assign(e);
        }
        Op::ComplexLog => {
            let e = log(0.5 * &c[a] + 2.0);
            c[d].assign(e);
        }
        Op::ComplexSqrt => {
            let e = sqrt(&c[a] + 2.0) * 0.5;
            c[d].assign(e);
        }
        Op::ComplexScale => {
            let e = &c[a] / (1.0 + abs(&c[a]));
            c[d] *= e;
        }
        Op::ComplexShrink => {
            let e = 1.0 + norm(&c[a]);
            c[d] /= e;
        }
        Op::ComplexRelax => {
            let e = 0.3 * (&c[a] - &c[d]);
            c[d] += e;
        }
        Op::ComplexRelaxSub => {
            let e = 0.3 * (&c[d] - &c[a]);
            c[d] -= e;
        }
        Op::Construct => {
            let e = complex(&r[a], &r[b]);
            c[d].assign(e);
        }
        Op::Polar => {
            let e = polar(tanh(&r[a]), &r[b]);
            c[d].assign(e);
        }
        Op::MixedProduct => {
            let e = &c[a] * &r[b] * 0.5;
            c[d].assign(e);
        }
        Op::CloneComplex => {
            if d != a {
                c[d] = c[a].clone();
            }
        }
        Op::CloneReal => {
            if d != a {
                r[d] = r[a].clone();
            }
        }
        Op::KillReal => r[d] = ActiveReal::new(r[d].value()),
        Op::KillComplex => c[d] = ActiveComplex::new(c[d].value()),
    }
}

/// Record `count` random programs of 5–50 statements on every tape
/// configuration and compare input adjoints against the linear Jacobian tape.
pub fn cross_tape_check(count: usize, seed: u64, tolerance: f64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    for n in 0..count {
        let p = Program::random(&mut rng, 5, 50);
        let x = p.sample_inputs(&mut rng);
        let xdot = vec![0.0; p.width()];
        let ybar = p.sample_inputs(&mut rng);
        let reference = p.run(TapeKind::JacobianLinear, &x, &xdot, &ybar);
        for kind in &TapeKind::ALL[1..] {
            let run = p.run(*kind, &x, &xdot, &ybar);
            let err = vector_error(&reference.xbar, &run.xbar);
            report.record(
                &format!("program-{n}"),
                &format!("cross-tape/{kind}"),
                &x,
                0.0,
                0.0,
                err,
                tolerance,
            );
        }
    }
    report
}
