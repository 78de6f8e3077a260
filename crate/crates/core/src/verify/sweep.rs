//! The elemental-operation sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{relative_error, CheckReport, CheckStatus};
use super::{dot, dot_product_check, fd_directional, with_scratch_tape, without_tape, FdConfig};
use crate::active::{ActiveComplex, ActiveReal};
use crate::complex::PairComplex;
use crate::expr::*;
use crate::tape::{self, TapeKind};
use num_complex::Complex64;

/// Real elemental operations.
pub const REAL_OPS: &[&str] = &[
    "add", "sub", "mul", "div", "pow", "sqrt", "exp", "log", "log10", "sin", "cos", "tan", "asin",
    "acos", "atan", "sinh", "cosh", "tanh", "asinh", "acosh", "atanh", "neg", "pos", "abs", "min",
    "max", "atan2", "square",
];

/// Complex elemental operations. The binary ones come in (ℂ,ℂ), (ℂ,ℝ) and
/// (ℝ,ℂ) shapes; `polar` and `complex` take two reals.
pub const COMPLEX_OPS: &[&str] = &[
    "add", "sub", "mul", "div", "pow", "polar", "complex", "pos", "neg", "real", "imag", "abs",
    "arg", "norm", "conj", "proj", "exp", "log", "log10", "sqrt", "sin", "cos", "tan", "asin",
    "acos", "atan", "sinh", "cosh", "tanh", "asinh", "acosh", "atanh", "square",
];

const COMPLEX_BINARY: &[&str] = &["add", "sub", "mul", "div", "pow"];
const REAL_BINARY: &[&str] = &["add", "sub", "mul", "div", "pow", "min", "max", "atan2"];

/// Every case name the sweep must contain.
pub fn required_case_names() -> Vec<String> {
    let mut names = Vec::new();
    for op in REAL_OPS {
        if REAL_BINARY.contains(op) {
            names.push(format!("{op}(R,R)"));
        } else {
            names.push(format!("{op}(R)"));
        }
    }
    for op in COMPLEX_OPS {
        if COMPLEX_BINARY.contains(op) {
            for shape in ["C,C", "C,R", "R,C"] {
                names.push(format!("{op}({shape})"));
            }
        } else if matches!(*op, "polar" | "complex") {
            names.push(format!("{op}(R,R)->C"));
        } else {
            names.push(format!("{op}(C)"));
        }
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Real,
    Complex,
}

impl ArgKind {
    pub fn width(self) -> usize {
        match self {
            ArgKind::Real => 1,
            ArgKind::Complex => 2,
        }
    }
}

/// An aggregated-path variable of either kind.
#[derive(Debug)]
pub enum Var {
    Real(ActiveReal),
    Complex(ActiveComplex),
}

/// A decomposed-path variable of either kind.
#[derive(Debug)]
pub enum PairVar {
    Real(ActiveReal),
    Complex(PairComplex),
}

macro_rules! var_access {
    ($T:ident, $Complex:ty) => {
        impl $T {
            pub fn from_flat(kind: ArgKind, x: &[f64]) -> Self {
                match kind {
                    ArgKind::Real => $T::Real(ActiveReal::new(x[0])),
                    ArgKind::Complex => {
                        $T::Complex(<$Complex as ConstantComplex>::constant(x[0], x[1]))
                    }
                }
            }

            pub fn r(&self) -> &ActiveReal {
                match self {
                    $T::Real(v) => v,
                    $T::Complex(_) => panic!("expected a real argument"),
                }
            }

            pub fn c(&self) -> &$Complex {
                match self {
                    $T::Complex(v) => v,
                    $T::Real(_) => panic!("expected a complex argument"),
                }
            }

            pub fn values(&self) -> Vec<f64> {
                match self {
                    $T::Real(v) => vec![v.value()],
                    $T::Complex(v) => {
                        let z = v.value();
                        vec![z.re, z.im]
                    }
                }
            }

            pub fn register(&mut self) {
                match self {
                    $T::Real(v) => v.register_input().unwrap(),
                    $T::Complex(v) => v.register_input().unwrap(),
                }
            }

            pub fn set_tangent(&self, d: &[f64]) {
                match self {
                    $T::Real(v) => v.set_tangent(d[0]).unwrap(),
                    $T::Complex(v) => v.set_tangent(Complex64::new(d[0], d[1])).unwrap(),
                }
            }

            pub fn tangent(&self) -> Vec<f64> {
                match self {
                    $T::Real(v) => vec![v.tangent()],
                    $T::Complex(v) => {
                        let z = v.tangent();
                        vec![z.re, z.im]
                    }
                }
            }

            pub fn set_gradient(&self, s: &[f64]) {
                match self {
                    $T::Real(v) => v.set_gradient(s[0]).unwrap(),
                    $T::Complex(v) => v.set_gradient(Complex64::new(s[0], s[1])).unwrap(),
                }
            }

            pub fn gradient(&self) -> Vec<f64> {
                match self {
                    $T::Real(v) => vec![v.gradient()],
                    $T::Complex(v) => {
                        let z = v.gradient();
                        vec![z.re, z.im]
                    }
                }
            }
        }
    };
}

trait ConstantComplex {
    fn constant(re: f64, im: f64) -> Self;
}

impl ConstantComplex for ActiveComplex {
    fn constant(re: f64, im: f64) -> Self {
        ActiveComplex::new(Complex64::new(re, im))
    }
}

impl ConstantComplex for PairComplex {
    fn constant(re: f64, im: f64) -> Self {
        PairComplex::constant(Complex64::new(re, im))
    }
}

var_access!(Var, ActiveComplex);
var_access!(PairVar, PairComplex);

type Sampler = fn(&mut ChaCha8Rng) -> Vec<f64>;

/// One operation in one overload shape.
#[derive(Clone, Copy)]
pub struct OpCase {
    /// Operation and shape, e.g. `mul(C,R)`.
    pub name: &'static str,
    pub args: &'static [ArgKind],
    /// Complex-to-complex and holomorphic: subject to the Cauchy–Riemann check.
    pub holomorphic: bool,
    /// Domain-safe point sampler returning the flattened argument components.
    pub sample: Sampler,
    pub handled: fn(&[Var]) -> Var,
    pub decomposed: Option<fn(&[PairVar]) -> PairVar>,
}

impl std::fmt::Debug for OpCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OpCase").field("name", &self.name).finish()
    }
}

impl OpCase {
    fn vars<T>(&self, x: &[f64], make: fn(ArgKind, &[f64]) -> T) -> Vec<T> {
        let mut offset = 0;
        self.args
            .iter()
            .map(|&k| {
                let v = make(k, &x[offset..offset + k.width()]);
                offset += k.width();
                v
            })
            .collect()
    }

    /// Primal value with no tape bound.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        without_tape(|| (self.handled)(&self.vars(x, Var::from_flat)).values())
    }

    /// Record the aggregated implementation on `kind`, propagate `xdot`
    /// forward alongside, and reverse from `ybar`.
    pub fn run(&self, kind: TapeKind, x: &[f64], xdot: &[f64], ybar: &[f64]) -> Run {
        with_scratch_tape(kind, || {
            tape::with_active_tape(|t| t.set_tangent_tracking(true)).unwrap();
            let mut vars = self.vars(x, Var::from_flat);
            let mut offset = 0;
            for v in vars.iter_mut() {
                v.register();
                let w = v.values().len();
                v.set_tangent(&xdot[offset..offset + w]);
                offset += w;
            }
            let y = (self.handled)(&vars);
            y.set_gradient(ybar);
            tape::evaluate_reverse().unwrap();
            Run {
                y: y.values(),
                ydot: y.tangent(),
                xbar: vars.iter().flat_map(|v| v.gradient()).collect(),
            }
        })
    }

    /// Record the decomposed implementation and reverse from `ybar`.
    pub fn run_decomposed(&self, x: &[f64], ybar: &[f64]) -> Option<Run> {
        let decomposed = self.decomposed?;
        Some(with_scratch_tape(TapeKind::JacobianLinear, || {
            let mut vars = self.vars(x, PairVar::from_flat);
            vars.iter_mut().for_each(PairVar::register);
            let y = decomposed(&vars);
            y.set_gradient(ybar);
            tape::evaluate_reverse().unwrap();
            Run {
                y: y.values(),
                ydot: Vec::new(),
                xbar: vars.iter().flat_map(|v| v.gradient()).collect(),
            }
        }))
    }
}

/// Outputs of one recorded evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub y: Vec<f64>,
    pub ydot: Vec<f64>,
    pub xbar: Vec<f64>,
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

/// `|x| ∈ [lo, hi]` with a random sign.
fn away_from_zero(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = uniform(r, lo, hi);
    if r.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// `z = ρ·e^{iθ}` with `ρ ∈ [lo, hi]` and `|θ| ≤ amax`.
fn polar_point(r: &mut ChaCha8Rng, lo: f64, hi: f64, amax: f64) -> [f64; 2] {
    let rho = uniform(r, lo, hi);
    let theta = uniform(r, -amax, amax);
    [rho * theta.cos(), rho * theta.sin()]
}

/// Real pair whose entries differ by at least `gap`.
fn separated_pair(r: &mut ChaCha8Rng, gap: f64) -> Vec<f64> {
    loop {
        let a = uniform(r, -2.0, 2.0);
        let b = uniform(r, -2.0, 2.0);
        if (a - b).abs() >= gap {
            return vec![a, b];
        }
    }
}

macro_rules! real_unary_cases {
    ($($name:literal => $f:ident, |$r:ident| $sample:expr;)*) => {
        vec![$(
            OpCase {
                name: concat!($name, "(R)"),
                args: &[ArgKind::Real],
                holomorphic: false,
                sample: |$r| vec![$sample],
                handled: |a| Var::Real(ActiveReal::from_expr($f(a[0].r()))),
                decomposed: None,
            },
        )*]
    };
}

macro_rules! real_binary_cases {
    ($($name:literal => |$a:ident, $b:ident| $expr:expr, |$r:ident| $sample:expr;)*) => {
        vec![$(
            OpCase {
                name: concat!($name, "(R,R)"),
                args: &[ArgKind::Real, ArgKind::Real],
                holomorphic: false,
                sample: |$r| $sample,
                handled: |v| {
                    let ($a, $b) = (v[0].r(), v[1].r());
                    Var::Real(ActiveReal::from_expr($expr))
                },
                decomposed: None,
            },
        )*]
    };
}

macro_rules! complex_unary_cases {
    ($($name:literal, $holo:expr => $f:ident, |$p:ident| $dec:expr, |$r:ident| $sample:expr;)*) => {
        vec![$(
            OpCase {
                name: concat!($name, "(C)"),
                args: &[ArgKind::Complex],
                holomorphic: $holo,
                sample: |$r| $sample.to_vec(),
                handled: |a| Var::Complex(ActiveComplex::from_expr($f(a[0].c()))),
                decomposed: Some(|a| {
                    let $p = a[0].c();
                    PairVar::Complex($dec)
                }),
            },
        )*]
    };
}

macro_rules! complex_to_real_cases {
    ($($name:literal => |$z:ident| $handled:expr, |$p:ident| $dec:expr, |$r:ident| $sample:expr;)*) => {
        vec![$(
            OpCase {
                name: concat!($name, "(C)"),
                args: &[ArgKind::Complex],
                holomorphic: false,
                sample: |$r| $sample.to_vec(),
                handled: |a| {
                    let $z = a[0].c();
                    Var::Real(ActiveReal::from_expr($handled))
                },
                decomposed: Some(|a| {
                    let $p = a[0].c();
                    PairVar::Real($dec)
                }),
            },
        )*]
    };
}

macro_rules! complex_binary_cases {
    ($($name:literal, [$ka:ident, $kb:ident] => |$a:ident, $b:ident| $handled:expr,
        |$pa:ident, $pb:ident| $dec:expr, |$r:ident| $sample:expr;)*) => {
        vec![$(
            OpCase {
                name: $name,
                args: &[ArgKind::$ka, ArgKind::$kb],
                holomorphic: false,
                sample: |$r| $sample,
                handled: |v| {
                    let ($a, $b) = (complex_binary_cases!(@get v[0], $ka), complex_binary_cases!(@get v[1], $kb));
                    Var::Complex(ActiveComplex::from_expr($handled))
                },
                decomposed: Some(|v| {
                    let ($pa, $pb) = (complex_binary_cases!(@get v[0], $ka), complex_binary_cases!(@get v[1], $kb));
                    PairVar::Complex($dec)
                }),
            },
        )*]
    };
    (@get $v:expr, Real) => { $v.r() };
    (@get $v:expr, Complex) => { $v.c() };
}

fn cat(parts: &[&[f64]]) -> Vec<f64> {
    parts.concat()
}

/// Every operation case of the sweep.
pub fn op_cases() -> Vec<OpCase> {
    let mut cases = real_unary_cases! {
        "neg" => neg, |r| uniform(r, -2.0, 2.0);
        "pos" => pos, |r| uniform(r, -2.0, 2.0);
        "sqrt" => sqrt, |r| uniform(r, 0.2, 3.0);
        "exp" => exp, |r| uniform(r, -2.0, 2.0);
        "log" => log, |r| uniform(r, 0.2, 3.0);
        "log10" => log10, |r| uniform(r, 0.2, 3.0);
        "sin" => sin, |r| uniform(r, -3.0, 3.0);
        "cos" => cos, |r| uniform(r, -3.0, 3.0);
        "tan" => tan, |r| uniform(r, -1.2, 1.2);
        "asin" => asin, |r| uniform(r, -0.9, 0.9);
        "acos" => acos, |r| uniform(r, -0.9, 0.9);
        "atan" => atan, |r| uniform(r, -3.0, 3.0);
        "sinh" => sinh, |r| uniform(r, -2.0, 2.0);
        "cosh" => cosh, |r| uniform(r, -2.0, 2.0);
        "tanh" => tanh, |r| uniform(r, -2.0, 2.0);
        "asinh" => asinh, |r| uniform(r, -3.0, 3.0);
        "acosh" => acosh, |r| uniform(r, 1.2, 3.0);
        "atanh" => atanh, |r| uniform(r, -0.9, 0.9);
        "abs" => abs, |r| away_from_zero(r, 0.1, 2.0);
        "square" => square, |r| uniform(r, -2.0, 2.0);
    };

    cases.extend(real_binary_cases! {
        "add" => |a, b| a + b, |r| vec![uniform(r, -2.0, 2.0), uniform(r, -2.0, 2.0)];
        "sub" => |a, b| a - b, |r| vec![uniform(r, -2.0, 2.0), uniform(r, -2.0, 2.0)];
        "mul" => |a, b| a * b, |r| vec![uniform(r, -2.0, 2.0), uniform(r, -2.0, 2.0)];
        "div" => |a, b| a / b, |r| vec![uniform(r, -2.0, 2.0), away_from_zero(r, 0.5, 2.0)];
        "pow" => |a, b| pow(a, b), |r| vec![uniform(r, 0.3, 2.0), uniform(r, -2.0, 2.0)];
        "atan2" => |a, b| atan2(a, b), |r| vec![uniform(r, 0.2, 2.0), uniform(r, -2.0, 2.0)];
        "min" => |a, b| min(a, b), |r| separated_pair(r, 0.1);
        "max" => |a, b| max(a, b), |r| separated_pair(r, 0.1);
    });

    cases.extend(complex_unary_cases! {
        "pos", true => pos, |p| p.clone(), |r| polar_point(r, 0.2, 2.0, 3.1);
        "neg", true => neg, |p| -p, |r| polar_point(r, 0.2, 2.0, 3.1);
        "conj", false => conj, |p| p.conj(), |r| polar_point(r, 0.2, 2.0, 3.1);
        "proj", true => proj, |p| p.proj(), |r| polar_point(r, 0.2, 2.0, 3.1);
        "exp", true => exp, |p| p.exp(), |r| polar_point(r, 0.2, 1.5, 3.1);
        "log", true => log, |p| p.ln(), |r| polar_point(r, 0.5, 2.0, 3.0);
        "log10", true => log10, |p| p.log10(), |r| polar_point(r, 0.5, 2.0, 3.0);
        "sqrt", true => sqrt, |p| p.sqrt(), |r| polar_point(r, 0.5, 2.0, 3.0);
        "sin", true => sin, |p| p.sin(), |r| polar_point(r, 0.2, 1.5, 3.1);
        "cos", true => cos, |p| p.cos(), |r| polar_point(r, 0.2, 1.5, 3.1);
        "tan", true => tan, |p| p.tan(), |r| polar_point(r, 0.2, 1.0, 3.1);
        "asin", true => asin, |p| p.asin(), |r| polar_point(r, 0.2, 0.8, 3.1);
        "acos", true => acos, |p| p.acos(), |r| polar_point(r, 0.2, 0.8, 3.1);
        "atan", true => atan, |p| p.atan(), |r| polar_point(r, 0.2, 0.8, 3.1);
        "sinh", true => sinh, |p| p.sinh(), |r| polar_point(r, 0.2, 1.5, 3.1);
        "cosh", true => cosh, |p| p.cosh(), |r| polar_point(r, 0.2, 1.5, 3.1);
        "tanh", true => tanh, |p| p.tanh(), |r| polar_point(r, 0.2, 1.0, 3.1);
        "asinh", true => asinh, |p| p.asinh(), |r| polar_point(r, 0.2, 0.8, 3.1);
        "acosh", true => acosh, |p| p.acosh(), |r| [uniform(r, -2.0, 2.0), away_from_zero(r, 0.3, 1.0)];
        "atanh", true => atanh, |p| p.atanh(), |r| polar_point(r, 0.2, 0.8, 3.1);
        "square", true => square, |p| p.square(), |r| polar_point(r, 0.2, 2.0, 3.1);
    });

    cases.extend(complex_to_real_cases! {
        "real" => |z| z.real(), |p| p.real(), |r| polar_point(r, 0.2, 2.0, 3.1);
        "imag" => |z| z.imag(), |p| p.imag(), |r| polar_point(r, 0.2, 2.0, 3.1);
        "abs" => |z| abs(z), |p| p.abs(), |r| polar_point(r, 0.5, 2.0, 3.1);
        "arg" => |z| arg(z), |p| p.arg(), |r| polar_point(r, 0.5, 2.0, 3.0);
        "norm" => |z| norm(z), |p| p.norm_sqr(), |r| polar_point(r, 0.2, 2.0, 3.1);
    });

    cases.extend(complex_binary_cases! {
        "add(C,C)", [Complex, Complex] => |a, b| a + b, |a, b| a + b,
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &polar_point(r, 0.2, 2.0, 3.1)]);
        "sub(C,C)", [Complex, Complex] => |a, b| a - b, |a, b| a - b,
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &polar_point(r, 0.2, 2.0, 3.1)]);
        "mul(C,C)", [Complex, Complex] => |a, b| a * b, |a, b| a * b,
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &polar_point(r, 0.2, 2.0, 3.1)]);
        "div(C,C)", [Complex, Complex] => |a, b| a / b, |a, b| a / b,
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &polar_point(r, 0.5, 2.0, 3.1)]);
        "pow(C,C)", [Complex, Complex] => |a, b| pow(a, b), |a, b| a.powc(b),
            |r| cat(&[&polar_point(r, 0.5, 2.0, 2.5), &polar_point(r, 0.2, 1.0, 3.1)]);
        "add(C,R)", [Complex, Real] => |a, b| a + b, |a, b| a.add_real(b),
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &[uniform(r, -2.0, 2.0)]]);
        "sub(C,R)", [Complex, Real] => |a, b| a - b, |a, b| a.sub_real(b),
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &[uniform(r, -2.0, 2.0)]]);
        "mul(C,R)", [Complex, Real] => |a, b| a * b, |a, b| a.mul_real(b),
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &[uniform(r, -2.0, 2.0)]]);
        "div(C,R)", [Complex, Real] => |a, b| a / b, |a, b| a.div_real(b),
            |r| cat(&[&polar_point(r, 0.2, 2.0, 3.1), &[away_from_zero(r, 0.5, 2.0)]]);
        "pow(C,R)", [Complex, Real] => |a, b| pow(a, b), |a, b| a.powf(b),
            |r| cat(&[&polar_point(r, 0.5, 2.0, 2.5), &[uniform(r, -2.0, 2.0)]]);
        "add(R,C)", [Real, Complex] => |a, b| a + b, |a, b| b.add_real(a),
            |r| cat(&[&[uniform(r, -2.0, 2.0)], &polar_point(r, 0.2, 2.0, 3.1)]);
        "sub(R,C)", [Real, Complex] => |a, b| a - b, |a, b| PairComplex::real_sub(a, b),
            |r| cat(&[&[uniform(r, -2.0, 2.0)], &polar_point(r, 0.2, 2.0, 3.1)]);
        "mul(R,C)", [Real, Complex] => |a, b| a * b, |a, b| b.mul_real(a),
            |r| cat(&[&[uniform(r, -2.0, 2.0)], &polar_point(r, 0.2, 2.0, 3.1)]);
        "div(R,C)", [Real, Complex] => |a, b| a / b, |a, b| PairComplex::real_div(a, b),
            |r| cat(&[&[uniform(r, -2.0, 2.0)], &polar_point(r, 0.5, 2.0, 3.1)]);
        "pow(R,C)", [Real, Complex] => |a, b| pow(a, b), |a, b| PairComplex::real_powc(a, b),
            |r| cat(&[&[uniform(r, 0.3, 2.0)], &polar_point(r, 0.2, 1.0, 3.1)]);
        "polar(R,R)->C", [Real, Real] => |a, b| polar(a, b), |a, b| PairComplex::polar(a, b),
            |r| vec![uniform(r, 0.5, 2.0), uniform(r, -3.0, 3.0)];
        "complex(R,R)->C", [Real, Real] => |a, b| complex(a, b),
            |a, b| PairComplex::new(a.clone(), b.clone()),
            |r| vec![uniform(r, -2.0, 2.0), uniform(r, -2.0, 2.0)];
    });

    cases
}

/// Sweep settings.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub points: usize,
    pub seed: u64,
    pub fd: FdConfig,
    pub decomposed_tolerance: f64,
    /// Input adjoints of the four tape configurations must agree this closely.
    pub cross_tape_tolerance: f64,
    pub holomorphy_tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            points: 5,
            seed: 0x5eed,
            fd: FdConfig::default(),
            decomposed_tolerance: 1e-10,
            cross_tape_tolerance: 1e-15,
            holomorphy_tolerance: 1e-12,
        }
    }
}

/// `max|aᵢ − bᵢ| / max(‖a‖∞, ‖b‖∞, 1e-30)`.
pub(crate) fn vector_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = a.iter().chain(b).fold(1e-30f64, |m, x| m.max(x.abs()));
    diff / scale
}

pub fn op_sweep() -> CheckReport {
    op_sweep_with(&SweepConfig::default())
}

pub fn op_sweep_with(config: &SweepConfig) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = CheckReport::default();
    for case in op_cases() {
        for _ in 0..config.points {
            let x = (case.sample)(&mut rng);
            check_point(&case, &x, &mut rng, config, &mut report);
        }
    }
    report
}

fn check_point(
    case: &OpCase,
    x: &[f64],
    rng: &mut ChaCha8Rng,
    config: &SweepConfig,
    report: &mut CheckReport,
) {
    let name = case.name;
    let xdot: Vec<f64> = x.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let width = case.evaluate(x).len();
    let ybar: Vec<f64> = (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let runs: Vec<(TapeKind, Run)> = TapeKind::ALL
        .into_iter()
        .map(|kind| (kind, case.run(kind, x, &xdot, &ybar)))
        .collect();
    let reference = &runs[0].1;

    for (kind, run) in &runs {
        let lhs = dot(&ybar, &run.ydot);
        let rhs = dot(&run.xbar, &xdot);
        let (err, _) = dot_product_check(lhs, rhs);
        report.record(
            name,
            &format!("dot-product/{kind}"),
            x,
            rhs,
            lhs,
            err,
            super::DOT_PRODUCT_TOLERANCE,
        );
    }

    let cross = runs
        .iter()
        .map(|(_, r)| vector_error(&r.xbar, &reference.xbar))
        .fold(0.0, f64::max);
    report.record(
        name,
        "cross-tape",
        x,
        cross,
        0.0,
        cross,
        config.cross_tape_tolerance,
    );

    let tangent = dot(&ybar, &reference.ydot);
    match fd_directional(|p| dot(&ybar, &case.evaluate(p)), x, &xdot, &config.fd) {
        Some(fd) => report.record(
            name,
            "finite-difference",
            x,
            tangent,
            fd,
            relative_error(tangent, fd),
            config.fd.tolerance,
        ),
        None => report.push(super::CheckEntry {
            op: name.to_owned(),
            check: "finite-difference".to_owned(),
            point: x.to_vec(),
            analytic: tangent,
            oracle: f64::NAN,
            error: f64::NAN,
            tolerance: config.fd.tolerance,
            status: CheckStatus::Inconclusive,
        }),
    }

    if let Some(dec) = case.run_decomposed(x, &ybar) {
        let err = vector_error(&reference.xbar, &dec.xbar);
        report.record(
            name,
            "decomposed-adjoint",
            x,
            0.0,
            0.0,
            err,
            config.decomposed_tolerance,
        );
        let err = vector_error(&reference.y, &dec.y);
        report.record(
            name,
            "decomposed-value",
            x,
            0.0,
            0.0,
            err,
            config.decomposed_tolerance,
        );
    }

    if case.holomorphic {
        // Columns of the real 2×2 Jacobian from two forward runs; the reverse
        // run with w̄ = 1 must return conj(f').
        let e1 = case.run(TapeKind::JacobianLinear, x, &[1.0, 0.0], &[1.0, 0.0]);
        let e2 = case.run(TapeKind::JacobianLinear, x, &[0.0, 1.0], &[1.0, 0.0]);
        let (a, b) = (e1.ydot[0], e1.ydot[1]);
        let scale = a.abs().max(b.abs()).max(1e-30);
        let cr = (e2.ydot[0] + b).abs().max((e2.ydot[1] - a).abs()) / scale;
        report.record(
            name,
            "cauchy-riemann",
            x,
            0.0,
            0.0,
            cr,
            config.holomorphy_tolerance,
        );
        let adj = vector_error(&e1.xbar, &[a, -b]);
        report.record(
            name,
            "conjugate-adjoint",
            x,
            0.0,
            0.0,
            adj,
            config.holomorphy_tolerance,
        );
    }
}

/// For each mixed overload, compare the real argument's adjoint with the real
/// part of the adjoint it gets when promoted to a complex input `β + 0i`.
/// Both the real and the complex adjoints must match exactly.
pub fn projection_rule_check(points: usize, seed: u64) -> CheckReport {
    let cases = op_cases();
    let find = |n: &str| *cases.iter().find(|c| c.name == n).expect("case exists");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    for op in COMPLEX_BINARY {
        let promoted = find(&format!("{op}(C,C)"));
        for (shape, real_at) in [("C,R", 2usize), ("R,C", 0usize)] {
            let mixed = find(&format!("{op}({shape})"));
            for _ in 0..points {
                let x = (mixed.sample)(&mut rng);
                let mut xp = x.clone();
                xp.insert(real_at + 1, 0.0);
                let ybar = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let m = mixed.run(TapeKind::JacobianLinear, &x, &vec![0.0; x.len()], &ybar);
                let p = promoted.run(TapeKind::JacobianLinear, &xp, &vec![0.0; xp.len()], &ybar);
                let mut expected = p.xbar.clone();
                expected.remove(real_at + 1);
                let exact = m.xbar == expected;
                report.record(
                    mixed.name,
                    "projection-rule",
                    &x,
                    m.xbar[real_at],
                    p.xbar[real_at],
                    if exact {
                        0.0
                    } else {
                        vector_error(&m.xbar, &expected).max(f64::MIN_POSITIVE)
                    },
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
    use std::collections::HashSet;

    #[test]
    fn every_operation_has_a_case() {
        let names: HashSet<&str> = op_cases().iter().map(|c| c.name).collect();
        for required in required_case_names() {
            assert!(
                names.contains(required.as_str()),
                "no sweep case for {required}"
            );
        }
        assert_eq!(names.len(), op_cases().len(), "duplicate case names");
    }

    #[test]
    fn sweep_passes_for_a_few_cases() {
        let config = SweepConfig {
            points: 2,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut report = CheckReport::default();
        for case in op_cases()
            .iter()
            .filter(|c| ["tanh(C)", "mul(C,R)", "abs(R)"].contains(&c.name))
        {
            let x = (case.sample)(&mut rng);
            check_point(case, &x, &mut rng, &config, &mut report);
        }
        assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn complex_tanh_fd_at_reference_point() {
        let case = op_cases()
            .into_iter()
            .find(|c| c.name == "tanh(C)")
            .unwrap();
        let x = [0.5, 0.5];
        let mut report = CheckReport::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        check_point(&case, &x, &mut rng, &SweepConfig::default(), &mut report);
        assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn projection_rule_holds() {
        let report = projection_rule_check(3, 5);
        assert_eq!(report.entries.len(), 30);
        assert!(report.passed(), "{}", report.to_text());
    }
}
