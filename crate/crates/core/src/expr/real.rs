//! Real-valued elemental operations.

use super::ops::*;
use super::{BinaryOp, UnaryOp};

macro_rules! real_unary {
    ($($Op:ident: |$a:ident, $w:ident| $value:expr, $deriv:expr;)*) => {
        $(
            impl UnaryOp<f64> for $Op {
                type Output = f64;

                #[inline]
                fn eval($a: f64) -> f64 {
                    $value
                }

                #[inline]
                #[allow(unused_variables)]
                fn reverse($a: f64, $w: f64, adjoint: f64) -> f64 {
                    $deriv * adjoint
                }

                #[inline]
                #[allow(unused_variables)]
                fn tangent($a: f64, $w: f64, dot: f64) -> f64 {
                    $deriv * dot
                }
            }
        )*
    };
}

real_unary! {
    Pos: |a, w| a, 1.0;
    Sqrt: |a, w| a.sqrt(), 0.5 / w;
    Exp: |a, w| a.exp(), w;
    Log: |a, w| a.ln(), 1.0 / a;
    Log10: |a, w| a.log10(), 1.0 / (a * std::f64::consts::LN_10);
    Sin: |a, w| a.sin(), a.cos();
    Cos: |a, w| a.cos(), -a.sin();
    Tan: |a, w| a.tan(), 1.0 + w * w;
    Asin: |a, w| a.asin(), 1.0 / (1.0 - a * a).sqrt();
    Acos: |a, w| a.acos(), -1.0 / (1.0 - a * a).sqrt();
    Atan: |a, w| a.atan(), 1.0 / (1.0 + a * a);
    Sinh: |a, w| a.sinh(), a.cosh();
    Cosh: |a, w| a.cosh(), a.sinh();
    Tanh: |a, w| a.tanh(), 1.0 - w * w;
    Asinh: |a, w| a.asinh(), 1.0 / (a * a + 1.0).sqrt();
    Acosh: |a, w| a.acosh(), 1.0 / (a * a - 1.0).sqrt();
    Atanh: |a, w| a.atanh(), 1.0 / (1.0 - a * a);
    Square: |a, w| a * a, 2.0 * a;
}

impl UnaryOp<f64> for Neg {
    type Output = f64;

    #[inline]
    fn eval(a: f64) -> f64 {
        -a
    }

    #[inline]
    fn reverse(_a: f64, _w: f64, adjoint: f64) -> f64 {
        -adjoint
    }

    #[inline]
    fn tangent(_a: f64, _w: f64, dot: f64) -> f64 {
        -dot
    }
}

/// The derivative of `|x|` at zero is taken as zero.
impl UnaryOp<f64> for Abs {
    type Output = f64;

    #[inline]
    fn eval(a: f64) -> f64 {
        a.abs()
    }

    #[inline]
    fn reverse(a: f64, _w: f64, adjoint: f64) -> f64 {
        abs_slope(a) * adjoint
    }

    #[inline]
    fn tangent(a: f64, _w: f64, dot: f64) -> f64 {
        abs_slope(a) * dot
    }
}

#[inline]
fn abs_slope(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

macro_rules! real_binary {
    ($($Op:ident: |$a:ident, $b:ident, $w:ident| $value:expr, $da:expr, $db:expr;)*) => {
        $(
            impl BinaryOp<f64, f64> for $Op {
                type Output = f64;

                #[inline]
                fn eval($a: f64, $b: f64) -> f64 {
                    $value
                }

                #[inline]
                #[allow(unused_variables)]
                fn reverse($a: f64, $b: f64, $w: f64, adjoint: f64) -> (f64, f64) {
                    let da: f64 = $da;
                    let db: f64 = $db;
                    (da * adjoint, db * adjoint)
                }

                #[inline]
                #[allow(unused_variables)]
                fn tangent($a: f64, $b: f64, $w: f64, a_dot: f64, b_dot: f64) -> f64 {
                    let da: f64 = $da;
                    let db: f64 = $db;
                    da * a_dot + db * b_dot
                }
            }
        )*
    };
}

real_binary! {
    Mul: |a, b, w| a * b, b, a;
    Div: |a, b, w| a / b, 1.0 / b, -w / b;
    // The exponent partial w·ln(a) is taken as zero where ln(a) is undefined.
    Pow: |a, b, w| a.powf(b), b * a.powf(b - 1.0), if a > 0.0 { w * a.ln() } else { 0.0 };
    Atan2: |a, b, w| a.atan2(b), b / (a * a + b * b), -a / (a * a + b * b);
    // Ties send the whole adjoint to the second argument.
    Min: |a, b, w| if a < b { a } else { b }, if a < b { 1.0 } else { 0.0 }, if a < b { 0.0 } else { 1.0 };
    Max: |a, b, w| if a > b { a } else { b }, if a > b { 1.0 } else { 0.0 }, if a > b { 0.0 } else { 1.0 };
}

impl BinaryOp<f64, f64> for Add {
    type Output = f64;

    #[inline]
    fn eval(a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn reverse(_a: f64, _b: f64, _w: f64, adjoint: f64) -> (f64, f64) {
        (adjoint, adjoint)
    }

    #[inline]
    fn tangent(_a: f64, _b: f64, _w: f64, a_dot: f64, b_dot: f64) -> f64 {
        a_dot + b_dot
    }
}

impl BinaryOp<f64, f64> for Sub {
    type Output = f64;

    #[inline]
    fn eval(a: f64, b: f64) -> f64 {
        a - b
    }

    #[inline]
    fn reverse(_a: f64, _b: f64, _w: f64, adjoint: f64) -> (f64, f64) {
        (adjoint, -adjoint)
    }

    #[inline]
    fn tangent(_a: f64, _b: f64, _w: f64, a_dot: f64, b_dot: f64) -> f64 {
        a_dot - b_dot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn check_unary<Op: UnaryOp<f64, Output = f64>>(x: f64) {
        let w = Op::eval(x);
        let d = Op::reverse(x, w, 1.0);
        let fd = central(Op::eval, x);
        assert!(
            (d - fd).abs() <= 1e-6 * fd.abs().max(1.0),
            "{Op:?} at {x}: {d} vs {fd}",
            Op = Op::default()
        );
        assert_eq!(Op::tangent(x, w, 1.0), d);
    }

    #[test]
    fn unary_partials_match_differences() {
        for &x in &[0.3, 0.7, -0.4] {
            check_unary::<Pos>(x);
            check_unary::<Neg>(x);
            check_unary::<Sin>(x);
            check_unary::<Cos>(x);
            check_unary::<Tan>(x);
            check_unary::<Asin>(x);
            check_unary::<Acos>(x);
            check_unary::<Atan>(x);
            check_unary::<Sinh>(x);
            check_unary::<Cosh>(x);
            check_unary::<Tanh>(x);
            check_unary::<Asinh>(x);
            check_unary::<Atanh>(x);
            check_unary::<Exp>(x);
            check_unary::<Square>(x);
            check_unary::<Abs>(x);
        }
        for &x in &[0.3, 1.7, 4.0] {
            check_unary::<Sqrt>(x);
            check_unary::<Log>(x);
            check_unary::<Log10>(x);
        }
        check_unary::<Acosh>(1.5);
    }

    #[test]
    fn abs_slope_at_zero_is_zero() {
        assert_eq!(<Abs as UnaryOp<f64>>::reverse(0.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn binary_partials() {
        assert_eq!(
            <Mul as BinaryOp<f64, f64>>::reverse(2.0, 3.0, 6.0, 1.0),
            (3.0, 2.0)
        );
        let (da, db) = <Div as BinaryOp<f64, f64>>::reverse(1.0, 4.0, 0.25, 1.0);
        assert_eq!((da, db), (0.25, -0.0625));
        let (da, db) = <Pow as BinaryOp<f64, f64>>::reverse(2.0, 3.0, 8.0, 1.0);
        assert_eq!(da, 12.0);
        assert!((db - 8.0 * 2f64.ln()).abs() < 1e-15);
        let (_, db) = <Pow as BinaryOp<f64, f64>>::reverse(0.0, 2.0, 0.0, 1.0);
        assert_eq!(db, 0.0);
        let (da, db) = <Atan2 as BinaryOp<f64, f64>>::reverse(1.0, 2.0, 1f64.atan2(2.0), 1.0);
        let fa = central(|y| y.atan2(2.0), 1.0);
        let fb = central(|x| 1f64.atan2(x), 2.0);
        assert!((da - fa).abs() < 1e-9 && (db - fb).abs() < 1e-9);
        assert_eq!(
            <Max as BinaryOp<f64, f64>>::reverse(3.0, 1.0, 3.0, 1.0),
            (1.0, 0.0)
        );
        assert_eq!(
            <Min as BinaryOp<f64, f64>>::reverse(3.0, 1.0, 1.0, 1.0),
            (0.0, 1.0)
        );
    }
}
