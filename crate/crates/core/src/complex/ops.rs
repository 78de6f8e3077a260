//! Complex and mixed real/complex elemental operations.
//!
//! A complex value is a point of ℝ². For a holomorphic operation with complex
//! derivative `f'`, the forward update is `ẇ = f'·ż` and the reverse update is
//! `z̄ += conj(f')·w̄`, the transpose of the 2×2 real Jacobian block.
//!
//! Mixed overloads promote the real argument `β` to `β + 0i`, run the complex
//! rule, and keep only the real part of the increment for `β`. That is the
//! reverse of the embedding ℝ → ℂ, whose adjoint is `ᾱ += Re(w̄)`.

use num_complex::Complex64;

use crate::expr::{
    Abs, Acos, Acosh, Add, Arg, Asin, Asinh, Atan, Atanh, BinaryOp, Conj, Cos, Cosh, Div, Exp, Log,
    Log10, Mul, Neg, Norm, Polar, Pos, Pow, Proj, Sin, Sinh, Sqrt, Square, Sub, Tan, Tanh, UnaryOp,
};

type C = Complex64;

const ONE: C = C::new(1.0, 0.0);

#[inline]
fn promote(x: f64) -> C {
    C::new(x, 0.0)
}

macro_rules! holomorphic_unary {
    ($($Op:ident: |$z:ident, $w:ident| $value:expr, $deriv:expr;)*) => {
        $(
            impl UnaryOp<C> for $Op {
                type Output = C;

                #[inline]
                fn eval($z: C) -> C {
                    $value
                }

                #[inline]
                #[allow(unused_variables)]
                fn reverse($z: C, $w: C, adjoint: C) -> C {
                    let d: C = $deriv;
                    d.conj() * adjoint
                }

                #[inline]
                #[allow(unused_variables)]
                fn tangent($z: C, $w: C, dot: C) -> C {
                    let d: C = $deriv;
                    d * dot
                }
            }
        )*
    };
}

holomorphic_unary! {
    Exp: |z, w| z.exp(), w;
    Log: |z, w| z.ln(), ONE / z;
    Log10: |z, w| z.log10(), ONE / (z * std::f64::consts::LN_10);
    Sqrt: |z, w| z.sqrt(), ONE / (2.0 * w);
    Sin: |z, w| z.sin(), z.cos();
    Cos: |z, w| z.cos(), -z.sin();
    Tan: |z, w| z.tan(), ONE + w * w;
    Asin: |z, w| z.asin(), ONE / (ONE - z * z).sqrt();
    Acos: |z, w| z.acos(), -ONE / (ONE - z * z).sqrt();
    Atan: |z, w| z.atan(), ONE / (ONE + z * z);
    Sinh: |z, w| z.sinh(), z.cosh();
    Cosh: |z, w| z.cosh(), z.sinh();
    Tanh: |z, w| z.tanh(), ONE - w * w;
    Asinh: |z, w| z.asinh(), ONE / (ONE + z * z).sqrt();
    Acosh: |z, w| z.acosh(), ONE / ((z - ONE).sqrt() * (z + ONE).sqrt());
    Atanh: |z, w| z.atanh(), ONE / (ONE - z * z);
    Square: |z, w| z * z, 2.0 * z;
}

impl UnaryOp<C> for Pos {
    type Output = C;

    #[inline]
    fn eval(z: C) -> C {
        z
    }

    #[inline]
    fn reverse(_z: C, _w: C, adjoint: C) -> C {
        adjoint
    }

    #[inline]
    fn tangent(_z: C, _w: C, dot: C) -> C {
        dot
    }
}

impl UnaryOp<C> for Neg {
    type Output = C;

    #[inline]
    fn eval(z: C) -> C {
        -z
    }

    #[inline]
    fn reverse(_z: C, _w: C, adjoint: C) -> C {
        -adjoint
    }

    #[inline]
    fn tangent(_z: C, _w: C, dot: C) -> C {
        -dot
    }
}

/// Real Jacobian `diag(1, -1)`, which is its own transpose.
impl UnaryOp<C> for Conj {
    type Output = C;

    #[inline]
    fn eval(z: C) -> C {
        z.conj()
    }

    #[inline]
    fn reverse(_z: C, _w: C, adjoint: C) -> C {
        adjoint.conj()
    }

    #[inline]
    fn tangent(_z: C, _w: C, dot: C) -> C {
        dot.conj()
    }
}

/// Identity on finite values. Infinite inputs map to `(+∞, ±0)` and are not
/// differentiated.
impl UnaryOp<C> for Proj {
    type Output = C;

    #[inline]
    fn eval(z: C) -> C {
        if z.re.is_infinite() || z.im.is_infinite() {
            C::new(f64::INFINITY, 0.0_f64.copysign(z.im))
        } else {
            z
        }
    }

    #[inline]
    fn reverse(_z: C, _w: C, adjoint: C) -> C {
        adjoint
    }

    #[inline]
    fn tangent(_z: C, _w: C, dot: C) -> C {
        dot
    }
}

/// `|z|`, with partials `(x, y)/|z|` and zero partials at `z = 0`.
impl UnaryOp<C> for Abs {
    type Output = f64;

    #[inline]
    fn eval(z: C) -> f64 {
        z.norm()
    }

    #[inline]
    fn reverse(z: C, w: f64, adjoint: f64) -> C {
        if w == 0.0 {
            C::new(0.0, 0.0)
        } else {
            C::new(z.re / w * adjoint, z.im / w * adjoint)
        }
    }

    #[inline]
    fn tangent(z: C, w: f64, dot: C) -> f64 {
        if w == 0.0 {
            0.0
        } else {
            z.re / w * dot.re + z.im / w * dot.im
        }
    }
}

/// `atan2(y, x)`, with partials `(-y, x)/|z|²` and zero partials at `z = 0`.
impl UnaryOp<C> for Arg {
    type Output = f64;

    #[inline]
    fn eval(z: C) -> f64 {
        z.arg()
    }

    #[inline]
    fn reverse(z: C, _w: f64, adjoint: f64) -> C {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            C::new(0.0, 0.0)
        } else {
            C::new(-z.im / r2 * adjoint, z.re / r2 * adjoint)
        }
    }

    #[inline]
    fn tangent(z: C, _w: f64, dot: C) -> f64 {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            0.0
        } else {
            -z.im / r2 * dot.re + z.re / r2 * dot.im
        }
    }
}

/// `x² + y²`.
impl UnaryOp<C> for Norm {
    type Output = f64;

    #[inline]
    fn eval(z: C) -> f64 {
        z.norm_sqr()
    }

    #[inline]
    fn reverse(z: C, _w: f64, adjoint: f64) -> C {
        C::new(2.0 * z.re * adjoint, 2.0 * z.im * adjoint)
    }

    #[inline]
    fn tangent(z: C, _w: f64, dot: C) -> f64 {
        2.0 * z.re * dot.re + 2.0 * z.im * dot.im
    }
}

macro_rules! holomorphic_binary {
    ($($Op:ident: |$a:ident, $b:ident, $w:ident| $value:expr, $da:expr, $db:expr;)*) => {
        $(
            impl BinaryOp<C, C> for $Op {
                type Output = C;

                #[inline]
                fn eval($a: C, $b: C) -> C {
                    $value
                }

                #[inline]
                #[allow(unused_variables)]
                fn reverse($a: C, $b: C, $w: C, adjoint: C) -> (C, C) {
                    let da: C = $da;
                    let db: C = $db;
                    (da.conj() * adjoint, db.conj() * adjoint)
                }

                #[inline]
                #[allow(unused_variables)]
                fn tangent($a: C, $b: C, $w: C, a_dot: C, b_dot: C) -> C {
                    let da: C = $da;
                    let db: C = $db;
                    da * a_dot + db * b_dot
                }
            }
        )*
    };
}

holomorphic_binary! {
    Mul: |a, b, w| a * b, b, a;
    Div: |a, b, w| a / b, ONE / b, -w / b;
    // exp(b·ln a) on the principal branch.
    Pow: |a, b, w| (b * a.ln()).exp(), b * w / a, w * a.ln();
}

impl BinaryOp<C, C> for Add {
    type Output = C;

    #[inline]
    fn eval(a: C, b: C) -> C {
        a + b
    }

    #[inline]
    fn reverse(_a: C, _b: C, _w: C, adjoint: C) -> (C, C) {
        (adjoint, adjoint)
    }

    #[inline]
    fn tangent(_a: C, _b: C, _w: C, a_dot: C, b_dot: C) -> C {
        a_dot + b_dot
    }
}

impl BinaryOp<C, C> for Sub {
    type Output = C;

    #[inline]
    fn eval(a: C, b: C) -> C {
        a - b
    }

    #[inline]
    fn reverse(_a: C, _b: C, _w: C, adjoint: C) -> (C, C) {
        (adjoint, -adjoint)
    }

    #[inline]
    fn tangent(_a: C, _b: C, _w: C, a_dot: C, b_dot: C) -> C {
        a_dot - b_dot
    }
}

macro_rules! mixed_by_promotion {
    ($($Op:ident),*) => {
        $(
            impl BinaryOp<C, f64> for $Op {
                type Output = C;

                #[inline]
                fn eval(a: C, b: f64) -> C {
                    <$Op as BinaryOp<C, C>>::eval(a, promote(b))
                }

                #[inline]
                fn reverse(a: C, b: f64, w: C, adjoint: C) -> (C, f64) {
                    let (da, db) = <$Op as BinaryOp<C, C>>::reverse(a, promote(b), w, adjoint);
                    (da, db.re)
                }

                #[inline]
                fn tangent(a: C, b: f64, w: C, a_dot: C, b_dot: f64) -> C {
                    <$Op as BinaryOp<C, C>>::tangent(a, promote(b), w, a_dot, promote(b_dot))
                }
            }

            impl BinaryOp<f64, C> for $Op {
                type Output = C;

                #[inline]
                fn eval(a: f64, b: C) -> C {
                    <$Op as BinaryOp<C, C>>::eval(promote(a), b)
                }

                #[inline]
                fn reverse(a: f64, b: C, w: C, adjoint: C) -> (f64, C) {
                    let (da, db) = <$Op as BinaryOp<C, C>>::reverse(promote(a), b, w, adjoint);
                    (da.re, db)
                }

                #[inline]
                fn tangent(a: f64, b: C, w: C, a_dot: f64, b_dot: C) -> C {
                    <$Op as BinaryOp<C, C>>::tangent(promote(a), b, w, promote(a_dot), b_dot)
                }
            }
        )*
    };
}

mixed_by_promotion!(Add, Sub, Mul, Div, Pow);

/// `polar(r, θ) = (r cos θ, r sin θ)`.
impl BinaryOp<f64, f64> for Polar {
    type Output = C;

    #[inline]
    fn eval(r: f64, theta: f64) -> C {
        C::from_polar(r, theta)
    }

    #[inline]
    fn reverse(r: f64, theta: f64, _w: C, adjoint: C) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        (
            c * adjoint.re + s * adjoint.im,
            -r * s * adjoint.re + r * c * adjoint.im,
        )
    }

    #[inline]
    fn tangent(r: f64, theta: f64, _w: C, r_dot: f64, theta_dot: f64) -> C {
        let (s, c) = theta.sin_cos();
        C::new(c * r_dot - r * s * theta_dot, s * r_dot + r * c * theta_dot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_transposes_the_real_block() {
        let a = C::new(1.0, 2.0);
        let b = C::new(3.0, 4.0);
        let w = <Mul as BinaryOp<C, C>>::eval(a, b);
        assert_eq!(w, C::new(-5.0, 10.0));
        let (da, db) = <Mul as BinaryOp<C, C>>::reverse(a, b, w, ONE);
        assert_eq!(da, C::new(3.0, -4.0));
        assert_eq!(db, C::new(1.0, -2.0));
    }

    #[test]
    fn mixed_multiply_projects_onto_the_real_argument() {
        let a = C::new(1.0, 2.0);
        let w = <Mul as BinaryOp<C, f64>>::eval(a, 3.0);
        let (da, db) = <Mul as BinaryOp<C, f64>>::reverse(a, 3.0, w, ONE);
        assert_eq!(da, C::new(3.0, 0.0));
        assert_eq!(db, 1.0);
    }

    #[test]
    fn conj_adjoint() {
        let (p, q) = (0.75, -1.5);
        let d = <Conj as UnaryOp<C>>::reverse(C::new(3.0, 4.0), C::new(3.0, -4.0), C::new(p, q));
        assert_eq!(d, C::new(p, -q));
    }

    #[test]
    fn polar_adjoint_at_zero_angle() {
        let w = <Polar as BinaryOp<f64, f64>>::eval(2.0, 0.0);
        assert_eq!(
            <Polar as BinaryOp<f64, f64>>::reverse(2.0, 0.0, w, ONE),
            (1.0, 0.0)
        );
    }

    #[test]
    fn magnitude_partials_vanish_at_origin() {
        let z = C::new(0.0, 0.0);
        assert_eq!(<Abs as UnaryOp<C>>::reverse(z, 0.0, 1.0), z);
        assert_eq!(<Arg as UnaryOp<C>>::reverse(z, 0.0, 1.0), z);
        let z = C::new(3.0, 4.0);
        assert_eq!(<Abs as UnaryOp<C>>::reverse(z, 5.0, 1.0), C::new(0.6, 0.8));
    }

    #[test]
    fn tanh_matches_exponential_form() {
        let z = C::new(0.5, 0.5);
        let e = (2.0 * z).exp();
        let oracle = (e - ONE) / (e + ONE);
        let w = <Tanh as UnaryOp<C>>::eval(z);
        assert!((w - oracle).norm() < 1e-15);
    }
}
