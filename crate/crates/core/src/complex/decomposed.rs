//! A complex type built from two independent real variables.
//!
//! Every complex operation on [`PairComplex`] is written out in real
//! elemental operations, following the formulas `num-complex` uses, and each
//! output component becomes its own real statement. It is the reference the
//! aggregated implementation is checked against, and the "unhandled" baseline
//! whose tape cost the aggregated statements are compared with.

use std::f64::consts::LN_10;
use std::ops;

use num_complex::Complex64;

use crate::active::ActiveReal;
use crate::error::Result;
use crate::expr::{atan2, cos, cosh, exp, log, sin, sinh, sqrt, square};

#[derive(Clone, Debug, Default)]
pub struct PairComplex {
    pub re: ActiveReal,
    pub im: ActiveReal,
}

impl PairComplex {
    pub fn new(re: ActiveReal, im: ActiveReal) -> Self {
        PairComplex { re, im }
    }

    /// A passive value.
    pub fn constant(value: Complex64) -> Self {
        PairComplex {
            re: ActiveReal::new(value.re),
            im: ActiveReal::new(value.im),
        }
    }

    /// `β + 0i` with the imaginary part passive.
    pub fn from_real(re: &ActiveReal) -> Self {
        PairComplex {
            re: re.clone(),
            im: ActiveReal::new(0.0),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn register_input(&mut self) -> Result<()> {
        self.re.register_input()?;
        self.im.register_input()
    }

    pub fn gradient(&self) -> Complex64 {
        Complex64::new(self.re.gradient(), self.im.gradient())
    }

    pub fn set_gradient(&self, seed: Complex64) -> Result<()> {
        self.re.set_gradient(seed.re)?;
        self.im.set_gradient(seed.im)
    }

    pub fn tangent(&self) -> Complex64 {
        Complex64::new(self.re.tangent(), self.im.tangent())
    }

    pub fn set_tangent(&self, dot: Complex64) -> Result<()> {
        self.re.set_tangent(dot.re)?;
        self.im.set_tangent(dot.im)
    }

    pub fn real(&self) -> ActiveReal {
        self.re.clone()
    }

    pub fn imag(&self) -> ActiveReal {
        self.im.clone()
    }

    pub fn conj(&self) -> Self {
        PairComplex {
            re: self.re.clone(),
            im: ActiveReal::from_expr(-&self.im),
        }
    }

    pub fn proj(&self) -> Self {
        self.clone()
    }

    /// `x² + y²`.
    pub fn norm_sqr(&self) -> ActiveReal {
        ActiveReal::from_expr(&self.re * &self.re + &self.im * &self.im)
    }

    pub fn abs(&self) -> ActiveReal {
        ActiveReal::from_expr(sqrt(square(&self.re) + square(&self.im)))
    }

    pub fn arg(&self) -> ActiveReal {
        ActiveReal::from_expr(atan2(&self.im, &self.re))
    }

    /// `(r cos θ, r sin θ)`.
    pub fn polar(r: &ActiveReal, theta: &ActiveReal) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(r * cos(theta)),
            im: ActiveReal::from_expr(r * sin(theta)),
        }
    }

    /// `i·z`.
    fn times_i(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(-&self.im),
            im: self.re.clone(),
        }
    }

    fn scale(&self, s: f64) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(s * &self.re),
            im: ActiveReal::from_expr(s * &self.im),
        }
    }

    pub fn exp(&self) -> Self {
        let e = ActiveReal::from_expr(exp(&self.re));
        PairComplex {
            re: ActiveReal::from_expr(&e * cos(&self.im)),
            im: ActiveReal::from_expr(&e * sin(&self.im)),
        }
    }

    pub fn ln(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(log(sqrt(square(&self.re) + square(&self.im)))),
            im: self.arg(),
        }
    }

    pub fn log10(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(log(sqrt(square(&self.re) + square(&self.im))) / LN_10),
            im: ActiveReal::from_expr(atan2(&self.im, &self.re) / LN_10),
        }
    }

    pub fn sqrt(&self) -> Self {
        let s = ActiveReal::from_expr(sqrt(sqrt(square(&self.re) + square(&self.im))));
        let half = ActiveReal::from_expr(atan2(&self.im, &self.re) * 0.5);
        PairComplex {
            re: ActiveReal::from_expr(&s * cos(&half)),
            im: ActiveReal::from_expr(&s * sin(&half)),
        }
    }

    pub fn sin(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(sin(&self.re) * cosh(&self.im)),
            im: ActiveReal::from_expr(cos(&self.re) * sinh(&self.im)),
        }
    }

    pub fn cos(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(cos(&self.re) * cosh(&self.im)),
            im: ActiveReal::from_expr(-(sin(&self.re) * sinh(&self.im))),
        }
    }

    pub fn tan(&self) -> Self {
        let d = ActiveReal::from_expr(cos(2.0 * &self.re) + cosh(2.0 * &self.im));
        PairComplex {
            re: ActiveReal::from_expr(sin(2.0 * &self.re) / &d),
            im: ActiveReal::from_expr(sinh(2.0 * &self.im) / &d),
        }
    }

    pub fn sinh(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(sinh(&self.re) * cos(&self.im)),
            im: ActiveReal::from_expr(cosh(&self.re) * sin(&self.im)),
        }
    }

    pub fn cosh(&self) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(cosh(&self.re) * cos(&self.im)),
            im: ActiveReal::from_expr(sinh(&self.re) * sin(&self.im)),
        }
    }

    pub fn tanh(&self) -> Self {
        let d = ActiveReal::from_expr(cosh(2.0 * &self.re) + cos(2.0 * &self.im));
        PairComplex {
            re: ActiveReal::from_expr(sinh(2.0 * &self.re) / &d),
            im: ActiveReal::from_expr(sin(2.0 * &self.im) / &d),
        }
    }

    /// `-i·ln(√(1 − z²) + i·z)`.
    pub fn asin(&self) -> Self {
        let root = (1.0 - self * self).sqrt();
        (&root + &self.times_i()).ln().times_i().scale(-1.0)
    }

    /// `-i·ln(i·√(1 − z²) + z)`.
    pub fn acos(&self) -> Self {
        let root = (1.0 - self * self).sqrt();
        (&root.times_i() + self).ln().times_i().scale(-1.0)
    }

    /// `(ln(1 + i·z) − ln(1 − i·z)) / 2i`.
    pub fn atan(&self) -> Self {
        let iz = self.times_i();
        let diff = &(1.0 + &iz).ln() - &(1.0 - &iz).ln();
        diff.times_i().scale(-0.5)
    }

    /// `ln(z + √(1 + z²))`.
    pub fn asinh(&self) -> Self {
        (self + &(1.0 + self * self).sqrt()).ln()
    }

    /// `2·ln(√((z + 1)/2) + √((z − 1)/2))`.
    pub fn acosh(&self) -> Self {
        let a = ((self + 1.0) * 0.5).sqrt();
        let b = ((self - 1.0) * 0.5).sqrt();
        (&a + &b).ln().scale(2.0)
    }

    /// `(ln(1 + z) − ln(1 − z)) / 2`.
    pub fn atanh(&self) -> Self {
        (&(1.0 + self).ln() - &(1.0 - self).ln()).scale(0.5)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// `exp(w·ln z)`.
    pub fn powc(&self, w: &PairComplex) -> Self {
        (w * &self.ln()).exp()
    }

    /// `polar(rᵉ, e·θ)` for a real exponent `e`.
    pub fn powf(&self, e: &ActiveReal) -> Self {
        let r = ActiveReal::from_expr(crate::expr::pow(
            sqrt(square(&self.re) + square(&self.im)),
            e,
        ));
        let theta = ActiveReal::from_expr(atan2(&self.im, &self.re) * e);
        PairComplex::polar(&r, &theta)
    }

    /// `β^z` for a real base.
    pub fn real_powc(base: &ActiveReal, z: &PairComplex) -> Self {
        PairComplex::from_real(base).powc(z)
    }

    pub fn add_real(&self, b: &ActiveReal) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re + b),
            im: self.im.clone(),
        }
    }

    pub fn sub_real(&self, b: &ActiveReal) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re - b),
            im: self.im.clone(),
        }
    }

    /// `β − z`.
    pub fn real_sub(b: &ActiveReal, z: &PairComplex) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(b - &z.re),
            im: ActiveReal::from_expr(-&z.im),
        }
    }

    pub fn mul_real(&self, b: &ActiveReal) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re * b),
            im: ActiveReal::from_expr(&self.im * b),
        }
    }

    pub fn div_real(&self, b: &ActiveReal) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re / b),
            im: ActiveReal::from_expr(&self.im / b),
        }
    }

    /// `β / z`.
    pub fn real_div(b: &ActiveReal, z: &PairComplex) -> Self {
        &PairComplex::from_real(b) / z
    }

    fn add_impl(&self, b: &PairComplex) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re + &b.re),
            im: ActiveReal::from_expr(&self.im + &b.im),
        }
    }

    fn sub_impl(&self, b: &PairComplex) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re - &b.re),
            im: ActiveReal::from_expr(&self.im - &b.im),
        }
    }

    fn mul_impl(&self, b: &PairComplex) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re * &b.re - &self.im * &b.im),
            im: ActiveReal::from_expr(&self.re * &b.im + &self.im * &b.re),
        }
    }

    fn div_impl(&self, b: &PairComplex) -> Self {
        let n = b.norm_sqr();
        PairComplex {
            re: ActiveReal::from_expr((&self.re * &b.re + &self.im * &b.im) / &n),
            im: ActiveReal::from_expr((&self.im * &b.re - &self.re * &b.im) / &n),
        }
    }

    fn add_const(&self, c: f64) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(&self.re + c),
            im: self.im.clone(),
        }
    }

    fn sub_from_const(&self, c: f64) -> Self {
        PairComplex {
            re: ActiveReal::from_expr(c - &self.re),
            im: ActiveReal::from_expr(-&self.im),
        }
    }
}

macro_rules! pair_binary {
    ($($Trait:ident, $method:ident, $imp:ident;)*) => {
        $(
            impl<'a, 'b> ops::$Trait<&'b PairComplex> for &'a PairComplex {
                type Output = PairComplex;
                fn $method(self, rhs: &'b PairComplex) -> PairComplex {
                    self.$imp(rhs)
                }
            }

            impl<'b> ops::$Trait<&'b PairComplex> for PairComplex {
                type Output = PairComplex;
                fn $method(self, rhs: &'b PairComplex) -> PairComplex {
                    self.$imp(rhs)
                }
            }

            impl<'a> ops::$Trait<PairComplex> for &'a PairComplex {
                type Output = PairComplex;
                fn $method(self, rhs: PairComplex) -> PairComplex {
                    self.$imp(&rhs)
                }
            }

            impl ops::$Trait<PairComplex> for PairComplex {
                type Output = PairComplex;
                fn $method(self, rhs: PairComplex) -> PairComplex {
                    self.$imp(&rhs)
                }
            }
        )*
    };
}

pair_binary! {
    Add, add, add_impl;
    Sub, sub, sub_impl;
    Mul, mul, mul_impl;
    Div, div, div_impl;
}

macro_rules! pair_scalar {
    ($($lhs:ty),*) => {
        $(
            impl ops::Add<f64> for $lhs {
                type Output = PairComplex;
                fn add(self, c: f64) -> PairComplex {
                    self.add_const(c)
                }
            }

            impl ops::Sub<f64> for $lhs {
                type Output = PairComplex;
                fn sub(self, c: f64) -> PairComplex {
                    self.add_const(-c)
                }
            }

            impl ops::Mul<f64> for $lhs {
                type Output = PairComplex;
                fn mul(self, c: f64) -> PairComplex {
                    self.scale(c)
                }
            }

            impl ops::Add<$lhs> for f64 {
                type Output = PairComplex;
                fn add(self, z: $lhs) -> PairComplex {
                    z.add_const(self)
                }
            }

            impl ops::Sub<$lhs> for f64 {
                type Output = PairComplex;
                fn sub(self, z: $lhs) -> PairComplex {
                    z.sub_from_const(self)
                }
            }

            impl ops::Mul<$lhs> for f64 {
                type Output = PairComplex;
                fn mul(self, z: $lhs) -> PairComplex {
                    z.scale(self)
                }
            }

            impl ops::Neg for $lhs {
                type Output = PairComplex;
                fn neg(self) -> PairComplex {
                    PairComplex {
                        re: ActiveReal::from_expr(-&self.re),
                        im: ActiveReal::from_expr(-&self.im),
                    }
                }
            }
        )*
    };
}

pair_scalar!(PairComplex, &PairComplex);
