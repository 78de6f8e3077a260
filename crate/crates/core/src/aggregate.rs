//! Values made of a fixed number of real components.
//!
//! An aggregated value `d` of arity `n` is seen as a point of ℝⁿ. The access
//! map `d ↦ d[i]` and the construction map `(v₁, …, vₙ) ↦ C(v)` are identity
//! embeddings, so their adjoints are plain component copies. `f64` is the
//! arity-one case; [`Complex64`] is arity two.

use num_complex::Complex64;
use std::fmt::Debug;

use crate::identifier::Identifier;

pub trait Aggregated: Copy + Debug + PartialEq + Send + Sync + 'static {
    const ARITY: usize;

    /// One identifier per component.
    type Ids: Copy
        + Debug
        + Default
        + PartialEq
        + AsRef<[Identifier]>
        + AsMut<[Identifier]>
        + Send
        + Sync
        + 'static;

    /// Vector access `d[i]`.
    fn component(&self, i: usize) -> f64;

    /// Array construction `C(v₀, …, vₙ₋₁)` with `vᵢ = f(i)`.
    fn from_fn<F: FnMut(usize) -> f64>(f: F) -> Self;

    fn from_components(values: &[f64]) -> Self {
        assert_eq!(values.len(), Self::ARITY, "component count mismatch");
        Self::from_fn(|i| values[i])
    }

    fn zero() -> Self {
        Self::from_fn(|_| 0.0)
    }

    /// The `k`-th unit vector, used to seed one output row.
    fn unit(k: usize) -> Self {
        Self::from_fn(|i| if i == k { 1.0 } else { 0.0 })
    }

    /// `d̄ += (∂d[k]/∂d)ᵀ w̄`: the adjoint of component access.
    fn access_adjoint(k: usize, adjoint: f64) -> Self {
        Self::from_fn(|i| if i == k { adjoint } else { 0.0 })
    }

    /// `v̄ₖ += (∂C/∂vₖ)ᵀ d̄`: the adjoint of construction.
    fn construct_adjoint(&self, k: usize) -> f64 {
        self.component(k)
    }
}

impl Aggregated for f64 {
    const ARITY: usize = 1;
    type Ids = [Identifier; 1];

    #[inline]
    fn component(&self, i: usize) -> f64 {
        debug_assert_eq!(i, 0);
        *self
    }

    #[inline]
    fn from_fn<F: FnMut(usize) -> f64>(mut f: F) -> Self {
        f(0)
    }
}

impl Aggregated for Complex64 {
    const ARITY: usize = 2;
    type Ids = [Identifier; 2];

    #[inline]
    fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.re,
            1 => self.im,
            _ => panic!("complex component {i} out of range"),
        }
    }

    #[inline]
    fn from_fn<F: FnMut(usize) -> f64>(mut f: F) -> Self {
        let re = f(0);
        let im = f(1);
        Complex64::new(re, im)
    }
}
