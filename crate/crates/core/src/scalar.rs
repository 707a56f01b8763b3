//! Arithmetic shared by the real (body) and Grassmann-valued backends.
//!
//! The equations of motion are written once against [`Scalar`]; `f64` gives the
//! classicalized system and [`GradedNumber`](crate::GradedNumber) the
//! pseudoclassical one. Every value carries enough shape to build zeros and
//! constants "like" itself, which is what lets `GradedNumber` keep its
//! generator count implicit.

use core::fmt::Debug;

pub trait Scalar: Clone + Debug + PartialEq {
    /// A zero with the same shape as `self`.
    fn zero_like(&self) -> Self;

    /// The real constant `r` with the same shape as `self`.
    fn constant_like(&self, r: f64) -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, r: f64) -> Self;

    /// `self += r * other`.
    fn add_scaled(&mut self, r: f64, other: &Self);

    /// `self += r * a * b`.
    fn add_scaled_product(&mut self, r: f64, a: &Self, b: &Self) {
        self.add_scaled(r, &a.mul(b));
    }

    /// Real part with all nilpotent contributions dropped.
    fn body(&self) -> f64;

    /// Evaluates a smooth function at `self` from its derivatives at the body.
    ///
    /// `derivative(k)` must return the k-th derivative at `self.body()`. The
    /// expansion stops after `order` terms; for `f64` only `derivative(0)` is used.
    fn lift(&self, order: usize, derivative: &dyn Fn(usize) -> f64) -> Self;

    /// Number of Taylor terms needed to evaluate a function exactly at `self`.
    fn taylor_order(&self) -> usize;

    /// Number of real coefficients in the flat representation.
    fn width(&self) -> usize;

    fn write_flat(&self, out: &mut [f64]);

    /// Rebuilds a value of the same shape as `self` from flat coefficients.
    fn read_flat(&self, src: &[f64]) -> Self;
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }

    fn constant_like(&self, r: f64) -> Self {
        r
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, r: f64) -> Self {
        self * r
    }

    #[inline]
    fn add_scaled(&mut self, r: f64, other: &Self) {
        *self += r * other;
    }

    #[inline]
    fn add_scaled_product(&mut self, r: f64, a: &Self, b: &Self) {
        *self += r * a * b;
    }

    fn body(&self) -> f64 {
        *self
    }

    fn lift(&self, _order: usize, derivative: &dyn Fn(usize) -> f64) -> Self {
        derivative(0)
    }

    fn taylor_order(&self) -> usize {
        0
    }

    fn width(&self) -> usize {
        1
    }

    fn write_flat(&self, out: &mut [f64]) {
        out[0] = *self;
    }

    fn read_flat(&self, src: &[f64]) -> Self {
        src[0]
    }
}
