//! Finite Grassmann algebra over `N <= 8` odd generators.
//!
//! A [`GradedNumber`] stores all `2^N` coefficients densely. Coefficient `i`
//! multiplies the blade built from the generators whose bits are set in `i`,
//! taken in increasing order: index `0b101` is `theta_0 theta_2`. Index 0 is
//! the body.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_GENERATORS: usize = 8;
pub const DEFAULT_GENERATORS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedNumber {
    n_gen: usize,
    coeffs: Vec<f64>,
}

/// Sign picked up when reordering `blade(a) * blade(b)` into increasing order.
/// Callers must ensure `a & b == 0`.
#[inline]
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        swaps += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Subset label for a blade, e.g. `""`, `"0"`, `"13"` (generator digits, 0-based).
pub fn blade_label(mask: usize) -> String {
    (0..MAX_GENERATORS)
        .filter(|k| mask & (1 << k) != 0)
        .map(|k| char::from(b'0' + k as u8))
        .collect()
}

/// Inverse of [`blade_label`].
pub fn parse_blade_label(label: &str, n_gen: usize) -> Result<usize> {
    let mut mask = 0usize;
    let mut last: Option<usize> = None;
    for ch in label.chars() {
        let k = ch
            .to_digit(10)
            .map(|d| d as usize)
            .filter(|&d| d < n_gen)
            .ok_or_else(|| Error::config(alloc::format!("bad blade label {label:?}")))?;
        if last.is_some_and(|l| l >= k) {
            return Err(Error::config(alloc::format!(
                "blade label {label:?} must list generators in increasing order"
            )));
        }
        last = Some(k);
        mask |= 1 << k;
    }
    Ok(mask)
}

impl GradedNumber {
    pub fn zero(n_gen: usize) -> Self {
        assert!(
            n_gen <= MAX_GENERATORS,
            "at most {MAX_GENERATORS} generators"
        );
        GradedNumber {
            n_gen,
            coeffs: vec![0.0; 1 << n_gen],
        }
    }

    pub fn scalar(n_gen: usize, value: f64) -> Self {
        let mut g = Self::zero(n_gen);
        g.coeffs[0] = value;
        g
    }

    /// The odd generator `theta_k`.
    pub fn generator(n_gen: usize, k: usize) -> Self {
        assert!(k < n_gen);
        Self::blade(n_gen, 1 << k, 1.0)
    }

    pub fn blade(n_gen: usize, mask: usize, coeff: f64) -> Self {
        let mut g = Self::zero(n_gen);
        g.coeffs[mask] = coeff;
        g
    }

    pub fn from_coeffs(n_gen: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n_gen > MAX_GENERATORS {
            return Err(Error::config(alloc::format!(
                "at most {MAX_GENERATORS} Grassmann generators are supported, got {n_gen}"
            )));
        }
        if coeffs.len() != 1 << n_gen {
            return Err(Error::DimensionMismatch {
                what: "graded coefficients",
                expected: 1 << n_gen,
                found: coeffs.len(),
            });
        }
        Ok(GradedNumber { n_gen, coeffs })
    }

    pub fn n_gen(&self) -> usize {
        self.n_gen
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set_coeff(&mut self, mask: usize, value: f64) {
        self.coeffs[mask] = value;
    }

    pub fn body(&self) -> f64 {
        self.coeffs[0]
    }

    /// `self` with the body removed.
    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = 0.0;
        s
    }

    /// Keeps only the grade-`k` part.
    pub fn grade_project(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n_gen);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i.count_ones() as usize == k {
                out.coeffs[i] = *c;
            }
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i.count_ones() % 2 == 0 || *c == 0.0)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i.count_ones() % 2 == 1 || *c == 0.0)
    }

    /// Exterior product; fails when the generator counts differ.
    pub fn try_product(&self, other: &Self) -> Result<Self> {
        if self.n_gen != other.n_gen {
            return Err(Error::DimensionMismatch {
                what: "Grassmann generator count",
                expected: self.n_gen,
                found: other.n_gen,
            });
        }
        let mut out = Self::zero(self.n_gen);
        product_into(&self.coeffs, &other.coeffs, 1.0, &mut out.coeffs);
        Ok(out)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::scalar(self.n_gen, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(libm::fabs(*c)))
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.n_gen, other.n_gen,
            "graded numbers with different generator counts"
        );
    }
}

/// `out += r * a * b` on raw coefficient slices of equal power-of-two length.
fn product_into(a: &[f64], b: &[f64], r: f64, out: &mut [f64]) {
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            if cb == 0.0 || i & j != 0 {
                continue;
            }
            out[i | j] += r * reorder_sign(i, j) * ca * cb;
        }
    }
}

impl Add for &GradedNumber {
    type Output = GradedNumber;
    fn add(self, rhs: &GradedNumber) -> GradedNumber {
        self.check_same(rhs);
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&rhs.coeffs)
            .for_each(|(o, r)| *o += r);
        out
    }
}

impl Sub for &GradedNumber {
    type Output = GradedNumber;
    fn sub(self, rhs: &GradedNumber) -> GradedNumber {
        self.check_same(rhs);
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&rhs.coeffs)
            .for_each(|(o, r)| *o -= r);
        out
    }
}

impl Mul for &GradedNumber {
    type Output = GradedNumber;
    fn mul(self, rhs: &GradedNumber) -> GradedNumber {
        self.check_same(rhs);
        let mut out = GradedNumber::zero(self.n_gen);
        product_into(&self.coeffs, &rhs.coeffs, 1.0, &mut out.coeffs);
        out
    }
}

impl Mul<f64> for &GradedNumber {
    type Output = GradedNumber;
    fn mul(self, rhs: f64) -> GradedNumber {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= rhs);
        out
    }
}

impl Neg for &GradedNumber {
    type Output = GradedNumber;
    fn neg(self) -> GradedNumber {
        self * -1.0
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GradedNumber {
            type Output = GradedNumber;
            fn $m(self, rhs: GradedNumber) -> GradedNumber {
                <&GradedNumber as $tr>::$m(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GradedNumber {
    type Output = GradedNumber;
    fn neg(self) -> GradedNumber {
        -&self
    }
}

impl Scalar for GradedNumber {
    fn zero_like(&self) -> Self {
        GradedNumber::zero(self.n_gen)
    }

    fn constant_like(&self, r: f64) -> Self {
        GradedNumber::scalar(self.n_gen, r)
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

    fn add_scaled(&mut self, r: f64, other: &Self) {
        self.check_same(other);
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(o, c)| *o += r * c);
    }

    fn add_scaled_product(&mut self, r: f64, a: &Self, b: &Self) {
        self.check_same(a);
        self.check_same(b);
        product_into(&a.coeffs, &b.coeffs, r, &mut self.coeffs);
    }

    fn body(&self) -> f64 {
        self.coeffs[0]
    }

    fn lift(&self, order: usize, derivative: &dyn Fn(usize) -> f64) -> Self {
        let soul = self.soul();
        let mut out = GradedNumber::scalar(self.n_gen, derivative(0));
        let mut power = GradedNumber::scalar(self.n_gen, 1.0);
        let mut factorial = 1.0;
        for k in 1..=order {
            power = &power * &soul;
            if power.coeffs.iter().all(|c| *c == 0.0) {
                break;
            }
            factorial *= k as f64;
            out.add_scaled(derivative(k) / factorial, &power);
        }
        out
    }

    fn taylor_order(&self) -> usize {
        self.n_gen / 2
    }

    fn width(&self) -> usize {
        self.coeffs.len()
    }

    fn write_flat(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.coeffs);
    }

    fn read_flat(&self, src: &[f64]) -> Self {
        GradedNumber {
            n_gen: self.n_gen,
            coeffs: src.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(k: usize) -> GradedNumber {
        GradedNumber::generator(4, k)
    }

    fn one() -> GradedNumber {
        GradedNumber::scalar(4, 1.0)
    }

    #[test]
    fn generator_squares_to_zero() {
        let sq = &th(0) * &th(0);
        assert!(sq.coeffs().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn generators_anticommute() {
        assert_eq!(&th(0) * &th(1), GradedNumber::blade(4, 0b11, 1.0));
        assert_eq!(&th(1) * &th(0), GradedNumber::blade(4, 0b11, -1.0));
    }

    #[test]
    fn product_of_binomials_expands() {
        let a = &one() + &th(0);
        let b = &one() + &th(1);
        let p = &a * &b;
        let mut expect = GradedNumber::zero(4);
        expect.set_coeff(0, 1.0);
        expect.set_coeff(0b01, 1.0);
        expect.set_coeff(0b10, 1.0);
        expect.set_coeff(0b11, 1.0);
        assert_eq!(p, expect);
    }

    #[test]
    fn mismatched_generator_counts_are_rejected() {
        let a = GradedNumber::generator(3, 0);
        let b = GradedNumber::generator(4, 0);
        assert!(matches!(
            a.try_product(&b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grade_projection() {
        let x = &(&one() + &th(0)) + &GradedNumber::blade(4, 0b11, 1.0);
        assert_eq!(x.grade_project(0), one());
        assert_eq!(x.grade_project(2), GradedNumber::blade(4, 0b11, 1.0));
        let mut sum = GradedNumber::zero(4);
        for k in 0..=4 {
            sum = &sum + &x.grade_project(k);
        }
        assert_eq!(sum, x);
    }

    #[test]
    fn body_of_product() {
        let a = &GradedNumber::scalar(4, 3.5) + &(&th(0) * 2.0);
        assert_eq!(a.body(), 3.5);
        assert_eq!(GradedNumber::blade(4, 0b11, 1.0).body(), 0.0);
        let b = &GradedNumber::scalar(4, -2.0) + &GradedNumber::blade(4, 0b110, 0.7);
        assert_eq!((&a * &b).body(), -7.0);
    }

    #[test]
    fn triple_reorder_sign() {
        // theta_2 theta_0 theta_1 = theta_0 theta_1 theta_2 (two swaps)
        let p = &(&th(2) * &th(0)) * &th(1);
        assert_eq!(p, GradedNumber::blade(4, 0b111, 1.0));
        // theta_1 theta_0 theta_2 = -theta_0 theta_1 theta_2
        let q = &(&th(1) * &th(0)) * &th(2);
        assert_eq!(q, GradedNumber::blade(4, 0b111, -1.0));
    }

    #[test]
    fn lift_of_exponential_on_grade_two_soul() {
        // exp(1 + theta_01) = e (1 + theta_01)
        let x = &one() + &GradedNumber::blade(4, 0b11, 1.0);
        let e = core::f64::consts::E;
        let y = x.lift(2, &|_| e);
        assert!((y.coeff(0) - e).abs() < 1e-15);
        assert!((y.coeff(0b11) - e).abs() < 1e-15);
    }

    #[test]
    fn blade_labels_round_trip() {
        assert_eq!(blade_label(0), "");
        assert_eq!(blade_label(0b1010), "13");
        assert_eq!(parse_blade_label("13", 4).unwrap(), 0b1010);
        assert!(parse_blade_label("31", 4).is_err());
        assert!(parse_blade_label("4", 4).is_err());
    }
}
