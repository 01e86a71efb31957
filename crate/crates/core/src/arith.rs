//! Exact arithmetic for everything downstream.
//!
//! Three layers:
//!
//! * [`Dimension`] and [`ModInt`]: the prime field `Z_d`, which carries state
//!   labels, basis labels and every exponent of `ω`.
//! * [`CycInt`]: an element of the ring `Z[ω]`, `ω = e^{2πi/d}`, stored as a
//!   coefficient vector in canonical form (coefficient of `ω^{d-1}` is zero).
//! * [`CycNum`]: a `CycInt` divided by `(√d)^s`. The `√d` is kept formal and is
//!   never expanded into a Gauss sum, so two values are only comparable when
//!   their scales have the same parity.
//!
//! Coefficients are `i64` with checked arithmetic. Overflow panics rather
//! than wrapping; nothing in this crate comes close for `d ≤ 13`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension accepted by [`Dimension::new`].
pub const MAX_DIMENSION: u64 = 1_000_000;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// An odd prime `d`, the single-particle Hilbert space dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Dimension(u64);

impl Dimension {
    pub fn new(d: u64) -> Result<Self> {
        if d == 2 || d > MAX_DIMENSION || !is_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    /// `n` reduced into `Z_d`.
    pub fn elem(self, n: i64) -> ModInt {
        ModInt::new(self, n)
    }

    /// All of `Z_d` in increasing order.
    pub fn elements(self) -> impl Iterator<Item = ModInt> + Clone {
        (0..self.0).map(move |v| ModInt { value: v, dim: self })
    }

    /// The inverse of 2, `(d+1)/2`.
    pub fn half(self) -> ModInt {
        half(self)
    }
}

impl TryFrom<u64> for Dimension {
    type Error = Error;

    fn try_from(d: u64) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u64 {
    fn from(d: Dimension) -> u64 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `Z_d`, always reduced into `[0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModInt {
    value: u64,
    dim: Dimension,
}

impl ModInt {
    pub fn new(dim: Dimension, n: i64) -> Self {
        let d = dim.get() as i64;
        Self {
            value: n.rem_euclid(d) as u64,
            dim,
        }
    }

    pub fn zero(dim: Dimension) -> Self {
        Self { value: 0, dim }
    }

    pub fn one(dim: Dimension) -> Self {
        Self { value: 1, dim }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn index(self) -> usize {
        self.value as usize
    }

    #[inline]
    pub fn dim(self) -> Dimension {
        self.dim
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let d = self.dim.get();
        let mut base = self.value;
        let mut acc = 1 % d;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % d;
            }
            base = base * base % d;
            e >>= 1;
        }
        Self {
            value: acc,
            dim: self.dim,
        }
    }

    /// Multiplicative inverse; fails only for zero.
    pub fn inv(self) -> Result<Self> {
        mod_inv(self)
    }

    fn check(self, rhs: Self) {
        assert_eq!(self.dim, rhs.dim, "mixing elements of Z_{} and Z_{}", self.dim, rhs.dim);
    }
}

/// Inverse of `a` in `Z_d` by the extended Euclidean algorithm.
pub fn mod_inv(a: ModInt) -> Result<ModInt> {
    let d = a.dim.get() as i64;
    if a.value == 0 {
        return Err(Error::DivisionByZero(a.dim.get()));
    }
    let (mut r0, mut r1) = (d, a.value as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Ok(ModInt::new(a.dim, t0))
}

/// `1/2` in `Z_d`, i.e. `(d+1)/2`.
pub fn half(dim: Dimension) -> ModInt {
    ModInt {
        value: dim.get().div_ceil(2),
        dim,
    }
}

impl Add for ModInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: (self.value + rhs.value) % self.dim.get(),
            dim: self.dim,
        }
    }
}

impl Sub for ModInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        let d = self.dim.get();
        Self {
            value: (self.value + d - rhs.value) % d,
            dim: self.dim,
        }
    }
}

impl Mul for ModInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: self.value * rhs.value % self.dim.get(),
            dim: self.dim,
        }
    }
}

impl Neg for ModInt {
    type Output = Self;
    fn neg(self) -> Self {
        let d = self.dim.get();
        Self {
            value: (d - self.value) % d,
            dim: self.dim,
        }
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for ModInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

#[inline]
fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("cyclotomic coefficient overflow")
}

#[inline]
fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("cyclotomic coefficient overflow")
}

/// An element of `Z[ω]` in canonical form.
///
/// Index `k` holds the coefficient of `ω^k`. Because `1 + ω + … + ω^{d-1} = 0`
/// the representation is only unique modulo the all-ones vector; canonical
/// form removes that freedom by forcing the last coefficient to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycInt {
    dim: Dimension,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(dim: Dimension) -> Self {
        Self {
            dim,
            coeffs: vec![0; dim.size()],
        }
    }

    pub fn from_int(dim: Dimension, n: i64) -> Self {
        let mut z = Self::zero(dim);
        z.coeffs[0] = n;
        z
    }

    /// `ω^k`.
    pub fn root(k: ModInt) -> Self {
        let mut z = Self::zero(k.dim());
        z.coeffs[k.index()] = 1;
        z.canonicalize();
        z
    }

    /// Builds from an arbitrary (not necessarily canonical) coefficient vector.
    pub fn from_coeffs(dim: Dimension, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != dim.size() {
            return Err(Error::DimensionMismatch(dim.get(), coeffs.len() as u64));
        }
        let mut z = Self { dim, coeffs };
        z.canonicalize();
        Ok(z)
    }

    fn canonicalize(&mut self) {
        let last = *self.coeffs.last().expect("d ≥ 3");
        if last != 0 {
            for c in &mut self.coeffs {
                *c = c.checked_sub(last).expect("cyclotomic coefficient overflow");
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer this represents, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    /// The exponent `k` if this is exactly `ω^k`.
    pub fn as_root(&self) -> Option<ModInt> {
        let d = self.dim.size();
        let ones = self.coeffs.iter().filter(|&&c| c == 1).count();
        if ones == 1 && self.coeffs.iter().all(|&c| c == 0 || c == 1) {
            let k = self.coeffs.iter().position(|&c| c == 1).unwrap();
            return Some(self.dim.elem(k as i64));
        }
        // ω^{d-1} = -(1 + ω + … + ω^{d-2})
        if self.coeffs[..d - 1].iter().all(|&c| c == -1) {
            return Some(self.dim.elem(d as i64 - 1));
        }
        None
    }

    fn check(&self, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "mixing Z[ω] for d={} and d={}", self.dim, rhs.dim);
    }

    pub fn conj(&self) -> Self {
        let d = self.dim.size();
        let mut out = vec![0; d];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[(d - k) % d] = c;
        }
        let mut z = Self {
            dim: self.dim,
            coeffs: out,
        };
        z.canonicalize();
        z
    }

    /// Multiplication by `ω^k`, a cyclic shift of the coefficients.
    pub fn mul_root(&self, k: ModInt) -> Self {
        let d = self.dim.size();
        let mut out = vec![0; d];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[(i + k.index()) % d] = c;
        }
        let mut z = Self {
            dim: self.dim,
            coeffs: out,
        };
        z.canonicalize();
        z
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|&c| ck_mul(c, n)).collect(),
        }
    }

    fn divisible_by(&self, n: i64) -> bool {
        self.coeffs.iter().all(|&c| c % n == 0)
    }

    fn div_exact(&self, n: i64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|&c| c / n).collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let d = self.dim.get() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Complex64::from_polar(c as f64, std::f64::consts::TAU * k as f64 / d))
            .sum()
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.check(rhs);
        // Both canonical, so the last coefficient stays zero.
        CycInt {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| ck_add(a, b)).collect(),
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.check(rhs);
        CycInt {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a.checked_sub(b).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.mul_int(-1)
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.check(rhs);
        let d = self.dim.size();
        let mut out = vec![0i64; d];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in rhs.coeffs.iter().enumerate().filter(|(_, &b)| b != 0) {
                let k = (i + j) % d;
                out[k] = ck_add(out[k], ck_mul(a, b));
            }
        }
        let mut z = CycInt {
            dim: self.dim,
            coeffs: out,
        };
        z.canonicalize();
        z
    }
}

/// `x / (√d)^scale` with `x ∈ Z[ω]`.
///
/// Values are kept reduced: the scale is lowered by two (dividing every
/// coefficient by `d`) while that stays integral, and zero always sits at
/// scale 0. Within one scale parity, equal values therefore have identical
/// representations, which is what the derived `PartialEq` compares.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycNum {
    num: CycInt,
    scale: u32,
}

impl CycNum {
    pub fn new(num: CycInt, scale: u32) -> Self {
        let mut x = Self { num, scale };
        x.reduce();
        x
    }

    pub fn from_coeffs(dim: Dimension, coeffs: Vec<i64>, scale: u32) -> Result<Self> {
        Ok(Self::new(CycInt::from_coeffs(dim, coeffs)?, scale))
    }

    pub fn zero(dim: Dimension) -> Self {
        Self::new(CycInt::zero(dim), 0)
    }

    pub fn one(dim: Dimension) -> Self {
        Self::from_int(dim, 1)
    }

    pub fn from_int(dim: Dimension, n: i64) -> Self {
        Self::new(CycInt::from_int(dim, n), 0)
    }

    /// `n / d^k`.
    pub fn from_ratio(dim: Dimension, n: i64, k: u32) -> Self {
        Self::new(CycInt::from_int(dim, n), 2 * k)
    }

    /// `ω^k` at scale 0.
    pub fn root(k: ModInt) -> Self {
        Self::new(CycInt::root(k), 0)
    }

    /// `1/√d`.
    pub fn inv_sqrt_d(dim: Dimension) -> Self {
        Self::new(CycInt::from_int(dim, 1), 1)
    }

    /// `√d`, stored as `d / √d`.
    pub fn sqrt_d(dim: Dimension) -> Self {
        Self::new(CycInt::from_int(dim, dim.get() as i64), 1)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.scale = 0;
            return;
        }
        let d = self.num.dim.get() as i64;
        while self.scale >= 2 && self.num.divisible_by(d) {
            self.num = self.num.div_exact(d);
            self.scale -= 2;
        }
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.num.dim
    }

    #[inline]
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn numerator(&self) -> &CycInt {
        &self.num
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.num.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Coefficient vector expressed at a larger scale of the same parity.
    pub fn lifted(&self, scale: u32) -> Result<CycInt> {
        lift(&self.num, self.scale, scale)
    }

    fn common_scale(&self, rhs: &Self) -> Result<u32> {
        if !(self.scale + rhs.scale).is_multiple_of(2) {
            return Err(Error::IncommensurableScale(self.scale, rhs.scale));
        }
        Ok(self.scale.max(rhs.scale))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        let s = self.common_scale(rhs)?;
        Ok(Self::new(&self.lifted(s)? + &rhs.lifted(s)?, s))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&-rhs)
    }

    /// Exact value equality. Fails when both sides are nonzero and their
    /// scales have different parity.
    pub fn try_eq(&self, rhs: &Self) -> Result<bool> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(self.is_zero() && rhs.is_zero());
        }
        self.common_scale(rhs)?;
        Ok(self == rhs)
    }

    /// Complex conjugate: `ω^k ↦ ω^{d-k}`; `√d` is real.
    pub fn conj(&self) -> Self {
        Self {
            num: self.num.conj(),
            scale: self.scale,
        }
    }

    /// `|a|² = a·conj(a)`.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    pub fn mul_root(&self, k: ModInt) -> Self {
        Self {
            num: self.num.mul_root(k),
            scale: self.scale,
        }
    }

    /// Multiplies by `(√d)^k` for any integer `k`.
    pub fn mul_sqrt_d_pow(&self, k: i32) -> Self {
        shift_scale(&self.num, self.scale, k)
            .map(|(num, scale)| Self::new(num, scale))
            .expect("nonnegative scale after lift")
    }

    /// The value as a rational number, when it is one.
    ///
    /// Only even scales are considered: at odd scale a rational value would
    /// need the Gauss-sum form of `√d`, which this representation never uses.
    pub fn to_rational(&self) -> Option<Ratio<i64>> {
        if self.is_zero() {
            return Some(Ratio::from_integer(0));
        }
        if !self.scale.is_multiple_of(2) {
            return None;
        }
        let n = self.num.as_integer()?;
        let den = (self.dim().get() as i64).checked_pow(self.scale / 2)?;
        Some(Ratio::new(n, den))
    }

    /// The exponent `k` when the value is exactly `ω^k`.
    pub fn as_root(&self) -> Option<ModInt> {
        if self.scale != 0 {
            return None;
        }
        self.num.as_root()
    }

    pub fn to_complex(&self) -> Complex64 {
        let d = self.dim().get() as f64;
        self.num.to_complex() / d.powf(self.scale as f64 / 2.0)
    }
}

/// Re-expresses `num / √d^from` as an integer vector over `√d^to`.
pub(crate) fn lift(num: &CycInt, from: u32, to: u32) -> Result<CycInt> {
    if to < from || !(to - from).is_multiple_of(2) {
        return Err(Error::IncommensurableScale(from, to));
    }
    let d = num.dim.get() as i64;
    let factor = (0..(to - from) / 2).fold(1i64, |acc, _| ck_mul(acc, d));
    Ok(num.mul_int(factor))
}

/// `num / √d^scale · √d^k` as `(num', scale')` with `scale' ≥ 0`.
pub(crate) fn shift_scale(num: &CycInt, scale: u32, k: i32) -> Result<(CycInt, u32)> {
    let target = scale as i64 - k as i64;
    if target >= 0 {
        return Ok((num.clone(), target as u32));
    }
    // Negative target: multiply through by d^t and raise the scale by 2t.
    let t = ((-target) + 1) / 2;
    let s = (target + 2 * t) as u32;
    Ok((lift(num, 0, 2 * t as u32)?, s))
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        if self.is_zero() || rhs.is_zero() {
            return CycNum::zero(self.dim());
        }
        CycNum::new(&self.num * &rhs.num, self.scale + rhs.scale)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            num: -&self.num,
            scale: self.scale,
        }
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{r}");
        }
        let terms: Vec<String> = self
            .num
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match k {
                0 => format!("{c}"),
                _ => format!("{c}ω^{k}"),
            })
            .collect();
        let body = terms.join(" + ");
        match self.scale {
            0 => write!(f, "{body}"),
            s => write!(f, "({body})/√{}^{s}", self.dim()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(d: u64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn dimension_validation() {
        for bad in [0, 1, 2, 4, 9, 15, 1_000_003] {
            assert!(Dimension::new(bad).is_err(), "{bad}");
        }
        for good in [3, 5, 7, 11, 13, 999_983] {
            assert!(Dimension::new(good).is_ok(), "{good}");
        }
        assert_eq!(
            Dimension::new(4).unwrap_err().to_string(),
            "dimension must be an odd prime no larger than 1000000 (got 4)"
        );
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inv(dim(7).elem(2)).unwrap().value(), 4);
        for d in [3, 5, 7, 11, 13] {
            assert_eq!(mod_inv(dim(d).elem(1)).unwrap().value(), 1);
        }
        // exhaustive search over Z_5 for 3x ≡ 1
        let x = (0..5).find(|x| (3 * x) % 5 == 1).unwrap();
        assert_eq!(x, 2);
        assert_eq!(mod_inv(dim(5).elem(3)).unwrap().value(), x);
        assert_eq!(mod_inv(dim(5).elem(0)), Err(Error::DivisionByZero(5)));
    }

    #[test]
    fn inverse_exhaustive() {
        for d in [3, 5, 7, 11, 13] {
            let dim = dim(d);
            for a in dim.elements().skip(1) {
                assert!((a * a.inv().unwrap()).value() == 1);
            }
        }
    }

    #[test]
    fn halves() {
        assert_eq!(half(dim(7)).value(), 4);
        assert_eq!(half(dim(3)).value(), 2);
        assert_eq!(half(dim(13)).value(), 7);
        assert_eq!((dim(13).elem(2) * half(dim(13))).value(), 1);
    }

    #[test]
    fn roots() {
        let d3 = dim(3);
        assert_eq!(CycNum::root(d3.elem(0)), CycNum::one(d3));
        assert_eq!(CycNum::root(d3.elem(2)).coeffs(), &[-1, -1, 0]);
        for d in [3, 5, 7] {
            let dm = dim(d);
            for k in dm.elements() {
                let p = &CycNum::root(k) * &CycNum::root(-k);
                assert_eq!(p, CycNum::one(dm));
                assert_eq!(CycNum::root(k).as_root(), Some(k));
            }
        }
    }

    #[test]
    fn sum_of_roots_vanishes() {
        for d in [3, 5, 7, 11, 13] {
            let dm = dim(d);
            let s = dm
                .elements()
                .map(CycNum::root)
                .try_fold(CycNum::zero(dm), |acc, r| acc.try_add(&r))
                .unwrap();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn conj_of_root() {
        let d7 = dim(7);
        for k in d7.elements() {
            assert_eq!(CycNum::root(k).conj(), CycNum::root(-k));
        }
    }

    #[test]
    fn gauss_sum_modulus() {
        // Oracle: direct complex evaluation of Σ e^{2πin²/3}.
        let g: Complex64 = (0..3)
            .map(|n| Complex64::from_polar(1.0, std::f64::consts::TAU * (n * n) as f64 / 3.0))
            .sum();
        assert!((g.norm_sqr() - 3.0).abs() < 1e-12);

        let d3 = dim(3);
        let gauss = d3
            .elements()
            .map(|n| CycNum::root(n * n))
            .try_fold(CycNum::zero(d3), |acc, r| acc.try_add(&r))
            .unwrap();
        assert_eq!(gauss.abs2(), CycNum::from_int(d3, 3));
    }

    #[test]
    fn zero_tests() {
        let d5 = dim(5);
        let w = CycNum::root(d5.elem(1));
        assert!(w.try_sub(&w).unwrap().is_zero());
        let rescaled = CycNum::from_coeffs(d5, vec![5, 0, 0, 0, 0], 2).unwrap();
        assert!(rescaled.try_eq(&CycNum::one(d5)).unwrap());
    }

    #[test]
    fn parity_mismatch_rejected() {
        let d5 = dim(5);
        let a = CycNum::one(d5);
        let b = CycNum::inv_sqrt_d(d5);
        assert_eq!(a.try_add(&b), Err(Error::IncommensurableScale(0, 1)));
        assert_eq!(a.try_eq(&b), Err(Error::IncommensurableScale(0, 1)));
        // zero is scale-free
        assert_eq!(CycNum::zero(d5).try_add(&b).unwrap(), b);
        assert!(!CycNum::zero(d5).try_eq(&b).unwrap());
    }

    #[test]
    fn abs2_examples() {
        let d5 = dim(5);
        for k in d5.elements() {
            assert_eq!(CycNum::root(k).abs2(), CycNum::one(d5));
            let a = &CycNum::inv_sqrt_d(d5) * &CycNum::root(k);
            let p = a.abs2();
            assert_eq!(p.coeffs(), &[1, 0, 0, 0, 0]);
            assert_eq!(p.scale(), 2);
            assert_eq!(p.to_rational(), Some(Ratio::new(1, 5)));
        }
    }

    #[test]
    fn complex_evaluation() {
        let d3 = dim(3);
        let one = CycNum::one(d3).to_complex();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let w = CycNum::root(d3.elem(1)).to_complex();
        assert!((w.re + 0.5).abs() < 1e-12);
        assert!((w.im - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let s = CycNum::sqrt_d(d3).to_complex();
        assert!((s.re - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_d_shifts() {
        let d7 = dim(7);
        let x = CycNum::root(d7.elem(3));
        assert_eq!(x.mul_sqrt_d_pow(1).mul_sqrt_d_pow(-1), x);
        assert_eq!(x.mul_sqrt_d_pow(-2).to_complex(), x.to_complex() / 7.0);
        assert_eq!(&CycNum::sqrt_d(d7) * &CycNum::inv_sqrt_d(d7), CycNum::one(d7));
    }

    const DIMS: [u64; 5] = [3, 5, 7, 11, 13];

    fn arb_cycnum() -> impl Strategy<Value = CycNum> {
        (0..DIMS.len()).prop_flat_map(|i| {
            let d = DIMS[i];
            (prop::collection::vec(-20i64..20, d as usize), 0u32..4)
                .prop_map(move |(c, s)| CycNum::from_coeffs(dim(d), c, s).unwrap())
        })
    }

    fn arb_pair() -> impl Strategy<Value = (CycNum, CycNum)> {
        (0..DIMS.len()).prop_flat_map(|i| {
            let d = DIMS[i];
            let one = (prop::collection::vec(-20i64..20, d as usize), 0u32..4)
                .prop_map(move |(c, s)| CycNum::from_coeffs(dim(d), c, s).unwrap());
            (one.clone(), one)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn mul_matches_complex((a, b) in arb_pair()) {
            let exact = (&a * &b).to_complex();
            let float = a.to_complex() * b.to_complex();
            prop_assert!((exact - float).norm() < 1e-9);
        }

        #[test]
        fn canonical_idempotent(a in arb_cycnum()) {
            let again = CycNum::from_coeffs(a.dim(), a.coeffs().to_vec(), a.scale()).unwrap();
            prop_assert_eq!(&again, &a);
            prop_assert_eq!(a.coeffs()[a.dim().size() - 1], 0);
        }

        #[test]
        fn conj_involution_and_abs2_real(a in arb_cycnum()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            let z = a.abs2().to_complex();
            prop_assert!(z.im.abs() < 1e-9);
            prop_assert!(z.re > -1e-9);
        }

        #[test]
        fn rescale_invariance(a in arb_cycnum()) {
            let raised = CycNum::new(a.lifted(a.scale() + 2).unwrap(), a.scale() + 2);
            prop_assert!(a.try_eq(&raised).unwrap());
        }

        #[test]
        fn constant_shift_invariance(a in arb_cycnum(), k in -5i64..5) {
            let shifted: Vec<i64> = a.coeffs().iter().map(|c| c + k).collect();
            let b = CycNum::from_coeffs(a.dim(), shifted, a.scale()).unwrap();
            prop_assert_eq!(b, a);
        }

        #[test]
        fn add_matches_complex((a, b) in arb_pair()) {
            match a.try_add(&b) {
                Ok(s) => prop_assert!((s.to_complex() - a.to_complex() - b.to_complex()).norm() < 1e-9),
                Err(e) => prop_assert_eq!(e, Error::IncommensurableScale(a.scale(), b.scale())),
            }
        }
    }
}
