//! Ordered-field scalars shared by the LP engine and the exact theory frames.
//!
//! Three carriers implement [`Scalar`]: `f64` (signs decided against a small
//! pivot tolerance), [`BigRational`], and [`QuadSurd<D>`], the real quadratic
//! field Q(√D). The quadratic field is what lets the regular polygons with
//! N ∈ {3, 4, 6} be written down and pivoted on without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sign decisions on `f64` treat magnitudes below this as zero.
pub const FLOAT_PIVOT_EPS: f64 = 1e-11;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic and sign tests are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Total order induced by `sign`.
    fn cmp_scalar(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn sign(&self) -> Ordering {
        if *self > FLOAT_PIVOT_EPS {
            Ordering::Greater
        } else if *self < -FLOAT_PIVOT_EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }

    fn sign(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// An element `a + b√D` of the real quadratic field Q(√D).
///
/// `D` must be a positive non-square integer; every operation is exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd<const D: i64> {
    pub rational: BigRational,
    pub surd: BigRational,
}

impl<const D: i64> QuadSurd<D> {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Self { rational, surd }
    }

    /// `p/q + (r/s)·√D`.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self::new(rat(p, q), rat(r, s))
    }

    pub fn rational_part(v: BigRational) -> Self {
        Self::new(v, Zero::zero())
    }

    /// The generator √D.
    pub fn root() -> Self {
        Self::new(Zero::zero(), One::one())
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -self.surd.clone())
    }

    /// Field norm `a² − D b²`.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - rat(D, 1) * &self.surd * &self.surd
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.surd)
    }
}

impl<const D: i64> fmt::Debug for QuadSurd<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.surd) {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}√{}", self.rational, self.surd, D)
        }
    }
}

impl<const D: i64> fmt::Display for QuadSurd<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<const D: i64> Add for QuadSurd<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rational + rhs.rational, self.surd + rhs.surd)
    }
}

impl<const D: i64> Sub for QuadSurd<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rational - rhs.rational, self.surd - rhs.surd)
    }
}

impl<const D: i64> Mul for QuadSurd<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = rat(D, 1);
        let rational = &self.rational * &rhs.rational + d * &self.surd * &rhs.surd;
        let surd = &self.rational * &rhs.surd + &self.surd * &rhs.rational;
        Self::new(rational, surd)
    }
}

impl<const D: i64> Div for QuadSurd<D> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let norm = rhs.norm();
        assert!(!Zero::is_zero(&norm), "division by zero in Q(√{D})");
        let num = self * rhs.conjugate();
        Self::new(num.rational / &norm, num.surd / &norm)
    }
}

impl<const D: i64> Neg for QuadSurd<D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.surd)
    }
}

impl<const D: i64> Scalar for QuadSurd<D> {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::new(Zero::zero(), Zero::zero())
    }

    fn one() -> Self {
        Self::new(One::one(), Zero::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational_part(rat(num, den))
    }

    fn sign(&self) -> Ordering {
        let sa = Scalar::sign(&self.rational);
        let sb = Scalar::sign(&self.surd);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: the larger of a² and D·b² wins
            (x, y) => {
                let a2 = &self.rational * &self.rational;
                let b2d = rat(D, 1) * &self.surd * &self.surd;
                match a2.cmp(&b2d) {
                    Ordering::Greater => x,
                    Ordering::Less => y,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.rational) + Scalar::to_f64(&self.surd) * (D as f64).sqrt()
    }
}

pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Inner product over any scalar carrier.
pub fn dot<F: Scalar>(x: &[F], y: &[F]) -> F {
    x.iter()
        .zip(y)
        .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Kronecker product of two vectors, first factor major.
pub fn kron<F: Scalar>(x: &[F], y: &[F]) -> Vec<F> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a.clone() * b.clone());
        }
    }
    out
}

pub fn to_f64_vec<F: Scalar>(v: &[F]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Solves the square system `m · x = rhs` by Gauss–Jordan elimination with
/// largest-magnitude pivoting. Returns `None` when `m` is singular (at the
/// scalar's sign resolution).
pub fn solve_square<F: Scalar>(m: &[Vec<F>], rhs: &[F]) -> Option<Vec<F>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r1, &r2| a[r1][col].abs().cmp_scalar(&a[r2][col].abs()))?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=n {
                    let delta = factor.clone() * a[col][c].clone();
                    a[r][c] = a[r][c].clone() - delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}
