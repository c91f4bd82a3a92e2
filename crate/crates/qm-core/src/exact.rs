//! Exact arithmetic in Q/Z and phase evaluation.
//!
//! A [`FracMod1`] is a reduced fraction in [0,1); all form values live here.
//! Phases exp(2πi·x) are produced only at output boundaries via [`Phase`].

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of Q/Z stored as a reduced fraction `num/den` with
/// `0 <= num < den` and `gcd(num, den) = 1`; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracMod1 {
    num: BigUint,
    den: BigUint,
}

impl FracMod1 {
    pub fn zero() -> Self {
        FracMod1 {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// Reduce `num/den` mod 1. `den` must be nonzero; its sign is absorbed.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Parse("fraction with zero denominator".into()));
        }
        Ok(Self::from_ratio(&num, &den))
    }

    /// Reduce `num/den` mod 1, assuming `den != 0`.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut num = num.clone();
        let mut den = den.clone();
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        num = num.mod_floor(&den);
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
        FracMod1 {
            num: num.to_biguint().expect("nonnegative after mod_floor"),
            den: den.to_biguint().expect("positive denominator"),
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `n · a` reduced mod 1; `n` may be negative.
    pub fn scale(&self, n: &BigInt) -> Self {
        let num = BigInt::from(self.num.clone()) * n;
        Self::from_ratio(&num, &BigInt::from(self.den.clone()))
    }

    pub fn double(&self) -> Self {
        self.scale(&BigInt::from(2))
    }

    /// exp(2πi · num/den); unit modulus up to double rounding.
    pub fn as_phase(&self) -> Phase {
        let x = self.num.to_f64().unwrap_or(f64::MAX) / self.den.to_f64().unwrap_or(f64::MAX);
        let theta = 2.0 * std::f64::consts::PI * x;
        Phase {
            re: theta.cos(),
            im: theta.sin(),
        }
    }
}

impl Add for &FracMod1 {
    type Output = FracMod1;
    fn add(self, rhs: &FracMod1) -> FracMod1 {
        let num = BigInt::from(self.num.clone()) * BigInt::from(rhs.den.clone())
            + BigInt::from(rhs.num.clone()) * BigInt::from(self.den.clone());
        let den = BigInt::from(self.den.clone()) * BigInt::from(rhs.den.clone());
        FracMod1::from_ratio(&num, &den)
    }
}

impl Sub for &FracMod1 {
    type Output = FracMod1;
    fn sub(self, rhs: &FracMod1) -> FracMod1 {
        self + &(-rhs)
    }
}

impl Neg for &FracMod1 {
    type Output = FracMod1;
    fn neg(self) -> FracMod1 {
        if self.num.is_zero() {
            return FracMod1::zero();
        }
        FracMod1 {
            num: &self.den - &self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for FracMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for FracMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for FracMod1 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
        let num = BigInt::from_str(num.trim())
            .map_err(|e| Error::Parse(format!("bad numerator in {s:?}: {e}")))?;
        let den = BigInt::from_str(den.trim())
            .map_err(|e| Error::Parse(format!("bad denominator in {s:?}: {e}")))?;
        FracMod1::new(num, den)
    }
}

/// A point on the unit circle in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub re: f64,
    pub im: f64,
}

impl Phase {
    pub fn one() -> Self {
        Phase { re: 1.0, im: 0.0 }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }
}

/// Unscaled Gauss sum Σ exp(2πi·v) over the given values.
pub fn gauss_sum<'a, I>(values: I) -> (f64, f64)
where
    I: IntoIterator<Item = &'a FracMod1>,
{
    let mut re = 0.0;
    let mut im = 0.0;
    for v in values {
        let p = v.as_phase();
        re += p.re;
        im += p.im;
    }
    (re, im)
}
