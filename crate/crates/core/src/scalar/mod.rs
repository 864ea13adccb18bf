//! Field scalars.
//!
//! Every algorithm in this crate is written once against [`Field`] and runs in
//! one of two realizations: arbitrary-precision rationals ([`Rational`]) where
//! all arithmetic and zero tests are exact, and `f64` where zero tests go
//! through relative tolerances and the heavy kernels (rank, kernels, images,
//! eigenspaces) are routed through the singular value decomposition.

mod poly;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::UniPoly;
pub use roots::rational_roots;

/// Exact rational scalar; numerator and denominator are kept reduced with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Which realization of the field a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected `exact` or `float`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("operation requires exact (rational) scalars")]
    NotExactMode,
    #[error("operation requires floating-point scalars")]
    NotFloatMode,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("interpolation abscissa {0} appears more than once")]
    DuplicateAbscissa(String),
    #[error("interpolation needs at least one point")]
    NoPoints,
}

/// A field `K` with the hooks the algorithms need to run either exactly or in
/// floating point.
pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// The exact value, when the realization is exact.
    fn to_rational(&self) -> Option<Rational>;

    fn from_rational(q: &Rational) -> Self;

    /// Zero test. Exact scalars ignore `tol`; floats compare `|x| <= tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// A total order used only to make outputs deterministic.
    fn total_cmp(&self, other: &Self) -> Ordering;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

impl Field for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    /// Exact binary expansion of `v`; non-finite input maps to zero.
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.abs())
    }
}

impl Field for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn from_rational(q: &Rational) -> Self {
        ratio_to_f64(q)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
}

/// Correctly scaled conversion even when numerator and denominator overflow
/// `f64` on their own.
fn ratio_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    let (num, den) = if shift > 0 {
        (q.numer().clone(), q.denom() << (shift as u64))
    } else {
        (q.numer() << ((-shift) as u64), q.denom().clone())
    };
    // num/den now lies within a factor of 2 of +-1.
    let top = (&num << 64u32) / &den;
    top.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - 64)
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}
