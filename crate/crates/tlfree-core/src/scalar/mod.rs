//! Coefficient rings used by the diagram algebras and the linear solver.
//!
//! [`Ring`] is the minimal interface for linear combinations of diagrams,
//! [`Field`] adds exact or approximate division for elimination, and
//! [`OrderedField`] adds sign tests for positivity checks. Implementations
//! are provided for exact rationals, Laurent polynomials in δ, rational
//! functions in δ, and the primitive floats.

mod laurent;
mod ratfunc;

pub use laurent::LaurentScalar;
pub use ratfunc::{quantum_integer, Poly, RationalFunctionScalar};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Commutative ring with unit, as needed for formal linear combinations.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Embed an exact rational. Floats round to the nearest value.
    fn from_rational(q: &BigRational) -> Self;

    /// Embed an integer.
    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }
}

/// Ring containing the loop parameter δ as an invertible element, so closed
/// loops can be evaluated formally.
pub trait DeltaRing: Ring {
    /// δ^exp.
    fn delta_pow(exp: i64) -> Self;
}

/// Ring in which nonzero elements can be inverted.
pub trait Field: Ring + std::ops::Div<Output = Self> {
    /// Whether the element must be treated as zero during elimination.
    fn is_negligible(&self) -> bool;

    /// Heuristic pivot cost: lower is preferred. Exact types use size,
    /// floats use negative magnitude (partial pivoting).
    fn pivot_cost(&self) -> f64;
}

/// Field with a sign test (exact, or with tolerance for floats).
pub trait OrderedField: Field {
    /// Strictly positive beyond tolerance.
    fn is_positive(&self) -> bool;
    /// Strictly negative beyond tolerance.
    fn is_negative(&self) -> bool;
}

/// Exact rationals with arbitrary precision.
pub type Rational = BigRational;

/// Build a rational `p/q`. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            if let Ok(p) = s.parse::<BigInt>() {
                return Ok(BigRational::from_integer(p));
            }
            // Accept finite decimals such as "1.5".
            let (int, frac) = s.split_once('.').ok_or_else(bad)?;
            let digits = format!("{int}{frac}");
            let p: BigInt = digits.parse().map_err(|_| bad())?;
            let q = num_traits::pow(BigInt::from(10), frac.len());
            Ok(BigRational::new(p, q))
        }
    }
}

/// Render a rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest `f64` to a rational.
pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

fn rational_bits(q: &Rational) -> f64 {
    (q.numer().bits() + q.denom().bits()) as f64
}

impl Ring for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl Field for BigRational {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn pivot_cost(&self) -> f64 {
        rational_bits(self)
    }
}

impl OrderedField for BigRational {
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Absolute tolerance used for float pivots and sign tests.
pub const FLOAT_TOL: f64 = 1e-9;

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Ring for $t {
            fn from_rational(q: &BigRational) -> Self {
                rational_to_f64(q) as $t
            }
        }
        impl Field for $t {
            fn is_negligible(&self) -> bool {
                (self.abs() as f64) < FLOAT_TOL
            }
            fn pivot_cost(&self) -> f64 {
                -(self.abs() as f64)
            }
        }
        impl OrderedField for $t {
            fn is_positive(&self) -> bool {
                (*self as f64) > FLOAT_TOL
            }
            fn is_negative(&self) -> bool {
                (*self as f64) < -FLOAT_TOL
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);
