//! Exact Laurent polynomials in the loop parameter δ.

use super::{format_rational, parse_rational, rational_to_f64, DeltaRing, Rational, Ring};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Σ c_e δ^e with rational coefficients and finitely many nonzero terms.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentScalar {
    coeffs: BTreeMap<i64, Rational>,
}

impl LaurentScalar {
    /// The monomial c·δ^e.
    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        Self { coeffs }
    }

    /// δ^e.
    pub fn delta_power(e: i64) -> Self {
        Self::monomial(Rational::one(), e)
    }

    /// δ itself.
    pub fn delta() -> Self {
        Self::delta_power(1)
    }

    /// Embed a rational constant.
    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// Build from (exponent, coefficient) pairs, summing repeats.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Iterate over (exponent, coefficient), ascending in exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of δ^e.
    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Lowest exponent present, if nonzero.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent present, if nonzero.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Whether the polynomial is a constant (possibly zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    /// Add c·δ^e in place.
    pub fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    /// Multiply by δ^e.
    pub fn shift(&self, e: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    /// Multiply by a rational.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Divide by a nonzero rational.
    pub fn div_rational(&self, c: &Rational) -> crate::Result<Self> {
        if c.is_zero() {
            return Err(crate::Error::Singularity("division by zero".into()));
        }
        Ok(self.scale(&(Rational::one() / c)))
    }

    /// Evaluate at a rational value of δ. Fails at δ = 0 when negative
    /// powers are present.
    pub fn eval(&self, delta: &Rational) -> crate::Result<Rational> {
        if delta.is_zero() && self.min_exp().is_some_and(|e| e < 0) {
            return Err(crate::Error::Singularity("negative power of δ at δ = 0".into()));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.coeffs {
            acc += c * pow_rational(delta, *e);
        }
        Ok(acc)
    }

    /// Evaluate at a floating value of δ.
    pub fn eval_f64(&self, delta: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| rational_to_f64(c) * delta.powi(*e as i32))
            .sum()
    }

    /// Replace δ by δ^{-1}.
    pub fn invert_variable(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }
}

/// q^e for integer e (q must be nonzero when e < 0).
pub(crate) fn pow_rational(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        Rational::one() / num_traits::pow(q.clone(), (-e) as usize)
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let cs = format_rational(&abs);
            match *e {
                0 => write!(f, "{cs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{cs}·")?;
                    }
                    if *e == 1 {
                        write!(f, "δ")?;
                    } else {
                        write!(f, "δ^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Zero for LaurentScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LaurentScalar {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add for LaurentScalar {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for LaurentScalar {
    fn add_assign(&mut self, rhs: Self) {
        for (e, c) in rhs.coeffs {
            self.add_term(e, c);
        }
    }
}

impl<'a> Add<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.clone() + rhs.clone()
    }
}

impl Sub for LaurentScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LaurentScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl Mul for LaurentScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl From<Rational> for LaurentScalar {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for LaurentScalar {
    fn from(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }
}

impl Ring for LaurentScalar {
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }
}

impl DeltaRing for LaurentScalar {
    fn delta_pow(exp: i64) -> Self {
        Self::delta_power(exp)
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.to_string(), format_rational(c)))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, serde_json::Value>::deserialize(deserializer)?;
        let mut out = LaurentScalar::zero();
        for (k, v) in map {
            let e: i64 = k
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad δ exponent {k:?}")))?;
            let text = match &v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(D::Error::custom(format!("bad coefficient {other}"))),
            };
            let c = parse_rational(&text).map_err(D::Error::custom)?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}
