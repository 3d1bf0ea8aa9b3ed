//! Rational functions in δ over the rationals, kept in lowest terms.

use super::{DeltaRing, Field, LaurentScalar, Rational, Ring};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Dense univariate polynomial over ℚ, coefficients in ascending degree.
///
/// Invariant: no trailing zero coefficients, so the zero polynomial is the
/// empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    /// Build from ascending coefficients.
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    /// The constant polynomial.
    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// c·δ^e for e ≥ 0.
    pub fn monomial(c: Rational, e: usize) -> Self {
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = c;
        Poly::new(v)
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    /// Degree, or `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = o.0.get(i).cloned().unwrap_or_else(Rational::zero);
            v.push(a + b);
        }
        Poly::new(v)
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }

    fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Long division: (quotient, remainder). Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead = d.lead();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::default(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    /// Evaluate at a rational point (Horner).
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Lowest degree with a nonzero coefficient.
    fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, Rational)> =
            self.0.iter().enumerate().map(|(i, c)| (i as i64, c.clone())).collect();
        write!(f, "{}", LaurentScalar::from_terms(terms))
    }
}

/// A quotient num/den of polynomials in δ.
///
/// Invariants: the denominator is monic and nonzero, and gcd(num, den) = 1,
/// so structural equality coincides with equality of rational functions.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RatFuncRepr", try_from = "RatFuncRepr")]
pub struct RationalFunctionScalar {
    num: Poly,
    den: Poly,
}

impl RationalFunctionScalar {
    /// num/den in lowest terms. Fails if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> crate::Result<Self> {
        if den.is_zero() {
            return Err(crate::Error::Singularity("zero denominator".into()));
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let lead = d.lead();
        let inv = Rational::one() / lead;
        Self { num: n.scale(&inv), den: d.scale(&inv) }
    }

    /// δ as a rational function.
    pub fn delta() -> Self {
        Self::from_laurent(&LaurentScalar::delta())
    }

    /// Embed a Laurent polynomial.
    pub fn from_laurent(p: &LaurentScalar) -> Self {
        let low = p.min_exp().unwrap_or(0).min(0);
        let mut v = Vec::new();
        for (e, c) in p.terms() {
            let idx = (e - low) as usize;
            if v.len() <= idx {
                v.resize(idx + 1, Rational::zero());
            }
            v[idx] = c.clone();
        }
        let den = Poly::monomial(Rational::one(), (-low) as usize);
        Self::reduced(Poly::new(v), den)
    }

    /// Convert back to a Laurent polynomial when the denominator is a power
    /// of δ.
    pub fn to_laurent(&self) -> Option<LaurentScalar> {
        let dd = self.den.degree()?;
        if self.den.valuation() != Some(dd) {
            return None;
        }
        Some(LaurentScalar::from_terms(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64 - dd as i64, c.clone())),
        ))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Evaluate at a rational δ, failing if the denominator vanishes there.
    pub fn eval(&self, delta: &Rational) -> crate::Result<Rational> {
        let d = self.den.eval(delta);
        if d.is_zero() {
            return Err(crate::Error::Singularity(format!(
                "denominator vanishes at δ = {}",
                super::format_rational(delta)
            )));
        }
        Ok(self.num.eval(delta) / d)
    }

    /// Evaluate at a floating δ.
    pub fn eval_f64(&self, delta: f64) -> f64 {
        let ev = |p: &Poly| {
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| super::rational_to_f64(c) * delta.powi(i as i32))
                .sum::<f64>()
        };
        ev(&self.num) / ev(&self.den)
    }

    /// Multiplicative inverse. Fails on zero.
    pub fn inv(&self) -> crate::Result<Self> {
        if self.num.is_zero() {
            return Err(crate::Error::Singularity("inverse of zero".into()));
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    fn size(&self) -> usize {
        self.num.coeffs().len() + self.den.coeffs().len()
    }
}

/// The quantum integer [n] = (δ-analogue) defined by [0] = 0, [1] = 1,
/// [n+1] = δ[n] − [n−1].
pub fn quantum_integer(n: usize) -> LaurentScalar {
    let (mut a, mut b) = (LaurentScalar::zero(), LaurentScalar::one());
    for _ in 0..n {
        let next = LaurentScalar::delta() * b.clone() - a;
        a = b;
        b = next;
    }
    a
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: LaurentScalar,
    den: LaurentScalar,
}

impl From<RationalFunctionScalar> for RatFuncRepr {
    fn from(r: RationalFunctionScalar) -> Self {
        let lift = |p: &Poly| {
            LaurentScalar::from_terms(
                p.coeffs().iter().enumerate().map(|(i, c)| (i as i64, c.clone())),
            )
        };
        RatFuncRepr { num: lift(&r.num), den: lift(&r.den) }
    }
}

impl TryFrom<RatFuncRepr> for RationalFunctionScalar {
    type Error = crate::Error;
    fn try_from(r: RatFuncRepr) -> crate::Result<Self> {
        if r.den.is_zero() {
            return Err(crate::Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_laurent(&r.num) / Self::from_laurent(&r.den))
    }
}

impl fmt::Debug for RationalFunctionScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalFunctionScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.to_laurent() {
            return write!(f, "{l}");
        }
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl Zero for RationalFunctionScalar {
    fn zero() -> Self {
        Self { num: Poly::default(), den: Poly::constant(Rational::one()) }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunctionScalar {
    fn one() -> Self {
        Self { num: Poly::constant(Rational::one()), den: Poly::constant(Rational::one()) }
    }
}

impl Add for RationalFunctionScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        if self.den == o.den {
            return Self::reduced(self.num.add(&o.num), self.den);
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::reduced(num, self.den.mul(&o.den))
    }
}

impl Sub for RationalFunctionScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for RationalFunctionScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { num: self.num.neg(), den: self.den }
    }
}

impl Mul for RationalFunctionScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::reduced(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Div for RationalFunctionScalar {
    type Output = Self;
    /// Panics on division by zero; use [`RationalFunctionScalar::inv`] for a
    /// checked inverse.
    fn div(self, o: Self) -> Self {
        assert!(!o.is_zero(), "rational function division by zero");
        Self::reduced(self.num.mul(&o.den), self.den.mul(&o.num))
    }
}

impl From<LaurentScalar> for RationalFunctionScalar {
    fn from(p: LaurentScalar) -> Self {
        Self::from_laurent(&p)
    }
}

impl Ring for RationalFunctionScalar {
    fn from_rational(q: &Rational) -> Self {
        Self::reduced(Poly::constant(q.clone()), Poly::constant(Rational::one()))
    }
}

impl DeltaRing for RationalFunctionScalar {
    fn delta_pow(exp: i64) -> Self {
        Self::from_laurent(&LaurentScalar::delta_power(exp))
    }
}

impl Field for RationalFunctionScalar {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn pivot_cost(&self) -> f64 {
        self.size() as f64
    }
}
