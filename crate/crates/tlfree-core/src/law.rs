//! Scalar laws as truncated moment and free-cumulant sequences.

use crate::linalg::is_psd;
use crate::nc::{enumerate_nc_with_cap, NCPartition, DEFAULT_NC_CAP};
use crate::scalar::{parse_rational, LaurentScalar, Rational, Ring};
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Moments m₁..m_D of a law (m₀ = 1 is implicit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentSeq<S = Rational> {
    pub m: Vec<S>,
}

/// Free cumulants κ₁..κ_D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulantSeq<S = Rational> {
    pub k: Vec<S>,
}

impl<S: Ring> MomentSeq<S> {
    pub fn new(m: Vec<S>) -> Self {
        Self { m }
    }
    /// Truncation depth D.
    pub fn depth(&self) -> usize {
        self.m.len()
    }
    /// mₙ, with m₀ = 1.
    pub fn moment(&self, n: usize) -> S {
        if n == 0 {
            S::one()
        } else {
            self.m[n - 1].clone()
        }
    }
}

impl<S: Ring> CumulantSeq<S> {
    pub fn new(k: Vec<S>) -> Self {
        Self { k }
    }
    /// Truncation depth D.
    pub fn depth(&self) -> usize {
        self.k.len()
    }
    /// κₙ for 1 ≤ n ≤ D.
    pub fn cumulant(&self, n: usize) -> S {
        self.k[n - 1].clone()
    }
    /// κ_π = Π_{V ∈ π} κ_{|V|}.
    pub fn multiplicative(&self, pi: &NCPartition) -> S {
        pi.blocks().iter().fold(S::one(), |acc, b| acc * self.cumulant(b.len()))
    }
}

/// Count of partitions in NC(n) with each sorted block-size type.
fn block_types(n: usize, cap: usize) -> Result<BTreeMap<Vec<usize>, i64>> {
    let mut out = BTreeMap::new();
    for pi in enumerate_nc_with_cap(n, cap)? {
        *out.entry(pi.block_type()).or_insert(0) += 1;
    }
    Ok(out)
}

fn product_over_type<S: Ring>(ty: &[usize], k: &[S]) -> S {
    ty.iter().fold(S::one(), |acc, &s| acc * k[s - 1].clone())
}

/// mₙ = Σ_{π ∈ NC(n)} κ_π, for n = 1..D.
pub fn cumulants_to_moments<S: Ring>(k: &CumulantSeq<S>) -> Result<MomentSeq<S>> {
    cumulants_to_moments_with_cap(k, DEFAULT_NC_CAP)
}

/// [`cumulants_to_moments`] with an explicit NC cap.
pub fn cumulants_to_moments_with_cap<S: Ring>(
    k: &CumulantSeq<S>,
    cap: usize,
) -> Result<MomentSeq<S>> {
    let mut m = Vec::with_capacity(k.depth());
    for n in 1..=k.depth() {
        let mut acc = S::zero();
        for (ty, count) in block_types(n, cap)? {
            acc = acc + S::from_i64(count) * product_over_type(&ty, &k.k);
        }
        m.push(acc);
    }
    Ok(MomentSeq::new(m))
}

/// Inverse of [`cumulants_to_moments`]: κₙ = mₙ − Σ_{π ≠ 1ₙ} κ_π, solved
/// degree by degree.
pub fn moments_to_cumulants<S: Ring>(m: &MomentSeq<S>) -> Result<CumulantSeq<S>> {
    moments_to_cumulants_with_cap(m, DEFAULT_NC_CAP)
}

/// [`moments_to_cumulants`] with an explicit NC cap.
pub fn moments_to_cumulants_with_cap<S: Ring>(
    m: &MomentSeq<S>,
    cap: usize,
) -> Result<CumulantSeq<S>> {
    let mut k: Vec<S> = Vec::with_capacity(m.depth());
    for n in 1..=m.depth() {
        let mut rest = S::zero();
        for (ty, count) in block_types(n, cap)? {
            if ty == [n] {
                continue;
            }
            rest = rest + S::from_i64(count) * product_over_type(&ty, &k);
        }
        k.push(m.moment(n) - rest);
    }
    Ok(CumulantSeq::new(k))
}

/// κₙ ↦ t·κₙ.
pub fn convolution_power<S: Ring>(k: &CumulantSeq<S>, t: &S) -> CumulantSeq<S> {
    CumulantSeq::new(k.k.iter().map(|x| x.clone() * t.clone()).collect())
}

/// Lift rational cumulants to Laurent coefficients.
pub fn to_laurent(k: &CumulantSeq<Rational>) -> CumulantSeq<LaurentScalar> {
    CumulantSeq::new(k.k.iter().cloned().map(LaurentScalar::constant).collect())
}

/// Hankel matrix [m_{i+j}]_{0 ≤ i,j ≤ depth/2}.
pub fn hankel(m: &MomentSeq<Rational>, depth: usize) -> Result<Vec<Vec<Rational>>> {
    if depth > m.depth() {
        return Err(Error::Truncation(format!("depth {depth} beyond {} moments", m.depth())));
    }
    let h = depth / 2;
    Ok((0..=h).map(|i| (0..=h).map(|j| m.moment(i + j)).collect()).collect())
}

/// Necessary condition for ν^{⊞1/t} to be a measure: its Hankel matrix up
/// to the given even depth is positive semidefinite.
pub fn divisibility_check(k: &CumulantSeq<Rational>, t: &Rational, depth: usize) -> Result<bool> {
    if depth % 2 != 0 {
        return Err(Error::arg("depth must be even"));
    }
    if t <= &Rational::zero() {
        return Err(Error::arg("t must be positive"));
    }
    if depth > k.depth() {
        return Err(Error::Truncation(format!("depth {depth} beyond {} cumulants", k.depth())));
    }
    let scaled = convolution_power(k, &(Rational::one() / t));
    let trunc = CumulantSeq::new(scaled.k[..depth].to_vec());
    let m = cumulants_to_moments(&trunc)?;
    is_psd(&hankel(&m, depth)?)
}

/// Built-in laws selectable by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedLaw {
    /// κ₂ = 1, all other cumulants zero.
    Semicircle,
    /// κₙ = 1 for every n.
    FreePoisson,
    /// Explicit cumulant list; cumulants beyond the list are zero.
    Custom(Vec<Rational>),
}

impl NamedLaw {
    /// Parse "semicircle", "free-poisson", or "custom:k1,k2,…".
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "semicircle" => Ok(Self::Semicircle),
            "free-poisson" => Ok(Self::FreePoisson),
            _ => {
                let rest = s
                    .strip_prefix("custom:")
                    .ok_or_else(|| Error::arg(format!("unknown law {s:?}")))?;
                let ks = rest
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Custom(ks))
            }
        }
    }

    /// Cumulants κ₁..κ_D.
    pub fn cumulants(&self, depth: usize) -> CumulantSeq<Rational> {
        let k = (1..=depth)
            .map(|n| match self {
                Self::Semicircle => {
                    if n == 2 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                }
                Self::FreePoisson => Rational::one(),
                Self::Custom(v) => v.get(n - 1).cloned().unwrap_or_else(Rational::zero),
            })
            .collect();
        CumulantSeq::new(k)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Semicircle => "semicircle",
            Self::FreePoisson => "free-poisson",
            Self::Custom(_) => "custom",
        }
    }
}
