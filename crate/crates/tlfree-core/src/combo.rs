//! Finite formal linear combinations of basis keys.

use crate::scalar::Ring;
use std::collections::BTreeMap;

/// Σ cᵢ·kᵢ over an ordered key type, with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combination<K: Ord, S> {
    terms: BTreeMap<K, S>,
}

impl<K: Ord, S> Default for Combination<K, S> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, S: Ring> Combination<K, S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// The combination 1·k.
    pub fn basis(k: K) -> Self {
        Self::single(k, S::one())
    }

    /// The combination c·k.
    pub fn single(k: K, c: S) -> Self {
        let mut out = Self::new();
        out.add_term(k, c);
        out
    }

    /// Add c·k in place.
    pub fn add_term(&mut self, k: K, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let nv = v.clone() + c;
                if nv.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = nv;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    /// Add c·other in place.
    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone() * c.clone());
        }
    }

    /// Coefficient of k.
    pub fn coeff(&self, k: &K) -> S {
        self.terms.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &S)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply every coefficient by c.
    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &S::one());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &(-S::one()));
        out
    }

    /// Apply a map to every key, summing coefficients of colliding images.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> Combination<K2, S> {
        let mut out = Combination::new();
        for (k, v) in &self.terms {
            out.add_term(f(k), v.clone());
        }
        out
    }

    /// Apply a map to every coefficient, dropping terms that become zero.
    pub fn map_coeffs<T: Ring>(&self, mut f: impl FnMut(&S) -> T) -> Combination<K, T> {
        let mut out = Combination::new();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    /// Fallible variant of [`Combination::map_coeffs`].
    pub fn try_map_coeffs<T: Ring, E>(
        &self,
        mut f: impl FnMut(&S) -> Result<T, E>,
    ) -> Result<Combination<K, T>, E> {
        let mut out = Combination::new();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v)?);
        }
        Ok(out)
    }

    pub fn into_terms(self) -> BTreeMap<K, S> {
        self.terms
    }
}

impl<K: Ord + Clone, S: Ring> FromIterator<(K, S)> for Combination<K, S> {
    fn from_iter<I: IntoIterator<Item = (K, S)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}
