//! Words in the letters `X_{e,f°}` of the even path algebra.
//!
//! A letter `X_{e,f°}` walks from `s(e)` out along `e` to the common odd
//! vertex `t(e) = t(f)` and back along `f` to `s(f)`. Its adjoint is
//! `X_{f,e°}`. A word is a loop when consecutive letters compose and the
//! last letter returns to the base vertex.

use crate::graph::BipartiteGraph;
use serde::{Deserialize, Serialize};
use std::fmt;
use tlfree_core::{Error, Result};

/// The generator `X_{e,f°}`, with edges given by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Letter {
    pub e: usize,
    pub f: usize,
}

impl Letter {
    pub fn new(e: usize, f: usize) -> Self {
        Letter { e, f }
    }

    /// `X_{e,f°}* = X_{f,e°}`.
    pub fn adjoint(self) -> Self {
        Letter { e: self.f, f: self.e }
    }
}

impl From<(usize, usize)> for Letter {
    fn from((e, f): (usize, usize)) -> Self {
        Letter { e, f }
    }
}

impl From<Letter> for (usize, usize) {
    fn from(l: Letter) -> Self {
        (l.e, l.f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X[{},{}°]", self.e, self.f)
    }
}

/// A closed word based at a Γ₊ vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopWord {
    /// Label of the base vertex in Γ₊.
    pub base: String,
    pub letters: Vec<Letter>,
}

impl LoopWord {
    /// Build and validate a loop on `g`.
    pub fn new(g: &BipartiteGraph, base: &str, letters: Vec<Letter>) -> Result<Self> {
        let w = LoopWord { base: base.to_string(), letters };
        w.validate(g)?;
        Ok(w)
    }

    /// The word `X_{e,e°}^n` based at `s(e)`.
    pub fn power(g: &BipartiteGraph, e: usize, n: usize) -> Result<Self> {
        if e >= g.edges().len() {
            return Err(Error::arg(format!("edge {e} out of range")));
        }
        let base = g.plus_labels()[g.source(e)].clone();
        LoopWord::new(g, &base, vec![Letter::new(e, e); n])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Index of the base vertex in Γ₊.
    pub fn base_index(&self, g: &BipartiteGraph) -> Result<usize> {
        g.plus_index(&self.base)
            .ok_or_else(|| Error::arg(format!("base {:?} is not a Γ₊ vertex", self.base)))
    }

    /// Check letters, composability and closure.
    pub fn validate(&self, g: &BipartiteGraph) -> Result<()> {
        let base = self.base_index(g)?;
        let n_edges = g.edges().len();
        let mut at = base;
        for (i, l) in self.letters.iter().enumerate() {
            if l.e >= n_edges || l.f >= n_edges {
                return Err(Error::arg(format!("letter {i} uses an unknown edge")));
            }
            if g.target(l.e) != g.target(l.f) {
                return Err(Error::arg(format!("letter {i}: t(e) ≠ t(f)")));
            }
            if g.source(l.e) != at {
                return Err(Error::arg(format!("letter {i} does not start where the previous one ends")));
            }
            at = g.source(l.f);
        }
        if at != base {
            return Err(Error::arg("word is not closed at its base vertex"));
        }
        Ok(())
    }

    /// The loop read starting from letter `by` (cyclic rotation).
    pub fn rotate(&self, g: &BipartiteGraph, by: usize) -> Result<Self> {
        if self.letters.is_empty() {
            return Ok(self.clone());
        }
        let n = self.letters.len();
        let letters: Vec<Letter> = (0..n).map(|i| self.letters[(i + by) % n]).collect();
        let base = g.plus_labels()[g.source(letters[0].e)].clone();
        LoopWord::new(g, &base, letters)
    }

    /// The adjoint word, reversed with every letter adjointed.
    pub fn adjoint(&self) -> Self {
        LoopWord { base: self.base.clone(), letters: self.letters.iter().rev().map(|l| l.adjoint()).collect() }
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "p[{}]", self.base);
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
