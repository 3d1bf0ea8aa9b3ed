//! Exact operator-valued Wick evaluation of loop words.
//!
//! The letters form an `l^∞(Γ₊)`-valued circular family with covariance
//! `E[X_{e,f°} X_{f,e°}] = μ_{s(f)} p_{s(e)}`. Only non-crossing pairings of
//! a letter with its adjoint contribute, so the expectation of a word obeys
//! the interval recursion
//!
//! `W(i..j) = Σ_{k : a_k = a_i*} μ_{s(f_i)} · W(i+1..k) · W(k+1..j)`,
//!
//! which is evaluated by dynamic programming in `O(m³)`.

use crate::graph::BipartiteGraph;
use crate::word::LoopWord;
use tlfree_core::{Error, Rational, Result, Ring};

/// Coefficient of `p_base` in `E[w]`, with vertex weights supplied by
/// `mu_plus` (indexed by Γ₊ vertex).
pub fn wick_value<S: Ring>(w: &LoopWord, g: &BipartiteGraph, mu_plus: &[S]) -> Result<S> {
    w.validate(g)?;
    let a = &w.letters;
    let m = a.len();
    if m % 2 == 1 {
        return Ok(S::zero());
    }
    // table[i][j] is the value of the subword a[i..j].
    let mut table = vec![vec![S::zero(); m + 1]; m + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[i] = S::one();
    }
    for len in (2..=m).step_by(2) {
        for i in 0..=m - len {
            let j = i + len;
            let partner = a[i].adjoint();
            let weight = &mu_plus[g.source(a[i].f)];
            let mut acc = S::zero();
            for k in (i + 1..j).step_by(2) {
                if a[k] == partner {
                    acc = acc + weight.clone() * table[i + 1][k].clone() * table[k + 1][j].clone();
                }
            }
            table[i][j] = acc;
        }
    }
    Ok(table[0][m].clone())
}

/// Wick expectation of a closed loop word, as the coefficient of `p_base`.
pub fn wick_expectation(w: &LoopWord, g: &BipartiteGraph) -> Result<f64> {
    wick_value(w, g, g.mu_plus())
}

/// Exact Wick expectation when the graph carries rational weights.
pub fn wick_expectation_exact(w: &LoopWord, g: &BipartiteGraph) -> Result<Option<Rational>> {
    match g.exact() {
        Some(ex) => wick_value(w, g, &ex.mu_plus).map(Some),
        None => Ok(None),
    }
}

/// Wick value of a loop together with its planar-algebra normalizations.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopValue {
    /// Coefficient of `p_base` in `E[X_{e₁,f₁°} ⋯ X_{e_m,f_m°}]`.
    pub raw: f64,
    /// Exact raw value when the graph weights are rational.
    pub raw_exact: Option<Rational>,
    /// Value of the loop basis element `(e₁,f₁°,…,e_m,f_m°)`: the raw value
    /// times `(Π_j μ_{s(e_j)} μ_{s(f_j)})^{-1/4}`.
    pub normalized: f64,
    /// `μ_base` times the normalized value: the scalar trace that weights
    /// `p_v` by `μ_v`. It is invariant under cyclic rotation of the loop.
    pub traced: f64,
}

/// Raw and normalized values of a loop word.
pub fn loop_vs_diagram(w: &LoopWord, g: &BipartiteGraph) -> Result<LoopValue> {
    let raw = wick_expectation(w, g)?;
    let raw_exact = wick_expectation_exact(w, g)?;
    let mu = g.mu_plus();
    let log_weight: f64 = w.letters.iter().map(|l| mu[g.source(l.e)].ln() + mu[g.source(l.f)].ln()).sum();
    let normalized = raw * (-0.25 * log_weight).exp();
    let traced = mu[w.base_index(g)?] * normalized;
    Ok(LoopValue { raw, raw_exact, normalized, traced })
}

/// Interpolated free group factor parameter `t_k = 1 + δ^{-2k} I (δ² − 1)`
/// for a finite-depth planar algebra with loop value `δ > 1` and global
/// index `I > 0`.
pub fn lf_parameter(delta: f64, global_index: f64, k: u32) -> Result<f64> {
    if !(delta > 1.0) || !(global_index > 0.0) {
        return Err(Error::arg("the parameter formula needs δ > 1 and I > 0"));
    }
    Ok(1.0 + delta.powi(-2 * k as i32) * global_index * (delta * delta - 1.0))
}
