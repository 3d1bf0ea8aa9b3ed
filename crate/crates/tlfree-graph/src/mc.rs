//! Monte Carlo realization of the loop model by complex Gaussian blocks.
//!
//! Each Γ₊ vertex `v` gets a block of dimension `d_v = max(1, round(N μ_v /
//! max μ))`, where the maximum runs over Γ₊. A letter `X_{e,f°}` is a
//! `d_{s(e)} × d_{s(f)}` block of a circular element on the ambient space of
//! dimension `D = Σ_v d_v`: a Ginibre block with entry variance `1/D` when
//! `e ≠ f` (with `X_{f,e°}` its adjoint), and a GUE block with the same
//! entry variance when `e = f`. The sample value is the normalized trace of
//! the word on the base block.
//!
//! With `d_v ∝ μ_v` this realizes the covariance `μ_{s(f)} / Σ_{Γ₊} μ`, so
//! the raw mean targets the Wick value of `μ / Σ_{Γ₊} μ`. Wick values are
//! homogeneous of degree `m/2` in μ, and the reported estimate is the raw
//! mean times `(Σ_{Γ₊} μ)^{m/2}`.
//!
//! Sample `i` draws from its own ChaCha20 stream (`seed`, stream `i`), so
//! results do not depend on the number of threads.

use crate::graph::BipartiteGraph;
use crate::word::{Letter, LoopWord};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use tlfree_core::{Error, Result};

/// Largest accepted target dimension.
pub const MAX_MC_DIM: usize = 4096;
/// Largest accepted number of samples.
pub const MAX_MC_SAMPLES: usize = 1_000_000;

/// Sampler configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    /// Target dimension N of the largest block.
    pub target_dim: usize,
    pub samples: usize,
    pub seed: u64,
}

impl MCConfig {
    pub fn new(target_dim: usize, samples: usize, seed: u64) -> Self {
        MCConfig { target_dim, samples, seed }
    }

    /// Block dimensions per Γ₊ vertex.
    pub fn dims(&self, g: &BipartiteGraph) -> Result<Vec<usize>> {
        self.validate()?;
        let mu = g.mu_plus();
        let max = mu.iter().cloned().fold(0.0, f64::max);
        let dims: Vec<usize> =
            mu.iter().map(|&m| ((self.target_dim as f64 * m / max).round() as usize).max(1)).collect();
        if dims.contains(&0) {
            return Err(Error::Config("zero block dimension".into()));
        }
        Ok(dims)
    }

    fn validate(&self) -> Result<()> {
        if self.target_dim == 0 || self.samples == 0 {
            return Err(Error::Config("dimension and sample count must be positive".into()));
        }
        if self.target_dim > MAX_MC_DIM || self.samples > MAX_MC_SAMPLES {
            return Err(Error::ResourceLimit(format!(
                "Monte Carlo is capped at dimension {MAX_MC_DIM} and {MAX_MC_SAMPLES} samples"
            )));
        }
        Ok(())
    }
}

/// Result of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    /// Estimate of the exact Wick value.
    pub mean: f64,
    pub stderr: f64,
    /// Mean of the normalized base-block trace (real part).
    pub raw_mean: f64,
    pub raw_stderr: f64,
    /// Mean imaginary part of the raw samples.
    pub raw_imag_mean: f64,
    /// `(Σ_{Γ₊} μ)^{m/2}`.
    pub scale: f64,
    pub dims: Vec<usize>,
    pub samples: usize,
}

/// Sum with pairwise splitting, which keeps the rounding error logarithmic
/// in the number of terms.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn complex_normal(rng: &mut ChaCha20Rng, sd: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// Draw the blocks needed by a word: one per letter up to adjoints, in the
/// order of the canonical representatives.
fn draw_blocks(
    letters: &[Letter],
    g: &BipartiteGraph,
    dims: &[usize],
    total: usize,
    rng: &mut ChaCha20Rng,
) -> BTreeMap<Letter, Array2<Complex64>> {
    let mut reps: Vec<Letter> =
        letters.iter().map(|&l| if l.e <= l.f { l } else { l.adjoint() }).collect();
    reps.sort();
    reps.dedup();
    let sd = (0.5 / total as f64).sqrt();
    let mut out = BTreeMap::new();
    for l in reps {
        let (r, c) = (dims[g.source(l.e)], dims[g.source(l.f)]);
        let a = Array2::from_shape_simple_fn((r, c), || complex_normal(rng, sd));
        if l.e == l.f {
            let h = (&a + &a.t().mapv(|z| z.conj())).mapv(|z| z / std::f64::consts::SQRT_2);
            out.insert(l, h);
        } else {
            out.insert(l.adjoint(), a.t().mapv(|z| z.conj()));
            out.insert(l, a);
        }
    }
    out
}

fn sample_value(w: &LoopWord, g: &BipartiteGraph, dims: &[usize], base: usize, seed: u64, index: u64) -> Complex64 {
    let letters = &w.letters;
    if letters.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let total: usize = dims.iter().sum();
    let blocks = draw_blocks(letters, g, dims, total, &mut rng);
    let trace = if letters.len() == 1 {
        blocks[&letters[0]].diag().sum()
    } else {
        let mut acc = blocks[&letters[0]].clone();
        for l in &letters[1..letters.len() - 1] {
            acc = acc.dot(&blocks[l]);
        }
        // Tr(A·B) without forming the last product.
        let last = &blocks[&letters[letters.len() - 1]];
        acc.iter().zip(last.t().iter()).map(|(a, b)| a * b).sum()
    };
    trace / dims[base] as f64
}

/// Monte Carlo estimate of the Wick value of `w` with per-sample streams.
pub fn mc_estimate(w: &LoopWord, g: &BipartiteGraph, cfg: &MCConfig) -> Result<MCEstimate> {
    w.validate(g)?;
    let dims = cfg.dims(g)?;
    let base = w.base_index(g)?;
    let values: Vec<Complex64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| sample_value(w, g, &dims, base, cfg.seed, i))
        .collect();
    let n = values.len() as f64;
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let raw_mean = pairwise_sum(&re) / n;
    let sq: Vec<f64> = re.iter().map(|x| (x - raw_mean).powi(2)).collect();
    let var = if values.len() > 1 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
    let raw_stderr = (var / n).sqrt();
    let mu_sum: f64 = g.mu_plus().iter().sum();
    let scale = mu_sum.powf(w.len() as f64 / 2.0);
    Ok(MCEstimate {
        mean: raw_mean * scale,
        stderr: raw_stderr * scale,
        raw_mean,
        raw_stderr,
        raw_imag_mean: pairwise_sum(&im) / n,
        scale,
        dims,
        samples: cfg.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_follow_the_weights() {
        let g = BipartiteGraph::path(5).unwrap();
        // Γ₊ = a1, a3, a5 with μ = 1, 2, 1 (δ = √3).
        assert_eq!(MCConfig::new(100, 1, 0).dims(&g).unwrap(), vec![50, 100, 50]);
        assert_eq!(MCConfig::new(1, 1, 0).dims(&g).unwrap(), vec![1, 1, 1]);
        assert!(matches!(MCConfig::new(0, 1, 0).dims(&g), Err(Error::Config(_))));
        assert!(matches!(MCConfig::new(10, 0, 0).dims(&g), Err(Error::Config(_))));
        assert!(matches!(MCConfig::new(MAX_MC_DIM + 1, 1, 0).dims(&g), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn samples_do_not_depend_on_scheduling() {
        let g = BipartiteGraph::single_edge();
        let w = LoopWord::power(&g, 0, 4).unwrap();
        let dims = vec![20];
        let a = sample_value(&w, &g, &dims, 0, 3, 5);
        let b = sample_value(&w, &g, &dims, 0, 3, 5);
        let c = sample_value(&w, &g, &dims, 0, 3, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.im.abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive_sum() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), xs.iter().sum::<f64>());
    }
}
