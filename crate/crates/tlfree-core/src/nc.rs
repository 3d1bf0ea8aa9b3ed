//! The lattice NC(n) of non-crossing partitions of {1, …, n}.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Default largest ground set that [`enumerate_nc`] will expand.
pub const DEFAULT_NC_CAP: usize = 12;

/// A non-crossing partition of {1, …, n} in canonical form.
///
/// Blocks are sorted ascending internally and ordered by their minimum, so
/// derived equality and ordering are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "NcRepr", into = "NcRepr")]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct NcRepr {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<NcRepr> for NCPartition {
    type Error = Error;
    fn try_from(r: NcRepr) -> Result<Self> {
        NCPartition::new(r.n, r.blocks)
    }
}

impl From<NCPartition> for NcRepr {
    fn from(p: NCPartition) -> Self {
        NcRepr { n: p.n, blocks: p.blocks }
    }
}

impl fmt::Debug for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl NCPartition {
    /// Validate and canonicalize. Rejects overlapping, missing,
    /// out-of-range or crossing blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::from_blocks_unchecked(n, blocks)?;
        if let Some((a, b, c, d)) = p.find_crossing() {
            return Err(Error::arg(format!("crossing blocks at {a} < {b} < {c} < {d}")));
        }
        Ok(p)
    }

    /// Canonicalize a set partition without testing the non-crossing
    /// property.
    fn from_blocks_unchecked(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut out = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::arg("empty block"));
            }
            b.sort_unstable();
            for &x in &b {
                if x == 0 || x > n {
                    return Err(Error::arg(format!("element {x} outside 1..={n}")));
                }
                if seen[x] {
                    return Err(Error::arg(format!("element {x} appears twice")));
                }
                seen[x] = true;
            }
            out.push(b);
        }
        if let Some(x) = (1..=n).find(|&x| !seen[x]) {
            return Err(Error::arg(format!("element {x} not covered")));
        }
        out.sort();
        Ok(Self { n, blocks: out })
    }

    /// Build from a block label per element (labels arbitrary).
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i + 1);
        }
        Self::new(labels.len(), groups.into_values().collect())
    }

    fn find_crossing(&self) -> Option<(usize, usize, usize, usize)> {
        let lab = self.labels();
        let n = self.n;
        // a < b < c < d with a,c in one block and b,d in another.
        for a in 1..=n {
            for c in a + 2..=n {
                if lab[a] != lab[c] {
                    continue;
                }
                for b in a + 1..c {
                    if lab[b] == lab[a] {
                        continue;
                    }
                    for d in c + 1..=n {
                        if lab[d] == lab[b] {
                            return Some((a, b, c, d));
                        }
                    }
                }
            }
        }
        None
    }

    /// The partition into singletons, 0ₙ.
    pub fn zero(n: usize) -> Self {
        Self { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    /// The one-block partition, 1ₙ.
    pub fn one(n: usize) -> Self {
        Self { n, blocks: if n == 0 { vec![] } else { vec![(1..=n).collect()] } }
    }

    /// Ground-set size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocks in canonical order.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of each element, indexed 1..=n (index 0 unused).
    pub fn labels(&self) -> Vec<usize> {
        let mut lab = vec![usize::MAX; self.n + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                lab[x] = i;
            }
        }
        lab
    }

    /// Sorted multiset of block sizes.
    pub fn block_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    /// A block of consecutive elements (every non-crossing partition has
    /// one), returned as (first element, size).
    pub fn interval_block(&self) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .find(|b| b[b.len() - 1] - b[0] + 1 == b.len())
            .map(|b| (b[0], b.len()))
    }

    /// Remove the elements of one block and relabel the rest to 1..n−|V|.
    pub fn remove_block(&self, idx: usize) -> Self {
        let removed = &self.blocks[idx];
        let mut map = vec![0; self.n + 1];
        let mut next = 0;
        for (x, slot) in map.iter_mut().enumerate().skip(1) {
            if removed.binary_search(&x).is_err() {
                next += 1;
                *slot = next;
            }
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, b)| b.iter().map(|&x| map[x]).collect())
            .collect();
        Self::from_blocks_unchecked(next, blocks).expect("relabeling preserves validity")
    }

    /// This partition as a permutation: each block is a cycle in increasing
    /// order. Index 0 unused.
    fn as_permutation(&self) -> Vec<usize> {
        let mut p = vec![0; self.n + 1];
        for b in &self.blocks {
            for (i, &x) in b.iter().enumerate() {
                p[x] = b[(i + 1) % b.len()];
            }
        }
        p
    }
}

fn check_same_n(a: &NCPartition, b: &NCPartition) -> Result<()> {
    if a.n != b.n {
        return Err(Error::arg(format!("ground sets differ: {} vs {}", a.n, b.n)));
    }
    Ok(())
}

/// All non-crossing partitions of {1..n}, canonical and sorted, with the
/// default cap.
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    enumerate_nc_with_cap(n, DEFAULT_NC_CAP)
}

/// All non-crossing partitions of {1..n}, failing if n exceeds `cap`.
pub fn enumerate_nc_with_cap(n: usize, cap: usize) -> Result<Vec<NCPartition>> {
    if n > cap {
        return Err(Error::ResourceLimit(format!("NC({n}) exceeds the cap {cap}")));
    }
    let mut out: Vec<NCPartition> = nc_on_interval(1, n)
        .into_iter()
        .map(|blocks| NCPartition::from_blocks_unchecked(n, blocks).expect("generated partition"))
        .collect();
    out.sort();
    Ok(out)
}

/// Non-crossing partitions of {lo..hi} (empty when lo > hi), as block lists.
fn nc_on_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo > hi {
        return vec![vec![]];
    }
    // The block of `lo` is {lo = a₀ < a₁ < … < a_s}; each gap between
    // consecutive elements, and the tail after a_s, is partitioned
    // independently.
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Vec<Vec<Vec<usize>>>)> = vec![(vec![lo], vec![vec![]])];
    while let Some((block, partials)) = stack.pop() {
        let last = *block.last().expect("nonempty");
        // Close the block here: the tail (last+1..hi) is free.
        let tails = nc_on_interval(last + 1, hi);
        for p in &partials {
            for t in &tails {
                let mut bl = p.clone();
                bl.push(block.clone());
                bl.extend(t.iter().cloned());
                out.push(bl);
            }
        }
        // Or extend the block to a later element, partitioning the gap.
        for next in last + 1..=hi {
            let gaps = nc_on_interval(last + 1, next - 1);
            let mut np = Vec::with_capacity(partials.len() * gaps.len());
            for p in &partials {
                for g in &gaps {
                    let mut bl = p.clone();
                    bl.extend(g.iter().cloned());
                    np.push(bl);
                }
            }
            let mut nb = block.clone();
            nb.push(next);
            stack.push((nb, np));
        }
    }
    out
}

/// The n-th Catalan number.
pub fn catalan(n: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..n {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

/// Refinement order: every block of σ lies inside a block of π.
pub fn leq(sigma: &NCPartition, pi: &NCPartition) -> Result<bool> {
    check_same_n(sigma, pi)?;
    let lab = pi.labels();
    Ok(sigma.blocks.iter().all(|b| b.iter().all(|&x| lab[x] == lab[b[0]])))
}

/// Least upper bound in NC(n): merge blocks that share elements, then keep
/// merging crossing blocks until the result is non-crossing.
pub fn join(sigma: &NCPartition, pi: &NCPartition) -> Result<NCPartition> {
    check_same_n(sigma, pi)?;
    let n = sigma.n;
    let mut uf = UnionFind::new(n + 1);
    for p in [sigma, pi] {
        for b in &p.blocks {
            for &x in &b[1..] {
                uf.union(b[0], x);
            }
        }
    }
    loop {
        let lab: Vec<usize> = (0..=n).map(|x| uf.find(x)).collect();
        let mut merged = false;
        'outer: for a in 1..=n {
            for b in a + 1..=n {
                if lab[b] == lab[a] {
                    continue;
                }
                for c in b + 1..=n {
                    if lab[c] != lab[a] {
                        continue;
                    }
                    for d in c + 1..=n {
                        if lab[d] == lab[b] {
                            uf.union(a, b);
                            merged = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let labels: Vec<usize> = (1..=n).map(|x| uf.find(x)).collect();
    NCPartition::from_labels(&labels)
}

/// Greatest lower bound: the common refinement.
pub fn meet(sigma: &NCPartition, pi: &NCPartition) -> Result<NCPartition> {
    check_same_n(sigma, pi)?;
    let (ls, lp) = (sigma.labels(), pi.labels());
    let n = sigma.n;
    let labels: Vec<usize> = (1..=n).map(|x| ls[x] * (n + 1) + lp[x]).collect();
    NCPartition::from_labels(&labels)
}

/// Kreweras complement: the permutation π⁻¹∘γ with γ = (1 2 … n), read as
/// a partition by its cycles.
pub fn kreweras(pi: &NCPartition) -> NCPartition {
    let n = pi.n;
    let p = pi.as_permutation();
    let mut inv = vec![0; n + 1];
    for x in 1..=n {
        inv[p[x]] = x;
    }
    let k: Vec<usize> = (0..=n).map(|x| if x == 0 { 0 } else { inv[x % n + 1] }).collect();
    let mut labels = vec![0; n];
    let mut seen = vec![false; n + 1];
    let mut next = 0;
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            labels[x - 1] = next;
            x = k[x];
        }
        next += 1;
    }
    NCPartition::from_labels(&labels).expect("Kreweras complement is non-crossing")
}

/// Merge the n consecutive groups of sizes m₁,…,mₙ according to π.
pub fn hat_embed(pi: &NCPartition, sizes: &[usize]) -> Result<NCPartition> {
    if sizes.len() != pi.n {
        return Err(Error::arg(format!("{} sizes for a partition of {}", sizes.len(), pi.n)));
    }
    if sizes.contains(&0) {
        return Err(Error::arg("group sizes must be positive"));
    }
    let lab = pi.labels();
    let mut labels = Vec::with_capacity(sizes.iter().sum());
    for (i, &s) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat(lab[i + 1]).take(s));
    }
    NCPartition::from_labels(&labels)
}

/// Möbius function of NC(n), evaluated by the defining recursion
/// μ(σ,σ) = 1, μ(σ,π) = −Σ_{σ ≤ ρ < π} μ(σ,ρ), with a per-table memo.
#[derive(Default, Debug)]
pub struct MobiusTable {
    memo: HashMap<(NCPartition, NCPartition), BigRational>,
    lattices: HashMap<usize, Vec<NCPartition>>,
}

impl MobiusTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// μ(σ, π). Fails unless σ ≤ π.
    pub fn mobius(&mut self, sigma: &NCPartition, pi: &NCPartition) -> Result<BigRational> {
        if !leq(sigma, pi)? {
            return Err(Error::arg(format!("{sigma:?} is not below {pi:?}")));
        }
        if let Some(v) = self.memo.get(&(sigma.clone(), pi.clone())) {
            return Ok(v.clone());
        }
        let n = sigma.n;
        if !self.lattices.contains_key(&n) {
            self.lattices.insert(n, enumerate_nc(n)?);
        }
        let lattice = &self.lattices[&n];
        // Interval elements, lowest first (more blocks = lower).
        let mut interval: Vec<&NCPartition> = lattice
            .iter()
            .filter(|r| leq(sigma, r).unwrap_or(false) && leq(r, pi).unwrap_or(false))
            .collect();
        interval.sort_by_key(|r| std::cmp::Reverse(r.len()));
        let mut mu: Vec<BigRational> = Vec::with_capacity(interval.len());
        for (i, r) in interval.iter().enumerate() {
            let v = if *r == sigma {
                BigRational::one()
            } else {
                let mut s = BigRational::zero();
                for (j, t) in interval[..i].iter().enumerate() {
                    if t != r && leq(t, r).unwrap_or(false) {
                        s += &mu[j];
                    }
                }
                -s
            };
            mu.push(v);
        }
        for (r, v) in interval.iter().zip(&mu) {
            self.memo.insert((sigma.clone(), (*r).clone()), v.clone());
        }
        Ok(self.memo[&(sigma.clone(), pi.clone())].clone())
    }
}

/// μ(σ, π) with a fresh memo table.
pub fn mobius(sigma: &NCPartition, pi: &NCPartition) -> Result<BigRational> {
    MobiusTable::new().mobius(sigma, pi)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
