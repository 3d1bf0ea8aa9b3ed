//! Temperley-Lieb diagrams as non-crossing perfect matchings of labelled
//! boundary points, with a single gluing primitive ([`Network`]) that
//! counts closed loops.
//!
//! A [`TLDiagram`] is a flat matching of points 1..N around a disc, read
//! clockwise from a marked point. Which points form the top, sides or bottom
//! of a box is decided by the calling code. As an element of the algebra
//! TL(m) (with N = 2m) the top points are 1..m from left to right and the
//! bottom points are m+1..2m from right to left.

use crate::combo::Combination;
use crate::nc::NCPartition;
use crate::scalar::{quantum_integer, DeltaRing, LaurentScalar, RationalFunctionScalar, Ring};
use crate::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Default upper bound on Jones-Wenzl sizes.
pub const DEFAULT_JW_CAP: usize = 6;

/// A non-crossing perfect matching of the points 1..N of a disc.
///
/// Internally `partner[i]` is the 0-based partner of the 0-based point i.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TLDiagram {
    partner: Vec<usize>,
}

impl fmt::Debug for TLDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.pairs())
    }
}

impl TLDiagram {
    /// Build from 1-based pairs on N points, checking that they form a
    /// non-crossing perfect matching.
    pub fn from_pairs(n_points: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let d = Self::matching_from_pairs(n_points, pairs)?;
        if !d.is_noncrossing() {
            return Err(Error::arg(format!("crossing pairs in {pairs:?}")));
        }
        Ok(d)
    }

    /// Build a perfect matching from 1-based pairs without the planarity
    /// test (used for intermediate closures).
    fn matching_from_pairs(n_points: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![usize::MAX; n_points];
        for &(a, b) in pairs {
            if a == 0 || b == 0 || a > n_points || b > n_points || a == b {
                return Err(Error::arg(format!("bad pair ({a},{b}) on {n_points} points")));
            }
            let (a, b) = (a - 1, b - 1);
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::arg(format!("point used twice in {pairs:?}")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if let Some(i) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::arg(format!("point {} unmatched", i + 1)));
        }
        Ok(Self { partner })
    }

    /// Build from a 0-based partner array, checking validity.
    pub fn from_partner(partner: Vec<usize>) -> Result<Self> {
        let n = partner.len();
        for (i, &p) in partner.iter().enumerate() {
            if p >= n || p == i || partner[p] != i {
                return Err(Error::arg(format!("partner array is not a matching at {i}")));
            }
        }
        let d = Self { partner };
        if !d.is_noncrossing() {
            return Err(Error::arg("crossing matching"));
        }
        Ok(d)
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<usize>) -> Self {
        debug_assert!(Self::from_partner(partner.clone()).is_ok());
        Self { partner }
    }

    /// The empty diagram on zero points.
    pub fn empty() -> Self {
        Self { partner: Vec::new() }
    }

    /// Number of boundary points N.
    pub fn n_points(&self) -> usize {
        self.partner.len()
    }

    /// N / 2, the strand count when viewed in TL(m).
    pub fn m(&self) -> usize {
        self.partner.len() / 2
    }

    /// 0-based partner of the 0-based point i.
    pub fn partner0(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// 1-based partner of the 1-based point p.
    pub fn partner(&self, p: usize) -> usize {
        self.partner[p - 1] + 1
    }

    /// The 0-based partner array.
    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Sorted 1-based pairs (i < j).
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, &p)| *i < p)
            .map(|(i, &p)| (i + 1, p + 1))
            .collect()
    }

    /// Whether no two pairs cross.
    pub fn is_noncrossing(&self) -> bool {
        let mut stack = Vec::new();
        for (i, &p) in self.partner.iter().enumerate() {
            if p > i {
                stack.push(i);
            } else if stack.pop() != Some(p) {
                return false;
            }
        }
        stack.is_empty()
    }

    /// Shift every label by −clicks modulo N, so point i moves to i − clicks.
    pub fn rotate(&self, clicks: i64) -> Self {
        let n = self.partner.len();
        if n == 0 {
            return self.clone();
        }
        let c = clicks.rem_euclid(n as i64) as usize;
        let mut partner = vec![0; n];
        for i in 0..n {
            let ni = (i + n - c) % n;
            partner[ni] = (self.partner[i] + n - c) % n;
        }
        Self { partner }
    }

    /// Mirror image: point p ↦ N + 1 − p.
    pub fn reflect(&self) -> Self {
        let n = self.partner.len();
        let mut partner = vec![0; n];
        for i in 0..n {
            partner[n - 1 - i] = n - 1 - self.partner[i];
        }
        Self { partner }
    }

    /// Replace each string by two parallel strings (point i becomes 2i−1, 2i).
    pub fn cable2(&self) -> Self {
        let n = self.partner.len();
        let mut partner = vec![0; 2 * n];
        for i in 0..n {
            let j = self.partner[i];
            partner[2 * i] = 2 * j + 1;
            partner[2 * i + 1] = 2 * j;
        }
        Self { partner }
    }

    /// Convert to the set partition of the points whose blocks are pairs.
    pub fn as_partition(&self) -> NCPartition {
        let labels: Vec<usize> = (0..self.partner.len()).map(|i| i.min(self.partner[i])).collect();
        NCPartition::from_labels(&labels).expect("non-crossing matching")
    }
}

/// The fattening of π ∈ NC(k): the TL(k) diagram whose block (i₁<…<i_s)
/// contributes (2i₁−1, 2i_s) and (2i_j, 2i_{j+1}−1).
pub fn fatten(pi: &NCPartition) -> TLDiagram {
    let mut pairs = Vec::with_capacity(pi.n());
    for b in pi.blocks() {
        let s = b.len();
        pairs.push((2 * b[0] - 1, 2 * b[s - 1]));
        for j in 0..s - 1 {
            pairs.push((2 * b[j], 2 * b[j + 1] - 1));
        }
    }
    TLDiagram::from_pairs(2 * pi.n(), &pairs).expect("fattening is non-crossing")
}

/// Doubling of every string; see [`TLDiagram::cable2`].
pub fn cable2(d: &TLDiagram) -> TLDiagram {
    d.cable2()
}

/// Rotation by clicks; see [`TLDiagram::rotate`].
pub fn rotate(d: &TLDiagram, clicks: i64) -> TLDiagram {
    d.rotate(clicks)
}

/// All non-crossing perfect matchings of N points, sorted.
pub fn all_matchings(n_points: usize) -> Vec<TLDiagram> {
    if n_points % 2 == 1 {
        return Vec::new();
    }
    let mut out: Vec<TLDiagram> = matchings_rec(0, n_points)
        .into_iter()
        .map(|pairs| {
            let mut partner = vec![0; n_points];
            for (a, b) in pairs {
                partner[a] = b;
                partner[b] = a;
            }
            TLDiagram { partner }
        })
        .collect();
    out.sort();
    out
}

fn matchings_rec(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo >= hi {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut j = lo + 1;
    while j < hi {
        let inner = matchings_rec(lo + 1, j);
        let outer = matchings_rec(j + 1, hi);
        for a in &inner {
            for b in &outer {
                let mut v = Vec::with_capacity(a.len() + b.len() + 1);
                v.push((lo, j));
                v.extend_from_slice(a);
                v.extend_from_slice(b);
                out.push(v);
            }
        }
        j += 2;
    }
    out
}

/// Number of cycles in the union of two perfect matchings of the same
/// points.
pub fn close_pair(d1: &TLDiagram, d2: &TLDiagram) -> Result<usize> {
    if d1.n_points() != d2.n_points() {
        return Err(Error::arg(format!(
            "matchings on {} and {} points",
            d1.n_points(),
            d2.n_points()
        )));
    }
    let n = d1.n_points();
    let mut seen = vec![false; n];
    let mut loops = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut x = start;
        loop {
            seen[x] = true;
            let y = d1.partner[x];
            seen[y] = true;
            x = d2.partner[y];
            if x == start {
                break;
            }
        }
    }
    Ok(loops)
}

/// Number of cycles in the union of two perfect matchings given as 0-based
/// partner arrays on the same points (no planarity required).
pub fn loops_of_partners(p1: &[usize], p2: &[usize]) -> Result<usize> {
    let n = p1.len();
    let is_matching = |p: &[usize]| p.iter().enumerate().all(|(i, &j)| j < n && j != i && p[j] == i);
    if p2.len() != n || !is_matching(p1) || !is_matching(p2) {
        return Err(Error::arg("loop count needs two perfect matchings on the same points"));
    }
    let mut seen = vec![false; n];
    let mut loops = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            seen[p1[x]] = true;
            x = p2[p1[x]];
        }
    }
    Ok(loops)
}

/// A planar network of strings between arbitrary node ids, resolved into a
/// matching of designated outer nodes and a count of closed loops.
///
/// Every outer node must carry exactly one string end and every other node
/// exactly two. This is the one primitive behind stacking, capping, side
/// closure and tangle substitution.
#[derive(Default, Clone, Debug)]
pub struct Network {
    edges: Vec<(usize, usize)>,
}

/// Result of resolving a [`Network`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    /// `partner[i]` is the index (into the outer list) matched to outer i.
    pub partner: Vec<usize>,
    /// Number of closed loops.
    pub loops: usize,
}

impl Resolved {
    /// The outer matching as a diagram (checked for planarity).
    pub fn diagram(&self) -> Result<TLDiagram> {
        TLDiagram::from_partner(self.partner.clone())
    }
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one string between nodes a and b.
    pub fn connect(&mut self, a: usize, b: usize) {
        self.edges.push((a, b));
    }

    /// Add every pair of a diagram, with node id `offset + i` for the
    /// 0-based point i.
    pub fn add_diagram(&mut self, d: &TLDiagram, offset: usize) {
        for (i, &p) in d.partner.iter().enumerate() {
            if i < p {
                self.edges.push((offset + i, offset + p));
            }
        }
    }

    /// Add every pair of a diagram, with node ids given by `ids[i]` for the
    /// 0-based point i.
    pub fn add_diagram_mapped(&mut self, d: &TLDiagram, ids: &[usize]) {
        for (i, &p) in d.partner.iter().enumerate() {
            if i < p {
                self.edges.push((ids[i], ids[p]));
            }
        }
    }

    /// Follow the strings and report the outer matching and loop count.
    pub fn resolve(&self, outer: &[usize]) -> Result<Resolved> {
        let mut inc: HashMap<usize, Vec<usize>> = HashMap::with_capacity(self.edges.len() * 2);
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            inc.entry(a).or_default().push(e);
            inc.entry(b).or_default().push(e);
        }
        let mut outer_index: HashMap<usize, usize> = HashMap::with_capacity(outer.len());
        for (i, &o) in outer.iter().enumerate() {
            if outer_index.insert(o, i).is_some() {
                return Err(Error::arg(format!("outer node {o} listed twice")));
            }
            if inc.get(&o).map_or(0, Vec::len) != 1 {
                return Err(Error::arg(format!("outer node {o} must have one string end")));
            }
        }
        for (node, es) in &inc {
            if !outer_index.contains_key(node) && es.len() != 2 {
                return Err(Error::arg(format!("inner node {node} has {} string ends", es.len())));
            }
        }
        let mut used = vec![false; self.edges.len()];
        let other = |e: usize, x: usize| -> usize {
            let (a, b) = self.edges[e];
            if a == x {
                b
            } else {
                a
            }
        };
        let mut partner = vec![usize::MAX; outer.len()];
        for (i, &o) in outer.iter().enumerate() {
            if partner[i] != usize::MAX {
                continue;
            }
            let mut e = inc[&o][0];
            let mut x = o;
            loop {
                used[e] = true;
                x = other(e, x);
                if let Some(&j) = outer_index.get(&x) {
                    partner[i] = j;
                    partner[j] = i;
                    break;
                }
                let es = &inc[&x];
                e = if es[0] == e { es[1] } else { es[0] };
            }
        }
        let mut loops = 0;
        for start in 0..self.edges.len() {
            if used[start] {
                continue;
            }
            loops += 1;
            let mut e = start;
            let mut x = self.edges[start].0;
            loop {
                used[e] = true;
                x = other(e, x);
                let es = &inc[&x];
                let next = if es[0] == e { es[1] } else { es[0] };
                if used[next] {
                    break;
                }
                e = next;
            }
        }
        Ok(Resolved { partner, loops })
    }
}

/// An element of TL(m): a linear combination of diagrams on 2m points.
#[derive(Clone, PartialEq, Eq)]
pub struct TLElement<S = LaurentScalar>
where
    S: Ring,
{
    m: usize,
    terms: Combination<TLDiagram, S>,
}

impl<S: Ring> fmt::Debug for TLElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TL({})[", self.m)?;
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})·{d:?}")?;
        }
        write!(f, "]")
    }
}

impl<S: Ring> TLElement<S> {
    /// The zero element of TL(m).
    pub fn zero(m: usize) -> Self {
        Self { m, terms: Combination::new() }
    }

    /// A single diagram with a coefficient.
    pub fn from_diagram(d: TLDiagram, c: S) -> Result<Self> {
        if d.n_points() % 2 != 0 {
            return Err(Error::arg("diagram with an odd number of points"));
        }
        Ok(Self { m: d.m(), terms: Combination::single(d, c) })
    }

    /// Assemble from (diagram, coefficient) terms on 2m points.
    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (TLDiagram, S)>) -> Result<Self> {
        let mut out = Self::zero(m);
        for (d, c) in terms {
            if d.n_points() != 2 * m {
                return Err(Error::arg(format!("diagram on {} points in TL({m})", d.n_points())));
            }
            out.terms.add_term(d, c);
        }
        Ok(out)
    }

    /// The identity of TL(m): top j joined to the bottom point below it.
    pub fn identity(m: usize) -> Self {
        Self { m, terms: Combination::basis(identity_diagram(m)) }
    }

    /// The cap generator Eᵢ (1 ≤ i < m) joining strands i and i+1.
    pub fn e_gen(m: usize, i: usize) -> Result<Self> {
        Ok(Self { m, terms: Combination::basis(e_diagram(m, i)?) })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &Combination<TLDiagram, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn coeff(&self, d: &TLDiagram) -> S {
        self.terms.coeff(d)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(Self { m: self.m, terms: self.terms.plus(&other.terms) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(Self { m: self.m, terms: self.terms.minus(&other.terms) })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { m: self.m, terms: self.terms.scale(c) }
    }

    fn check_m(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::arg(format!("TL({}) vs TL({})", self.m, other.m)));
        }
        Ok(())
    }

    /// Rotate every diagram.
    pub fn rotate(&self, clicks: i64) -> Self {
        Self { m: self.m, terms: self.terms.map_keys(|d| d.rotate(clicks)) }
    }

    /// Reflect every diagram.
    pub fn reflect(&self) -> Self {
        Self { m: self.m, terms: self.terms.map_keys(TLDiagram::reflect) }
    }

    /// Apply a coefficient map.
    pub fn map_coeffs<T: Ring>(&self, f: impl FnMut(&S) -> T) -> TLElement<T> {
        TLElement { m: self.m, terms: self.terms.map_coeffs(f) }
    }

    /// X ⊗ 1: add one through-strand on the right.
    pub fn tensor_one(&self) -> Self {
        Self { m: self.m + 1, terms: self.terms.map_keys(|d| tensor_one_diagram(d)) }
    }
}

impl<S: DeltaRing> TLElement<S> {
    /// Vertical product a∘b (a stacked over b) with δ per closed loop.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        let mut out = Self::zero(self.m);
        for (da, ca) in self.terms.iter() {
            for (db, cb) in other.terms.iter() {
                let (d, loops) = compose_diagrams(da, db);
                out.terms.add_term(d, ca.clone() * cb.clone() * S::delta_pow(loops as i64));
            }
        }
        Ok(out)
    }
}

/// TL(m) identity diagram.
pub fn identity_diagram(m: usize) -> TLDiagram {
    let pairs: Vec<(usize, usize)> = (1..=m).map(|j| (j, 2 * m + 1 - j)).collect();
    TLDiagram::from_pairs(2 * m, &pairs).expect("identity")
}

/// TL(m) cap generator Eᵢ.
pub fn e_diagram(m: usize, i: usize) -> Result<TLDiagram> {
    if i == 0 || i >= m {
        return Err(Error::arg(format!("E_{i} does not exist in TL({m})")));
    }
    let mut pairs = vec![(i, i + 1), (2 * m + 1 - i - 1, 2 * m + 1 - i)];
    for j in (1..=m).filter(|&j| j != i && j != i + 1) {
        pairs.push((j, 2 * m + 1 - j));
    }
    TLDiagram::from_pairs(2 * m, &pairs)
}

fn tensor_one_diagram(d: &TLDiagram) -> TLDiagram {
    let n = d.m();
    // Old top labels keep their number; old bottom label n+i becomes n+2+i;
    // the new strand joins top n+1 to bottom n+2.
    let map = |p: usize| if p <= n { p } else { p + 2 };
    let mut pairs: Vec<(usize, usize)> = d.pairs().into_iter().map(|(a, b)| (map(a), map(b))).collect();
    pairs.push((n + 1, n + 2));
    TLDiagram::from_pairs(2 * n + 2, &pairs).expect("tensoring keeps planarity")
}

/// Stack a over b in TL(m); returns the diagram and the loop count.
pub fn compose_diagrams(a: &TLDiagram, b: &TLDiagram) -> (TLDiagram, usize) {
    let m = a.m();
    let off = 2 * m;
    let mut net = Network::new();
    net.add_diagram(a, 0);
    net.add_diagram(b, off);
    // a's bottom point m+i (0-based m+i−1) meets b's top point m+1−i.
    for i in 1..=m {
        net.connect(m + i - 1, off + (m + 1 - i) - 1);
    }
    let outer: Vec<usize> = (0..m).chain(off + m..off + 2 * m).collect();
    let r = net.resolve(&outer).expect("well-formed stacking");
    (TLDiagram::from_partner_unchecked(r.partner), r.loops)
}

/// Diagram basis of TL(m).
pub fn tl_basis(m: usize) -> Vec<TLDiagram> {
    all_matchings(2 * m)
}

/// The Jones-Wenzl idempotent in TL(n) over ℚ(δ), by the Wenzl recursion,
/// with the default size cap.
pub fn jones_wenzl(n: usize) -> Result<TLElement<RationalFunctionScalar>> {
    jones_wenzl_with_cap(n, DEFAULT_JW_CAP)
}

/// The Jones-Wenzl idempotent with an explicit size cap.
pub fn jones_wenzl_with_cap(n: usize, cap: usize) -> Result<TLElement<RationalFunctionScalar>> {
    if n == 0 {
        return Err(Error::arg("Jones-Wenzl index must be positive"));
    }
    if n > cap {
        return Err(Error::ResourceLimit(format!("JW_{n} exceeds the cap {cap}")));
    }
    type R = RationalFunctionScalar;
    let mut jw = TLElement::<R>::identity(1);
    for k in 1..n {
        let base = jw.tensor_one();
        let e = TLElement::<R>::e_gen(k + 1, k)?;
        let ratio = R::from(quantum_integer(k)) / R::from(quantum_integer(k + 1));
        let sandwich = base.compose(&e)?.compose(&base)?;
        jw = base.sub(&sandwich.scale(&ratio))?;
    }
    Ok(jw)
}

/// Specialize a Jones-Wenzl coefficient table at a rational δ, failing on
/// a vanishing quantum-integer denominator.
pub fn specialize_rational_function(
    x: &TLElement<RationalFunctionScalar>,
    delta: &crate::scalar::Rational,
) -> Result<TLElement<crate::scalar::Rational>> {
    let terms = x.terms().try_map_coeffs(|c| c.eval(delta))?;
    Ok(TLElement { m: x.m(), terms })
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct TermRepr<S> {
    pairs: Vec<(usize, usize)>,
    coeff: S,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct ElementRepr<S> {
    m: usize,
    terms: Vec<TermRepr<S>>,
}

impl<S: Ring + Serialize> Serialize for TLElement<S> {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let repr = ElementRepr {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| TermRepr { pairs: d.pairs(), coeff: c.clone() })
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de, S: Ring + Serialize + DeserializeOwned> Deserialize<'de> for TLElement<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::<S>::deserialize(d)?;
        let mut out = TLElement::zero(repr.m);
        for t in repr.terms {
            let diag = TLDiagram::from_pairs(2 * repr.m, &t.pairs).map_err(D::Error::custom)?;
            out.terms.add_term(diag, t.coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nc::enumerate_nc;
    use num_traits::{One, Zero};

    type L = LaurentScalar;
    type R = RationalFunctionScalar;

    fn d(n: usize, pairs: &[(usize, usize)]) -> TLDiagram {
        TLDiagram::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn validation() {
        assert!(TLDiagram::from_pairs(4, &[(1, 3), (2, 4)]).is_err());
        assert!(TLDiagram::from_pairs(4, &[(1, 2)]).is_err());
        assert!(TLDiagram::from_pairs(4, &[(1, 2), (2, 3)]).is_err());
    }

    #[test]
    fn close_pair_examples() {
        let a = d(4, &[(1, 2), (3, 4)]);
        let b = d(4, &[(1, 4), (2, 3)]);
        assert_eq!(close_pair(&a, &b).unwrap(), 1);
        assert_eq!(close_pair(&a, &a).unwrap(), 2);
        assert_eq!(close_pair(&b, &b).unwrap(), 2);
        assert!(close_pair(&a, &d(2, &[(1, 2)])).is_err());
    }

    #[test]
    fn rotation_examples() {
        let a = d(4, &[(1, 2), (3, 4)]);
        assert_eq!(a.rotate(1), d(4, &[(2, 3), (4, 1)]));
        let b = d(6, &[(1, 6), (2, 3), (4, 5)]);
        assert_eq!(b.rotate(6), b);
        assert_eq!(b.rotate(1).rotate(-1), b);
        assert_eq!(b.rotate(1).partner(6), 5);
    }

    #[test]
    fn fatten_examples() {
        let pi = NCPartition::new(6, vec![vec![1, 4, 5], vec![2, 3], vec![6]]).unwrap();
        assert_eq!(
            fatten(&pi),
            d(12, &[(1, 10), (2, 7), (8, 9), (3, 6), (4, 5), (11, 12)])
        );
        assert_eq!(fatten(&NCPartition::one(1)), d(2, &[(1, 2)]));
        assert_eq!(fatten(&NCPartition::one(2)), d(4, &[(1, 4), (2, 3)]));
    }

    #[test]
    fn cable_examples() {
        assert_eq!(d(2, &[(1, 2)]).cable2(), d(4, &[(1, 4), (2, 3)]));
        assert_eq!(d(4, &[(1, 4), (2, 3)]).cable2(), d(8, &[(1, 8), (2, 7), (3, 6), (4, 5)]));
    }

    #[test]
    fn matchings_are_counted_by_catalan() {
        for (m, c) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 14), (5, 42)] {
            assert_eq!(tl_basis(m).len(), c);
        }
        assert!(tl_basis(4).iter().all(TLDiagram::is_noncrossing));
    }

    #[test]
    fn composition_examples() {
        let e = TLElement::<L>::e_gen(2, 1).unwrap();
        assert_eq!(e.terms().iter().next().unwrap().0, &d(4, &[(1, 2), (3, 4)]));
        assert_eq!(e.compose(&e).unwrap(), e.scale(&L::delta()));
        assert_eq!(TLElement::identity(2).compose(&e).unwrap(), e);
        let jw = jones_wenzl(2).unwrap();
        let er = TLElement::<R>::e_gen(2, 1).unwrap();
        assert!(er.compose(&jw).unwrap().is_zero());
    }

    #[test]
    fn jones_wenzl_two() {
        let jw = jones_wenzl(2).unwrap();
        let expected = TLElement::<R>::identity(2)
            .sub(&TLElement::e_gen(2, 1).unwrap().scale(&(R::one() / R::delta())))
            .unwrap();
        assert_eq!(jw, expected);
        assert_eq!(jw.compose(&jw).unwrap(), jw);
        assert_eq!(jones_wenzl(1).unwrap(), TLElement::identity(1));
        assert!(matches!(jones_wenzl(7), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn jones_wenzl_three_specialization() {
        let jw = jones_wenzl(3).unwrap();
        // [2]/[3] = δ/(δ²−1) has a pole at δ = 1.
        assert!(specialize_rational_function(&jw, &crate::scalar::rat(1, 1)).is_err());
        let s = specialize_rational_function(&jw, &crate::scalar::rat(2, 1)).unwrap();
        assert_eq!(s.coeff(&identity_diagram(3)), crate::scalar::rat(1, 1));
        assert!(!R::zero().is_one());
    }

    #[test]
    fn network_counts_loops() {
        let mut net = Network::new();
        net.connect(10, 11);
        net.connect(11, 10);
        net.connect(1, 20);
        net.connect(20, 2);
        let r = net.resolve(&[1, 2]).unwrap();
        assert_eq!(r.partner, vec![1, 0]);
        assert_eq!(r.loops, 1);
        assert!(net.resolve(&[1]).is_err());
    }

    #[test]
    fn kreweras_rotation_small() {
        for pi in enumerate_nc(4).unwrap() {
            assert_eq!(fatten(&crate::nc::kreweras(&pi)), fatten(&pi).rotate(1));
        }
    }

    #[test]
    fn json_format() {
        let e = TLElement::<L>::e_gen(2, 1).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"m":2,"terms":[{"pairs":[[1,2],[3,4]],"coeff":{"0":"1"}}]}"#);
        let back: TLElement<L> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
