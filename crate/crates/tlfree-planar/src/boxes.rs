//! Box elements of V_k(s,t) ⊂ Gr_k ⊠ Gr_k^op: diagrams on 4k + 2s + 2t
//! points with a top group of 2s, a bottom group of 2t and two side groups
//! of 2k points each.
//!
//! Flat order: `[left 2k, bottom to top][top 2s, left to right][right 2k,
//! top to bottom][bottom 2t, right to left]`. Under x ⊗ y^op the element x
//! occupies the upper half (top group and the upper side points) and y is
//! turned upside down into the lower half.

use crate::pa::{cap_pairing, Layout, PAElement, TSeries};
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt;
use tlfree_core::combo::Combination;
use tlfree_core::tl::{loops_of_partners, Network, TLDiagram, TLElement};
use tlfree_core::{DeltaRing, Error, LaurentScalar, Result, Ring};

/// Flat index bookkeeping for V_k(s,t).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxLayout {
    pub k: usize,
    pub s: usize,
    pub t: usize,
}

impl BoxLayout {
    pub fn new(k: usize, s: usize, t: usize) -> Self {
        Self { k, s, t }
    }

    pub fn n_points(self) -> usize {
        4 * self.k + 2 * self.s + 2 * self.t
    }

    /// i-th left point, 1-based from the bottom.
    pub fn left(self, i: usize) -> usize {
        i - 1
    }

    /// p-th top point, 1-based from the left.
    pub fn top(self, p: usize) -> usize {
        2 * self.k + p - 1
    }

    /// i-th right point, 1-based from the top.
    pub fn right(self, i: usize) -> usize {
        2 * self.k + 2 * self.s + i - 1
    }

    /// j-th bottom point, 1-based from the right.
    pub fn bottom(self, j: usize) -> usize {
        4 * self.k + 2 * self.s + j - 1
    }

    pub fn tops(self) -> impl Iterator<Item = usize> {
        (1..=2 * self.s).map(move |p| self.top(p))
    }

    pub fn bottoms(self) -> impl Iterator<Item = usize> {
        (1..=2 * self.t).map(move |j| self.bottom(j))
    }
}

/// One basis diagram of V_k(s,t). The group sizes are part of the key
/// because the diagram alone does not record where top ends and bottom
/// begins.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxKey {
    pub s: usize,
    pub t: usize,
    pub diagram: TLDiagram,
}

impl fmt::Debug for BoxKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({},{}){:?}", self.s, self.t, self.diagram)
    }
}

impl BoxKey {
    /// Check the point count against k, s, t.
    pub fn new(k: usize, s: usize, t: usize, diagram: TLDiagram) -> Result<Self> {
        let l = BoxLayout::new(k, s, t);
        if diagram.n_points() != l.n_points() {
            return Err(Error::arg(format!(
                "box V_{k}({s},{t}) needs {} points, got {}",
                l.n_points(),
                diagram.n_points()
            )));
        }
        Ok(Self { s, t, diagram })
    }

    pub fn layout(&self, k: usize) -> BoxLayout {
        BoxLayout::new(k, self.s, self.t)
    }
}

/// A finite combination of V_k(s,t) diagrams over varying s, t.
#[derive(Clone, PartialEq, Eq)]
pub struct BoxElement<S: Ring = LaurentScalar> {
    k: usize,
    terms: Combination<BoxKey, S>,
}

impl<S: Ring> fmt::Debug for BoxElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Box_{}[", self.k)?;
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})·{d:?}")?;
        }
        write!(f, "]")
    }
}

impl<S: Ring> BoxElement<S> {
    pub fn zero(k: usize) -> Self {
        Self { k, terms: Combination::new() }
    }

    pub fn from_key(k: usize, key: BoxKey, c: S) -> Self {
        Self { k, terms: Combination::single(key, c) }
    }

    /// c·d for a diagram of V_k(s,t).
    pub fn from_diagram(k: usize, s: usize, t: usize, d: TLDiagram, c: S) -> Result<Self> {
        Ok(Self::from_key(k, BoxKey::new(k, s, t, d)?, c))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &Combination<BoxKey, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn coeff(&self, key: &BoxKey) -> S {
        self.terms.coeff(key)
    }

    pub fn add_term(&mut self, key: BoxKey, c: S) {
        self.terms.add_term(key, c);
    }

    fn check_k(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::arg(format!("box side counts {} and {} differ", self.k, other.k)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        Ok(Self { k: self.k, terms: self.terms.plus(&other.terms) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        Ok(Self { k: self.k, terms: self.terms.minus(&other.terms) })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { k: self.k, terms: self.terms.scale(c) }
    }

    pub fn map_coeffs<T: Ring>(&self, f: impl FnMut(&S) -> T) -> BoxElement<T> {
        BoxElement { k: self.k, terms: self.terms.map_coeffs(f) }
    }

    pub fn try_map_coeffs<T: Ring>(&self, f: impl FnMut(&S) -> Result<T>) -> Result<BoxElement<T>> {
        Ok(BoxElement { k: self.k, terms: self.terms.try_map_coeffs(f)? })
    }

    /// The unit 1 ⊠ 1 = 1_k ⊗ 1_k^op.
    pub fn unit(k: usize) -> Self {
        let one = PAElement::<S>::unit(k);
        tensor(&one, &one).expect("units share k")
    }

    /// The involution: mirror the upper half and the lower half left to
    /// right, which maps x ⊗ y^op to x† ⊗ (y†)^op.
    pub fn dagger(&self) -> Self {
        let k = self.k;
        Self {
            k,
            terms: self.terms.map_keys(|key| BoxKey { s: key.s, t: key.t, diagram: dagger_box_diagram(k, key) }),
        }
    }
}

fn dagger_box_diagram(k: usize, key: &BoxKey) -> TLDiagram {
    let l = key.layout(k);
    let upper = 4 * k + 2 * key.s;
    let n = l.n_points();
    let map = |i: usize| if i < upper { upper - 1 - i } else { upper + (n - 1 - i) };
    let mut partner = vec![0; n];
    for i in 0..n {
        partner[map(i)] = map(key.diagram.partner0(i));
    }
    TLDiagram::from_partner(partner).expect("mirroring both halves keeps planarity")
}

/// x ⊗ y^op for x, y ∈ Gr_k, bilinear.
pub fn tensor<S: Ring>(x: &PAElement<S>, y: &PAElement<S>) -> Result<BoxElement<S>> {
    if x.k() != y.k() {
        return Err(Error::arg("tensor factors must share k"));
    }
    let k = x.k();
    let mut out = BoxElement::zero(k);
    for (dx, cx) in x.terms().iter() {
        for (dy, cy) in y.terms().iter() {
            out.add_term(tensor_diagrams(k, dx, dy)?, cx.clone() * cy.clone());
        }
    }
    Ok(out)
}

/// x ⊗ y^op on diagrams.
pub fn tensor_diagrams(k: usize, x: &TLDiagram, y: &TLDiagram) -> Result<BoxKey> {
    let lx = Layout::of(x, k)?;
    let ly = Layout::of(y, k)?;
    let b = BoxLayout::new(k, lx.n, ly.n);
    let mut xmap = vec![0; lx.n_points()];
    for i in 1..=k {
        xmap[lx.left(i)] = b.left(k + i);
        xmap[lx.right(i)] = b.right(i);
    }
    for p in 1..=2 * lx.n {
        xmap[lx.top(p)] = b.top(p);
    }
    let mut ymap = vec![0; ly.n_points()];
    for j in 1..=k {
        ymap[ly.left(j)] = b.right(k + j);
        ymap[ly.right(j)] = b.left(j);
    }
    for p in 1..=2 * ly.n {
        ymap[ly.top(p)] = b.bottom(p);
    }
    let mut partner = vec![0; b.n_points()];
    for i in 0..lx.n_points() {
        partner[xmap[i]] = xmap[x.partner0(i)];
    }
    for i in 0..ly.n_points() {
        partner[ymap[i]] = ymap[y.partner0(i)];
    }
    BoxKey::new(k, lx.n, ly.n, TLDiagram::from_partner(partner)?)
}

impl<S: DeltaRing> BoxElement<S> {
    /// The product of Gr_k ⊠ Gr_k^op: the right side of `self` is glued to
    /// the left side of `other`, so (x₁⊗y₁^op)(x₂⊗y₂^op) = x₁x₂ ⊗ (y₂y₁)^op.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        let mut out = Combination::new();
        for (a, ca) in self.terms.iter() {
            for (b, cb) in other.terms.iter() {
                let (key, loops) = box_wedge_diagrams(self.k, a, b)?;
                out.add_term(key, ca.clone() * cb.clone() * S::delta_pow(loops as i64));
            }
        }
        Ok(Self { k: self.k, terms: out })
    }

    /// Attach a TL(2k) element to the right side group: right point i
    /// meets point i of e, and point 4k+1−i of e becomes the new right
    /// point i.
    pub fn compose_right(&self, e: &TLElement<S>) -> Result<Self> {
        let k = self.k;
        if e.m() != 2 * k {
            return Err(Error::arg(format!("right action needs TL({}), got TL({})", 2 * k, e.m())));
        }
        let mut out = Combination::new();
        for (key, c) in self.terms.iter() {
            let l = key.layout(k);
            let off = l.n_points();
            for (d, ce) in e.terms().iter() {
                let mut net = Network::new();
                net.add_diagram(&key.diagram, 0);
                net.add_diagram(d, off);
                for i in 1..=2 * k {
                    net.connect(l.right(i), off + i - 1);
                }
                let mut outer: Vec<usize> = (1..=2 * k).map(|i| l.left(i)).collect();
                outer.extend(l.tops());
                outer.extend((1..=2 * k).map(|i| off + 4 * k - i));
                outer.extend(l.bottoms());
                let r = net.resolve(&outer)?;
                let nk = BoxKey::new(k, key.s, key.t, r.diagram()?)?;
                out.add_term(nk, c.clone() * ce.clone() * S::delta_pow(r.loops as i64));
            }
        }
        Ok(Self { k, terms: out })
    }
}

/// Box product on diagrams, returning the loop count.
pub fn box_wedge_diagrams(k: usize, a: &BoxKey, b: &BoxKey) -> Result<(BoxKey, usize)> {
    let la = a.layout(k);
    let lb = b.layout(k);
    let off = la.n_points();
    let mut net = Network::new();
    net.add_diagram(&a.diagram, 0);
    net.add_diagram(&b.diagram, off);
    for i in 1..=2 * k {
        net.connect(la.right(i), off + lb.left(2 * k + 1 - i));
    }
    let mut outer: Vec<usize> = (1..=2 * k).map(|i| la.left(i)).collect();
    outer.extend(la.tops());
    outer.extend(lb.tops().map(|p| off + p));
    outer.extend((1..=2 * k).map(|i| off + lb.right(i)));
    outer.extend(lb.bottoms().map(|p| off + p));
    outer.extend(la.bottoms());
    let r = net.resolve(&outer)?;
    Ok((BoxKey::new(k, la.s + lb.s, la.t + lb.t, r.diagram()?)?, r.loops))
}

/// Join left point i to right point 2k+1−i around the box. Returns the
/// matching of the remaining top and bottom points (indices: top 0..2s,
/// then bottom 2s..2s+2t) and the loop count.
pub fn box_side_close(k: usize, key: &BoxKey) -> Result<(Vec<usize>, usize)> {
    let l = key.layout(k);
    let mut net = Network::new();
    net.add_diagram(&key.diagram, 0);
    for i in 1..=2 * k {
        net.connect(l.left(i), l.right(2 * k + 1 - i));
    }
    let mut outer: Vec<usize> = l.tops().collect();
    outer.extend(l.bottoms());
    let r = net.resolve(&outer)?;
    Ok((r.partner, r.loops))
}

/// The side closure of a box diagram, split by whether any string joins the
/// top group to the bottom group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxClosure {
    /// No string joins top and bottom: the value factorizes into the
    /// pairings of the two groups, times δ^{factor}.
    Split { upper: TLDiagram, lower: TLDiagram, factor: i64 },
    /// Some string joins the groups: the value needs the coefficient forms
    /// of both caps. `partner` matches the points [top 0..2s, bottom ..].
    Joined { partner: Vec<usize>, n_top: usize, factor: i64 },
}

/// Close the sides of a box diagram and classify the result.
pub fn box_closure(k: usize, key: &BoxKey) -> Result<BoxClosure> {
    let (m, side_loops) = box_side_close(k, key)?;
    let ns = 2 * key.s;
    let factor = side_loops as i64 - 2 * k as i64;
    if (0..ns).any(|i| m[i] >= ns) {
        return Ok(BoxClosure::Joined { partner: m, n_top: ns, factor });
    }
    let upper = TLDiagram::from_partner(m[..ns].to_vec())?;
    let lower = TLDiagram::from_partner(m[ns..].iter().map(|&j| j - ns).collect())?;
    Ok(BoxClosure::Split { upper, lower, factor })
}

/// Value of a joined closure with caps `ts` on the top group and `tb` on the
/// bottom group (the δ^{factor} is not applied).
pub fn joined_closure_value(
    partner: &[usize],
    n_top: usize,
    ts: &TLElement<LaurentScalar>,
    tb: &TLElement<LaurentScalar>,
) -> Result<LaurentScalar> {
    let mut acc = LaurentScalar::zero();
    for (d1, c1) in ts.terms().iter() {
        let r1 = d1.reflect();
        for (d2, c2) in tb.terms().iter() {
            let r2 = d2.reflect();
            let mut cap = Vec::with_capacity(partner.len());
            cap.extend(r1.partners().iter().copied());
            cap.extend(r2.partners().iter().map(|&j| j + n_top));
            let loops = loops_of_partners(partner, &cap)?;
            acc += (c1 * c2).shift(loops as i64);
        }
    }
    Ok(acc)
}

/// τ_k ⊠ τ_k on one diagram, with independent capping series for the top
/// and the bottom group.
pub fn tau_box_diagram(k: usize, key: &BoxKey, top: &TSeries, bottom: &TSeries) -> Result<LaurentScalar> {
    let ts = top.get(key.s)?;
    let tb = bottom.get(key.t)?;
    match box_closure(k, key)? {
        BoxClosure::Split { upper, lower, factor } => {
            Ok((&cap_pairing(ts, &upper)? * &cap_pairing(tb, &lower)?).shift(factor))
        }
        BoxClosure::Joined { partner, n_top, factor } => Ok(joined_closure_value(&partner, n_top, ts, tb)?.shift(factor)),
    }
}

/// τ_k ⊠ τ_k(Q) = δ^{−2k} · (top capped by T_s, bottom by T_t, sides closed).
pub fn tau_box<S: Ring + From<LaurentScalar>>(q: &BoxElement<S>, t: &TSeries) -> Result<S> {
    tau_box_mixed(q, t, t)
}

/// τ ⊠ τ' with different series on the top and the bottom.
pub fn tau_box_mixed<S: Ring + From<LaurentScalar>>(
    q: &BoxElement<S>,
    top: &TSeries,
    bottom: &TSeries,
) -> Result<S> {
    let mut acc = S::zero();
    for (key, c) in q.terms().iter() {
        acc = acc + c.clone() * S::from(tau_box_diagram(q.k(), key, top, bottom)?);
    }
    Ok(acc)
}

/// Every diagram of V_k(s,t).
pub fn box_basis(k: usize, s: usize, t: usize) -> Vec<BoxKey> {
    tlfree_core::tl::all_matchings(BoxLayout::new(k, s, t).n_points())
        .into_iter()
        .map(|d| BoxKey { s, t, diagram: d })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct BoxGroups {
    left: usize,
    top: usize,
    right: usize,
    bottom: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct BoxTermRepr<S> {
    pairs: Vec<(usize, usize)>,
    groups: BoxGroups,
    coeff: S,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct BoxRepr<S> {
    k: usize,
    terms: Vec<BoxTermRepr<S>>,
}

impl<S: Ring + Serialize> Serialize for BoxElement<S> {
    fn serialize<Se: serde::Serializer>(&self, serializer: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let k = self.k;
        let terms = self
            .terms
            .iter()
            .map(|(key, c)| BoxTermRepr {
                pairs: key.diagram.pairs(),
                groups: BoxGroups { left: 2 * k, top: 2 * key.s, right: 2 * k, bottom: 2 * key.t },
                coeff: c.clone(),
            })
            .collect();
        BoxRepr { k, terms }.serialize(serializer)
    }
}

impl<'de, S: Ring + Serialize + DeserializeOwned> Deserialize<'de> for BoxElement<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = BoxRepr::<S>::deserialize(deserializer)?;
        let k = repr.k;
        let mut out = BoxElement::zero(k);
        for t in repr.terms {
            let g = &t.groups;
            if g.left != 2 * k || g.right != 2 * k || g.top % 2 != 0 || g.bottom % 2 != 0 {
                return Err(D::Error::custom("box group sizes do not match k"));
            }
            let n = g.left + g.top + g.right + g.bottom;
            let d = TLDiagram::from_pairs(n, &t.pairs).map_err(D::Error::custom)?;
            let key = BoxKey::new(k, g.top / 2, g.bottom / 2, d).map_err(D::Error::custom)?;
            out.add_term(key, t.coeff);
        }
        Ok(out)
    }
}
