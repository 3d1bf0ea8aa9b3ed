//! The graded algebras Gr_k = ⊕ₙ P_{n,k} over Temperley-Lieb, traces built
//! from a capping series (T_m), conditional expectations, planar algebra
//! free cumulants, P-distributions and Gram positivity.
//!
//! A diagram of P_{n,k} is a [`TLDiagram`] on 2n + 2k points in the flat
//! order `[left side, bottom to top][top, left to right][right side, top to
//! bottom]`; see [`Layout`].

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt;
use tlfree_core::combo::Combination;
use tlfree_core::law::CumulantSeq;
use tlfree_core::linalg::is_psd;
use tlfree_core::nc::{enumerate_nc_with_cap, MobiusTable, NCPartition, DEFAULT_NC_CAP};
use tlfree_core::tl::{all_matchings, close_pair, fatten, Network, TLDiagram, TLElement};
use num_traits::Zero;
use tlfree_core::{DeltaRing, Error, LaurentScalar, Rational, Result, Ring};

/// Flat index bookkeeping for P_{n,k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    pub n: usize,
    pub k: usize,
}

impl Layout {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k }
    }

    /// Layout of a diagram viewed in Gr_k.
    pub fn of(d: &TLDiagram, k: usize) -> Result<Self> {
        let pts = d.n_points();
        if pts < 2 * k {
            return Err(Error::arg(format!("{pts} points cannot carry {k} side strings per side")));
        }
        Ok(Self::new((pts - 2 * k) / 2, k))
    }

    pub fn n_points(self) -> usize {
        2 * self.n + 2 * self.k
    }

    /// 0-based index of the i-th left side point (1-based, from the bottom).
    pub fn left(self, i: usize) -> usize {
        i - 1
    }

    /// 0-based index of the p-th top point (1-based, from the left).
    pub fn top(self, p: usize) -> usize {
        self.k + p - 1
    }

    /// 0-based index of the i-th right side point (1-based, from the top).
    pub fn right(self, i: usize) -> usize {
        self.k + 2 * self.n + i - 1
    }

    /// All top indices in order.
    pub fn tops(self) -> impl Iterator<Item = usize> {
        (1..=2 * self.n).map(move |p| self.top(p))
    }
}

/// An element of Gr_k: a finite combination of P_{n,k} diagrams, any n.
#[derive(Clone, PartialEq, Eq)]
pub struct PAElement<S: Ring = LaurentScalar> {
    k: usize,
    terms: Combination<TLDiagram, S>,
}

impl<S: Ring> fmt::Debug for PAElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gr_{}[", self.k)?;
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})·{d:?}")?;
        }
        write!(f, "]")
    }
}

impl<S: Ring> PAElement<S> {
    pub fn zero(k: usize) -> Self {
        Self { k, terms: Combination::new() }
    }

    /// c·d, checking that d fits Gr_k.
    pub fn from_diagram(k: usize, d: TLDiagram, c: S) -> Result<Self> {
        Layout::of(&d, k)?;
        Ok(Self { k, terms: Combination::single(d, c) })
    }

    /// The single diagram d with coefficient 1.
    pub fn basis(k: usize, d: TLDiagram) -> Result<Self> {
        Self::from_diagram(k, d, S::one())
    }

    pub fn from_terms(k: usize, terms: impl IntoIterator<Item = (TLDiagram, S)>) -> Result<Self> {
        let mut out = Self::zero(k);
        for (d, c) in terms {
            Layout::of(&d, k)?;
            out.terms.add_term(d, c);
        }
        Ok(out)
    }

    /// The unit 1_k: k parallel horizontal strings.
    pub fn unit(k: usize) -> Self {
        let partner = (0..2 * k).map(|i| 2 * k - 1 - i).collect();
        let d = TLDiagram::from_partner(partner).expect("parallel strings are planar");
        Self { k, terms: Combination::basis(d) }
    }

    pub fn k(&self) -> usize {
        self.k
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

    /// n of a diagram of this element.
    pub fn degree_of(&self, d: &TLDiagram) -> usize {
        (d.n_points() - 2 * self.k) / 2
    }

    /// Largest n present.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|d| self.degree_of(d)).max()
    }

    /// The P_{n,k} component.
    pub fn part(&self, n: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(d, _)| self.degree_of(d) == n)
            .map(|(d, c)| (d.clone(), c.clone()))
            .collect();
        Self { k: self.k, terms }
    }

    fn check_k(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::arg(format!("side counts {} and {} differ", self.k, other.k)));
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

    pub fn map_coeffs<T: Ring>(&self, f: impl FnMut(&S) -> T) -> PAElement<T> {
        PAElement { k: self.k, terms: self.terms.map_coeffs(f) }
    }

    pub fn try_map_coeffs<T: Ring>(&self, f: impl FnMut(&S) -> Result<T>) -> Result<PAElement<T>> {
        Ok(PAElement { k: self.k, terms: self.terms.try_map_coeffs(f)? })
    }

    /// Apply a diagram-level linear map into Gr_{k'}.
    pub fn map_diagrams(&self, k: usize, mut f: impl FnMut(&TLDiagram) -> TLDiagram) -> Self {
        Self { k, terms: self.terms.map_keys(|d| f(d)) }
    }

    /// The involution †: mirror every diagram left to right.
    pub fn dagger(&self) -> Self {
        self.map_diagrams(self.k, TLDiagram::reflect)
    }

    /// Inclusion Gr_k → Gr_{k+1}: one extra through-string at the bottom.
    pub fn include_up(&self) -> Self {
        self.map_diagrams(self.k + 1, include_up_diagram)
    }
}

impl<S: DeltaRing> PAElement<S> {
    /// The product ∧_k of horizontal concatenation.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        let mut out = Combination::new();
        for (a, ca) in self.terms.iter() {
            for (b, cb) in other.terms.iter() {
                let (d, loops) = wedge_diagrams(self.k, a, b)?;
                out.add_term(d, ca.clone() * cb.clone() * S::delta_pow(loops as i64));
            }
        }
        Ok(Self { k: self.k, terms: out })
    }

    /// x^∧p, with x^∧0 = 1_k.
    pub fn power(&self, p: usize) -> Result<Self> {
        let mut acc = Self::unit(self.k);
        for _ in 0..p {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }
}

/// Concatenate P_{n,k} and P_{m,k} diagrams, returning the P_{n+m,k}
/// diagram and the number of closed loops formed.
pub fn wedge_diagrams(k: usize, a: &TLDiagram, b: &TLDiagram) -> Result<(TLDiagram, usize)> {
    let la = Layout::of(a, k)?;
    let lb = Layout::of(b, k)?;
    let off = la.n_points();
    let mut net = Network::new();
    net.add_diagram(a, 0);
    net.add_diagram(b, off);
    for i in 1..=k {
        net.connect(la.right(i), off + lb.left(k + 1 - i));
    }
    let mut outer: Vec<usize> = (1..=k).map(|i| la.left(i)).collect();
    outer.extend(la.tops());
    outer.extend(lb.tops().map(|p| off + p));
    outer.extend((1..=k).map(|i| off + lb.right(i)));
    let r = net.resolve(&outer)?;
    Ok((r.diagram()?, r.loops))
}

/// Add a through-string under a Gr_k diagram, giving a Gr_{k+1} diagram.
pub fn include_up_diagram(d: &TLDiagram) -> TLDiagram {
    let n = d.n_points();
    let mut partner = vec![0; n + 2];
    partner[0] = n + 1;
    partner[n + 1] = 0;
    for i in 0..n {
        partner[i + 1] = d.partner0(i) + 1;
    }
    TLDiagram::from_partner(partner).expect("adding an outer string keeps planarity")
}

/// All P_{n,k} diagrams.
pub fn basis_diagrams(n: usize, k: usize) -> Vec<TLDiagram> {
    all_matchings(2 * n + 2 * k)
}

/// All P_{n,k} diagrams with n ≤ max_n, by increasing n.
pub fn basis_up_to(max_n: usize, k: usize) -> Vec<TLDiagram> {
    (0..=max_n).flat_map(|n| basis_diagrams(n, k)).collect()
}

/// ∪ ∈ P_{1,0}.
pub fn cup<S: Ring>() -> PAElement<S> {
    PAElement::basis(0, TLDiagram::from_pairs(2, &[(1, 2)]).expect("cup")).expect("cup fits Gr_0")
}

/// The x-variable of Gr₁: left side joined to the first top point and the
/// second top point joined to the right side.
pub fn x_variable<S: Ring>() -> PAElement<S> {
    PAElement::basis(1, TLDiagram::from_pairs(4, &[(1, 2), (3, 4)]).expect("x")).expect("x fits Gr_1")
}

/// The image of ∪ in Gr₁: a cup on top above one through-string.
pub fn embedded_cup<S: Ring>() -> PAElement<S> {
    cup::<S>().include_up()
}

/// The capping data T_0..T_D of a planar algebra trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TLElement<LaurentScalar>>", into = "Vec<TLElement<LaurentScalar>>")]
pub struct TSeries {
    t: Vec<TLElement<LaurentScalar>>,
}

impl TryFrom<Vec<TLElement<LaurentScalar>>> for TSeries {
    type Error = Error;
    fn try_from(t: Vec<TLElement<LaurentScalar>>) -> Result<Self> {
        Self::new(t)
    }
}

impl From<TSeries> for Vec<TLElement<LaurentScalar>> {
    fn from(t: TSeries) -> Self {
        t.t
    }
}

impl TSeries {
    /// Wrap T_0..T_D, checking strand counts and ρ²-invariance.
    pub fn new(t: Vec<TLElement<LaurentScalar>>) -> Result<Self> {
        for (m, tm) in t.iter().enumerate() {
            if tm.m() != m {
                return Err(Error::arg(format!("entry {m} has {} strands", tm.m())));
            }
            if tm.rotate(2) != *tm {
                return Err(Error::arg(format!("T_{m} is not invariant under two-click rotation")));
            }
        }
        if t.is_empty() {
            return Err(Error::arg("empty series"));
        }
        Ok(Self { t })
    }

    /// T_m = Σ_{π ∈ NC(m)} κ_π·fatten(π) for m ≤ depth of the cumulants.
    pub fn from_cumulants(k: &CumulantSeq<LaurentScalar>) -> Result<Self> {
        Self::from_cumulants_with_cap(k, DEFAULT_NC_CAP)
    }

    /// [`TSeries::from_cumulants`] with an explicit NC cap.
    pub fn from_cumulants_with_cap(k: &CumulantSeq<LaurentScalar>, cap: usize) -> Result<Self> {
        let mut t = vec![TLElement::identity(0)];
        for m in 1..=k.depth() {
            let terms = enumerate_nc_with_cap(m, cap)?
                .into_iter()
                .map(|pi| (fatten(&pi), k.multiplicative(&pi)));
            t.push(TLElement::from_terms(m, terms)?);
        }
        Self::new(t)
    }

    /// Largest m with T_m available.
    pub fn depth(&self) -> usize {
        self.t.len() - 1
    }

    /// T_m, or a truncation error beyond the depth.
    pub fn get(&self, m: usize) -> Result<&TLElement<LaurentScalar>> {
        self.t
            .get(m)
            .ok_or_else(|| Error::Truncation(format!("T_{m} requested, depth is {}", self.depth())))
    }

    pub fn elements(&self) -> &[TLElement<LaurentScalar>] {
        &self.t
    }
}

/// Value of capping the 2n points of d with T_n, where d's point p meets
/// label 2n+1−p of T_n.
pub fn cap_pairing(t: &TLElement<LaurentScalar>, d: &TLDiagram) -> Result<LaurentScalar> {
    if d.n_points() != 2 * t.m() {
        return Err(Error::arg(format!("{} points against T_{}", d.n_points(), t.m())));
    }
    let mut acc = LaurentScalar::zero();
    for (e, c) in t.terms().iter() {
        let loops = close_pair(d, &e.reflect())?;
        acc += c.shift(loops as i64);
    }
    Ok(acc)
}

/// Join left side point i to right side point k+1−i around the diagram,
/// leaving a matching of the top points and a loop count.
pub fn side_close(d: &TLDiagram, k: usize) -> Result<(TLDiagram, usize)> {
    let l = Layout::of(d, k)?;
    let mut net = Network::new();
    net.add_diagram(d, 0);
    for i in 1..=k {
        net.connect(l.left(i), l.right(k + 1 - i));
    }
    let outer: Vec<usize> = l.tops().collect();
    let r = net.resolve(&outer)?;
    Ok((r.diagram()?, r.loops))
}

/// τ_k on one diagram.
pub fn tau_diagram(d: &TLDiagram, k: usize, t: &TSeries) -> Result<LaurentScalar> {
    let (top, loops) = side_close(d, k)?;
    let v = cap_pairing(t.get(top.m())?, &top)?;
    Ok(v.shift(loops as i64 - k as i64))
}

/// τ_k(x): cap the top with T_n, close the sides around, weight δ^{loops−k}.
pub fn tau_k<S: Ring + From<LaurentScalar>>(x: &PAElement<S>, t: &TSeries) -> Result<S> {
    let mut acc = S::zero();
    for (d, c) in x.terms().iter() {
        acc = acc + c.clone() * S::from(tau_diagram(d, x.k(), t)?);
    }
    Ok(acc)
}

/// The conditional expectation onto P_{0,k}: cap the top with T_n and keep
/// the side strings.
pub fn cond_exp<S: Ring + From<LaurentScalar>>(x: &PAElement<S>, t: &TSeries) -> Result<PAElement<S>> {
    let k = x.k();
    let mut out = PAElement::zero(k);
    for (d, c) in x.terms().iter() {
        let l = Layout::of(d, k)?;
        let tn = t.get(l.n)?;
        let off = l.n_points();
        for (e, ce) in tn.terms().iter() {
            let mut net = Network::new();
            net.add_diagram(d, 0);
            net.add_diagram(e, off);
            for p in 1..=2 * l.n {
                net.connect(l.top(p), off + 2 * l.n - p);
            }
            let mut outer: Vec<usize> = (1..=k).map(|i| l.left(i)).collect();
            outer.extend((1..=k).map(|i| l.right(i)));
            let r = net.resolve(&outer)?;
            let coeff = c.clone() * S::from(ce.shift(r.loops as i64));
            out.terms.add_term(r.diagram()?, coeff);
        }
    }
    Ok(out)
}

/// Place a diagram on 2s points inside another on 2(m−s) points, starting
/// after the outer point `pos` (0-based count of outer points to its left).
pub fn insert_diagram(outer: &TLDiagram, inner: &TLDiagram, pos: usize) -> TLDiagram {
    let no = outer.n_points();
    let ni = inner.n_points();
    let shift_outer = |i: usize| if i < pos { i } else { i + ni };
    let mut partner = vec![0; no + ni];
    for i in 0..no {
        partner[shift_outer(i)] = shift_outer(outer.partner0(i));
    }
    for i in 0..ni {
        partner[pos + i] = pos + inner.partner0(i);
    }
    TLDiagram::from_partner(partner).expect("nesting planar diagrams stays planar")
}

/// Bilinear extension of [`insert_diagram`].
pub fn insert_element(
    outer: &TLElement<LaurentScalar>,
    inner: &TLElement<LaurentScalar>,
    pos: usize,
) -> Result<TLElement<LaurentScalar>> {
    let mut terms = Vec::new();
    for (a, ca) in outer.terms().iter() {
        for (b, cb) in inner.terms().iter() {
            terms.push((insert_diagram(a, b, pos), ca * cb));
        }
    }
    TLElement::from_terms(outer.m() + inner.m(), terms)
}

/// Multiplicative extension along a non-crossing partition: each block of
/// size s receives f(s), nested by repeatedly removing an interval block.
pub fn nest(
    sigma: &NCPartition,
    f: &mut impl FnMut(usize) -> Result<TLElement<LaurentScalar>>,
) -> Result<TLElement<LaurentScalar>> {
    let m = sigma.n();
    if m == 0 {
        return Ok(TLElement::identity(0));
    }
    if sigma.len() == 1 {
        return f(m);
    }
    let idx = sigma
        .blocks()
        .iter()
        .position(|b| b[b.len() - 1] - b[0] + 1 == b.len())
        .expect("a non-crossing partition has an interval block");
    let block = &sigma.blocks()[idx];
    let (first, s) = (block[0], block.len());
    let rest = nest(&sigma.remove_block(idx), f)?;
    insert_element(&rest, &f(s)?, 2 * (first - 1))
}

/// T_σ for σ ∈ NC(m).
pub fn t_sigma(sigma: &NCPartition, t: &TSeries) -> Result<TLElement<LaurentScalar>> {
    nest(sigma, &mut |s| t.get(s).cloned())
}

/// The planar algebra free cumulants κ^P_1..κ^P_D of a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaCumulants {
    kappa: Vec<TLElement<LaurentScalar>>,
}

impl PaCumulants {
    /// κ^P_m = Σ_{σ ∈ NC(m)} μ(σ, 1_m)·T_σ for 1 ≤ m ≤ max_m.
    pub fn compute(t: &TSeries, max_m: usize) -> Result<Self> {
        let mut table = MobiusTable::new();
        let mut kappa = vec![TLElement::identity(0)];
        for m in 1..=max_m {
            t.get(m)?;
            let top = NCPartition::one(m);
            let mut acc = TLElement::zero(m);
            for sigma in enumerate_nc_with_cap(m, DEFAULT_NC_CAP)? {
                let mu = table.mobius(&sigma, &top)?;
                let ts = t_sigma(&sigma, t)?;
                acc = acc.add(&ts.scale(&LaurentScalar::constant(mu)))?;
            }
            kappa.push(acc);
        }
        Ok(Self { kappa })
    }

    pub fn max_m(&self) -> usize {
        self.kappa.len() - 1
    }

    /// κ^P_m.
    pub fn get(&self, m: usize) -> Result<&TLElement<LaurentScalar>> {
        self.kappa
            .get(m)
            .ok_or_else(|| Error::Truncation(format!("κ^P_{m} not computed")))
    }

    /// κ^P_π, the nested product over the blocks of π.
    pub fn multiplicative(&self, pi: &NCPartition) -> Result<TLElement<LaurentScalar>> {
        nest(pi, &mut |s| self.get(s).cloned())
    }
}

/// κ^P_m for one m.
pub fn pa_cumulants(t: &TSeries, m: usize) -> Result<TLElement<LaurentScalar>> {
    Ok(PaCumulants::compute(t, m)?.get(m)?.clone())
}

/// Pair a TL(m) element against a P_{m,0} diagram as a top cap.
pub fn pair_element(t: &TLElement<LaurentScalar>, x: &PAElement<LaurentScalar>) -> Result<LaurentScalar> {
    if x.k() != 0 {
        return Err(Error::arg("capping pairs only Gr_0 elements"));
    }
    let mut acc = LaurentScalar::zero();
    for (d, c) in x.terms().iter() {
        if d.m() == t.m() {
            acc += c * &cap_pairing(t, d)?;
        }
    }
    Ok(acc)
}

/// ev_Y(a): every consecutive point pair (2i−1, 2i) on top of a ∈ Gr_0 is
/// joined to the side strings of a copy of Y ∈ Gr_1, whose top points
/// become the new top boundary.
pub fn ev<S: DeltaRing>(y: &PAElement<S>, a: &PAElement<S>) -> Result<PAElement<S>> {
    if y.k() != 1 || a.k() != 0 {
        return Err(Error::arg("ev needs Y in Gr_1 and a in Gr_0"));
    }
    let ys: Vec<(&TLDiagram, &S)> = y.terms().iter().collect();
    let mut out = PAElement::zero(0);
    for (d, c) in a.terms().iter() {
        let slots = d.m();
        let mut choice = vec![0usize; slots];
        if slots > 0 && ys.is_empty() {
            continue;
        }
        loop {
            let mut net = Network::new();
            net.add_diagram(d, 0);
            let mut off = d.n_points();
            let mut outer = Vec::new();
            let mut coeff = c.clone();
            for (i, &ci) in choice.iter().enumerate() {
                let (yd, yc) = ys[ci];
                let l = Layout::of(yd, 1)?;
                net.add_diagram(yd, off);
                net.connect(2 * i, off + l.left(1));
                net.connect(2 * i + 1, off + l.right(1));
                outer.extend(l.tops().map(|p| off + p));
                off += l.n_points();
                coeff = coeff * yc.clone();
            }
            let r = net.resolve(&outer)?;
            out.terms.add_term(r.diagram()?, coeff * S::delta_pow(r.loops as i64));
            if !advance(&mut choice, ys.len()) {
                break;
            }
        }
    }
    Ok(out)
}

/// Odometer step over {0..base}^len; false once every tuple was visited.
fn advance(choice: &mut [usize], base: usize) -> bool {
    for c in choice.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

/// τ^{(Y)}(a) = τ_0(ev_Y(a)).
pub fn eval_distribution(
    y: &PAElement<LaurentScalar>,
    a: &PAElement<LaurentScalar>,
    t: &TSeries,
) -> Result<LaurentScalar> {
    tau_k(&ev(y, a)?, t)
}

/// The usual multivariate free cumulant κ_n(x_1, …, x_n) of (Gr_0, τ_0),
/// by Möbius inversion of the moments τ_0(x_{i_1} ∧ ⋯ ∧ x_{i_r}) over NC(n).
pub fn gr0_free_cumulant(xs: &[PAElement<LaurentScalar>], t: &TSeries) -> Result<LaurentScalar> {
    let n = xs.len();
    if xs.iter().any(|x| x.k() != 0) {
        return Err(Error::arg("free cumulants of Gr_0 need k = 0 arguments"));
    }
    let mut table = MobiusTable::new();
    let top = NCPartition::one(n);
    let mut acc = LaurentScalar::zero();
    for pi in enumerate_nc_with_cap(n, DEFAULT_NC_CAP)? {
        let mu = table.mobius(&pi, &top)?;
        let mut prod = LaurentScalar::constant(mu);
        for block in pi.blocks() {
            let mut w = PAElement::unit(0);
            for &i in block {
                w = w.wedge(&xs[i - 1])?;
            }
            prod = &prod * &tau_k(&w, t)?;
        }
        acc += prod;
    }
    Ok(acc)
}

/// Σ_{π ∈ NC(m), π ∨ 0̂ = 1_m} κ^P_π[x_1 ∧ ⋯ ∧ x_n] for homogeneous
/// x_i ∈ P_{m_i}, where 0̂ groups the points of each x_i.
pub fn product_formula(xs: &[PAElement<LaurentScalar>], kp: &PaCumulants) -> Result<LaurentScalar> {
    let mut sizes = Vec::with_capacity(xs.len());
    let mut word = PAElement::unit(0);
    for x in xs {
        if x.k() != 0 {
            return Err(Error::arg("product formula needs k = 0 arguments"));
        }
        let degrees: std::collections::BTreeSet<usize> = x.terms().keys().map(|d| x.degree_of(d)).collect();
        match degrees.len() {
            0 => return Ok(LaurentScalar::zero()),
            1 => sizes.push(*degrees.iter().next().expect("one degree")),
            _ => return Err(Error::arg("product formula needs homogeneous arguments")),
        }
        word = word.wedge(x)?;
    }
    let m: usize = sizes.iter().sum();
    let zero_hat = tlfree_core::nc::hat_embed(&NCPartition::zero(xs.len()), &sizes)?;
    let one = NCPartition::one(m);
    let mut acc = LaurentScalar::zero();
    for pi in enumerate_nc_with_cap(m, DEFAULT_NC_CAP)? {
        if tlfree_core::nc::join(&pi, &zero_hat)? != one {
            continue;
        }
        acc += pair_element(&kp.multiplicative(&pi)?, &word)?;
    }
    Ok(acc)
}

/// Gram matrix [τ_k(x_i ∧ x_j†)] at δ = delta, with its PSD verdict.
pub fn gram_psd(
    basis: &[PAElement<LaurentScalar>],
    t: &TSeries,
    delta: &Rational,
) -> Result<(Vec<Vec<Rational>>, bool)> {
    if delta <= &Rational::zero() {
        return Err(Error::arg("δ must be positive"));
    }
    if let Some(b) = basis.iter().find(|b| b.k() != basis[0].k()) {
        return Err(Error::arg(format!("mixed side counts: {} vs {}", b.k(), basis[0].k())));
    }
    let mut g = Vec::with_capacity(basis.len());
    for xi in basis {
        let mut row = Vec::with_capacity(basis.len());
        for xj in basis {
            row.push(tau_k(&xi.wedge(&xj.dagger())?, t)?.eval(delta)?);
        }
        g.push(row);
    }
    let psd = is_psd(&g)?;
    Ok((g, psd))
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct TermRepr<S> {
    pairs: Vec<(usize, usize)>,
    groups: GroupSizes,
    coeff: S,
}

#[derive(Serialize, Deserialize)]
struct GroupSizes {
    left: usize,
    top: usize,
    right: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: DeserializeOwned"))]
struct ElementRepr<S> {
    k: usize,
    terms: Vec<TermRepr<S>>,
}

impl<S: Ring + Serialize> Serialize for PAElement<S> {
    fn serialize<Se: serde::Serializer>(&self, serializer: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(d, c)| TermRepr {
                pairs: d.pairs(),
                groups: GroupSizes { left: self.k, top: d.n_points() - 2 * self.k, right: self.k },
                coeff: c.clone(),
            })
            .collect();
        ElementRepr { k: self.k, terms }.serialize(serializer)
    }
}

impl<'de, S: Ring + Serialize + DeserializeOwned> Deserialize<'de> for PAElement<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::<S>::deserialize(deserializer)?;
        let mut out = PAElement::zero(repr.k);
        for t in repr.terms {
            if t.groups.left != repr.k || t.groups.right != repr.k || t.groups.top % 2 != 0 {
                return Err(D::Error::custom("group sizes do not match k"));
            }
            let n_points = t.groups.left + t.groups.top + t.groups.right;
            let d = TLDiagram::from_pairs(n_points, &t.pairs).map_err(D::Error::custom)?;
            out.terms.add_term(d, t.coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tlfree_core::law::{to_laurent, NamedLaw};
    use tlfree_core::scalar::rat;

    type P = PAElement<LaurentScalar>;

    fn semicircle(depth: usize) -> TSeries {
        TSeries::from_cumulants(&to_laurent(&NamedLaw::Semicircle.cumulants(depth))).unwrap()
    }

    fn delta(e: i64) -> LaurentScalar {
        LaurentScalar::delta_power(e)
    }

    #[test]
    fn wedge_bookkeeping() {
        let x: P = x_variable();
        let xx = x.wedge(&x).unwrap();
        let d = TLDiagram::from_pairs(6, &[(1, 2), (3, 4), (5, 6)]).unwrap();
        assert_eq!(xx, P::basis(1, d).unwrap());
        let c: P = cup();
        let cc = c.wedge(&c).unwrap();
        assert_eq!(cc, P::basis(0, TLDiagram::from_pairs(4, &[(1, 2), (3, 4)]).unwrap()).unwrap());
        assert_eq!(P::unit(1).wedge(&x).unwrap(), x);
        assert!(x.wedge(&c).is_err());
    }

    #[test]
    fn dagger_and_inclusion() {
        let x: P = x_variable();
        assert_eq!(x.dagger(), x);
        assert_eq!(P::unit(2).dagger(), P::unit(2));
        assert_eq!(P::unit(1).include_up(), P::unit(2));
        let e: P = embedded_cup();
        let d = TLDiagram::from_pairs(4, &[(1, 4), (2, 3)]).unwrap();
        assert_eq!(e, P::basis(1, d).unwrap());
    }

    #[test]
    fn semicircle_series() {
        let t = semicircle(4);
        let t2 = t.get(2).unwrap();
        assert_eq!(t2.terms().len(), 1);
        assert_eq!(t2.coeff(&TLDiagram::from_pairs(4, &[(1, 4), (2, 3)]).unwrap()), LaurentScalar::from(1));
        assert!(t.get(3).unwrap().is_zero());
        assert!(t.get(5).is_err());
        let fp = TSeries::from_cumulants(&to_laurent(&NamedLaw::FreePoisson.cumulants(2))).unwrap();
        assert_eq!(fp.get(2).unwrap().terms().len(), 2);
    }

    #[test]
    fn traces_of_small_elements() {
        let t = semicircle(8);
        let c: P = cup();
        assert_eq!(tau_k(&c.power(2).unwrap(), &t).unwrap(), delta(1));
        assert!(tau_k(&c, &t).unwrap().is_zero());
        assert_eq!(tau_k(&c.power(4).unwrap(), &t).unwrap(), delta(2).scale(&rat(2, 1)));
        let x: P = x_variable();
        assert_eq!(tau_k(&x.power(2).unwrap(), &t).unwrap(), delta(1));
        assert_eq!(tau_k(&P::unit(2), &t).unwrap(), LaurentScalar::from(1));
        assert!(matches!(tau_k(&c.power(9).unwrap(), &t), Err(Error::Truncation(_))));
    }

    #[test]
    fn conditional_expectation_basics() {
        let t = semicircle(4);
        assert_eq!(cond_exp(&P::unit(1), &t).unwrap(), P::unit(1));
        assert!(cond_exp(&x_variable::<LaurentScalar>(), &t).unwrap().is_zero());
        let x: P = x_variable();
        let e = cond_exp(&x.power(2).unwrap(), &t).unwrap();
        assert_eq!(tau_k(&e, &t).unwrap(), tau_k(&x.power(2).unwrap(), &t).unwrap());
    }

    #[test]
    fn planar_cumulants_of_semicircle() {
        let t = semicircle(4);
        let k = PaCumulants::compute(&t, 4).unwrap();
        assert!(k.get(1).unwrap().is_zero());
        assert_eq!(k.get(2).unwrap(), t.get(2).unwrap());
        assert!(k.get(4).unwrap().is_zero());
    }

    #[test]
    fn distribution_of_x_variable_is_tau() {
        let t = semicircle(6);
        let c: P = cup();
        let x: P = x_variable();
        for n in 0..=4 {
            let a = c.power(n).unwrap();
            assert_eq!(eval_distribution(&x, &a, &t).unwrap(), tau_k(&a, &t).unwrap());
            let scaled = x.scale(&LaurentScalar::from(3));
            let expect = tau_k(&a, &t).unwrap().scale(&rat(3i64.pow(n as u32), 1));
            assert_eq!(eval_distribution(&scaled, &a, &t).unwrap(), expect);
        }
        assert!(eval_distribution(&P::zero(1), &c.power(2).unwrap(), &t).unwrap().is_zero());
    }

    #[test]
    fn gram_examples() {
        let t = semicircle(4);
        let c: P = cup();
        let (g, psd) = gram_psd(&[P::unit(0), c.clone()], &t, &rat(2, 1)).unwrap();
        assert!(psd);
        assert_eq!(g, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(2, 1)]]);
        let (g, psd) = gram_psd(&[P::unit(0), c.clone(), c.power(2).unwrap()], &t, &rat(2, 1)).unwrap();
        assert!(psd);
        assert_eq!(g[2][2], rat(8, 1));
    }

    #[test]
    fn element_json_roundtrip() {
        let x: P = x_variable::<LaurentScalar>().scale(&LaurentScalar::delta());
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains(r#""groups":{"left":1,"top":2,"right":1}"#));
        let y: P = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
