//! Free Gibbs states τ_V for V = ½·(doubled cup) + Σ tᵢWᵢ as formal power
//! series in the couplings: an order-by-order Schwinger-Dyson solver, the
//! SD residual, and a brute-force enumeration of 2-cabled tangles used as an
//! oracle for small cases.

use crate::boxes::{box_closure, joined_closure_value, BoxClosure, BoxElement, BoxKey};
use crate::calc::{cyclic_gradient, diff_quotient, diff_quotient_diagram, symmetrizer, Pairing};
use crate::pa::{basis_diagrams, cap_pairing, insert_element, side_close, wedge_diagrams, x_variable, PAElement, TSeries};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use tlfree_core::law::{to_laurent, NamedLaw};
use tlfree_core::linalg::{invert, LinearSystem, SparseRow};
use tlfree_core::nc::{enumerate_nc, NCPartition};
use tlfree_core::scalar::rat;
use tlfree_core::tl::{close_pair, Network, TLDiagram, TLElement};
use tlfree_core::{DeltaRing, Error, LaurentScalar, Rational, RationalFunctionScalar, Result};

/// Exponents of the couplings t₁, …, t_k in one monomial.
pub type MultiIndex = Vec<usize>;

/// Largest diagram depth accepted by [`solve_sd`].
pub const MAX_GIBBS_DEPTH: usize = 10;
/// Largest total coupling degree accepted by [`solve_sd`].
pub const MAX_T_DEGREE: usize = 4;
/// Largest TL(m) whose meander Gram matrix is inverted to recover
/// coefficient forms.
pub const GRAM_CAP: usize = 6;
/// Most boxes a brute-force tangle may contain.
pub const ORACLE_MAX_BOXES: usize = 2;
/// Most legs (cable ends) a brute-force enumeration may pool.
pub const ORACLE_MAX_LEGS: usize = 14;
/// Each box of coupling tᵢ contributes −tᵢ, as in the expansion of e^{−V}.
pub const TANGLE_SIGN: i64 = -1;

fn total(a: &[usize]) -> usize {
    a.iter().sum()
}

/// All multi-indices in `n_vars` variables of total degree ≤ `max_total`,
/// ordered by total degree and then lexicographically.
pub fn multi_indices(n_vars: usize, max_total: usize) -> Vec<MultiIndex> {
    fn rec(prefix: &mut MultiIndex, left: usize, budget: usize, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n_vars), n_vars, max_total, &mut out);
    out.sort_by(|a, b| total(a).cmp(&total(b)).then_with(|| b.cmp(a)));
    out
}

/// All (β, γ) with β + γ = α.
fn splits(alpha: &[usize]) -> Vec<(MultiIndex, MultiIndex)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a + 1));
        for (b, g) in &out {
            for x in 0..=a {
                let (mut b2, mut g2) = (b.clone(), g.clone());
                b2.push(x);
                g2.push(a - x);
                next.push((b2, g2));
            }
        }
        out = next;
    }
    out
}

fn minus_unit(alpha: &[usize], i: usize) -> Option<MultiIndex> {
    (alpha[i] > 0).then(|| {
        let mut b = alpha.to_vec();
        b[i] -= 1;
        b
    })
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k, 1))
}

fn format_order(alpha: &[usize]) -> String {
    format!("{alpha:?}")
}

/// A truncated power series in the couplings with Laurent coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    variables: Vec<String>,
    truncation: usize,
    coeffs: BTreeMap<MultiIndex, LaurentScalar>,
}

impl FormalSeries {
    pub fn zero(variables: Vec<String>, truncation: usize) -> Self {
        Self { variables, truncation, coeffs: BTreeMap::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Highest total degree kept.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coeff(&self, alpha: &[usize]) -> LaurentScalar {
        self.coeffs.get(alpha).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    /// Add c·t^α, checking the index length and the truncation.
    pub fn add_at(&mut self, alpha: MultiIndex, c: LaurentScalar) -> Result<()> {
        if alpha.len() != self.variables.len() {
            return Err(Error::arg(format!("order {alpha:?} for {} variables", self.variables.len())));
        }
        if total(&alpha) > self.truncation {
            return Err(Error::Truncation(format!("order {alpha:?} beyond degree {}", self.truncation)));
        }
        let entry = self.coeffs.entry(alpha).or_insert_with(LaurentScalar::zero);
        *entry += c;
        self.coeffs.retain(|_, v| !v.is_zero());
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &LaurentScalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.variables != other.variables || self.truncation != other.truncation {
            return Err(Error::arg("series over different couplings"));
        }
        let mut out = self.clone();
        for (a, c) in other.terms() {
            out.add_at(a.clone(), -c.clone())?;
        }
        Ok(out)
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, &e) in self.variables.iter().zip(a) {
                match e {
                    0 => {}
                    1 => write!(f, "·{name}")?,
                    _ => write!(f, "·{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesTerm {
    order: MultiIndex,
    coeff: LaurentScalar,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    variables: Vec<String>,
    truncation: usize,
    terms: Vec<SeriesTerm>,
}

impl Serialize for FormalSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            variables: self.variables.clone(),
            truncation: self.truncation,
            terms: self.coeffs.iter().map(|(a, c)| SeriesTerm { order: a.clone(), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SeriesRepr::deserialize(d)?;
        let mut out = FormalSeries::zero(r.variables, r.truncation);
        for t in r.terms {
            out.add_at(t.order, t.coeff).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// One coupling tᵢ·Wᵢ of a potential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coupling {
    pub name: String,
    #[serde(rename = "W")]
    pub w: TLElement<LaurentScalar>,
}

/// V = ½·(doubled cup) + Σ tᵢWᵢ with each Wᵢ ∈ TL(nᵢ) cyclically
/// symmetrized and made self-adjoint on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    couplings: Vec<Coupling>,
    gradients: Vec<PAElement<LaurentScalar>>,
}

/// ½(𝒮W + (𝒮W)†).
pub fn symmetrize_potential(w: &TLElement<LaurentScalar>) -> Result<TLElement<LaurentScalar>> {
    let x = PAElement::from_terms(0, w.terms().iter().map(|(d, c)| (d.clone(), c.clone())))?;
    let s = symmetrizer(&x)?;
    let half = LaurentScalar::constant(rat(1, 2));
    let sym = s.add(&s.dagger())?.scale(&half);
    TLElement::from_terms(w.m(), sym.terms().iter().map(|(d, c)| (d.clone(), c.clone())))
}

/// The 2-cabled quartic: cable2 of the TL(2) element with two adjacent caps.
pub fn quartic_cable() -> TLElement<LaurentScalar> {
    let d = TLDiagram::from_pairs(4, &[(1, 2), (3, 4)]).expect("valid pairs");
    TLElement::from_diagram(d.cable2(), LaurentScalar::one()).expect("strand count matches")
}

impl Potential {
    pub fn new(couplings: impl IntoIterator<Item = (String, TLElement<LaurentScalar>)>) -> Result<Self> {
        let mut out = Vec::new();
        let mut gradients = Vec::new();
        for (name, w) in couplings {
            if out.iter().any(|c: &Coupling| c.name == name) {
                return Err(Error::arg(format!("coupling {name:?} listed twice")));
            }
            if w.m() == 0 {
                return Err(Error::arg(format!("coupling {name:?} is a constant")));
            }
            let w = symmetrize_potential(&w)?;
            if w.is_zero() {
                return Err(Error::arg(format!("coupling {name:?} symmetrizes to zero")));
            }
            let x = PAElement::from_terms(0, w.terms().iter().map(|(d, c)| (d.clone(), c.clone())))?;
            gradients.push(cyclic_gradient(&x)?);
            out.push(Coupling { name, w });
        }
        Ok(Self { couplings: out, gradients })
    }

    /// V = ½·(doubled cup), no couplings.
    pub fn quadratic() -> Self {
        Self { couplings: Vec::new(), gradients: Vec::new() }
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn names(&self) -> Vec<String> {
        self.couplings.iter().map(|c| c.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    /// nᵢ, the number of strand pairs of Wᵢ.
    pub fn degree(&self, i: usize) -> usize {
        self.couplings[i].w.m()
    }

    /// 𝒟Wᵢ ∈ Gr₁.
    pub fn gradient(&self, i: usize) -> &PAElement<LaurentScalar> {
        &self.gradients[i]
    }
}

#[derive(Deserialize)]
struct CouplingRepr {
    name: String,
    #[serde(rename = "W")]
    w: TLElement<LaurentScalar>,
}

#[derive(Deserialize)]
struct PotentialRepr {
    couplings: Vec<CouplingRepr>,
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            couplings: &'a [Coupling],
        }
        Out { couplings: &self.couplings }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PotentialRepr::deserialize(d)?;
        Potential::new(r.couplings.into_iter().map(|c| (c.name, c.w))).map_err(D::Error::custom)
    }
}

/// The order-α part of a trace: pairing values ⟨T^{(α)}_m, d⟩ for m ≤ depth
/// and coefficient forms of T^{(α)}_m for m ≤ the coefficient depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSlice {
    depth: usize,
    pairings: Vec<BTreeMap<TLDiagram, LaurentScalar>>,
    coeffs: Vec<TLElement<LaurentScalar>>,
}

impl OrderSlice {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn coefficient_depth(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// A P-trace given order by order in the couplings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GibbsTrace {
    variables: Vec<String>,
    depth: usize,
    truncation: usize,
    orders: BTreeMap<MultiIndex, OrderSlice>,
}

fn zero_index(n: usize) -> MultiIndex {
    vec![0; n]
}

impl GibbsTrace {
    /// A trace that is constant in the couplings: T at order 0, zero above.
    pub fn from_series(t: &TSeries, variables: Vec<String>, truncation: usize) -> Result<Self> {
        let mut pairings = Vec::with_capacity(t.depth() + 1);
        for (m, tm) in t.elements().iter().enumerate() {
            let mut map = BTreeMap::new();
            for d in basis_diagrams(m, 0) {
                let v = cap_pairing(tm, &d)?;
                if !v.is_zero() {
                    map.insert(d, v);
                }
            }
            pairings.push(map);
        }
        let slice = OrderSlice { depth: t.depth(), pairings, coeffs: t.elements().to_vec() };
        let mut orders = BTreeMap::new();
        orders.insert(zero_index(variables.len()), slice);
        Ok(Self { variables, depth: t.depth(), truncation, orders })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Diagram depth requested for order 0.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Highest total coupling degree.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// The stored order, or None when that order is identically zero.
    pub fn slice(&self, alpha: &[usize]) -> Option<&OrderSlice> {
        self.orders.get(alpha)
    }

    /// Diagram depth reached at order α (None: identically zero).
    pub fn order_depth(&self, alpha: &[usize]) -> Option<usize> {
        self.orders.get(alpha).map(|s| s.depth)
    }

    fn check_order(&self, alpha: &[usize]) -> Result<()> {
        if alpha.len() != self.variables.len() {
            return Err(Error::arg(format!("order {alpha:?} for {} couplings", self.variables.len())));
        }
        if total(alpha) > self.truncation {
            return Err(Error::Truncation(format!("order {alpha:?} beyond degree {}", self.truncation)));
        }
        Ok(())
    }

    /// ⟨T^{(α)}_m, d⟩ for a TL(m) diagram d.
    pub fn pairing(&self, alpha: &[usize], d: &TLDiagram) -> Result<LaurentScalar> {
        self.check_order(alpha)?;
        let Some(slice) = self.orders.get(alpha) else {
            return Ok(LaurentScalar::zero());
        };
        let m = d.m();
        if m > slice.depth {
            return Err(Error::Truncation(format!(
                "order {} solved to depth {}, T_{m} requested",
                format_order(alpha),
                slice.depth
            )));
        }
        Ok(slice.pairings[m].get(d).cloned().unwrap_or_else(LaurentScalar::zero))
    }

    /// ⟨T^{(t)}_m, d⟩ as a series.
    pub fn pairing_series(&self, d: &TLDiagram) -> Result<FormalSeries> {
        let mut out = FormalSeries::zero(self.variables.clone(), self.truncation);
        for alpha in multi_indices(self.variables.len(), self.truncation) {
            let v = self.pairing(&alpha, d)?;
            out.add_at(alpha, v)?;
        }
        Ok(out)
    }

    /// Coefficient form of T^{(α)}_m.
    pub fn coefficients(&self, alpha: &[usize], m: usize) -> Result<TLElement<LaurentScalar>> {
        self.check_order(alpha)?;
        let Some(slice) = self.orders.get(alpha) else {
            return Ok(TLElement::zero(m));
        };
        slice.coeffs.get(m).cloned().ok_or_else(|| {
            Error::Truncation(format!(
                "coefficients of order {} known to degree {}, T_{m} requested",
                format_order(alpha),
                slice.coefficient_depth()
            ))
        })
    }

    /// The coefficient forms of order α as a capping series.
    pub fn order_series(&self, alpha: &[usize]) -> Result<TSeries> {
        self.check_order(alpha)?;
        match self.orders.get(alpha) {
            Some(slice) => TSeries::new(slice.coeffs.clone()),
            None => TSeries::new((0..=self.depth).map(TLElement::zero).collect()),
        }
    }

    /// τ^{(α)}_k(x).
    pub fn tau_order(&self, x: &PAElement<LaurentScalar>, alpha: &[usize]) -> Result<LaurentScalar> {
        let mut acc = LaurentScalar::zero();
        for (d, c) in x.terms().iter() {
            let (top, loops) = side_close(d, x.k())?;
            acc += c * &self.pairing(alpha, &top)?.shift(loops as i64 - x.k() as i64);
        }
        Ok(acc)
    }

    /// τ_k(x) as a series.
    pub fn tau(&self, x: &PAElement<LaurentScalar>) -> Result<FormalSeries> {
        let mut out = FormalSeries::zero(self.variables.clone(), self.truncation);
        for alpha in multi_indices(self.variables.len(), self.truncation) {
            let v = self.tau_order(x, &alpha)?;
            out.add_at(alpha, v)?;
        }
        Ok(out)
    }

    /// τ^{(β)} ⊠ τ^{(γ)} on one box diagram over Gr₁.
    pub fn box_order(&self, key: &BoxKey, beta: &[usize], gamma: &[usize]) -> Result<LaurentScalar> {
        match box_closure(1, key)? {
            BoxClosure::Split { upper, lower, factor } => {
                let a = self.pairing(beta, &upper)?;
                if a.is_zero() {
                    return Ok(a);
                }
                Ok((&a * &self.pairing(gamma, &lower)?).shift(factor))
            }
            BoxClosure::Joined { partner, n_top, factor } => {
                let ts = self.coefficients(beta, key.s)?;
                let tb = self.coefficients(gamma, key.t)?;
                Ok(joined_closure_value(&partner, n_top, &ts, &tb)?.shift(factor))
            }
        }
    }

    /// The order-α coefficient of (τ ⊠ τ)(Q) = Σ_{β+γ=α} τ^{(β)} ⊠ τ^{(γ)}(Q).
    pub fn tau_box_order(&self, q: &BoxElement<LaurentScalar>, alpha: &[usize]) -> Result<LaurentScalar> {
        let mut acc = LaurentScalar::zero();
        for (beta, gamma) in splits(alpha) {
            for (key, c) in q.terms().iter() {
                acc += c * &self.box_order(key, &beta, &gamma)?;
            }
        }
        Ok(acc)
    }

    /// τ₀(∪^{∧n}) for n = 0..=max_n as series.
    pub fn cup_moments(&self, max_n: usize) -> Result<Vec<FormalSeries>> {
        let c: PAElement<LaurentScalar> = crate::pa::cup();
        (0..=max_n).map(|n| self.tau(&c.power(n)?)).collect()
    }
}

fn laurent_of(v: RationalFunctionScalar, what: &str) -> Result<LaurentScalar> {
    v.to_laurent().ok_or_else(|| Error::arg(format!("{what} is not a Laurent polynomial: {v}")))
}

/// Inverse meander Gram matrices of TL(m), used to turn pairing values into
/// coefficient forms.
#[derive(Default)]
struct GramCache {
    inverses: HashMap<usize, (Vec<TLDiagram>, Vec<Vec<RationalFunctionScalar>>)>,
}

impl GramCache {
    fn coefficients(&mut self, m: usize, f: &BTreeMap<TLDiagram, LaurentScalar>) -> Result<TLElement<LaurentScalar>> {
        if m > GRAM_CAP {
            return Err(Error::ResourceLimit(format!("coefficient forms of TL({m}) exceed the cap {GRAM_CAP}")));
        }
        if !self.inverses.contains_key(&m) {
            let basis = basis_diagrams(m, 0);
            let mut g = Vec::with_capacity(basis.len());
            for d in &basis {
                let row = basis
                    .iter()
                    .map(|e| Ok(RationalFunctionScalar::delta_pow(close_pair(d, &e.reflect())? as i64)))
                    .collect::<Result<Vec<_>>>()?;
                g.push(row);
            }
            let inv = invert(&g, &format!("meander Gram matrix of TL({m})"))?;
            self.inverses.insert(m, (basis, inv));
        }
        let (basis, inv) = &self.inverses[&m];
        let values: Vec<RationalFunctionScalar> = basis
            .iter()
            .map(|d| RationalFunctionScalar::from_laurent(&f.get(d).cloned().unwrap_or_else(LaurentScalar::zero)))
            .collect();
        let mut terms = Vec::new();
        for (j, e) in basis.iter().enumerate() {
            let mut c = RationalFunctionScalar::zero();
            for (i, v) in values.iter().enumerate() {
                c = c + inv[j][i].clone() * v.clone();
            }
            terms.push((e.clone(), laurent_of(c, "a coefficient of T")?));
        }
        TLElement::from_terms(m, terms)
    }
}

/// Depth reachable at order α: each coupling tᵢ used costs nᵢ − 2 degrees.
fn reachable_depth(alpha: &[usize], v: &Potential, depths: &BTreeMap<MultiIndex, usize>, depth: usize) -> usize {
    if alpha.iter().all(|&a| a == 0) {
        return depth;
    }
    let mut best = depth as i64;
    for i in 0..alpha.len() {
        if let Some(prev) = minus_unit(alpha, i) {
            let d_prev = depths[&prev] as i64;
            best = best.min(d_prev).min(d_prev + 2 - v.degree(i) as i64);
        }
    }
    best.max(0) as usize
}

/// Solve the Schwinger-Dyson equation τ_V[(Λ + 𝒟W) ∧ a] = ⟨∂a, 1⊠1⟩ order by
/// order in the couplings, for every a ∈ P_{m−1,1} with m up to the depth
/// reachable at each order, together with ρ²-invariance of every T^{(α)}_m.
/// Order 0 is derived from the equations and checked against the 2-cabled
/// Voiculescu trace.
pub fn solve_sd(v: &Potential, depth: usize, t_degree: usize) -> Result<GibbsTrace> {
    if depth > MAX_GIBBS_DEPTH {
        return Err(Error::ResourceLimit(format!("depth {depth} exceeds the cap {MAX_GIBBS_DEPTH}")));
    }
    if t_degree > MAX_T_DEGREE {
        return Err(Error::ResourceLimit(format!("coupling degree {t_degree} exceeds the cap {MAX_T_DEGREE}")));
    }
    let seed = TSeries::from_cumulants(&to_laurent(&NamedLaw::Semicircle.cumulants(depth)))?;
    let lambda = x_variable::<LaurentScalar>().terms().keys().next().cloned().expect("Λ is one diagram");
    let c = Pairing::Diagrammatic.factor::<LaurentScalar>();
    let mut g = GibbsTrace { variables: v.names(), depth, truncation: t_degree, orders: BTreeMap::new() };
    let mut depths = BTreeMap::new();
    let mut grams = GramCache::default();
    for alpha in multi_indices(v.len(), t_degree) {
        let is_zero_order = alpha.iter().all(|&a| a == 0);
        let d_alpha = reachable_depth(&alpha, v, &depths, depth);
        depths.insert(alpha.clone(), d_alpha);
        let mut first = BTreeMap::new();
        if is_zero_order {
            first.insert(TLDiagram::empty(), LaurentScalar::one());
        }
        let t0 = if is_zero_order { TLElement::identity(0) } else { TLElement::zero(0) };
        g.orders.insert(alpha.clone(), OrderSlice { depth: 0, pairings: vec![first], coeffs: vec![t0] });
        for m in 1..=d_alpha {
            let basis = basis_diagrams(m, 0);
            let index: HashMap<&TLDiagram, usize> = basis.iter().enumerate().map(|(i, d)| (d, i)).collect();
            let mut sys = LinearSystem::<RationalFunctionScalar>::new(basis.len());
            for a in basis_diagrams(m - 1, 1) {
                let (w, loops) = wedge_diagrams(1, &lambda, &a)?;
                let (top, side) = side_close(&w, 1)?;
                let lead = RationalFunctionScalar::delta_pow(loops as i64 + side as i64 - 1);
                let mut rhs = LaurentScalar::zero();
                for (beta, gamma) in splits(&alpha) {
                    for key in diff_quotient_diagram(&a)? {
                        rhs += g.box_order(&key, &beta, &gamma)?;
                    }
                }
                rhs = &rhs * &c;
                let a_el = PAElement::basis(1, a.clone())?;
                for i in 0..v.len() {
                    if let Some(prev) = minus_unit(&alpha, i) {
                        let lower = g.tau_order(&v.gradient(i).wedge(&a_el)?, &prev)?;
                        rhs = rhs - lower;
                    }
                }
                let mut row = SparseRow::new();
                row.insert(index[&top], lead);
                sys.add_row(row, RationalFunctionScalar::from_laurent(&rhs))?;
            }
            for d in &basis {
                let r = d.rotate(2);
                if &r != d {
                    let mut row = SparseRow::new();
                    row.insert(index[d], RationalFunctionScalar::one());
                    row.insert(index[&r], -RationalFunctionScalar::one());
                    sys.add_row(row, RationalFunctionScalar::zero())?;
                }
            }
            let context = format!("Schwinger-Dyson system at order {} degree {m}", format_order(&alpha));
            let sol = sys.unique(&context)?;
            let mut map = BTreeMap::new();
            for (d, val) in basis.iter().zip(sol) {
                let val = laurent_of(val, "a pairing value of T")?;
                if !val.is_zero() {
                    map.insert(d.clone(), val);
                }
            }
            let coeffs = if is_zero_order {
                let tm = seed.get(m)?;
                for d in &basis {
                    let expect = cap_pairing(tm, d)?;
                    if map.get(d).cloned().unwrap_or_else(LaurentScalar::zero) != expect {
                        return Err(Error::SolverRank(format!(
                            "order 0 at degree {m} disagrees with the 2-cabled Voiculescu trace on {:?}",
                            d.pairs()
                        )));
                    }
                }
                Some(tm.clone())
            } else if m + 2 <= d_alpha {
                Some(grams.coefficients(m, &map)?)
            } else {
                None
            };
            let slice = g.orders.get_mut(&alpha).expect("inserted above");
            slice.pairings.push(map);
            slice.depth = m;
            if let Some(tm) = coeffs {
                slice.coeffs.push(tm);
            }
        }
    }
    Ok(g)
}

/// LHS − RHS of τ_V[(Λ + 𝒟W) ∧ a] = ⟨∂a, 1⊠1⟩ evaluated with the trace G,
/// order by order up to G's truncation.
pub fn sd_residual(g: &GibbsTrace, v: &Potential, a: &PAElement<LaurentScalar>) -> Result<FormalSeries> {
    if a.k() != 1 {
        return Err(Error::arg("the Schwinger-Dyson residual needs a ∈ Gr_1"));
    }
    if v.len() != g.variables().len() {
        return Err(Error::arg("potential and trace have different couplings"));
    }
    let lhs_el = x_variable::<LaurentScalar>().wedge(a)?;
    let da = diff_quotient(a)?;
    let c = Pairing::Diagrammatic.factor::<LaurentScalar>();
    let mut out = FormalSeries::zero(g.variables().to_vec(), g.truncation());
    for alpha in multi_indices(v.len(), g.truncation()) {
        let mut val = g.tau_order(&lhs_el, &alpha)?;
        for i in 0..v.len() {
            if let Some(prev) = minus_unit(&alpha, i) {
                val += g.tau_order(&v.gradient(i).wedge(a)?, &prev)?;
            }
        }
        val = val - &c * &g.tau_box_order(&da, &alpha)?;
        out.add_at(alpha, val)?;
    }
    Ok(out)
}

/// Which tangles a brute-force enumeration keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Connectivity {
    /// Connected once the outer disc is included.
    WithOuter,
    /// Boxes and strings form one piece even without the outer disc.
    AfterRemoval,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Call f on every perfect matching of 0..n (as a partner array).
fn for_each_matching(n: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(partner: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
        let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
            return f(partner);
        };
        for j in i + 1..partner.len() {
            if partner[j] == usize::MAX {
                partner[i] = j;
                partner[j] = i;
                rec(partner, f)?;
                partner[i] = usize::MAX;
                partner[j] = usize::MAX;
            }
        }
        Ok(())
    }
    rec(&mut vec![usize::MAX; n], f)
}

/// Leg data of a pooled set of discs: vertex 0 is the outer disc with m legs,
/// then one vertex per box.
struct LegLayout {
    /// Vertex of each leg.
    vertex: Vec<usize>,
    /// Next leg around the vertex (reversed on the outer disc, which is seen
    /// from outside on the sphere).
    sigma: Vec<usize>,
    /// (first, second) string points of each leg, in the order the rotation
    /// visits them.
    points: Vec<(usize, usize)>,
    /// First point index of each box.
    box_offset: Vec<usize>,
    n_vertices: usize,
}

impl LegLayout {
    fn new(m: usize, box_legs: &[usize]) -> Self {
        let mut vertex = Vec::new();
        let mut sigma = Vec::new();
        let mut points = Vec::new();
        for i in 0..m {
            vertex.push(0);
            sigma.push((i + m - 1) % m);
            points.push((2 * i + 1, 2 * i));
        }
        let mut box_offset = Vec::new();
        let mut point = 2 * m;
        for (b, &n) in box_legs.iter().enumerate() {
            let start = vertex.len();
            box_offset.push(point);
            for j in 0..n {
                vertex.push(b + 1);
                sigma.push(start + (j + 1) % n);
                points.push((point + 2 * j, point + 2 * j + 1));
            }
            point += 2 * n;
        }
        Self { vertex, sigma, points, box_offset, n_vertices: box_legs.len() + 1 }
    }

    fn is_planar_and_connected(&self, cables: &[usize], conn: Connectivity, n_boxes: usize) -> bool {
        let n = cables.len();
        let mut uf = UnionFind::new(self.n_vertices);
        for l in 0..n {
            uf.union(self.vertex[l], self.vertex[cables[l]]);
        }
        let root = uf.find(0);
        if (0..self.n_vertices).any(|v| uf.find(v) != root) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut faces = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                d = self.sigma[cables[d]];
            }
        }
        if self.n_vertices as i64 - (n / 2) as i64 + faces != 2 {
            return false;
        }
        if conn == Connectivity::AfterRemoval {
            if n_boxes == 0 {
                return n == 2;
            }
            let mut inner = UnionFind::new(self.n_vertices);
            for l in 0..n {
                let (a, b) = (self.vertex[l], self.vertex[cables[l]]);
                if a == 0 && b == 0 {
                    return false;
                }
                if a != 0 && b != 0 {
                    inner.union(a, b);
                }
            }
            let r = inner.find(1);
            if (1..self.n_vertices).any(|v| inner.find(v) != r) {
                return false;
            }
        }
        true
    }
}

fn enumerate_tangles(v: &Potential, m: usize, order: &[usize], conn: Connectivity) -> Result<TLElement<LaurentScalar>> {
    if order.len() != v.len() {
        return Err(Error::arg(format!("order {order:?} for {} couplings", v.len())));
    }
    let n_boxes = total(order);
    if n_boxes > ORACLE_MAX_BOXES {
        return Err(Error::ResourceLimit(format!("{n_boxes} boxes exceed the oracle cap {ORACLE_MAX_BOXES}")));
    }
    let boxes: Vec<usize> = order.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat(i).take(a)).collect();
    let box_legs: Vec<usize> = boxes.iter().map(|&i| v.degree(i)).collect();
    let n_legs = m + box_legs.iter().sum::<usize>();
    if n_legs > ORACLE_MAX_LEGS {
        return Err(Error::ResourceLimit(format!("{n_legs} legs exceed the oracle cap {ORACLE_MAX_LEGS}")));
    }
    if m == 0 {
        let unit = n_boxes == 0 && conn == Connectivity::WithOuter;
        return Ok(if unit { TLElement::identity(0) } else { TLElement::zero(0) });
    }
    if n_legs % 2 == 1 {
        return Ok(TLElement::zero(m));
    }
    let mut weight = LaurentScalar::constant(rat(TANGLE_SIGN, 1).pow(n_boxes as i32));
    for &a in order {
        weight = weight.scale(&(Rational::one() / factorial(a)));
    }
    let layout = LegLayout::new(m, &box_legs);
    let fillings: Vec<Vec<(TLDiagram, LaurentScalar)>> = boxes
        .iter()
        .map(|&i| v.couplings()[i].w.terms().iter().map(|(d, c)| (d.clone(), c.clone())).collect())
        .collect();
    let outer: Vec<usize> = (0..2 * m).collect();
    let mut acc: BTreeMap<TLDiagram, LaurentScalar> = BTreeMap::new();
    for_each_matching(n_legs, &mut |cables| {
        if !layout.is_planar_and_connected(cables, conn, n_boxes) {
            return Ok(());
        }
        let mut choice = vec![0usize; fillings.len()];
        loop {
            let mut net = Network::new();
            let mut c = weight.clone();
            for (b, &ch) in choice.iter().enumerate() {
                let (d, cd) = &fillings[b][ch];
                net.add_diagram(d, layout.box_offset[b]);
                c = &c * cd;
            }
            for (l, &p) in cables.iter().enumerate() {
                if l < p {
                    let (a1, a2) = layout.points[l];
                    let (b1, b2) = layout.points[p];
                    net.connect(a1, b2);
                    net.connect(a2, b1);
                }
            }
            let r = net.resolve(&outer)?;
            let entry = acc.entry(r.diagram()?).or_insert_with(LaurentScalar::zero);
            *entry += c.shift(r.loops as i64);
            let mut b = 0;
            while b < choice.len() {
                choice[b] += 1;
                if choice[b] < fillings[b].len() {
                    break;
                }
                choice[b] = 0;
                b += 1;
            }
            if b == choice.len() {
                break;
            }
        }
        Ok(())
    })?;
    TLElement::from_terms(m, acc)
}

/// T^{(α)}_m by brute force: the weighted sum over labelled 2-cabled tangles
/// with αᵢ boxes Wᵢ and m outer cable ends that are connected once the outer
/// disc is included, each box weighted −tᵢ and each labelling by 1/Π αᵢ!.
pub fn tangle_oracle(v: &Potential, m: usize, order: &[usize]) -> Result<TLElement<LaurentScalar>> {
    enumerate_tangles(v, m, order, Connectivity::WithOuter)
}

/// κ^{P,(α)}_m by brute force: as [`tangle_oracle`], keeping only tangles
/// that stay connected after the outer disc is removed.
pub fn tangle_cumulant(v: &Potential, m: usize, order: &[usize]) -> Result<TLElement<LaurentScalar>> {
    enumerate_tangles(v, m, order, Connectivity::AfterRemoval)
}

/// The order-α coefficient of κ_σ(t), nesting the blocks of σ with orders
/// distributed over the blocks.
fn nest_orders(
    sigma: &NCPartition,
    alpha: &[usize],
    kappa: &mut impl FnMut(usize, &[usize]) -> Result<TLElement<LaurentScalar>>,
) -> Result<TLElement<LaurentScalar>> {
    let m = sigma.n();
    if sigma.len() == 1 {
        return kappa(m, alpha);
    }
    let idx = sigma
        .blocks()
        .iter()
        .position(|b| b[b.len() - 1] - b[0] + 1 == b.len())
        .expect("a non-crossing partition has an interval block");
    let block = &sigma.blocks()[idx];
    let (first, s) = (block[0], block.len());
    let rest = sigma.remove_block(idx);
    let mut acc = TLElement::zero(m);
    for (beta, gamma) in splits(alpha) {
        let inner = kappa(s, &beta)?;
        if inner.is_zero() {
            continue;
        }
        let outer = nest_orders(&rest, &gamma, kappa)?;
        acc = acc.add(&insert_element(&outer, &inner, 2 * (first - 1))?)?;
    }
    Ok(acc)
}

/// Check T^{(α)}_m = Σ_{π ∈ NC(m)} κ^{P,(α)}_π, with both sides enumerated
/// by brute force from tangles.
pub fn connected_cumulant_check(v: &Potential, m: usize, order: &[usize]) -> Result<bool> {
    let lhs = tangle_oracle(v, m, order)?;
    if m == 0 {
        return Ok(lhs == if total(order) == 0 { TLElement::identity(0) } else { TLElement::zero(0) });
    }
    let mut cache: HashMap<(usize, MultiIndex), TLElement<LaurentScalar>> = HashMap::new();
    let mut kappa = |s: usize, beta: &[usize]| -> Result<TLElement<LaurentScalar>> {
        let key = (s, beta.to_vec());
        if let Some(k) = cache.get(&key) {
            return Ok(k.clone());
        }
        let k = tangle_cumulant(v, s, beta)?;
        cache.insert(key, k.clone());
        Ok(k)
    };
    let mut rhs = TLElement::zero(m);
    for pi in enumerate_nc(m)? {
        rhs = rhs.add(&nest_orders(&pi, order, &mut kappa)?)?;
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> Potential {
        Potential::new([("t1".to_string(), quartic_cable())]).unwrap()
    }

    #[test]
    fn multi_indices_are_graded() {
        let idx = multi_indices(2, 2);
        assert_eq!(idx, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(splits(&[1, 1]).len(), 4);
    }

    #[test]
    fn formal_series_drops_zeros_and_checks_truncation() {
        let mut s = FormalSeries::zero(vec!["t".into()], 1);
        s.add_at(vec![1], LaurentScalar::delta()).unwrap();
        s.add_at(vec![1], -LaurentScalar::delta()).unwrap();
        assert!(s.is_zero());
        assert!(s.add_at(vec![2], LaurentScalar::one()).is_err());
        s.add_at(vec![0], LaurentScalar::from(3)).unwrap();
        let back: FormalSeries = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn potentials_are_symmetrized() {
        let v = quartic();
        let w = &v.couplings()[0].w;
        assert_eq!(w.rotate(2), *w);
        assert_eq!(w.reflect(), *w);
        assert_eq!(w.terms().len(), 2);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"W\""));
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn oracle_at_order_zero_is_the_semicircle_series() {
        let v = quartic();
        let t = TSeries::from_cumulants(&to_laurent(&NamedLaw::Semicircle.cumulants(6))).unwrap();
        for m in 0..=6 {
            assert_eq!(&tangle_oracle(&v, m, &[0]).unwrap(), t.get(m).unwrap(), "m={m}");
        }
    }

    #[test]
    fn odd_leg_counts_have_no_tangles() {
        let v = quartic();
        assert!(tangle_oracle(&v, 1, &[1]).unwrap().is_zero());
        assert!(tangle_oracle(&v, 3, &[1]).unwrap().is_zero());
    }

    #[test]
    fn oracle_regime_is_capped() {
        let v = quartic();
        assert!(matches!(tangle_oracle(&v, 2, &[3]), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn quadratic_potential_recovers_the_semicircle() {
        let g = solve_sd(&Potential::quadratic(), 6, 1).unwrap();
        let t = TSeries::from_cumulants(&to_laurent(&NamedLaw::Semicircle.cumulants(6))).unwrap();
        assert_eq!(g.order_series(&[]).unwrap(), t);
    }
}
