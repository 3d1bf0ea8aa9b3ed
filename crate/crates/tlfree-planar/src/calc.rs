//! Diagrammatic free differential calculus on Gr₁: the free difference
//! quotient ∂, the cyclic gradient 𝒟, the operations # and ·, the cyclic
//! symmetrizer and number operators, the JW-compressed derivative ∂′, the
//! adjoint ∂*, conjugate variables and free Fisher information.

use crate::boxes::{tau_box, BoxElement, BoxKey, BoxLayout};
use crate::pa::{basis_up_to, side_close, tau_diagram, Layout, PAElement, TSeries};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use tlfree_core::linalg::{LinearSystem, SparseRow};
use tlfree_core::scalar::{format_rational, rat};
use tlfree_core::tl::{Network, TLDiagram, TLElement};
use tlfree_core::{DeltaRing, Error, LaurentScalar, Rational, RationalFunctionScalar, Result, Ring};

/// Normalization of the pairing ⟨P, Q⟩_⊠ on Gr₁ ⊠ Gr₁^op against which
/// conjugate variables and ∂* are defined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// ⟨P, Q⟩_⊠ = δ·(τ₁⊠τ₁)(P ∧ Q†). The x-variable is then its own
    /// conjugate variable for the 2-cabled semicircle trace.
    #[default]
    Diagrammatic,
    /// ⟨P, Q⟩_⊠ = (τ₁⊠τ₁)(P ∧ Q†).
    Literal,
}

impl Pairing {
    /// The scalar in front of τ₁⊠τ₁.
    pub fn factor<S: DeltaRing>(self) -> S {
        match self {
            Self::Diagrammatic => S::delta_pow(1),
            Self::Literal => S::one(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "diagrammatic" => Ok(Self::Diagrammatic),
            "literal" => Ok(Self::Literal),
            _ => Err(Error::arg(format!("unknown pairing {s:?}"))),
        }
    }
}

fn require_k<S: Ring>(x: &PAElement<S>, k: usize, what: &str) -> Result<()> {
    if x.k() != k {
        return Err(Error::arg(format!("{what} needs an element of Gr_{k}, got Gr_{}", x.k())));
    }
    Ok(())
}

/// Relabel a diagram: new point i is old point `new_to_old[i]`.
fn relabel(d: &TLDiagram, new_to_old: &[usize]) -> TLDiagram {
    let mut old_to_new = vec![0; new_to_old.len()];
    for (i, &o) in new_to_old.iter().enumerate() {
        old_to_new[o] = i;
    }
    let partner = new_to_old.iter().map(|&o| old_to_new[d.partner0(o)]).collect();
    TLDiagram::from_partner(partner).expect("cyclic relabelling keeps planarity")
}

/// ∂ on one P_{n,1} diagram: term j splits the (j+1)-th top string pair
/// off to the right side; the top points before it form the top group and
/// those after it the bottom group.
pub fn diff_quotient_diagram(d: &TLDiagram) -> Result<Vec<BoxKey>> {
    let l = Layout::of(d, 1)?;
    let n = l.n;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let b = BoxLayout::new(1, j, n - 1 - j);
        let mut new_to_old = vec![0; b.n_points()];
        new_to_old[b.left(1)] = l.right(1);
        new_to_old[b.left(2)] = l.left(1);
        for p in 1..=2 * j {
            new_to_old[b.top(p)] = l.top(p);
        }
        new_to_old[b.right(1)] = l.top(2 * j + 1);
        new_to_old[b.right(2)] = l.top(2 * j + 2);
        for q in 1..=2 * (n - 1 - j) {
            new_to_old[b.bottom(q)] = l.top(2 * j + 2 + q);
        }
        out.push(BoxKey::new(1, j, n - 1 - j, relabel(d, &new_to_old))?);
    }
    Ok(out)
}

/// The free difference quotient ∂: Gr₁ → Gr₁ ⊠ Gr₁^op.
pub fn diff_quotient<S: Ring>(x: &PAElement<S>) -> Result<BoxElement<S>> {
    require_k(x, 1, "∂")?;
    let mut out = BoxElement::zero(1);
    for (d, c) in x.terms().iter() {
        for key in diff_quotient_diagram(d)? {
            out.add_term(key, c.clone());
        }
    }
    Ok(out)
}

/// 𝒟 on one P_n diagram: term j opens the (j+1)-th top string pair to the
/// sides, its second point becoming the left side and its first point the
/// right side, and reads the remaining top points cyclically.
pub fn cyclic_gradient_diagram(d: &TLDiagram) -> Vec<TLDiagram> {
    let n = d.m();
    (0..n)
        .map(|j| {
            let mut new_to_old = Vec::with_capacity(2 * n);
            new_to_old.push(2 * j + 1);
            new_to_old.extend(2 * j + 2..2 * n);
            new_to_old.extend(0..2 * j);
            new_to_old.push(2 * j);
            relabel(d, &new_to_old)
        })
        .collect()
}

/// The cyclic gradient 𝒟: Gr₀ → Gr₁.
pub fn cyclic_gradient<S: Ring>(x: &PAElement<S>) -> Result<PAElement<S>> {
    require_k(x, 0, "𝒟")?;
    let mut terms = Vec::new();
    for (d, c) in x.terms().iter() {
        for e in cyclic_gradient_diagram(d) {
            terms.push((e, c.clone()));
        }
    }
    PAElement::from_terms(1, terms)
}

/// The closure C: V₁(s,t) → P_{s+t,1} for diagrams whose left points are
/// joined to each other: right point 2 becomes the left side, the bottom
/// group followed by the top group becomes the top, and right point 1
/// becomes the right side. On difference quotients of Gr₀ elements included
/// in Gr₁ it reproduces 𝒟 term by term.
pub fn close_left<S: Ring>(q: &BoxElement<S>) -> Result<PAElement<S>> {
    if q.k() != 1 {
        return Err(Error::arg("closure needs a box over Gr_1"));
    }
    let mut terms = Vec::new();
    for (key, c) in q.terms().iter() {
        let b = key.layout(1);
        if key.diagram.partner0(b.left(1)) != b.left(2) {
            return Err(Error::arg("closure needs the two left points joined"));
        }
        let mut new_to_old = vec![b.right(2)];
        new_to_old.extend(b.bottoms());
        new_to_old.extend(b.tops());
        new_to_old.push(b.right(1));
        let mut partner = Vec::with_capacity(new_to_old.len());
        let mut old_to_new = vec![usize::MAX; b.n_points()];
        for (i, &o) in new_to_old.iter().enumerate() {
            old_to_new[o] = i;
        }
        for &o in &new_to_old {
            partner.push(old_to_new[key.diagram.partner0(o)]);
        }
        terms.push((TLDiagram::from_partner(partner)?, c.clone()));
    }
    PAElement::from_terms(1, terms)
}

/// a # b for a ∈ Gr₁ ⊠ Gr₁^op and b ∈ Gr₁: b is inserted between the upper
/// and the lower half of a, so (x ⊗ y^op) # b = x ∧ b ∧ y.
pub fn hash_op<S: DeltaRing>(a: &BoxElement<S>, b: &PAElement<S>) -> Result<PAElement<S>> {
    if a.k() != 1 {
        return Err(Error::arg("# needs a box over Gr_1"));
    }
    require_k(b, 1, "#")?;
    let mut terms = Vec::new();
    for (key, ca) in a.terms().iter() {
        let la = key.layout(1);
        let off = la.n_points();
        for (d, cb) in b.terms().iter() {
            let lb = Layout::of(d, 1)?;
            let mut net = Network::new();
            net.add_diagram(&key.diagram, 0);
            net.add_diagram(d, off);
            net.connect(la.right(1), off + lb.left(1));
            net.connect(la.right(2), off + lb.right(1));
            let mut outer = vec![la.left(2)];
            outer.extend(la.tops());
            outer.extend(lb.tops().map(|p| off + p));
            outer.extend(la.bottoms());
            outer.push(la.left(1));
            let r = net.resolve(&outer)?;
            terms.push((r.diagram()?, ca.clone() * cb.clone() * S::delta_pow(r.loops as i64)));
        }
    }
    PAElement::from_terms(1, terms)
}

/// a · b ∈ Gr₀ for a, b ∈ Gr₁: the side strings of a ∧ b are joined around.
pub fn dot_op<S: DeltaRing>(a: &PAElement<S>, b: &PAElement<S>) -> Result<PAElement<S>> {
    require_k(a, 1, "·")?;
    require_k(b, 1, "·")?;
    let w = a.wedge(b)?;
    let mut terms = Vec::new();
    for (d, c) in w.terms().iter() {
        let (top, loops) = side_close(d, 1)?;
        terms.push((top, c.clone() * S::delta_pow(loops as i64)));
    }
    PAElement::from_terms(0, terms)
}

/// Π: drop the P_0 component.
pub fn project<S: Ring>(x: &PAElement<S>) -> Result<PAElement<S>> {
    require_k(x, 0, "Π")?;
    PAElement::from_terms(0, x.terms().iter().filter(|(d, _)| d.m() > 0).map(|(d, c)| (d.clone(), c.clone())))
}

/// 𝒮: average of the n two-click rotations of each P_n term (after Π).
pub fn symmetrizer<S: Ring>(x: &PAElement<S>) -> Result<PAElement<S>> {
    let x = project(x)?;
    let mut terms = Vec::new();
    for (d, c) in x.terms().iter() {
        let n = d.m();
        let w = c.clone() * S::from_rational(&rat(1, n as i64));
        for j in 0..n {
            terms.push((d.rotate(2 * j as i64), w.clone()));
        }
    }
    PAElement::from_terms(0, terms)
}

/// 𝒩: multiply each P_n term by n.
pub fn number_op<S: Ring>(x: &PAElement<S>) -> Result<PAElement<S>> {
    require_k(x, 0, "𝒩")?;
    PAElement::from_terms(0, x.terms().iter().map(|(d, c)| (d.clone(), c.clone() * S::from_i64(d.m() as i64))))
}

/// Σ = 𝒩^{-1} ∘ Π.
pub fn sigma_op<S: Ring>(x: &PAElement<S>) -> Result<PAElement<S>> {
    let x = project(x)?;
    PAElement::from_terms(
        0,
        x.terms().iter().map(|(d, c)| (d.clone(), c.clone() * S::from_rational(&rat(1, d.m() as i64)))),
    )
}

/// JW₂ = id − δ^{-1}·E₁ in TL(2).
pub fn jw2<S: DeltaRing>() -> TLElement<S> {
    let e = TLElement::<S>::e_gen(2, 1).expect("E_1 exists in TL(2)");
    TLElement::identity(2).sub(&e.scale(&S::delta_pow(-1))).expect("same strand count")
}

/// ∂′(x) = ∂(x) with JW₂ attached to the two strands of the split pair.
pub fn partial_prime<S: DeltaRing>(x: &PAElement<S>) -> Result<BoxElement<S>> {
    diff_quotient(x)?.compose_right(&jw2())
}

/// Exponent e of the δ^e factor (times the pairing factor) in front of the
/// two capped correction sums of ∂*.
const ADJOINT_CORRECTION_EXP: i64 = -1;

/// The adjoint ∂* of ∂ with respect to τ₁ on Gr₁ and the chosen pairing on
/// Gr₁ ⊠ Gr₁^op, given the conjugate variable ξ for that pairing:
/// ∂*(Q) = Q # ξ minus the corrections in which the inner strands of Q are
/// reconnected to its own top (respectively bottom) group and the points
/// beyond them are capped by the trace.
pub fn partial_star<S>(q: &BoxElement<S>, t: &TSeries, xi: &PAElement<S>, pairing: Pairing) -> Result<PAElement<S>>
where
    S: DeltaRing + From<LaurentScalar>,
{
    if q.k() != 1 {
        return Err(Error::arg("∂* needs a box over Gr_1"));
    }
    require_k(xi, 1, "∂*")?;
    let mut out = hash_op(q, xi)?;
    let corr = -(pairing.factor::<S>() * S::delta_pow(ADJOINT_CORRECTION_EXP));
    for (key, c) in q.terms().iter() {
        let b = key.layout(1);
        for l in 0..key.s {
            let tl = t.get(l)?;
            let g0 = 2 * key.s - 2 * l;
            let mut keep = vec![b.left(2)];
            keep.extend((1..g0 - 1).map(|p| b.top(p)));
            keep.extend(b.bottoms());
            keep.push(b.left(1));
            let capped: Vec<usize> = (g0 + 1..=2 * key.s).map(|p| b.top(p)).collect();
            let links = [(b.top(g0), b.right(1)), (b.top(g0 - 1), b.right(2))];
            let part = capped_reconnection(&key.diagram, &keep, &capped, &links, tl)?;
            out = out.add(&part.scale(&(c.clone() * corr.clone())))?;
        }
        for l in 0..key.t {
            let tl = t.get(l)?;
            let mut keep = vec![b.left(2)];
            keep.extend(b.tops());
            keep.extend((2 * l + 3..=2 * key.t).map(|j| b.bottom(j)));
            keep.push(b.left(1));
            let capped: Vec<usize> = (1..=2 * l).map(|j| b.bottom(j)).collect();
            let links = [(b.bottom(2 * l + 1), b.right(2)), (b.bottom(2 * l + 2), b.right(1))];
            let part = capped_reconnection(&key.diagram, &keep, &capped, &links, tl)?;
            out = out.add(&part.scale(&(c.clone() * corr.clone())))?;
        }
    }
    Ok(out)
}

/// Join the given point pairs of d, cap the listed points (in order) with
/// T_l, and read the kept points as a Gr₁ diagram.
fn capped_reconnection<S: DeltaRing + From<LaurentScalar>>(
    d: &TLDiagram,
    keep: &[usize],
    capped: &[usize],
    links: &[(usize, usize)],
    tl: &TLElement<LaurentScalar>,
) -> Result<PAElement<S>> {
    let off = d.n_points();
    let n = capped.len();
    let mut terms = Vec::new();
    for (e, ce) in tl.terms().iter() {
        let mut net = Network::new();
        net.add_diagram(d, 0);
        net.add_diagram(e, off);
        for &(a, b) in links {
            net.connect(a, b);
        }
        for (i, &p) in capped.iter().enumerate() {
            net.connect(p, off + n - 1 - i);
        }
        let r = net.resolve(keep)?;
        terms.push((r.diagram()?, S::from(ce.shift(r.loops as i64))));
    }
    PAElement::from_terms(1, terms)
}

/// ⟨a, b⟩ = τ₁(a ∧ b†).
pub fn inner_gr1<S: DeltaRing + From<LaurentScalar>>(a: &PAElement<S>, b: &PAElement<S>, t: &TSeries) -> Result<S> {
    crate::pa::tau_k(&a.wedge(&b.dagger())?, t)
}

/// ⟨P, Q⟩_⊠ under the given pairing.
pub fn inner_box<S: DeltaRing + From<LaurentScalar>>(
    p: &BoxElement<S>,
    q: &BoxElement<S>,
    t: &TSeries,
    pairing: Pairing,
) -> Result<S> {
    Ok(pairing.factor::<S>() * tau_box(&p.wedge(&q.dagger())?, t)?)
}

/// Which value of δ a linear solve uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaChoice {
    /// Solve over ℚ(δ); fall back to δ = 2 if the formal system is singular.
    Formal,
    /// Solve exactly at this positive rational δ.
    Value(Rational),
}

impl DeltaChoice {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "formal" {
            return Ok(Self::Formal);
        }
        let q = tlfree_core::scalar::parse_rational(s)?;
        if q <= Rational::zero() {
            return Err(Error::arg("δ must be positive"));
        }
        Ok(Self::Value(q))
    }
}

/// Value of δ used when a formal solve falls back.
pub const FALLBACK_DELTA: i64 = 2;

/// A solved conjugate variable at a finite cutoff.
#[derive(Clone, Debug)]
pub struct ConjugateVariable {
    /// ξ in the span of P_{n,1}, n ≤ cutoff. Constant coefficients when δ
    /// was specialized.
    pub xi: PAElement<RationalFunctionScalar>,
    /// The specialized δ, or None for a formal solve.
    pub delta: Option<Rational>,
    pub cutoff: usize,
    pub pairing: Pairing,
    /// Σ |defect| over the solve basis, at the reporting δ.
    pub residual_norm: Rational,
    /// Defects of the defining identity on the held-out degree cutoff+1
    /// basis (empty when the series is too shallow to test them).
    pub held_out: Vec<(TLDiagram, RationalFunctionScalar)>,
    /// Σ |defect| over the held-out basis, at the reporting δ.
    pub held_out_norm: Rational,
    /// True when the held-out identity was evaluated.
    pub held_out_checked: bool,
    pub warnings: Vec<String>,
}

impl ConjugateVariable {
    /// ξ with δ specialized.
    pub fn xi_at(&self, delta: &Rational) -> Result<PAElement<Rational>> {
        self.xi.try_map_coeffs(|c| c.eval(delta))
    }

    /// δ at which the residual norms are reported.
    pub fn reporting_delta(&self) -> Rational {
        self.delta.clone().unwrap_or_else(|| rat(FALLBACK_DELTA, 1))
    }

    /// Whether the defining identity holds exactly on the solve basis and,
    /// if checked, the held-out basis.
    pub fn is_exact(&self) -> bool {
        self.residual_norm.is_zero() && self.held_out_norm.is_zero()
    }
}

/// τ₁(b ∧ x) for diagrams, at Gr₁.
fn tau_pair(b: &TLDiagram, x: &TLDiagram, t: &TSeries) -> Result<LaurentScalar> {
    let (d, loops) = crate::pa::wedge_diagrams(1, b, x)?;
    Ok(tau_diagram(&d, 1, t)?.shift(loops as i64))
}

/// Right side of the defining identity for one test diagram x.
fn identity_rhs(x: &TLDiagram, t: &TSeries, pairing: Pairing) -> Result<LaurentScalar> {
    let dq = diff_quotient(&PAElement::<LaurentScalar>::basis(1, x.clone())?)?;
    Ok(pairing.factor::<LaurentScalar>() * tau_box(&dq, t)?)
}

fn abs(q: &Rational) -> Rational {
    if q < &Rational::zero() {
        -q.clone()
    } else {
        q.clone()
    }
}

fn solve_specialized(
    basis: &[TLDiagram],
    gram: &[Vec<LaurentScalar>],
    rhs: &[LaurentScalar],
    delta: &Rational,
) -> Result<Vec<Rational>> {
    let n = basis.len();
    let mut sys = LinearSystem::<Rational>::new(n);
    for j in 0..n {
        let mut row = SparseRow::new();
        for (i, g) in gram[j].iter().enumerate() {
            let v = g.eval(delta)?;
            if !v.is_zero() {
                row.insert(i, v);
            }
        }
        sys.add_row(row, rhs[j].eval(delta)?)?;
    }
    sys.unique(&format!("conjugate variable at δ = {}", format_rational(delta)))
}

fn solve_formal(basis: &[TLDiagram], gram: &[Vec<LaurentScalar>], rhs: &[LaurentScalar]) -> Result<Vec<RationalFunctionScalar>> {
    let n = basis.len();
    let mut sys = LinearSystem::<RationalFunctionScalar>::new(n);
    for j in 0..n {
        let mut row = SparseRow::new();
        for (i, g) in gram[j].iter().enumerate() {
            if !g.is_zero() {
                row.insert(i, RationalFunctionScalar::from_laurent(g));
            }
        }
        sys.add_row(row, RationalFunctionScalar::from_laurent(&rhs[j]))?;
    }
    sys.unique("conjugate variable over ℚ(δ)")
}

/// Solve τ₁(ξ ∧ x) = c·(τ₁⊠τ₁)(∂x) for ξ in the span of every P_{n,1}
/// diagram with n ≤ cutoff, testing against the same diagrams x.
pub fn conjugate_variable(t: &TSeries, cutoff: usize, delta: &DeltaChoice, pairing: Pairing) -> Result<ConjugateVariable> {
    if cutoff + 1 > t.depth() {
        return Err(Error::Truncation(format!("cutoff {cutoff} needs depth {}, have {}", cutoff + 1, t.depth())));
    }
    if 2 * cutoff > t.depth() {
        return Err(Error::Truncation(format!(
            "Gram entries at cutoff {cutoff} need depth {}, have {}",
            2 * cutoff,
            t.depth()
        )));
    }
    let basis = basis_up_to(cutoff, 1);
    let mut gram = Vec::with_capacity(basis.len());
    let mut rhs = Vec::with_capacity(basis.len());
    for x in &basis {
        gram.push(basis.iter().map(|b| tau_pair(b, x, t)).collect::<Result<Vec<_>>>()?);
        rhs.push(identity_rhs(x, t, pairing)?);
    }
    let mut warnings = Vec::new();
    let (coeffs, used_delta): (Vec<RationalFunctionScalar>, Option<Rational>) = match delta {
        DeltaChoice::Value(q) => {
            let v = solve_specialized(&basis, &gram, &rhs, q)?;
            (v.into_iter().map(|c| RationalFunctionScalar::from_laurent(&LaurentScalar::constant(c))).collect(), Some(q.clone()))
        }
        DeltaChoice::Formal => match solve_formal(&basis, &gram, &rhs) {
            Ok(v) => (v, None),
            Err(Error::SolverRank(msg)) => {
                let q = rat(FALLBACK_DELTA, 1);
                warnings.push(format!("formal solve failed ({msg}); fell back to δ = {FALLBACK_DELTA}"));
                let v = solve_specialized(&basis, &gram, &rhs, &q)?;
                (v.into_iter().map(|c| RationalFunctionScalar::from_laurent(&LaurentScalar::constant(c))).collect(), Some(q))
            }
            Err(e) => return Err(e),
        },
    };
    let xi = PAElement::from_terms(1, basis.iter().cloned().zip(coeffs))?;
    let report = used_delta.clone().unwrap_or_else(|| rat(FALLBACK_DELTA, 1));
    let defect = |x: &TLDiagram, r: &LaurentScalar| -> Result<RationalFunctionScalar> {
        let mut lhs = RationalFunctionScalar::zero();
        for (b, c) in xi.terms().iter() {
            lhs = lhs + c.clone() * RationalFunctionScalar::from_laurent(&tau_pair(b, x, t)?);
        }
        Ok(lhs - RationalFunctionScalar::from_laurent(r))
    };
    let at = |v: &RationalFunctionScalar| -> Result<Rational> { Ok(abs(&v.eval(&report)?)) };
    let mut residual_norm = Rational::zero();
    for (x, r) in basis.iter().zip(&rhs) {
        residual_norm += at(&defect(x, r)?)?;
    }
    let mut held_out = Vec::new();
    let mut held_out_norm = Rational::zero();
    let held_out_checked = 2 * cutoff + 1 <= t.depth();
    if held_out_checked {
        for x in crate::pa::basis_diagrams(cutoff + 1, 1) {
            let r = identity_rhs(&x, t, pairing)?;
            let dft = defect(&x, &r)?;
            held_out_norm += at(&dft)?;
            held_out.push((x, dft));
        }
    } else {
        warnings.push(format!(
            "held-out degree {} not checked: needs depth {}, have {}",
            cutoff + 1,
            2 * cutoff + 1,
            t.depth()
        ));
    }
    Ok(ConjugateVariable {
        xi,
        delta: used_delta,
        cutoff,
        pairing,
        residual_norm,
        held_out,
        held_out_norm,
        held_out_checked,
        warnings,
    })
}

/// Φ*² at a cutoff: a finite value, or +∞ when the solved ξ fails the
/// defining identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fisher {
    Finite(RationalFunctionScalar),
    Infinite,
}

impl fmt::Display for Fisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "+inf at this cutoff"),
        }
    }
}

/// ‖ξ‖² = τ₁(ξ ∧ ξ†) of the solved element, whether or not it satisfies
/// the held-out identity. At a finite cutoff ξ is the orthogonal projection
/// of the conjugate variable onto the solve span, so this value does not
/// decrease as the cutoff grows.
pub fn projected_norm(cv: &ConjugateVariable, t: &TSeries) -> Result<RationalFunctionScalar> {
    let xi_dag = cv.xi.dagger();
    let mut acc = RationalFunctionScalar::zero();
    for (a, ca) in cv.xi.terms().iter() {
        for (b, cb) in xi_dag.terms().iter() {
            acc = acc + ca.clone() * cb.clone() * RationalFunctionScalar::from_laurent(&tau_pair(a, b, t)?);
        }
    }
    if let Some(d) = &cv.delta {
        acc = RationalFunctionScalar::from_laurent(&LaurentScalar::constant(acc.eval(d)?));
    }
    Ok(acc)
}

/// Φ*² = τ₁(ξ ∧ ξ) for a solved conjugate variable, or +∞ when ξ fails the
/// defining identity.
pub fn fisher_of(cv: &ConjugateVariable, t: &TSeries) -> Result<Fisher> {
    if !cv.is_exact() {
        return Ok(Fisher::Infinite);
    }
    Ok(Fisher::Finite(projected_norm(cv, t)?))
}

/// Solve for ξ and return Φ*² = τ₁(ξ ∧ ξ).
pub fn fisher(t: &TSeries, cutoff: usize, delta: &DeltaChoice, pairing: Pairing) -> Result<Fisher> {
    fisher_of(&conjugate_variable(t, cutoff, delta, pairing)?, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::tensor;
    use crate::pa::{cup, embedded_cup, x_variable};
    use tlfree_core::law::{to_laurent, NamedLaw};

    type P = PAElement<LaurentScalar>;
    type B = BoxElement<LaurentScalar>;

    fn semicircle(d: usize) -> TSeries {
        TSeries::from_cumulants(&to_laurent(&NamedLaw::Semicircle.cumulants(d))).unwrap()
    }

    #[test]
    fn difference_quotient_examples() {
        let x: P = x_variable();
        assert_eq!(diff_quotient(&x).unwrap(), B::unit(1));
        let one = P::unit(1);
        let xx = x.wedge(&x).unwrap();
        let expect = tensor(&x, &one).unwrap().add(&tensor(&one, &x).unwrap()).unwrap();
        assert_eq!(diff_quotient(&xx).unwrap(), expect);
        assert!(diff_quotient(&one).unwrap().is_zero());
    }

    #[test]
    fn cyclic_gradient_examples() {
        let d = TLDiagram::from_pairs(4, &[(1, 4), (2, 3)]).unwrap();
        let half = P::from_diagram(0, d, LaurentScalar::constant(rat(1, 2))).unwrap();
        assert_eq!(cyclic_gradient(&half).unwrap(), x_variable());
        assert!(cyclic_gradient(&P::unit(0)).unwrap().is_zero());
        assert_eq!(cyclic_gradient(&cup::<LaurentScalar>()).unwrap(), P::unit(1));
    }

    #[test]
    fn hash_and_dot() {
        let x: P = x_variable();
        let b = x.wedge(&embedded_cup()).unwrap();
        assert_eq!(hash_op(&B::unit(1), &b).unwrap(), b);
        assert_eq!(hash_op(&diff_quotient(&x).unwrap(), &b).unwrap(), b);
        let closed = dot_op(&x, &P::unit(1)).unwrap();
        assert_eq!(closed, cup());
    }

    #[test]
    fn symmetrizer_and_number_operators() {
        let c: P = cup();
        assert_eq!(symmetrizer(&c).unwrap(), c);
        let d = TLDiagram::from_pairs(6, &[(1, 2), (3, 6), (4, 5)]).unwrap();
        let x = P::basis(0, d).unwrap();
        assert_eq!(number_op(&x).unwrap(), x.scale(&LaurentScalar::from(3)));
        let s = symmetrizer(&x).unwrap();
        assert_eq!(symmetrizer(&s).unwrap(), s);
        let with_constant = x.add(&P::unit(0)).unwrap();
        assert_eq!(sigma_op(&number_op(&with_constant).unwrap()).unwrap(), project(&with_constant).unwrap());
    }

    #[test]
    fn compressed_derivative_kills_the_embedded_cup() {
        assert!(partial_prime(&embedded_cup::<LaurentScalar>()).unwrap().is_zero());
        let x: P = x_variable();
        let expect = B::unit(1).compose_right(&jw2()).unwrap();
        assert_eq!(partial_prime(&x).unwrap(), expect);
    }

    #[test]
    fn semicircle_conjugate_variable_is_x() {
        let t = semicircle(8);
        let cv = conjugate_variable(&t, 3, &DeltaChoice::Value(rat(2, 1)), Pairing::Diagrammatic).unwrap();
        let expect = x_variable::<RationalFunctionScalar>();
        assert_eq!(cv.xi, expect);
        assert!(cv.residual_norm.is_zero());
        assert!(cv.held_out_checked && cv.held_out_norm.is_zero());
        assert_eq!(fisher_of(&cv, &t).unwrap(), Fisher::Finite(RationalFunctionScalar::from_laurent(&LaurentScalar::from(2))));
    }

    #[test]
    fn adjoint_of_the_unit_box_is_xi() {
        let t = semicircle(4);
        let xi: P = x_variable();
        assert_eq!(partial_star(&B::unit(1), &t, &xi, Pairing::Diagrammatic).unwrap(), xi);
    }
}
