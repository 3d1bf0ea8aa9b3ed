use num_traits::{One, Zero};
use proptest::prelude::*;
use tlfree_core::law::{convolution_power, to_laurent, NamedLaw};
use tlfree_core::scalar::rat;
use tlfree_core::tl::{jones_wenzl, TLDiagram, TLElement};
use tlfree_core::{LaurentScalar, Rational, RationalFunctionScalar};
use tlfree_planar::boxes::{box_basis, tensor, BoxElement};
use tlfree_planar::calc::*;
use tlfree_planar::pa::*;

type P = PAElement<LaurentScalar>;
type B = BoxElement<LaurentScalar>;
type Q = RationalFunctionScalar;

fn series(law: &NamedLaw, depth: usize) -> TSeries {
    TSeries::from_cumulants(&to_laurent(&law.cumulants(depth))).unwrap()
}

fn basis_elements(max_n: usize, k: usize) -> Vec<P> {
    basis_up_to(max_n, k).into_iter().map(|d| P::basis(k, d).unwrap()).collect()
}

fn boxes_up_to(total: usize) -> Vec<B> {
    let mut out = Vec::new();
    for s in 0..=total {
        for t in 0..=total - s {
            out.extend(box_basis(1, s, t).into_iter().map(|key| B::from_key(1, key, LaurentScalar::one())));
        }
    }
    out
}

fn two() -> DeltaChoice {
    DeltaChoice::Value(rat(2, 1))
}

/// Λ^n: n consecutive side-to-side caps.
fn lambda_power(n: usize) -> TLDiagram {
    let pairs: Vec<(usize, usize)> = (0..=n).map(|i| (2 * i + 1, 2 * i + 2)).collect();
    TLDiagram::from_pairs(2 * n + 2, &pairs).unwrap()
}

#[test]
fn adjoint_identity_for_the_semicircle() {
    let t = series(&NamedLaw::Semicircle, 8);
    let boxes = boxes_up_to(2);
    assert!(boxes.len() >= 20);
    for (pairing, xi) in [
        (Pairing::Diagrammatic, x_variable::<LaurentScalar>()),
        (Pairing::Literal, x_variable::<LaurentScalar>().scale(&LaurentScalar::delta_power(-1))),
    ] {
        for a in basis_elements(3, 1) {
            let da = diff_quotient(&a).unwrap();
            for q in &boxes {
                let lhs = inner_box(&da, q, &t, pairing).unwrap();
                let rhs = inner_gr1(&a, &partial_star(q, &t, &xi, pairing).unwrap(), &t).unwrap();
                assert_eq!(lhs.eval(&rat(2, 1)).unwrap(), rhs.eval(&rat(2, 1)).unwrap());
                assert_eq!(lhs, rhs, "{pairing:?} a={a:?} q={q:?}");
            }
        }
    }
}

#[test]
fn adjoint_of_a_tensor_corrects_the_insertion() {
    let t = series(&NamedLaw::Semicircle, 6);
    let x: P = x_variable();
    let q = tensor(&x, &P::unit(1)).unwrap();
    let star = partial_star(&q, &t, &x, Pairing::Diagrammatic).unwrap();
    let insertion = hash_op(&q, &x).unwrap();
    assert_eq!(insertion, x.wedge(&x).unwrap());
    let correction = star.sub(&insertion).unwrap();
    assert!(!correction.is_zero());
    assert!(correction.max_degree().unwrap() < 2);
}

#[test]
fn semicircle_conjugate_variable_at_cutoff_three() {
    let t = series(&NamedLaw::Semicircle, 8);
    let cv = conjugate_variable(&t, 3, &two(), Pairing::Diagrammatic).unwrap();
    assert_eq!(cv.xi.terms().len(), 1);
    assert_eq!(cv.xi.coeff(&lambda_power(1)), Q::one());
    assert!(cv.residual_norm.is_zero());
    assert!(cv.held_out_checked);
    assert_eq!(cv.held_out.len(), basis_diagrams(4, 1).len());
    assert!(cv.held_out.iter().all(|(_, d)| d.is_zero()));
    assert_eq!(fisher_of(&cv, &t).unwrap(), Fisher::Finite(Q::from_laurent(&LaurentScalar::from(2))));
}

#[test]
fn formal_solve_gives_the_same_conjugate_variable() {
    let t = series(&NamedLaw::Semicircle, 6);
    let cv = conjugate_variable(&t, 2, &DeltaChoice::Formal, Pairing::Diagrammatic).unwrap();
    assert!(cv.delta.is_none() && cv.warnings.is_empty());
    assert_eq!(cv.xi, x_variable::<Q>());
    assert_eq!(fisher_of(&cv, &t).unwrap(), Fisher::Finite(Q::delta()));
    let lit = conjugate_variable(&t, 2, &DeltaChoice::Formal, Pairing::Literal).unwrap();
    assert_eq!(lit.xi, x_variable::<Q>().scale(&Q::delta().inv().unwrap()));
}

#[test]
fn scalar_projection_is_the_schwinger_dyson_equation_of_the_cup() {
    let t = series(&NamedLaw::Semicircle, 11);
    let x: P = embedded_cup();
    let tau = |n: usize| tau_k(&x.power(n).unwrap(), &t).unwrap();
    let lit = conjugate_variable(&t, 2, &DeltaChoice::Formal, Pairing::Literal).unwrap();
    let xi_lit = lit.xi.try_map_coeffs(|c| c.to_laurent().ok_or_else(|| tlfree_core::Error::arg("not Laurent"))).unwrap();
    let xi_diag: P = x_variable();
    for n in 1..=5 {
        let rhs = (1..=n).fold(LaurentScalar::zero(), |acc, k| acc + tau(k - 1) * tau(n - k));
        let xn = x.power(n).unwrap();
        let lhs_lit = LaurentScalar::delta() * tau_k(&xi_lit.wedge(&xn).unwrap(), &t).unwrap();
        assert_eq!(lhs_lit, rhs, "literal n={n}");
        let lhs_diag = tau_k(&xi_diag.wedge(&xn).unwrap(), &t).unwrap();
        assert_eq!(lhs_diag, rhs, "diagrammatic n={n}");
    }
}

#[test]
fn free_poisson_conjugate_variable_is_not_polynomial() {
    // The cup is free Poisson of rate δ here, whose conjugate variable
    // 1 − (δ − 1)/x is not a polynomial: every cutoff solves its own system
    // exactly but fails one degree up, and the projections grow.
    let t = series(&NamedLaw::FreePoisson, 8);
    let d = rat(2, 1);
    let cv = conjugate_variable(&t, 3, &two(), Pairing::Diagrammatic).unwrap();
    assert!(cv.residual_norm.is_zero());
    let frozen = [(0, -3), (1, 16), (2, -8), (3, 1)];
    assert_eq!(cv.xi.terms().len(), frozen.len());
    for (n, c) in frozen {
        assert_eq!(cv.xi.coeff(&lambda_power(n)).eval(&d).unwrap(), rat(c, 1), "Λ^{n}");
    }
    assert!(cv.held_out_checked && !cv.held_out_norm.is_zero());
    assert_eq!(fisher_of(&cv, &t).unwrap(), Fisher::Infinite);
    assert_eq!(Fisher::Infinite.to_string(), "+inf at this cutoff");
    let norms: Vec<Rational> = (1..=3)
        .map(|c| {
            let cv = conjugate_variable(&t, c, &two(), Pairing::Diagrammatic).unwrap();
            projected_norm(&cv, &t).unwrap().eval(&d).unwrap()
        })
        .collect();
    assert!(norms.windows(2).all(|w| w[0] <= w[1]), "{norms:?}");
}

#[test]
fn fisher_is_monotone_in_the_cutoff_for_the_semicircle() {
    let t = series(&NamedLaw::Semicircle, 8);
    let mut last = Rational::zero();
    for c in 1..=3 {
        let cv = conjugate_variable(&t, c, &two(), Pairing::Diagrammatic).unwrap();
        let v = projected_norm(&cv, &t).unwrap().eval(&rat(2, 1)).unwrap();
        assert!(v >= last);
        last = v;
    }
    assert_eq!(last, rat(2, 1));
}

#[test]
fn unit_convolution_power_leaves_xi_unchanged() {
    let law = NamedLaw::FreePoisson;
    let k = to_laurent(&law.cumulants(6));
    let t = series(&law, 6);
    let t1 = TSeries::from_cumulants(&convolution_power(&k, &LaurentScalar::one())).unwrap();
    let a = conjugate_variable(&t, 2, &two(), Pairing::Diagrammatic).unwrap();
    let b = conjugate_variable(&t1, 2, &two(), Pairing::Diagrammatic).unwrap();
    assert_eq!(a.xi, b.xi);
}

#[test]
fn cutoff_beyond_the_series_is_a_truncation_error() {
    let t = series(&NamedLaw::Semicircle, 4);
    assert!(matches!(conjugate_variable(&t, 3, &two(), Pairing::Diagrammatic), Err(tlfree_core::Error::Truncation(_))));
}

#[test]
fn jones_wenzl_two_is_an_idempotent_killed_by_e() {
    let jw = jones_wenzl(2).unwrap();
    assert_eq!(jw, jw2::<Q>());
    assert_eq!(jw.compose(&jw).unwrap(), jw);
    let e = TLElement::<Q>::e_gen(2, 1).unwrap();
    assert!(e.compose(&jw).unwrap().is_zero());
    assert!(jw.compose(&e).unwrap().is_zero());
}

#[test]
fn compressed_derivative_of_the_cup_image_vanishes() {
    assert!(partial_prime(&embedded_cup::<Q>()).unwrap().is_zero());
    assert!(partial_prime(&embedded_cup::<LaurentScalar>()).unwrap().is_zero());
}

#[test]
fn cyclic_gradient_matches_the_closed_difference_quotient() {
    for x in basis_elements(3, 0) {
        let direct = cyclic_gradient(&x).unwrap();
        let closed = close_left(&diff_quotient(&x.include_up()).unwrap()).unwrap();
        assert_eq!(direct, closed, "{x:?}");
        let s = symmetrizer(&x).unwrap();
        assert_eq!(symmetrizer(&s).unwrap(), s);
        assert_eq!(cyclic_gradient(&s).unwrap(), close_left(&diff_quotient(&s.include_up()).unwrap()).unwrap());
    }
}

#[test]
fn cyclic_gradient_is_rotation_invariant() {
    for x in basis_elements(3, 0) {
        let r = x.map_diagrams(0, |d| d.rotate(2));
        assert_eq!(cyclic_gradient(&x).unwrap(), cyclic_gradient(&r).unwrap());
    }
}

fn arb_element(max_n: usize) -> impl Strategy<Value = P> {
    let basis = basis_up_to(max_n, 1);
    let len = basis.len();
    prop::collection::vec((0..len, -3i64..=3, -1i64..=1), 1..4).prop_map(move |terms| {
        P::from_terms(1, terms.into_iter().map(|(i, c, e)| (basis[i].clone(), LaurentScalar::monomial(rat(c, 1), e))))
            .unwrap()
    })
}

fn leibniz_rhs(a: &P, b: &P, da: B, db: B) -> B {
    let one = P::unit(1);
    let left = tensor(&one, b).unwrap().wedge(&da).unwrap();
    let right = tensor(a, &one).unwrap().wedge(&db).unwrap();
    left.add(&right).unwrap()
}

proptest! {
    #[test]
    fn difference_quotient_is_a_derivation(a in arb_element(3), b in arb_element(3)) {
        let lhs = diff_quotient(&a.wedge(&b).unwrap()).unwrap();
        let rhs = leibniz_rhs(&a, &b, diff_quotient(&a).unwrap(), diff_quotient(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compressed_derivative_is_a_derivation(a in arb_element(2), b in arb_element(2)) {
        let lhs = partial_prime(&a.wedge(&b).unwrap()).unwrap();
        let rhs = leibniz_rhs(&a, &b, partial_prime(&a).unwrap(), partial_prime(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hash_of_a_tensor_is_a_sandwich(x in arb_element(2), y in arb_element(2), b in arb_element(2)) {
        let lhs = hash_op(&tensor(&x, &y).unwrap(), &b).unwrap();
        prop_assert_eq!(lhs, x.wedge(&b).unwrap().wedge(&y).unwrap());
    }
}
