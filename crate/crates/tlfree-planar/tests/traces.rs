use num_traits::{One, Zero};
use proptest::prelude::*;
use tlfree_core::law::{cumulants_to_moments, moments_to_cumulants, to_laurent, CumulantSeq, MomentSeq, NamedLaw};
use tlfree_core::nc::catalan;
use tlfree_core::scalar::rat;
use tlfree_core::tl::TLDiagram;
use tlfree_core::{LaurentScalar, Rational};
use tlfree_planar::pa::*;

type P = PAElement<LaurentScalar>;

fn series(law: &NamedLaw, depth: usize) -> TSeries {
    TSeries::from_cumulants(&to_laurent(&law.cumulants(depth))).unwrap()
}

fn basis_elements(max_n: usize, k: usize) -> Vec<P> {
    basis_up_to(max_n, k).into_iter().map(|d| P::basis(k, d).unwrap()).collect()
}

fn delta_pow(e: i64) -> LaurentScalar {
    LaurentScalar::delta_power(e)
}

#[test]
fn cup_moments_are_catalan_in_delta() {
    let t = series(&NamedLaw::Semicircle, 10);
    let c: P = cup();
    for n in 0..=10 {
        let v = tau_k(&c.power(n).unwrap(), &t).unwrap();
        if n % 2 == 1 {
            assert!(v.is_zero(), "odd moment {n}");
        } else {
            let p = n / 2;
            let cat = Rational::from_integer(catalan(p));
            assert_eq!(v, delta_pow(p as i64).scale(&cat), "moment {n}");
        }
    }
}

#[test]
fn cup_law_is_the_delta_fold_convolution_power() {
    // Moments of ∪ follow the cumulants δ·κₙ(ν).
    for law in [NamedLaw::FreePoisson, NamedLaw::Custom(vec![rat(1, 2), rat(-1, 3), rat(2, 1)])] {
        let t = series(&law, 6);
        let k = to_laurent(&law.cumulants(6));
        let scaled = CumulantSeq::new(k.k.iter().map(|c| c * &LaurentScalar::delta()).collect());
        let expect = cumulants_to_moments(&scaled).unwrap();
        let c: P = cup();
        for n in 1..=6 {
            assert_eq!(tau_k(&c.power(n).unwrap(), &t).unwrap(), expect.moment(n), "{} moment {n}", law.name());
        }
    }
}

#[test]
fn side_cap_law_is_the_inverse_delta_power() {
    let laws = [
        NamedLaw::Semicircle,
        NamedLaw::FreePoisson,
        NamedLaw::Custom(vec![rat(1, 1), rat(2, 3), rat(-1, 2), rat(0, 1), rat(5, 7), rat(1, 9), rat(-2, 1), rat(3, 4)]),
    ];
    for law in laws {
        let t = series(&law, 8);
        let k = to_laurent(&law.cumulants(8));
        let scaled = CumulantSeq::new(k.k.iter().map(|c| c * &delta_pow(-1)).collect());
        let expect = cumulants_to_moments(&scaled).unwrap();
        let y: P = x_variable::<LaurentScalar>().scale(&delta_pow(-1));
        for p in 1..=8 {
            assert_eq!(tau_k(&y.power(p).unwrap(), &t).unwrap(), expect.moment(p), "{} moment {p}", law.name());
        }
    }
}

#[test]
fn traciality_on_small_bases() {
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson] {
        let t = series(&law, 4);
        for k in 0..=2 {
            let basis = basis_up_to(4, k);
            for a in &basis {
                for b in &basis {
                    let (na, nb) = ((a.n_points() - 2 * k) / 2, (b.n_points() - 2 * k) / 2);
                    if na + nb > 4 {
                        continue;
                    }
                    let x = P::basis(k, a.clone()).unwrap();
                    let y = P::basis(k, b.clone()).unwrap();
                    let l = tau_k(&x.wedge(&y).unwrap(), &t).unwrap();
                    let r = tau_k(&y.wedge(&x).unwrap(), &t).unwrap();
                    assert_eq!(l, r, "{} k={k} {a:?} {b:?}", law.name());
                }
            }
        }
    }
}

#[test]
fn conditional_expectation_preserves_the_trace() {
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson] {
        let t = series(&law, 4);
        for k in 0..=2 {
            for x in basis_elements(4, k) {
                let e = cond_exp(&x, &t).unwrap();
                assert!(e.terms().keys().all(|d| d.n_points() == 2 * k));
                assert_eq!(tau_k(&e, &t).unwrap(), tau_k(&x, &t).unwrap());
            }
        }
    }
}

#[test]
fn conditional_expectation_is_a_bimodule_map() {
    let t = series(&NamedLaw::FreePoisson, 3);
    let k = 2;
    let zs = basis_elements(0, k);
    for x in basis_elements(3, k) {
        let ex = cond_exp(&x, &t).unwrap();
        for z in &zs {
            for z2 in &zs {
                let lhs = cond_exp(&z.wedge(&x).unwrap().wedge(z2).unwrap(), &t).unwrap();
                let rhs = z.wedge(&ex).unwrap().wedge(z2).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn inclusion_preserves_traces_and_products() {
    let t = series(&NamedLaw::FreePoisson, 4);
    for k in 0..=1 {
        let basis = basis_elements(2, k);
        for x in &basis {
            assert_eq!(tau_k(&x.include_up(), &t).unwrap(), tau_k(x, &t).unwrap());
            for y in &basis {
                let lhs = x.wedge(y).unwrap().include_up();
                let rhs = x.include_up().wedge(&y.include_up()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn planar_cumulants_reassemble() {
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson, NamedLaw::Custom(vec![rat(1, 2), rat(1, 3), rat(-1, 1), rat(2, 1), rat(1, 5)])] {
        let t = series(&law, 5);
        let kp = PaCumulants::compute(&t, 5).unwrap();
        for m in 1..=5 {
            let mut acc = tlfree_core::tl::TLElement::zero(m);
            for pi in tlfree_core::nc::enumerate_nc(m).unwrap() {
                acc = acc.add(&kp.multiplicative(&pi).unwrap()).unwrap();
            }
            assert_eq!(&acc, t.get(m).unwrap(), "{} m={m}", law.name());
        }
    }
}

#[test]
fn planar_cumulants_of_the_voiculescu_trace_are_fattened_blocks() {
    // κ^P_m pairs with fatten(1_m) to the scalar cumulant times δ.
    let t = series(&NamedLaw::FreePoisson, 4);
    let kp = PaCumulants::compute(&t, 4).unwrap();
    let c: P = cup();
    for m in 1..=4 {
        let v = pair_element(kp.get(m).unwrap(), &c.power(m).unwrap()).unwrap();
        assert_eq!(v, LaurentScalar::delta(), "m={m}");
        let block = tlfree_core::tl::fatten(&tlfree_core::nc::NCPartition::one(m));
        let expect = tlfree_core::tl::TLElement::from_diagram(block, LaurentScalar::one()).unwrap();
        assert_eq!(kp.get(m).unwrap(), &expect);
    }
}

#[test]
fn product_formula_for_cup_words() {
    let c: P = cup();
    let cc = c.power(2).unwrap();
    let choices = [c.clone(), cc.clone()];
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson] {
        let t = series(&law, 6);
        let kp = PaCumulants::compute(&t, 6).unwrap();
        for n in 1..=3 {
            for code in 0..(1usize << n) {
                let xs: Vec<P> = (0..n).map(|i| choices[(code >> i) & 1].clone()).collect();
                let lhs = gr0_free_cumulant(&xs, &t).unwrap();
                let rhs = product_formula(&xs, &kp).unwrap();
                assert_eq!(lhs, rhs, "{} code {code:b} n={n}", law.name());
            }
        }
        // Equal arguments: cross-check the left side against the scalar
        // moment-cumulant conversion.
        for x in &choices {
            let moments: Vec<LaurentScalar> =
                (1..=3).map(|p| tau_k(&x.power(p).unwrap(), &t).unwrap()).collect();
            let k = moments_to_cumulants(&MomentSeq::new(moments)).unwrap();
            for n in 1..=3 {
                let xs = vec![x.clone(); n];
                assert_eq!(k.cumulant(n), gr0_free_cumulant(&xs, &t).unwrap());
            }
        }
    }
}

#[test]
fn semicircle_gram_matrices_are_positive() {
    let t = series(&NamedLaw::Semicircle, 6);
    let basis = basis_elements(3, 0);
    assert_eq!(basis.len(), 1 + 1 + 2 + 5);
    for d in [rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)] {
        let (g, psd) = gram_psd(&basis, &t, &d).unwrap();
        assert!(psd, "δ = {d}");
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, g[j][i]);
            }
        }
    }
}

#[test]
fn gram_detects_a_non_positive_trace() {
    // κ₂ < 0 makes the variance of ∪ negative.
    let t = series(&NamedLaw::Custom(vec![rat(0, 1), rat(-1, 1)]), 2);
    let basis = vec![P::unit(0), cup()];
    let (_, psd) = gram_psd(&basis, &t, &rat(2, 1)).unwrap();
    assert!(!psd);
}

#[test]
fn series_validation_rejects_non_tracial_data() {
    use tlfree_core::tl::TLElement;
    let d = TLDiagram::from_pairs(6, &[(1, 2), (3, 6), (4, 5)]).unwrap();
    let bad = vec![
        TLElement::identity(0),
        TLElement::zero(1),
        TLElement::zero(2),
        TLElement::from_diagram(d, LaurentScalar::one()).unwrap(),
    ];
    assert!(TSeries::new(bad).is_err());
}

fn arb_element(k: usize, max_n: usize) -> impl Strategy<Value = P> {
    let basis = basis_up_to(max_n, k);
    let len = basis.len();
    prop::collection::vec((0..len, -3i64..=3, -1i64..=1), 1..4).prop_map(move |terms| {
        P::from_terms(
            k,
            terms
                .into_iter()
                .map(|(i, c, e)| (basis[i].clone(), LaurentScalar::monomial(rat(c, 1), e))),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn wedge_is_associative(x in arb_element(1, 2), y in arb_element(1, 2), z in arb_element(1, 1)) {
        let l = x.wedge(&y).unwrap().wedge(&z).unwrap();
        let r = x.wedge(&y.wedge(&z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn dagger_is_an_anti_homomorphism(x in arb_element(2, 2), y in arb_element(2, 2)) {
        prop_assert_eq!(x.wedge(&y).unwrap().dagger(), y.dagger().wedge(&x.dagger()).unwrap());
        prop_assert_eq!(x.dagger().dagger(), x);
    }

    #[test]
    fn trace_is_tracial_on_random_elements(x in arb_element(1, 2), y in arb_element(1, 2)) {
        let t = series(&NamedLaw::FreePoisson, 4);
        prop_assert_eq!(tau_k(&x.wedge(&y).unwrap(), &t).unwrap(), tau_k(&y.wedge(&x).unwrap(), &t).unwrap());
    }
}
