use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tlfree_core::nc::*;
use tlfree_core::{Error, Rational};

/// Whether the union of the blocks of several partitions of disjoint point
/// sets, all inside 1..=total, is non-crossing.
fn jointly_noncrossing(blocks: &[Vec<usize>], total: usize) -> bool {
    let mut label = vec![usize::MAX; total + 1];
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            label[x] = i;
        }
    }
    for a in 1..=total {
        for b in a + 1..=total {
            for c in b + 1..=total {
                for d in c + 1..=total {
                    if label[a] == label[c] && label[b] == label[d] && label[a] != label[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Kreweras complement as the coarsest σ on the barred points 1̄..n̄ with
/// π ∪ σ non-crossing on 1 < 1̄ < 2 < 2̄ < ….
fn brute_force_kreweras(pi: &NCPartition) -> NCPartition {
    let n = pi.n();
    let mut best: Option<NCPartition> = None;
    for sigma in enumerate_nc(n).unwrap() {
        let mut blocks: Vec<Vec<usize>> = pi.blocks().iter().map(|b| b.iter().map(|&x| 2 * x - 1).collect()).collect();
        blocks.extend(sigma.blocks().iter().map(|b| b.iter().map(|&x| 2 * x).collect()));
        if jointly_noncrossing(&blocks, 2 * n) && best.as_ref().is_none_or(|b: &NCPartition| sigma.len() < b.len()) {
            best = Some(sigma);
        }
    }
    best.unwrap()
}

fn catalan_i(n: usize) -> Rational {
    Rational::from_integer(catalan(n))
}

/// μ(0_n, π) = Π_V (−1)^{|V|−1} Cat(|V|−1).
fn mobius_from_bottom(pi: &NCPartition) -> Rational {
    pi.blocks()
        .iter()
        .map(|b| {
            let s = b.len();
            let c = catalan_i(s - 1);
            if s % 2 == 0 { -c } else { c }
        })
        .fold(Rational::one(), |a, b| a * b)
}

#[test]
fn counts_are_catalan_numbers() {
    let expect = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
    for n in 1..=10 {
        assert_eq!(enumerate_nc(n).unwrap().len() as u64, expect[n]);
        assert_eq!(catalan(n), BigInt::from(expect[n]));
    }
    assert!(matches!(enumerate_nc(13), Err(Error::ResourceLimit(_))));
    assert_eq!(enumerate_nc_with_cap(11, 11).unwrap().len(), 58786);
    assert!(matches!(enumerate_nc_with_cap(8, 7), Err(Error::ResourceLimit(_))));
}

#[test]
fn enumeration_is_canonical_and_duplicate_free() {
    for n in 1..=8 {
        let all = enumerate_nc(n).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        for p in &all {
            assert_eq!(&NCPartition::new(n, p.blocks().to_vec()).unwrap(), p);
            assert!(p.blocks().windows(2).all(|w| w[0][0] < w[1][0]));
        }
    }
}

#[test]
fn kreweras_matches_the_interleaved_complement() {
    for n in 1..=6 {
        for pi in enumerate_nc(n).unwrap() {
            assert_eq!(kreweras(&pi), brute_force_kreweras(&pi), "{pi:?}");
        }
    }
}

#[test]
fn kreweras_is_an_order_reversing_bijection() {
    for n in 1..=7 {
        let all = enumerate_nc(n).unwrap();
        let images: Vec<NCPartition> = all.iter().map(kreweras).collect();
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len(), "n={n}");
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.len() + images[i].len(), n + 1);
            for (j, p) in all.iter().enumerate() {
                assert_eq!(leq(s, p).unwrap(), leq(&images[j], &images[i]).unwrap());
            }
        }
    }
    for pi in enumerate_nc(8).unwrap() {
        assert_eq!(pi.len() + kreweras(&pi).len(), 9);
    }
}

#[test]
fn mobius_has_the_catalan_product_form() {
    let mut memo = MobiusTable::new();
    for n in 1..=8 {
        let bottom = NCPartition::zero(n);
        for pi in enumerate_nc(n).unwrap() {
            assert_eq!(memo.mobius(&bottom, &pi).unwrap(), mobius_from_bottom(&pi), "{pi:?}");
            // [σ, 1] is anti-isomorphic to [0, Kr σ].
            assert_eq!(memo.mobius(&pi, &NCPartition::one(n)).unwrap(), mobius_from_bottom(&kreweras(&pi)));
        }
    }
}

#[test]
fn zeta_times_mobius_is_the_identity() {
    for n in 1..=5 {
        let all = enumerate_nc(n).unwrap();
        let mut memo = MobiusTable::new();
        for s in &all {
            for p in &all {
                if !leq(s, p).unwrap() {
                    continue;
                }
                let mut acc = Rational::zero();
                for r in &all {
                    if leq(s, r).unwrap() && leq(r, p).unwrap() {
                        acc += memo.mobius(s, r).unwrap();
                    }
                }
                let expect = if s == p { Rational::one() } else { Rational::zero() };
                assert_eq!(acc, expect, "[{s:?}, {p:?}]");
            }
        }
    }
}

#[test]
fn joins_and_meets_are_least_and_greatest_bounds() {
    for n in 1..=5 {
        let all = enumerate_nc(n).unwrap();
        for a in &all {
            for b in &all {
                let j = join(a, b).unwrap();
                let m = meet(a, b).unwrap();
                let uppers: Vec<&NCPartition> =
                    all.iter().filter(|c| leq(a, c).unwrap() && leq(b, c).unwrap()).collect();
                let lowers: Vec<&NCPartition> =
                    all.iter().filter(|c| leq(c, a).unwrap() && leq(c, b).unwrap()).collect();
                assert!(uppers.contains(&&j) && uppers.iter().all(|c| leq(&j, c).unwrap()));
                assert!(lowers.contains(&&m) && lowers.iter().all(|c| leq(c, &m).unwrap()));
            }
        }
    }
}

#[test]
fn mismatched_ground_sets_are_argument_errors() {
    let a = NCPartition::one(3);
    let b = NCPartition::one(4);
    assert!(matches!(leq(&a, &b), Err(Error::Argument(_))));
    assert!(matches!(join(&a, &b), Err(Error::Argument(_))));
    assert!(matches!(meet(&a, &b), Err(Error::Argument(_))));
    assert!(mobius(&b, &NCPartition::zero(4)).is_err());
}

fn arb_partition(n: usize) -> impl Strategy<Value = NCPartition> {
    let all = enumerate_nc(n).unwrap();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn arb_triple() -> impl Strategy<Value = (NCPartition, NCPartition, NCPartition)> {
    (1..=8usize).prop_flat_map(|n| (arb_partition(n), arb_partition(n), arb_partition(n)))
}

proptest! {
    #[test]
    fn lattice_axioms((a, b, c) in arb_triple()) {
        prop_assert_eq!(join(&a, &a).unwrap(), a.clone());
        prop_assert_eq!(meet(&a, &a).unwrap(), a.clone());
        prop_assert_eq!(join(&a, &b).unwrap(), join(&b, &a).unwrap());
        prop_assert_eq!(meet(&a, &b).unwrap(), meet(&b, &a).unwrap());
        prop_assert_eq!(join(&a, &meet(&a, &b).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(meet(&a, &join(&a, &b).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(join(&join(&a, &b).unwrap(), &c).unwrap(), join(&a, &join(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(meet(&meet(&a, &b).unwrap(), &c).unwrap(), meet(&a, &meet(&b, &c).unwrap()).unwrap());
        prop_assert!(leq(&a, &join(&a, &b).unwrap()).unwrap());
        prop_assert!(leq(&meet(&a, &b).unwrap(), &b).unwrap());
    }

    #[test]
    fn mobius_inverts_zeta_on_random_intervals((a, b, _c) in arb_triple()) {
        let (s, p) = (meet(&a, &b).unwrap(), join(&a, &b).unwrap());
        let n = s.n();
        let mut memo = MobiusTable::new();
        let mut acc = Rational::zero();
        for r in enumerate_nc(n).unwrap() {
            if leq(&s, &r).unwrap() && leq(&r, &p).unwrap() {
                acc += memo.mobius(&r, &p).unwrap();
            }
        }
        prop_assert_eq!(acc, if s == p { Rational::one() } else { Rational::zero() });
    }

    #[test]
    fn kreweras_squared_is_rotation((a, _b, _c) in arb_triple()) {
        // Kr² is conjugation by the full cycle: it rotates labels by one.
        let n = a.n();
        let k2 = kreweras(&kreweras(&a));
        let rotated = NCPartition::new(n, a.blocks().iter().map(|b| b.iter().map(|&x| (x % n) + 1).collect()).collect()).unwrap();
        let back = NCPartition::new(n, a.blocks().iter().map(|b| b.iter().map(|&x| if x == 1 { n } else { x - 1 }).collect()).collect()).unwrap();
        prop_assert!(k2 == rotated || k2 == back);
    }
}
