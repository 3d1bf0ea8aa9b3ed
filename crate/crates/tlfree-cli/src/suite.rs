//! Invariant suites run by `tlfree verify`.
//!
//! Each check evaluates an exact identity of the engine on a fixed, finite
//! family of inputs and reports pass or fail with a short detail line.
//! Random inputs come from a fixed seed, so every run is identical.

use crate::args::Suite;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;
use tlfree_core::law::{cumulants_to_moments, moments_to_cumulants, to_laurent, CumulantSeq, NamedLaw};
use tlfree_core::nc::{catalan, enumerate_nc, kreweras, leq, MobiusTable};
use tlfree_core::scalar::rat;
use tlfree_core::tl::{fatten, jones_wenzl, rotate, tl_basis, TLElement};
use tlfree_core::{LaurentScalar, Rational, RationalFunctionScalar, Result};
use tlfree_graph::{loop_vs_diagram, mc_estimate, wick_expectation, BipartiteGraph, Letter, LoopWord, MCConfig};
use tlfree_planar::boxes::{box_basis, BoxElement};
use tlfree_planar::calc::{
    conjugate_variable, diff_quotient, inner_box, inner_gr1, jw2, partial_prime, partial_star, DeltaChoice, Pairing,
};
use tlfree_planar::gibbs::{quartic_cable, solve_sd, tangle_oracle, Potential};
use tlfree_planar::pa::{
    basis_diagrams, basis_up_to, cup, embedded_cup, gr0_free_cumulant, gram_psd, product_formula, tau_k, x_variable,
    PaCumulants,
};
use tlfree_planar::{PAElement, TSeries};

type P = PAElement<LaurentScalar>;
type Q = RationalFunctionScalar;

/// Outcome of one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

fn series(law: &NamedLaw, depth: usize) -> Result<TSeries> {
    TSeries::from_cumulants(&to_laurent(&law.cumulants(depth)))
}

fn verdict(failures: usize, total: usize, what: &str) -> (bool, String) {
    (failures == 0, format!("{}/{} {what}", total - failures, total))
}

fn kreweras_rotation() -> Result<(bool, String)> {
    let (mut bad, mut total) = (0, 0);
    for n in 1..=7 {
        for pi in enumerate_nc(n)? {
            total += 1;
            if fatten(&kreweras(&pi)) != rotate(&fatten(&pi), 1) {
                bad += 1;
            }
        }
    }
    Ok(verdict(bad, total, "partitions with n ≤ 7"))
}

fn nc_counts() -> Result<(bool, String)> {
    let bad = (0..=10).filter(|&n| enumerate_nc(n).map(|v| v.len().into()).ok() != Some(catalan(n))).count();
    Ok(verdict(bad, 11, "sizes n ≤ 10 with |NC(n)| = Catalan(n)"))
}

fn moment_cumulant_roundtrip() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut bad = 0;
    for _ in 0..100 {
        let k: Vec<Rational> = (0..8).map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=6))).collect();
        let k = CumulantSeq::new(k);
        if moments_to_cumulants(&cumulants_to_moments(&k)?)? != k {
            bad += 1;
        }
    }
    Ok(verdict(bad, 100, "random sequences at depth 8"))
}

fn mobius_inverts_zeta() -> Result<(bool, String)> {
    let mut table = MobiusTable::new();
    let (mut bad, mut total) = (0, 0);
    for n in 1..=5 {
        let all = enumerate_nc(n)?;
        for s in &all {
            for p in &all {
                if !leq(s, p)? {
                    continue;
                }
                total += 1;
                let mut acc = Rational::zero();
                for r in &all {
                    if leq(s, r)? && leq(r, p)? {
                        acc += table.mobius(s, r)?;
                    }
                }
                let expect = if s == p { Rational::one() } else { Rational::zero() };
                if acc != expect {
                    bad += 1;
                }
            }
        }
    }
    Ok(verdict(bad, total, "intervals with n ≤ 5"))
}

fn tl_associativity() -> Result<(bool, String)> {
    let basis: Vec<TLElement<LaurentScalar>> =
        tl_basis(3).into_iter().map(|d| TLElement::from_diagram(d, LaurentScalar::one())).collect::<Result<_>>()?;
    let mut bad = 0;
    for a in &basis {
        for b in &basis {
            for c in &basis {
                if a.compose(b)?.compose(c)? != a.compose(&b.compose(c)?)? {
                    bad += 1;
                }
            }
        }
    }
    Ok(verdict(bad, basis.len().pow(3), "triples in TL(3)"))
}

fn jones_wenzl_idempotents() -> Result<(bool, String)> {
    let mut bad = 0;
    for n in 1..=4 {
        let jw = jones_wenzl(n)?;
        let mut ok = jw.compose(&jw)? == jw;
        for i in 1..n {
            ok &= TLElement::<Q>::e_gen(n, i)?.compose(&jw)?.is_zero();
        }
        bad += usize::from(!ok);
    }
    Ok(verdict(bad, 4, "sizes n ≤ 4 idempotent and cap-annihilated"))
}

fn cup_distribution() -> Result<(bool, String)> {
    let t = series(&NamedLaw::Semicircle, 10)?;
    let c: P = cup();
    let mut bad = 0;
    for n in 0..=10 {
        let v = tau_k(&c.power(n)?, &t)?;
        let expect = if n % 2 == 1 {
            LaurentScalar::zero()
        } else {
            LaurentScalar::delta_power((n / 2) as i64).scale(&Rational::from_integer(catalan(n / 2)))
        };
        bad += usize::from(v != expect);
    }
    Ok(verdict(bad, 11, "moments of ∪ up to order 10"))
}

fn side_cap_distribution() -> Result<(bool, String)> {
    let mut bad = 0;
    let laws = [NamedLaw::Semicircle, NamedLaw::FreePoisson];
    for law in &laws {
        let t = series(law, 8)?;
        let k = to_laurent(&law.cumulants(8));
        let scaled = CumulantSeq::new(k.k.iter().map(|c| c * &LaurentScalar::delta_power(-1)).collect());
        let expect = cumulants_to_moments(&scaled)?;
        let y: P = x_variable::<LaurentScalar>().scale(&LaurentScalar::delta_power(-1));
        for p in 1..=8 {
            bad += usize::from(tau_k(&y.power(p)?, &t)? != expect.moment(p));
        }
    }
    Ok(verdict(bad, 16, "moments of δ⁻¹·Λ against ν^{⊞1/δ}"))
}

fn traciality() -> Result<(bool, String)> {
    let (mut bad, mut total) = (0, 0);
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson] {
        let t = series(&law, 4)?;
        for k in 0..=2 {
            let basis: Vec<(usize, P)> = (0..=4)
                .flat_map(|n| basis_diagrams(n, k).into_iter().map(move |d| (n, d)))
                .map(|(n, d)| P::basis(k, d).map(|x| (n, x)))
                .collect::<Result<_>>()?;
            for (na, a) in &basis {
                for (nb, b) in &basis {
                    if na + nb > 4 {
                        continue;
                    }
                    total += 1;
                    bad += usize::from(tau_k(&a.wedge(b)?, &t)? != tau_k(&b.wedge(a)?, &t)?);
                }
            }
        }
    }
    Ok(verdict(bad, total, "basis pairs with total degree ≤ 4, k ≤ 2"))
}

fn product_formula_check() -> Result<(bool, String)> {
    let c: P = cup();
    let choices = [c.clone(), c.power(2)?];
    let (mut bad, mut total) = (0, 0);
    for law in [NamedLaw::Semicircle, NamedLaw::FreePoisson] {
        let t = series(&law, 6)?;
        let kp = PaCumulants::compute(&t, 6)?;
        for n in 1..=3 {
            for code in 0..(1usize << n) {
                let xs: Vec<P> = (0..n).map(|i| choices[(code >> i) & 1].clone()).collect();
                total += 1;
                bad += usize::from(gr0_free_cumulant(&xs, &t)? != product_formula(&xs, &kp)?);
            }
        }
    }
    Ok(verdict(bad, total, "argument tuples from {∪, ∪∧∪}"))
}

fn gram_positivity() -> Result<(bool, String)> {
    let t = series(&NamedLaw::Semicircle, 6)?;
    let basis: Vec<P> = basis_up_to(3, 0).into_iter().map(|d| P::basis(0, d)).collect::<Result<_>>()?;
    let deltas = [rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)];
    let mut bad = 0;
    for d in &deltas {
        bad += usize::from(!gram_psd(&basis, &t, d)?.1);
    }
    Ok(verdict(bad, deltas.len(), "values of δ with a PSD Gram matrix"))
}

fn conjugate_variable_check() -> Result<(bool, String)> {
    let t = series(&NamedLaw::Semicircle, 8)?;
    let cv = conjugate_variable(&t, 3, &DeltaChoice::Value(rat(2, 1)), Pairing::Diagrammatic)?;
    let ok = cv.xi == x_variable::<Q>() && cv.is_exact() && cv.held_out_checked;
    Ok((ok, format!("ξ has {} term(s), residual {}, held-out defect {}", cv.xi.terms().len(), cv.residual_norm, cv.held_out_norm)))
}

fn adjoint_identity() -> Result<(bool, String)> {
    let t = series(&NamedLaw::Semicircle, 8)?;
    let (d, xi) = (rat(2, 1), x_variable::<LaurentScalar>());
    let mut boxes = Vec::new();
    for s in 0..=2 {
        for u in 0..=2 - s {
            boxes.extend(box_basis(1, s, u).into_iter().map(|key| BoxElement::from_key(1, key, LaurentScalar::one())));
        }
    }
    let (mut bad, mut total) = (0, 0);
    for a in basis_up_to(3, 1) {
        let a = P::basis(1, a)?;
        let da = diff_quotient(&a)?;
        for q in &boxes {
            total += 1;
            let lhs = inner_box(&da, q, &t, Pairing::Diagrammatic)?.eval(&d)?;
            let rhs = inner_gr1(&a, &partial_star(q, &t, &xi, Pairing::Diagrammatic)?, &t)?.eval(&d)?;
            bad += usize::from(lhs != rhs);
        }
    }
    Ok(verdict(bad, total, "pairs (a, Q) at δ = 2"))
}

fn jones_wenzl_compression() -> Result<(bool, String)> {
    let jw: TLElement<Q> = jw2();
    let e = TLElement::<Q>::e_gen(2, 1)?;
    let ok = partial_prime(&embedded_cup::<Q>())?.is_zero()
        && jw.compose(&jw)? == jw
        && e.compose(&jw)?.is_zero()
        && jw.compose(&e)?.is_zero();
    Ok((ok, "∂′ kills the embedded cup; JW₂ idempotent and E-annihilated".into()))
}

fn sd_free_limit() -> Result<(bool, String)> {
    let g = solve_sd(&Potential::quadratic(), 6, 2)?;
    let ok = g.order_series(&[])? == series(&NamedLaw::Semicircle, 6)?;
    Ok((ok, "quadratic potential gives the semicircle series to depth 6".into()))
}

fn sd_quartic_oracle() -> Result<(bool, String)> {
    let v = Potential::new([("t1".to_string(), quartic_cable())])?;
    let g = solve_sd(&v, 6, 2)?;
    let mut bad = 0;
    for m in 0..=2 {
        bad += usize::from(g.coefficients(&[1], m)? != tangle_oracle(&v, m, &[1])?);
    }
    Ok(verdict(bad, 3, "order-t¹ coefficients with m ≤ 2 matching the tangle oracle"))
}

fn wick_catalan() -> Result<(bool, String)> {
    let g = BipartiteGraph::single_edge();
    let mut bad = 0;
    for p in 0..=6 {
        let v = wick_expectation(&LoopWord::power(&g, 0, 2 * p)?, &g)?;
        bad += usize::from(v != catalan(p).to_string().parse::<f64>().unwrap_or(f64::NAN));
    }
    Ok(verdict(bad, 7, "even moments of the single-edge loop"))
}

fn traced_rotation_invariance() -> Result<(bool, String)> {
    let g = BipartiteGraph::path(4)?;
    let w = LoopWord::new(&g, "a1", vec![Letter::new(0, 1), Letter::new(2, 2), Letter::new(2, 2), Letter::new(1, 0)])?;
    let base = loop_vs_diagram(&w, &g)?.traced;
    let mut bad = 0;
    for r in 1..w.len() {
        let v = loop_vs_diagram(&w.rotate(&g, r)?, &g)?.traced;
        bad += usize::from((v - base).abs() > 1e-12 * base.abs().max(1.0));
    }
    Ok(verdict(bad, w.len() - 1, "rotations of a loop on A_4"))
}

fn monte_carlo_single_edge() -> Result<(bool, String)> {
    let g = BipartiteGraph::single_edge();
    let w = LoopWord::power(&g, 0, 4)?;
    let cfg = MCConfig::new(200, 500, 7);
    let a = mc_estimate(&w, &g, &cfg)?;
    let b = mc_estimate(&w, &g, &cfg)?;
    let ok = (a.mean - 2.0).abs() <= 3.0 * a.stderr && a == b;
    Ok((ok, format!("mean {:.4} ± {:.4} against 2, reproducible: {}", a.mean, a.stderr, a == b)))
}

fn checks(suite: Suite) -> Vec<(&'static str, &'static str, Check)> {
    let core: Vec<(&'static str, Check)> = vec![
        ("kreweras-rotation", kreweras_rotation),
        ("nc-counts", nc_counts),
        ("moment-cumulant-roundtrip", moment_cumulant_roundtrip),
        ("mobius-inverts-zeta", mobius_inverts_zeta),
        ("tl-associativity", tl_associativity),
        ("jones-wenzl", jones_wenzl_idempotents),
    ];
    let planar: Vec<(&'static str, Check)> = vec![
        ("cup-distribution", cup_distribution),
        ("side-cap-distribution", side_cap_distribution),
        ("traciality", traciality),
        ("product-formula", product_formula_check),
        ("gram-positivity", gram_positivity),
    ];
    let calc: Vec<(&'static str, Check)> = vec![
        ("conjugate-variable", conjugate_variable_check),
        ("adjoint-identity", adjoint_identity),
        ("jones-wenzl-compression", jones_wenzl_compression),
    ];
    let gibbs: Vec<(&'static str, Check)> =
        vec![("sd-free-limit", sd_free_limit), ("sd-quartic-oracle", sd_quartic_oracle)];
    let graph: Vec<(&'static str, Check)> = vec![
        ("wick-catalan", wick_catalan),
        ("traced-rotation", traced_rotation_invariance),
        ("monte-carlo-single-edge", monte_carlo_single_edge),
    ];
    let groups = [("core", core), ("planar", planar), ("calc", calc), ("gibbs", gibbs), ("graph", graph)];
    let wanted = match suite {
        Suite::Core => Some("core"),
        Suite::Planar => Some("planar"),
        Suite::Calc => Some("calc"),
        Suite::Gibbs => Some("gibbs"),
        Suite::Graph => Some("graph"),
        Suite::All => None,
    };
    groups
        .into_iter()
        .filter(|(name, _)| wanted.is_none_or(|w| w == *name))
        .flat_map(|(s, cs)| cs.into_iter().map(move |(n, c)| (s, n, c)))
        .collect()
}

/// Run every check of a suite in order.
pub fn run(suite: Suite) -> Vec<CheckResult> {
    checks(suite)
        .into_iter()
        .map(|(suite, name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { suite, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

/// Render results as a fixed-width table.
pub fn table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.suite.len() + r.name.len() + 1).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let label = format!("{}/{}", r.suite, r.name);
        let mark = if r.passed { "PASS" } else { "FAIL" };
        out += &format!("{mark}  {label:<width$}  {:>8.3}s  {}\n", r.seconds, r.detail);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out += &format!("{passed}/{} checks passed\n", results.len());
    out
}
