//! Traces, free calculus and free Gibbs states.

use super::law_series;
use crate::args::{CalcCmd, GibbsCmd, SolveArgs, TraceCmd};
use crate::config::Caps;
use crate::error::CliResult;
use crate::io::{load, parse_q, rational_json, to_json, usize_list, write_text, Output};
use serde_json::{json, Value};
use tlfree_core::{Error, LaurentScalar, RationalFunctionScalar};
use tlfree_planar::boxes::BoxElement;
use tlfree_planar::calc::{
    conjugate_variable, cyclic_gradient, diff_quotient, fisher_of, inner_box, inner_gr1, partial_prime, partial_star,
    symmetrizer, ConjugateVariable, DeltaChoice, Fisher, Pairing,
};
use tlfree_planar::gibbs::{connected_cumulant_check, multi_indices, sd_residual, solve_sd, tangle_oracle, GibbsTrace, Potential};
use tlfree_planar::pa::{basis_up_to, cond_exp, cup, gr0_free_cumulant, gram_psd, pa_cumulants, product_formula, tau_k, PaCumulants};
use tlfree_planar::{PAElement, TSeries};

type P = PAElement<LaurentScalar>;
type Q = RationalFunctionScalar;

fn element(arg: &str) -> CliResult<P> {
    load("planar algebra element", arg)
}

fn potential(arg: &str) -> CliResult<Potential> {
    load("potential", arg)
}

fn laurent_value(x: &LaurentScalar, delta: Option<&String>) -> CliResult<Value> {
    let mut v = json!({ "value": to_json(x)? });
    if let Some(d) = delta {
        v["at_delta"] = json!({ "delta": d, "value": rational_json(&x.eval(&parse_q(d)?)?) });
    }
    Ok(v)
}

pub fn trace(cmd: &TraceCmd, caps: &Caps) -> CliResult<Output> {
    let v = match cmd {
        TraceCmd::Eval { law, element: e, k, delta } => {
            let x = element(e)?;
            if let Some(k) = k {
                if *k != x.k() {
                    return Err(Error::arg(format!("--k {k} does not match the element's k = {}", x.k())).into());
                }
            }
            let t = law_series(law, x.max_degree().unwrap_or(0), caps.max_nc)?;
            let mut v = laurent_value(&tau_k(&x, &t)?, delta.as_ref())?;
            v["k"] = json!(x.k());
            v
        }
        TraceCmd::CondExp { law, element: e } => {
            let x = element(e)?;
            let t = law_series(law, x.max_degree().unwrap_or(0), caps.max_nc)?;
            to_json(&cond_exp(&x, &t)?)?
        }
        TraceCmd::CupMoments { law, max } => {
            let t = law_series(law, *max, caps.max_nc)?;
            let c: P = cup();
            let moments = (0..=*max).map(|n| to_json(&tau_k(&c.power(n)?, &t)?)).collect::<CliResult<Vec<_>>>()?;
            json!({ "moments": moments })
        }
        TraceCmd::Cumulant { law, m } => {
            let t = law_series(law, *m, caps.max_nc)?;
            to_json(&pa_cumulants(&t, *m)?)?
        }
        TraceCmd::Gram { law, max_n, k, delta } => {
            let t = law_series(law, 2 * max_n, caps.max_nc)?;
            let basis = basis_up_to(*max_n, *k).into_iter().map(|d| P::basis(*k, d)).collect::<Result<Vec<_>, _>>()?;
            let (g, psd) = gram_psd(&basis, &t, &parse_q(delta)?)?;
            let rows: Vec<Vec<Value>> = g.iter().map(|r| r.iter().map(rational_json).collect()).collect();
            json!({ "size": basis.len(), "delta": delta, "psd": psd, "matrix": rows })
        }
        TraceCmd::Product { law, powers } => {
            let ps = usize_list(powers)?;
            let depth: usize = ps.iter().sum();
            let t = law_series(law, depth, caps.max_nc)?;
            let c: P = cup();
            let xs = ps.iter().map(|&p| c.power(p)).collect::<Result<Vec<_>, _>>()?;
            let direct = gr0_free_cumulant(&xs, &t)?;
            let via_formula = product_formula(&xs, &PaCumulants::compute(&t, depth)?)?;
            json!({ "direct": to_json(&direct)?, "product_formula": to_json(&via_formula)?, "agree": direct == via_formula })
        }
    };
    Ok(Output::Json(v))
}

fn solve(s: &SolveArgs, caps: &Caps) -> CliResult<(ConjugateVariable, TSeries)> {
    let t = law_series(&s.law, 2 * s.cutoff + 1, caps.max_nc)?;
    let cv = conjugate_variable(&t, s.cutoff, &DeltaChoice::parse(&s.delta)?, Pairing::parse(&s.pairing)?)?;
    Ok((cv, t))
}

fn fisher_json(f: &Fisher) -> CliResult<Value> {
    Ok(match f {
        Fisher::Finite(v) => json!({ "finite": true, "value": to_json(v)?, "display": f.to_string() }),
        Fisher::Infinite => json!({ "finite": false, "display": f.to_string() }),
    })
}

/// ξ with constant coefficients when δ was specialized.
fn xi_json(cv: &ConjugateVariable) -> CliResult<Value> {
    match &cv.delta {
        Some(d) => to_json(&cv.xi_at(d)?.map_coeffs(|c| LaurentScalar::constant(c.clone()))),
        None => to_json(&cv.xi),
    }
}

pub fn calc(cmd: &CalcCmd, caps: &Caps) -> CliResult<Output> {
    let lift = |x: &P| x.map_coeffs(Q::from_laurent);
    let v = match cmd {
        CalcCmd::Conjugate(s) => {
            let (cv, t) = solve(s, caps)?;
            json!({
                "cutoff": cv.cutoff,
                "delta": cv.delta.as_ref().map(rational_json).unwrap_or(Value::String("formal".into())),
                "pairing": cv.pairing,
                "xi": xi_json(&cv)?,
                "residual_norm": rational_json(&cv.residual_norm),
                "held_out_checked": cv.held_out_checked,
                "held_out_norm": rational_json(&cv.held_out_norm),
                "exact": cv.is_exact(),
                "fisher": fisher_json(&fisher_of(&cv, &t)?)?,
                "warnings": cv.warnings,
            })
        }
        CalcCmd::Fisher(s) => {
            let (cv, t) = solve(s, caps)?;
            let mut v = fisher_json(&fisher_of(&cv, &t)?)?;
            v["cutoff"] = json!(cv.cutoff);
            v
        }
        CalcCmd::Diff { element: e } => to_json(&diff_quotient(&element(e)?)?)?,
        CalcCmd::Gradient { element: e } => to_json(&cyclic_gradient(&element(e)?)?)?,
        CalcCmd::Symmetrize { element: e } => to_json(&symmetrizer(&element(e)?)?)?,
        CalcCmd::PartialPrime { element: e } => to_json(&partial_prime(&lift(&element(e)?))?)?,
        CalcCmd::Adjoint { solve: s, element: e, box_element } => {
            let (cv, t) = solve(s, caps)?;
            let a = lift(&element(e)?);
            let q: BoxElement<LaurentScalar> = load("box element", box_element)?;
            let q = q.map_coeffs(Q::from_laurent);
            let lhs = inner_box(&diff_quotient(&a)?, &q, &t, cv.pairing)?;
            let rhs = inner_gr1(&a, &partial_star(&q, &t, &cv.xi, cv.pairing)?, &t)?;
            let d = cv.reporting_delta();
            let (l, r) = (lhs.eval(&d)?, rhs.eval(&d)?);
            json!({
                "delta": rational_json(&d),
                "lhs": rational_json(&l),
                "rhs": rational_json(&r),
                "equal": l == r,
                "conjugate_variable_exact": cv.is_exact(),
            })
        }
    };
    Ok(Output::Json(v))
}

fn solve_report(g: &GibbsTrace, v: &Potential) -> CliResult<Value> {
    let mut orders = Vec::new();
    for alpha in multi_indices(v.len(), g.truncation()) {
        let Some(slice) = g.slice(&alpha) else { continue };
        let coefficients =
            (0..=slice.coefficient_depth()).map(|m| to_json(&g.coefficients(&alpha, m)?)).collect::<CliResult<Vec<_>>>()?;
        orders.push(json!({ "order": alpha, "depth": slice.depth(), "coefficients": coefficients }));
    }
    // Every order must know the moment, so stop at the shallowest order.
    let moment_depth = multi_indices(v.len(), g.truncation()).iter().filter_map(|a| g.order_depth(a)).min().unwrap_or(0);
    Ok(json!({
        "variables": g.variables(),
        "depth": g.depth(),
        "truncation": g.truncation(),
        "cup_moments": to_json(&g.cup_moments(moment_depth)?)?,
        "orders": orders,
    }))
}

pub fn gibbs(cmd: &GibbsCmd) -> CliResult<Output> {
    let v = match cmd {
        GibbsCmd::Solve { potential: p, depth, t_degree, report } => {
            let v = potential(p)?;
            let g = solve_sd(&v, *depth, *t_degree)?;
            let out = Output::Json(solve_report(&g, &v)?);
            if let Some(path) = report {
                write_text(Some(path), &out.render()?)?;
            }
            return Ok(out);
        }
        GibbsCmd::Residual { potential: p, depth, t_degree, element: e } => {
            let v = potential(p)?;
            let g = solve_sd(&v, *depth, *t_degree)?;
            to_json(&sd_residual(&g, &v, &element(e)?)?)?
        }
        GibbsCmd::Oracle { potential: p, m, order } => to_json(&tangle_oracle(&potential(p)?, *m, &usize_list(order)?)?)?,
        GibbsCmd::Connected { potential: p, m, order } => {
            json!({ "reassembles": connected_cumulant_check(&potential(p)?, *m, &usize_list(order)?)? })
        }
    };
    Ok(Output::Json(v))
}
