//! Partitions, Temperley-Lieb elements and scalar laws.

use super::named_law;
use crate::args::{LawCmd, NcCmd, TlCmd};
use crate::config::Caps;
use crate::error::{CliError, CliResult};
use crate::io::{load, parse_q, rational_json, rational_list, to_json, Output};
use num_traits::One;
use serde_json::json;
use tlfree_core::law::{
    convolution_power, cumulants_to_moments_with_cap, divisibility_check, moments_to_cumulants_with_cap, MomentSeq,
};
use tlfree_core::nc::{catalan, enumerate_nc_with_cap, join, kreweras, leq, meet, mobius, NCPartition};
use tlfree_core::tl::{close_pair, fatten, jones_wenzl_with_cap, specialize_rational_function, tl_basis, TLElement};
use tlfree_core::{Error, LaurentScalar, Rational};

type L = TLElement<LaurentScalar>;

fn partition(arg: &str) -> CliResult<NCPartition> {
    load("partition", arg)
}

fn element(arg: &str) -> CliResult<L> {
    load("TL element", arg)
}

fn check_size(p: &NCPartition, caps: &Caps) -> CliResult<()> {
    if p.n() > caps.max_nc {
        return Err(Error::ResourceLimit(format!("NC size {} exceeds the cap {}", p.n(), caps.max_nc)).into());
    }
    Ok(())
}

/// Evaluate every coefficient at a rational δ, keeping the Laurent wire form.
fn specialize(x: &L, delta: &Rational) -> CliResult<L> {
    let terms = x.terms().iter().map(|(d, c)| Ok((d.clone(), LaurentScalar::constant(c.eval(delta)?))));
    Ok(TLElement::from_terms(x.m(), terms.collect::<CliResult<Vec<_>>>()?)?)
}

pub fn nc(cmd: &NcCmd, caps: &Caps) -> CliResult<Output> {
    let v = match cmd {
        NcCmd::Enumerate { n } => to_json(&enumerate_nc_with_cap(*n, caps.max_nc)?)?,
        NcCmd::Count { n } => json!({ "n": n, "count": catalan(*n).to_string() }),
        NcCmd::Kreweras { partition: p } => to_json(&kreweras(&partition(p)?))?,
        NcCmd::Mobius { sigma, pi } => {
            let (s, p) = (partition(sigma)?, partition(pi)?);
            check_size(&s, caps)?;
            rational_json(&mobius(&s, &p)?)
        }
        NcCmd::Join { a, b } => to_json(&join(&partition(a)?, &partition(b)?)?)?,
        NcCmd::Meet { a, b } => to_json(&meet(&partition(a)?, &partition(b)?)?)?,
        NcCmd::Leq { a, b } => json!(leq(&partition(a)?, &partition(b)?)?),
    };
    Ok(Output::Json(v))
}

pub fn tl(cmd: &TlCmd, caps: &Caps) -> CliResult<Output> {
    let v = match cmd {
        TlCmd::Basis { m } => {
            let basis: Vec<_> = tl_basis(*m).iter().map(|d| d.pairs()).collect();
            json!({ "m": m, "diagrams": basis })
        }
        TlCmd::Compose { a, b, delta } => {
            let c = element(a)?.compose(&element(b)?)?;
            match delta {
                Some(d) => to_json(&specialize(&c, &parse_q(d)?)?)?,
                None => to_json(&c)?,
            }
        }
        TlCmd::Rotate { element: e, clicks } => to_json(&element(e)?.rotate(*clicks))?,
        TlCmd::Fatten { partition: p } => {
            to_json(&L::from_diagram(fatten(&partition(p)?), LaurentScalar::one())?)?
        }
        TlCmd::Cable2 { element: e } => {
            let x = element(e)?;
            let terms = x.terms().iter().map(|(d, c)| (d.cable2(), c.clone()));
            to_json(&L::from_terms(2 * x.m(), terms)?)?
        }
        TlCmd::Jw { n, delta } => {
            let jw = jones_wenzl_with_cap(*n, caps.max_jw)?;
            match delta {
                Some(d) => {
                    let at = specialize_rational_function(&jw, &parse_q(d)?)?;
                    to_json(&at.map_coeffs(|c| LaurentScalar::constant(c.clone())))?
                }
                None => to_json(&jw)?,
            }
        }
        TlCmd::Close { a, b } => {
            let (x, y) = (element(a)?, element(b)?);
            if x.m() != y.m() {
                return Err(CliError::from(Error::arg(format!("sizes differ: {} vs {}", x.m(), y.m()))));
            }
            let mut acc = LaurentScalar::default();
            for (d, c) in x.terms().iter() {
                for (e, f) in y.terms().iter() {
                    let loops = close_pair(d, e)? as i64;
                    acc = acc + c.clone() * f.clone() * LaurentScalar::delta_power(loops);
                }
            }
            to_json(&acc)?
        }
    };
    Ok(Output::Json(v))
}

fn strings(xs: &[Rational]) -> Vec<serde_json::Value> {
    xs.iter().map(rational_json).collect()
}

pub fn law(cmd: &LawCmd, caps: &Caps) -> CliResult<Output> {
    let v = match cmd {
        LawCmd::Moments { law, depth, t } => {
            let named = named_law(law)?;
            let mut k = named.cumulants(*depth);
            if let Some(t) = t {
                k = convolution_power(&k, &parse_q(t)?);
            }
            let m = cumulants_to_moments_with_cap(&k, caps.max_nc)?;
            json!({ "law": named.name(), "t": t.clone().unwrap_or_else(|| "1".into()), "moments": strings(&m.m) })
        }
        LawCmd::Cumulants { moments } => {
            let m = MomentSeq::new(rational_list(moments)?);
            if m.depth() > caps.max_nc {
                return Err(Error::ResourceLimit(format!("law depth {} exceeds the cap {}", m.depth(), caps.max_nc)).into());
            }
            let k = moments_to_cumulants_with_cap(&m, caps.max_nc)?;
            json!({ "cumulants": strings(&k.k) })
        }
        LawCmd::Power { law, t, depth } => {
            let named = named_law(law)?;
            let k = convolution_power(&named.cumulants(*depth), &parse_q(t)?);
            json!({ "law": named.name(), "t": t, "cumulants": strings(&k.k) })
        }
        LawCmd::Divisible { law, t, depth } => {
            let named = named_law(law)?;
            let ok = divisibility_check(&named.cumulants(*depth), &parse_q(t)?, *depth)?;
            json!({ "law": named.name(), "t": t, "depth": depth, "positive": ok })
        }
    };
    Ok(Output::Json(v))
}
