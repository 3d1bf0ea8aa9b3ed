//! Graph planar algebra loop model and numeric reports.

use super::law_series;
use crate::args::{GraphCmd, ReportCmd};
use crate::config::Caps;
use crate::error::CliResult;
use crate::io::{load, to_json, Output};
use serde_json::{json, Value};
use tlfree_core::scalar::format_rational;
use tlfree_graph::{lf_parameter, loop_vs_diagram, mc_estimate, BipartiteGraph, LoopWord, MCConfig};
use tlfree_planar::calc::{conjugate_variable, fisher_of, DeltaChoice, Pairing};

fn graph_arg(arg: &str) -> CliResult<BipartiteGraph> {
    load("graph", arg)
}

fn word_arg(arg: &str, g: &BipartiteGraph) -> CliResult<LoopWord> {
    let w: LoopWord = load("word", arg)?;
    w.validate(g)?;
    Ok(w)
}

pub fn graph(cmd: &GraphCmd) -> CliResult<Output> {
    let v = match cmd {
        GraphCmd::Check { graph } => {
            let g = graph_arg(graph)?;
            json!({
                "graph": to_json(&g)?,
                "plus": g.plus_labels().len(),
                "minus": g.minus_labels().len(),
                "edges": g.edges().len(),
                "exact": g.exact().is_some(),
                "eigen_defect": g.eigen_defect(),
            })
        }
        GraphCmd::Path { n } => to_json(&BipartiteGraph::path(*n)?)?,
        GraphCmd::Wick { graph, word } => {
            let g = graph_arg(graph)?;
            let w = word_arg(word, &g)?;
            let lv = loop_vs_diagram(&w, &g)?;
            json!({
                "word": w.to_string(),
                "raw": lv.raw,
                "raw_exact": lv.raw_exact.as_ref().map(|q| Value::String(format_rational(q))),
                "normalized": lv.normalized,
                "traced": lv.traced,
            })
        }
        GraphCmd::Mc { graph, word, dim, samples, seed } => {
            let g = graph_arg(graph)?;
            let w = word_arg(word, &g)?;
            let est = mc_estimate(&w, &g, &MCConfig::new(*dim, *samples, *seed))?;
            let exact = loop_vs_diagram(&w, &g)?.raw;
            let z = if est.stderr > 0.0 { (est.mean - exact) / est.stderr } else { 0.0 };
            let mut v = to_json(&est)?;
            v["exact"] = json!(exact);
            v["z_score"] = json!(z);
            v["seed"] = json!(seed);
            v
        }
    };
    Ok(Output::Json(v))
}

pub fn report(cmd: &ReportCmd, caps: &Caps) -> CliResult<Output> {
    let v = match cmd {
        ReportCmd::Lf { delta, index, k } => json!(lf_parameter(*delta, *index, *k)?),
        ReportCmd::Fisher { law, max_cutoff, delta } => {
            let t = law_series(law, 2 * max_cutoff + 1, caps.max_nc)?;
            let choice = DeltaChoice::parse(delta)?;
            let mut rows = Vec::new();
            for cutoff in 1..=*max_cutoff {
                let cv = conjugate_variable(&t, cutoff, &choice, Pairing::Diagrammatic)?;
                rows.push(json!({ "cutoff": cutoff, "fisher": fisher_of(&cv, &t)?.to_string(), "exact": cv.is_exact() }));
            }
            json!(rows)
        }
        ReportCmd::Caps => to_json(caps)?,
    };
    Ok(Output::Json(v))
}
