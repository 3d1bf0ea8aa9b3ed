//! One handler per subcommand.

mod algebra;
mod graph;
mod planar;

use crate::args::{Command, LawArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{rational_list, Output};
use crate::suite;
use tlfree_core::law::{to_laurent, NamedLaw};
use tlfree_core::Error;
use tlfree_planar::TSeries;

/// Result of a command: its output, plus a failure to report after the
/// output has been written.
pub struct Outcome {
    pub output: Output,
    pub failure: Option<CliError>,
}

impl From<Output> for Outcome {
    fn from(output: Output) -> Self {
        Outcome { output, failure: None }
    }
}

pub fn dispatch(cfg: &RunConfig) -> CliResult<Outcome> {
    let caps = &cfg.caps;
    match &cfg.command {
        Command::Nc(c) => algebra::nc(c, caps).map(Into::into),
        Command::Tl(c) => algebra::tl(c, caps).map(Into::into),
        Command::Law(c) => algebra::law(c, caps).map(Into::into),
        Command::Trace(c) => planar::trace(c, caps).map(Into::into),
        Command::Calc(c) => planar::calc(c, caps).map(Into::into),
        Command::Gibbs(c) => planar::gibbs(c).map(Into::into),
        Command::Graph(c) => graph::graph(c).map(Into::into),
        Command::Report(c) => graph::report(c, caps).map(Into::into),
        Command::Verify(v) => {
            let results = suite::run(v.suite);
            let failed = results.iter().filter(|r| !r.passed).count();
            let output = if v.json { Output::Json(crate::io::to_json(&results)?) } else { Output::Text(suite::table(&results)) };
            let failure = (failed > 0).then_some(CliError::Verify { failed, total: results.len() });
            Ok(Outcome { output, failure })
        }
    }
}

/// Resolve the law flags.
pub(crate) fn named_law(l: &LawArgs) -> CliResult<NamedLaw> {
    match (l.law.as_str(), &l.cumulants) {
        ("custom", Some(ks)) => Ok(NamedLaw::Custom(rational_list(ks)?)),
        ("custom", None) => Err(Error::arg("--law custom needs --cumulants").into()),
        (name, None) => Ok(NamedLaw::parse(name)?),
        (name, Some(_)) => Err(Error::arg(format!("--cumulants only applies to --law custom, not {name:?}")).into()),
    }
}

/// The capping series of a law up to `depth`.
pub(crate) fn law_series(l: &LawArgs, depth: usize, max_nc: usize) -> CliResult<TSeries> {
    let law = named_law(l)?;
    Ok(TSeries::from_cumulants_with_cap(&to_laurent(&law.cumulants(depth)), max_nc)?)
}
