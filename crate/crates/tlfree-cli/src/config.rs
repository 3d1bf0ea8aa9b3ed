//! Run configuration and the caps checked before any engine call.

use crate::args::{CalcCmd, Cli, Command, GibbsCmd, GraphCmd, LawCmd, NcCmd, ReportCmd, TlCmd, TraceCmd};
use crate::error::{CliError, CliResult};
use serde::Serialize;
use tlfree_core::nc::DEFAULT_NC_CAP;
use tlfree_core::tl::DEFAULT_JW_CAP;
use tlfree_core::Error;

/// Largest Schwinger-Dyson depth accepted by the driver.
pub const MAX_GIBBS_DEPTH: usize = 6;
/// Largest total degree in the couplings accepted by the driver.
pub const MAX_T_DEGREE: usize = 2;

/// Resource caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_nc: usize,
    pub max_depth: usize,
    pub max_t_degree: usize,
    pub max_jw: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_nc: DEFAULT_NC_CAP, max_depth: MAX_GIBBS_DEPTH, max_t_degree: MAX_T_DEGREE, max_jw: DEFAULT_JW_CAP }
    }
}

/// A parsed command together with its caps and global flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub caps: Caps,
    pub threads: Option<usize>,
    pub out: Option<std::path::PathBuf>,
}

fn limit(what: &str, value: usize, cap: usize) -> CliResult<()> {
    if value > cap {
        return Err(Error::ResourceLimit(format!("{what} {value} exceeds the cap {cap}")).into());
    }
    Ok(())
}

impl RunConfig {
    /// Build from parsed arguments and check every cap.
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let mut caps = Caps::default();
        if let Some(n) = cli.max_nc {
            caps.max_nc = n;
        }
        if cli.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        let cfg = RunConfig { command: cli.command, caps, threads: cli.threads, out: cli.out };
        cfg.enforce_caps()?;
        Ok(cfg)
    }

    /// Reject requests whose size already exceeds a cap.
    pub fn enforce_caps(&self) -> CliResult<()> {
        let c = &self.caps;
        let nc = |what: &str, n: usize| limit(what, n, c.max_nc);
        match &self.command {
            Command::Nc(NcCmd::Enumerate { n }) => nc("NC size", *n),
            Command::Tl(TlCmd::Basis { m }) => nc("TL size", *m),
            Command::Tl(TlCmd::Jw { n, .. }) => limit("Jones-Wenzl size", *n, c.max_jw),
            Command::Law(LawCmd::Moments { depth, .. } | LawCmd::Power { depth, .. } | LawCmd::Divisible { depth, .. }) => {
                nc("law depth", *depth)
            }
            Command::Trace(TraceCmd::CupMoments { max, .. }) => nc("moment order", *max),
            Command::Trace(TraceCmd::Cumulant { m, .. }) => nc("cumulant order", *m),
            Command::Trace(TraceCmd::Gram { max_n, .. }) => nc("Gram trace depth", 2 * max_n),
            Command::Calc(CalcCmd::Conjugate(s) | CalcCmd::Fisher(s)) => nc("conjugate variable depth", 2 * s.cutoff + 1),
            Command::Calc(CalcCmd::Adjoint { solve, .. }) => nc("conjugate variable depth", 2 * solve.cutoff + 1),
            Command::Report(ReportCmd::Fisher { max_cutoff, .. }) => nc("conjugate variable depth", 2 * max_cutoff + 1),
            Command::Gibbs(
                GibbsCmd::Solve { depth, t_degree, .. } | GibbsCmd::Residual { depth, t_degree, .. },
            ) => {
                limit("Schwinger-Dyson depth", *depth, c.max_depth)?;
                limit("t-degree", *t_degree, c.max_t_degree)
            }
            Command::Gibbs(GibbsCmd::Oracle { m, .. } | GibbsCmd::Connected { m, .. }) => {
                limit("tangle size", *m, c.max_depth)
            }
            Command::Graph(GraphCmd::Path { n }) => limit("path length", *n, 64),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn config(args: &[&str]) -> CliResult<RunConfig> {
        RunConfig::from_cli(Cli::try_parse_from(std::iter::once("tlfree").chain(args.iter().copied())).unwrap())
    }

    fn code(args: &[&str]) -> i32 {
        config(args).map(|_| 0).unwrap_or_else(|e| e.exit_code())
    }

    #[test]
    fn nc_cap_is_the_default() {
        assert_eq!(code(&["nc", "enumerate", "12"]), 0);
        assert_eq!(code(&["nc", "enumerate", "13"]), 2);
        assert_eq!(code(&["--max-nc", "20", "nc", "enumerate", "13"]), 0);
    }

    #[test]
    fn derived_depths_are_capped() {
        assert_eq!(code(&["trace", "gram", "--max-n", "6", "--delta", "2"]), 0);
        assert_eq!(code(&["trace", "gram", "--max-n", "7", "--delta", "2"]), 2);
        assert_eq!(code(&["calc", "conjugate", "--cutoff", "5"]), 0);
        assert_eq!(code(&["calc", "conjugate", "--cutoff", "6"]), 2);
    }

    #[test]
    fn gibbs_caps() {
        assert_eq!(code(&["gibbs", "solve", "--potential", "{}", "--depth", "6", "--t-degree", "2"]), 0);
        assert_eq!(code(&["gibbs", "solve", "--potential", "{}", "--depth", "7", "--t-degree", "2"]), 2);
        assert_eq!(code(&["gibbs", "solve", "--potential", "{}", "--depth", "6", "--t-degree", "3"]), 2);
        assert_eq!(code(&["tl", "jw", "7"]), 2);
    }

    #[test]
    fn zero_threads_is_a_usage_error() {
        assert_eq!(code(&["--threads", "0", "nc", "count", "3"]), 64);
        assert_eq!(config(&["--threads", "3", "nc", "count", "3"]).unwrap().threads, Some(3));
    }
}
