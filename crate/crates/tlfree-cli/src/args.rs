//! Command-line grammar.
//!
//! JSON-valued arguments accept either a path to a file or the JSON text
//! itself. Sizes are positional; everything else is a long flag.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug, Clone)]
#[command(name = "tlfree", version, about = "Diagrammatic free probability on Temperley-Lieb planar algebras")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest n for which NC(n) may be enumerated.
    #[arg(long, global = true, env = "TLFREE_MAX_NC")]
    pub max_nc: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Non-crossing partitions and their lattice.
    #[command(subcommand)]
    Nc(NcCmd),
    /// Temperley-Lieb diagrams and elements.
    #[command(subcommand)]
    Tl(TlCmd),
    /// Scalar laws: moments, cumulants, convolution powers.
    #[command(subcommand)]
    Law(LawCmd),
    /// Planar algebra traces.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Free differential calculus.
    #[command(subcommand)]
    Calc(CalcCmd),
    /// Free Gibbs states from the Schwinger-Dyson equation.
    #[command(subcommand)]
    Gibbs(GibbsCmd),
    /// Graph planar algebra loop model.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Run an invariant suite and print a pass/fail table.
    Verify(VerifyArgs),
    /// Numeric reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand, Debug, Clone)]
pub enum NcCmd {
    /// All of NC(n) in canonical order.
    Enumerate { n: usize },
    /// |NC(n)| = Catalan(n), without enumerating.
    Count { n: usize },
    /// Kreweras complement.
    Kreweras {
        #[arg(long)]
        partition: String,
    },
    /// Möbius function μ(σ, π) of the lattice.
    Mobius {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        pi: String,
    },
    /// Least upper bound.
    Join {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Greatest lower bound.
    Meet {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Refinement order a ≤ b.
    Leq {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum TlCmd {
    /// Diagram basis of TL(m).
    Basis { m: usize },
    /// Vertical composition a·b, optionally specialized at δ.
    Compose {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Rotate every boundary label by `clicks`.
    Rotate {
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        clicks: i64,
    },
    /// Fattening of a non-crossing partition.
    Fatten {
        #[arg(long)]
        partition: String,
    },
    /// Doubling of every string.
    Cable2 {
        #[arg(long)]
        element: String,
    },
    /// Jones-Wenzl idempotent over ℚ(δ), or specialized at δ.
    Jw {
        n: usize,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Closing pairing Σ a_d b_e δ^{loops(d, e)}.
    Close {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

/// A scalar law: a built-in name or an explicit cumulant list.
#[derive(Args, Debug, Clone)]
pub struct LawArgs {
    /// semicircle, free-poisson or custom.
    #[arg(long, default_value = "semicircle")]
    pub law: String,
    /// Cumulants κ₁,κ₂,… for --law custom.
    #[arg(long)]
    pub cumulants: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum LawCmd {
    /// Moments m₁..m_D, optionally of the ⊞t power.
    Moments {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        t: Option<String>,
    },
    /// Free cumulants of a moment list m₁,m₂,….
    Cumulants {
        #[arg(long)]
        moments: String,
    },
    /// Cumulants of the ⊞t convolution power.
    Power {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        t: String,
        #[arg(long)]
        depth: usize,
    },
    /// Hankel positivity of the ⊞t power up to a depth.
    Divisible {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        t: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum TraceCmd {
    /// τ_k of an element of Gr_k.
    Eval {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        element: String,
        /// Expected side count; must match the element.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Conditional expectation onto P_{0,k}.
    CondExp {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        element: String,
    },
    /// Moments τ₀(∪^n) for n ≤ max.
    CupMoments {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        max: usize,
    },
    /// Planar algebra cumulant κ_m ∈ TL(m).
    Cumulant {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        m: usize,
    },
    /// Gram matrix of the diagram basis of ⊕_{n≤max_n} P_{n,k} at δ.
    Gram {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        delta: String,
    },
    /// Free cumulant of (∪^{p₁}, …, ∪^{p_n}) computed directly and by the
    /// product formula.
    Product {
        #[command(flatten)]
        law: LawArgs,
        /// Comma-separated cup powers p₁,…,p_n.
        #[arg(long)]
        powers: String,
    },
}

/// Conjugate variable solve parameters.
#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub cutoff: usize,
    /// A positive rational, or "formal" to solve over ℚ(δ).
    #[arg(long, default_value = "2")]
    pub delta: String,
    /// diagrammatic or literal.
    #[arg(long, default_value = "diagrammatic")]
    pub pairing: String,
}

#[derive(Subcommand, Debug, Clone)]
pub enum CalcCmd {
    /// Conjugate variable at a cutoff, with residuals.
    Conjugate(SolveArgs),
    /// Free Fisher information at a cutoff.
    Fisher(SolveArgs),
    /// Free difference quotient ∂ of an element of Gr₁.
    Diff {
        #[arg(long)]
        element: String,
    },
    /// Cyclic gradient 𝒟 of an element of Gr₀.
    Gradient {
        #[arg(long)]
        element: String,
    },
    /// Cyclic symmetrizer 𝒮 of an element of Gr₀.
    Symmetrize {
        #[arg(long)]
        element: String,
    },
    /// JW-compressed derivative ∂′ of an element of Gr₁.
    PartialPrime {
        #[arg(long)]
        element: String,
    },
    /// Both sides of ⟨∂a, Q⟩ = ⟨a, ∂*Q⟩ with ξ solved at the cutoff.
    Adjoint {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        element: String,
        #[arg(long = "box")]
        box_element: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum GibbsCmd {
    /// Solve the Schwinger-Dyson equation order by order.
    Solve {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        t_degree: usize,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Schwinger-Dyson defect of a solved trace on a test element of Gr₁.
    Residual {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        t_degree: usize,
        #[arg(long)]
        element: String,
    },
    /// Brute-force tangle expansion of T_m at one order.
    Oracle {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        m: usize,
        /// Comma-separated multi-index, one entry per coupling.
        #[arg(long)]
        order: String,
    },
    /// Whether T_m reassembles from connected tangles at one order.
    Connected {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        order: String,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum GraphCmd {
    /// Validate a graph and report its weights.
    Check {
        #[arg(long)]
        graph: String,
    },
    /// The Dynkin graph A_n with Perron-Frobenius weights.
    Path { n: usize },
    /// Exact Wick value of a loop word.
    Wick {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        word: String,
    },
    /// Monte Carlo estimate of a loop word.
    Mc {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Planar,
    Calc,
    Gibbs,
    Graph,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Emit the table as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ReportCmd {
    /// Interpolated free group parameter t_k = 1 + δ^{-2k} I (δ² − 1).
    Lf {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        index: f64,
        #[arg(long)]
        k: u32,
    },
    /// Free Fisher information for every cutoff up to a maximum.
    Fisher {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        max_cutoff: usize,
        #[arg(long, default_value = "2")]
        delta: String,
    },
    /// Effective resource caps.
    Caps,
}
