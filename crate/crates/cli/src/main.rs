use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "ptrank", version)]
#[command(about = "Partial-transpose rank: exact oracles, certificates and the verification suite")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Field descriptor: gf2, gf:3, rational, complex, cycmod:5, cycmod:<q>:<n>:<omega>
    /// (default gf2; complex for candidate scans)
    #[arg(long, global = true)]
    pub field: Option<String>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Cap on enumerated assignments for the exhaustive oracles
    #[arg(long, global = true)]
    pub budget: Option<u128>,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Allow candidate parameters outside the default policy
    #[arg(long, global = true)]
    pub relax: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write a matrix, certificate or candidate to JSON
    Gen(GenArgs),
    /// Partial transposes, exact and heuristic PT-rank, census, certificate checks
    #[command(subcommand)]
    Pt(PtCmd),
    /// Sum-of-squares certificates and conversions
    #[command(subcommand)]
    Sos(SosCmd),
    /// Relative-rank measure ρ on path subgraphs
    #[command(subcommand)]
    Rho(RhoCmd),
    /// Ordered branching programs
    #[command(subcommand)]
    Abp(AbpCmd),
    /// Rank scans of root-of-unity candidates W_T
    #[command(subcommand)]
    Candidates(CandidatesCmd),
    /// Run the acceptance criteria and emit a pass/fail report
    VerifyPaper(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Identity,
    Random,
    RandomFullySymmetric,
    #[value(name = "example-3-squared", alias = "swap")]
    Example3Squared,
    ExampleIdentityDecomposition,
    Wt,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TFamily {
    Zero,
    Identity,
    Cyclic,
    Triangular,
    Cauchy,
}

#[derive(Args)]
pub struct GenArgs {
    pub family: Family,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Exponent matrix for `wt`
    #[arg(long = "t", value_enum, default_value = "cyclic")]
    pub t_family: TFamily,
}

#[derive(Subcommand)]
pub enum PtCmd {
    /// Rank and all partial-transpose ranks of a matrix
    Rank { input: PathBuf },
    /// Partial transpose over the listed blocks
    Transpose {
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<usize>,
    },
    /// Exhaustive PT-rank with a witness certificate
    Exact {
        input: PathBuf,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Heuristic upper bound
    Search {
        input: PathBuf,
        #[arg(long, default_value = "greedy-peel")]
        strategy: String,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// PT-rank histogram over all (or sampled) matrices
    Census {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Sample this many matrices instead of enumerating
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long)]
        fully_symmetric: bool,
    },
    /// Check a PT certificate
    Verify { cert: PathBuf },
}

#[derive(Subcommand)]
pub enum SosCmd {
    /// Composed identity with n terms for I over [n]^d
    Compose {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Check an SoS certificate against a matrix (default: the identity)
    Verify {
        cert: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Convert an SoS certificate of a fully symmetric matrix to a PT certificate
    ToPt {
        cert: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Convert a PT certificate to an SoS certificate
    FromPt { cert: PathBuf },
}

#[derive(Subcommand)]
pub enum RhoCmd {
    /// Exact ρ of a tensor on the path subgraph given by its labels
    Exact {
        input: PathBuf,
        /// Edges of the subgraph (default: read off the labels)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        edges: Vec<i64>,
    },
    /// Compare PT-rank with ρ of the padded tensor
    CheckIdentity { input: PathBuf },
    /// Randomized lemma checks
    LemmaSuite {
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
}

#[derive(Subcommand)]
pub enum AbpCmd {
    /// Evaluate a program to its tensor
    Eval { input: PathBuf },
    /// PT certificate for a matrix from a program computing its shifted tensor
    ToPt {
        abp: PathBuf,
        matrix: PathBuf,
        /// SoS certificate for the coarse identity
        #[arg(long)]
        provider: Option<PathBuf>,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum CandidatesCmd {
    /// Partial-transpose and λ-flattening ranks of W_T
    Scan {
        /// Candidate JSON; overrides --t, --n, --d and --field
        spec: Option<PathBuf>,
        #[arg(long = "t", value_enum, default_value = "cauchy")]
        t_family: TFamily,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Groups (pt, sos, candidates, lemmas, rho, abp, io), keys or numbers
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub inject_fault: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if g.budget == Some(0) {
        return Err(CliError::Usage("--budget must be positive".into()));
    }
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Gen(a) => commands::gen(g, &a),
        Command::Pt(c) => commands::pt(g, c),
        Command::Sos(c) => commands::sos(g, c),
        Command::Rho(c) => commands::rho(g, c),
        Command::Abp(c) => commands::abp(g, c),
        Command::Candidates(c) => commands::candidates(g, c),
        Command::VerifyPaper(a) => commands::verify_paper(g, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    match dispatch(cli).and_then(|o| o.emit(out.as_deref())) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("ptrank: {e}");
            ExitCode::from(e.code())
        }
    }
}
