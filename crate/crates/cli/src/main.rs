//! `qmi`: JSON front end for the quaternion order library.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] qmi_core::Error),
}

impl From<qmi_core::ParseError> for CliError {
    fn from(e: qmi_core::ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Domain(e) => e.code(),
        }
    }

    fn exit(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmi", version, about = "Exact arithmetic for quaternion orders, level structures and 2-cocycles")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// JSON object supplying inputs by key ("-" for stdin)
    #[arg(long, global = true, value_name = "FILE")]
    pub json_in: Option<PathBuf>,
    /// Largest level for exhaustive enumeration
    #[arg(long, global = true, default_value_t = 12)]
    pub max_level: u64,
    /// Height bound for the CM embedding search
    #[arg(long, global = true, default_value_t = 10)]
    pub search_bound: u64,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Quaternion algebras (a, b | Q)
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Orders: validation, discriminant, level, dual
    #[command(subcommand)]
    Order(OrderCmd),
    /// Left ideals containing or inside an order
    #[command(subcommand)]
    Ideal(IdealCmd),
    /// The level-N quotient O/NO
    #[command(subcommand)]
    Torsion(TorsionCmd),
    /// Double cosets of the unit group and the right action
    #[command(subcommand)]
    Cosets(CosetsCmd),
    /// Change of moduli between an order and an overorder
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Imaginary quadratic embeddings
    #[command(subcommand)]
    Cm(CmCmd),
    /// Q^x-valued 2-cocycles on finite groups
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Run the built-in acceptance criteria
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct AlgArgs {
    #[arg(short = 'a', allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(short = 'b', allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    /// Named fixture order
    #[arg(long)]
    pub fixture: Option<String>,
    /// Order as JSON: {"algebra": .., "basis": [..]} or {"algebra": .., "den": .., "rows": [..]}
    #[arg(long, allow_hyphen_values = true)]
    pub order: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct LevelArg {
    #[arg(short = 'N', long = "level")]
    pub n: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    /// Discriminant and ramified places
    Info(AlgArgs),
    /// Product x * y
    Mul {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Reduced norm and trace of x
    Norm {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrderCmd {
    /// Print the order as JSON
    Show(OrderArgs),
    /// Check the order axioms for a lattice
    Check(OrderArgs),
    /// Reduced discriminant
    Disc(OrderArgs),
    /// Eichler level d(O) / D
    Level(OrderArgs),
    /// Sharp dual lattice
    Dual(OrderArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IdealArgs {
    #[command(flatten)]
    pub order: OrderArgs,
    /// Scalar ideal c O
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<String>,
    /// Principal ideal O g
    #[arg(long, allow_hyphen_values = true)]
    pub generator: Option<String>,
    /// Ideal lattice as {"den": .., "rows": [..]}
    #[arg(long)]
    pub ideal: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum IdealCmd {
    Nrd(IdealArgs),
    /// Isogeny degree nrd(I)^-1
    Degree(IdealArgs),
    /// Structure of I / O
    Kernel(IdealArgs),
}

#[derive(Subcommand, Debug)]
pub enum TorsionCmd {
    /// Weil pairing between O/NO and O#/NO#
    PairingTable {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Units of O/NO
    Units {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        level: LevelArg,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CosetArgs {
    #[command(flatten)]
    pub order: OrderArgs,
    #[command(flatten)]
    pub level: LevelArg,
    /// all | trivial | congruence:M | gens:JSON
    #[arg(long)]
    pub gamma: Option<String>,
    /// trivial | scalars | all | quadratic:X | gens:JSON
    #[arg(long, allow_hyphen_values = true)]
    pub endo: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CosetsCmd {
    Enumerate(CosetArgs),
    /// Permutation of the double cosets induced by right multiplication
    Act {
        #[command(flatten)]
        cosets: CosetArgs,
        #[arg(long)]
        rho: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ModuliArgs {
    /// Smaller order: fixture name or JSON
    #[arg(long)]
    pub small: Option<String>,
    /// Overorder: fixture name or JSON
    #[arg(long)]
    pub big: Option<String>,
    #[command(flatten)]
    pub level: LevelArg,
}

#[derive(Subcommand, Debug)]
pub enum ModuliCmd {
    /// b + O -> b + O0
    Lambda {
        #[command(flatten)]
        args: ModuliArgs,
        #[arg(long)]
        point: Option<String>,
    },
    /// b + O0 -> [O0:O] b + O
    LambdaVee {
        #[command(flatten)]
        args: ModuliArgs,
        #[arg(long)]
        point: Option<String>,
    },
    /// Kernel of lambda
    Kernel(ModuliArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EmbeddingArgs {
    /// Element with x^2 = -d
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Embedding JSON {"d": .., "x": [..]}
    #[arg(long)]
    pub embedding: Option<String>,
    /// Search for an embedding of Q(sqrt(-d))
    #[arg(short = 'd')]
    pub d: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum CmCmd {
    /// Search for x with x^2 = -d
    Embed {
        #[command(flatten)]
        alg: AlgArgs,
        #[arg(short = 'd')]
        d: Option<u64>,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Element anticommuting with x
    J {
        #[command(flatten)]
        alg: AlgArgs,
        #[command(flatten)]
        emb: EmbeddingArgs,
    },
    /// Split level-N units into K, jK and the rest
    Normalizer {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        level: LevelArg,
        #[command(flatten)]
        emb: EmbeddingArgs,
    },
    /// (Q + Qx) intersected with the order
    OptimalOrder {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        emb: EmbeddingArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GroupArg {
    /// Group spec (cyclic:n, dihedral:n, klein, quaternion, products with x) or table JSON
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CocycleCmd {
    /// Check the 2-cocycle identity
    Verify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        values: Option<String>,
    },
    /// Coboundary of a 1-cochain
    Coboundary {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Find alpha with d(alpha) = c, or report the obstruction
    Split {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        values: Option<String>,
    },
    /// Whether two cocycles are cohomologous
    ClassEq {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        c1: Option<String>,
        #[arg(long)]
        c2: Option<String>,
    },
    /// Product in the twisted algebra
    TwistedMul {
        #[command(flatten)]
        alg: AlgArgs,
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        values: Option<String>,
        /// {"x": [..], "g": index}
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
    },
    /// Cocycle defect of a projective representation
    Defect {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        level: LevelArg,
        #[arg(long)]
        rep: Option<String>,
    },
    /// Determinant formula against the norm compatibility
    DetCheck {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        level: LevelArg,
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Replace this fixture by a lattice that is not an order
    #[arg(long)]
    pub corrupt_fixture: Option<String>,
    /// Comma-separated criterion ids
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Emit the report as JSON instead of one line per criterion
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 20240917)]
    pub seed: u64,
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("QMI_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("QMI_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("QMI_THREADS: {e}")))?;
    }
    Ok(())
}

fn report(e: &CliError) -> ExitCode {
    let detail = match e {
        CliError::Domain(d) => d.to_string(),
        CliError::Usage(m) => m.clone(),
    };
    eprintln!("{}", json!({ "error": e.code(), "detail": detail }));
    ExitCode::from(e.exit())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            return report(&CliError::Usage(first));
        }
    };
    if let Err(e) = init_threads() {
        return report(&e);
    }
    match commands::run(&cli) {
        Ok(commands::Output::Json(v)) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Ok(commands::Output::Text { text, ok }) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report(&e),
    }
}
