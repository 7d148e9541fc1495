//! Command-line front end for robin-core. The `robin` binary is a thin
//! wrapper around [`run`].

mod commands;
mod render;

use std::fs::File;
use std::ffi::OsString;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robin_core::criteria::{ScanFilter, ThresholdKind};

use render::{Format, Sink};

/// Exit status of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Violation = 1,
    Usage = 2,
    Unresolved = 3,
}

impl Status {
    /// The worse of two outcomes: unresolved beats violation beats ok.
    pub fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Unresolved => 2,
            Status::Usage => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(robin_core::Error),
    Io(io::Error),
}

impl From<robin_core::Error> for Failure {
    fn from(e: robin_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn status(&self) -> Status {
        use robin_core::Error as E;
        match self {
            Failure::Core(E::PrecisionExhausted { .. } | E::UnresolvedFloor { .. } | E::Tie { .. } | E::ThresholdTie { .. }) => {
                Status::Unresolved
            }
            _ => Status::Usage,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

pub type CmdResult = Result<Status, Failure>;

#[derive(Parser, Debug)]
#[command(name = "robin", version, about = "Certified Robin-type inequality checks and colossally abundant numbers")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Largest working precision, in bits, before a comparison is reported unresolved.
    #[arg(
        long,
        env = "ROBIN_PRECISION_CEILING",
        default_value_t = 4096,
        value_parser = clap::value_parser!(u32).range(64..=1 << 20),
        global = true
    )]
    pub precision_ceiling: u32,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Omit the version/timestamp block from JSON output.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Worker threads for range scans (default: logical CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Binary prime table reused across runs.
    #[arg(long, global = true)]
    pub sieve_cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Threshold {
    Egamma,
    HalfEgamma,
    ThreequarterEgamma,
    C045Egamma,
}

impl From<Threshold> for ThresholdKind {
    fn from(t: Threshold) -> Self {
        match t {
            Threshold::Egamma => ThresholdKind::Egamma,
            Threshold::HalfEgamma => ThresholdKind::HalfEgamma,
            Threshold::ThreequarterEgamma => ThresholdKind::ThreequarterEgamma,
            Threshold::C045Egamma => ThresholdKind::C045Egamma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    All,
    Odd,
    OddSquarefree,
    TwoPowerTimesSquarefree,
}

impl From<Filter> for ScanFilter {
    fn from(f: Filter) -> Self {
        match f {
            Filter::All => ScanFilter::All,
            Filter::Odd => ScanFilter::Odd,
            Filter::OddSquarefree => ScanFilter::OddSquarefree,
            Filter::TwoPowerTimesSquarefree => ScanFilter::TwoPowerTimesSquarefree,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Robin,
    Lagarias,
}

/// An integer given either in decimal or already factored.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Subject {
    /// The integer in decimal; it is factored internally.
    #[arg(long)]
    pub n: Option<String>,
    /// The factorization, e.g. `3^4*5^3*7^2*11`.
    #[arg(long)]
    pub factored: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Colossally abundant numbers below a bound, each with a Robin check.
    GenCa {
        #[arg(long, default_value = "10000000")]
        below: String,
        /// Stop after this many records.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, default_value = "egamma")]
        threshold: Threshold,
    },
    /// Odd colossally abundant numbers, each with a check against the odd analogue.
    GenOca {
        /// Records below c0 (the default).
        #[arg(long, conflicts_with_all = ["through_c0", "below"])]
        below_c0: bool,
        /// Records up to and including c0.
        #[arg(long, conflicts_with = "below")]
        through_c0: bool,
        /// Records below this bound.
        #[arg(long)]
        below: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, default_value = "half-egamma")]
        threshold: Threshold,
    },
    /// Decide sigma(n)/(n log log n) < T.
    CheckRobin {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, value_enum, default_value = "egamma")]
        threshold: Threshold,
    },
    /// Decide the odd harmonic-number analogue of Lagarias' inequality.
    CheckLagarias {
        #[command(flatten)]
        subject: Subject,
        /// Check sigma(n) <= (e^gamma/2) n log log n + 2.8 n/log n instead.
        #[arg(long)]
        chain: bool,
    },
    /// Exhaustive range scan.
    Scan {
        #[arg(long, value_enum, default_value = "robin")]
        kind: ScanKind,
        #[arg(long, value_enum, default_value = "egamma")]
        threshold: Threshold,
        #[arg(long, value_enum, default_value = "all")]
        filter: Filter,
        #[arg(long, default_value_t = 3)]
        from: u64,
        /// Inclusive upper end (default 10^6 for robin, 10^5 for lagarias).
        #[arg(long)]
        to: Option<u64>,
    },
    /// Greedy CA-like construction with certified Robin compliance.
    CaLike {
        /// Starting prime.
        #[arg(long)]
        x: u64,
        /// Descending `p:c` pairs, e.g. `13:0.67,11:0.91`.
        #[arg(long)]
        schedule: String,
        /// Skip the step at p = 2.
        #[arg(long)]
        odd: bool,
    },
    /// Real exponent k maximizing g(n, k, 2).
    MaxK {
        #[arg(long)]
        n: String,
    },
    /// Table of g(n, k, p) for k = 0..=k-max.
    GCurve {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 60)]
        k_max: u32,
        /// Two-column `k g` output for gnuplot (overrides --format).
        #[arg(long)]
        gnuplot: bool,
    },
    /// Exponents alpha_p(eps) and the cut points x_k.
    Xk {
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        /// Also verify the x_k comparison inequalities.
        #[arg(long)]
        lemma: bool,
    },
    /// Certified enclosures of named constants.
    Constants {
        /// One of gamma, egamma, pi, B, alpha41, alpha43 (default: all).
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 4)]
        digits: u32,
        /// Explicit prime limit for B and the mod-4 products.
        #[arg(long)]
        prime_limit: Option<u64>,
    },
    /// Numeric verification of a supporting bound.
    VerifyLemma {
        /// L3_1, L3_3_C, P3_5_threshold, L4_1, L4_2, L4_3 or L4_4_concavity.
        #[arg(long)]
        lemma: String,
        /// Sample override: `int:LO..HI`, `geo:LO..HI:POINTS`, joined with `+`.
        #[arg(long)]
        samples: Option<String>,
    },
    /// Reproduce the tables of colossally abundant numbers.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: u8,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenCa { .. } => "gen-ca",
            Command::GenOca { .. } => "gen-oca",
            Command::CheckRobin { .. } => "check-robin",
            Command::CheckLagarias { .. } => "check-lagarias",
            Command::Scan { .. } => "scan",
            Command::CaLike { .. } => "ca-like",
            Command::MaxK { .. } => "max-k",
            Command::GCurve { .. } => "g-curve",
            Command::Xk { .. } => "xk",
            Command::Constants { .. } => "constants",
            Command::VerifyLemma { .. } => "verify-lemma",
            Command::Tables { .. } => "tables",
        }
    }
}

fn execute(cli: Cli, stdout: &mut (dyn Write + Send)) -> CmdResult {
    let out: Box<dyn Write + Send + '_> = match &cli.global.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    };
    let mut sink = Sink::new(cli.global.format, !cli.global.no_meta, out);
    let ctx = commands::Context::new(&cli.global);
    let name = cli.command.name();
    match cli.global.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| Failure::Usage(e.to_string()))?;
            pool.install(|| commands::dispatch(&ctx, name, cli.command, &mut sink))
        }
        None => commands::dispatch(&ctx, name, cli.command, &mut sink),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code: 0 ok, 1 violation, 2 usage error, 3 unresolved.
pub fn run<I, T>(argv: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match execute(cli, stdout) {
        Ok(s) => s as i32,
        Err(e) => {
            let _ = writeln!(stderr, "robin: {e}");
            e.status() as i32
        }
    }
}

/// [`run`] with output collected into a string.
pub fn run_captured(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("robin").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut io::sink());
    (code, String::from_utf8(out).expect("output is UTF-8"))
}
