//! `superpattern`: command-line front end for the `superpattern` library.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{CliError, Format};

#[derive(Parser, Debug)]
#[command(name = "superpattern", version, about = "Permutation pattern experiments", long_about = None)]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for enumeration and simulation [default: all cores].
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,

    /// Largest number of index subsets an exact enumeration may visit.
    #[arg(long, global = true, default_value_t = superpattern::pattern::DEFAULT_BUDGET)]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

/// A host given inline or as a file in the `# r=<int>` text format.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false, id = "host")]
pub struct HostArgs {
    /// Inline host, comma or space separated. A permutation unless `--r` is given.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,

    /// Host file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SequenceAlphabet {
    /// Alphabet size for an inline sequence host.
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct WidthParams {
    /// Fraction of the pattern length used as the size of `I`.
    #[arg(long, default_value_t = superpattern::perm_encoding::DEFAULT_C)]
    pub c: f64,

    /// Width threshold multiplier, in units of `n / k`.
    #[arg(long, default_value_t = superpattern::perm_encoding::DEFAULT_D)]
    pub d: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructKind {
    /// `(1..k)` repeated `k` times over `[k]`.
    RepeatedIdentity,
    /// The repeated identity lifted to a permutation of length `k^2`.
    LiftedIdentity,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum HostKind {
    Perm,
    Seq,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a k-superpattern of length k^2 (block repetition of the identity).
    Construct {
        #[arg(long, value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        k: usize,
    },
    /// Find the lexicographically first occurrence of a pattern.
    Contains {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        /// Pattern, comma separated.
        #[arg(long)]
        pi: String,
    },
    /// Count the distinct length-k patterns of a host exactly.
    CountPatterns {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        #[arg(long)]
        k: usize,
        /// Also list the Lehmer ranks of every pattern present.
        #[arg(long)]
        list_ranks: bool,
    },
    /// Check whether a host contains every pattern of length k.
    Universal {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        #[arg(long)]
        k: usize,
    },
    /// Encode a pattern occurrence in a permutation by its wide gaps.
    EncodePerm {
        #[command(flatten)]
        host: HostArgs,
        /// Increasing 1-based positions of the occurrence; its length is k.
        #[arg(long)]
        occ: String,
        #[command(flatten)]
        params: WidthParams,
    },
    /// Recover a pattern from its width-based encoding.
    DecodePerm {
        #[command(flatten)]
        host: HostArgs,
        /// Encoding JSON, inline or `@path`.
        #[arg(long)]
        encoding: String,
        #[command(flatten)]
        params: WidthParams,
    },
    /// Encode a pattern occurrence in an r-ary sequence by relative positions.
    EncodeSeq {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        /// 1-based positions; increasing unless `--value-indexed`.
        #[arg(long)]
        occ: String,
        /// Read `--occ` as `t_1..t_k` with `seq(t_i) = i`.
        #[arg(long)]
        value_indexed: bool,
        /// Fraction of the pattern length stored as relative positions.
        #[arg(long, default_value_t = 0.4)]
        c: f64,
    },
    /// Recover a pattern from its relative-position encoding.
    DecodeSeq {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        /// Encoding JSON, inline or `@path`.
        #[arg(long)]
        encoding: String,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
    },
    /// Widths around the even-indexed entries of an index subset.
    Widths {
        /// Host length.
        #[arg(long)]
        n: usize,
        /// Increasing 1-based positions; their count is k.
        #[arg(long)]
        occ: String,
        #[command(flatten)]
        params: WidthParams,
    },
    /// Splits of each symbol by a set of prefix positions, with gap counts.
    Splits {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        /// 1-based prefix positions.
        #[arg(long, default_value = "")]
        prefix: String,
        /// Report a single symbol, with the number of realizable relative-position vectors.
        #[arg(long)]
        m: Option<u32>,
        /// Pattern length used for the common-symbol cutoff [default: r].
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_FULL_FRAC)]
        full_frac: f64,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_COMMON_FRAC)]
        common_frac: f64,
    },
    /// Gaps between consecutive occurrences of a symbol and which are full;
    /// without `--m`, the common symbols with few full gaps.
    FullGaps {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        #[arg(long)]
        m: Option<u32>,
        /// Pattern length [default: r].
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_FULL_FRAC)]
        full_frac: f64,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_COMMON_FRAC)]
        common_frac: f64,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_WITNESS_FRAC)]
        witness_frac: f64,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_HYPOTHESIS_FRAC)]
        hypothesis_frac: f64,
    },
    /// Monte Carlo experiments on random index subsets and sequences.
    Simulate {
        #[command(subcommand)]
        what: Simulation,
    },
    /// Verify a named constant inequality in log space (`all` for every one).
    Certify {
        name: String,
        /// Override a parameter, as `key=value`.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Counting conditions C(n,k) >= k! and C(r,k)(n/k)^k >= k!.
    TrivialBounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Encode and decode every occurrence, for one host or for all hosts of length n.
    RoundtripTest {
        #[arg(long, value_enum)]
        kind: HostKind,
        /// Host length for an exhaustive sweep.
        #[arg(long, conflicts_with_all = ["sigma", "input"])]
        n: Option<usize>,
        /// Pattern length (permutations only; sequences use k = r).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        d: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Simulation {
    /// Widths of uniform k-subsets of [n] against d n / k (csv: one row per width).
    Widths {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Gap sequences of uniform k-subsets of [n] (csv: one row per gap).
    Composition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Splits of a symbol when each prefix symbol picks a uniform occurrence.
    Splits {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        alphabet: SequenceAlphabet,
        #[arg(long)]
        m: u32,
        /// Symbols whose chosen occurrences form the prefix.
        #[arg(long)]
        prefix_symbols: String,
        #[arg(long, default_value_t = superpattern::seq_encoding::DEFAULT_FULL_FRAC)]
        full_frac: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report(&CliError::Usage(first_line(&e.to_string())));
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn first_line(msg: &str) -> String {
    let mut lines = msg.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut line = lines.next().unwrap_or("invalid usage").trim_start_matches("error:").trim().to_string();
    if line.ends_with(':') {
        if let Some(next) = lines.next() {
            line = format!("{line} {next}");
        }
    }
    line
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("error[{}]: {}", e.code(), e);
    ExitCode::from(e.exit_status())
}
