use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jetnorm::{Field, GroupKind};

/// Normal forms of matrices over truncated power series.
///
/// Matrices are written `[a, b; c, d]` with polynomial entries in the
/// declared variables, e.g. `'[x + x^2, 0; 0, y]'`. A matrix argument may
/// also be a file path, or `-` to read standard input.
#[derive(Debug, Parser)]
#[command(name = "jetnorm", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the normal form and its certificate.
    Nf {
        #[command(flatten)]
        common: Common,
        /// Dump the operator and subspace at every degree.
        #[arg(long)]
        explain: bool,
        /// First normalize the constant term with a constant group element
        /// (left, right and two-sided only; the result is then no longer
        /// canonical for the unipotent group).
        #[arg(long)]
        full_g: bool,
        matrix: String,
    },
    /// Evaluate the differential relations a normal form satisfies.
    VerifyPde {
        #[command(flatten)]
        common: Common,
        /// Degree of the leading part; defaults to the order of the matrix.
        #[arg(long)]
        k: Option<u32>,
        /// Compute the normal form first and check that instead.
        #[arg(long)]
        normalize: bool,
        matrix: String,
    },
    /// Test the per-degree image criterion for finite determinacy.
    Determinacy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Highest degree to test; defaults to the truncation order.
        #[arg(long)]
        j_max: Option<u32>,
        matrix: String,
    },
    /// Search for a group element taking the j-jet of A to that of B.
    Equiv {
        #[command(flatten)]
        common: Common,
        /// Jet order to match; defaults to the truncation order.
        #[arg(long)]
        j: Option<u32>,
        a: String,
        b: String,
    },
    /// Diagonal form over K[[x]] in one variable.
    Smith {
        #[command(flatten)]
        common: Common,
        matrix: String,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Group acting on the matrix.
    #[arg(long, default_value = "two-sided", value_parser = parse_kind)]
    pub group: GroupKind,
    /// Comma-separated variable names, in graded-lex order.
    #[arg(long, default_value = "x", value_delimiter = ',')]
    pub vars: Vec<String>,
    /// Truncation order N.
    #[arg(long, default_value_t = 6)]
    pub order: u32,
    /// Coefficient field: rational or gaussian.
    #[arg(long, default_value = "rational", value_parser = parse_field)]
    pub field: Field,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Cap on Lie basis columns per assembly.
    #[arg(long, env = "JETNORM_MAX_COLUMNS")]
    pub max_columns: Option<usize>,
}

fn parse_kind(s: &str) -> Result<GroupKind, String> {
    s.parse().map_err(|e: jetnorm::Error| e.to_string())
}

fn parse_field(s: &str) -> Result<Field, String> {
    s.parse().map_err(|e: jetnorm::Error| e.to_string())
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Nf { common, .. }
            | Command::VerifyPde { common, .. }
            | Command::Determinacy { common, .. }
            | Command::Equiv { common, .. }
            | Command::Smith { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Nf { .. } => "nf",
            Command::VerifyPde { .. } => "verify-pde",
            Command::Determinacy { .. } => "determinacy",
            Command::Equiv { .. } => "equiv",
            Command::Smith { .. } => "smith",
        }
    }
}

/// Where a matrix argument comes from.
pub enum Source {
    Inline(String),
    Stdin,
    File(PathBuf),
}

impl Source {
    pub fn from_arg(arg: &str) -> Source {
        if arg == "-" {
            Source::Stdin
        } else if arg.trim_start().starts_with('[') {
            Source::Inline(arg.to_string())
        } else {
            Source::File(PathBuf::from(arg))
        }
    }
}
