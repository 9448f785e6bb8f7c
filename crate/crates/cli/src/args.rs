use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ptolemaic", version, about = "Four-point certificates for finite metric spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Curvature for ptk, apt and ascat.
    #[arg(long, global = true, env = "PTOLEMAIC_KAPPA", allow_hyphen_values = true)]
    pub kappa: Option<f64>,

    /// Seed for generators whose spec has no `seed=` key.
    #[arg(long, global = true, env = "PTOLEMAIC_SEED")]
    pub seed: Option<u64>,

    /// Worker threads for the quadruple scans.
    #[arg(long, global = true, env = "PTOLEMAIC_WORKERS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,

    /// Verdict threshold; the default depends on the command.
    #[arg(long, global = true, env = "PTOLEMAIC_THRESHOLD", allow_hyphen_values = true)]
    pub threshold: Option<f64>,

    /// Absolute slack added to every threshold.
    #[arg(long, global = true, env = "PTOLEMAIC_TOLERANCE", default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Output path: the artifact for gen, cone build and moebius involute,
    /// otherwise the report. Defaults to stdout.
    #[arg(long, global = true, env = "PTOLEMAIC_OUT")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, env = "PTOLEMAIC_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A space from a file or a generator spec such as `strip:a=1,t=10`.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SpaceSource {
    /// CSV or JSON file, `-` for stdin.
    #[arg(long, short)]
    pub input: Option<PathBuf>,

    /// Generator spec, e.g. `euclidean:dim=2,n=20`.
    #[arg(long)]
    pub gen: Option<String>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct OtherSource {
    /// Second space, from a file.
    #[arg(long)]
    pub with: Option<PathBuf>,

    /// Second space, from a generator spec.
    #[arg(long)]
    pub with_gen: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the extended metric axioms and list violations.
    Validate(SpaceSource),
    /// Four-point defect scans with pass/fail verdicts.
    #[command(subcommand)]
    Certify(Certify),
    /// Cross-ratios, involutions and Möbius equivalence.
    #[command(subcommand)]
    Moebius(Moebius),
    /// Hyperbolic cone, its boundary metric and Busemann functions.
    #[command(subcommand)]
    Cone(Cone),
    /// Generate a space and write it as JSON or CSV.
    Gen {
        /// e.g. `euclidean:dim=2,n=20`, `strip:a=1,t=10`, `graph:edges=0-1;1-2`.
        spec: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum Certify {
    /// Normalized Ptolemy defect (threshold 0).
    Ptolemy(SpaceSource),
    /// PT_κ defect (threshold 0).
    Ptk(SpaceSource),
    /// Asymptotic PT_κ defects, κ < 0 (threshold 4 on the exp form).
    Apt(SpaceSource),
    /// Four-point δ (threshold: the bound implied by the asymptotic PT_-1 defect).
    Gromov(SpaceSource),
    /// Canonical comparison-quadrilateral defect, κ < 0 (threshold 0).
    Ascat(SpaceSource),
}

#[derive(Debug, Subcommand)]
pub enum Moebius {
    /// Cross-ratio triple of one quadruple.
    Crt {
        #[command(flatten)]
        space: SpaceSource,
        /// Four indices, e.g. `0,1,2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        quad: Vec<usize>,
    },
    /// Whether two spaces have the same cross-ratio triples.
    Equivalent {
        #[command(flatten)]
        space: SpaceSource,
        #[command(flatten)]
        other: OtherSource,
    },
    /// Metric involution at a point.
    Involute {
        #[command(flatten)]
        space: SpaceSource,
        #[arg(long)]
        at: usize,
    },
    /// Common ratio of two spaces' distances.
    Homothety {
        #[command(flatten)]
        space: SpaceSource,
        #[command(flatten)]
        other: OtherSource,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConeBase {
    #[command(flatten)]
    pub space: SpaceSource,
    /// Index of z0; the base point is (z0, 1).
    #[arg(long, default_value_t = 0)]
    pub z0: usize,
}

#[derive(Debug, Subcommand)]
pub enum Cone {
    /// Sample the cone and write it as JSON (or the matrix as CSV).
    Build {
        #[command(flatten)]
        base: ConeBase,
        /// `geometric:K` or a comma list of heights.
        #[arg(long, default_value = "geometric")]
        heights: String,
        /// Cap heights at the base diameter.
        #[arg(long)]
        truncate: bool,
    },
    /// Boundary metric at (z0, 1), its approximants and the recovered involution.
    Boundary {
        #[command(flatten)]
        base: ConeBase,
    },
    /// Busemann function of ω at the cone point (base, height).
    Busemann {
        #[command(flatten)]
        base: ConeBase,
        #[arg(long)]
        point: usize,
        #[arg(long)]
        height: f64,
        #[arg(long, default_value_t = 1 << 20)]
        i_max: u64,
    },
}
