use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use torus_wigner::{AxisConvention, DEFAULT_CAPACITY};

#[derive(Debug, Parser)]
#[command(
    name = "torus-wigner",
    version,
    about = "Discrete Wigner functions on the torus and the quantum baker map"
)]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Grid output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Map zero to mid-grey in PGM output.
    #[arg(long, global = true)]
    pub symmetric: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the box kernel table `k, re, im`.
    Kernel {
        #[arg(long)]
        n: usize,
    },
    /// Wigner function of a state (`n,re,im`) or density matrix file.
    Wigner {
        #[arg(long)]
        input: PathBuf,
        /// Expected dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Emit the redundant 2N x 2N grid instead.
        #[arg(long)]
        double: bool,
        /// Compare both transform routes and the inverse.
        #[arg(long)]
        check: bool,
    },
    /// Density matrix of a Wigner grid file.
    Inverse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Wigner eigenfunctions of the quantum baker map with a scar report.
    BakerEigen {
        #[arg(long)]
        n: usize,
        /// `all`, `top:K` or an eigenstate index.
        #[arg(long, default_value = "top:3")]
        select: Selection,
        /// Off-diagonal pair `alpha,beta`.
        #[arg(long)]
        pair: Option<Pair>,
        /// Orbit periods to score.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        period: Vec<usize>,
        #[arg(long, value_enum, default_value_t = AxisArg::Pq)]
        axis_convention: AxisArg,
    },
    /// Columns `K_W(.; m')` of the Wigner propagator.
    Propagate {
        /// Dimension of the baker map (ignored with `--unitary`).
        #[arg(long)]
        n: Option<usize>,
        /// Unitary matrix file (interleaved re,im pairs).
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        m_prime: Pair,
        /// Step counts.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Route::Direct)]
        route: Route,
        /// Also build full propagators and compare them.
        #[arg(long)]
        full: bool,
        /// Largest N for full propagators.
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
    },
    /// Periodic orbits of the classical baker map.
    Orbits {
        #[arg(long)]
        period: usize,
        /// Grid size for pixel coordinates.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = AxisArg::Pq)]
        axis_convention: AxisArg,
    },
    /// Built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pgm,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn pgm(self) -> bool {
        matches!(self, Self::Pgm | Self::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    Spectral,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Pq,
    Qp,
}

impl From<AxisArg> for AxisConvention {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Pq => Self::Pq,
            AxisArg::Qp => Self::Qp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    All,
    Top(usize),
    Index(usize),
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Self::All);
        }
        if let Some(k) = s.strip_prefix("top:") {
            return k.parse().map(Self::Top).map_err(|_| format!("bad count in '{s}'"));
        }
        s.parse()
            .map(Self::Index)
            .map_err(|_| format!("expected 'all', 'top:K' or an index, got '{s}'"))
    }
}

/// Two comma-separated indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair(pub usize, pub usize);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("'{x}' is not an index"));
        Ok(Self(parse(a)?, parse(b)?))
    }
}
