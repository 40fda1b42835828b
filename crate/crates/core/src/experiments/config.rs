use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::MAX_ORDER;

/// Slack allowed on the surface `1/r = 1/p + 1/2`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TraceCheck,
    DetCompare,
    WeylScan,
    Continuity,
    FactorCheck,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Self::TraceCheck, Self::DetCompare, Self::WeylScan, Self::Continuity, Self::FactorCheck];

    pub fn name(self) -> &'static str {
        match self {
            Self::TraceCheck => "trace-check",
            Self::DetCompare => "det-compare",
            Self::WeylScan => "weyl-scan",
            Self::Continuity => "continuity",
            Self::FactorCheck => "factor-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown subcommand {s:?}")))
    }
}

/// Parameters of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Ambient dimension `d` (for `weyl-scan`: the cap on the dimension of random representations).
    pub dim: usize,
    /// Number of terms `N` of random representations.
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub r: f64,
    pub s: f64,
    pub p: f64,
    /// Pass threshold of the command.
    pub tol: f64,
    /// Ball radius for `continuity`.
    pub r0: f64,
    pub unsafe_exponents: bool,
    /// Output location; not part of the report body.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `command`: `(r, s, p) = (2/3, 1, 1)` and per-command sizes.
    pub fn new(command: Command, seed: u64) -> Self {
        let (dim, rank, trials, tol) = match command {
            Command::TraceCheck => (16, 48, 200, 1e-9),
            Command::DetCompare => (8, 8, 100, 1e-8),
            Command::WeylScan => (32, 1024, 3, 2.0),
            Command::Continuity => (6, 6, 1000, 0.0),
            Command::FactorCheck => (8, 12, 100, 1e-10),
        };
        Self {
            command,
            dim,
            rank,
            trials,
            seed,
            r: 2.0 / 3.0,
            s: 1.0,
            p: 1.0,
            tol,
            r0: 0.1,
            unsafe_exponents: false,
            out: None,
        }
    }

    /// Distance of `(r, p)` from the surface `1/r = 1/p + 1/2`.
    pub fn surface_defect(&self) -> f64 {
        (1.0 / self.r - 1.0 / self.p - 0.5).abs()
    }

    /// True when the run is off the admissibility surface (allowed only with `unsafe_exponents`).
    pub fn exploratory(&self) -> bool {
        self.surface_defect() > ADMISSIBILITY_TOL
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.dim == 0 || self.rank == 0 || self.trials == 0 {
            return bad(format!(
                "dim, rank and trials must be positive (dim={}, rank={}, trials={})",
                self.dim, self.rank, self.trials
            ));
        }
        if self.dim > MAX_ORDER {
            return bad(format!("dim {} exceeds {MAX_ORDER}", self.dim));
        }
        if !(self.r > 0.0 && self.r <= 1.0) || !(self.s > 0.0 && self.s <= 1.0) || !(1.0..=2.0).contains(&self.p) {
            return Err(Error::InadmissibleExponents(format!(
                "need 0 < r <= 1, 0 < s <= 1, 1 <= p <= 2; got r={}, s={}, p={}",
                self.r, self.s, self.p
            )));
        }
        if self.exploratory() && !self.unsafe_exponents {
            return Err(Error::InadmissibleExponents(format!(
                "1/r = {} but 1/p + 1/2 = {}; pass --unsafe-exponents to run off the surface",
                1.0 / self.r,
                1.0 / self.p + 0.5
            )));
        }
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return bad(format!("r0 must lie in (0, 1), got {}", self.r0));
        }
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            return bad(format!("tol must be finite and nonnegative, got {}", self.tol));
        }
        Ok(())
    }
}
