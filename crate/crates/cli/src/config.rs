use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Spaces,
    Quadtable,
    Convergence,
    Consistency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Pyramid element spaces, conical quadrature and rate studies.
#[derive(Debug, Clone, Parser)]
#[command(name = "pyrafem", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Order (quadtable: rule order, default 1; studies: element order, default 1).
    #[arg(long)]
    pub k: Option<usize>,
    /// Highest order for verify and spaces.
    #[arg(long = "k-max", default_value_t = 3)]
    pub k_max: usize,
    /// Restrict spaces to one form degree.
    #[arg(long)]
    pub s: Option<usize>,
    /// Quadrature order of the stiffness matrix (default: k).
    #[arg(long)]
    pub q: Option<usize>,
    /// Comma-separated subdivision counts.
    #[arg(long = "n", value_delimiter = ',', default_value = "1,2,4")]
    pub n: Vec<usize>,
    /// Coefficient preset: identity, poly1, smooth.
    #[arg(long = "A")]
    pub a: Option<String>,
    /// Manufactured solution preset: sin3, poly_bubble.
    #[arg(long = "u", default_value = "sin3")]
    pub u: String,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if matches!(self.command, Command::Verify | Command::Spaces) && self.k_max == 0 {
            return Err("--k-max must be at least 1".into());
        }
        if self.k == Some(0) && self.command != Command::Quadtable {
            return Err("--k must be at least 1".into());
        }
        if let Some(s) = self.s {
            if s > 3 {
                return Err(format!("--s {s}: form degrees are 0..3"));
            }
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err("--n needs positive subdivision counts".into());
        }
        if self.n.windows(2).any(|w| w[1] <= w[0]) {
            return Err("--n must be strictly ascending".into());
        }
        if self.command == Command::Verify && self.format == Some(Format::Csv) {
            return Err("verify writes JSON only".into());
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.k.unwrap_or(1)
    }
}
