use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "casimir", version, about = "Casimir forces on cylindrical pistons from Laplacian spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Transverse eigenvalues of the cross section.
    Spectrum(RunArgs),
    /// Force on a plate for one or more separations.
    Force(RunArgs),
    /// Force curves for several mode counts, with both asymptotes.
    Converge(RunArgs),
    /// Sampler calibration against closed-form moments.
    Sample(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Force(_) => "force",
            Command::Converge(_) => "converge",
            Command::Sample(_) => "sample",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a) | Command::Force(a) | Command::Converge(a) | Command::Sample(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcChoice {
    Dirichlet,
    Neumann,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Also the schema of `--config` files.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Circular cross section of radius R.
    #[arg(long, value_name = "R", allow_negative_numbers = true)]
    pub circle: Option<f64>,
    /// Rectangular cross section A x B.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub rect: Option<Vec<f64>>,
    /// Raster cross section: file of 0/1 characters, one row per line.
    #[arg(long, value_name = "FILE")]
    pub mask: Option<PathBuf>,
    /// Pixel size of the mask.
    #[arg(long, value_name = "H", allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Eigenfunctions per boundary-condition set.
    #[arg(long, value_name = "N")]
    pub modes: Option<usize>,
    #[arg(long, value_enum)]
    pub bc: Option<BcChoice>,

    /// Zero temperature (the default regime).
    #[arg(long = "zero-T")]
    pub zero_t: bool,
    /// Classical limit; needs --temperature or --beta.
    #[arg(long)]
    pub classical: bool,
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    pub beta: Option<f64>,

    /// Single plate separation.
    #[arg(long = "L", value_name = "X", allow_negative_numbers = true)]
    pub l: Option<f64>,
    /// Separation grid.
    #[arg(long = "L-grid", num_args = 3, value_names = ["MIN", "MAX", "COUNT"], allow_negative_numbers = true)]
    pub l_grid: Option<Vec<f64>>,
    /// Space the grid logarithmically.
    #[arg(long)]
    pub log: bool,

    /// Relative tolerance of the Matsubara/image sums.
    #[arg(long, value_name = "T")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "K")]
    pub chains: Option<usize>,
    /// Steps per chain, burn-in included.
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,
    #[arg(long = "burn-in", value_name = "N")]
    pub burn_in: Option<usize>,
    /// Pseudo-time step in units of the slowest relaxation time.
    #[arg(long, value_name = "DS")]
    pub ds: Option<f64>,
    /// Dump chain 0 of the sampled Matsubara set to FILE.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
    /// Mode counts for `converge`.
    #[arg(long = "n-list", value_name = "N,N,...", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,

    #[arg(long, value_name = "HBAR")]
    pub hbar: Option<f64>,
    #[arg(long, value_name = "C")]
    pub c: Option<f64>,
    #[arg(long = "kB", value_name = "KB")]
    pub k_b: Option<f64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// key = value file; flags given on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    fn has_geometry(&self) -> bool {
        self.circle.is_some() || self.rect.is_some() || self.mask.is_some()
    }

    fn has_regime(&self) -> bool {
        self.zero_t || self.classical || self.temperature.is_some() || self.beta.is_some()
    }

    fn has_separation(&self) -> bool {
        self.l.is_some() || self.l_grid.is_some()
    }

    /// Field-wise merge: values in `self` win. Geometry, regime and separation
    /// are taken as whole groups, so a group given on the command line
    /// replaces the file's group instead of mixing with it.
    pub fn merged_over(self, file: RunArgs) -> RunArgs {
        let geometry = if self.has_geometry() { &self } else { &file };
        let regime = if self.has_regime() { &self } else { &file };
        let separation = if self.has_separation() { &self } else { &file };
        RunArgs {
            circle: geometry.circle,
            rect: geometry.rect.clone(),
            mask: geometry.mask.clone(),
            h: self.h.or(file.h),
            modes: self.modes.or(file.modes),
            bc: self.bc.or(file.bc),
            zero_t: regime.zero_t,
            classical: regime.classical,
            temperature: regime.temperature,
            beta: regime.beta,
            l: separation.l,
            l_grid: separation.l_grid.clone(),
            log: if self.has_separation() { self.log } else { self.log || file.log },
            tol: self.tol.or(file.tol),
            seed: self.seed.or(file.seed),
            chains: self.chains.or(file.chains),
            steps: self.steps.or(file.steps),
            burn_in: self.burn_in.or(file.burn_in),
            ds: self.ds.or(file.ds),
            trace: self.trace.or(file.trace),
            n_list: self.n_list.or(file.n_list),
            hbar: self.hbar.or(file.hbar),
            c: self.c.or(file.c),
            k_b: self.k_b.or(file.k_b),
            threads: self.threads.or(file.threads),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            config: self.config,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "config", no_binary_name = true, disable_help_flag = true)]
struct ConfigFile {
    #[command(flatten)]
    args: RunArgs,
}

/// Parse a `key = value` file. Keys are the long flag names (`circle`,
/// `L-grid`, `zero-T`, ...); list values are whitespace-separated, boolean
/// flags take `true` or `false`. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunArgs, String> {
    let mut tokens: Vec<String> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || key.starts_with('-') {
            return Err(format!("line {}: bad key '{key}'", lineno + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files cannot include other files", lineno + 1));
        }
        match value {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}"));
                if key == "n-list" {
                    tokens.push(value.split_whitespace().collect::<Vec<_>>().join(","));
                } else {
                    tokens.extend(value.split_whitespace().map(str::to_string));
                }
            }
        }
    }
    ConfigFile::try_parse_from(tokens)
        .map(|c| c.args)
        .map_err(|e| e.render().to_string().trim().to_string())
}
