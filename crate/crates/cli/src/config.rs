//! Validated run configuration built from flags and an optional config file.

use std::path::PathBuf;

use casimir_core::force::ThermalState;
use casimir_core::sampler::SamplerConfig;
use casimir_core::spectrum::{BoundaryCondition, CrossSection, Mask};
use serde::Serialize;

use crate::args::{parse_config, BcChoice, Format, RunArgs};
use crate::error::CliError;

pub const DEFAULT_MODES: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_N_LIST: [usize; 3] = [10, 100, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime")]
pub enum RegimeSpec {
    #[serde(rename = "zero-T")]
    ZeroT,
    #[serde(rename = "finite-T")]
    FiniteT { beta: f64 },
    #[serde(rename = "classical")]
    Classical { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: Option<CrossSection>,
    pub modes: usize,
    pub bcs: Vec<BoundaryCondition>,
    pub regime: RegimeSpec,
    pub units: Units,
    pub separations: Option<Vec<f64>>,
    pub tol: f64,
    pub sampler: SamplerConfig,
    pub trace: Option<PathBuf>,
    pub n_list: Vec<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn thermal(&self) -> ThermalState {
        let beta = match self.regime {
            RegimeSpec::ZeroT => f64::INFINITY,
            RegimeSpec::FiniteT { beta } | RegimeSpec::Classical { beta } => beta,
        };
        ThermalState::natural(beta).with_units(self.units.hbar, self.units.c)
    }

    pub fn geometry(&self) -> Result<&CrossSection, CliError> {
        self.geometry
            .as_ref()
            .ok_or_else(|| CliError::Config("a cross section is required (--circle, --rect or --mask with --h)".into()))
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `count` separations from `min` to `max`, linear or logarithmic.
pub fn separation_grid(min: f64, max: f64, count: usize, log: bool) -> Result<Vec<f64>, CliError> {
    positive("L-grid MIN", min)?;
    positive("L-grid MAX", max)?;
    if max < min {
        return Err(config_err(format!("L-grid MAX ({max}) is below MIN ({min})")));
    }
    if count == 0 {
        return Err(config_err("L-grid COUNT must be at least 1"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let t = i as f64 / last;
            if i == count - 1 {
                max
            } else if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}

fn geometry(args: &RunArgs) -> Result<Option<CrossSection>, CliError> {
    let given = [args.circle.is_some(), args.rect.is_some(), args.mask.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given > 1 {
        return Err(config_err("--circle, --rect and --mask are mutually exclusive"));
    }
    if args.h.is_some() && args.mask.is_none() {
        return Err(config_err("--h only applies to --mask"));
    }
    let cs = if let Some(r) = args.circle {
        CrossSection::Circle { radius: r }
    } else if let Some(ab) = &args.rect {
        CrossSection::Rectangle { a: ab[0], b: ab[1] }
    } else if let Some(path) = &args.mask {
        let h = args.h.ok_or_else(|| config_err("--mask needs --h"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let mask = Mask::parse(&text)?;
        CrossSection::RasterMask { mask, h }
    } else {
        return Ok(None);
    };
    cs.validate()?;
    Ok(Some(cs))
}

fn regime(args: &RunArgs, k_b: f64) -> Result<RegimeSpec, CliError> {
    if args.temperature.is_some() && args.beta.is_some() {
        return Err(config_err("--temperature and --beta are mutually exclusive"));
    }
    let beta = match (args.temperature, args.beta) {
        (Some(t), _) => Some(1.0 / (k_b * positive("temperature", t)?)),
        (_, Some(b)) => Some(positive("beta", b)?),
        _ => None,
    };
    match (args.zero_t, args.classical, beta) {
        (true, true, _) => Err(config_err("--zero-T and --classical are mutually exclusive")),
        (true, _, Some(_)) => Err(config_err("--zero-T cannot be combined with --temperature or --beta")),
        (_, true, None) => Err(config_err("--classical needs --temperature or --beta")),
        (_, true, Some(beta)) => Ok(RegimeSpec::Classical { beta }),
        (_, false, Some(beta)) => Ok(RegimeSpec::FiniteT { beta }),
        _ => Ok(RegimeSpec::ZeroT),
    }
}

/// Merge the config file (if any) under the flags and validate everything.
pub fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let args = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
            let file = parse_config(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            args.clone().merged_over(file)
        }
        None => args.clone(),
    };

    let units = Units {
        hbar: positive("hbar", args.hbar.unwrap_or(1.0))?,
        c: positive("c", args.c.unwrap_or(1.0))?,
        k_b: positive("kB", args.k_b.unwrap_or(1.0))?,
    };
    let modes = args.modes.unwrap_or(DEFAULT_MODES);
    if modes == 0 {
        return Err(config_err("--modes must be at least 1"));
    }
    let bcs = match args.bc.unwrap_or(BcChoice::Both) {
        BcChoice::Dirichlet => vec![BoundaryCondition::Dirichlet],
        BcChoice::Neumann => vec![BoundaryCondition::Neumann],
        BcChoice::Both => BoundaryCondition::BOTH.to_vec(),
    };
    let separations = match (args.l, &args.l_grid) {
        (Some(_), Some(_)) => return Err(config_err("--L and --L-grid are mutually exclusive")),
        (Some(l), None) => Some(vec![positive("L", l)?]),
        (None, Some(g)) => {
            let count = g[2];
            if count < 1.0 || count.fract() != 0.0 {
                return Err(config_err(format!("L-grid COUNT must be a positive integer, got {count}")));
            }
            Some(separation_grid(g[0], g[1], count as usize, args.log)?)
        }
        (None, None) => None,
    };
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(config_err(format!("--tol must lie in (0, 1), got {tol}")));
    }
    let d = SamplerConfig::default();
    let sampler = SamplerConfig {
        seed: args.seed.unwrap_or(d.seed),
        ds: args.ds.unwrap_or(d.ds),
        n_steps: args.steps.unwrap_or(d.n_steps),
        burn_in: args.burn_in.unwrap_or(d.burn_in),
        n_chains: args.chains.unwrap_or(d.n_chains),
    };
    sampler.validate()?;
    let n_list = args.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(config_err("--n-list needs positive mode counts"));
    }
    if args.threads == Some(0) {
        return Err(config_err("--threads must be at least 1"));
    }

    Ok(RunConfig {
        geometry: geometry(&args)?,
        modes,
        bcs,
        regime: regime(&args, units.k_b)?,
        units,
        separations,
        tol,
        sampler,
        trace: args.trace.clone(),
        n_list,
        threads: args.threads,
        out: args.out.clone(),
        format: args.format.unwrap_or(Format::Csv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> RunArgs {
        RunArgs {
            circle: Some(1.0),
            ..RunArgs::default()
        }
    }

    #[test]
    fn grids() {
        assert_eq!(separation_grid(1.0, 3.0, 3, false).unwrap(), vec![1.0, 2.0, 3.0]);
        let g = separation_grid(0.01, 1.0, 3, true).unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(*separation_grid(0.05, 5.0, 40, true).unwrap().last().unwrap(), 5.0);
        assert_eq!(separation_grid(0.5, 0.5, 1, true).unwrap(), vec![0.5]);
        assert!(separation_grid(0.0, 1.0, 3, false).is_err());
        assert!(separation_grid(2.0, 1.0, 3, false).is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(resolve(&args()).unwrap().regime, RegimeSpec::ZeroT);
        let t = RunArgs {
            temperature: Some(4.0),
            k_b: Some(0.5),
            ..args()
        };
        assert_eq!(resolve(&t).unwrap().regime, RegimeSpec::FiniteT { beta: 0.5 });
        let c = RunArgs {
            classical: true,
            beta: Some(2.0),
            ..args()
        };
        assert_eq!(resolve(&c).unwrap().regime, RegimeSpec::Classical { beta: 2.0 });
        for bad in [
            RunArgs { classical: true, ..args() },
            RunArgs { zero_t: true, classical: true, beta: Some(1.0), ..args() },
            RunArgs { zero_t: true, beta: Some(1.0), ..args() },
            RunArgs { beta: Some(1.0), temperature: Some(1.0), ..args() },
            RunArgs { beta: Some(-1.0), ..args() },
        ] {
            assert!(matches!(resolve(&bad), Err(CliError::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn geometry_rules() {
        let both = RunArgs {
            rect: Some(vec![1.0, 1.0]),
            ..args()
        };
        assert!(matches!(resolve(&both), Err(CliError::Config(_))));
        let neg = RunArgs {
            circle: Some(-1.0),
            ..RunArgs::default()
        };
        assert!(matches!(resolve(&neg), Err(CliError::Config(_))));
        let missing = RunArgs {
            mask: Some("/nonexistent/mask.txt".into()),
            h: Some(0.1),
            ..RunArgs::default()
        };
        assert!(matches!(resolve(&missing), Err(CliError::Io(_))));
        assert!(resolve(&RunArgs::default()).unwrap().geometry.is_none());
    }

    #[test]
    fn config_file_merge() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "rect = 2 3\nbeta = 4\nmodes = 12\nL-grid = 0.1 1 4\n").unwrap();
        let a = RunArgs {
            config: Some(path),
            modes: Some(5),
            ..RunArgs::default()
        };
        let cfg = resolve(&a).unwrap();
        assert_eq!(cfg.geometry, Some(CrossSection::Rectangle { a: 2.0, b: 3.0 }));
        assert_eq!(cfg.regime, RegimeSpec::FiniteT { beta: 4.0 });
        assert_eq!(cfg.modes, 5);
        assert_eq!(cfg.separations.unwrap().len(), 4);
    }
}
