use serde::{Deserialize, Serialize};

use super::{
    channel_statistics, estimate_force_fluctuation, estimate_mode_sum, matsubara_channels, stationary_variance,
    Estimate, FluctuationWeights, ModeChannel, RunSummary, SamplerConfig, SamplerError,
};
use crate::force::{matsubara_closed_form, ThermalState};

/// A check passes when the estimate lies within this many standard errors.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCheck {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub expected: f64,
    pub z: f64,
    pub passed: bool,
    pub samples: usize,
}

impl CalibrationCheck {
    fn new(name: &str, e: Estimate, expected: f64, run: RunSummary) -> Self {
        let z = e.z_score(expected);
        CalibrationCheck {
            name: name.to_string(),
            estimate: e.value,
            stderr: e.stderr,
            expected,
            z,
            passed: z.abs() <= Z_LIMIT,
            samples: run.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub config: SamplerConfig,
    pub checks: Vec<CalibrationCheck>,
    /// Resummed value of the sampled Matsubara set's full (untruncated) sum,
    /// for reference.
    pub matsubara_closed_form: f64,
}

impl CalibrationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// SplitMix64 finaliser, used to give each check its own master seed.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Closed-form checks of the sampler: single-channel moments, the truncated
/// Matsubara sum of one transverse mode, Gaussian pair factorisation for two
/// channels, and the piston ratio `Var X / <X>^2 = 2`.
pub fn run_calibration(cfg: &SamplerConfig) -> Result<CalibrationReport, SamplerError> {
    cfg.validate()?;
    let with_seed = |k: u64| SamplerConfig {
        seed: derive_seed(cfg.seed, k),
        ..*cfg
    };
    let mut checks = Vec::new();

    let single = [ModeChannel::new(1.0, 1.0)];
    let (stats, run) = channel_statistics(&single, &with_seed(0))?;
    let s = stats[0];
    checks.push(CalibrationCheck::new("variance kT/kappa", s.second, s.expected_variance, run));
    checks.push(CalibrationCheck::new("fourth-moment ratio", s.fourth_ratio, 3.0, run));
    checks.push(CalibrationCheck::new("odd moment <phi>", s.mean, 0.0, run));
    checks.push(CalibrationCheck::new("odd moment <phi^3>", s.third, 0.0, run));

    let e = estimate_force_fluctuation(&single, &FluctuationWeights::Diagonal(vec![1.0]), &with_seed(1))?;
    checks.push(CalibrationCheck::new("single-channel Var(phi^2)", e.variance, e.expected_variance, e.run));

    // one transverse mode lambda = 1 at Lambda = 1
    let th = ThermalState::natural(2.0 * std::f64::consts::PI);
    let lambda = 1.0;
    let m_max = 4;
    let channels = matsubara_channels(lambda, &th, m_max)?;
    let truncated: f64 = channels.iter().map(|c| stationary_variance(c.kappa, c.temperature())).sum();
    let (e, run) = estimate_mode_sum(&channels, &vec![1.0; channels.len()], &with_seed(2))?;
    checks.push(CalibrationCheck::new("matsubara mode sum (|m| <= 4)", e, truncated, run));

    let pair = [ModeChannel::new(1.0, 1.0), ModeChannel::new(2.5, 1.0)];
    let e = estimate_force_fluctuation(&pair, &FluctuationWeights::Diagonal(vec![1.0, 1.0]), &with_seed(3))?;
    checks.push(CalibrationCheck::new("two-channel variance", e.variance, e.expected_variance, e.run));

    let e = estimate_force_fluctuation(
        &channels,
        &FluctuationWeights::Separable(vec![1.0; channels.len()]),
        &with_seed(4),
    )?;
    checks.push(CalibrationCheck::new("piston variance/mean^2", e.ratio, 2.0, e.run));

    Ok(CalibrationReport {
        config: *cfg,
        checks,
        matsubara_closed_form: matsubara_closed_form(lambda, &th),
    })
}
