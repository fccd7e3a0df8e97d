//! Stochastic-quantization cross-check of the analytic mode sums.
//!
//! Every field mode `(p, m)` is an independent Ornstein-Uhlenbeck channel in
//! pseudo-time with relaxation rate `kappa = lambda_p^2 + omega_m^2` and
//! stationary variance `k_B T / kappa`. Chains advance with the exact OU
//! transition, so the only discrepancies left are statistical. Errors come
//! from batch means pooled over chains, with a jackknife over batches for
//! nonlinear statistics.

mod calibration;
mod ou;
mod rng;
mod stats;
mod trace;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::force::ThermalState;

pub use calibration::{run_calibration, CalibrationCheck, CalibrationReport, Z_LIMIT};
pub use ou::{ou_step_exact, stationary_variance, ModeChannel};
pub use rng::NormalStream;
pub use stats::{BatchMeans, Estimate};
pub use trace::write_trace;

/// Batches span at least this many autocorrelation times of the slowest
/// channel.
pub const BATCH_AUTOCORRELATION_TIMES: f64 = 20.0;
/// Upper bound on batches per chain.
pub const MAX_BATCHES_PER_CHAIN: usize = 64;
pub const MIN_BATCHES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Pseudo-time step in units of `1 / kappa_min`.
    pub ds: f64,
    /// Total steps per chain, burn-in included.
    pub n_steps: usize,
    pub burn_in: usize,
    pub n_chains: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 42,
            ds: 0.5,
            n_steps: 100_000,
            burn_in: 1_000,
            n_chains: 4,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.n_chains == 0 {
            return Err(SamplerError::NoChains);
        }
        if self.ds <= 0.0 || !self.ds.is_finite() {
            return Err(SamplerError::InvalidConfig(format!("ds must be positive, got {}", self.ds)));
        }
        if self.burn_in >= self.n_steps {
            return Err(SamplerError::InvalidConfig(format!(
                "burn-in ({}) must be smaller than the step count ({})",
                self.burn_in, self.n_steps
            )));
        }
        Ok(())
    }

    /// Post-burn-in samples per chain.
    pub fn samples_per_chain(&self) -> usize {
        self.n_steps - self.burn_in
    }

    /// Steps per batch: at least [`BATCH_AUTOCORRELATION_TIMES`] relaxation
    /// times of the slowest channel, and no more than
    /// [`MAX_BATCHES_PER_CHAIN`] batches per chain.
    pub fn batch_len(&self) -> usize {
        let by_tau = (BATCH_AUTOCORRELATION_TIMES / self.ds).ceil() as usize;
        let by_count = self.samples_per_chain().div_ceil(MAX_BATCHES_PER_CHAIN);
        by_tau.max(by_count).max(1)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("at least one chain is required")]
    NoChains,
    #[error("channel {index} has non-positive kappa {kappa}")]
    NonPositiveKappa { index: usize, kappa: f64 },
    #[error("channel {index} has non-positive noise strength {noise}")]
    NonPositiveNoise { index: usize, noise: f64 },
    #[error("no channels to sample")]
    NoChannels,
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("only {batches} batches of {batch_len} steps fit; need at least {MIN_BATCHES}")]
    InsufficientSamples { batches: usize, batch_len: usize },
    #[error("the sampler needs a finite temperature")]
    ZeroTemperature,
}

/// Size of a sampling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub samples: usize,
    pub n_batches: usize,
    pub batch_len: usize,
}

fn validate_channels(channels: &[ModeChannel]) -> Result<f64, SamplerError> {
    if channels.is_empty() {
        return Err(SamplerError::NoChannels);
    }
    let mut kappa_min = f64::INFINITY;
    for (index, ch) in channels.iter().enumerate() {
        if ch.kappa <= 0.0 || !ch.kappa.is_finite() {
            return Err(SamplerError::NonPositiveKappa { index, kappa: ch.kappa });
        }
        if ch.noise_strength <= 0.0 || !ch.noise_strength.is_finite() {
            return Err(SamplerError::NonPositiveNoise {
                index,
                noise: ch.noise_strength,
            });
        }
        kappa_min = kappa_min.min(ch.kappa);
    }
    Ok(kappa_min)
}

/// Run all chains and return per-batch means of `observe(phi, out)`, where
/// `out` has `n_obs` slots.
pub fn sample_batches(
    channels: &[ModeChannel],
    cfg: &SamplerConfig,
    n_obs: usize,
    observe: impl Fn(&[f64], &mut [f64]) + Sync,
) -> Result<BatchMeans, SamplerError> {
    cfg.validate()?;
    let kappa_min = validate_channels(channels)?;
    let dt = cfg.ds / kappa_min;
    let batch_len = cfg.batch_len();
    let per_chain = cfg.samples_per_chain() / batch_len;
    let total = per_chain * cfg.n_chains;
    if total < MIN_BATCHES {
        return Err(SamplerError::InsufficientSamples { batches: total, batch_len });
    }
    let decay: Vec<f64> = channels.iter().map(|c| (-c.kappa * dt).exp()).collect();
    let spread: Vec<f64> = channels
        .iter()
        .map(|c| (-(-2.0 * c.kappa * dt).exp_m1() * c.temperature() / c.kappa).sqrt())
        .collect();

    let run_chain = |chain: usize| -> Vec<Vec<f64>> {
        let mut normals = NormalStream::new(cfg.seed, chain as u64);
        let mut phi: Vec<f64> = channels.iter().map(|c| c.phi).collect();
        let mut out = vec![0.0; n_obs];
        let mut acc = vec![0.0; n_obs];
        let mut in_batch = 0;
        let mut batches = Vec::with_capacity(per_chain);
        for step in 0..cfg.n_steps {
            for ((p, d), s) in phi.iter_mut().zip(&decay).zip(&spread) {
                *p = *p * d + normals.next() * s;
            }
            if step < cfg.burn_in {
                continue;
            }
            observe(&phi, &mut out);
            for (a, o) in acc.iter_mut().zip(&out) {
                *a += o;
            }
            in_batch += 1;
            if in_batch == batch_len {
                batches.push(acc.iter().map(|a| a / batch_len as f64).collect());
                acc.iter_mut().for_each(|a| *a = 0.0);
                in_batch = 0;
                if batches.len() == per_chain {
                    break;
                }
            }
        }
        batches
    };
    let per_chain_batches: Vec<Vec<Vec<f64>>> = (0..cfg.n_chains).into_par_iter().map(run_chain).collect();
    Ok(BatchMeans {
        batches: per_chain_batches.into_iter().flatten().collect(),
        batch_len,
    })
}

fn summary(bm: &BatchMeans) -> RunSummary {
    RunSummary {
        samples: bm.samples(),
        n_batches: bm.n_batches(),
        batch_len: bm.batch_len,
    }
}

/// Channels `m = -m_max..=m_max` of one transverse mode `lambda`.
pub fn matsubara_channels(lambda: f64, th: &ThermalState, m_max: u64) -> Result<Vec<ModeChannel>, SamplerError> {
    if th.is_zero_temperature() {
        return Err(SamplerError::ZeroTemperature);
    }
    let big_lambda = th.lambda_thermal();
    let t = 1.0 / th.beta;
    let m = m_max as i64;
    Ok((-m..=m)
        .map(|k| {
            let w = k as f64 * big_lambda;
            ModeChannel::new(lambda * lambda + w * w, t)
        })
        .collect())
}

/// Moments of one channel's stationary samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub kappa: f64,
    /// `k_B T / kappa`.
    pub expected_variance: f64,
    pub mean: Estimate,
    pub second: Estimate,
    pub third: Estimate,
    pub fourth: Estimate,
    /// `<phi^4> / <phi^2>^2`, 3 for a Gaussian.
    pub fourth_ratio: Estimate,
}

/// Per-channel moments from one sampling run.
pub fn channel_statistics(
    channels: &[ModeChannel],
    cfg: &SamplerConfig,
) -> Result<(Vec<ChainStats>, RunSummary), SamplerError> {
    let bm = sample_batches(channels, cfg, 4 * channels.len(), |phi, out| {
        for (o, &p) in out.chunks_exact_mut(4).zip(phi) {
            let p2 = p * p;
            o[0] = p;
            o[1] = p2;
            o[2] = p2 * p;
            o[3] = p2 * p2;
        }
    })?;
    let stats = channels
        .iter()
        .enumerate()
        .map(|(c, ch)| ChainStats {
            kappa: ch.kappa,
            expected_variance: stationary_variance(ch.kappa, ch.temperature()),
            mean: bm.linear(4 * c),
            second: bm.linear(4 * c + 1),
            third: bm.linear(4 * c + 2),
            fourth: bm.linear(4 * c + 3),
            fourth_ratio: bm.jackknife(|m| m[4 * c + 3] / (m[4 * c + 1] * m[4 * c + 1])),
        })
        .collect();
    Ok((stats, summary(&bm)))
}

/// Monte-Carlo estimate of `sum_c w_c <phi_c^2>`.
pub fn estimate_mode_sum(
    channels: &[ModeChannel],
    weights: &[f64],
    cfg: &SamplerConfig,
) -> Result<(Estimate, RunSummary), SamplerError> {
    if weights.len() != channels.len() {
        return Err(SamplerError::WeightLength {
            expected: channels.len(),
            got: weights.len(),
        });
    }
    let bm = sample_batches(channels, cfg, 1, |phi, out| {
        out[0] = weights.iter().zip(phi).map(|(w, p)| w * p * p).sum();
    })?;
    Ok((bm.linear(0), summary(&bm)))
}

/// How the observable `X` is built from the channel amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "weights", rename_all = "lowercase")]
pub enum FluctuationWeights {
    /// `X = sum_c w_c phi_c^2`; `Var X = 2 sum_c w_c^2 v_c^2`.
    Diagonal(Vec<f64>),
    /// `X = (sum_c u_c phi_c)^2`, the product structure of the plate stress;
    /// `Var X = 2 <X>^2` exactly.
    Separable(Vec<f64>),
}

impl FluctuationWeights {
    fn weights(&self) -> &[f64] {
        match self {
            FluctuationWeights::Diagonal(w) | FluctuationWeights::Separable(w) => w,
        }
    }

    /// Gaussian predictions `(<X>, Var X)`.
    pub fn expected(&self, channels: &[ModeChannel]) -> (f64, f64) {
        let var = |c: &ModeChannel| stationary_variance(c.kappa, c.temperature());
        match self {
            FluctuationWeights::Diagonal(w) => {
                let mean = w.iter().zip(channels).map(|(w, c)| w * var(c)).sum();
                let v2 = w.iter().zip(channels).map(|(w, c)| (w * var(c)).powi(2)).sum::<f64>();
                (mean, 2.0 * v2)
            }
            FluctuationWeights::Separable(u) => {
                let s: f64 = u.iter().zip(channels).map(|(u, c)| u * u * var(c)).sum();
                (s, 2.0 * s * s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationEstimate {
    pub mean: Estimate,
    pub variance: Estimate,
    /// `Var X / <X>^2`.
    pub ratio: Estimate,
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub run: RunSummary,
}

/// Monte-Carlo estimate of `Var X` for the weighted observable `X`.
pub fn estimate_force_fluctuation(
    channels: &[ModeChannel],
    weights: &FluctuationWeights,
    cfg: &SamplerConfig,
) -> Result<FluctuationEstimate, SamplerError> {
    let w = weights.weights();
    if w.len() != channels.len() {
        return Err(SamplerError::WeightLength {
            expected: channels.len(),
            got: w.len(),
        });
    }
    let bm = match weights {
        FluctuationWeights::Diagonal(w) => sample_batches(channels, cfg, 2, |phi, out| {
            let x: f64 = w.iter().zip(phi).map(|(w, p)| w * p * p).sum();
            out[0] = x;
            out[1] = x * x;
        })?,
        FluctuationWeights::Separable(u) => sample_batches(channels, cfg, 2, |phi, out| {
            let y: f64 = u.iter().zip(phi).map(|(u, p)| u * p).sum();
            let x = y * y;
            out[0] = x;
            out[1] = x * x;
        })?,
    };
    let (expected_mean, expected_variance) = weights.expected(channels);
    Ok(FluctuationEstimate {
        mean: bm.linear(0),
        variance: bm.jackknife(|m| m[1] - m[0] * m[0]),
        ratio: bm.jackknife(|m| (m[1] - m[0] * m[0]) / (m[0] * m[0])),
        expected_mean,
        expected_variance,
        run: summary(&bm),
    })
}
