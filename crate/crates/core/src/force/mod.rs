//! Casimir force on a piston plate from a transverse spectrum.
//!
//! Forces are per plate, along the outward gap normal: negative values pull
//! the plates together. Each mode contributes a finite, exponentially decaying
//! kernel, so no ultraviolet cutoff appears anywhere. Per-mode contributions
//! may be computed in parallel; the reduction is always a compensated sum in
//! ascending-`lambda` order, so results do not depend on the thread count.

mod asymptotes;
mod axial;
mod matsubara;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::k0_plus_k2;
use crate::spectrum::{BoundaryCondition, Spectrum};
use crate::summation::CompensatedSum;

pub use asymptotes::{
    asymptote_crossover, asymptote_far_classical, asymptote_far_t0, asymptote_near_classical, asymptote_near_t0,
};
pub use axial::{axial_kernel_check, axial_kernel_limit};
pub use matsubara::{default_m_max, matsubara_closed_form, matsubara_mode_sum};

/// Hard cap on Matsubara or image terms per mode.
pub const MAX_TERMS_PER_MODE: u64 = 50_000_000;

/// Temperature and unit system. `beta = inf` is zero temperature; `k_B` is
/// absorbed into `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub beta: f64,
    pub hbar: f64,
    pub c: f64,
}

impl ThermalState {
    pub fn new(beta: f64, hbar: f64, c: f64) -> Result<Self, ForceError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if beta <= 0.0 || beta.is_nan() || !ok(hbar) || !ok(c) {
            return Err(ForceError::InvalidParameter(format!(
                "need beta > 0 (inf allowed) and finite positive hbar, c; got beta={beta}, hbar={hbar}, c={c}"
            )));
        }
        Ok(ThermalState { beta, hbar, c })
    }

    /// `hbar = c = 1`.
    pub fn natural(beta: f64) -> Self {
        ThermalState { beta, hbar: 1.0, c: 1.0 }
    }

    pub fn zero_temperature() -> Self {
        Self::natural(f64::INFINITY)
    }

    pub fn with_units(self, hbar: f64, c: f64) -> Self {
        ThermalState { hbar, c, ..self }
    }

    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// Inverse thermal wavelength `2 pi / (beta hbar c)`; zero at `T = 0`.
    pub fn lambda_thermal(&self) -> f64 {
        if self.is_zero_temperature() {
            0.0
        } else {
            2.0 * PI / (self.beta * self.hbar_c())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FiniteT,
    ZeroT,
    Classical,
    AsymptoteNear,
    AsymptoteFar,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::FiniteT => "finite-T",
            Regime::ZeroT => "zero-T",
            Regime::Classical => "classical",
            Regime::AsymptoteNear => "asymptote-near",
            Regime::AsymptoteFar => "asymptote-far",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = ForceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "finite-T" | "finite-t" => Regime::FiniteT,
            "zero-T" | "zero-t" => Regime::ZeroT,
            "classical" => Regime::Classical,
            "asymptote-near" => Regime::AsymptoteNear,
            "asymptote-far" => Regime::AsymptoteFar,
            other => return Err(ForceError::InvalidParameter(format!("unknown regime '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    /// Force per plate, energy/length; negative is attractive.
    pub force: f64,
    /// Distinct eigenvalues summed.
    pub n_modes_used: usize,
    /// Eigenfunctions summed (modes weighted by degeneracy).
    pub n_eigenfunctions: usize,
    /// Largest Matsubara index (finite T) or image count (T = 0) used.
    pub m_cutoff: u64,
    /// Bound on the omitted Matsubara/image terms, same units as `force`.
    pub tail_estimate: f64,
    /// Weyl-law estimate of the contribution of modes above the spectrum's
    /// largest eigenvalue, same units and sign as `force`. Absent when the
    /// inner sums did not converge.
    pub mode_tail_estimate: Option<f64>,
    pub regime: Regime,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("this operation needs a finite temperature")]
    ZeroTemperature,
    #[error("tolerance {requested:e} unreachable: reached {achieved:e} relative within the term cap")]
    ToleranceUnreachable {
        requested: f64,
        achieved: f64,
        partial: Box<ForceResult>,
    },
}

/// Outcome of one mode's inner sum.
#[derive(Debug, Clone, Copy)]
struct ModeSum {
    value: f64,
    tail: f64,
    terms: u64,
}

fn check_inputs(spec: &Spectrum, l: f64, tol: f64) -> Result<(), ForceError> {
    if spec.is_empty() {
        return Err(ForceError::EmptySpectrum);
    }
    if l <= 0.0 || !l.is_finite() {
        return Err(ForceError::InvalidParameter(format!("L must be positive and finite, got {l}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(ForceError::InvalidParameter(format!("tol must lie in (0, 1), got {tol}")));
    }
    Ok(())
}

/// Sum `prefactor * g_p * kernel(lambda_p)` over the spectrum.
fn reduce(
    spec: &Spectrum,
    l: f64,
    tol: f64,
    regime: Regime,
    prefactor: f64,
    kernel: impl Fn(f64) -> ModeSum + Sync,
) -> Result<ForceResult, ForceError> {
    let parts: Vec<ModeSum> = spec.modes.par_iter().map(|m| kernel(m.lambda)).collect();
    let mut force = CompensatedSum::new();
    let mut tail = CompensatedSum::new();
    let mut worst: f64 = 0.0;
    let mut m_cutoff = 0;
    for (m, p) in spec.modes.iter().zip(&parts) {
        let g = f64::from(m.degeneracy);
        force.add(prefactor * g * p.value);
        tail.add(prefactor * g * p.tail);
        if p.value != 0.0 {
            worst = worst.max((p.tail / p.value).abs());
        }
        m_cutoff = m_cutoff.max(p.terms);
    }
    let reached = worst <= tol;
    let mode_tail = reached.then(|| mode_tail_estimate(spec, l, |lambda| prefactor * kernel(lambda).value));
    let result = ForceResult {
        force: force.value(),
        n_modes_used: spec.modes.len(),
        n_eigenfunctions: spec.count(),
        m_cutoff,
        tail_estimate: tail.value().abs(),
        mode_tail_estimate: mode_tail,
        regime,
    };
    if !reached {
        return Err(ForceError::ToleranceUnreachable {
            requested: tol,
            achieved: worst,
            partial: Box::new(result),
        });
    }
    Ok(result)
}

/// Missing contribution of modes above the largest computed eigenvalue of each
/// set, from the two-dimensional Weyl density `A lambda / (2 pi)`.
fn mode_tail_estimate(spec: &Spectrum, l: f64, per_mode: impl Fn(f64) -> f64) -> f64 {
    let mut total = CompensatedSum::new();
    for bc in BoundaryCondition::BOTH {
        let Some(lmax) = spec.max_lambda(bc) else { continue };
        // lambda = lmax + t / (2L); the kernels decay at least like e^{-t}
        let dt = 0.125;
        let steps = 400;
        let mut s = CompensatedSum::new();
        for k in 0..=steps {
            let t = k as f64 * dt;
            let lambda = lmax + t / (2.0 * l);
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            s.add(w * spec.area * lambda / (2.0 * PI) * per_mode(lambda));
        }
        total.add(s.value() * dt / (2.0 * l));
    }
    total.value()
}

/// `sum_{m in Z} q_m / (e^{2 L q_m} - 1)` with `q_m = sqrt(m^2 Lambda^2 + lambda^2)`.
fn matsubara_kernel(lambda: f64, big_lambda: f64, l: f64, tol: f64) -> ModeSum {
    let f = |q: f64| q / (2.0 * l * q).exp_m1();
    let mut sum = CompensatedSum::new();
    sum.add(f(lambda));
    // sum_{m' > m} f(q_m') <= int_{q_m}^inf f(q) dq / (dq/dm at m), since f
    // decreases and dq/dm = m Lambda^2 / q increases with m
    let tail_bound = |m: f64, q: f64| {
        let slope = m * big_lambda * big_lambda / q;
        let e = (-2.0 * l * q).exp();
        2.0 * e * (q / (2.0 * l) + 1.0 / (4.0 * l * l)) / ((1.0 - e) * slope)
    };
    let mut m = 0u64;
    let mut tail = f64::INFINITY;
    while m < MAX_TERMS_PER_MODE {
        m += 1;
        let mf = m as f64;
        let q = (mf * mf * big_lambda * big_lambda + lambda * lambda).sqrt();
        let term = 2.0 * f(q);
        if term == 0.0 {
            tail = 0.0;
            break;
        }
        sum.add(term);
        let partial = sum.value();
        tail = tail_bound(mf, q);
        if term < tol * partial && tail <= tol * partial {
            break;
        }
    }
    ModeSum {
        value: sum.value(),
        tail,
        terms: m,
    }
}

/// `lambda^2 sum_{n >= 1} (K_0 + K_2)(2 n L lambda)`.
fn image_kernel(lambda: f64, l: f64, tol: f64) -> ModeSum {
    let z1 = 2.0 * l * lambda;
    // e^z (K_0 + K_2)(z) decreases, so successive terms shrink at least by r
    let r = (-z1).exp();
    let mut sum = CompensatedSum::new();
    let mut n = 0u64;
    let mut tail = f64::INFINITY;
    while n < MAX_TERMS_PER_MODE {
        n += 1;
        let term = k0_plus_k2(n as f64 * z1);
        if term == 0.0 {
            tail = 0.0;
            break;
        }
        sum.add(term);
        let bound = term * r / (1.0 - r);
        if bound <= tol * sum.value() {
            tail = bound;
            break;
        }
    }
    let l2 = lambda * lambda;
    ModeSum {
        value: l2 * sum.value(),
        tail: l2 * tail,
        terms: n,
    }
}

/// Finite-temperature force
/// `F = -(1/beta) sum_p g_p sum_{m in Z} q/(e^{2 L q} - 1)`.
/// `tol` bounds the relative error of every mode's Matsubara sum.
pub fn force_finite_t(spec: &Spectrum, l: f64, th: &ThermalState, tol: f64) -> Result<ForceResult, ForceError> {
    check_inputs(spec, l, tol)?;
    if th.is_zero_temperature() {
        return Err(ForceError::ZeroTemperature);
    }
    let big_lambda = th.lambda_thermal();
    reduce(spec, l, tol, Regime::FiniteT, -1.0 / th.beta, |lambda| {
        matsubara_kernel(lambda, big_lambda, l, tol)
    })
}

/// Zero-temperature force
/// `F = -(hbar c / 2 pi) sum_p g_p lambda_p^2 sum_{n >= 1} (K_0 + K_2)(2 n L lambda_p)`.
pub fn force_zero_t(spec: &Spectrum, l: f64, th: &ThermalState, tol: f64) -> Result<ForceResult, ForceError> {
    check_inputs(spec, l, tol)?;
    reduce(spec, l, tol, Regime::ZeroT, -th.hbar_c() / (2.0 * PI), |lambda| image_kernel(lambda, l, tol))
}

/// Classical (`hbar -> 0`) force `F = -(1/beta) sum_p g_p lambda_p / (e^{2 L lambda_p} - 1)`.
pub fn force_classical(spec: &Spectrum, l: f64, beta: f64, tol: f64) -> Result<ForceResult, ForceError> {
    check_inputs(spec, l, tol)?;
    if beta <= 0.0 || !beta.is_finite() {
        return Err(ForceError::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
    }
    reduce(spec, l, tol, Regime::Classical, -1.0 / beta, |lambda| ModeSum {
        value: lambda / (2.0 * l * lambda).exp_m1(),
        tail: 0.0,
        terms: 0,
    })
}

/// Force variance `2 F^2` of the piston plate.
pub fn fluctuation_variance(force: f64) -> f64 {
    2.0 * force * force
}
