use std::f64::consts::PI;

use crate::special::ZETA_3;

use super::ThermalState;

/// Parallel-plate limit at `T = 0`: `-hbar c pi^2 A / (240 L^4)`.
pub fn asymptote_near_t0(area: f64, l: f64, th: &ThermalState) -> f64 {
    -th.hbar_c() * PI.powi(2) * area / (240.0 * l.powi(4))
}

/// Single-mode limit at `T = 0`:
/// `-(hbar c / (2 sqrt(pi L))) g_1 lambda_1^{3/2} e^{-2 L lambda_1}`.
pub fn asymptote_far_t0(g1: u32, lambda1: f64, l: f64, th: &ThermalState) -> f64 {
    -th.hbar_c() / (2.0 * (PI * l).sqrt()) * f64::from(g1) * lambda1.powf(1.5) * (-2.0 * l * lambda1).exp()
}

/// Classical parallel-plate limit: `-zeta(3) A / (4 beta pi L^3)`.
pub fn asymptote_near_classical(area: f64, l: f64, beta: f64) -> f64 {
    -ZETA_3 * area / (4.0 * beta * PI * l.powi(3))
}

/// Classical single-mode limit: `-(1/beta) g_1 lambda_1 e^{-2 L lambda_1}`.
pub fn asymptote_far_classical(g1: u32, lambda1: f64, l: f64, beta: f64) -> f64 {
    -f64::from(g1) * lambda1 * (-2.0 * l * lambda1).exp() / beta
}

/// Where the near and far asymptotes come closest on a logarithmic scale,
/// as `(L, near / far)` at that separation.
///
/// `ln(near/far)` is convex in `L` with its minimum at `L = 7/(4 lambda_1)`
/// at `T = 0` and `L = 3/(2 lambda_1)` in the classical limit. When the ratio
/// there exceeds one the curves never cross and this is the closest approach.
pub fn asymptote_crossover(area: f64, g1: u32, lambda1: f64, classical: bool) -> (f64, f64) {
    let th = ThermalState::zero_temperature();
    if classical {
        let l = 1.5 / lambda1;
        (l, asymptote_near_classical(area, l, 1.0) / asymptote_far_classical(g1, lambda1, l, 1.0))
    } else {
        let l = 1.75 / lambda1;
        (l, asymptote_near_t0(area, l, &th) / asymptote_far_t0(g1, lambda1, l, &th))
    }
}
