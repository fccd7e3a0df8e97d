//! The axial sum behind the finite-temperature kernel, checked numerically.
//!
//! The raw per-plate sum over axial wavenumbers `k = n pi / L` diverges
//! linearly in the cutoff. Subtracting the same sum for a distant auxiliary
//! plate at `L' = 10 L`, truncated at the same wavenumber, leaves a finite
//! remainder whose limit follows from
//! `sum_{n >= 1} 1/(Q^2 + (n pi / L)^2) = L coth(L Q)/(2Q) - 1/(2Q^2)`.

use crate::summation::CompensatedSum;

const AUXILIARY_RATIO: f64 = 10.0;

fn axial_sum(q: f64, l: f64, n: u64) -> f64 {
    let step = std::f64::consts::PI / l;
    let q2 = q * q;
    let mut s = CompensatedSum::new();
    // smallest terms first
    for k in (1..=n).rev() {
        let kx = k as f64 * step;
        let k2 = kx * kx;
        s.add(k2 / (q2 + k2));
    }
    2.0 * s.value() / l
}

/// `(2/L) sum_{n <= N} k^2/(Q^2 + k^2) - (2/L') sum_{n <= 10 N} k'^2/(Q^2 + k'^2)`
/// with `L' = 10 L`.
pub fn axial_kernel_check(q: f64, l: f64, n_x: u64) -> f64 {
    let lp = AUXILIARY_RATIO * l;
    axial_sum(q, l, n_x) - axial_sum(q, lp, (AUXILIARY_RATIO as u64) * n_x)
}

/// `N -> inf` limit of [`axial_kernel_check`]:
/// `-Q (coth(L Q) - coth(L' Q)) + 1/L - 1/L'`.
pub fn axial_kernel_limit(q: f64, l: f64) -> f64 {
    let lp = AUXILIARY_RATIO * l;
    let coth = |x: f64| 1.0 / x.tanh();
    -q * (coth(l * q) - coth(lp * q)) + 1.0 / l - 1.0 / lp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_closed_form() {
        let want = axial_kernel_limit(1.0, 1.0);
        let mut prev = f64::INFINITY;
        for n in [10u64, 100, 1000, 10_000] {
            let err = (axial_kernel_check(1.0, 1.0, n) - want).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn large_separation_kernel_shape() {
        // -Q (coth(LQ) - 1) = -2Q e^{-2LQ} (1 + e^{-2LQ} + ...)
        let (q, l): (f64, f64) = (1.3, 6.0);
        let kernel = -q * (1.0 / (l * q).tanh() - 1.0);
        let leading = -2.0 * q * (-2.0 * l * q).exp();
        assert!((kernel / leading - 1.0).abs() < 2.0 * (-2.0 * l * q).exp());
    }
}
