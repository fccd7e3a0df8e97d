//! Bessel functions of the first kind, integer order, real non-negative argument.
//!
//! Three evaluation routes are used:
//!
//! * `x <= 1`: the ascending power series. Terms shrink by at least a factor
//!   of four so there is no cancellation.
//! * `x >= max(25, nu^2)`: Hankel's asymptotic expansion truncated at its
//!   smallest term. The phase is reduced exactly using `nu mod 4`.
//! * otherwise: Miller's backward recurrence normalised with
//!   `J_0 + 2 * sum J_2k = 1`.

use std::f64::consts::{FRAC_PI_4, PI};

use super::SpecialFunctionError;

/// Lower argument bound of the Hankel expansion.
pub const ASYMPTOTIC_CROSSOVER: f64 = 25.0;

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_BIG: f64 = 1e250;
const RESCALE_SMALL: f64 = 1e-250;

/// `J_nu(x)` for integer `nu >= 0` and `x >= 0`.
pub fn bessel_j(nu: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    if x < 0.0 || !x.is_finite() {
        return Err(SpecialFunctionError::Domain {
            function: "bessel_j",
            arg: x,
        });
    }
    Ok(bessel_j_unchecked(nu, x))
}

/// `J'_nu(x)` from `J'_nu = (J_{nu-1} - J_{nu+1}) / 2` and `J'_0 = -J_1`.
pub fn bessel_j_prime(nu: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    if x < 0.0 || !x.is_finite() {
        return Err(SpecialFunctionError::Domain {
            function: "bessel_j_prime",
            arg: x,
        });
    }
    Ok(bessel_j_prime_unchecked(nu, x))
}

pub(crate) fn bessel_j_prime_unchecked(nu: u32, x: f64) -> f64 {
    if nu == 0 {
        -bessel_j_unchecked(1, x)
    } else {
        0.5 * (bessel_j_unchecked(nu - 1, x) - bessel_j_unchecked(nu + 1, x))
    }
}

pub(crate) fn bessel_j_unchecked(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let nuf = f64::from(nu);
    if x <= SERIES_LIMIT {
        power_series(nu, x)
    } else if x >= ASYMPTOTIC_CROSSOVER && x >= nuf * nuf {
        hankel_asymptotic(nu, x)
    } else {
        miller(nu, x)
    }
}

fn power_series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^nu / nu!, built incrementally to avoid overflow in nu!
    let mut lead = 1.0;
    for k in 1..=nu {
        lead *= half / f64::from(k);
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..200u32 {
        term *= q / (f64::from(k) * f64::from(k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel expansion `J = sqrt(2/(pi x)) (P cos chi - Q sin chi)`.
pub(crate) fn hankel_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(nu) * f64::from(nu);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev_abs = f64::INFINITY;
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) / (f64::from(k) * eight_x);
        if next == 0.0 || next.abs() >= prev_abs {
            break;
        }
        prev_abs = next.abs();
        term = next;
        // k = 1 -> Q, k = 2 -> -P, k = 3 -> -Q, k = 4 -> +P, ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    // chi = x - (2 nu + 1) pi / 4, with the constant reduced modulo 2 pi
    let shift = f64::from((2 * nu + 1) % 8) * FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (ss, cs) = shift.sin_cos();
    let cos_chi = cx * cs + sx * ss;
    let sin_chi = sx * cs - cx * ss;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Miller's backward recurrence from an order well above `max(nu, x)`.
fn miller(nu: u32, x: f64) -> f64 {
    let top = f64::from(nu).max(x);
    let mut start = (top + 30.0 + (200.0 * top).sqrt()).ceil() as u32;
    start += start % 2;
    let two_over_x = 2.0 / x;

    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-300; // J_k, arbitrary seed
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut k = start;
    while k > 0 {
        let j_prev = f64::from(k) * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        if k == nu {
            wanted = j_cur;
        }
        if k.is_multiple_of(2) && k > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE_BIG {
            j_cur *= RESCALE_SMALL;
            j_next *= RESCALE_SMALL;
            norm *= RESCALE_SMALL;
            wanted *= RESCALE_SMALL;
        }
    }
    norm += j_cur;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain ascending series, summed with enough care
    /// for moderate x.
    fn series_oracle(nu: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..400u32 {
            term *= -(0.25 * x * x) / (f64::from(k) * f64::from(k + nu));
            sum += term;
        }
        sum
    }

    #[test]
    fn trivial_values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_argument_is_a_domain_error() {
        assert!(matches!(
            bessel_j(0, -1.0),
            Err(SpecialFunctionError::Domain { .. })
        ));
        assert!(bessel_j_prime(2, f64::NAN).is_err());
    }

    #[test]
    fn j0_vanishes_at_bisected_series_root() {
        // root of the oracle series located by bisection
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(0, lo) * series_oracle(0, mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - 2.404825557695773).abs() < 1e-12);
        assert!(bessel_j(0, 2.404825557695773).unwrap().abs() < 1e-10);
    }

    #[test]
    fn matches_series_for_moderate_arguments() {
        for nu in 0..12 {
            for i in 1..60 {
                let x = 0.2 * f64::from(i);
                let want = series_oracle(nu, x);
                let got = bessel_j_unchecked(nu, x);
                // series loses ~ e^x / sqrt(x) digits to cancellation
                let scale = want.abs().max(1e-3);
                assert!(
                    (got - want).abs() <= 1e-12 * scale.max(1.0),
                    "nu={nu} x={x} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_and_recurrence_agree_in_overlap_band() {
        for nu in 0..5 {
            for i in 0..=60 {
                let x = 25.0 + 0.25 * f64::from(i);
                let a = hankel_asymptotic(nu, x);
                let m = miller(nu, x);
                assert!((a - m).abs() < 2e-15, "nu={nu} x={x} {a} {m}");
            }
        }
    }

    #[test]
    fn three_term_recurrence_holds_on_grid() {
        for nu in 1..40u32 {
            for i in 1..200 {
                let x = 0.37 * f64::from(i);
                let lhs = bessel_j_unchecked(nu - 1, x) + bessel_j_unchecked(nu + 1, x);
                let rhs = 2.0 * f64::from(nu) / x * bessel_j_unchecked(nu, x);
                let scale = lhs.abs().max(rhs.abs()).max(1e-300);
                // relative where the functions are not tiny, absolute otherwise
                let tol = 1e-10 * scale.max(1e-6);
                assert!((lhs - rhs).abs() <= tol, "nu={nu} x={x} {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn large_argument_stays_accurate() {
        // J_0^2 + J_1^2 ~ 2/(pi x) for large x; check the envelope at 1e4
        let x = 1e4;
        let j0 = bessel_j_unchecked(0, x);
        let j1 = bessel_j_unchecked(1, x);
        let env = (j0 * j0 + j1 * j1) * PI * x / 2.0;
        assert!((env - 1.0).abs() < 1e-4);
        // Wronskian-type identity J_1 Y_0 - J_0 Y_1 is unavailable; use the
        // recurrence at large x across the crossover instead
        for nu in 1..10u32 {
            let x = 400.0;
            let lhs = bessel_j_unchecked(nu - 1, x) + bessel_j_unchecked(nu + 1, x);
            let rhs = 2.0 * f64::from(nu) / x * bessel_j_unchecked(nu, x);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for nu in 0..6 {
            for i in 1..40 {
                let x = 0.5 * f64::from(i);
                let h = 1e-5;
                let fd = (bessel_j_unchecked(nu, x + h) - bessel_j_unchecked(nu, x - h)) / (2.0 * h);
                assert!((fd - bessel_j_prime_unchecked(nu, x)).abs() < 1e-9);
            }
        }
    }
}
