//! Positive zeros of `J_nu` and `J'_nu`.
//!
//! Zeros are bracketed by a sign-change scan that starts at a guaranteed
//! lower bound (`j_{nu,1} > nu`, `j'_{nu,1} > nu` for `nu >= 1`) and steps by
//! less than half of the smallest possible zero spacing, then refined with
//! Brent's method.

use serde::{Deserialize, Serialize};

use super::bessel_j::{bessel_j_prime_unchecked, bessel_j_unchecked};
use super::SpecialFunctionError;

/// Which function the zeros belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroKind {
    FunctionZero,
    DerivativeZero,
}

/// Ascending positive zeros of `J_nu` or `J'_nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub order: u32,
    pub kind: ZeroKind,
    pub values: Vec<f64>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

// Consecutive zeros of J_nu and J'_nu are never closer than ~2.4.
const SCAN_STEP: f64 = 0.5;
const ROOT_XTOL: f64 = 1e-14;

/// First `count` positive zeros of `J_nu`.
pub fn bessel_j_zeros(nu: u32, count: usize) -> Result<ZeroList, SpecialFunctionError> {
    if count == 0 {
        return Err(SpecialFunctionError::InvalidCount);
    }
    Ok(ZeroList {
        order: nu,
        kind: ZeroKind::FunctionZero,
        values: scan_zeros(ZeroKind::FunctionZero, nu, Limit::Count(count)),
    })
}

/// First `count` positive zeros of `J'_nu`. The zero at the origin is never
/// reported (for `nu = 0` it is the constant mode).
pub fn bessel_j_prime_zeros(nu: u32, count: usize) -> Result<ZeroList, SpecialFunctionError> {
    if count == 0 {
        return Err(SpecialFunctionError::InvalidCount);
    }
    Ok(ZeroList {
        order: nu,
        kind: ZeroKind::DerivativeZero,
        values: scan_zeros(ZeroKind::DerivativeZero, nu, Limit::Count(count)),
    })
}

/// All positive zeros strictly below `x_max`.
pub fn zeros_below(kind: ZeroKind, nu: u32, x_max: f64) -> Vec<f64> {
    scan_zeros(kind, nu, Limit::Below(x_max))
}

enum Limit {
    Count(usize),
    Below(f64),
}

fn scan_zeros(kind: ZeroKind, nu: u32, limit: Limit) -> Vec<f64> {
    let f = |x: f64| match kind {
        ZeroKind::FunctionZero => bessel_j_unchecked(nu, x),
        ZeroKind::DerivativeZero => bessel_j_prime_unchecked(nu, x),
    };
    let start = match (kind, nu) {
        // J'_0 = -J_1 is negative right after the origin
        (_, 0) => 1e-3,
        _ => f64::from(nu),
    };
    let mut out = Vec::new();
    let mut a = start;
    let mut fa = f(a);
    loop {
        match limit {
            Limit::Count(n) if out.len() >= n => break,
            Limit::Below(x_max) if a >= x_max => break,
            _ => {}
        }
        let b = a + SCAN_STEP;
        let fb = f(b);
        if fa == 0.0 {
            push_zero(&mut out, a, &limit);
        } else if fa * fb < 0.0 {
            let z = brent(&f, a, b, fa, fb);
            push_zero(&mut out, z, &limit);
        }
        a = b;
        fa = fb;
    }
    out
}

fn push_zero(out: &mut Vec<f64>, z: f64, limit: &Limit) {
    match *limit {
        Limit::Below(x_max) if z >= x_max => {}
        _ => out.push(z),
    }
}

/// Brent's root finder on a bracket with `fa * fb < 0`.
pub(crate) fn brent(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() < ROOT_XTOL * b.abs().max(1.0) {
            break;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = (s > lo.min(b)) && (s < lo.max(b));
        let tol = ROOT_XTOL * b.abs().max(1.0);
        if !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bracketing oracle: bisection on a fine sign-change grid.
    fn bisect_oracle(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let (mut a, mut b) = (lo, hi);
        assert!(f(a) * f(b) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn first_zeros_match_bracketing_oracle() {
        let z0 = bessel_j_zeros(0, 1).unwrap().values[0];
        let z1 = bessel_j_zeros(1, 1).unwrap().values[0];
        assert!((z0 - bisect_oracle(|x| bessel_j_unchecked(0, x), 2.0, 3.0)).abs() < 1e-12);
        assert!((z1 - bisect_oracle(|x| bessel_j_unchecked(1, x), 3.5, 4.0)).abs() < 1e-12);
        assert!((z0 - 2.404825557695773).abs() < 1e-10);
        assert!((z1 - 3.831705970207512).abs() < 1e-10);
        let z02 = bessel_j_zeros(0, 2).unwrap().values[1];
        assert!(z0 < z1 && z1 < z02);
    }

    #[test]
    fn derivative_zeros() {
        let p11 = bessel_j_prime_zeros(1, 1).unwrap().values[0];
        assert!((p11 - 1.841183781340659).abs() < 1e-10);
        assert!((p11 * p11 - 3.39).abs() < 5e-3);
        let p01 = bessel_j_prime_zeros(0, 1).unwrap().values[0];
        let j11 = bessel_j_zeros(1, 1).unwrap().values[0];
        assert!((p01 - j11).abs() < 1e-12);
        let p21 = bessel_j_prime_zeros(2, 1).unwrap().values[0];
        let oracle = bisect_oracle(|x| bessel_j_prime_unchecked(2, x), 2.5, 3.5);
        assert!((p21 - oracle).abs() < 1e-12);
        assert!((p21 - 3.054_236_928_227_14).abs() < 1e-10);
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(bessel_j_zeros(0, 0).is_err());
        assert!(bessel_j_prime_zeros(3, 0).is_err());
    }

    #[test]
    fn high_order_zeros_vanish() {
        for nu in [10u32, 50, 120] {
            let z = bessel_j_zeros(nu, 5).unwrap();
            for &x in &z.values {
                assert!(bessel_j_unchecked(nu, x).abs() < 1e-9);
                assert!(x > f64::from(nu));
            }
            let zp = bessel_j_prime_zeros(nu, 5).unwrap();
            for &x in &zp.values {
                assert!(bessel_j_prime_unchecked(nu, x).abs() < 1e-9);
            }
            assert!(zp.values[0] < z.values[0]);
        }
    }

    #[test]
    fn zeros_below_respects_limit() {
        let z = zeros_below(ZeroKind::FunctionZero, 0, 10.0);
        assert_eq!(z.len(), 3);
        assert!(z.iter().all(|&x| x < 10.0));
        assert!(zeros_below(ZeroKind::FunctionZero, 20, 20.0).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn zero_lists_are_increasing_and_interlace(nu in 0u32..60, count in 1usize..12) {
            let a = bessel_j_zeros(nu, count).unwrap().values;
            let b = bessel_j_zeros(nu + 1, count).unwrap().values;
            prop_assert_eq!(a.len(), count);
            for w in a.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            prop_assert!(a[0] > 0.0);
            // j_{nu,k} < j_{nu+1,k} < j_{nu,k+1}
            for k in 0..count - 1 {
                prop_assert!(a[k] < b[k] && b[k] < a[k + 1]);
            }
            let p = bessel_j_prime_zeros(nu, count).unwrap().values;
            if nu >= 1 {
                prop_assert!(p[0] < a[0]);
            }
            for &z in &p {
                prop_assert!(bessel_j_prime_unchecked(nu, z).abs() < 1e-9);
            }
        }
    }
}
