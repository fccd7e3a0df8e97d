//! Modified Bessel functions of the second kind, orders 0, 1 and 2.
//!
//! `K_0` and `K_1` come from their ascending series for `x <= 2` and from
//! Steed's continued fraction (CF2, Thompson-Barnett form) above that.
//! `K_2` follows from the upward recurrence, which is stable for `K`.

use std::f64::consts::PI;

use super::SpecialFunctionError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;

/// `K_alpha(x)` for `alpha` in `{0, 1, 2}` and `x > 0`.
pub fn bessel_k(alpha: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    if x <= 0.0 || x.is_nan() {
        return Err(SpecialFunctionError::Domain {
            function: "bessel_k",
            arg: x,
        });
    }
    if alpha > 2 {
        return Err(SpecialFunctionError::UnsupportedOrder(alpha));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (k0, k1) = bessel_k01(x);
    Ok(match alpha {
        0 => k0,
        1 => k1,
        _ => k0 + 2.0 / x * k1,
    })
}

/// `K_0(x) + K_2(x)` in one evaluation.
pub(crate) fn k0_plus_k2(x: f64) -> f64 {
    let (k0, k1) = bessel_k01(x);
    2.0 * k0 + 2.0 / x * k1
}

/// `(K_0(x), K_1(x))` for `x > 0`.
pub(crate) fn bessel_k01(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        series_k01(x)
    } else {
        steed_k01(x)
    }
}

fn series_k01(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // K_0 = -(ln(x/2) + gamma) I_0 + sum H_k y^k / (k!)^2
    // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum (psi(k+1) + psi(k+2)) y^k / (k!(k+1)!)
    let mut i0 = 0.0;
    let mut s0 = 0.0;
    let mut i1_sum = 0.0;
    let mut s1 = 0.0;
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k!(k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 0..60u32 {
        if k > 0 {
            let kf = f64::from(k);
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / f64::from(k + 1);
        i0 += t0;
        s0 += harmonic * t0;
        i1_sum += t1;
        s1 += (psi_k1 + psi_k2) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1_sum {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let i1 = 0.5 * x * i1_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

fn steed_k01(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    let a1 = 0.25; // 1/4 - mu^2 with mu = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000u32 {
        let fi = f64::from(i);
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quadrature oracle: `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`
    /// by the trapezoid rule, which converges geometrically here.
    fn quadrature_oracle(nu: f64, x: f64) -> f64 {
        let h: f64 = 1.0 / 64.0;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp() * (nu * t).cosh();
            sum += v;
            if v < 1e-300 || (v < 1e-22 * sum && t > 1.0) {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn k0_at_one_matches_quadrature() {
        let got = bessel_k(0, 1.0).unwrap();
        let oracle = quadrature_oracle(0.0, 1.0);
        assert!((oracle - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((got - oracle).abs() / oracle < 1e-12);
    }

    #[test]
    fn matches_quadrature_across_range() {
        for &x in &[1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 5.0, 10.0, 30.0, 100.0, 600.0] {
            for alpha in 0..=2u32 {
                let want = quadrature_oracle(f64::from(alpha), x);
                let got = bessel_k(alpha, x).unwrap();
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "K_{alpha}({x}) = {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn recurrence_identity() {
        for &x in &[0.1, 1.0, 10.0] {
            let k0 = bessel_k(0, x).unwrap();
            let k1 = bessel_k(1, x).unwrap();
            let k2 = bessel_k(2, x).unwrap();
            assert!(((k2 - k0 - 2.0 / x * k1) / k2).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_asymptotics() {
        let x = 50.0;
        let r = bessel_k(0, x).unwrap() * x.exp() * (2.0 * x / PI).sqrt();
        // r = 1 - 1/(8x) + 9/(128 x^2) - ...
        assert!((r - 1.0).abs() < 3e-3);
        assert!((r - (1.0 - 1.0 / (8.0 * x))).abs() < 1e-4);
    }

    #[test]
    fn underflows_gracefully() {
        assert_eq!(bessel_k(0, 1e4).unwrap(), 0.0);
        assert_eq!(bessel_k(2, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -2.0).is_err());
        assert!(matches!(
            bessel_k(3, 1.0),
            Err(SpecialFunctionError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn positive_and_strictly_decreasing() {
        for alpha in 0..=2u32 {
            let mut prev = f64::INFINITY;
            let mut x = 1e-6;
            while x < 700.0 {
                let v = bessel_k(alpha, x).unwrap();
                assert!(v > 0.0 && v < prev, "alpha={alpha} x={x}");
                prev = v;
                x *= 1.07;
            }
        }
    }
}
