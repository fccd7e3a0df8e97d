use crate::summation::CompensatedSum;

use super::{ForceError, ThermalState};

/// `(hbar c / 2 lambda) coth(beta hbar c lambda / 2)`, the resummed value of
/// the Matsubara mode sum.
pub fn matsubara_closed_form(lambda: f64, th: &ThermalState) -> f64 {
    let hc = th.hbar_c();
    let x = th.beta * hc * lambda;
    // 1 + 2/(e^x - 1), stable for small and large x
    let bracket = 1.0 + 2.0 / x.exp_m1();
    hc / (2.0 * lambda) * bracket
}

/// A truncation that makes the tail correction accurate to well below 1e-8
/// relative for any `lambda beta hbar c`.
pub fn default_m_max(lambda: f64, th: &ThermalState) -> u64 {
    let a = lambda / th.lambda_thermal();
    (4.0 * a).ceil() as u64 + 32
}

/// `(1/beta) sum_{|m| <= m_max} 1/(lambda^2 + omega_m^2)` plus the
/// Euler-Maclaurin estimate of the omitted `|m| > m_max` terms.
pub fn matsubara_mode_sum(lambda: f64, th: &ThermalState, m_max: u64) -> Result<f64, ForceError> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(ForceError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if th.is_zero_temperature() {
        return Err(ForceError::ZeroTemperature);
    }
    if m_max == 0 {
        return Err(ForceError::InvalidParameter("m_max must be at least 1".into()));
    }
    let big_lambda = th.lambda_thermal();
    // work with f(m) = 1/(a^2 + m^2), a = lambda / Lambda
    let a = lambda / big_lambda;
    let a2 = a * a;
    let f = |m: f64| 1.0 / (a2 + m * m);

    let mut sum = CompensatedSum::new();
    for m in (1..=m_max).rev() {
        sum.add(2.0 * f(m as f64));
    }
    sum.add(f(0.0));

    // sum_{m > M} f(m) = int_M^inf f - f(M)/2 - f'(M)/12 + f'''(M)/720 - ...
    let mf = m_max as f64;
    let d = a2 + mf * mf;
    let integral = if a > 0.0 { (a / mf).atan() / a } else { 1.0 / mf };
    let f1 = -2.0 * mf / (d * d);
    let f3 = -24.0 * mf * (mf * mf - a2) / (d * d * d * d);
    let tail = integral - f(mf) / 2.0 - f1 / 12.0 + f3 / 720.0;
    sum.add(2.0 * tail);

    Ok(sum.value() / (th.beta * big_lambda * big_lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lambda_one_at_lambda_thermal_one() {
        let th = ThermalState::natural(2.0 * PI);
        let got = matsubara_mode_sum(1.0, &th, default_m_max(1.0, &th)).unwrap();
        let want = 0.5 * (1.0 + 2.0 / ((2.0 * PI).exp() - 1.0));
        assert!(((got - want) / want).abs() < 1e-8);
    }

    #[test]
    fn identity_across_range() {
        for &x in &[1e-2, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0] {
            for &lambda in &[0.3, 1.0, 7.0] {
                let th = ThermalState::natural(x / lambda);
                let got = matsubara_mode_sum(lambda, &th, default_m_max(lambda, &th)).unwrap();
                let want = matsubara_closed_form(lambda, &th);
                assert!(((got - want) / want).abs() < 1e-8, "x={x} lambda={lambda}");
            }
        }
    }

    #[test]
    fn low_temperature_limit() {
        let th = ThermalState::natural(1e3);
        let s1 = matsubara_mode_sum(1.0, &th, default_m_max(1.0, &th)).unwrap();
        assert!((s1 - 0.5).abs() < 1e-8);
        let s2 = matsubara_mode_sum(0.5, &th, default_m_max(0.5, &th)).unwrap();
        assert!((s2 / s1 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn tail_correction_is_needed_and_sufficient() {
        let th = ThermalState::natural(1.0);
        let want = matsubara_closed_form(2.0, &th);
        let raw: f64 = (-40i64..=40)
            .map(|m| 1.0 / (4.0 + (m as f64 * 2.0 * PI).powi(2)))
            .sum::<f64>();
        assert!(((raw - want) / want).abs() > 1e-4);
        let got = matsubara_mode_sum(2.0, &th, 40).unwrap();
        assert!(((got - want) / want).abs() < 1e-10);
    }

    #[test]
    fn rejects_zero_temperature() {
        assert!(matches!(
            matsubara_mode_sum(1.0, &ThermalState::zero_temperature(), 10),
            Err(ForceError::ZeroTemperature)
        ));
    }
}
