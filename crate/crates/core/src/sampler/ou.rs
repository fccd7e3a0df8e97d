use serde::{Deserialize, Serialize};

/// One Langevin channel `d phi/ds = -kappa phi + eta`, with
/// `<eta(s) eta(s')> = noise_strength delta(s - s')` and
/// `noise_strength = 2 k_B T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeChannel {
    pub kappa: f64,
    pub noise_strength: f64,
    pub phi: f64,
}

impl ModeChannel {
    pub fn new(kappa: f64, temperature: f64) -> Self {
        ModeChannel {
            kappa,
            noise_strength: 2.0 * temperature,
            phi: 0.0,
        }
    }

    pub fn temperature(&self) -> f64 {
        0.5 * self.noise_strength
    }
}

/// Exact one-step law of the Ornstein-Uhlenbeck process over pseudo-time `ds`:
/// `phi' = phi e^{-kappa ds} + xi sqrt((T/kappa)(1 - e^{-2 kappa ds}))`.
#[inline]
pub fn ou_step_exact(ch: ModeChannel, ds: f64, xi: f64) -> ModeChannel {
    let decay = (-ch.kappa * ds).exp();
    let spread = (-(-2.0 * ch.kappa * ds).exp_m1() * ch.temperature() / ch.kappa).sqrt();
    ModeChannel {
        phi: ch.phi * decay + xi * spread,
        ..ch
    }
}

/// Stationary variance `k_B T / kappa`.
pub fn stationary_variance(kappa: f64, temperature: f64) -> f64 {
    temperature / kappa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_step_forgets_initial_value() {
        let ch = ModeChannel {
            phi: 123.0,
            ..ModeChannel::new(2.0, 3.0)
        };
        let out = ou_step_exact(ch, 1e3, 0.7);
        assert!((out.phi - 0.7 * stationary_variance(2.0, 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_step_is_identity() {
        let ch = ModeChannel {
            phi: -0.4,
            ..ModeChannel::new(5.0, 1.0)
        };
        assert_eq!(ou_step_exact(ch, 0.0, 0.0).phi, -0.4);
        assert!((ou_step_exact(ch, 1e-12, 0.0).phi + 0.4).abs() < 1e-10);
    }

    #[test]
    fn stationary_variance_scaling() {
        assert_eq!(stationary_variance(1.0, 1.0), 1.0);
        assert_eq!(stationary_variance(2.0, 1.0), 0.5);
    }

    #[test]
    fn one_step_variance_from_rest() {
        // Monte-Carlo oracle: phi = 0, kappa = T = ds = 1 gives Var = 1 - e^{-2}
        use super::super::rng::NormalStream;
        let mut normals = NormalStream::new(7, 0);
        let n = 1_000_000;
        let ch = ModeChannel::new(1.0, 1.0);
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for _ in 0..n {
            let p = ou_step_exact(ch, 1.0, normals.next()).phi;
            s2 += p * p;
            s4 += p.powi(4);
        }
        let var = s2 / n as f64;
        let se = ((s4 / n as f64 - var * var) / n as f64).sqrt();
        let want = 1.0 - (-2.0f64).exp();
        assert!((var - want).abs() < 3.0 * se, "var {var}, want {want}, se {se}");
    }
}
