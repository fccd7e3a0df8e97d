use casimir_core::sampler::{
    estimate_mode_sum, ou_step_exact, stationary_variance, ModeChannel, SamplerConfig, SamplerError,
};
use proptest::prelude::*;

fn small(seed: u64) -> SamplerConfig {
    SamplerConfig {
        seed,
        n_steps: 4_000,
        burn_in: 100,
        n_chains: 2,
        ..SamplerConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_step_is_identity(kappa in 0.01f64..100.0, phi in -10.0f64..10.0, xi in -5.0f64..5.0) {
        let ch = ModeChannel { phi, ..ModeChannel::new(kappa, 1.0) };
        prop_assert_eq!(ou_step_exact(ch, 0.0, xi).phi, phi);
    }

    #[test]
    fn long_step_forgets_the_start(kappa in 0.5f64..10.0, phi in -10.0f64..10.0, xi in -5.0f64..5.0) {
        let ch = ModeChannel { phi, ..ModeChannel::new(kappa, 2.0) };
        let next = ou_step_exact(ch, 100.0, xi).phi;
        prop_assert!((next - xi * stationary_variance(kappa, 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>()) {
        let ch = [ModeChannel::new(1.0, 1.0), ModeChannel::new(3.0, 0.5)];
        let a = estimate_mode_sum(&ch, &[1.0, 2.0], &small(seed)).unwrap();
        let b = estimate_mode_sum(&ch, &[1.0, 2.0], &small(seed)).unwrap();
        let c = estimate_mode_sum(&ch, &[1.0, 2.0], &small(seed ^ 1)).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_ne!(a.0.value, c.0.value);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let ch = [ModeChannel::new(1.0, 1.0)];
    assert!(matches!(
        estimate_mode_sum(&ch, &[1.0, 2.0], &small(1)),
        Err(SamplerError::WeightLength { .. })
    ));
    assert!(estimate_mode_sum(&[], &[], &small(1)).is_err());
    let cfg = SamplerConfig { n_chains: 0, ..small(1) };
    assert!(cfg.validate().is_err());
}

#[test]
fn zero_burn_in_with_large_step_is_unbiased() {
    use casimir_core::sampler::channel_statistics;
    let cfg = SamplerConfig {
        seed: 11,
        ds: 4.0,
        n_steps: 100_000,
        burn_in: 0,
        n_chains: 2,
    };
    let (stats, _) = channel_statistics(&[ModeChannel::new(2.0, 3.0)], &cfg).unwrap();
    let s = stats[0];
    assert!(s.second.z_score(1.5).abs() < 3.0, "{s:?}");
    assert!(s.fourth_ratio.z_score(3.0).abs() < 3.0, "{s:?}");
}

#[test]
fn chain_layout_does_not_change_the_distribution() {
    use casimir_core::sampler::channel_statistics;
    let ch = [ModeChannel::new(1.0, 1.0)];
    let run = |n_chains: usize| {
        let cfg = SamplerConfig {
            seed: 5,
            n_steps: 1_000 + 160_000 / n_chains,
            burn_in: 1_000,
            n_chains,
            ..SamplerConfig::default()
        };
        channel_statistics(&ch, &cfg).unwrap().0[0].second
    };
    let (one, eight) = (run(1), run(8));
    let z = (one.value - eight.value) / one.stderr.hypot(eight.stderr);
    assert!(z.abs() < 3.0, "{one:?} vs {eight:?}");
}
