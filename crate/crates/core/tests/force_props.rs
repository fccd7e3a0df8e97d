use casimir_core::force::{
    default_m_max, force_classical, force_finite_t, force_zero_t, matsubara_closed_form, matsubara_mode_sum,
    ThermalState,
};
use casimir_core::spectrum::{combined_spectrum, CrossSection, Spectrum};
use proptest::prelude::*;

fn circle(radius: f64, n: usize) -> Spectrum {
    combined_spectrum(&CrossSection::Circle { radius }, n).unwrap()
}

const TOL: f64 = 1e-10;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attractive_and_decaying(l in 0.05f64..4.0) {
        let spec = circle(1.0, 60);
        let th = ThermalState::zero_temperature();
        let a = force_zero_t(&spec, l, &th, TOL).unwrap();
        let b = force_zero_t(&spec, l * 1.05, &th, TOL).unwrap();
        prop_assert!(a.force < 0.0 && b.force < 0.0);
        prop_assert!(b.force.abs() < a.force.abs());
        prop_assert!(a.tail_estimate <= TOL * a.force.abs());
    }

    #[test]
    fn geometric_scaling(l in 0.1f64..2.0, s in 0.5f64..3.0) {
        let th = ThermalState::zero_temperature();
        let f1 = force_zero_t(&circle(1.0, 50), l, &th, TOL).unwrap().force;
        let fs = force_zero_t(&circle(s, 50), l * s, &th, TOL).unwrap().force;
        prop_assert!((fs * s * s / f1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hbar_c_is_an_overall_factor(l in 0.1f64..2.0, hbar in 0.1f64..5.0, c in 0.1f64..5.0) {
        let spec = circle(1.0, 40);
        let unit = force_zero_t(&spec, l, &ThermalState::zero_temperature(), TOL).unwrap().force;
        let scaled = force_zero_t(&spec, l, &ThermalState::zero_temperature().with_units(hbar, c), TOL)
            .unwrap()
            .force;
        prop_assert!((scaled / (hbar * c * unit) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_force_exceeds_classical_part(l in 0.1f64..2.0, beta in 0.2f64..10.0) {
        let spec = circle(1.0, 40);
        let ft = force_finite_t(&spec, l, &ThermalState::natural(beta), TOL).unwrap();
        let fc = force_classical(&spec, l, beta, TOL).unwrap();
        prop_assert!(ft.force <= fc.force && fc.force < 0.0);
    }

    #[test]
    fn matsubara_resummation(lambda in 0.01f64..50.0, beta in 0.01f64..50.0) {
        let th = ThermalState::natural(beta);
        let sum = matsubara_mode_sum(lambda, &th, default_m_max(lambda, &th)).unwrap();
        let exact = matsubara_closed_form(lambda, &th);
        prop_assert!((sum / exact - 1.0).abs() < 1e-8, "{sum} vs {exact}");
    }
}
