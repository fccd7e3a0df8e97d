use casimir_core::special::{bessel_j, bessel_j_prime, bessel_j_prime_zeros, bessel_j_zeros, bessel_k};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn j_three_term_recurrence(nu in 1u32..40, x in 0.1f64..80.0) {
        let lhs = bessel_j(nu - 1, x).unwrap() + bessel_j(nu + 1, x).unwrap();
        let rhs = 2.0 * f64::from(nu) / x * bessel_j(nu, x).unwrap();
        let scale = bessel_j(nu - 1, x).unwrap().abs().max(bessel_j(nu + 1, x).unwrap().abs()).max(1e-300);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-3), "{lhs} vs {rhs}");
    }

    #[test]
    fn j_bounded(nu in 0u32..60, x in 0.0f64..200.0) {
        let j = bessel_j(nu, x).unwrap();
        prop_assert!(j.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn k_positive_and_decreasing(alpha in 0u32..3, x in 0.01f64..60.0) {
        let k = bessel_k(alpha, x).unwrap();
        let k_next = bessel_k(alpha, x * 1.01).unwrap();
        prop_assert!(k > 0.0 && k_next < k);
    }

    #[test]
    fn zeros_are_roots_and_interlace(nu in 0u32..30) {
        let z = bessel_j_zeros(nu, 8).unwrap().values;
        let zp = bessel_j_prime_zeros(nu, 8).unwrap().values;
        for w in z.windows(2) {
            prop_assert!(w[1] - w[0] > 2.0);
        }
        for &r in &z {
            prop_assert!(bessel_j(nu, r).unwrap().abs() < 1e-12);
        }
        for &r in &zp {
            prop_assert!(bessel_j_prime(nu, r).unwrap().abs() < 1e-12);
        }
        // j'_{nu,k} < j_{nu,k} for nu >= 1, and both exceed nu
        if nu >= 1 {
            for (a, b) in zp.iter().zip(&z) {
                prop_assert!(a < b && *a >= f64::from(nu));
            }
        }
    }
}
