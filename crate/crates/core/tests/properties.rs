//! Property tests for the arithmetic layer and the closed-form constants.


use proptest::prelude::*;

use divcorr_core::convolve::{dirichlet_convolve, tabulate, ValueMap};
use divcorr_core::{correlation_limit, divisors, factorize, tau, ExactScalar};

proptest! {
    #[test]
    fn factorization_reconstructs_its_input(n in 1u64..1_000_000_000_000u64) {
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.value(), n);
        let mut prev = 0u64;
        for &(p, k) in f.pairs() {
            prop_assert!(p > prev && k >= 1);
            prev = p;
        }
    }

    #[test]
    fn divisor_list_is_sorted_and_complete(n in 1u64..100_000u64) {
        let divs = divisors(n).unwrap();
        prop_assert!(divs.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(divs.len() as u64, tau(n).unwrap());
        for &d in &divs {
            prop_assert_eq!(n % d, 0);
        }
    }

    #[test]
    fn convolution_commutes_on_random_values(
        seed_f in proptest::collection::vec(-5i64..=5, 12),
        seed_g in proptest::collection::vec(-5i64..=5, 12),
    ) {
        let n = 60u64; // 12 divisors
        let divs = divisors(n).unwrap();
        let mk = |vals: &[i64]| -> ValueMap {
            divs.iter()
                .zip(vals)
                .map(|(&d, &v)| (d, ExactScalar::from_int(v)))
                .collect()
        };
        let f = mk(&seed_f);
        let g = mk(&seed_g);
        let fg = dirichlet_convolve(&f, &g, n).unwrap();
        let gf = dirichlet_convolve(&g, &f, n).unwrap();
        prop_assert_eq!(fg, gf);
    }

    #[test]
    fn correlation_limit_symmetry_and_scaling(a in 1u64..40, b in 1u64..40, t in 2u64..6) {
        let ab = correlation_limit(a, b).unwrap().value;
        let ba = correlation_limit(b, a).unwrap().value;
        prop_assert_eq!(ab, ba);
        let scaled = correlation_limit(t * a, t * b).unwrap().value;
        prop_assert!((scaled * (t as f64).sqrt() - ab).abs() <= 1e-12 * ab.abs());
    }
}

#[test]
fn scaled_divisor_count_ratio_is_multiplicative() {
    // for multiplicative f with f(c) != 0, n -> f(cn)/f(c) is multiplicative;
    // exhaustively for f = tau, c <= 20 and coprime n, m <= 100:
    // tau(c n m) tau(c) = tau(c n) tau(c m)
    for c in 1u64..=20 {
        for n in 1u64..=100 {
            for m in 1u64..=100 {
                if divcorr_core::gcd(n, m) != 1 {
                    continue;
                }
                let lhs = tau(c * n * m).unwrap() * tau(c).unwrap();
                let rhs = tau(c * n).unwrap() * tau(c * m).unwrap();
                assert_eq!(lhs, rhs, "c={c} n={n} m={m}");
            }
        }
    }
}

#[test]
fn mobius_inversion_on_a_divisor_lattice() {
    // tau = 1 * 1 and mu * 1 = e, so mu * tau = 1 on the divisors of 360
    let n = 360u64;
    let mu = divcorr_core::convolve::mu_map(n).unwrap();
    let tau_map = tabulate(n, |d| Ok(ExactScalar::from_int(tau(d).unwrap() as i64))).unwrap();
    let ones = dirichlet_convolve(&mu, &tau_map, n).unwrap();
    for (&d, v) in &ones {
        assert!(v.is_one(), "(mu * tau)({d}) != 1");
    }
}
