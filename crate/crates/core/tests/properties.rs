use std::sync::OnceLock;

use gz_core::analysis::fit_exponent;
use gz_core::characters::{admissible_count, char_sum_brute, char_sum_closed_form, build_group};
use gz_core::circle::{build_exact_grid, decompose_check};
use gz_core::goldbach::build_class_convolution;
use gz_core::lfunc::{psi_chi, ZeroCatalog};
use gz_core::numtheory::{build_sieve, euler_phi, factorize};
use gz_core::singular::{j_weight, singular_series, SingularConstants};
use gz_core::{Complex64, SieveTable};
use num_rational::Ratio;
use proptest::prelude::*;

fn sieve() -> &'static SieveTable {
    static S: OnceLock<SieveTable> = OnceLock::new();
    S.get_or_init(|| build_sieve(100_000).unwrap())
}

fn odd_radical(n: u64) -> u64 {
    factorize(n).primes().filter(|&p| p > 2).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lambda_positive_exactly_on_prime_powers(n in 1u64..100_000) {
        let pp = n > 1 && factorize(n).factors.len() == 1;
        prop_assert_eq!(sieve().lambda_at(n) > 0.0, pp);
        prop_assert_eq!(sieve().is_prime_power(n), pp);
    }

    #[test]
    fn lambda_divisor_sum_is_log(n in 1u64..10_000) {
        let s: f64 = (1..=n).filter(|d| n % d == 0).map(|d| sieve().lambda_at(d)).sum();
        prop_assert!((s - (n as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn induced_primitive_is_stable(q in 1u64..300, k in any::<prop::sample::Index>()) {
        let group = build_group(q).unwrap();
        let chi = &group.characters()[k.index(group.len())];
        let prim = chi.induce_primitive();
        prop_assert!(prim.is_primitive());
        prop_assert_eq!(prim.modulus(), chi.conductor());
        prop_assert_eq!(prim.conductor(), chi.conductor());
        prop_assert_eq!(prim.induce_primitive(), prim.clone());
        for n in 1..=q as i64 {
            if let Some(v) = chi.value(n) {
                prop_assert_eq!(Some(v), prim.value(n));
            }
        }
    }

    #[test]
    fn characters_are_completely_multiplicative(
        q in 1u64..300,
        k in any::<prop::sample::Index>(),
        m in 1u64..10_000,
        n in 1u64..10_000,
    ) {
        let group = build_group(q).unwrap();
        let chi = &group.characters()[k.index(group.len())];
        let d = chi.value_denominator();
        let lhs = chi.value_exponent(m * n % q.max(1));
        let rhs = chi.value_exponent(m % q.max(1)).zip(chi.value_exponent(n % q.max(1))).map(|(a, b)| (a + b) % d);
        prop_assert_eq!(lhs, rhs);
        let principal = chi.mul(&chi.conj()).unwrap();
        prop_assert!(principal.is_principal());
    }

    #[test]
    fn column_orthogonality(q in 1u64..200, a in 0i64..400) {
        let group = build_group(q).unwrap();
        let sum: Complex64 = group.iter().map(|chi| chi.value_complex(a)).sum();
        let expected = if a.rem_euclid(q as i64) == 1 % q as i64 { euler_phi(q) as f64 } else { 0.0 };
        prop_assert!((sum - Complex64::new(expected, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn character_sum_closed_form_matches_enumeration(
        q in 1u64..120,
        k in any::<prop::sample::Index>(),
        c in 0u64..240,
    ) {
        let group = build_group(q).unwrap();
        let chi = &group.characters()[k.index(group.len())];
        prop_assert_eq!(char_sum_closed_form(chi, c % q), char_sum_brute(chi, c % q));
    }

    #[test]
    fn singular_series_counts_admissible_pairs(q in 1u64..500, c in 0i64..1_000) {
        let phi = euler_phi(q);
        let weighted = singular_series(q, c) * Ratio::from_integer(phi * phi);
        prop_assert_eq!(weighted, Ratio::from_integer(admissible_count(q, c as u64 % q)));
    }

    #[test]
    fn j_weight_depends_on_odd_kernel(n in 1u64..1_000_000) {
        let k = SingularConstants::standard();
        let r = odd_radical(n);
        let lhs = j_weight(2 * n, &k) / (2 * n) as f64;
        let rhs = j_weight(2 * r, &k) / (2 * r) as f64;
        prop_assert!((lhs - rhs).abs() < 1e-12 * rhs);
        prop_assert_eq!(j_weight(2 * n + 1, &k), 0.0);
    }

    #[test]
    fn class_psi_recovered_from_characters(q in 1u64..30, a in 0u64..30, u in 2.0f64..100_000.0) {
        let a = a % q;
        let s = sieve();
        let group = build_group(q).unwrap();
        let mut total = Complex64::new(0.0, 0.0);
        for chi in group.iter() {
            total += chi.value_complex(a as i64).conj() * psi_chi(u, chi, s).unwrap();
        }
        let expected = if group.principal().value(a as i64).is_some() {
            s.class_cumulative_psi(q)[a as usize][u.floor() as usize]
        } else {
            0.0
        };
        prop_assert!((total / euler_phi(q) as f64 - expected).norm() < 1e-6 * expected.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_lives_on_one_class_and_is_symmetric(
        q in 1u64..12,
        a in 0i64..12,
        b in 0i64..12,
        x in 10u64..3_000,
    ) {
        let s = sieve();
        let ab = build_class_convolution(q, a, b, x, s).unwrap();
        let ba = build_class_convolution(q, b, a, x, s).unwrap();
        let target = (a + b).rem_euclid(q as i64) as u64;
        for n in 0..=x {
            if n % q != target {
                prop_assert_eq!(ab.g(n), 0.0);
            }
            prop_assert!((ab.g(n) - ba.g(n)).abs() <= 1e-9 * ab.g(n).max(1.0));
        }
        prop_assert!((ab.s(x as f64) - ba.s(x as f64)).abs() <= 1e-9 * ab.s(x as f64).max(1.0));
    }

    #[test]
    fn circle_decomposition_reproduces_s_chi(
        q in 1u64..9,
        x in 50u64..400,
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let s = sieve();
        let group = build_group(q).unwrap();
        let grid = build_exact_grid(x, q, s).unwrap();
        let chi1 = &group.characters()[i.index(group.len())];
        let chi2 = &group.characters()[j.index(group.len())];
        let diff = decompose_check(chi1, chi2, &grid, s).unwrap();
        prop_assert!(diff < 1e-6 * (x * x) as f64);
    }

    #[test]
    fn fit_recovers_exact_power_law(
        e in 0.3f64..2.5,
        c in 0.01f64..100.0,
        lo in 1.0f64..3.0,
        decades in 2.0f64..4.0,
    ) {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|k| {
                let x = 10f64.powf(lo + decades * k as f64 / 19.0);
                (x, c * x.powf(e))
            })
            .collect();
        let fit = fit_exponent(&pts).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-9);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-7);
    }
}

#[test]
fn singular_series_partitions_unity() {
    for q in 1..=500u64 {
        let total: Ratio<u64> = (0..q as i64).map(|c| singular_series(q, c)).sum();
        assert_eq!(total, Ratio::from_integer(1), "q = {q}");
    }
}

#[test]
fn zero_sets_close_under_conjugation() {
    for q in 1..=8u64 {
        let catalog = ZeroCatalog::compute(q, 40.0).unwrap();
        assert!(catalog.certified());
        for (chi, set) in catalog.iter() {
            assert_eq!(set.observed_b(), 0.5);
            let conj = catalog.set_for(&chi.conj()).unwrap();
            let mirrored = set.conjugated(conj.label.clone());
            assert_eq!(conj.len(), mirrored.len(), "{}", chi.label());
            for (u, v) in conj.entries.iter().zip(&mirrored.entries) {
                assert!((u.gamma - v.gamma).abs() < 1e-8, "{}: {} vs {}", chi.label(), u.gamma, v.gamma);
            }
        }
    }
}
