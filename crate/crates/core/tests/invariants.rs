use proptest::prelude::*;
use std::f64::consts::SQRT_2;

use zetalab::arith::{coefficient, divisor_count, CoefficientFamily};
use zetalab::characters::build_characters;
use zetalab::correlation::{parenthesized_factor, select_prime_pair, separation, ShiftParams};
use zetalab::lemmas::lemma_3_14_brute;
use zetalab::quadrature::integrate_real;
use zetalab::summation::Neumaier;
use zetalab::zeros::{from_bytes, to_bytes, ZeroCatalog, ZeroEntry, ZeroSource};
use zetalab::zeta::{chi_factor, zeta_value};
use zetalab::Complex64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeta_conjugate_symmetry(sigma in -1.0f64..3.0, t in 1.0f64..300.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-3);
        let s = Complex64::new(sigma, t);
        let a = zeta_value(s).unwrap();
        let b = zeta_value(s.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn functional_equation_holds(sigma in -1.0f64..2.0, t in 5.0f64..500.0) {
        let s = Complex64::new(sigma, t);
        let z = zeta_value(s).unwrap();
        let rhs = chi_factor(s).unwrap().value * zeta_value(1.0 - s).unwrap();
        prop_assert!((z - rhs).norm() <= 1e-8 * (1.0 + z.norm()));
    }

    #[test]
    fn reflection_ratio_has_unit_modulus(a in 0.01f64..50.0) {
        let r = zeta_value(Complex64::new(1.0, a)).unwrap() / zeta_value(Complex64::new(1.0, -a)).unwrap();
        prop_assert!((r.norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn selected_pair_is_separated(y1 in -5.0f64..5.0, d in 0.1f64..5.0, neg in any::<bool>()) {
        let d = if neg { -d } else { d };
        prop_assume!(y1.abs() > 1e-6 && (y1 + d).abs() > 1e-6);
        let s = ShiftParams::new(y1, y1 + d, 1.0).unwrap();
        let p = select_prime_pair(1e4, &s).unwrap();
        prop_assert!(separation(p.x1, p.x2, d) > SQRT_2);
        prop_assert!(p.chosen_x == p.x1 || p.chosen_x == p.x2);
    }

    #[test]
    fn bracket_factor_matches_direct_form(t1 in 1e3f64..1e6, frac in 0.01f64..0.9, y1 in 0.5f64..5.0, d in 0.1f64..5.0) {
        let t2 = t1 * (1.0 + frac);
        let y2 = y1 + d;
        let direct = (t2 + y1) / (t2 - t1) * Complex64::from_polar(1.0, d * ((t2 + y1) / (t1 + y1)).ln()) - (t1 + y1) / (t2 - t1);
        let stable = parenthesized_factor(t1, t2, y1, y2);
        prop_assert!((stable - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn cache_bytes_round_trip(mut ords in proptest::collection::vec(10.0f64..1000.0, 0..50)) {
        ords.sort_by(f64::total_cmp);
        ords.dedup();
        let entries = ords.iter().map(|&o| ZeroEntry { ordinate: o, abs_err: 1e-8, source: ZeroSource::Computed, multiplicity: 1 }).collect();
        let cat = ZeroCatalog::new(entries, 10.0, 1000.0).unwrap();
        let back = from_bytes(&to_bytes(&cat)).unwrap();
        prop_assert!(cat.payload_eq(&back));
    }

    #[test]
    fn divisor_log_inequality(n in 2u64..20_000, i in 0usize..5, j in 0usize..5, k in 0usize..5) {
        let ph = zetalab::lemmas::PHASES;
        let lhs = lemma_3_14_brute(n, [ph[i], ph[j], ph[k]]).unwrap().norm();
        let bound = divisor_count(n).unwrap() as f64 * (n as f64).ln();
        prop_assert!(lhs <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn characters_are_multiplicative(xi in 0usize..8, a in 1i64..500, b in 1i64..500) {
        let x = [3u64, 5, 7, 11, 13, 31, 53, 101][xi];
        let t = build_characters(x).unwrap();
        for k in 0..t.count() {
            let lhs = t.value(k, a * b);
            let rhs = t.value(k, a) * t.value(k, b);
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn unit_family_coefficients(n in 1u64..5000) {
        prop_assert_eq!(coefficient(&CoefficientFamily::unit(), n).unwrap(), Complex64::new(1.0, 0.0));
        let d = coefficient(&CoefficientFamily::pair_unit(0.0), n).unwrap();
        prop_assert!((d.re - divisor_count(n).unwrap() as f64).abs() < 1e-9 && d.im.abs() < 1e-9);
    }

    #[test]
    fn quadrature_integrates_cubics(c0 in -5.0f64..5.0, c3 in -5.0f64..5.0, b in 0.1f64..10.0) {
        let r = integrate_real(|u| Ok(Complex64::new(c0 + c3 * u * u * u, 0.0)), 0.0, b, 1, 1e-12, 10_000).unwrap();
        let exact = c0 * b + c3 * b.powi(4) / 4.0;
        prop_assert!((r.value.re - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn compensated_sum_is_order_insensitive(mut v in proptest::collection::vec(-1e6f64..1e6, 1..200)) {
        let a: f64 = v.iter().copied().collect::<Neumaier>().value();
        v.reverse();
        let b: f64 = v.iter().copied().collect::<Neumaier>().value();
        let scale: f64 = v.iter().map(|x| x.abs()).sum();
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * scale);
    }
}
