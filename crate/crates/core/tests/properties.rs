use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;

use goodlattice::characters::{build_pi, CharacterGroup};
use goodlattice::contfrac::{expand, quotient_stats};
use goodlattice::lattice::{
    count_box, discrepancy_exact, scaled_discrepancy, scaled_discrepancy_quadratic, BoxMode, LatticePointSet,
};
use goodlattice::modmath::{divisors, primes_up_to, PrimeContext, SubgroupCoset};
use goodlattice::oracle::{oracle_f_a, oracle_pi_membership};
use goodlattice::theorems::{count_b, f_a, s_a};

fn odd_prime(max: u64) -> impl Strategy<Value = u64> {
    let primes: Vec<u64> = primes_up_to(max).into_iter().filter(|&p| p > 2).collect();
    proptest::sample::select(primes)
}

fn prime_and_unit(max: u64) -> impl Strategy<Value = (u64, u64)> {
    odd_prime(max).prop_flat_map(|p| (Just(p), 1..p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_and_log_round_trip((p, a) in prime_and_unit(20_000)) {
        let ctx = PrimeContext::new(p).unwrap();
        let inv = ctx.mod_inverse(a as i128).unwrap();
        prop_assert_eq!((a as u128 * inv as u128) % p as u128, 1);
        let k = ctx.dlog(a as i128).unwrap();
        prop_assert_eq!(ctx.pow_g(k as u64), a);
        prop_assert_eq!(ctx.reduce(a as i128 - p as i128 * 7), a);
    }

    #[test]
    fn cosets_are_closed_translates((p, v) in prime_and_unit(3_000), pick in any::<prop::sample::Index>()) {
        let ctx = Arc::new(PrimeContext::new(p).unwrap());
        let ds = divisors(p - 1);
        let m = ds[pick.index(ds.len())];
        let u = SubgroupCoset::subgroup(Arc::clone(&ctx), m).unwrap();
        let r = u.coset(v as i128).unwrap();
        prop_assert_eq!(r.len() as u64, m);
        for &x in u.elements().iter().take(20) {
            prop_assert!(r.contains((x as u128 * v as u128 % p as u128) as u64));
        }
        for &x in r.elements().iter().take(20) {
            for &y in u.elements().iter().take(20) {
                prop_assert!(r.contains((x as u128 * y as u128 % p as u128) as u64));
            }
        }
    }

    #[test]
    fn expansion_reconstructs((p, a) in prime_and_unit(1_000_000)) {
        let cf = expand(a, p).unwrap();
        prop_assert_eq!(cf.value(), Ratio::new(a as u128, p as u128));
        prop_assert!(cf.is_canonical());
        let stats = quotient_stats(a, p);
        prop_assert_eq!(stats.sum, cf.sum_quotients());
        prop_assert_eq!(stats.max, cf.max_quotient());
        prop_assert_eq!(stats.len as usize, cf.len());
        // consecutive convergents have determinant ±1
        for n in 1..=cf.len() {
            let (p1, q1) = cf.convergent(n - 1).unwrap();
            let (p2, q2) = cf.convergent(n).unwrap();
            prop_assert_eq!((p2 as i128 * q1 as i128 - p1 as i128 * q2 as i128).abs(), 1);
        }
    }

    #[test]
    fn transpose_swaps_generator_and_inverse(
        (p, a) in prime_and_unit(400),
        i in 0u64..=400, j in 0u64..=400, closed in any::<bool>(),
    ) {
        let inv = PrimeContext::new(p).unwrap().mod_inverse(a as i128).unwrap();
        let s = LatticePointSet::new(p, a).unwrap();
        let t = LatticePointSet::new(p, inv).unwrap();
        let (g1, g2) = (Ratio::new((i % (p + 1)) as i64, p as i64), Ratio::new((j % (p + 1)) as i64, p as i64));
        let mode = if closed { BoxMode::Closed } else { BoxMode::Open };
        prop_assert_eq!(count_box(&s, g1, g2, mode).unwrap(), count_box(&t, g2, g1, mode).unwrap());
    }

    #[test]
    fn corners_on_a_finer_grid_never_exceed_the_supremum(
        (p, a) in prime_and_unit(60),
        scale in 2i64..=4,
        i in 0i64..1_000, j in 0i64..1_000,
    ) {
        let set = LatticePointSet::new(p, a).unwrap();
        let d = discrepancy_exact(&set).unwrap().value;
        let n = p as i64 * scale;
        let (g1, g2) = (Ratio::new(i % (n + 1), n), Ratio::new(j % (n + 1), n));
        for mode in [BoxMode::Closed, BoxMode::Open] {
            let count = Ratio::from_integer(count_box(&set, g1, g2, mode).unwrap() as i64);
            let dev = count - g1 * g2 * Ratio::from_integer(p as i64);
            prop_assert!(dev <= d && -dev <= d, "{} at ({}, {}) exceeds {}", dev, g1, g2, d);
        }
    }

    #[test]
    fn sweep_matches_quadratic_scan((p, a) in prime_and_unit(2_000)) {
        let set = LatticePointSet::new(p, a).unwrap();
        let fast = scaled_discrepancy(&set);
        prop_assert_eq!(fast.scaled, scaled_discrepancy_quadratic(&set).scaled);
        prop_assert!(fast.scaled >= p as i64);
        let inv = PrimeContext::new(p).unwrap().mod_inverse(a as i128).unwrap();
        prop_assert_eq!(fast.scaled, scaled_discrepancy(&LatticePointSet::new(p, inv).unwrap()).scaled);
    }

    #[test]
    fn characters_are_multiplicative_unit_valued((p, x) in prime_and_unit(5_000), y in 1u64..5_000, j in 0u64..5_000) {
        let y = y % (p - 1) + 1;
        let group = CharacterGroup::new(Arc::new(PrimeContext::new(p).unwrap()));
        let chi = group.character(j % (p - 1)).unwrap();
        let (cx, cy) = (chi.value(x as i128), chi.value(y as i128));
        prop_assert!((cx.norm() - 1.0).abs() < 1e-12);
        prop_assert!((chi.value(x as i128 * y as i128) - cx * cy).norm() < 1e-12);
        prop_assert_eq!(chi.value(p as i128 * 3).norm(), 0.0);
        if !chi.is_principal() {
            prop_assert!(chi.interval_sum(p - 1).norm() < 1e-8);
        }
    }

    #[test]
    fn rectangle_family_covers_region(p in odd_prime(700), c in 1.0f64..50.0) {
        let fam = build_pi(p, c).unwrap();
        prop_assert_eq!(fam.len() as u32, 2 * fam.j + 1);
        for (x, y) in oracle_pi_membership(p, c).unwrap() {
            prop_assert!(fam.contains(x, y), "({}, {}) uncovered", x, y);
        }
        for w in fam.rects.windows(2) {
            for (x, y) in [(w[0].columns.0, w[0].rows.0), (w[1].columns.0, w[1].rows.0)] {
                prop_assert!(!(w[0].contains(x, y) && w[1].contains(x, y)));
            }
        }
    }

    #[test]
    fn level_function_matches_scan((p, a) in prime_and_unit(500), x in 1u64..500) {
        let x = x % (p - 1) + 1;
        prop_assert_eq!(f_a(p, a, x).unwrap(), oracle_f_a(p, a, x).unwrap());
        prop_assert!(s_a(p, a).unwrap() >= f_a(p, a, 1).unwrap().max(1));
    }

    #[test]
    fn level_sets_shrink(p in odd_prime(200), c in 1u64..50) {
        let r = SubgroupCoset::full_group(Arc::new(PrimeContext::new(p).unwrap()));
        prop_assert!(count_b(&r, c + 1) <= count_b(&r, c));
    }
}
