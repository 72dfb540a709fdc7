use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbang::bang::{bang_degree, DegreeValue};
use qbang::funcmodel::Interval;
use qbang::harness::oracles::brute_force_minorant;
use qbang::harness::sampling::{random_polynomial, random_set};
use qbang::remez::{classical_remez_check, decide, omega, well_spaced_points, Verdict};
use qbang::sequences::{from_generator, log_convex_minorant_log, Generator};

fn finite(d: DegreeValue) -> u64 {
    match d {
        DegreeValue::Finite(n) => n,
        DegreeValue::Unbounded => u64::MAX,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn well_spaced_points_have_large_gaps(seed in any::<u64>(), n in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_set(&mut rng, Interval::UNIT, 4, 0.05);
        let pts = well_spaced_points(&e, n).unwrap();
        prop_assert_eq!(pts.len(), n + 1);
        let step = e.measure() / n as f64;
        for w in pts.windows(2) {
            prop_assert!(w[1] - w[0] >= step - 1e-12, "gap {} < {}", w[1] - w[0], step);
        }
        for &x in &pts {
            prop_assert!(e.intervals().iter().any(|c| c.lo <= x && x <= c.hi));
        }
    }

    #[test]
    fn omega_is_increasing(c in 0.2f64..5.0, a in 0.001f64..1.0, b in 0.001f64..1.0) {
        let gen = Generator::analytic(c).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (wl, wh) = (omega(&gen, lo).unwrap(), omega(&gen, hi).unwrap());
        prop_assert!(wl <= wh + 1e-12);
        prop_assert!(wl > 0.0 && wh <= 1.0);
    }

    #[test]
    fn bang_degree_grows_as_the_norm_shrinks(c in 0.5f64..1.5, a in -6.0f64..0.0, b in -6.0f64..0.0) {
        let seq = from_generator(&Generator::analytic(c).unwrap(), 3000).unwrap();
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let d_small = bang_degree(&seq, small.exp()).unwrap();
        let d_large = bang_degree(&seq, large.exp()).unwrap();
        prop_assert!(finite(d_small.value) >= finite(d_large.value));
    }

    #[test]
    fn classical_remez_never_fails(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polynomial(&mut rng, 10);
        let e = random_set(&mut rng, Interval::UNIT, 4, 0.05);
        let check = classical_remez_check(&p, Interval::UNIT, &e, 1e-3).unwrap();
        prop_assert_ne!(check.verdict, Verdict::Fail);
    }

    #[test]
    fn decide_is_consistent(a in -50.0f64..50.0, w1 in 0.0f64..1.0, b in -50.0f64..50.0, w2 in 0.0f64..1.0) {
        let (v, margin) = decide((a, a + w1), (b, b + w2));
        match v {
            Verdict::Pass => prop_assert!(margin >= 0.0),
            Verdict::Fail => prop_assert!(a > b + w2),
            Verdict::Inconclusive => prop_assert!(margin < 0.0 && a <= b + w2),
        }
    }

    #[test]
    fn minorant_matches_brute_force(logs in prop::collection::vec(-5.0f64..5.0, 1..14)) {
        let fast = log_convex_minorant_log(&logs).unwrap();
        let (hull, contact) = brute_force_minorant(&logs, 1e-12);
        for (x, y) in fast.minorant.log_values().iter().zip(&hull) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        prop_assert_eq!(fast.contact_set, contact);
    }
}
