use std::time::Instant;

use dphelix::connector::{connect, Limits};
use dphelix::corpus;
use dphelix::helix::{random_trace, replay};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scrambled_pairs(name: &str, pairs: usize, seed: u64) {
    let base = corpus::get::<i64>(name).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let (_, a) = random_trace(&base, 6, 1, &mut rng);
        let (_, b) = random_trace(&base, 6, 1, &mut rng);
        let start = Instant::now();
        let r = connect(&a, &b, &Limits::default())
            .unwrap_or_else(|e| panic!("{name} pair {k}: {e}\n a = {a}\n b = {b}"));
        assert_eq!(replay(&a, &r.trace).unwrap(), b);
        eprintln!("{name} pair {k}: {} steps in {:?}", r.trace.len(), start.elapsed());
    }
}

#[test]
fn p2_pairs() {
    scrambled_pairs("p2-beilinson", 6, 1);
}

#[test]
fn p1xp1_pairs() {
    scrambled_pairs("p1xp1-bs", 6, 2);
}

#[test]
fn dp1_pairs() {
    scrambled_pairs("dp1-lines", 6, 3);
}

#[test]
fn dp2_pairs() {
    scrambled_pairs("dp2-lines", 6, 4);
}

#[test]
fn dp3_pairs() {
    scrambled_pairs("dp3-lines", 6, 5);
}

mod properties {
    use super::*;
    use dphelix::connector::lattice_invariants;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn connect_is_sound_and_deterministic(k in 0usize..6, seed in any::<u64>()) {
            let names = corpus::names();
            let base = corpus::get::<i64>(names[k % names.len()]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, a) = random_trace(&base, 6, 2, &mut rng);
            let (_, b) = random_trace(&base, 6, 2, &mut rng);
            let first = connect(&a, &b, &Limits::default()).unwrap();
            prop_assert_eq!(replay(&a, &first.trace).unwrap(), b.clone());
            prop_assert_eq!(connect(&a, &b, &Limits::default()).unwrap(), first);
            prop_assert_eq!(lattice_invariants(&a).unwrap(), lattice_invariants(&b).unwrap());
        }
    }
}
