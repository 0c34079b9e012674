use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retro_core::workload::{
    run_counter_invariants, run_partial_frugality, CircuitPairFamily, MinPlusFamily, ThreeSumFamily,
};

#[test]
fn aggregates_match_recounts_after_every_set() {
    for seed in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for slots in [8, 24] {
            let failures = run_counter_invariants(1000, slots, &mut rng);
            assert!(failures.is_empty(), "seed {seed}, slots {slots}: {failures:#?}");
        }
    }
}

#[test]
fn partial_updates_make_at_most_one_live_set() {
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let outcomes = [
            run_partial_frugality(&MinPlusFamily, 1000, 16, &mut rng),
            run_partial_frugality(&ThreeSumFamily, 1000, 16, &mut rng),
            run_partial_frugality(&CircuitPairFamily::default(), 1000, 16, &mut rng),
        ];
        for o in outcomes {
            assert_eq!(o.violations, 0, "{o:?}");
            assert_eq!(o.present_mismatches, 0, "{o:?}");
            assert!(o.max_applies_per_update <= 1);
        }
    }
}
