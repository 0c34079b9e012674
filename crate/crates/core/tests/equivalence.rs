use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retro_core::workload::{
    run_equivalence, CircuitPairFamily, EquivalenceParams, Family, MinPlusFamily, ThreeSumFamily,
};
use retro_core::{BlockPolicy, Strategy, StrategyConfig};

fn suite<F: Family>(family: &F, config: &StrategyConfig, params: &EquivalenceParams) {
    for seed in [1u64, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = run_equivalence(family, config, params, &mut rng);
        assert!(
            o.passed(),
            "{} {:?} seed {seed}: {o:?}",
            family.name(),
            config.strategy
        );
        assert_eq!((o.edits, o.queries), (params.edits, params.queries));
    }
}

fn all_strategies<F: Family>(family: &F) {
    let params = EquivalenceParams::default();
    for s in [Strategy::Checkpoint, Strategy::Wbt, Strategy::Auto] {
        suite(family, &StrategyConfig::new(s), &params);
    }
}

#[test]
fn minplus_matches_oracle() {
    all_strategies(&MinPlusFamily);
}

#[test]
fn threesum_matches_oracle() {
    all_strategies(&ThreeSumFamily);
}

#[test]
fn circuit_pair_matches_oracle() {
    all_strategies(&CircuitPairFamily::default());
}

#[test]
fn queries_are_pure() {
    let params = EquivalenceParams {
        edits: 300,
        queries: 150,
        check_purity: true,
        ..EquivalenceParams::default()
    };
    for s in [Strategy::Checkpoint, Strategy::Wbt, Strategy::Auto] {
        suite(&ThreeSumFamily, &StrategyConfig::new(s), &params);
        suite(&CircuitPairFamily::default(), &StrategyConfig::new(s), &params);
    }
}

#[test]
fn other_parameters() {
    let params = EquivalenceParams {
        edits: 400,
        queries: 100,
        slots: 6,
        ..EquivalenceParams::default()
    };
    for block in [1, 3, 17] {
        let config = StrategyConfig {
            block: BlockPolicy::Fixed(block),
            ..StrategyConfig::new(Strategy::Checkpoint)
        };
        suite(&MinPlusFamily, &config, &params);
    }
    for alpha in [0.55, 0.75, 0.9] {
        let config = StrategyConfig {
            alpha,
            ..StrategyConfig::new(Strategy::Wbt)
        };
        suite(&ThreeSumFamily, &config, &params);
    }
    suite(&MinPlusFamily, &StrategyConfig::new(Strategy::Oracle), &params);
}

#[test]
fn wide_layout() {
    // Many slots, so states are large and most queries thread many entries.
    let params = EquivalenceParams {
        edits: 600,
        queries: 120,
        slots: 200,
        ..EquivalenceParams::default()
    };
    for s in [Strategy::Checkpoint, Strategy::Wbt] {
        suite(&MinPlusFamily, &StrategyConfig::new(s), &params);
    }
}
