use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retro_core::base::MinPlusSum;
use retro_core::full::{CheckpointFull, WbtFull};
use retro_core::workload::{Family, MinPlusFamily, ThreeSumFamily};
use retro_core::{BlockPolicy, FullRetro, TimeKey};

/// Random inserts and deletes, biased by `insert_p`, with a check after
/// every operation.
fn fuzz<B, F>(
    family: &F,
    retro: &mut dyn FullRetro<B>,
    ops: usize,
    insert_p: f64,
    rng: &mut ChaCha8Rng,
    mut check: impl FnMut(&dyn FullRetro<B>, usize),
) where
    B: retro_core::BaseStructure,
    F: Family<Base = B>,
{
    let mut times = Vec::new();
    let horizon = 16 * ops as i64;
    for i in 0..ops {
        if times.is_empty() || rng.gen_bool(insert_p) {
            let t = loop {
                let t = TimeKey(rng.gen_range(0..horizon));
                if !retro.timeline().contains(t) {
                    break t;
                }
            };
            retro.fr_insert(t, family.random_op(8, rng)).unwrap();
            times.push(t);
        } else {
            let t = times.swap_remove(rng.gen_range(0..times.len()));
            retro.fr_delete(t).unwrap();
        }
        check(retro, i);
    }
}

#[test]
fn wbt_stays_balanced_over_ten_thousand_ops() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut w = WbtFull::new(&MinPlusFamily.proto(), 2.0 / 3.0);
    fuzz(&MinPlusFamily, &mut w, 10_000, 0.7, &mut rng, |r, i| {
        if let Err(e) = r.check_invariants() {
            panic!("after op {i}: {e}");
        }
    });
    // Depth stays logarithmic: log_{3/2}(m) + slack.
    let m = w.len() as f64;
    assert!((w.depth() as f64) <= m.log(1.5) + 2.0, "depth {} for m {m}", w.depth());
}

#[test]
fn wbt_survives_growth_then_shrink() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut w = WbtFull::new(&ThreeSumFamily.proto(), 0.6);
    fuzz(&ThreeSumFamily, &mut w, 3000, 0.9, &mut rng, |r, i| {
        r.check_invariants().unwrap_or_else(|e| panic!("grow {i}: {e}"));
    });
    fuzz(&ThreeSumFamily, &mut w, 3000, 0.1, &mut rng, |r, i| {
        r.check_invariants().unwrap_or_else(|e| panic!("shrink {i}: {e}"));
    });
}

fn append_changes_per_op(m: i64) -> f64 {
    let mut w = WbtFull::new(&MinPlusSum::new(), 2.0 / 3.0);
    for i in 0..m {
        w.fr_insert(TimeKey(i), retro_core::RetroOp::set(1 + (i % 2) as usize, 0, Some(i)))
            .unwrap();
    }
    w.check_invariants().unwrap();
    w.set_changes() as f64 / m as f64
}

#[test]
fn wbt_append_cost_grows_polylogarithmically() {
    // Scapegoat rebuilds give O(log^2 m) set changes per update; sequential
    // appends are the worst case.
    let small = append_changes_per_op(1024);
    let large = append_changes_per_op(4096);
    assert!(large <= 1.5 * 12.0 * 12.0, "{large} set changes per op at m = 4096");
    // log^2 growth predicts (12/10)^2 = 1.44 for a quadrupling; linear
    // growth would give 4.
    assert!(large / small < 2.0, "{small} -> {large}");
}

#[test]
fn checkpoint_segments_never_exceed_two_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut cp = CheckpointFull::new(&MinPlusFamily.proto(), BlockPolicy::Sqrt);
    let mut worst = 0.0f64;
    fuzz(&MinPlusFamily, &mut cp, 6000, 0.7, &mut rng, |r, i| {
        r.check_invariants().unwrap_or_else(|e| panic!("after op {i}: {e}"));
    });
    for s in cp.segment_sizes() {
        worst = worst.max(s as f64 / cp.block() as f64);
    }
    assert!(worst <= 2.0);
    cp.check_contents().unwrap();

    // Fixed blocks under heavy deletion as well.
    let mut cp = CheckpointFull::new(&MinPlusFamily.proto(), BlockPolicy::Fixed(5));
    fuzz(&MinPlusFamily, &mut cp, 2000, 0.5, &mut rng, |r, i| {
        r.check_invariants().unwrap_or_else(|e| panic!("fixed, op {i}: {e}"));
    });
}

#[test]
fn queries_leave_every_internal_state_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut w = WbtFull::new(&ThreeSumFamily.proto(), 2.0 / 3.0);
    let mut cp = CheckpointFull::new(&ThreeSumFamily.proto(), BlockPolicy::Sqrt);
    for retro in [&mut w as &mut dyn FullRetro<_>, &mut cp] {
        fuzz(&ThreeSumFamily, retro, 800, 0.7, &mut rng, |_, _| {});
        let before = retro.internal_states();
        let horizon = 16 * 800;
        for _ in 0..300 {
            retro.fr_query(TimeKey(rng.gen_range(-2..horizon + 2)));
        }
        retro.fr_query(TimeKey::MAX);
        retro.fr_query(TimeKey::MIN);
        assert!(retro.internal_states() == before, "{:?}", retro.strategy());
    }
}
