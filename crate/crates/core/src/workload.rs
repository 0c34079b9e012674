//! Random workloads over the three instance families and the
//! oracle-equivalence harness shared by tests and the command line.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::base::circuit::{Bits, Circuit, Gate};
use crate::base::{BaseStructure, CircuitPair, CircuitPairEntry, MinPlusSum, ThreeSum};
use crate::full::{FullRetro, ReplayOracle, Strategy, StrategyConfig};
use crate::meter::Meter;
use crate::timeline::{RetroOp, TimeKey};

/// An instance family: a base structure plus a random operation generator.
pub trait Family {
    type Base: BaseStructure + 'static;

    fn name(&self) -> &'static str;

    /// Empty structure with its own fresh meter.
    fn proto(&self) -> Self::Base;

    /// Random set-element over a layout of `slots` total slots.
    fn random_op(&self, slots: usize, rng: &mut ChaCha8Rng) -> RetroOp<<Self::Base as BaseStructure>::Entry>;
}

fn maybe<T>(rng: &mut ChaCha8Rng, value: T) -> Option<T> {
    (!rng.gen_bool(0.15)).then_some(value)
}

pub struct MinPlusFamily;

impl Family for MinPlusFamily {
    type Base = MinPlusSum;

    fn name(&self) -> &'static str {
        "minplus"
    }

    fn proto(&self) -> MinPlusSum {
        MinPlusSum::with_meter(Meter::new())
    }

    fn random_op(&self, slots: usize, rng: &mut ChaCha8Rng) -> RetroOp<i64> {
        let per_list = (slots / 2).max(1);
        let value = rng.gen_range(0..=100);
        RetroOp::set(rng.gen_range(1..=2), rng.gen_range(0..per_list), maybe(rng, value))
    }
}

/// Half the slots go to `L1`, a quarter each to `L2` and `L3`, so the size
/// gate is met often enough to exercise both outcomes.
pub struct ThreeSumFamily;

impl Family for ThreeSumFamily {
    type Base = ThreeSum;

    fn name(&self) -> &'static str {
        "3sum"
    }

    fn proto(&self) -> ThreeSum {
        ThreeSum::with_meter(Meter::new())
    }

    fn random_op(&self, slots: usize, rng: &mut ChaCha8Rng) -> RetroOp<i64> {
        let l1 = (slots / 2).max(1);
        let tail = (slots / 4).max(1);
        let (list, width) = match rng.gen_range(0..4) {
            0 | 1 => (1, l1),
            2 => (2, tail),
            _ => (3, tail),
        };
        let value = rng.gen_range(-10..=10);
        RetroOp::set(list, rng.gen_range(0..width), maybe(rng, value))
    }
}

/// Entries drawn from a small pool of two-input circuits, mostly with one
/// bit each so that good pairs are common; occasional other lengths test
/// the arity clause.
pub struct CircuitPairFamily {
    pool: Vec<Arc<Circuit>>,
}

impl Default for CircuitPairFamily {
    fn default() -> Self {
        let and = Circuit::new(2, vec![Gate::Input(0), Gate::Input(1), Gate::And(0, 1)]);
        let or = Circuit::new(2, vec![Gate::Input(0), Gate::Input(1), Gate::Or(0, 1)]);
        let implies_not = Circuit::new(
            2,
            vec![Gate::Input(0), Gate::Input(1), Gate::Not(1), Gate::And(0, 2)],
        );
        CircuitPairFamily {
            pool: [and, or, implies_not].into_iter().map(Arc::new).collect(),
        }
    }
}

impl Family for CircuitPairFamily {
    type Base = CircuitPair;

    fn name(&self) -> &'static str {
        "csat"
    }

    fn proto(&self) -> CircuitPair {
        CircuitPair::with_meter(crate::base::DEFAULT_MAX_GATES, Meter::new())
    }

    fn random_op(&self, slots: usize, rng: &mut ChaCha8Rng) -> RetroOp<CircuitPairEntry> {
        let per_list = (slots / 2).max(1);
        let circuit = self.pool[rng.gen_range(0..self.pool.len())].clone();
        let len = if rng.gen_bool(0.9) { 1 } else { rng.gen_range(0..=2) };
        let bits = Bits((0..len).map(|_| rng.gen()).collect());
        let entry = CircuitPairEntry::new(circuit, bits);
        RetroOp::set(rng.gen_range(1..=2), rng.gen_range(0..per_list), maybe(rng, entry))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EquivalenceParams {
    /// Retroactive edits (inserts and deletes).
    pub edits: usize,
    /// Random-time queries, interleaved evenly with the edits.
    pub queries: usize,
    pub slots: usize,
    /// Check structural invariants after every edit.
    pub check_invariants: bool,
    /// Compare internal states before and after every query.
    pub check_purity: bool,
}

impl Default for EquivalenceParams {
    fn default() -> Self {
        EquivalenceParams {
            edits: 1000,
            queries: 200,
            slots: 16,
            check_invariants: true,
            check_purity: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EquivalenceOutcome {
    pub edits: usize,
    pub queries: usize,
    pub mismatches: usize,
    /// First few mismatches as `(time, expected, got)` debug strings.
    pub examples: Vec<String>,
    pub invariant_failures: Vec<String>,
    pub impure_queries: usize,
    /// Base `apply_set` calls exceeded partially retroactive updates.
    pub frugality_violated: bool,
}

impl EquivalenceOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
            && self.invariant_failures.is_empty()
            && self.impure_queries == 0
            && !self.frugality_violated
    }
}

/// Runs random retroactive edits against `config`'s strategy and a replay
/// oracle, comparing every query answer exactly.
pub fn run_equivalence<F: Family>(
    family: &F,
    config: &StrategyConfig,
    params: &EquivalenceParams,
    rng: &mut ChaCha8Rng,
) -> EquivalenceOutcome {
    let proto = family.proto();
    let meter = proto.meter().clone();
    let mut subject = config.build(&proto);
    let mut oracle = ReplayOracle::new(&family.proto());
    let mut times: Vec<TimeKey> = Vec::new();
    let horizon = 8 * (params.edits as i64 + 8);
    let mut out = EquivalenceOutcome::default();

    let query = |subject: &mut Box<dyn FullRetro<F::Base>>, oracle: &ReplayOracle<F::Base>, out: &mut EquivalenceOutcome, rng: &mut ChaCha8Rng| {
        let t = TimeKey(rng.gen_range(-1..=horizon + 1));
        let before = params.check_purity.then(|| subject.internal_states());
        let got = subject.fr_query(t);
        let expected = oracle.oracle_query(t);
        if let Some(before) = before {
            if subject.internal_states() != before {
                out.impure_queries += 1;
            }
        }
        out.queries += 1;
        if got != expected {
            out.mismatches += 1;
            if out.examples.len() < 5 {
                out.examples.push(format!("t={t}: expected {expected:?}, got {got:?}"));
            }
        }
    };

    for i in 0..params.edits {
        let insert = times.is_empty() || rng.gen_bool(0.65);
        if insert {
            let t = loop {
                let t = TimeKey(rng.gen_range(0..horizon));
                if !oracle.timeline().contains(t) {
                    break t;
                }
            };
            let op = family.random_op(params.slots, rng);
            subject.fr_insert(t, op.clone()).expect("fresh time");
            oracle.fr_insert(t, op).expect("fresh time");
            times.push(t);
        } else {
            let t = times.swap_remove(rng.gen_range(0..times.len()));
            subject.fr_delete(t).expect("time present");
            oracle.fr_delete(t).expect("time present");
        }
        out.edits += 1;
        if params.check_invariants {
            if let Err(e) = subject.check_invariants() {
                out.invariant_failures.push(format!("after edit {i}: {e}"));
            }
        }
        while out.queries * params.edits < (i + 1) * params.queries {
            query(&mut subject, &oracle, &mut out, rng);
        }
    }
    while out.queries < params.queries {
        query(&mut subject, &oracle, &mut out, rng);
    }
    // Every live set must come from a partially retroactive update; the
    // oracle replays directly, so the bound does not apply to it.
    let m = meter.snapshot();
    out.frugality_violated = config.strategy != Strategy::Oracle && m.base_applies > m.pr_updates;
    out
}

/// Brute-force recounts over the public list contents, for checking the
/// incrementally maintained aggregates.
pub mod brute {
    use crate::base::{BaseStructure, CircuitPair, MinPlusSum, ThreeSum};
    use crate::timeline::ListId;

    fn list<B: BaseStructure>(s: &B, list: ListId) -> Vec<(usize, B::Entry)> {
        let mut v: Vec<(usize, B::Entry)> = s
            .entries()
            .into_iter()
            .filter(|(l, _, _)| *l == list)
            .map(|(_, i, e)| (i, e))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    pub fn min_sum(s: &MinPlusSum) -> Option<i64> {
        list(s, 1)
            .into_iter()
            .filter_map(|(i, a)| s.get(2, i).map(|b| a + b))
            .min()
    }

    /// First `floor(sqrt(|L1|))` set positions of `L2` or `L3`.
    pub fn view(s: &ThreeSum, which: ListId) -> Vec<(usize, i64)> {
        let limit = list(s, 1).len().isqrt();
        list(s, which).into_iter().take(limit).collect()
    }

    pub fn n_triple(s: &ThreeSum) -> u64 {
        let l1 = list(s, 1);
        let (v2, v3) = (view(s, 2), view(s, 3));
        let mut count = 0;
        for (_, a) in &l1 {
            for (_, b) in &v2 {
                count += v3.iter().filter(|(_, c)| a + b + c == 0).count() as u64;
            }
        }
        count
    }

    pub fn three_sum_eval(s: &ThreeSum) -> bool {
        let n1 = list(s, 1).len();
        let n2 = list(s, 2).len();
        let n3 = list(s, 3).len();
        n2 * n2 <= n1 && n3 * n3 <= n1 && n_triple(s) > 0
    }

    pub fn n_sat(s: &CircuitPair) -> u64 {
        let (l1, l2) = (list(s, 1), list(s, 2));
        let mut count = 0;
        for (_, a) in &l1 {
            count += l2.iter().filter(|(_, b)| a.is_good_pair(b, s.max_gates())).count() as u64;
        }
        count
    }
}

/// Applies `ops` random set-elements to a fresh structure of each family
/// and recounts every aggregate from scratch after each one. Returns a
/// description of every disagreement.
pub fn run_counter_invariants(ops: usize, slots: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    let mut fail = |family: &str, i: usize, what: String| {
        if failures.len() < 20 {
            failures.push(format!("{family} after op {i}: {what}"));
        }
    };

    let mut s = MinPlusFamily.proto();
    for i in 0..ops {
        let op = MinPlusFamily.random_op(slots, rng);
        s.apply_set(op.list, op.index, op.value);
        let (got, want) = (s.eval(), brute::min_sum(&s));
        if got != want {
            fail("minplus", i, format!("eval {got:?}, brute {want:?}"));
        }
    }

    let mut s = ThreeSumFamily.proto();
    for i in 0..ops {
        let op = ThreeSumFamily.random_op(slots, rng);
        s.apply_set(op.list, op.index, op.value);
        let (got, want) = (s.n_triple(), brute::n_triple(&s));
        if got != want {
            fail("3sum", i, format!("n_triple {got}, brute {want}"));
        }
        for which in [2, 3] {
            if s.view(which) != brute::view(&s, which) {
                fail("3sum", i, format!("view of L{which} differs"));
            }
        }
        if s.eval() != brute::three_sum_eval(&s) {
            fail("3sum", i, "eval differs".into());
        }
    }

    let family = CircuitPairFamily::default();
    let mut s = family.proto();
    for i in 0..ops {
        let op = family.random_op(slots, rng);
        s.apply_set(op.list, op.index, op.value);
        let (got, want) = (s.n_sat(), brute::n_sat(&s));
        if got != want {
            fail("csat", i, format!("n_sat {got}, brute {want}"));
        }
        if s.eval() != (want > 0) {
            fail("csat", i, "eval differs".into());
        }
    }
    failures
}

#[derive(Clone, Debug, Default)]
pub struct FrugalityOutcome {
    pub updates: u64,
    /// Updates that made more than one live `apply_set` call.
    pub violations: u64,
    pub max_applies_per_update: u64,
    /// Updates after which the present answer differed from a replay.
    pub present_mismatches: u64,
}

/// Random `pr_insert`/`pr_delete` on a partially retroactive structure,
/// counting the live `apply_set` calls each one makes.
pub fn run_partial_frugality<F: Family>(family: &F, edits: usize, slots: usize, rng: &mut ChaCha8Rng) -> FrugalityOutcome {
    use crate::partial::{replay, PartialRetro};

    let proto = family.proto();
    let mut pr = PartialRetro::new(proto.fresh());
    let mut times: Vec<TimeKey> = Vec::new();
    let horizon = 8 * (edits as i64 + 8);
    let mut out = FrugalityOutcome::default();
    for _ in 0..edits {
        let before = pr.live().counters().applied_sets();
        if times.is_empty() || rng.gen_bool(0.6) {
            let t = loop {
                let t = TimeKey(rng.gen_range(0..horizon));
                if !pr.timeline().contains(t) {
                    break t;
                }
            };
            pr.pr_insert(t, family.random_op(slots, rng)).expect("fresh time");
            times.push(t);
        } else {
            let t = times.swap_remove(rng.gen_range(0..times.len()));
            pr.pr_delete(t).expect("time present");
        }
        let applies = pr.live().counters().applied_sets() - before;
        out.updates += 1;
        out.max_applies_per_update = out.max_applies_per_update.max(applies);
        if applies > 1 {
            out.violations += 1;
        }
        if pr.pr_query_present() != replay(&proto, pr.timeline().iter().map(|(_, op)| op)).eval() {
            out.present_mismatches += 1;
        }
    }
    out
}
