use std::collections::{BTreeMap, HashMap};

use super::{BaseStructure, Counters};
use crate::meter::Meter;
use crate::timeline::ListId;

/// L2 or L3 split into its truncated prefix view and the remainder.
///
/// `view` holds the first `min(|L|, floor(sqrt(n1)))` set slots in index
/// order; every index in `view` is smaller than every index in `rest`.
#[derive(Clone, Debug, Default)]
struct Truncated {
    view: BTreeMap<usize, i64>,
    rest: BTreeMap<usize, i64>,
}

impl Truncated {
    fn len(&self) -> usize {
        self.view.len() + self.rest.len()
    }

    fn get(&self, index: usize) -> Option<&i64> {
        self.view.get(&index).or_else(|| self.rest.get(&index))
    }
}

/// Zero-sum triple detector over three lists, gated on
/// `|L2|^2 <= |L1|` and `|L3|^2 <= |L1|`.
///
/// Only the truncated views of L2 and L3 take part in triple counting. When
/// the size gate holds the views are the whole lists, and when it fails the
/// answer is 0 regardless, so counting over the views is exact where it
/// matters while keeping each update at `O(sqrt(n1))` pair-sum changes.
#[derive(Clone, Debug, Default)]
pub struct ThreeSum {
    l1: HashMap<usize, i64>,
    /// Value multiset of L1.
    l1_values: HashMap<i64, u64>,
    /// `[L2, L3]`.
    tails: [Truncated; 2],
    /// Multiset of `b + c` over the two views.
    pair_sums: HashMap<i64, u64>,
    n_triple: u64,
    counters: Counters,
}

fn bump(map: &mut HashMap<i64, u64>, key: i64) {
    *map.entry(key).or_insert(0) += 1;
}

fn drop_one(map: &mut HashMap<i64, u64>, key: i64) {
    let c = map.get_mut(&key).expect("value present in multiset");
    *c -= 1;
    if *c == 0 {
        map.remove(&key);
    }
}

impl ThreeSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_meter(meter: Meter) -> Self {
        ThreeSum {
            counters: Counters::with_meter(meter),
            ..Self::default()
        }
    }

    /// Number of zero triples over `(L1, view(L2), view(L3))`.
    pub fn n_triple(&self) -> u64 {
        self.n_triple
    }

    /// Current view limit `floor(sqrt(|L1|))`.
    pub fn view_limit(&self) -> usize {
        self.l1.len().isqrt()
    }

    /// Truncated view of list 2 or 3 as `(index, value)` in index order.
    pub fn view(&self, list: ListId) -> Vec<(usize, i64)> {
        assert!(list == 2 || list == 3, "only L2 and L3 are truncated");
        self.tails[list - 2]
            .view
            .iter()
            .map(|(a, v)| (*a, *v))
            .collect()
    }

    fn list_len(&self, list: ListId) -> usize {
        match list {
            1 => self.l1.len(),
            _ => self.tails[list - 2].len(),
        }
    }

    /// Account for `value` entering the view of tail `which`.
    fn view_gain(&mut self, which: usize, value: i64) {
        let ThreeSum {
            l1_values,
            tails,
            pair_sums,
            n_triple,
            ..
        } = self;
        for other in tails[1 - which].view.values() {
            let s = value + other;
            bump(pair_sums, s);
            *n_triple += l1_values.get(&-s).copied().unwrap_or(0);
        }
    }

    fn view_loss(&mut self, which: usize, value: i64) {
        let ThreeSum {
            l1_values,
            tails,
            pair_sums,
            n_triple,
            ..
        } = self;
        for other in tails[1 - which].view.values() {
            let s = value + other;
            drop_one(pair_sums, s);
            *n_triple -= l1_values.get(&-s).copied().unwrap_or(0);
        }
    }

    /// Move boundary elements until the view holds exactly the first
    /// `view_limit()` set slots.
    fn normalize(&mut self, which: usize) {
        let limit = self.view_limit();
        while self.tails[which].view.len() > limit {
            let (a, v) = self.tails[which].view.pop_last().expect("non-empty view");
            self.view_loss(which, v);
            self.tails[which].rest.insert(a, v);
        }
        while self.tails[which].view.len() < limit {
            let Some((a, v)) = self.tails[which].rest.pop_first() else {
                break;
            };
            self.view_gain(which, v);
            self.tails[which].view.insert(a, v);
        }
    }

    fn store_l1(&mut self, index: usize, value: Option<i64>) {
        if let Some(old) = self.l1.remove(&index) {
            self.n_triple -= self.pair_sums.get(&-old).copied().unwrap_or(0);
            drop_one(&mut self.l1_values, old);
        }
        if let Some(v) = value {
            self.l1.insert(index, v);
            self.n_triple += self.pair_sums.get(&-v).copied().unwrap_or(0);
            bump(&mut self.l1_values, v);
        }
        self.normalize(0);
        self.normalize(1);
    }

    fn store_tail(&mut self, which: usize, index: usize, value: Option<i64>) {
        let tail = &mut self.tails[which];
        if let Some(old) = tail.view.remove(&index) {
            self.view_loss(which, old);
        } else {
            tail.rest.remove(&index);
        }
        if let Some(v) = value {
            let limit = self.view_limit();
            let tail = &mut self.tails[which];
            let into_view = tail.view.len() < limit
                || tail.view.last_key_value().is_some_and(|(last, _)| index < *last);
            if into_view {
                self.view_gain(which, v);
                self.tails[which].view.insert(index, v);
            } else {
                tail.rest.insert(index, v);
            }
        }
        self.normalize(which);
    }
}

impl BaseStructure for ThreeSum {
    type Entry = i64;
    type Value = bool;

    const LISTS: usize = 3;

    fn fresh(&self) -> Self {
        Self::with_meter(self.counters.meter().clone())
    }

    fn store(&mut self, list: ListId, index: usize, value: Option<i64>) {
        match list {
            1 => self.store_l1(index, value),
            2 | 3 => self.store_tail(list - 2, index, value),
            _ => unreachable!("list id checked by apply_set"),
        }
    }

    fn compute(&self) -> bool {
        let n1 = self.list_len(1);
        let n2 = self.list_len(2);
        let n3 = self.list_len(3);
        n2 * n2 <= n1 && n3 * n3 <= n1 && self.n_triple > 0
    }

    fn get(&self, list: ListId, index: usize) -> Option<&i64> {
        match list {
            1 => self.l1.get(&index),
            2 | 3 => self.tails[list - 2].get(index),
            _ => None,
        }
    }

    fn size(&self) -> usize {
        self.l1.len() + self.tails[0].len() + self.tails[1].len()
    }

    fn entries(&self) -> Vec<(ListId, usize, i64)> {
        let mut out: Vec<_> = self.l1.iter().map(|(a, v)| (1, *a, *v)).collect();
        for (i, t) in self.tails.iter().enumerate() {
            out.extend(t.view.iter().chain(t.rest.iter()).map(|(a, v)| (i + 2, *a, *v)));
        }
        out
    }

    fn counters(&self) -> &Counters {
        &self.counters
    }

    fn counters_mut(&mut self) -> &mut Counters {
        &mut self.counters
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    /// Mirror of the three lists with the definition recomputed from scratch.
    #[derive(Default)]
    struct Brute {
        lists: [BTreeMap<usize, i64>; 3],
    }

    impl Brute {
        fn set(&mut self, list: ListId, index: usize, value: Option<i64>) {
            match value {
                Some(v) => self.lists[list - 1].insert(index, v),
                None => self.lists[list - 1].remove(&index),
            };
        }

        fn view(&self, list: ListId) -> Vec<(usize, i64)> {
            let r = self.lists[0].len().isqrt();
            self.lists[list - 1].iter().take(r).map(|(a, v)| (*a, *v)).collect()
        }

        fn n_triple(&self) -> u64 {
            let mut count = 0;
            for a in self.lists[0].values() {
                for (_, b) in self.view(2) {
                    for (_, c) in self.view(3) {
                        if a + b + c == 0 {
                            count += 1;
                        }
                    }
                }
            }
            count
        }

        fn eval(&self) -> bool {
            let n: Vec<usize> = self.lists.iter().map(BTreeMap::len).collect();
            // Gate plus existence over the full lists.
            let exists = self.lists[0].values().any(|a| {
                self.lists[1]
                    .values()
                    .any(|b| self.lists[2].values().any(|c| a + b + c == 0))
            });
            n[1] * n[1] <= n[0] && n[2] * n[2] <= n[0] && exists
        }
    }

    #[test]
    fn singleton_triple() {
        let mut b = ThreeSum::new();
        b.apply_set(1, 0, Some(-3));
        b.apply_set(2, 0, Some(1));
        b.apply_set(3, 0, Some(2));
        assert_eq!(b.n_triple(), 1);
        assert!(b.eval());
    }

    #[test]
    fn size_gate() {
        let mut b = ThreeSum::new();
        for (i, v) in [-3, 10, 11].into_iter().enumerate() {
            b.apply_set(1, i, Some(v));
        }
        b.apply_set(2, 0, Some(1));
        b.apply_set(2, 1, Some(50));
        b.apply_set(3, 0, Some(2));
        assert_eq!(b.n_triple(), 1);
        // 2^2 > 3
        assert!(!b.eval());
        b.apply_set(2, 1, None);
        assert!(b.eval());
    }

    #[test]
    fn view_tracks_first_elements() {
        let mut b = ThreeSum::new();
        for i in 0..4 {
            b.apply_set(1, i, Some(100 + i as i64));
        }
        for i in [5, 3, 9] {
            b.apply_set(2, i, Some(i as i64));
        }
        assert_eq!(b.view(2), vec![(3, 3), (5, 5)]);
        b.apply_set(2, 1, Some(1));
        assert_eq!(b.view(2), vec![(1, 1), (3, 3)]);
        b.apply_set(1, 0, None);
        assert_eq!(b.view(2), vec![(1, 1)]);
        b.apply_set(2, 1, None);
        assert_eq!(b.view(2), vec![(3, 3)]);
    }

    #[test]
    fn duplicate_values() {
        let mut b = ThreeSum::new();
        for i in 0..4 {
            b.apply_set(1, i, Some(-2));
        }
        b.apply_set(2, 0, Some(1));
        b.apply_set(2, 1, Some(1));
        b.apply_set(3, 0, Some(1));
        assert_eq!(b.n_triple(), 8);
    }

    #[test]
    fn random_against_brute_force() {
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ThreeSum::new();
            let mut brute = Brute::default();
            for _ in 0..1000 {
                let list = match rng.gen_range(0..10) {
                    0..=5 => 1,
                    6 | 7 => 2,
                    _ => 3,
                };
                let index = rng.gen_range(0..if list == 1 { 20 } else { 8 });
                let value = rng.gen_bool(0.8).then(|| rng.gen_range(-8..=8));
                b.apply_set(list, index, value);
                brute.set(list, index, value);
                assert_eq!(b.n_triple(), brute.n_triple());
                assert_eq!(b.view(2), brute.view(2));
                assert_eq!(b.view(3), brute.view(3));
                assert_eq!(b.eval(), brute.eval());
            }
        }
    }
}
