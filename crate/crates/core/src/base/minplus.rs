use std::collections::{BTreeMap, HashMap};

use super::{BaseStructure, Counters};
use crate::meter::Meter;
use crate::timeline::ListId;

/// `min_a (L1[a] + L2[a])` over indices where both lists are set.
///
/// The common-index sums live in an ordered multiset, which plays the role
/// of a priority queue that also supports removal of arbitrary sums.
#[derive(Clone, Debug, Default)]
pub struct MinPlusSum {
    lists: [HashMap<usize, i64>; 2],
    sums: BTreeMap<i64, usize>,
    counters: Counters,
}

impl MinPlusSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_meter(meter: Meter) -> Self {
        MinPlusSum {
            counters: Counters::with_meter(meter),
            ..Self::default()
        }
    }

    /// Multiset of common-index sums as `(sum, multiplicity)`.
    pub fn sums(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.sums.iter().map(|(s, c)| (*s, *c))
    }

    fn pair_sum(&self, index: usize) -> Option<i64> {
        let a = self.lists[0].get(&index)?;
        let b = self.lists[1].get(&index)?;
        Some(a + b)
    }

    fn remove_sum(&mut self, s: i64) {
        let count = self.sums.get_mut(&s).expect("sum present in multiset");
        *count -= 1;
        if *count == 0 {
            self.sums.remove(&s);
        }
    }
}

impl BaseStructure for MinPlusSum {
    type Entry = i64;
    /// `None` when no index is set in both lists.
    type Value = Option<i64>;

    const LISTS: usize = 2;

    fn fresh(&self) -> Self {
        Self::with_meter(self.counters.meter().clone())
    }

    fn store(&mut self, list: ListId, index: usize, value: Option<i64>) {
        if let Some(old) = self.pair_sum(index) {
            self.remove_sum(old);
        }
        let l = &mut self.lists[list - 1];
        match value {
            Some(v) => l.insert(index, v),
            None => l.remove(&index),
        };
        if let Some(new) = self.pair_sum(index) {
            *self.sums.entry(new).or_insert(0) += 1;
        }
    }

    fn compute(&self) -> Option<i64> {
        self.sums.keys().next().copied()
    }

    fn get(&self, list: ListId, index: usize) -> Option<&i64> {
        self.lists.get(list.wrapping_sub(1))?.get(&index)
    }

    fn size(&self) -> usize {
        self.lists.iter().map(HashMap::len).sum()
    }

    fn entries(&self) -> Vec<(ListId, usize, i64)> {
        self.lists
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |(a, v)| (i + 1, *a, *v)))
            .collect()
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
    use crate::base::State;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_min(l1: &HashMap<usize, i64>, l2: &HashMap<usize, i64>) -> Option<i64> {
        l1.iter()
            .filter_map(|(a, x)| l2.get(a).map(|y| x + y))
            .min()
    }

    #[test]
    fn common_index_sum() {
        let mut b = MinPlusSum::new();
        b.apply_set(1, 3, Some(4));
        b.apply_set(2, 3, Some(6));
        assert_eq!(b.sums().collect::<Vec<_>>(), vec![(10, 1)]);
    }

    #[test]
    fn eval_takes_min() {
        let mut b = MinPlusSum::new();
        b.apply_set(1, 0, Some(0));
        b.apply_set(1, 1, Some(0));
        b.apply_set(2, 0, Some(3));
        b.apply_set(2, 1, Some(5));
        assert_eq!(b.eval(), Some(3));
        assert_eq!(b.counters().evals(), 1);
    }

    #[test]
    fn empty_is_none() {
        let b = MinPlusSum::new();
        assert_eq!(b.eval(), None);
        let mut b = MinPlusSum::new();
        b.apply_set(1, 0, Some(0));
        b.apply_set(2, 1, Some(0));
        assert_eq!(b.eval(), None);
    }

    #[test]
    fn get_and_clear() {
        let mut b = MinPlusSum::new();
        assert_eq!(b.get(1, 0), None);
        b.apply_set(1, 0, Some(5));
        assert_eq!(b.get(1, 0), Some(&5));
        b.apply_set(1, 0, None);
        assert_eq!(b.get(1, 0), None);
        assert_eq!(b.get(7, 0), None);
    }

    #[test]
    fn duplicates_are_counted() {
        let mut b = MinPlusSum::new();
        for a in 0..3 {
            b.apply_set(1, a, Some(1));
            b.apply_set(2, a, Some(1));
        }
        assert_eq!(b.sums().collect::<Vec<_>>(), vec![(2, 3)]);
        b.apply_set(2, 1, Some(9));
        assert_eq!(b.sums().collect::<Vec<_>>(), vec![(2, 2), (10, 1)]);
    }

    #[test]
    fn random_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut b = MinPlusSum::new();
        let mut l = [HashMap::new(), HashMap::new()];
        for _ in 0..1000 {
            let list = rng.gen_range(1..=2);
            let index = rng.gen_range(0..12);
            let value = rng.gen_bool(0.8).then(|| rng.gen_range(0..50));
            b.apply_set(list, index, value);
            match value {
                Some(v) => l[list - 1].insert(index, v),
                None => l[list - 1].remove(&index),
            };
            assert_eq!(b.eval(), brute_min(&l[0], &l[1]));
        }
    }

    #[test]
    fn state_round_trip() {
        let mut b = MinPlusSum::new();
        b.apply_set(1, 0, Some(5));
        b.apply_set(2, 7, Some(1));
        let s = b.extract_state();
        assert_eq!(s, State::from_entries(vec![(1, 0, 5), (2, 7, 1)]).unwrap());
        let mut c = b.fresh();
        c.load_state(&s).unwrap();
        assert_eq!(c.extract_state(), s);
    }
}
