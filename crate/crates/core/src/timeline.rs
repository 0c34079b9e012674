//! The editable operation sequence.
//!
//! A [`Timeline`] holds set-element operations keyed by caller-supplied
//! logical timestamps. Operations may be inserted or removed at any past
//! time; iteration is always in increasing time order.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::Bound;

use thiserror::Error;

/// Logical timestamp of an operation. Larger is later.
///
/// Nonnegative keys belong to user operations. Negative keys are reserved for
/// the state-injection prologue used by the tree transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimeKey(pub i64);

impl TimeKey {
    pub const MIN: TimeKey = TimeKey(i64::MIN);
    pub const MAX: TimeKey = TimeKey(i64::MAX);

    pub fn is_reserved(self) -> bool {
        self.0 < 0
    }
}

impl From<i64> for TimeKey {
    fn from(value: i64) -> Self {
        TimeKey(value)
    }
}

impl fmt::Display for TimeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One-based list identifier (`L1`, `L2`, ...).
pub type ListId = usize;

/// `set-element(L_list, index, value)`; a `None` value is the idle symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetroOp<E> {
    pub list: ListId,
    pub index: usize,
    pub value: Option<E>,
}

impl<E> RetroOp<E> {
    pub fn set(list: ListId, index: usize, value: Option<E>) -> Self {
        RetroOp { list, index, value }
    }

    pub fn slot(&self) -> (ListId, usize) {
        (self.list, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TimelineError {
    #[error("an operation already exists at time {0}")]
    DuplicateTime(TimeKey),
    #[error("no operation at time {0}")]
    NoSuchTime(TimeKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timeline<E> {
    ops: BTreeMap<TimeKey, RetroOp<E>>,
}

impl<E> Default for Timeline<E> {
    fn default() -> Self {
        Timeline { ops: BTreeMap::new() }
    }
}

impl<E: Clone> Timeline<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_op(&mut self, t: TimeKey, op: RetroOp<E>) -> Result<(), TimelineError> {
        match self.ops.entry(t) {
            btree_map::Entry::Occupied(_) => Err(TimelineError::DuplicateTime(t)),
            btree_map::Entry::Vacant(slot) => {
                slot.insert(op);
                Ok(())
            }
        }
    }

    pub fn delete_op(&mut self, t: TimeKey) -> Result<RetroOp<E>, TimelineError> {
        self.ops.remove(&t).ok_or(TimelineError::NoSuchTime(t))
    }

    /// All operations with time `<= t`, in increasing time order.
    pub fn prefix_ops(&self, t: TimeKey) -> Vec<(TimeKey, RetroOp<E>)> {
        self.ops
            .range(..=t)
            .map(|(k, op)| (*k, op.clone()))
            .collect()
    }

    /// Operations with time in the half-open interval `(after, upto]`.
    pub fn range_ops(&self, after: Option<TimeKey>, upto: TimeKey) -> btree_map::Range<'_, TimeKey, RetroOp<E>> {
        let lower = match after {
            Some(a) => Bound::Excluded(a),
            None => Bound::Unbounded,
        };
        if let Some(a) = after {
            if a >= upto {
                // Empty range; BTreeMap panics on inverted bounds.
                return self.ops.range((Bound::Excluded(upto), Bound::Included(upto)));
            }
        }
        self.ops.range((lower, Bound::Included(upto)))
    }

    pub fn op_at(&self, t: TimeKey) -> Option<&RetroOp<E>> {
        self.ops.get(&t)
    }

    pub fn contains(&self, t: TimeKey) -> bool {
        self.ops.contains_key(&t)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn first_time(&self) -> Option<TimeKey> {
        self.ops.keys().next().copied()
    }

    pub fn last_time(&self) -> Option<TimeKey> {
        self.ops.keys().next_back().copied()
    }

    /// Time of the operation at zero-based `rank` in time order.
    pub fn time_at_rank(&self, rank: usize) -> Option<TimeKey> {
        self.ops.keys().nth(rank).copied()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, TimeKey, RetroOp<E>> {
        self.ops.iter()
    }

    pub fn times(&self) -> impl DoubleEndedIterator<Item = TimeKey> + '_ {
        self.ops.keys().copied()
    }
}

impl<'a, E> IntoIterator for &'a Timeline<E> {
    type Item = (&'a TimeKey, &'a RetroOp<E>);
    type IntoIter = btree_map::Iter<'a, TimeKey, RetroOp<E>>;

    fn into_iter(self) -> Self::IntoIter {
        self.ops.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: i64) -> RetroOp<i64> {
        RetroOp::set(1, 0, Some(v))
    }

    #[test]
    fn insert_single() {
        let mut tl = Timeline::new();
        tl.insert_op(TimeKey(5), set(7)).unwrap();
        assert_eq!(tl.len(), 1);
        assert_eq!(tl.op_at(TimeKey(5)), Some(&set(7)));
    }

    #[test]
    fn iteration_is_time_ordered() {
        let mut tl = Timeline::new();
        tl.insert_op(TimeKey(5), set(1)).unwrap();
        tl.insert_op(TimeKey(2), set(2)).unwrap();
        let times: Vec<_> = tl.times().collect();
        assert_eq!(times, vec![TimeKey(2), TimeKey(5)]);
    }

    #[test]
    fn duplicate_time_rejected() {
        let mut tl = Timeline::new();
        tl.insert_op(TimeKey(5), set(1)).unwrap();
        assert_eq!(
            tl.insert_op(TimeKey(5), set(2)),
            Err(TimelineError::DuplicateTime(TimeKey(5)))
        );
        assert_eq!(tl.op_at(TimeKey(5)), Some(&set(1)));
    }

    #[test]
    fn delete_returns_op() {
        let mut tl = Timeline::new();
        tl.insert_op(TimeKey(3), set(4)).unwrap();
        assert_eq!(tl.delete_op(TimeKey(3)), Ok(set(4)));
        assert!(tl.is_empty());
        assert_eq!(
            tl.delete_op(TimeKey(9)),
            Err(TimelineError::NoSuchTime(TimeKey(9)))
        );
    }

    #[test]
    fn delete_middle() {
        let mut tl = Timeline::new();
        for t in 1..=3 {
            tl.insert_op(TimeKey(t), set(t)).unwrap();
        }
        tl.delete_op(TimeKey(2)).unwrap();
        let times: Vec<_> = tl.times().collect();
        assert_eq!(times, vec![TimeKey(1), TimeKey(3)]);
    }

    #[test]
    fn prefixes() {
        let mut tl = Timeline::new();
        for t in [1, 4, 9] {
            tl.insert_op(TimeKey(t), set(t)).unwrap();
        }
        let p: Vec<_> = tl.prefix_ops(TimeKey(4)).into_iter().map(|e| e.0).collect();
        assert_eq!(p, vec![TimeKey(1), TimeKey(4)]);
        assert!(tl.prefix_ops(TimeKey(0)).is_empty());
        assert_eq!(tl.prefix_ops(TimeKey::MAX).len(), 3);
    }

    #[test]
    fn range_ops_handles_inverted_bounds() {
        let mut tl = Timeline::new();
        tl.insert_op(TimeKey(3), set(3)).unwrap();
        assert_eq!(tl.range_ops(Some(TimeKey(5)), TimeKey(2)).count(), 0);
        assert_eq!(tl.range_ops(Some(TimeKey(3)), TimeKey(3)).count(), 0);
        assert_eq!(tl.range_ops(None, TimeKey(3)).count(), 1);
    }

    proptest! {
        #[test]
        fn matches_reference_association_list(
            edits in proptest::collection::vec((any::<bool>(), 0i64..40, 0i64..100), 0..200)
        ) {
            let mut tl = Timeline::new();
            let mut reference: Vec<(i64, i64)> = Vec::new();
            for (is_insert, t, v) in edits {
                let present = reference.iter().position(|e| e.0 == t);
                if is_insert {
                    let r = tl.insert_op(TimeKey(t), set(v));
                    match present {
                        Some(_) => prop_assert!(r.is_err()),
                        None => { prop_assert!(r.is_ok()); reference.push((t, v)); }
                    }
                } else {
                    let r = tl.delete_op(TimeKey(t));
                    match present {
                        Some(i) => { prop_assert_eq!(r, Ok(set(reference[i].1))); reference.remove(i); }
                        None => prop_assert!(r.is_err()),
                    }
                }
            }
            reference.sort();
            let got: Vec<(i64, i64)> = tl.iter().map(|(k, op)| (k.0, op.value.unwrap())).collect();
            prop_assert_eq!(got, reference);
        }

        #[test]
        fn prefix_monotone(times in proptest::collection::btree_set(0i64..1000, 0..50), a in 0i64..1000, b in 0i64..1000) {
            let mut tl = Timeline::new();
            for t in &times {
                tl.insert_op(TimeKey(*t), set(*t)).unwrap();
            }
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let p1 = tl.prefix_ops(TimeKey(lo));
            let p2 = tl.prefix_ops(TimeKey(hi));
            prop_assert!(p1.len() <= p2.len());
            prop_assert_eq!(&p2[..p1.len()], &p1[..]);
        }
    }
}
