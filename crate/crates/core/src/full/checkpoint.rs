use crate::base::{BaseStructure, State};
use crate::partial::{PartialRetro, RetroError};
use crate::timeline::{RetroOp, TimeKey, Timeline};

use super::{ceil_sqrt, check_user_time, BlockPolicy, FullRetro, Strategy};

#[derive(Clone, Debug)]
struct Checkpoint<B: BaseStructure> {
    boundary: TimeKey,
    /// Holds exactly the operations at times `<= boundary`.
    structure: PartialRetro<B>,
}

/// Full retroactivity from prefix checkpoints.
///
/// Boundaries `c_1 < ... < c_j` split the timeline into segments
/// `(c_{i-1}, c_i]` of at most `2B` operations. The last boundary is
/// [`TimeKey::MAX`], so its structure always holds the whole timeline.
/// Updates touch every checkpoint at or after the edited time; a query
/// patches whichever neighbouring checkpoint is fewer operations away from
/// the query time, rolling it forward or back and then restoring it.
#[derive(Clone, Debug)]
pub struct CheckpointFull<B: BaseStructure> {
    proto: B,
    timeline: Timeline<B::Entry>,
    policy: BlockPolicy,
    block: usize,
    checkpoints: Vec<Checkpoint<B>>,
    /// `m` at the last global rebuild.
    m0: usize,
    splits: u64,
    rebuilds: u64,
}

impl<B: BaseStructure> CheckpointFull<B> {
    pub fn new(proto: &B, policy: BlockPolicy) -> Self {
        let block = match policy {
            BlockPolicy::Sqrt => 1,
            BlockPolicy::Fixed(b) => {
                assert!(b > 0, "block size must be positive");
                b
            }
        };
        CheckpointFull {
            proto: proto.fresh(),
            timeline: Timeline::new(),
            policy,
            block,
            checkpoints: vec![Checkpoint {
                boundary: TimeKey::MAX,
                structure: PartialRetro::new(proto.fresh()),
            }],
            m0: 0,
            splits: 0,
            rebuilds: 0,
        }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn splits(&self) -> u64 {
        self.splits
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Boundary times including the final [`TimeKey::MAX`].
    pub fn boundaries(&self) -> Vec<TimeKey> {
        self.checkpoints.iter().map(|c| c.boundary).collect()
    }

    /// Operation count held by each checkpoint structure.
    pub fn checkpoint_sizes(&self) -> Vec<usize> {
        self.checkpoints.iter().map(|c| c.structure.len()).collect()
    }

    /// Timeline operations per segment `(c_{i-1}, c_i]`.
    pub fn segment_sizes(&self) -> Vec<usize> {
        let mut prev = None;
        self.checkpoints
            .iter()
            .map(|c| {
                let n = self.timeline.range_ops(prev, c.boundary).count();
                prev = Some(c.boundary);
                n
            })
            .collect()
    }

    /// Size of the present state.
    pub fn present_size(&self) -> usize {
        self.full().live().size()
    }

    fn full(&self) -> &PartialRetro<B> {
        &self.checkpoints.last().expect("final checkpoint").structure
    }

    /// Index of the checkpoint whose segment contains `t`.
    fn segment_of(&self, t: TimeKey) -> usize {
        self.checkpoints.partition_point(|c| c.boundary < t)
    }

    fn lower_boundary(&self, idx: usize) -> Option<TimeKey> {
        idx.checked_sub(1).map(|i| self.checkpoints[i].boundary)
    }

    fn after_edit(&mut self, inserted: Option<TimeKey>) {
        let m = self.timeline.len();
        if self.policy == BlockPolicy::Sqrt && (m > 2 * self.m0 || 2 * m < self.m0) {
            self.rebuild();
        } else if let Some(t) = inserted {
            self.split_if_oversized(self.segment_of(t));
        }
    }

    fn split_if_oversized(&mut self, idx: usize) {
        let lower = self.lower_boundary(idx);
        let upper = self.checkpoints[idx].boundary;
        let len = self.timeline.range_ops(lower, upper).count();
        if len <= 2 * self.block {
            return;
        }
        let median = *self
            .timeline
            .range_ops(lower, upper)
            .nth(len.div_ceil(2) - 1)
            .expect("median inside segment")
            .0;
        let mut structure = match idx {
            0 => PartialRetro::new(self.proto.fresh()),
            _ => self.checkpoints[idx - 1].structure.clone(),
        };
        for (t, op) in self.timeline.range_ops(lower, median) {
            structure
                .pr_insert(*t, op.clone())
                .expect("segment ops are fresh in the lower prefix");
        }
        self.checkpoints.insert(
            idx,
            Checkpoint {
                boundary: median,
                structure,
            },
        );
        self.splits += 1;
        // Both halves hold at most ceil(len/2) ops, within 2B after one split.
        debug_assert!(len.div_ceil(2) <= 2 * self.block);
    }

    /// Recomputes `B` and rebuilds every checkpoint from the timeline.
    fn rebuild(&mut self) {
        let m = self.timeline.len();
        self.block = (ceil_sqrt(m as u64) as usize).max(1);
        let mut checkpoints = Vec::with_capacity(m / self.block + 1);
        let mut current = PartialRetro::new(self.proto.fresh());
        for (rank, (t, op)) in self.timeline.iter().enumerate() {
            current
                .pr_insert(*t, op.clone())
                .expect("timeline times are unique");
            if (rank + 1) % self.block == 0 {
                checkpoints.push(Checkpoint {
                    boundary: *t,
                    structure: current.clone(),
                });
            }
        }
        checkpoints.push(Checkpoint {
            boundary: TimeKey::MAX,
            structure: current,
        });
        self.checkpoints = checkpoints;
        self.m0 = m;
        self.rebuilds += 1;
    }

    /// Spot check: every checkpoint holds exactly its prefix. `O(m * j)`.
    pub fn check_contents(&self) -> Result<(), String> {
        for c in &self.checkpoints {
            let expected = self.timeline.prefix_ops(c.boundary);
            let got: Vec<_> = c.structure.timeline().iter().map(|(t, op)| (*t, op.clone())).collect();
            if got != expected {
                return Err(format!("checkpoint at {} does not hold its prefix", c.boundary));
            }
        }
        Ok(())
    }
}

impl<B: BaseStructure> FullRetro<B> for CheckpointFull<B> {
    fn strategy(&self) -> Strategy {
        Strategy::Checkpoint
    }

    fn fr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        check_user_time(t)?;
        B::check_list(op.list)?;
        self.timeline.insert_op(t, op.clone())?;
        let first = self.segment_of(t);
        for c in &mut self.checkpoints[first..] {
            c.structure
                .pr_insert(t, op.clone())
                .expect("checkpoint mirrors the timeline");
        }
        self.after_edit(Some(t));
        Ok(())
    }

    fn fr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError> {
        let op = self.timeline.delete_op(t)?;
        let first = self.segment_of(t);
        for c in &mut self.checkpoints[first..] {
            c.structure.pr_delete(t).expect("checkpoint mirrors the timeline");
        }
        self.after_edit(None);
        Ok(op)
    }

    fn fr_query(&mut self, t: TimeKey) -> B::Value {
        let idx = self.segment_of(t);
        let upper = self.checkpoints[idx].boundary;
        let lower = self.lower_boundary(idx);
        let ahead = self.timeline.range_ops(Some(t), upper).count();
        let behind = self.timeline.range_ops(lower, t).count();
        if ahead <= behind {
            // Roll the checkpoint after t back to t, then forward again.
            let patch: Vec<TimeKey> = self.timeline.range_ops(Some(t), upper).map(|(k, _)| *k).collect();
            let base = &mut self.checkpoints[idx].structure;
            let removed: Vec<(TimeKey, RetroOp<B::Entry>)> = patch
                .iter()
                .rev()
                .map(|k| (*k, base.pr_delete(*k).expect("checkpoint holds its segment")))
                .collect();
            let answer = base.pr_query_present();
            for (k, op) in removed.into_iter().rev() {
                base.pr_insert(k, op).expect("time was just freed");
            }
            return answer;
        }
        let patch: Vec<(TimeKey, RetroOp<B::Entry>)> = self
            .timeline
            .range_ops(lower, t)
            .map(|(k, op)| (*k, op.clone()))
            .collect();
        let mut scratch;
        let base = match idx {
            0 => {
                scratch = PartialRetro::new(self.proto.fresh());
                &mut scratch
            }
            _ => &mut self.checkpoints[idx - 1].structure,
        };
        for (k, op) in &patch {
            base.pr_insert(*k, op.clone()).expect("patch ops lie after the checkpoint");
        }
        let answer = base.pr_query_present();
        for (k, _) in patch.iter().rev() {
            base.pr_delete(*k).expect("patch op was inserted above");
        }
        answer
    }

    fn timeline(&self) -> &Timeline<B::Entry> {
        &self.timeline
    }

    fn internal_states(&self) -> Vec<State<B::Entry>> {
        self.checkpoints.iter().map(|c| c.structure.pr_extract_state()).collect()
    }

    fn check_invariants(&self) -> Result<(), String> {
        if self.checkpoints.last().map(|c| c.boundary) != Some(TimeKey::MAX) {
            return Err("last checkpoint must cover the whole timeline".into());
        }
        if self.checkpoints.windows(2).any(|w| w[0].boundary >= w[1].boundary) {
            return Err("boundaries not strictly increasing".into());
        }
        let limit = 2 * self.block;
        if let Some((i, n)) = self.segment_sizes().into_iter().enumerate().find(|(_, n)| *n > limit) {
            return Err(format!("segment {i} holds {n} ops, limit {limit}"));
        }
        let m = self.timeline.len();
        if self.policy == BlockPolicy::Sqrt && !(self.m0 <= 2 * m && m <= 2 * self.m0) {
            return Err(format!("m = {m} outside [m0/2, 2*m0] with m0 = {}", self.m0));
        }
        for (i, c) in self.checkpoints.iter().enumerate() {
            let expected = self.timeline.range_ops(None, c.boundary).count();
            if c.structure.len() != expected {
                return Err(format!(
                    "checkpoint {i} holds {} ops, prefix has {expected}",
                    c.structure.len()
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::MinPlusSum;

    fn op(v: i64) -> RetroOp<i64> {
        RetroOp::set(1, (v % 3) as usize, Some(v))
    }

    #[test]
    fn sixteen_sequential_inserts() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Sqrt);
        for i in 1..=16 {
            cp.fr_insert(TimeKey(i), op(i)).unwrap();
        }
        assert_eq!(cp.block(), 4);
        assert_eq!(cp.checkpoint_sizes(), vec![4, 8, 12, 16]);
        cp.check_contents().unwrap();
        cp.check_invariants().unwrap();
    }

    #[test]
    fn fixed_block_splits_at_median() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Fixed(2));
        for i in 1..=5 {
            cp.fr_insert(TimeKey(i * 10), op(i)).unwrap();
        }
        // 5 ops > 2B = 4 in the only segment: split after the 3rd.
        assert_eq!(cp.boundaries(), vec![TimeKey(30), TimeKey::MAX]);
        assert_eq!(cp.splits(), 1);
        cp.fr_insert(TimeKey(5), op(7)).unwrap();
        cp.fr_insert(TimeKey(6), op(8)).unwrap();
        assert_eq!(cp.segment_sizes(), vec![3, 2, 2]);
        cp.check_contents().unwrap();
        cp.check_invariants().unwrap();
    }

    #[test]
    fn query_near_upper_boundary_rolls_back() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Fixed(4));
        cp.fr_insert(TimeKey(0), RetroOp::set(1, 0, Some(0))).unwrap();
        for i in 1..=7 {
            cp.fr_insert(TimeKey(i), RetroOp::set(2, 0, Some(10 * i))).unwrap();
        }
        // One segment of 8 ops; t = 6 is one op from the end.
        assert_eq!(cp.segment_sizes(), vec![8]);
        let meter = cp.proto.meter().clone();
        let states = cp.internal_states();
        let before = meter.snapshot();
        assert_eq!(cp.fr_query(TimeKey(6)), Some(60));
        let spent = meter.snapshot().since(&before);
        // One delete and one reinsert, not six forward inserts and deletes.
        assert_eq!(spent.base_applies, 2);
        assert_eq!(cp.internal_states(), states);
        assert_eq!(cp.fr_query(TimeKey(2)), Some(20));
        assert_eq!(cp.internal_states(), states);
    }

    #[test]
    fn query_patches_lower_checkpoint() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Fixed(1));
        cp.fr_insert(TimeKey(1), RetroOp::set(1, 0, Some(0))).unwrap();
        cp.fr_insert(TimeKey(2), RetroOp::set(2, 0, Some(3))).unwrap();
        cp.fr_insert(TimeKey(3), RetroOp::set(2, 0, Some(1))).unwrap();
        cp.fr_insert(TimeKey(4), RetroOp::set(2, 0, Some(7))).unwrap();
        let before = cp.internal_states();
        assert_eq!(cp.fr_query(TimeKey(0)), None);
        assert_eq!(cp.fr_query(TimeKey(1)), None);
        assert_eq!(cp.fr_query(TimeKey(2)), Some(3));
        assert_eq!(cp.fr_query(TimeKey(3)), Some(1));
        assert_eq!(cp.fr_query(TimeKey(100)), Some(7));
        assert_eq!(cp.internal_states(), before);
    }

    #[test]
    fn delete_only_op() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Sqrt);
        cp.fr_insert(TimeKey(3), RetroOp::set(1, 0, Some(0))).unwrap();
        cp.fr_delete(TimeKey(3)).unwrap();
        assert!(cp.is_empty());
        for t in [0, 3, 100] {
            assert_eq!(cp.fr_query(TimeKey(t)), None);
        }
        cp.check_invariants().unwrap();
    }

    #[test]
    fn global_rebuild_on_shrink() {
        let mut cp = CheckpointFull::new(&MinPlusSum::new(), BlockPolicy::Sqrt);
        for i in 0..64 {
            cp.fr_insert(TimeKey(i), op(i)).unwrap();
        }
        let rebuilds = cp.rebuilds();
        for i in 0..40 {
            cp.fr_delete(TimeKey(i)).unwrap();
            cp.check_invariants().unwrap();
        }
        assert!(cp.rebuilds() > rebuilds);
        cp.check_contents().unwrap();
    }
}
