//! Partial retroactivity for any [`BaseStructure`].
//!
//! A set-element operation at time `t` only affects one slot of the present
//! version, and only if it is the latest operation on that slot. Each slot
//! therefore keeps its operation times in an ordered set; an edit touches the
//! live structure at most once, when the slot's latest operation changes.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::base::{BaseError, BaseStructure, State};
use crate::timeline::{ListId, RetroOp, TimeKey, Timeline, TimelineError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetroError {
    #[error(transparent)]
    Timeline(#[from] TimelineError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error("time {0} is reserved for internal use")]
    ReservedTime(TimeKey),
}

#[derive(Clone, Debug)]
pub struct PartialRetro<B: BaseStructure> {
    timeline: Timeline<B::Entry>,
    /// Operation times per slot; a slot is present only while non-empty.
    histories: HashMap<(ListId, usize), BTreeSet<TimeKey>>,
    live: B,
}

impl<B: BaseStructure> PartialRetro<B> {
    /// Wraps `live`, which must be empty.
    pub fn new(live: B) -> Self {
        assert_eq!(live.size(), 0, "partial retroactivity starts from an empty structure");
        PartialRetro {
            timeline: Timeline::new(),
            histories: HashMap::new(),
            live,
        }
    }

    pub fn timeline(&self) -> &Timeline<B::Entry> {
        &self.timeline
    }

    /// The present version.
    pub fn live(&self) -> &B {
        &self.live
    }

    pub fn len(&self) -> usize {
        self.timeline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timeline.is_empty()
    }

    pub fn pr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        B::check_list(op.list)?;
        let slot = op.slot();
        let value = op.value.clone();
        self.timeline.insert_op(t, op)?;
        self.live.meter().pr_update();
        let history = self.histories.entry(slot).or_default();
        history.insert(t);
        if history.last() == Some(&t) {
            self.live.apply_set(slot.0, slot.1, value);
        }
        Ok(())
    }

    pub fn pr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError> {
        let op = self.timeline.delete_op(t)?;
        self.live.meter().pr_update();
        let slot = op.slot();
        let history = self
            .histories
            .get_mut(&slot)
            .expect("every timeline op has a slot history");
        let was_latest = history.last() == Some(&t);
        history.remove(&t);
        let successor = history.last().copied();
        if history.is_empty() {
            self.histories.remove(&slot);
        }
        if was_latest {
            let value = successor.and_then(|s| {
                self.timeline
                    .op_at(s)
                    .expect("history and timeline agree")
                    .value
                    .clone()
            });
            self.live.apply_set(slot.0, slot.1, value);
        }
        Ok(op)
    }

    pub fn pr_query_present(&self) -> B::Value {
        self.live.meter().pr_query();
        self.live.eval()
    }

    pub fn pr_extract_state(&self) -> State<B::Entry> {
        self.live.meter().pr_query();
        self.live.extract_state()
    }

    /// Number of slots with at least one operation.
    pub fn touched_slots(&self) -> usize {
        self.histories.len()
    }

    pub fn touches(&self, list: ListId, index: usize) -> bool {
        self.histories.contains_key(&(list, index))
    }
}

/// Replays `ops` in order onto a fresh copy of `proto`.
pub fn replay<'a, B, I>(proto: &B, ops: I) -> B
where
    B: BaseStructure + 'a,
    I: IntoIterator<Item = &'a RetroOp<B::Entry>>,
{
    let mut b = proto.fresh();
    for op in ops {
        b.apply_set(op.list, op.index, op.value.clone());
    }
    b
}
