//! Base (non-retroactive) list structures.
//!
//! Each structure maintains a constant number of lists indexed by natural
//! numbers, every slot initially idle (`None`), and answers one fixed
//! function of the lists. Implementations keep auxiliary aggregates so that
//! `eval` is cheap and `apply_set` only repairs what a single slot change
//! disturbs.

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

use crate::meter::Meter;
use crate::timeline::ListId;

pub mod circuit;
mod circuit_pair;
mod minplus;
mod threesum;

pub use circuit_pair::{CircuitPair, CircuitPairEntry, DEFAULT_MAX_GATES};
pub use minplus::MinPlusSum;
pub use threesum::ThreeSum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("state can only be loaded into an empty structure (size {0})")]
    NotEmpty(usize),
    #[error("slot (L{0}, {1}) appears twice in state")]
    DuplicateSlot(ListId, usize),
    #[error("list L{list} out of range 1..={lists}")]
    InvalidList { list: ListId, lists: usize },
}

/// Per-instance monotone counters plus the meter shared with sibling
/// instances created through [`BaseStructure::fresh`].
#[derive(Clone, Debug, Default)]
pub struct Counters {
    applied_sets: u64,
    evals: Cell<u64>,
    meter: Meter,
}

impl Counters {
    pub fn with_meter(meter: Meter) -> Self {
        Counters {
            applied_sets: 0,
            evals: Cell::new(0),
            meter,
        }
    }

    pub fn applied_sets(&self) -> u64 {
        self.applied_sets
    }

    pub fn evals(&self) -> u64 {
        self.evals.get()
    }

    pub fn meter(&self) -> &Meter {
        &self.meter
    }
}

/// Snapshot of every non-idle slot, sorted by `(list, index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State<E> {
    entries: Vec<(ListId, usize, E)>,
}

impl<E> Default for State<E> {
    fn default() -> Self {
        State { entries: Vec::new() }
    }
}

impl<E> State<E> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_entries(mut entries: Vec<(ListId, usize, E)>) -> Result<Self, BaseError> {
        entries.sort_by_key(|e| (e.0, e.1));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(BaseError::DuplicateSlot(w[0].0, w[0].1));
        }
        Ok(State { entries })
    }

    /// Number of non-idle slots.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(ListId, usize, E)] {
        &self.entries
    }
}

/// The capability set shared by every list structure: slot updates,
/// evaluation, and state extraction/loading.
///
/// Implementors provide `store`/`compute`; callers use the counting wrappers
/// `apply_set`/`eval`.
pub trait BaseStructure: Clone {
    type Entry: Clone + PartialEq + fmt::Debug;
    type Value: Clone + PartialEq + fmt::Debug;

    /// Number of lists `k`.
    const LISTS: usize;

    /// A new empty instance with the same configuration and shared meter.
    fn fresh(&self) -> Self;

    /// Set one slot and restore all aggregates.
    fn store(&mut self, list: ListId, index: usize, value: Option<Self::Entry>);

    fn compute(&self) -> Self::Value;

    fn get(&self, list: ListId, index: usize) -> Option<&Self::Entry>;

    /// Total number of non-idle slots across all lists.
    fn size(&self) -> usize;

    /// Every non-idle slot, in any order.
    fn entries(&self) -> Vec<(ListId, usize, Self::Entry)>;

    fn counters(&self) -> &Counters;

    fn counters_mut(&mut self) -> &mut Counters;

    fn check_list(list: ListId) -> Result<(), BaseError> {
        if (1..=Self::LISTS).contains(&list) {
            Ok(())
        } else {
            Err(BaseError::InvalidList {
                list,
                lists: Self::LISTS,
            })
        }
    }

    fn apply_set(&mut self, list: ListId, index: usize, value: Option<Self::Entry>) {
        assert!(
            Self::check_list(list).is_ok(),
            "list L{list} out of range 1..={}",
            Self::LISTS
        );
        let c = self.counters_mut();
        c.applied_sets += 1;
        c.meter.base_apply();
        self.store(list, index, value);
    }

    fn eval(&self) -> Self::Value {
        let c = self.counters();
        c.evals.set(c.evals.get() + 1);
        c.meter.base_eval();
        self.compute()
    }

    fn meter(&self) -> &Meter {
        &self.counters().meter
    }

    fn extract_state(&self) -> State<Self::Entry> {
        let mut entries = self.entries();
        self.meter().base_reads(entries.len() as u64);
        entries.sort_by_key(|e| (e.0, e.1));
        State { entries }
    }

    /// Rebuild `s` inside an empty instance with exactly `s.n()` `apply_set` calls.
    fn load_state(&mut self, s: &State<Self::Entry>) -> Result<(), BaseError> {
        if self.size() != 0 {
            return Err(BaseError::NotEmpty(self.size()));
        }
        for (list, index, e) in s.entries() {
            Self::check_list(*list)?;
            self.apply_set(*list, *index, Some(e.clone()));
        }
        Ok(())
    }
}
