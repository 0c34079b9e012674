//! Shared call counters.
//!
//! Every base structure built from the same prototype shares one [`Meter`],
//! so the cost of a fully retroactive query can be read off as a delta no
//! matter how many internal partially retroactive structures it touched.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

#[derive(Debug, Default)]
struct Cells {
    base_applies: AtomicU64,
    base_evals: AtomicU64,
    base_reads: AtomicU64,
    pr_updates: AtomicU64,
    pr_queries: AtomicU64,
}

#[derive(Clone, Debug, Default)]
pub struct Meter(Arc<Cells>);

/// A point-in-time copy of a [`Meter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MeterSnapshot {
    pub base_applies: u64,
    pub base_evals: u64,
    /// Entries read while extracting a state.
    pub base_reads: u64,
    /// `pr_insert` + `pr_delete` calls.
    pub pr_updates: u64,
    /// `pr_query_present` + `pr_extract_state` calls.
    pub pr_queries: u64,
}

impl MeterSnapshot {
    /// Base-structure calls: `apply_set`, `eval`, and per-entry state reads.
    pub fn base_calls(&self) -> u64 {
        self.base_applies + self.base_evals + self.base_reads
    }

    pub fn pr_calls(&self) -> u64 {
        self.pr_updates + self.pr_queries
    }

    pub fn since(&self, earlier: &MeterSnapshot) -> MeterSnapshot {
        MeterSnapshot {
            base_applies: self.base_applies - earlier.base_applies,
            base_evals: self.base_evals - earlier.base_evals,
            base_reads: self.base_reads - earlier.base_reads,
            pr_updates: self.pr_updates - earlier.pr_updates,
            pr_queries: self.pr_queries - earlier.pr_queries,
        }
    }
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        let c = &self.0;
        MeterSnapshot {
            base_applies: c.base_applies.load(Ordering::Relaxed),
            base_evals: c.base_evals.load(Ordering::Relaxed),
            base_reads: c.base_reads.load(Ordering::Relaxed),
            pr_updates: c.pr_updates.load(Ordering::Relaxed),
            pr_queries: c.pr_queries.load(Ordering::Relaxed),
        }
    }

    pub(crate) fn base_apply(&self) {
        self.0.base_applies.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn base_eval(&self) {
        self.0.base_evals.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn base_reads(&self, n: u64) {
        self.0.base_reads.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn pr_update(&self) {
        self.0.pr_updates.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn pr_query(&self) {
        self.0.pr_queries.fetch_add(1, Ordering::Relaxed);
    }
}
