use std::collections::HashMap;
use std::sync::Arc;

use super::circuit::{Bits, Circuit};
use super::{BaseStructure, Counters};
use crate::meter::Meter;
use crate::timeline::ListId;

pub const DEFAULT_MAX_GATES: usize = 64;

/// A list entry `(C, x)`: a circuit description and a bit string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitPairEntry {
    pub circuit: Arc<Circuit>,
    pub bits: Bits,
}

impl CircuitPairEntry {
    pub fn new(circuit: Arc<Circuit>, bits: Bits) -> Self {
        CircuitPairEntry { circuit, bits }
    }

    /// Whether `(self, second)` is a good pair: identical descriptions, the
    /// second circuit is valid within `max_gates` with exactly
    /// `|x1| + |x2|` inputs, and it outputs 1 on `x1` followed by `x2`.
    pub fn is_good_pair(&self, second: &CircuitPairEntry, max_gates: usize) -> bool {
        let same = Arc::ptr_eq(&self.circuit, &second.circuit) || self.circuit == second.circuit;
        if !same {
            return false;
        }
        let c = &second.circuit;
        if !c.is_valid_within(max_gates) || c.num_inputs() != self.bits.len() + second.bits.len() {
            return false;
        }
        c.eval(&self.bits.concat(&second.bits).0).unwrap_or(false)
    }
}

/// Two lists of circuit pairs; evaluates to 1 iff some `(L1[a], L2[b])` is a
/// good pair. Maintains `n_sat`, the number of good index pairs, with a
/// linear scan of the other list per update.
#[derive(Clone, Debug)]
pub struct CircuitPair {
    lists: [HashMap<usize, CircuitPairEntry>; 2],
    n_sat: u64,
    max_gates: usize,
    counters: Counters,
}

impl Default for CircuitPair {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_GATES)
    }
}

impl CircuitPair {
    pub fn new(max_gates: usize) -> Self {
        Self::with_meter(max_gates, Meter::new())
    }

    pub fn with_meter(max_gates: usize, meter: Meter) -> Self {
        CircuitPair {
            lists: [HashMap::new(), HashMap::new()],
            n_sat: 0,
            max_gates,
            counters: Counters::with_meter(meter),
        }
    }

    pub fn n_sat(&self) -> u64 {
        self.n_sat
    }

    pub fn max_gates(&self) -> usize {
        self.max_gates
    }

    /// Good pairs that `entry`, placed in `list`, forms with the other list.
    fn partners(&self, list: ListId, entry: &CircuitPairEntry) -> u64 {
        let d = self.max_gates;
        let count = if list == 1 {
            self.lists[1].values().filter(|e2| entry.is_good_pair(e2, d)).count()
        } else {
            self.lists[0].values().filter(|e1| e1.is_good_pair(entry, d)).count()
        };
        count as u64
    }
}

impl BaseStructure for CircuitPair {
    type Entry = CircuitPairEntry;
    type Value = bool;

    const LISTS: usize = 2;

    fn fresh(&self) -> Self {
        Self::with_meter(self.max_gates, self.counters.meter().clone())
    }

    fn store(&mut self, list: ListId, index: usize, value: Option<CircuitPairEntry>) {
        if let Some(old) = self.lists[list - 1].remove(&index) {
            self.n_sat -= self.partners(list, &old);
        }
        if let Some(new) = value {
            self.n_sat += self.partners(list, &new);
            self.lists[list - 1].insert(index, new);
        }
    }

    fn compute(&self) -> bool {
        self.n_sat > 0
    }

    fn get(&self, list: ListId, index: usize) -> Option<&CircuitPairEntry> {
        self.lists.get(list.wrapping_sub(1))?.get(&index)
    }

    fn size(&self) -> usize {
        self.lists.iter().map(HashMap::len).sum()
    }

    fn entries(&self) -> Vec<(ListId, usize, CircuitPairEntry)> {
        self.lists
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |(a, e)| (i + 1, *a, e.clone())))
            .collect()
    }

    fn counters(&self) -> &Counters {
        &self.counters
    }

    fn counters_mut(&mut self) -> &mut Counters {
        &mut self.counters
    }
}
