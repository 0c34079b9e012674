//! Fully retroactive structures built from partially retroactive ones.
//!
//! Two transformations are provided, plus a replay oracle and a selector:
//!
//! * [`CheckpointFull`] keeps about `sqrt(m)` prefix structures and patches
//!   the nearest one up to the query time.
//! * [`WbtFull`] keeps a weight-balanced tree over the timeline with one
//!   partially retroactive structure per node, and threads an `O(n)` state
//!   through the `O(log m)` nodes covering a prefix.
//! * [`AutoFull`] maintains both and routes each query to the one with the
//!   smaller [`predicted_cost`].

use std::fmt;
use std::str::FromStr;

use crate::base::{BaseStructure, State};
use crate::partial::RetroError;
use crate::timeline::{RetroOp, TimeKey, Timeline};

mod auto;
mod checkpoint;
mod oracle;
mod wbt;

pub use auto::AutoFull;
pub use checkpoint::CheckpointFull;
pub use oracle::ReplayOracle;
pub use wbt::WbtFull;

/// Common surface of every fully retroactive strategy.
pub trait FullRetro<B: BaseStructure> {
    fn strategy(&self) -> Strategy;

    /// Inserts `op` at time `t`. Negative times are reserved.
    fn fr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError>;

    fn fr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError>;

    /// Evaluates the function on the state after all operations at times
    /// `<= t`. Leaves the structure externally unchanged.
    fn fr_query(&mut self, t: TimeKey) -> B::Value;

    fn timeline(&self) -> &Timeline<B::Entry>;

    /// Extracted states of every internal partially retroactive structure.
    fn internal_states(&self) -> Vec<State<B::Entry>>;

    /// Cheap structural invariants (balance, segment bounds).
    fn check_invariants(&self) -> Result<(), String>;

    fn len(&self) -> usize {
        self.timeline().len()
    }

    fn is_empty(&self) -> bool {
        self.timeline().is_empty()
    }
}

pub(crate) fn check_user_time(t: TimeKey) -> Result<(), RetroError> {
    if t.is_reserved() {
        Err(RetroError::ReservedTime(t))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Checkpoint,
    Wbt,
    Oracle,
    Auto,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Checkpoint,
        Strategy::Wbt,
        Strategy::Oracle,
        Strategy::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Checkpoint => "checkpoint",
            Strategy::Wbt => "wbt",
            Strategy::Oracle => "oracle",
            Strategy::Auto => "auto",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// How the checkpoint block size `B` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockPolicy {
    /// `B = ceil(sqrt(m))`, recomputed by a global rebuild whenever `m`
    /// leaves `[m0/2, 2*m0]`.
    Sqrt,
    /// Constant `B`, no global rebuilds.
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    /// Weight-balance parameter in `(0.5, 1)`.
    pub alpha: f64,
    pub block: BlockPolicy,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            strategy: Strategy::Auto,
            alpha: 2.0 / 3.0,
            block: BlockPolicy::Sqrt,
        }
    }
}

impl StrategyConfig {
    pub fn new(strategy: Strategy) -> Self {
        StrategyConfig {
            strategy,
            ..Self::default()
        }
    }

    /// A fresh, empty structure over copies of `proto`.
    pub fn build<B: BaseStructure + 'static>(&self, proto: &B) -> Box<dyn FullRetro<B>> {
        match self.strategy {
            Strategy::Checkpoint => Box::new(CheckpointFull::new(proto, self.block)),
            Strategy::Wbt => Box::new(WbtFull::new(proto, self.alpha)),
            Strategy::Oracle => Box::new(ReplayOracle::new(proto)),
            Strategy::Auto => Box::new(AutoFull::new(proto, self.block, self.alpha)),
        }
    }
}

pub fn ceil_sqrt(m: u64) -> u64 {
    let r = m.isqrt();
    if r * r == m {
        r
    } else {
        r + 1
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u64 {
    assert!(x >= 1);
    u64::from(64 - (x - 1).leading_zeros())
}

/// Predicted partially-retroactive calls per query: `ceil(sqrt(m))` for
/// checkpoints, `n * ceil(log2(m + 2))` for the tree, `m` for replay, and
/// the smaller of the first two for auto.
pub fn predicted_cost(strategy: Strategy, n: u64, m: u64) -> u64 {
    match strategy {
        Strategy::Checkpoint => ceil_sqrt(m),
        Strategy::Wbt => n * ceil_log2(m + 2),
        Strategy::Oracle => m,
        Strategy::Auto => predicted_cost(Strategy::Checkpoint, n, m).min(predicted_cost(Strategy::Wbt, n, m)),
    }
}
