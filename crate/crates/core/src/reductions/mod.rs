//! Drivers that solve online (min,+) product, 3-SUM and circuit
//! satisfiability purely through fully retroactive updates and queries,
//! together with direct brute-force solvers for cross-checking.

use thiserror::Error;

use crate::base::circuit::CircuitError;
use crate::base::BaseStructure;
use crate::full::{FullRetro, StrategyConfig};
use crate::partial::RetroError;
use crate::timeline::{RetroOp, TimeKey};

mod csat;
pub mod generate;
mod minplus;
mod threesum;

pub use csat::{brute_csat, solve_csat_retro, MAX_CSAT_INPUTS};
pub use minplus::{brute_minplus, solve_online_minplus, OnlineError, StreamEvent, VectorStream};
pub use threesum::{brute_3sum, solve_3sum_retro};

/// Spacing between consecutive driver timestamps, leaving room for
/// operations inserted between them.
pub const TIME_STRIDE: i64 = 1 << 16;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("circuit has an odd number of inputs ({0})")]
    OddInputCount(usize),
    #[error("circuit has {0} inputs, more than the supported {max}", max = MAX_CSAT_INPUTS)]
    TooManyInputs(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Online(#[from] OnlineError),
    #[error(transparent)]
    Retro(#[from] RetroError),
}

/// Fully retroactive calls issued by a driver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub inserts: u64,
    pub deletes: u64,
    pub queries: u64,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.inserts + self.deletes + self.queries
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<T> {
    pub answer: T,
    pub census: Census,
}

/// A fully retroactive structure plus a call census and a clock that hands
/// out strided timestamps.
struct Driver<B: BaseStructure> {
    retro: Box<dyn FullRetro<B>>,
    census: Census,
    clock: i64,
}

impl<B: BaseStructure + 'static> Driver<B> {
    fn new(config: &StrategyConfig, proto: &B) -> Self {
        Driver {
            retro: config.build(proto),
            census: Census::default(),
            clock: 0,
        }
    }

    fn next_time(&mut self) -> TimeKey {
        self.clock += 1;
        TimeKey(self.clock * TIME_STRIDE)
    }

    /// Appends `op` at the next timestamp and returns that time.
    fn append(&mut self, op: RetroOp<B::Entry>) -> Result<TimeKey, RetroError> {
        let t = self.next_time();
        self.insert(t, op)?;
        Ok(t)
    }

    fn insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        self.census.inserts += 1;
        self.retro.fr_insert(t, op)
    }

    fn delete(&mut self, t: TimeKey) -> Result<(), RetroError> {
        self.census.deletes += 1;
        self.retro.fr_delete(t).map(drop)
    }

    /// Replaces the operation at `t`: delete, then insert at the same time.
    fn replace(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        self.delete(t)?;
        self.insert(t, op)
    }

    fn query(&mut self, t: TimeKey) -> B::Value {
        self.census.queries += 1;
        self.retro.fr_query(t)
    }
}
