use crate::base::{BaseStructure, State};
use crate::partial::RetroError;
use crate::timeline::{RetroOp, TimeKey, Timeline};

use super::{predicted_cost, BlockPolicy, CheckpointFull, FullRetro, Strategy, WbtFull};

/// Maintains both transformations and answers each query with whichever has
/// the smaller predicted cost for the current `n` (present state size) and
/// `m`. Both give identical answers; only the cost differs.
#[derive(Clone, Debug)]
pub struct AutoFull<B: BaseStructure> {
    checkpoint: CheckpointFull<B>,
    wbt: WbtFull<B>,
    routed: [u64; 2],
}

impl<B: BaseStructure> AutoFull<B> {
    pub fn new(proto: &B, block: BlockPolicy, alpha: f64) -> Self {
        AutoFull {
            checkpoint: CheckpointFull::new(proto, block),
            wbt: WbtFull::new(proto, alpha),
            routed: [0, 0],
        }
    }

    pub fn checkpoint(&self) -> &CheckpointFull<B> {
        &self.checkpoint
    }

    pub fn wbt(&self) -> &WbtFull<B> {
        &self.wbt
    }

    /// Strategy the next query would be routed to.
    pub fn route(&self) -> Strategy {
        let n = self.checkpoint.present_size() as u64;
        let m = self.checkpoint.len() as u64;
        if predicted_cost(Strategy::Wbt, n, m) < predicted_cost(Strategy::Checkpoint, n, m) {
            Strategy::Wbt
        } else {
            Strategy::Checkpoint
        }
    }

    /// Queries answered by `[checkpoint, wbt]`.
    pub fn routed(&self) -> [u64; 2] {
        self.routed
    }
}

impl<B: BaseStructure> FullRetro<B> for AutoFull<B> {
    fn strategy(&self) -> Strategy {
        Strategy::Auto
    }

    fn fr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        self.checkpoint.fr_insert(t, op.clone())?;
        self.wbt.fr_insert(t, op).expect("both structures share one timeline");
        Ok(())
    }

    fn fr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError> {
        let op = self.checkpoint.fr_delete(t)?;
        self.wbt.fr_delete(t).expect("both structures share one timeline");
        Ok(op)
    }

    fn fr_query(&mut self, t: TimeKey) -> B::Value {
        match self.route() {
            Strategy::Wbt => {
                self.routed[1] += 1;
                self.wbt.fr_query(t)
            }
            _ => {
                self.routed[0] += 1;
                self.checkpoint.fr_query(t)
            }
        }
    }

    fn timeline(&self) -> &Timeline<B::Entry> {
        self.checkpoint.timeline()
    }

    fn internal_states(&self) -> Vec<State<B::Entry>> {
        let mut out = self.checkpoint.internal_states();
        out.extend(self.wbt.internal_states());
        out
    }

    fn check_invariants(&self) -> Result<(), String> {
        self.checkpoint.check_invariants()?;
        self.wbt.check_invariants()
    }
}
