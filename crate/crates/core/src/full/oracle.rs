use crate::base::{BaseStructure, State};
use crate::partial::{replay, RetroError};
use crate::timeline::{RetroOp, TimeKey, Timeline};

use super::{check_user_time, FullRetro, Strategy};

/// Ground truth: every query replays its prefix onto a fresh structure.
#[derive(Clone, Debug)]
pub struct ReplayOracle<B: BaseStructure> {
    proto: B,
    timeline: Timeline<B::Entry>,
}

impl<B: BaseStructure> ReplayOracle<B> {
    pub fn new(proto: &B) -> Self {
        ReplayOracle {
            proto: proto.fresh(),
            timeline: Timeline::new(),
        }
    }

    pub fn oracle_query(&self, t: TimeKey) -> B::Value {
        self.state_at(t).eval()
    }

    /// The base structure after replaying `prefix_ops(t)`.
    pub fn state_at(&self, t: TimeKey) -> B {
        replay(&self.proto, self.timeline.range_ops(None, t).map(|e| e.1))
    }
}

impl<B: BaseStructure> FullRetro<B> for ReplayOracle<B> {
    fn strategy(&self) -> Strategy {
        Strategy::Oracle
    }

    fn fr_insert(&mut self, t: TimeKey, op: RetroOp<B::Entry>) -> Result<(), RetroError> {
        check_user_time(t)?;
        B::check_list(op.list)?;
        Ok(self.timeline.insert_op(t, op)?)
    }

    fn fr_delete(&mut self, t: TimeKey) -> Result<RetroOp<B::Entry>, RetroError> {
        Ok(self.timeline.delete_op(t)?)
    }

    fn fr_query(&mut self, t: TimeKey) -> B::Value {
        self.oracle_query(t)
    }

    fn timeline(&self) -> &Timeline<B::Entry> {
        &self.timeline
    }

    fn internal_states(&self) -> Vec<State<B::Entry>> {
        Vec::new()
    }

    fn check_invariants(&self) -> Result<(), String> {
        Ok(())
    }
}
