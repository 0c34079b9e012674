//! Retroactive list structures.
//!
//! * [`timeline`]: the editable, timestamped operation sequence.
//! * [`base`]: the list structures (min-plus sum, 3-SUM, circuit pairs).
//! * [`partial`]: partial retroactivity for any base structure.
//! * [`full`]: full retroactivity via checkpoints or a weight-balanced tree.
//! * [`reductions`]: (min,+) product, 3-SUM and circuit SAT solved through
//!   fully retroactive operations.

pub mod base;
pub mod full;
pub mod meter;
pub mod partial;
pub mod reductions;
pub mod timeline;
pub mod workload;

pub use base::{BaseStructure, State};
pub use full::{predicted_cost, BlockPolicy, FullRetro, Strategy, StrategyConfig};
pub use meter::{Meter, MeterSnapshot};
pub use partial::{PartialRetro, RetroError};
pub use timeline::{ListId, RetroOp, TimeKey, Timeline, TimelineError};
