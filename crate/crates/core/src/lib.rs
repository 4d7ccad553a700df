//! Downlink scheduling for satellites renting ground-station antennas from
//! several providers.
//!
//! A broker decides every slot which satellite downlinks through which
//! antenna to which data center, trading rental and compute cost against
//! per-MB latency with a drift-plus-penalty rule solved as a min-cost
//! matching. Five baseline policies, a slotted simulator and scenario and
//! contact-plan I/O sit around it.

pub mod accounting;
pub mod baselines;
pub mod desk;
pub mod engine;
pub mod error;
pub mod feasibility;
pub mod fixtures;
pub mod model;
pub mod orbit;
pub mod queues;
pub mod rng;
pub mod scheduler;

pub use accounting::{DownlinkRecord, RunMetrics, SlotTrace};
pub use baselines::PolicyKind;
pub use engine::{run, RunOutput, RunRecord, RunSummary, SimState};
pub use error::{ContactPlanError, ScenarioError, SimError};
pub use model::Scenario;
pub use orbit::ContactTable;
pub use scheduler::{schedule_slot, Assignment, SlotContext};
