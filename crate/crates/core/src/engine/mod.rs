//! Multi-clock cycle scheduler.
//!
//! Every component (router, adapter, module) belongs to one clock domain.
//! Domains with equal frequency are merged. At each edge time the domains
//! that have an edge fire in ascending id order and, within a domain,
//! components fire in ascending component id. Components only communicate
//! through timestamped FIFOs, so no component observes a write made on the
//! same edge.

mod clock;
mod module;
mod sim;

use thiserror::Error;

pub use clock::{period_from_mhz, ClockDomain, DomainId, EdgeScheduler, Ps};
pub use module::{Directory, Module, ModuleCtx, ModuleDecl, OutMessage, Scoreboard, SendError};
pub use sim::{build_simulation, Component, ComponentId, SimResult, Simulation, StopCondition, Termination};

use crate::workload::WorkloadError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("port {module}.{port} is not placed")]
    UnplacedPort { module: String, port: String },
    #[error("clock domain error: {0}")]
    DomainMismatch(String),
    #[error("invalid architecture or placement:\n  {}", .0.join("\n  "))]
    InvalidArchitecture(Vec<String>),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}
