//! Per-transaction timestamp ladders, NoC counters and the reports built
//! from them.

mod export;
mod trace;

use thiserror::Error;

pub use export::{counters_csv, export_csv, traces_csv, ExportReport, COUNTERS_CSV, COUNTERS_HEADER, TRACES_CSV, TRACES_HEADER};
pub use trace::{
    aggregate_performance, latency_breakdown, tops, LatencyBreakdown, Performance, Stage, TelemetryTrace, TraceRegistry,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PortCounters {
    /// Flits that left the router through this output port.
    pub flits_forwarded: u64,
    /// Cycles in which a flit bound for this output was ready but had no credit.
    pub credit_stall_cycles: u64,
    /// Highest occupancy seen in any VC buffer of this input port.
    pub peak_vc_occupancy: u64,
}

/// Counters of one NoC, indexed `[router][port]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NocCounters {
    pub noc: usize,
    pub routers: Vec<[PortCounters; crate::noc::NUM_PORTS]>,
}

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error("trace `{0}` is not registered")]
    UnknownTrace(String),
    #[error("stage {stage} of transaction {id} recorded twice")]
    DuplicateRecord { id: u64, stage: Stage },
    #[error("transaction {id} has no {stage} timestamp")]
    IncompleteTrace { id: u64, stage: Stage },
    #[error("run is incomplete: {0} transactions were never received")]
    IncompleteRun(usize),
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
