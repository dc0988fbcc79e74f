//! Latency-insensitive NoC adapters.
//!
//! The injection side arbitrates between the module interfaces attached to
//! a router, packetizes the granted transaction and pushes its flits into
//! an asynchronous FIFO towards the router. The ejection side reassembles
//! packets per VC and steers each completed transaction into the output
//! buffer of its destination interface.

mod arbiter;
mod cdc;
mod packet;
mod state;
mod transaction;

use thiserror::Error;

pub use arbiter::{Arbiter, ArbiterKind};
pub use cdc::{cdc_pop, cdc_push, AsyncFifo, PushError};
pub use packet::{flit_count, packetize, Depacketizer, Endpoint, EndpointTable, PacketFormat};
pub use state::{
    payload_digest, AdapterEvent, AdapterParams, AdapterState, InterfaceWires, SteerOutcome, INTERFACE_INPUT_DEPTH,
};
pub use transaction::{PortRef, Transaction, TransactionKind, TxMeta, VcMapping};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("destination port {0:?} is not reachable from this NoC")]
    UnroutableDestination(PortRef),
    #[error("transaction of {len} bytes exceeds the {max}-byte limit")]
    OversizedTransaction { len: usize, max: usize },
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("unknown adapter interface {0}")]
    UnknownInterface(usize),
}
