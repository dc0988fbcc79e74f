//! Packet-switched NoC: topology, routing functions and credit-based
//! virtual-channel routers.
//!
//! Each router runs a fixed-depth pipeline (route computation, VC
//! allocation, switch allocation, switch/link traversal). A flit that lands
//! in an input buffer at time `t` may leave towards a neighbour at
//! `t + depth * period`, so an unloaded hop costs exactly `depth` NoC
//! cycles. Flits whose route is the local port use a dedicated ejection
//! path and leave on the first edge at which they are visible.

mod flit;
mod network;
mod router;
mod topology;

use thiserror::Error;

pub use flit::{Flit, FlitHeader, FlitKind};
pub use network::{FlitCensus, LocalPort, Network, NocEvent, NocParams};
pub use router::RouterState;
pub use topology::{
    min_hops, minimal_adaptive_next_hop, next_hop_dimension_order, NocTopology, Port, RouterId, RoutingFunc,
    TopologyKind, NUM_PORTS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NocError {
    #[error("router {router} out of range (topology has {count} routers)")]
    InvalidRouter { router: usize, count: usize },
    #[error("credit overflow at router {router} port {port} vc {vc}")]
    CreditOverflow { router: usize, port: Port, vc: usize },
}
