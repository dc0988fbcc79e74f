use crate::adapter::{PortRef, TransactionKind, TxMeta};

use super::RouterId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlitKind {
    Head,
    Body,
    Tail,
    HeadTail,
}

impl FlitKind {
    pub fn is_head(self) -> bool {
        matches!(self, FlitKind::Head | FlitKind::HeadTail)
    }

    pub fn is_tail(self) -> bool {
        matches!(self, FlitKind::Tail | FlitKind::HeadTail)
    }
}

/// Routing and reassembly information carried by head flits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlitHeader {
    pub dest_router: RouterId,
    pub dest_interface: usize,
    pub transaction_id: u64,
    pub transaction_kind: TransactionKind,
    pub src: PortRef,
    pub dest: PortRef,
    /// Payload bytes of the whole packet; the tail flit is zero-padded.
    pub data_len: usize,
    pub meta: TxMeta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flit {
    pub kind: FlitKind,
    pub vc: usize,
    /// Exactly `noc_payload_width / 8` bytes.
    pub payload: Vec<u8>,
    pub header: Option<Box<FlitHeader>>,
    pub src_router: RouterId,
    pub transaction_id: u64,
    /// Router-to-router links traversed so far.
    pub hops: u32,
}

impl Flit {
    pub fn is_head(&self) -> bool {
        self.kind.is_head()
    }

    pub fn is_tail(&self) -> bool {
        self.kind.is_tail()
    }

    pub fn dest_router(&self) -> Option<RouterId> {
        self.header.as_ref().map(|h| h.dest_router)
    }
}
