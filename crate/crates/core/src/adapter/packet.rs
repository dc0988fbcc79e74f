//! Packetization and per-VC reassembly.
//!
//! A packet is one head flit carrying only the header, followed by
//! `ceil(8 * data_len / payload_width)` data flits, the last of which is the
//! tail. A transaction without data is a single head-tail flit.

use std::collections::BTreeMap;

use crate::noc::{Flit, FlitHeader, FlitKind, RouterId};

use super::{AdapterError, PortRef, Transaction, VcMapping};

/// Where a module port attaches to the NoC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Endpoint {
    pub noc: usize,
    pub router: RouterId,
    pub interface: usize,
}

pub type EndpointTable = BTreeMap<PortRef, Endpoint>;

#[derive(Debug, Clone, Copy)]
pub struct PacketFormat<'a> {
    pub noc: usize,
    pub src_router: RouterId,
    pub vc_mapping: &'a VcMapping,
    pub payload_width_bits: usize,
    pub max_transaction_bytes: usize,
}

pub fn flit_count(data_len: usize, payload_width_bits: usize) -> usize {
    let bytes_per_flit = payload_width_bits / 8;
    if data_len == 0 {
        1
    } else {
        1 + data_len.div_ceil(bytes_per_flit)
    }
}

pub fn packetize(t: &Transaction, endpoints: &EndpointTable, fmt: &PacketFormat<'_>) -> Result<Vec<Flit>, AdapterError> {
    if t.data.len() > fmt.max_transaction_bytes {
        return Err(AdapterError::OversizedTransaction { len: t.data.len(), max: fmt.max_transaction_bytes });
    }
    let dest = match endpoints.get(&t.dest) {
        Some(ep) if ep.noc == fmt.noc => *ep,
        _ => return Err(AdapterError::UnroutableDestination(t.dest)),
    };
    let width = fmt.payload_width_bits / 8;
    let vc = fmt.vc_mapping.vc(t.kind);
    let header = FlitHeader {
        dest_router: dest.router,
        dest_interface: dest.interface,
        transaction_id: t.id,
        transaction_kind: t.kind,
        src: t.src,
        dest: t.dest,
        data_len: t.data.len(),
        meta: t.meta,
    };
    let make = |kind, payload, header| Flit {
        kind,
        vc,
        payload,
        header,
        src_router: fmt.src_router,
        transaction_id: t.id,
        hops: 0,
    };
    if t.data.is_empty() {
        return Ok(vec![make(FlitKind::HeadTail, vec![0; width], Some(Box::new(header)))]);
    }
    let chunks: Vec<&[u8]> = t.data.chunks(width).collect();
    let mut flits = Vec::with_capacity(chunks.len() + 1);
    flits.push(make(FlitKind::Head, vec![0; width], Some(Box::new(header))));
    let last = chunks.len() - 1;
    for (i, chunk) in chunks.into_iter().enumerate() {
        let mut payload = vec![0u8; width];
        payload[..chunk.len()].copy_from_slice(chunk);
        let kind = if i == last { FlitKind::Tail } else { FlitKind::Body };
        flits.push(make(kind, payload, None));
    }
    Ok(flits)
}

#[derive(Debug, Clone)]
struct Partial {
    header: FlitHeader,
    data: Vec<u8>,
}

/// Per-VC reassembly state.
#[derive(Debug, Clone)]
pub struct Depacketizer {
    lanes: Vec<Option<Partial>>,
}

impl Depacketizer {
    pub fn new(vcs: usize) -> Self {
        Depacketizer { lanes: vec![None; vcs] }
    }

    /// Header of the packet currently being reassembled on `vc`.
    pub fn open_header(&self, vc: usize) -> Option<&FlitHeader> {
        self.lanes[vc].as_ref().map(|p| &p.header)
    }

    /// Feeds one flit; returns the transaction once its tail arrives.
    pub fn push(&mut self, flit: Flit) -> Result<Option<Transaction>, AdapterError> {
        let vc = flit.vc;
        let lane = &mut self.lanes[vc];
        match flit.kind {
            FlitKind::HeadTail | FlitKind::Head => {
                if lane.is_some() {
                    return Err(AdapterError::ProtocolViolation(format!("head flit on vc {vc} while a packet is open")));
                }
                let header = *flit.header.ok_or_else(|| AdapterError::ProtocolViolation("head flit without header".into()))?;
                let partial = Partial { data: Vec::with_capacity(header.data_len), header };
                if flit.kind == FlitKind::HeadTail {
                    return Ok(Some(finish(partial)));
                }
                *lane = Some(partial);
                Ok(None)
            }
            FlitKind::Body | FlitKind::Tail => {
                let Some(partial) = lane.as_mut() else {
                    return Err(AdapterError::ProtocolViolation(format!("{:?} flit on vc {vc} before head", flit.kind)));
                };
                let remaining = partial.header.data_len - partial.data.len();
                let take = remaining.min(flit.payload.len());
                partial.data.extend_from_slice(&flit.payload[..take]);
                if flit.kind == FlitKind::Tail {
                    let partial = lane.take().expect("open lane");
                    return Ok(Some(finish(partial)));
                }
                Ok(None)
            }
        }
    }
}

fn finish(p: Partial) -> Transaction {
    Transaction { id: p.header.transaction_id, kind: p.header.transaction_kind, src: p.header.src, dest: p.header.dest, data: p.data, meta: p.header.meta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::{TransactionKind, TxMeta};

    fn setup() -> (EndpointTable, VcMapping) {
        let mut eps = EndpointTable::new();
        eps.insert(PortRef::new(1, 0), Endpoint { noc: 0, router: 5, interface: 1 });
        eps.insert(PortRef::new(2, 0), Endpoint { noc: 1, router: 3, interface: 0 });
        (eps, VcMapping::default())
    }

    fn tx(id: u64, kind: TransactionKind, len: usize) -> Transaction {
        Transaction {
            id,
            kind,
            src: PortRef::new(0, 0),
            dest: PortRef::new(1, 0),
            data: (0..len).map(|i| (i * 7 + id as usize) as u8).collect(),
            meta: TxMeta { last: true, user: 42, address: 0x1000 },
        }
    }

    fn fmt(map: &VcMapping) -> PacketFormat<'_> {
        PacketFormat { noc: 0, src_router: 0, vc_mapping: map, payload_width_bits: 128, max_transaction_bytes: 512 }
    }

    #[test]
    fn flit_counts() {
        let (eps, map) = setup();
        let kinds = |n| packetize(&tx(1, TransactionKind::Stream, n), &eps, &fmt(&map)).unwrap();
        let five = kinds(64);
        assert_eq!(five.len(), 5);
        assert_eq!(
            five.iter().map(|f| f.kind).collect::<Vec<_>>(),
            vec![FlitKind::Head, FlitKind::Body, FlitKind::Body, FlitKind::Body, FlitKind::Tail]
        );
        let one = kinds(0);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].kind, FlitKind::HeadTail);
        assert_eq!(kinds(16).len(), 2);
        assert!(five.iter().all(|f| f.payload.len() == 16));
        assert!(five.iter().all(|f| f.header.is_some() == f.is_head()));
        assert_eq!(flit_count(64, 128), 5);
    }

    #[test]
    fn vc_follows_mapping() {
        let (eps, map) = setup();
        let f = packetize(&tx(1, TransactionKind::MmReadResp, 0), &eps, &fmt(&map)).unwrap();
        assert_eq!(f[0].vc, 2);
    }

    #[test]
    fn packetize_errors() {
        let (eps, map) = setup();
        let mut t = tx(1, TransactionKind::Stream, 8);
        t.dest = PortRef::new(2, 0);
        assert!(matches!(packetize(&t, &eps, &fmt(&map)), Err(AdapterError::UnroutableDestination(_))));
        t.dest = PortRef::new(9, 9);
        assert!(matches!(packetize(&t, &eps, &fmt(&map)), Err(AdapterError::UnroutableDestination(_))));
        let big = tx(1, TransactionKind::Stream, 513);
        assert!(matches!(packetize(&big, &eps, &fmt(&map)), Err(AdapterError::OversizedTransaction { .. })));
    }

    #[test]
    fn five_flit_packet_pending_then_done() {
        let (eps, map) = setup();
        let t = tx(3, TransactionKind::Stream, 64);
        let mut d = Depacketizer::new(3);
        let flits = packetize(&t, &eps, &fmt(&map)).unwrap();
        let mut out = Vec::new();
        for f in flits {
            out.push(d.push(f).unwrap());
        }
        assert!(out[..4].iter().all(Option::is_none));
        assert_eq!(out[4].as_ref(), Some(&t));
    }

    #[test]
    fn interleaved_vcs_reassemble() {
        let (eps, map) = setup();
        let a = tx(1, TransactionKind::Stream, 40);
        let b = tx(2, TransactionKind::MmWriteReq, 33);
        let fa = packetize(&a, &eps, &fmt(&map)).unwrap();
        let fb = packetize(&b, &eps, &fmt(&map)).unwrap();
        let mut d = Depacketizer::new(3);
        let mut done = Vec::new();
        let (mut ia, mut ib) = (fa.into_iter(), fb.into_iter());
        loop {
            let (x, y) = (ia.next(), ib.next());
            if x.is_none() && y.is_none() {
                break;
            }
            for f in [x, y].into_iter().flatten() {
                if let Some(t) = d.push(f).unwrap() {
                    done.push(t);
                }
            }
        }
        assert_eq!(done.len(), 2);
        assert!(done.contains(&a) && done.contains(&b));
    }

    #[test]
    fn body_before_head_is_protocol_violation() {
        let (eps, map) = setup();
        let flits = packetize(&tx(1, TransactionKind::Stream, 64), &eps, &fmt(&map)).unwrap();
        let mut d = Depacketizer::new(3);
        assert!(matches!(d.push(flits[1].clone()), Err(AdapterError::ProtocolViolation(_))));
    }
}
