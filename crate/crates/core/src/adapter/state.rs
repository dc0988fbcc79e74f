//! Adapter pipeline: module interfacing, encode/decode, NoC interfacing.

use std::collections::{BTreeSet, VecDeque};

use sha2::{Digest, Sha256};

use crate::engine::Ps;
use crate::noc::{Flit, LocalPort, RouterId};

use super::arbiter::{Arbiter, ArbiterKind};
use super::cdc::AsyncFifo;
use super::packet::{packetize, Depacketizer, EndpointTable, PacketFormat};
use super::{AdapterError, PortRef, Transaction, VcMapping};

/// Depth of the module-to-adapter handshake buffer of each interface.
pub const INTERFACE_INPUT_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdapterParams {
    pub interfaces: usize,
    pub fifo_size: usize,
    pub obuff_size: usize,
    pub in_arbiter: ArbiterKind,
    pub out_arbiter: ArbiterKind,
    pub vc_mapping: VcMapping,
    pub freq_mhz: u32,
    pub max_transaction_bytes: usize,
}

impl Default for AdapterParams {
    fn default() -> Self {
        AdapterParams {
            interfaces: 2,
            fifo_size: 16,
            obuff_size: 2,
            in_arbiter: ArbiterKind::RoundRobin,
            out_arbiter: ArbiterKind::RoundRobin,
            vc_mapping: VcMapping::default(),
            freq_mhz: 800,
            max_transaction_bytes: 512,
        }
    }
}

/// The two queues between a module port and its adapter interface.
#[derive(Debug, Clone)]
pub struct InterfaceWires {
    pub port: PortRef,
    /// Module -> adapter.
    pub to_adapter: AsyncFifo<Transaction>,
    /// Adapter -> module; this is the output buffer.
    pub to_module: AsyncFifo<Transaction>,
}

impl InterfaceWires {
    pub fn new(port: PortRef, obuff_size: usize) -> Self {
        InterfaceWires { port, to_adapter: AsyncFifo::new(INTERFACE_INPUT_DEPTH), to_module: AsyncFifo::new(obuff_size) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdapterEvent {
    Packetized { transaction_id: u64, time: Ps },
    Depacketized { transaction_id: u64, time: Ps, digest: [u8; 32] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SteerOutcome {
    Delivered,
    /// Output buffer full; the transaction stays upstream.
    Held(Transaction),
}

#[derive(Debug, Clone)]
pub struct AdapterState {
    pub noc: usize,
    pub router: RouterId,
    /// Global indices into the interface wire table, by local interface id.
    interfaces: Vec<usize>,
    in_arb: Arbiter,
    out_arb: Arbiter,
    pending: VecDeque<Flit>,
    reasm: Depacketizer,
    vc_mapping: VcMapping,
    payload_width_bits: usize,
    max_transaction_bytes: usize,
    vcs: usize,
}

pub fn payload_digest(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

impl AdapterState {
    pub fn new(noc: usize, router: RouterId, params: &AdapterParams, vcs: usize, payload_width_bits: usize) -> Self {
        AdapterState {
            noc,
            router,
            interfaces: Vec::new(),
            in_arb: Arbiter::new(params.in_arbiter, params.interfaces),
            out_arb: Arbiter::new(params.out_arbiter, vcs),
            pending: VecDeque::new(),
            reasm: Depacketizer::new(vcs),
            vc_mapping: params.vc_mapping,
            payload_width_bits,
            max_transaction_bytes: params.max_transaction_bytes,
            vcs,
        }
    }

    /// Binds the next local interface id to a global wire index.
    pub fn attach(&mut self, wire: usize) -> usize {
        self.interfaces.push(wire);
        self.interfaces.len() - 1
    }

    pub fn interfaces(&self) -> &[usize] {
        &self.interfaces
    }

    pub fn is_idle(&self) -> bool {
        self.pending.is_empty() && (0..self.vcs).all(|vc| self.reasm.open_header(vc).is_none())
    }

    /// Input arbiter over local interface ids with a transaction ready.
    pub fn arbitrate_inputs(&mut self, ready: &BTreeSet<usize>) -> Option<usize> {
        self.in_arb.grant(|i| ready.contains(&i))
    }

    /// Enqueues `t` on local interface `iface`'s output buffer.
    pub fn steer(
        &self,
        t: Transaction,
        iface: usize,
        wires: &mut [InterfaceWires],
        now: Ps,
    ) -> Result<SteerOutcome, AdapterError> {
        let wire = *self.interfaces.get(iface).ok_or(AdapterError::UnknownInterface(iface))?;
        match wires[wire].to_module.push(now, t) {
            Ok(()) => Ok(SteerOutcome::Delivered),
            Err((_, t)) => Ok(SteerOutcome::Held(t)),
        }
    }

    /// One adapter clock edge. Returns whether anything moved.
    pub fn tick(
        &mut self,
        now: Ps,
        wires: &mut [InterfaceWires],
        local: &mut LocalPort,
        endpoints: &EndpointTable,
        events: &mut Vec<AdapterEvent>,
    ) -> bool {
        let mut moved = self.inject(now, wires, local, endpoints, events);
        moved |= self.eject(now, wires, local, events);
        moved
    }

    fn inject(
        &mut self,
        now: Ps,
        wires: &mut [InterfaceWires],
        local: &mut LocalPort,
        endpoints: &EndpointTable,
        events: &mut Vec<AdapterEvent>,
    ) -> bool {
        let mut moved = false;
        if self.pending.is_empty() {
            let ready: BTreeSet<usize> =
                (0..self.interfaces.len()).filter(|&i| wires[self.interfaces[i]].to_adapter.peek(now).is_some()).collect();
            if let Some(g) = self.arbitrate_inputs(&ready) {
                let t = wires[self.interfaces[g]].to_adapter.pop(now).expect("ready interface");
                let fmt = PacketFormat {
                    noc: self.noc,
                    src_router: self.router,
                    vc_mapping: &self.vc_mapping,
                    payload_width_bits: self.payload_width_bits,
                    max_transaction_bytes: self.max_transaction_bytes,
                };
                let flits = packetize(&t, endpoints, &fmt)
                    .unwrap_or_else(|e| panic!("transaction {} accepted by adapter but not packetizable: {e}", t.id));
                events.push(AdapterEvent::Packetized { transaction_id: t.id, time: now });
                self.pending.extend(flits);
                moved = true;
            }
        }
        while !self.pending.is_empty() && local.injection.can_push(now) {
            let f = self.pending.pop_front().expect("non-empty");
            local.injection.push(now, f).expect("checked space");
            moved = true;
        }
        moved
    }

    fn eject(&mut self, now: Ps, wires: &mut [InterfaceWires], local: &mut LocalPort, events: &mut Vec<AdapterEvent>) -> bool {
        let mut moved = false;
        // Body flits reassemble freely; tails wait for output-buffer space.
        for vc in 0..self.vcs {
            while let Some(f) = local.ejection[vc].peek(now) {
                if f.is_tail() {
                    break;
                }
                let f = local.ejection[vc].pop(now).expect("peeked");
                let done = self.reasm.push(f).unwrap_or_else(|e| panic!("simulator invariant violated: {e}"));
                debug_assert!(done.is_none());
                moved = true;
            }
        }
        let mut steerable = [false; 64];
        let mut target = [0usize; 64];
        for vc in 0..self.vcs {
            let Some(f) = local.ejection[vc].peek(now) else { continue };
            let iface = match &f.header {
                Some(h) => h.dest_interface,
                None => self.reasm.open_header(vc).expect("tail follows head").dest_interface,
            };
            let wire = *self
                .interfaces
                .get(iface)
                .unwrap_or_else(|| panic!("{}", AdapterError::UnknownInterface(iface)));
            steerable[vc] = wires[wire].to_module.can_push(now);
            target[vc] = iface;
        }
        if let Some(vc) = self.out_arb.grant(|vc| steerable[vc]) {
            let f = local.ejection[vc].pop(now).expect("steerable tail");
            let t = self
                .reasm
                .push(f)
                .unwrap_or_else(|e| panic!("simulator invariant violated: {e}"))
                .expect("tail completes packet");
            let iface = target[vc];
            let digest = payload_digest(&t.data);
            let id = t.id;
            match self.steer(t, iface, wires, now).unwrap_or_else(|e| panic!("{e}")) {
                SteerOutcome::Delivered => {}
                SteerOutcome::Held(_) => unreachable!("space checked before popping the tail"),
            }
            events.push(AdapterEvent::Depacketized { transaction_id: id, time: now, digest });
            moved = true;
        }
        moved
    }
}
