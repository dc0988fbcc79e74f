use std::collections::BTreeMap;

use thiserror::Error;

use crate::adapter::{payload_digest, EndpointTable, InterfaceWires, PortRef, Transaction, TransactionKind, TxMeta};
use crate::telemetry::{Stage, TraceRegistry};

use super::Ps;

/// Behaviour of an application module. `tick` runs once per edge of the
/// module's clock and returns whether the module made progress.
pub trait Module: Send {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool;

    /// No further transactions will be sent by this module.
    fn is_done(&self) -> bool {
        true
    }
}

/// A module as declared by a workload: name, port names and behaviour.
pub struct ModuleDecl {
    pub name: String,
    pub ports: Vec<String>,
    pub behavior: Box<dyn Module>,
}

/// Module and port indices, fixed before behaviours are constructed.
#[derive(Debug, Clone, Default)]
pub struct Directory {
    modules: Vec<(String, Vec<String>)>,
    index: BTreeMap<String, usize>,
}

impl Directory {
    pub fn new<I, S>(modules: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<String>)>,
        S: Into<String>,
    {
        let modules: Vec<(String, Vec<String>)> = modules.into_iter().map(|(n, p)| (n.into(), p)).collect();
        let index = modules.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
        Directory { modules, index }
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.modules.iter().map(|(n, p)| (n.as_str(), p.as_slice()))
    }

    pub fn port(&self, module: &str, port: &str) -> Option<PortRef> {
        let m = *self.index.get(module)?;
        let p = self.modules[m].1.iter().position(|x| x == port)?;
        Some(PortRef::new(m, p))
    }

    pub fn label(&self, p: PortRef) -> String {
        let (m, ports) = &self.modules[p.module as usize];
        format!("{m}.{}", ports[p.port as usize])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutMessage {
    pub kind: TransactionKind,
    pub dest: PortRef,
    pub data: Vec<u8>,
    pub meta: TxMeta,
    /// Thread tag used for per-thread completion reports.
    pub thread: Option<u32>,
}

impl OutMessage {
    pub fn new(kind: TransactionKind, dest: PortRef, data: Vec<u8>) -> Self {
        OutMessage { kind, dest, data, meta: TxMeta::default(), thread: None }
    }

    pub fn with_meta(mut self, meta: TxMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_thread(mut self, thread: u32) -> Self {
        self.thread = Some(thread);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SendError {
    #[error("adapter input buffer is full")]
    Full,
    #[error("destination {0:?} is not reachable from the sending port's NoC")]
    Unroutable(PortRef),
    #[error("payload of {len} bytes exceeds the {max}-byte limit")]
    Oversized { len: usize, max: usize },
}

/// Bookkeeping shared by all modules: transaction ids, payload digests and
/// telemetry.
#[derive(Debug, Clone, Default)]
pub struct Scoreboard {
    next_id: u64,
    pub telemetry: TraceRegistry,
    pub sent: BTreeMap<u64, [u8; 32]>,
    pub received: BTreeMap<u64, [u8; 32]>,
    pub mismatches: Vec<u64>,
    receipt_times: BTreeMap<u64, Ps>,
    labels: BTreeMap<PortRef, String>,
    max_bytes: usize,
}

impl Scoreboard {
    pub(crate) fn new(telemetry: TraceRegistry, labels: BTreeMap<PortRef, String>, max_bytes: usize) -> Self {
        Scoreboard { next_id: 0, telemetry, sent: BTreeMap::new(), received: BTreeMap::new(), mismatches: Vec::new(), receipt_times: BTreeMap::new(), labels, max_bytes }
    }

    pub fn outstanding(&self) -> usize {
        self.sent.len() - self.received.len()
    }

    pub(crate) fn stamp(&mut self, id: u64, stage: Stage, time: Ps) {
        if self.telemetry.is_registered(stage) {
            self.telemetry.record(id, stage, time).unwrap_or_else(|e| panic!("simulator invariant violated: {e}"));
        }
    }

    fn receive(&mut self, t: &Transaction, now: Ps) {
        let digest = payload_digest(&t.data);
        if self.sent.get(&t.id) != Some(&digest) {
            self.mismatches.push(t.id);
        }
        if self.received.insert(t.id, digest).is_some() {
            panic!("simulator invariant violated: transaction {} received twice", t.id);
        }
        self.receipt_times.insert(t.id, now);
        self.stamp(t.id, Stage::Receipt, now);
    }

    /// Receipt time of transaction `id`, if it has been received.
    pub fn receipt_time(&self, id: u64) -> Option<Ps> {
        self.receipt_times.get(&id).copied()
    }
}

/// What a module sees during its tick.
pub struct ModuleCtx<'a> {
    pub(crate) now: Ps,
    pub(crate) cycle: u64,
    pub(crate) ports: &'a [usize],
    pub(crate) wires: &'a mut [InterfaceWires],
    pub(crate) endpoints: &'a EndpointTable,
    pub(crate) board: &'a mut Scoreboard,
}

impl ModuleCtx<'_> {
    pub fn now(&self) -> Ps {
        self.now
    }

    /// Index of the current edge of the module's clock, from 0.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn can_send(&mut self, port: usize) -> bool {
        self.wires[self.ports[port]].to_adapter.can_push(self.now)
    }

    /// Hands a transaction to the adapter; the id is returned on success.
    pub fn send(&mut self, port: usize, msg: OutMessage) -> Result<u64, SendError> {
        let wire = self.ports[port];
        let src = self.wires[wire].port;
        let src_noc = self.endpoints[&src].noc;
        match self.endpoints.get(&msg.dest) {
            Some(ep) if ep.noc == src_noc => {}
            _ => return Err(SendError::Unroutable(msg.dest)),
        }
        if msg.data.len() > self.board.max_bytes {
            return Err(SendError::Oversized { len: msg.data.len(), max: self.board.max_bytes });
        }
        if !self.wires[wire].to_adapter.can_push(self.now) {
            return Err(SendError::Full);
        }
        let id = self.board.next_id;
        self.board.next_id += 1;
        self.board.sent.insert(id, payload_digest(&msg.data));
        if self.board.telemetry.is_enabled() {
            let s = self.board.labels.get(&src).cloned().unwrap_or_default();
            let d = self.board.labels.get(&msg.dest).cloned().unwrap_or_default();
            self.board.telemetry.open(id, &s, &d, msg.thread);
        }
        self.board.stamp(id, Stage::Initiation, self.now);
        let t = Transaction { id, kind: msg.kind, src, dest: msg.dest, data: msg.data, meta: msg.meta };
        if self.wires[wire].to_adapter.push(self.now, t).is_err() {
            unreachable!("space checked above");
        }
        Ok(id)
    }

    pub fn peek(&self, port: usize) -> Option<&Transaction> {
        self.wires[self.ports[port]].to_module.peek(self.now)
    }

    pub fn recv(&mut self, port: usize) -> Option<Transaction> {
        let t = self.wires[self.ports[port]].to_module.pop(self.now)?;
        self.board.receive(&t, self.now);
        Some(t)
    }

    /// Whether transaction `id` was received on an earlier edge.
    pub fn delivered(&self, id: u64) -> bool {
        self.board.receipt_time(id).is_some_and(|t| t < self.now)
    }
}
