use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adapter::{PortRef, TransactionKind};
use crate::config::PlacementMap;
use crate::engine::{Directory, Module, ModuleCtx, ModuleDecl, OutMessage};

use super::spec::{LatencyProbeSpec, RandomUniformSpec};
use super::{placed_directory, Instance, WorkloadError};

/// Destinations of a latency probe in visiting order: the first port of
/// every router on the source's NoC (by router id), then every second
/// port, and so on. The source itself is skipped.
pub fn generate_latency_probe(
    spec: &LatencyProbeSpec,
    placement: &PlacementMap,
) -> Result<Vec<(String, String)>, WorkloadError> {
    let src = placement.get(&spec.source_module, &spec.source_port).ok_or_else(|| WorkloadError::UnplacedPort {
        module: spec.source_module.clone(),
        port: spec.source_port.clone(),
    })?;
    let mut by_router: BTreeMap<usize, Vec<(String, String)>> = BTreeMap::new();
    for e in placement.entries().iter().filter(|e| e.noc == src.noc) {
        by_router.entry(e.router).or_default().push((e.module.clone(), e.port.clone()));
    }
    let slots = by_router.values().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::new();
    for slot in 0..slots {
        for ports in by_router.values() {
            if let Some(p) = ports.get(slot) {
                if p.0 != spec.source_module || p.1 != spec.source_port {
                    out.push(p.clone());
                }
            }
        }
    }
    Ok(out)
}

fn probe_payload(k: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| (k.wrapping_mul(31) + i) as u8).collect()
}

/// Pops at most one transaction per port per cycle.
fn drain(ctx: &mut ModuleCtx<'_>, ports: &[bool]) -> bool {
    let mut any = false;
    for (p, &stalled) in ports.iter().enumerate() {
        if !stalled && ctx.recv(p).is_some() {
            any = true;
        }
    }
    any
}

/// Receives and discards transactions. Stalled ports never pop, so their
/// output buffers fill and back-pressure the network.
pub struct Sink {
    stalled: Vec<bool>,
}

impl Sink {
    pub fn new(ports: usize) -> Self {
        Sink { stalled: vec![false; ports] }
    }

    pub fn stalled(ports: usize) -> Self {
        Sink { stalled: vec![true; ports] }
    }
}

impl Module for Sink {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        drain(ctx, &self.stalled)
    }
}

/// Sends the probe sequence from one port; other ports act as sinks.
pub struct ProbeSource {
    port: usize,
    sinks: Vec<bool>,
    pending: VecDeque<PortRef>,
    kind: TransactionKind,
    bytes: usize,
    one_at_a_time: bool,
    sent: usize,
    last: Option<u64>,
}

impl ProbeSource {
    pub fn new(port: usize, ports: usize, dests: Vec<PortRef>, spec: &LatencyProbeSpec) -> Self {
        let pending = dests.into_iter().flat_map(|d| std::iter::repeat_n(d, spec.count)).collect();
        let mut sinks = vec![false; ports];
        sinks[port] = true;
        ProbeSource {
            port,
            sinks,
            pending,
            kind: spec.kind,
            bytes: spec.bytes,
            one_at_a_time: spec.one_at_a_time,
            sent: 0,
            last: None,
        }
    }
}

impl Module for ProbeSource {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = drain(ctx, &self.sinks);
        let blocked = self.one_at_a_time && self.last.is_some_and(|id| !ctx.delivered(id));
        if blocked {
            return progress;
        }
        if let Some(&dest) = self.pending.front() {
            if ctx.can_send(self.port) {
                let msg = OutMessage::new(self.kind, dest, probe_payload(self.sent, self.bytes));
                let id = ctx.send(self.port, msg).expect("probe destinations are placed on the source NoC");
                self.pending.pop_front();
                self.last = Some(id);
                self.sent += 1;
                progress = true;
            }
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.pending.is_empty()
    }
}

struct Injector {
    rng: ChaCha8Rng,
    dests: Vec<PortRef>,
    queue: VecDeque<OutMessage>,
}

/// Bernoulli injection on every port with uniformly chosen destinations
/// among the other ports on the same NoC. Also drains its ports.
pub struct RandomTraffic {
    ports: Vec<Injector>,
    sinks: Vec<bool>,
    rate: f64,
    bytes: usize,
    duration: u64,
    kind: TransactionKind,
    past_duration: bool,
}

impl RandomTraffic {
    /// `dests[p]` lists the destinations reachable from port `p`; `seeds[p]`
    /// seeds its generator.
    pub fn new(spec: &RandomUniformSpec, dests: Vec<Vec<PortRef>>, seeds: Vec<u64>) -> Self {
        let sinks = vec![false; dests.len()];
        let ports = dests
            .into_iter()
            .zip(seeds)
            .map(|(dests, s)| Injector { rng: ChaCha8Rng::seed_from_u64(s), dests, queue: VecDeque::new() })
            .collect();
        RandomTraffic {
            ports,
            sinks,
            rate: spec.injection_rate,
            bytes: spec.packet_bytes,
            duration: spec.duration,
            kind: spec.kind,
            past_duration: spec.duration == 0,
        }
    }
}

impl Module for RandomTraffic {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = drain(ctx, &self.sinks);
        let generating = ctx.cycle() < self.duration;
        self.past_duration = !generating;
        for (p, inj) in self.ports.iter_mut().enumerate() {
            if generating && !inj.dests.is_empty() && inj.rng.random_bool(self.rate) {
                let dest = inj.dests[inj.rng.random_range(0..inj.dests.len())];
                let mut data = vec![0u8; self.bytes];
                inj.rng.fill(&mut data[..]);
                inj.queue.push_back(OutMessage::new(self.kind, dest, data));
                progress = true;
            }
            if !inj.queue.is_empty() && ctx.can_send(p) {
                let msg = inj.queue.pop_front().expect("non-empty");
                ctx.send(p, msg).expect("random destinations share the source NoC");
                progress = true;
            }
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.ports.iter().all(|i| i.queue.is_empty()) && self.past_duration
    }
}

fn is_stalled(spec: &LatencyProbeSpec, module: &str) -> bool {
    spec.stalled.iter().any(|s| s == module)
}

pub(crate) fn instantiate_probe(spec: &LatencyProbeSpec, placement: &PlacementMap) -> Result<Instance, WorkloadError> {
    let dests = generate_latency_probe(spec, placement)?;
    let dir = placed_directory(placement);
    for s in &spec.stalled {
        if placement.kind(s).is_none() {
            return Err(WorkloadError::Invalid(format!("stalled module `{s}` is not placed")));
        }
    }
    let refs: Vec<PortRef> = dests.iter().map(|(m, p)| dir.port(m, p).expect("placed")).collect();
    let src = dir.port(&spec.source_module, &spec.source_port).expect("checked by generate_latency_probe");
    let mut refs = Some(refs);
    let modules = dir
        .modules()
        .enumerate()
        .map(|(i, (name, ports))| {
            let behavior: Box<dyn Module> = if i == src.module as usize {
                Box::new(ProbeSource::new(src.port as usize, ports.len(), refs.take().expect("one source"), spec))
            } else if is_stalled(spec, name) {
                Box::new(Sink::stalled(ports.len()))
            } else {
                Box::new(Sink::new(ports.len()))
            };
            ModuleDecl { name: name.to_string(), ports: ports.to_vec(), behavior }
        })
        .collect();
    Ok(Instance { modules, ops: 0 })
}

/// Mixes the run seed with a port index so every port draws an independent
/// stream.
fn port_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub(crate) fn instantiate_random(
    spec: &RandomUniformSpec,
    placement: &PlacementMap,
    seed: u64,
) -> Result<Instance, WorkloadError> {
    let dir: Directory = placed_directory(placement);
    let noc_of = |m: &str, p: &str| placement.get(m, p).expect("placed").noc;
    let all: Vec<(PortRef, usize)> = dir
        .modules()
        .flat_map(|(m, ports)| ports.iter().map(move |p| (m, p)))
        .map(|(m, p)| (dir.port(m, p).expect("placed"), noc_of(m, p)))
        .collect();
    let mut index = 0;
    let modules = dir
        .modules()
        .map(|(name, ports)| {
            let mut dests = Vec::new();
            let mut seeds = Vec::new();
            for p in ports {
                let me = dir.port(name, p).expect("placed");
                let noc = noc_of(name, p);
                dests.push(all.iter().filter(|(r, n)| *n == noc && *r != me).map(|(r, _)| *r).collect());
                seeds.push(port_seed(seed, index));
                index += 1;
            }
            let behavior: Box<dyn Module> = Box::new(RandomTraffic::new(spec, dests, seeds));
            ModuleDecl { name: name.to_string(), ports: ports.to_vec(), behavior }
        })
        .collect();
    Ok(Instance { modules, ops: 0 })
}
