use std::collections::BTreeMap;

use crate::adapter::{AdapterEvent, AdapterState, Endpoint, EndpointTable, InterfaceWires, PortRef};
use crate::config::{validate, PlacementMap, RadArchitecture};
use crate::noc::{FlitCensus, Network, NocEvent, NocParams, RouterId};
use crate::telemetry::{NocCounters, Stage, TraceRegistry};
use crate::workload::{instantiate, WorkloadSpec};

use super::module::{Module, ModuleCtx, ModuleDecl, Scoreboard};
use super::{ClockDomain, DomainId, EdgeScheduler, EngineError, Ps};

pub type ComponentId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Router { noc: usize, router: RouterId },
    Adapter { noc: usize, router: RouterId },
    Module(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCondition {
    /// Run until every module is done and every transaction was received.
    AllReceived,
    MaxTime(Ps),
    MaxCycles { domain: DomainId, cycles: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    DeadlineExceeded,
    DeadlockSuspected,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::DeadlineExceeded => "deadline_exceeded",
            Termination::DeadlockSuspected => "deadlock_suspected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub total_time: Ps,
    pub domains: Vec<ClockDomain>,
    pub cycles_per_domain: BTreeMap<DomainId, u64>,
    pub termination: Termination,
    pub telemetry: TraceRegistry,
    pub counters: Vec<NocCounters>,
    /// Digest of every sent payload, by transaction id.
    pub sent: BTreeMap<u64, [u8; 32]>,
    /// Digest of every received payload, by transaction id.
    pub received: BTreeMap<u64, [u8; 32]>,
    /// Received transactions whose payload differs from what was sent.
    pub mismatches: Vec<u64>,
    /// Arithmetic operations represented by the workload.
    pub ops: u64,
}

impl SimResult {
    pub fn outstanding(&self) -> usize {
        self.sent.len() - self.received.len()
    }
}

struct System {
    networks: Vec<Network>,
    adapters: Vec<Vec<AdapterState>>,
    wires: Vec<InterfaceWires>,
    endpoints: EndpointTable,
    board: Scoreboard,
}

pub struct Simulation {
    seed: u64,
    ops: u64,
    domains: Vec<ClockDomain>,
    scheduler: EdgeScheduler,
    components: Vec<(Component, DomainId)>,
    by_domain: Vec<Vec<ComponentId>>,
    noc0_domain: DomainId,
    quiescence: u64,
    idle_noc0_cycles: u64,
    progress: bool,
    sys: System,
    modules: Vec<Box<dyn Module>>,
    module_names: Vec<String>,
    module_ports: Vec<Vec<usize>>,
    fired: Vec<DomainId>,
    noc_events: Vec<NocEvent>,
    adapter_events: Vec<AdapterEvent>,
}

/// Parses nothing; instantiates the workload's modules and binds them.
pub fn build_simulation(
    arch: &RadArchitecture,
    placement: &PlacementMap,
    workload: &WorkloadSpec,
    seed: u64,
) -> Result<Simulation, EngineError> {
    let inst = instantiate(workload, arch, placement, seed)?;
    Simulation::new(arch, placement, inst.modules, inst.ops, seed)
}

impl Simulation {
    pub fn new(
        arch: &RadArchitecture,
        placement: &PlacementMap,
        modules: Vec<ModuleDecl>,
        ops: u64,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if arch.nocs.is_empty() {
            return Err(EngineError::InvalidArchitecture(vec!["architecture declares no NoC".into()]));
        }
        for n in &arch.nocs {
            if n.freq_mhz == 0 {
                return Err(EngineError::DomainMismatch("noc_freq must be positive".into()));
            }
        }
        if arch.adapter.freq_mhz == 0 {
            return Err(EngineError::DomainMismatch("adapter_freq must be positive".into()));
        }
        let mut module_freqs = Vec::with_capacity(modules.len());
        for m in &modules {
            for p in &m.ports {
                if placement.get(&m.name, p).is_none() {
                    return Err(EngineError::UnplacedPort { module: m.name.clone(), port: p.clone() });
                }
            }
            match arch.module_freq(&m.name) {
                Some(f) if f > 0 => module_freqs.push(f),
                _ => return Err(EngineError::DomainMismatch(format!("module `{}` has no module_freq", m.name))),
            }
        }
        let diags: Vec<String> = validate(arch, placement)
            .into_iter()
            .filter(|d| d != "placement is empty" || !modules.is_empty())
            .collect();
        if !diags.is_empty() {
            return Err(EngineError::InvalidArchitecture(diags));
        }

        // Clock domains, deduplicated by frequency in order of first use.
        let mut domains: Vec<ClockDomain> = Vec::new();
        let domain_of = |freq: u32, domains: &mut Vec<ClockDomain>| -> Result<DomainId, EngineError> {
            if let Some(d) = domains.iter().find(|d| d.freq_mhz == freq) {
                return Ok(d.id);
            }
            let d = ClockDomain::new(domains.len(), freq)?;
            domains.push(d);
            Ok(d.id)
        };
        let noc_domains: Vec<DomainId> =
            arch.nocs.iter().map(|n| domain_of(n.freq_mhz, &mut domains)).collect::<Result<_, _>>()?;
        let adapter_domain = domain_of(arch.adapter.freq_mhz, &mut domains)?;
        let module_domains: Vec<DomainId> =
            module_freqs.iter().map(|f| domain_of(*f, &mut domains)).collect::<Result<_, _>>()?;

        let mut networks = Vec::new();
        let mut adapters = Vec::new();
        for (i, n) in arch.nocs.iter().enumerate() {
            let params = NocParams {
                vcs: n.vcs,
                vc_buffer_size: n.vc_buffer_size,
                pipeline_depth: n.pipeline_depth,
                payload_width: n.payload_width,
                period_ps: domains[noc_domains[i]].period_ps,
                fifo_size: arch.adapter.fifo_size,
            };
            networks.push(Network::new(i, n.topology(), params));
            adapters.push(
                (0..n.num_routers()).map(|r| AdapterState::new(i, r, &arch.adapter, n.vcs, n.payload_width)).collect::<Vec<_>>(),
            );
        }

        // Interface wires in placement order; the order fixes interface ids.
        let index: BTreeMap<&str, usize> = modules.iter().enumerate().map(|(i, m)| (m.name.as_str(), i)).collect();
        let mut wires = Vec::new();
        let mut endpoints = EndpointTable::new();
        let mut labels = BTreeMap::new();
        let mut module_ports: Vec<Vec<usize>> = modules.iter().map(|m| vec![usize::MAX; m.ports.len()]).collect();
        for e in placement.entries() {
            let Some(&mi) = index.get(e.module.as_str()) else { continue };
            let Some(pi) = modules[mi].ports.iter().position(|p| *p == e.port) else { continue };
            let port = PortRef::new(mi, pi);
            let wire = wires.len();
            wires.push(InterfaceWires::new(port, arch.adapter.obuff_size));
            let interface = adapters[e.noc][e.router].attach(wire);
            endpoints.insert(port, Endpoint { noc: e.noc, router: e.router, interface });
            labels.insert(port, format!("{}.{}", e.module, e.port));
            module_ports[mi][pi] = wire;
        }

        let mut components = Vec::new();
        for (i, n) in arch.nocs.iter().enumerate() {
            for r in 0..n.num_routers() {
                components.push((Component::Router { noc: i, router: r }, noc_domains[i]));
            }
        }
        for (i, n) in arch.nocs.iter().enumerate() {
            for r in 0..n.num_routers() {
                components.push((Component::Adapter { noc: i, router: r }, adapter_domain));
            }
        }
        for (i, d) in module_domains.iter().enumerate() {
            components.push((Component::Module(i), *d));
        }
        let mut by_domain = vec![Vec::new(); domains.len()];
        for (id, (_, d)) in components.iter().enumerate() {
            by_domain[*d].push(id);
        }

        let telemetry = if arch.telemetry.num_traces == 0 {
            TraceRegistry::disabled()
        } else {
            TraceRegistry::from_names(&arch.telemetry.trace_names)
                .map_err(|e| EngineError::InvalidArchitecture(vec![e.to_string()]))?
        };
        let board = Scoreboard::new(telemetry, labels, arch.adapter.max_transaction_bytes);

        let module_names = modules.iter().map(|m| m.name.clone()).collect();
        let behaviors = modules.into_iter().map(|m| m.behavior).collect();
        Ok(Simulation {
            seed,
            ops,
            scheduler: EdgeScheduler::new(&domains),
            domains,
            components,
            by_domain,
            noc0_domain: noc_domains[0],
            quiescence: arch.quiescence_cycles,
            idle_noc0_cycles: 0,
            progress: false,
            sys: System { networks, adapters, wires, endpoints, board },
            modules: behaviors,
            module_names,
            module_ports,
            fired: Vec::new(),
            noc_events: Vec::new(),
            adapter_events: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn now(&self) -> Ps {
        self.scheduler.now()
    }

    pub fn domains(&self) -> &[ClockDomain] {
        &self.domains
    }

    pub fn components(&self) -> &[(Component, DomainId)] {
        &self.components
    }

    pub fn module_names(&self) -> &[String] {
        &self.module_names
    }

    pub fn networks(&self) -> &[Network] {
        &self.sys.networks
    }

    pub fn scoreboard(&self) -> &Scoreboard {
        &self.sys.board
    }

    pub fn cycles(&self, domain: DomainId) -> u64 {
        self.scheduler.cycles(domain)
    }

    pub fn census(&self) -> FlitCensus {
        let mut c = FlitCensus::default();
        for n in &self.sys.networks {
            let x = n.census();
            c.injected += x.injected;
            c.ejected += x.ejected;
            c.in_flight += x.in_flight;
        }
        c
    }

    /// Every module is done and every sent transaction was received.
    pub fn is_complete(&self) -> bool {
        self.sys.board.outstanding() == 0 && self.modules.iter().all(|m| m.is_done())
    }

    /// Advances to the next edge and returns the components that fired, in
    /// firing order.
    pub fn advance_tick(&mut self) -> Vec<ComponentId> {
        if self.step().is_none() {
            return Vec::new();
        }
        self.fired.iter().flat_map(|d| self.by_domain[*d].iter().copied()).collect()
    }

    fn step(&mut self) -> Option<Ps> {
        let mut fired = std::mem::take(&mut self.fired);
        let now = self.scheduler.advance(&mut fired)?;
        let moves_before: u64 = self.sys.networks.iter().map(Network::moves).sum();
        for &d in &fired {
            for i in 0..self.by_domain[d].len() {
                let (comp, _) = self.components[self.by_domain[d][i]];
                match comp {
                    Component::Router { noc, router } => self.tick_router(noc, router, now),
                    Component::Adapter { noc, router } => self.tick_adapter(noc, router, now),
                    Component::Module(m) => self.tick_module(m, d, now),
                }
            }
        }
        let moves_after: u64 = self.sys.networks.iter().map(Network::moves).sum();
        self.progress |= moves_after != moves_before;
        if fired.contains(&self.noc0_domain) {
            if self.progress {
                self.idle_noc0_cycles = 0;
            } else {
                self.idle_noc0_cycles += 1;
            }
            self.progress = false;
        }
        self.fired = fired;
        Some(now)
    }

    fn tick_router(&mut self, noc: usize, router: RouterId, now: Ps) {
        let net = &mut self.sys.networks[noc];
        net.router_cycle(router, now, &mut self.noc_events);
        for ev in self.noc_events.drain(..) {
            match ev {
                NocEvent::Injected { transaction_id, time } => {
                    self.sys.board.stamp(transaction_id, Stage::Injection, time);
                }
                NocEvent::Ejected { transaction_id, time, hops } => {
                    self.sys.board.stamp(transaction_id, Stage::Ejection, time);
                    self.sys.board.telemetry.set_hops(transaction_id, hops);
                }
            }
        }
    }

    fn tick_adapter(&mut self, noc: usize, router: RouterId, now: Ps) {
        let sys = &mut self.sys;
        let local = sys.networks[noc].local_port_mut(router);
        let moved =
            sys.adapters[noc][router].tick(now, &mut sys.wires, local, &sys.endpoints, &mut self.adapter_events);
        self.progress |= moved;
        for ev in self.adapter_events.drain(..) {
            match ev {
                AdapterEvent::Packetized { transaction_id, time } => {
                    sys.board.stamp(transaction_id, Stage::Packetization, time);
                }
                AdapterEvent::Depacketized { transaction_id, time, .. } => {
                    sys.board.stamp(transaction_id, Stage::Depacketization, time);
                }
            }
        }
    }

    fn tick_module(&mut self, m: usize, domain: DomainId, now: Ps) {
        let mut ctx = ModuleCtx {
            now,
            cycle: self.scheduler.cycles(domain) - 1,
            ports: &self.module_ports[m],
            wires: &mut self.sys.wires,
            endpoints: &self.sys.endpoints,
            board: &mut self.sys.board,
        };
        self.progress |= self.modules[m].tick(&mut ctx);
    }

    fn deadlocked(&self) -> bool {
        self.idle_noc0_cycles >= self.quiescence
    }

    pub fn run_until(&mut self, stop: StopCondition) -> SimResult {
        let termination = loop {
            if self.is_complete() {
                break Termination::Completed;
            }
            if self.deadlocked() {
                break Termination::DeadlockSuspected;
            }
            match stop {
                StopCondition::AllReceived => {}
                StopCondition::MaxTime(t) => {
                    if self.scheduler.next_time().is_none_or(|n| n > t) {
                        break Termination::DeadlineExceeded;
                    }
                }
                StopCondition::MaxCycles { domain, cycles } => {
                    if self.scheduler.cycles(domain) >= cycles {
                        break Termination::DeadlineExceeded;
                    }
                }
            }
            if self.step().is_none() {
                break Termination::DeadlineExceeded;
            }
        };
        self.result(termination)
    }

    fn result(&self, termination: Termination) -> SimResult {
        let b = &self.sys.board;
        SimResult {
            total_time: self.scheduler.now(),
            domains: self.domains.clone(),
            cycles_per_domain: self.domains.iter().map(|d| (d.id, self.scheduler.cycles(d.id))).collect(),
            termination,
            telemetry: b.telemetry.clone(),
            counters: self
                .sys
                .networks
                .iter()
                .map(|n| NocCounters { noc: n.id, routers: n.counters().to_vec() })
                .collect(),
            sent: b.sent.clone(),
            received: b.received.clone(),
            mismatches: b.mismatches.clone(),
            ops: self.ops,
        }
    }
}
