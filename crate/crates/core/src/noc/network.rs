//! One NoC instance: routers, the buffers between them and the local ports
//! shared with the adapters.

use crate::adapter::AsyncFifo;
use crate::engine::Ps;
use crate::telemetry::PortCounters;

use super::flit::Flit;
use super::router::{round_robin_pick, RouterState};
use super::topology::{
    minimal_adaptive_next_hop, next_hop_dimension_order, NocTopology, Port, RouterId, RoutingFunc, NUM_PORTS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NocParams {
    pub vcs: usize,
    pub vc_buffer_size: usize,
    pub pipeline_depth: u32,
    pub payload_width: usize,
    pub period_ps: Ps,
    pub fifo_size: usize,
}

/// Adapter-facing side of a router's local port.
#[derive(Debug, Clone)]
pub struct LocalPort {
    /// Adapter -> router, flit granularity.
    pub injection: AsyncFifo<Flit>,
    /// Router -> adapter, one FIFO per VC.
    pub ejection: Vec<AsyncFifo<Flit>>,
}

impl LocalPort {
    fn new(vcs: usize, depth: usize) -> Self {
        LocalPort { injection: AsyncFifo::new(depth), ejection: (0..vcs).map(|_| AsyncFifo::new(depth)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NocEvent {
    /// Head flit entered the source router.
    Injected { transaction_id: u64, time: Ps },
    /// Tail flit left the destination router.
    Ejected { transaction_id: u64, time: Ps, hops: u32 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlitCensus {
    pub injected: u64,
    pub ejected: u64,
    pub in_flight: u64,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub id: usize,
    pub topo: NocTopology,
    pub params: NocParams,
    routers: Vec<RouterState>,
    /// `[router][port * vcs + vc]`
    buffers: Vec<Vec<AsyncFifo<Flit>>>,
    /// Credits travelling back to `[router][output port]`; the value is the VC.
    credit_wires: Vec<Vec<AsyncFifo<usize>>>,
    local: Vec<LocalPort>,
    buffered: Vec<usize>,
    counters: Vec<[PortCounters; NUM_PORTS]>,
    injected: u64,
    ejected: u64,
    moves: u64,
    // scratch
    va_req: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(id: usize, topo: NocTopology, params: NocParams) -> Self {
        let n = topo.num_routers();
        let slots = NUM_PORTS * params.vcs;
        Network {
            id,
            topo,
            params,
            routers: (0..n).map(|r| RouterState::new(r, params.vcs, params.vc_buffer_size)).collect(),
            buffers: (0..n).map(|_| (0..slots).map(|_| AsyncFifo::new(params.vc_buffer_size)).collect()).collect(),
            // at most vcs * depth credits are outstanding; the slack covers slots
            // freed on the current edge that the sender cannot see yet
            credit_wires: (0..n)
                .map(|_| (0..NUM_PORTS).map(|_| AsyncFifo::new(2 * params.vcs * params.vc_buffer_size)).collect())
                .collect(),
            local: (0..n).map(|_| LocalPort::new(params.vcs, params.fifo_size)).collect(),
            buffered: vec![0; n],
            counters: vec![[PortCounters::default(); NUM_PORTS]; n],
            injected: 0,
            ejected: 0,
            moves: 0,
            va_req: vec![Vec::new(); slots],
        }
    }

    pub fn num_routers(&self) -> usize {
        self.routers.len()
    }

    pub fn router(&self, r: RouterId) -> &RouterState {
        &self.routers[r]
    }

    pub fn local_port(&self, r: RouterId) -> &LocalPort {
        &self.local[r]
    }

    pub fn local_port_mut(&mut self, r: RouterId) -> &mut LocalPort {
        &mut self.local[r]
    }

    pub fn counters(&self) -> &[[PortCounters; NUM_PORTS]] {
        &self.counters
    }

    /// Flit movements so far (injections, hops, ejections).
    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn census(&self) -> FlitCensus {
        FlitCensus {
            injected: self.injected,
            ejected: self.ejected,
            in_flight: self.buffered.iter().map(|&b| b as u64).sum(),
        }
    }

    pub fn buffered_flits(&self, r: RouterId) -> usize {
        self.buffered[r]
    }

    /// Number of flits inside routers plus flits queued at local ports.
    pub fn is_idle(&self) -> bool {
        self.buffered.iter().all(|&b| b == 0)
            && self.local.iter().all(|l| l.injection.is_empty() && l.ejection.iter().all(|f| f.is_empty()))
    }

    fn route(&self, r: RouterId, dest: RouterId, vc: usize) -> Port {
        let result = match self.topo.routing {
            RoutingFunc::DimensionOrder => next_hop_dimension_order(r, dest, &self.topo),
            RoutingFunc::MinimalAdaptive => {
                let router = &self.routers[r];
                let mut free = [0usize; NUM_PORTS];
                for p in Port::ALL {
                    if p != Port::Local {
                        free[p.index()] = router.credits(p, vc);
                    }
                }
                minimal_adaptive_next_hop(r, dest, &self.topo, &free)
            }
        };
        result.expect("head flit carries a validated destination router")
    }

    /// Advances router `r` by one NoC cycle at time `now`.
    pub fn router_cycle(&mut self, r: RouterId, now: Ps, events: &mut Vec<NocEvent>) {
        let vcs = self.params.vcs;
        if self.buffered[r] == 0 && self.local[r].injection.is_empty() {
            return;
        }

        // Apply returned credits.
        for p in 1..NUM_PORTS {
            while let Some(vc) = self.credit_wires[r][p].pop(now) {
                self.routers[r]
                    .credit_return(Port::from_index(p), vc)
                    .unwrap_or_else(|e| panic!("simulator invariant violated: {e}"));
            }
        }

        // Injection from the adapter, one flit per cycle.
        if let Some(vc) = self.local[r].injection.peek(now).map(|f| f.vc) {
            let slot = Port::Local.index() * vcs + vc;
            if self.buffers[r][slot].can_push(now) {
                let flit = self.local[r].injection.pop(now).expect("peeked");
                if flit.is_head() {
                    events.push(NocEvent::Injected { transaction_id: flit.transaction_id, time: now });
                }
                self.push_buffer(r, slot, now, flit);
                self.injected += 1;
                self.moves += 1;
            }
        }

        let period = self.params.period_ps;
        let hop_delay = self.params.pipeline_depth as Ps * period;
        let slots = NUM_PORTS * vcs;

        // Route computation and VC allocation for eligible head flits.
        let mut any_va = false;
        for s in 0..slots {
            let Some(tw) = self.buffers[r][s].peek_time(now) else { continue };
            let state = self.routers[r].inputs[s];
            if state.out_vc.is_some() {
                continue;
            }
            let flit = self.buffers[r][s].peek(now).expect("visible");
            let Some(dest) = flit.header.as_ref().map(|h| h.dest_router) else {
                panic!("simulator invariant violated: body flit at front of unallocated VC");
            };
            let route = match state.route {
                Some(p) => p,
                None => {
                    let p = self.route(r, dest, s % vcs);
                    self.routers[r].inputs[s].route = Some(p);
                    p
                }
            };
            let delay = if route == Port::Local { period } else { hop_delay };
            if now < tw + delay {
                continue;
            }
            // VCs keep their class across hops.
            let out_slot = route.index() * vcs + s % vcs;
            if self.routers[r].claims[out_slot].is_none() {
                self.va_req[out_slot].push(s);
                any_va = true;
            }
        }
        if any_va {
            for out_slot in 0..slots {
                if self.va_req[out_slot].is_empty() {
                    continue;
                }
                let router = &mut self.routers[r];
                let winner = round_robin_pick(&self.va_req[out_slot], router.va_next[out_slot]).expect("non-empty");
                router.claims[out_slot] = Some(winner);
                router.inputs[winner].out_vc = Some(out_slot % vcs);
                router.va_next[out_slot] = winner + 1;
                self.va_req[out_slot].clear();
            }
        }

        // Switch allocation: one flit per output port and per input port.
        let mut requests: [u64; NUM_PORTS] = [0; NUM_PORTS];
        let mut stalled = [false; NUM_PORTS];
        for s in 0..slots {
            let Some(tw) = self.buffers[r][s].peek_time(now) else { continue };
            let state = self.routers[r].inputs[s];
            let (Some(route), Some(ovc)) = (state.route, state.out_vc) else { continue };
            let delay = if route == Port::Local { period } else { hop_delay };
            if now < tw + delay {
                continue;
            }
            let has_space = if route == Port::Local {
                self.local[r].ejection[ovc].can_push(now)
            } else {
                self.routers[r].credits(route, ovc) > 0
            };
            if has_space {
                requests[route.index()] |= 1 << s;
            } else {
                stalled[route.index()] = true;
            }
        }
        for (p, stall) in stalled.iter().enumerate() {
            if *stall {
                self.counters[r][p].credit_stall_cycles += 1;
            }
        }
        let mut used_inputs: u64 = 0;
        let mut grants: [Option<usize>; NUM_PORTS] = [None; NUM_PORTS];
        for p in 0..NUM_PORTS {
            let mut req = requests[p];
            if req == 0 {
                continue;
            }
            // mask out input ports already granted
            for s in 0..slots {
                if req & (1 << s) != 0 && used_inputs & (1 << (s / vcs)) != 0 {
                    req &= !(1 << s);
                }
            }
            if req == 0 {
                continue;
            }
            let next = self.routers[r].sa_next[p] % slots;
            let mut pick = None;
            for k in 0..slots {
                let s = (next + k) % slots;
                if req & (1 << s) != 0 {
                    pick = Some(s);
                    break;
                }
            }
            let s = pick.expect("non-empty request");
            used_inputs |= 1 << (s / vcs);
            self.routers[r].sa_next[p] = s + 1;
            grants[p] = Some(s);
        }

        // Switch and link traversal.
        for (p, grant) in grants.iter().enumerate() {
            let Some(s) = *grant else { continue };
            self.traverse(r, s, Port::from_index(p), now, events);
        }
    }

    fn push_buffer(&mut self, r: RouterId, slot: usize, now: Ps, flit: Flit) {
        let fifo = &mut self.buffers[r][slot];
        if fifo.push(now, flit).is_err() {
            panic!("simulator invariant violated: router {r} buffer {slot} overflow");
        }
        let occ = fifo.len() as u64;
        let port = slot / self.params.vcs;
        let c = &mut self.counters[r][port];
        c.peak_vc_occupancy = c.peak_vc_occupancy.max(occ);
        self.buffered[r] += 1;
    }

    fn traverse(&mut self, r: RouterId, s: usize, out: Port, now: Ps, events: &mut Vec<NocEvent>) {
        let vcs = self.params.vcs;
        let mut flit = self.buffers[r][s].pop(now).expect("granted flit is visible");
        self.buffered[r] -= 1;
        self.moves += 1;
        let in_port = Port::from_index(s / vcs);
        let in_vc = s % vcs;
        if in_port != Port::Local {
            let up = self.topo.neighbor(r, in_port).expect("input link exists");
            let wire = &mut self.credit_wires[up][in_port.opposite().index()];
            if wire.push(now, in_vc).is_err() {
                panic!("simulator invariant violated: credit wire overflow");
            }
        }
        let state = self.routers[r].inputs[s];
        let ovc = state.out_vc.expect("allocated");
        let tail = flit.is_tail();
        self.counters[r][out.index()].flits_forwarded += 1;
        flit.vc = ovc;
        if out == Port::Local {
            let id = flit.transaction_id;
            let hops = flit.hops;
            if self.local[r].ejection[ovc].push(now, flit).is_err() {
                panic!("simulator invariant violated: ejection fifo overflow");
            }
            self.ejected += 1;
            if tail {
                events.push(NocEvent::Ejected { transaction_id: id, time: now, hops });
            }
        } else {
            let down = self.topo.neighbor(r, out).expect("route follows an existing link");
            self.routers[r].consume_credit(out, ovc);
            flit.hops += 1;
            let slot = out.opposite().index() * vcs + ovc;
            self.push_buffer(down, slot, now, flit);
        }
        if tail {
            let out_slot = out.index() * vcs + ovc;
            self.routers[r].claims[out_slot] = None;
            self.routers[r].inputs[s] = Default::default();
        }
    }
}
