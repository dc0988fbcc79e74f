#![allow(dead_code)]

use std::path::PathBuf;

use radsim_core::adapter::{
    packetize, AsyncFifo, Depacketizer, Endpoint, EndpointTable, PacketFormat, PortRef, Transaction, TransactionKind,
    TxMeta, VcMapping,
};
use radsim_core::engine::{build_simulation, period_from_mhz, SimResult, StopCondition, Termination};
use radsim_core::noc::FlitCensus;
use radsim_core::telemetry::{counters_csv, traces_csv};
use radsim_core::config::{PlacementMap, RadArchitecture};
use radsim_core::workload::{RandomUniformSpec, WorkloadSpec};

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn read(name: &str) -> String {
    let p = scenario_dir().join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn load(arch: &str, place: &str, wkld: &str) -> (RadArchitecture, PlacementMap, WorkloadSpec) {
    let a = RadArchitecture::parse(&read(arch)).unwrap();
    let p = PlacementMap::parse(&read(place), &a).unwrap();
    let w = WorkloadSpec::parse(&read(wkld)).unwrap();
    (a, p, w)
}

/// Hop distance on a `dim_x`-wide mesh by breadth-first search over the
/// four neighbours; independent of the simulator's routing code.
pub fn bfs_hops(dim_x: usize, dim_y: usize, torus: bool, src: usize, dst: usize) -> usize {
    let n = dim_x * dim_y;
    let mut dist = vec![usize::MAX; n];
    let mut q = std::collections::VecDeque::from([src]);
    dist[src] = 0;
    while let Some(r) = q.pop_front() {
        let (x, y) = ((r % dim_x) as isize, (r / dim_x) as isize);
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (mut nx, mut ny) = (x + dx, y + dy);
            if torus {
                nx = nx.rem_euclid(dim_x as isize);
                ny = ny.rem_euclid(dim_y as isize);
            } else if nx < 0 || ny < 0 || nx >= dim_x as isize || ny >= dim_y as isize {
                continue;
            }
            let nr = ny as usize * dim_x + nx as usize;
            if dist[nr] == usize::MAX {
                dist[nr] = dist[r] + 1;
                q.push_back(nr);
            }
        }
    }
    dist[dst]
}

/// Packetizes `data` and reassembles it; returns the flit count.
pub fn roundtrip(data: Vec<u8>, width_bits: usize, kind: TransactionKind) -> Result<usize, String> {
    let src = PortRef::new(0, 0);
    let dest = PortRef::new(1, 0);
    let endpoints: EndpointTable = [
        (src, Endpoint { noc: 0, router: 0, interface: 0 }),
        (dest, Endpoint { noc: 0, router: 5, interface: 1 }),
    ]
    .into_iter()
    .collect();
    let mapping = VcMapping::default();
    let fmt = PacketFormat {
        noc: 0,
        src_router: 0,
        vc_mapping: &mapping,
        payload_width_bits: width_bits,
        max_transaction_bytes: 4096,
    };
    let meta = TxMeta { last: true, user: 0xdead_beef, address: 0x40 };
    let t = Transaction { id: 9, kind, src, dest, data, meta };
    let flits = packetize(&t, &endpoints, &fmt).map_err(|e| e.to_string())?;
    let n = flits.len();
    let want_flits = if t.data.is_empty() { 1 } else { 1 + (8 * t.data.len()).div_ceil(width_bits) };
    if n != want_flits {
        return Err(format!("{n} flits for {} bytes, expected {want_flits}", t.data.len()));
    }
    if flits.iter().any(|f| f.payload.len() * 8 != width_bits) {
        return Err("flit payload width differs from the configured width".into());
    }
    let mut d = Depacketizer::new(3);
    let mut out = None;
    for (i, f) in flits.into_iter().enumerate() {
        match d.push(f).map_err(|e| e.to_string())? {
            Some(got) if i + 1 == n => out = Some(got),
            Some(_) => return Err("transaction completed before the tail".into()),
            None => {}
        }
    }
    match out {
        Some(got) if got == t => Ok(n),
        Some(got) => Err(format!("reassembled transaction differs: {got:?}")),
        None => Err("no transaction after the tail".into()),
    }
}

/// Streams `k` tagged items through an async FIFO between two clocks and
/// checks that they arrive exactly once and in order.
pub fn cdc_lossless(write_mhz: u32, read_mhz: u32, depth: usize, k: u64) -> Result<(), String> {
    let pw = period_from_mhz(write_mhz).map_err(|e| e.to_string())?;
    let pr = period_from_mhz(read_mhz).map_err(|e| e.to_string())?;
    let mut fifo = AsyncFifo::new(depth);
    let (mut tw, mut tr) = (pw, pr);
    let (mut next, mut got) = (0u64, Vec::with_capacity(k as usize));
    let limit = (k + depth as u64 + 4) * pw.max(pr) * 4;
    while (got.len() as u64) < k {
        if tw.min(tr) > limit {
            return Err(format!("{write_mhz}->{read_mhz} MHz: only {} of {k} items crossed", got.len()));
        }
        // producer edge first on ties; the FIFO makes the order irrelevant
        if tw <= tr {
            if next < k && fifo.can_push(tw) {
                fifo.push(tw, next).map_err(|_| "push refused after can_push".to_string())?;
                next += 1;
            }
            tw += pw;
        } else {
            if let Some(v) = fifo.pop(tr) {
                got.push(v);
            }
            tr += pr;
        }
    }
    if got.iter().copied().eq(0..k) {
        Ok(())
    } else {
        Err(format!("{write_mhz}->{read_mhz} MHz: items lost, duplicated or reordered"))
    }
}

pub const CDC_FREQS: [u32; 7] = [200, 300, 600, 800, 1000, 1200, 1500];

/// Mesh (or torus) with `per_router` modules on every router, all running
/// random uniform traffic.
pub fn random_run(
    dim: usize,
    per_router: usize,
    torus: bool,
    rate: f64,
    duration: u64,
    seed: u64,
) -> (SimResult, FlitCensus) {
    let mut arch = RadArchitecture::single_mesh(dim, dim, 1000, 800).with_module_freq("*", 250);
    if torus {
        arch.apply_override("noc_topology=torus").unwrap();
    }
    arch.adapter.interfaces = per_router.max(1);
    let mut text = String::new();
    for s in 0..per_router {
        for r in 0..dim * dim {
            text.push_str(&format!("t{r}_{s}.io 0 {r}\n"));
        }
    }
    let place = PlacementMap::parse(&text, &arch).unwrap();
    let wl = WorkloadSpec::RandomUniform(RandomUniformSpec {
        injection_rate: rate,
        packet_bytes: 64,
        duration,
        kind: TransactionKind::Stream,
    });
    let mut sim = build_simulation(&arch, &place, &wl, seed).unwrap();
    let res = sim.run_until(StopCondition::AllReceived);
    let census = sim.census();
    (res, census)
}

/// Flit conservation, payload integrity and completion of a random run.
pub fn check_conservation(res: &SimResult, census: &FlitCensus) -> Result<(), String> {
    if res.termination != Termination::Completed {
        return Err(format!("ended with {:?}, {} outstanding", res.termination, res.outstanding()));
    }
    if census.injected != census.ejected || census.in_flight != 0 {
        return Err(format!("flit census {census:?}"));
    }
    if !res.mismatches.is_empty() || res.sent != res.received {
        return Err(format!("{} payload mismatches", res.mismatches.len()));
    }
    Ok(())
}

/// Weaker check for tori, where dimension-order routing without dateline
/// VCs can deadlock: nothing lost, duplicated or corrupted, whether or not
/// the run drained.
pub fn check_no_loss(res: &SimResult, census: &FlitCensus) -> Result<(), String> {
    if census.injected != census.ejected + census.in_flight {
        return Err(format!("flit census {census:?}"));
    }
    if !res.mismatches.is_empty() || res.received.keys().any(|id| !res.sent.contains_key(id)) {
        return Err(format!("{} payload mismatches", res.mismatches.len()));
    }
    Ok(())
}

/// CSV output of a run, for byte-level comparisons.
pub fn csv_pair(res: &SimResult) -> (String, String) {
    (traces_csv(&res.telemetry), counters_csv(&res.counters))
}
