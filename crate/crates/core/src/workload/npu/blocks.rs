use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use crate::adapter::{PortRef, TransactionKind, TxMeta};
use crate::config::{ModuleKind, PlacementMap, RadArchitecture};
use crate::engine::{Directory, Module, ModuleCtx, ModuleDecl, OutMessage};

use super::super::spec::NpuTraceSpec;
use super::super::WorkloadError;
use super::{mvu_cycles, out_chunks, LdDest, MvuMapping, NpuConfig, NpuInstruction, NpuMsg, NpuTag};

/// Every NPU block exposes a single port with this name.
pub const NPU_PORT: &str = "io";

/// Outbox length at which a block stops generating new work. Input is
/// always consumed so that no block waits on a message queued behind its
/// own output.
const OUTBOX_CAP: usize = 4;
/// Control messages carry only their tag.
const CONTROL_BYTES: usize = 8;

type Programs = Arc<Vec<Vec<NpuInstruction>>>;

fn tag(msg: NpuMsg, thread: u32, instr: u32, chunk: u32) -> NpuTag {
    NpuTag { msg, thread, instr, chunk }
}

/// Deterministic payload derived from the tag so digests differ per chunk.
fn payload(t: NpuTag, len: usize) -> Vec<u8> {
    let seed = t.pack().to_le_bytes();
    (0..len).map(|i| seed[i % 8] ^ (i / 8) as u8).collect()
}

fn message(dest: PortRef, t: NpuTag, len: usize) -> OutMessage {
    OutMessage::new(TransactionKind::Stream, dest, payload(t, len))
        .with_meta(TxMeta { last: true, user: t.pack(), address: 0 })
        .with_thread(t.thread)
}

/// Messages waiting to leave a block, each released on a given cycle.
#[derive(Default)]
struct Outbox {
    queue: VecDeque<(u64, OutMessage)>,
}

impl Outbox {
    fn push(&mut self, ready: u64, msg: OutMessage) {
        self.queue.push_back((ready, msg));
    }

    fn len(&self) -> usize {
        self.queue.len()
    }

    fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// Sends at most one ready message.
    fn flush(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        match self.queue.front() {
            Some((ready, _)) if *ready <= ctx.cycle() && ctx.can_send(0) => {
                let (_, msg) = self.queue.pop_front().expect("front exists");
                ctx.send(0, msg).expect("NPU destinations are validated at build time");
                true
            }
            _ => false,
        }
    }
}

fn recv_tag(ctx: &mut ModuleCtx<'_>) -> Option<(NpuTag, usize)> {
    let t = ctx.recv(0)?;
    let tag = NpuTag::unpack(t.meta.user).expect("NPU blocks exchange tagged transactions");
    Some((tag, t.data.len()))
}

struct Ports {
    disp: PortRef,
    cores: Vec<PortRef>,
    evrf: PortRef,
    mfu0: PortRef,
    mfu1: PortRef,
    ld: PortRef,
}

struct ThreadState {
    pc: usize,
    waiting: bool,
    tokens: usize,
    needed: usize,
}

struct Dispatcher {
    programs: Programs,
    cfg: NpuConfig,
    ports: Arc<Ports>,
    threads: Vec<ThreadState>,
    rr: usize,
    out: Outbox,
}

impl Dispatcher {
    fn tokens_for(&self, instr: &NpuInstruction) -> usize {
        match instr.ld {
            LdDest::Out | LdDest::Evrf => 1,
            LdDest::Mvu => self.cfg.cores,
        }
    }

    fn finished(&self, t: usize) -> bool {
        self.threads[t].pc >= self.programs[t].len()
    }
}

impl Module for Dispatcher {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = self.out.flush(ctx);
        if let Some((tag, _)) = recv_tag(ctx) {
            debug_assert_eq!(tag.msg, NpuMsg::Done);
            let th = &mut self.threads[tag.thread as usize];
            th.tokens += 1;
            if th.tokens == th.needed {
                th.pc += 1;
                th.waiting = false;
                th.tokens = 0;
            }
            progress = true;
        }
        if self.out.is_empty() {
            let n = self.threads.len();
            let pick = (0..n).map(|k| (self.rr + k) % n).find(|&t| !self.threads[t].waiting && !self.finished(t));
            if let Some(t) = pick {
                let i = self.threads[t].pc;
                let instr = &self.programs[t][i];
                let cycle = ctx.cycle();
                let issue = tag(NpuMsg::Issue, t as u32, i as u32, 0);
                if instr.mvu_skip {
                    self.out.push(cycle, message(self.ports.evrf, issue, CONTROL_BYTES));
                } else {
                    for (c, &core) in self.ports.cores.iter().enumerate() {
                        if self.cfg.core_rows(instr.m, c) > 0 {
                            self.out.push(cycle, message(core, issue, CONTROL_BYTES));
                        }
                    }
                }
                let needed = self.tokens_for(instr);
                self.threads[t] = ThreadState { pc: i, waiting: true, tokens: 0, needed };
                self.rr = (t + 1) % n;
                progress = true;
            }
        }
        progress
    }

    fn is_done(&self) -> bool {
        (0..self.threads.len()).all(|t| self.finished(t)) && self.out.is_empty()
    }
}

struct Job {
    thread: u32,
    instr: u32,
    rows: usize,
    chunks: usize,
    steps: u64,
    next: usize,
}

struct MvuCore {
    core: usize,
    programs: Programs,
    cfg: NpuConfig,
    ports: Arc<Ports>,
    jobs: VecDeque<Job>,
    work: u64,
    writebacks: BTreeMap<(u32, u32), usize>,
    out: Outbox,
}

impl Module for MvuCore {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = self.out.flush(ctx);
        let cycle = ctx.cycle();
        if let Some((tag, _)) = recv_tag(ctx) {
            let instr = &self.programs[tag.thread as usize][tag.instr as usize];
            match tag.msg {
                NpuMsg::Issue => {
                    let rows = self.cfg.core_rows(instr.m, self.core);
                    self.jobs.push_back(Job {
                        thread: tag.thread,
                        instr: tag.instr,
                        rows,
                        chunks: rows.div_ceil(self.cfg.chunk_rows()),
                        steps: instr.n.div_ceil(self.cfg.tiles * self.cfg.lanes) as u64,
                        next: 0,
                    });
                }
                NpuMsg::Writeback => {
                    let key = (tag.thread, tag.instr);
                    let got = self.writebacks.entry(key).or_insert(0);
                    *got += 1;
                    if *got == out_chunks(instr, &self.cfg) {
                        self.writebacks.remove(&key);
                        let done = tag_done(tag);
                        self.out.push(cycle, message(self.ports.disp, done, CONTROL_BYTES));
                    }
                }
                other => panic!("MVU core received unexpected {other:?}"),
            }
            progress = true;
        }
        if let Some(job) = self.jobs.front_mut() {
            if self.out.len() < OUTBOX_CAP {
                self.work += 1;
                progress = true;
            }
            let fill = self.cfg.latency.mvu_fill;
            if self.work >= fill + (job.next as u64 + 1) * job.steps && self.out.len() < OUTBOX_CAP {
                let dc = self.cfg.chunk_rows();
                let rows = (job.rows - job.next * dc).min(dc);
                let chunk_id = (self.core << 16 | job.next) as u32;
                let t = tag(NpuMsg::Data, job.thread, job.instr, chunk_id);
                self.out.push(cycle, message(self.ports.evrf, t, rows * self.cfg.elem_bits / 8));
                job.next += 1;
                if job.next == job.chunks {
                    self.jobs.pop_front();
                    self.work = 0;
                }
            }
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.jobs.is_empty() && self.out.is_empty()
    }
}

fn tag_done(t: NpuTag) -> NpuTag {
    tag(NpuMsg::Done, t.thread, t.instr, 0)
}

/// Chunks a skipped-MVU instruction still has to source from the eVRF.
struct Source {
    thread: u32,
    instr: u32,
    m: usize,
    next: usize,
}

struct Evrf {
    programs: Programs,
    cfg: NpuConfig,
    ports: Arc<Ports>,
    sourcing: VecDeque<Source>,
    writebacks: BTreeMap<(u32, u32), usize>,
    out: Outbox,
}

impl Module for Evrf {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = self.out.flush(ctx);
        let cycle = ctx.cycle();
        let lat = self.cfg.latency.evrf;
        let cap = OUTBOX_CAP + lat as usize;
        if let Some((tag, len)) = recv_tag(ctx) {
            let instr = &self.programs[tag.thread as usize][tag.instr as usize];
            match tag.msg {
                NpuMsg::Data => self.out.push(cycle + lat, message(self.ports.mfu0, tag, len)),
                NpuMsg::Issue => {
                    self.sourcing.push_back(Source { thread: tag.thread, instr: tag.instr, m: instr.m, next: 0 })
                }
                NpuMsg::Writeback => {
                    let key = (tag.thread, tag.instr);
                    let got = self.writebacks.entry(key).or_insert(0);
                    *got += 1;
                    if *got == out_chunks(instr, &self.cfg) {
                        self.writebacks.remove(&key);
                        self.out.push(cycle, message(self.ports.disp, tag_done(tag), CONTROL_BYTES));
                    }
                }
                NpuMsg::Done => panic!("eVRF received unexpected Done"),
            }
            progress = true;
        }
        if self.out.len() < cap {
            if let Some(src) = self.sourcing.front_mut() {
                let dc = self.cfg.chunk_rows();
                let rows = (src.m - src.next * dc).min(dc);
                let t = tag(NpuMsg::Data, src.thread, src.instr, src.next as u32);
                self.out.push(cycle + lat, message(self.ports.mfu0, t, rows * self.cfg.elem_bits / 8));
                src.next += 1;
                if src.next * dc >= src.m {
                    self.sourcing.pop_front();
                }
                progress = true;
            }
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.sourcing.is_empty() && self.out.is_empty()
    }
}

/// Fixed-latency pipeline that forwards data chunks to the next block.
struct Mfu {
    next: PortRef,
    latency: u64,
    out: Outbox,
}

impl Module for Mfu {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = self.out.flush(ctx);
        if let Some((tag, len)) = recv_tag(ctx) {
            debug_assert_eq!(tag.msg, NpuMsg::Data);
            let ready = ctx.cycle() + self.latency;
            self.out.push(ready, message(self.next, tag, len));
            progress = true;
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.out.is_empty()
    }
}

struct Ld {
    programs: Programs,
    cfg: NpuConfig,
    ports: Arc<Ports>,
    received: BTreeMap<(u32, u32), usize>,
    out: Outbox,
}

impl Module for Ld {
    fn tick(&mut self, ctx: &mut ModuleCtx<'_>) -> bool {
        let mut progress = self.out.flush(ctx);
        let lat = self.cfg.latency.ld;
        if let Some((tag, len)) = recv_tag(ctx) {
            debug_assert_eq!(tag.msg, NpuMsg::Data);
            let ready = ctx.cycle() + lat;
            let instr = &self.programs[tag.thread as usize][tag.instr as usize];
            let wb = NpuTag { msg: NpuMsg::Writeback, ..tag };
            match instr.ld {
                LdDest::Out => {
                    let key = (tag.thread, tag.instr);
                    let got = self.received.entry(key).or_insert(0);
                    *got += 1;
                    if *got == out_chunks(instr, &self.cfg) {
                        self.received.remove(&key);
                        self.out.push(ready, message(self.ports.disp, tag_done(tag), CONTROL_BYTES));
                    }
                }
                LdDest::Evrf => self.out.push(ready, message(self.ports.evrf, wb, len)),
                LdDest::Mvu => {
                    for &core in &self.ports.cores {
                        self.out.push(ready, message(core, wb, len));
                    }
                }
            }
            progress = true;
        }
        progress
    }

    fn is_done(&self) -> bool {
        self.out.is_empty()
    }
}

fn block_names(k: usize, cores: usize) -> Vec<String> {
    let mut names = vec![format!("npu{k}_disp")];
    names.extend((0..cores).map(|c| format!("npu{k}_mvu{c}")));
    names.extend(["evrf", "mfu0", "mfu1", "ld"].iter().map(|b| format!("npu{k}_{b}")));
    names
}

/// Creates the modules of `spec.npus` NPUs. Every block must be placed;
/// MVU cores must match the requested mapping and all other blocks are soft.
pub fn build_npu(
    spec: &NpuTraceSpec,
    _arch: &RadArchitecture,
    placement: &PlacementMap,
) -> Result<Vec<ModuleDecl>, WorkloadError> {
    let cfg = spec.cfg;
    if spec.programs.len() != cfg.threads {
        return Err(WorkloadError::Invalid(format!(
            "{} thread programs for threads = {}",
            spec.programs.len(),
            cfg.threads
        )));
    }
    if cfg.threads > 256 {
        return Err(WorkloadError::Invalid("at most 256 threads are supported".into()));
    }
    for prog in &spec.programs {
        if prog.len() >= 1 << 20 {
            return Err(WorkloadError::Invalid("thread program longer than 2^20 instructions".into()));
        }
        for instr in prog {
            mvu_cycles(instr, &cfg)?;
        }
    }
    let want_mvu = match spec.mapping {
        MvuMapping::Soft => ModuleKind::Soft,
        MvuMapping::Hard => ModuleKind::Hard,
    };
    let mut all_names = Vec::new();
    for k in 0..spec.npus {
        for name in block_names(k, cfg.cores) {
            let entry = placement.get(&name, NPU_PORT);
            if entry.is_none() {
                return Err(WorkloadError::UnplacedPort { module: name, port: NPU_PORT.into() });
            }
            let found = placement.kind(&name).unwrap_or_default();
            let expected = if name.contains("_mvu") { want_mvu } else { ModuleKind::Soft };
            if found != expected {
                return Err(WorkloadError::KindMismatch { module: name, expected, found });
            }
            all_names.push(name);
        }
    }
    let dir = Directory::new(all_names.iter().map(|n| (n.clone(), vec![NPU_PORT.to_string()])));
    let at = |n: String| dir.port(&n, NPU_PORT).expect("declared above");
    let programs: Programs = Arc::new(spec.programs.clone());
    let mut modules = Vec::with_capacity(all_names.len());
    let mut names = all_names.into_iter();
    for k in 0..spec.npus {
        let ports = Arc::new(Ports {
            disp: at(format!("npu{k}_disp")),
            cores: (0..cfg.cores).map(|c| at(format!("npu{k}_mvu{c}"))).collect(),
            evrf: at(format!("npu{k}_evrf")),
            mfu0: at(format!("npu{k}_mfu0")),
            mfu1: at(format!("npu{k}_mfu1")),
            ld: at(format!("npu{k}_ld")),
        });
        let mut decl = |behavior: Box<dyn Module>| {
            let name = names.next().expect("one name per block");
            modules.push(ModuleDecl { name, ports: vec![NPU_PORT.to_string()], behavior });
        };
        decl(Box::new(Dispatcher {
            programs: programs.clone(),
            cfg,
            ports: ports.clone(),
            threads: (0..cfg.threads).map(|_| ThreadState { pc: 0, waiting: false, tokens: 0, needed: 0 }).collect(),
            rr: 0,
            out: Outbox::default(),
        }));
        for core in 0..cfg.cores {
            decl(Box::new(MvuCore {
                core,
                programs: programs.clone(),
                cfg,
                ports: ports.clone(),
                jobs: VecDeque::new(),
                work: 0,
                writebacks: BTreeMap::new(),
                out: Outbox::default(),
            }));
        }
        decl(Box::new(Evrf {
            programs: programs.clone(),
            cfg,
            ports: ports.clone(),
            sourcing: VecDeque::new(),
            writebacks: BTreeMap::new(),
            out: Outbox::default(),
        }));
        decl(Box::new(Mfu { next: ports.mfu1, latency: cfg.latency.mfu, out: Outbox::default() }));
        decl(Box::new(Mfu { next: ports.ld, latency: cfg.latency.mfu, out: Outbox::default() }));
        decl(Box::new(Ld {
            programs: programs.clone(),
            cfg,
            ports: ports.clone(),
            received: BTreeMap::new(),
            out: Outbox::default(),
        }));
    }
    Ok(modules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_names_per_npu() {
        assert_eq!(
            block_names(1, 2),
            ["npu1_disp", "npu1_mvu0", "npu1_mvu1", "npu1_evrf", "npu1_mfu0", "npu1_mfu1", "npu1_ld"]
        );
    }

    #[test]
    fn payload_differs_per_chunk() {
        let a = payload(tag(NpuMsg::Data, 0, 0, 0), 80);
        let b = payload(tag(NpuMsg::Data, 0, 0, 1), 80);
        assert_eq!(a.len(), 80);
        assert_ne!(a, b);
    }
}
