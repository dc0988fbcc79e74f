//! NPU overlay model.
//!
//! Each NPU is a dispatcher plus five chained blocks: MVU (split across
//! `cores` modules), eVRF, two MFUs and LD. Blocks talk only through stream
//! transactions over the NoC. A data chunk holds `D * C` vector elements.
//!
//! MVU timing follows the reference model
//! `ceil(rows / (D*C)) * ceil(N / (T*L)) + fill` module cycles, where `rows`
//! is the share of the M output rows given to one core.

mod blocks;

use std::fmt;

pub use blocks::{build_npu, NPU_PORT};

use super::spec::NpuTraceSpec;
use super::WorkloadError;

/// Per-block pipeline latencies in module cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLatency {
    pub mvu_fill: u64,
    pub evrf: u64,
    pub mfu: u64,
    pub ld: u64,
}

impl Default for BlockLatency {
    fn default() -> Self {
        BlockLatency { mvu_fill: 12, evrf: 2, mfu: 6, ld: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NpuConfig {
    pub cores: usize,
    /// T
    pub tiles: usize,
    /// D
    pub dpe_sets: usize,
    /// C
    pub dpes_per_set: usize,
    /// L
    pub lanes: usize,
    pub threads: usize,
    /// Register-file words per tile lane.
    pub rf_depth: usize,
    pub elem_bits: usize,
    pub latency: BlockLatency,
}

impl Default for NpuConfig {
    /// 2 cores, 7 tiles, 40 DPEs (4 sets of 10) and 40 lanes.
    fn default() -> Self {
        NpuConfig {
            cores: 2,
            tiles: 7,
            dpe_sets: 4,
            dpes_per_set: 10,
            lanes: 40,
            threads: 1,
            rf_depth: 512,
            elem_bits: 16,
            latency: BlockLatency::default(),
        }
    }
}

impl NpuConfig {
    /// Output rows produced per MVU step: D * C.
    pub fn chunk_rows(&self) -> usize {
        self.dpe_sets * self.dpes_per_set
    }

    pub fn chunk_bytes(&self) -> usize {
        self.chunk_rows() * self.elem_bits / 8
    }

    pub fn peak_macs_per_cycle(&self) -> u64 {
        (self.cores * self.tiles * self.dpe_sets * self.dpes_per_set * self.lanes) as u64
    }

    /// Peak TOPS with the MVU clocked at `mvu_mhz`; a MAC counts as 2 ops.
    pub fn peak_tops(&self, mvu_mhz: u32) -> f64 {
        2.0 * self.peak_macs_per_cycle() as f64 * mvu_mhz as f64 * 1e6 / 1e12
    }

    /// Rows handled by core `c` for an M-row instruction.
    pub fn core_rows(&self, m: usize, c: usize) -> usize {
        let per = m.div_ceil(self.cores);
        m.saturating_sub(c * per).min(per)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvuMapping {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfuOp {
    Act,
    Add,
    Sub,
    Mult,
}

impl MfuOp {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "act" => Ok(MfuOp::Act),
            "add" => Ok(MfuOp::Add),
            "sub" => Ok(MfuOp::Sub),
            "mult" | "mul" => Ok(MfuOp::Mult),
            _ => Err(format!("unknown mfu op `{s}`")),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            MfuOp::Act => "act",
            MfuOp::Add => "add",
            MfuOp::Sub => "sub",
            MfuOp::Mult => "mult",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdDest {
    /// Results leave the NPU.
    Out,
    /// Written back to the eVRF.
    Evrf,
    /// Written back to every MVU core's register file.
    Mvu,
}

/// One VLIW instruction. `m` is the output vector length; `n` the MVU
/// input length (unused when the MVU is skipped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpuInstruction {
    pub m: usize,
    pub n: usize,
    pub mvu_skip: bool,
    pub mfu0: Vec<MfuOp>,
    pub mfu1: Vec<MfuOp>,
    pub ld: LdDest,
}

impl NpuInstruction {
    pub fn mvu(m: usize, n: usize) -> Self {
        NpuInstruction { m, n, mvu_skip: false, mfu0: Vec::new(), mfu1: Vec::new(), ld: LdDest::Out }
    }

    pub fn skip(m: usize) -> Self {
        NpuInstruction { m, n: 0, mvu_skip: true, mfu0: Vec::new(), mfu1: Vec::new(), ld: LdDest::Out }
    }

    pub fn mfu0(mut self, ops: &[MfuOp]) -> Self {
        self.mfu0 = ops.to_vec();
        self
    }

    pub fn mfu1(mut self, ops: &[MfuOp]) -> Self {
        self.mfu1 = ops.to_vec();
        self
    }

    pub fn ld(mut self, dest: LdDest) -> Self {
        self.ld = dest;
        self
    }

    /// Parses `m=.. n=.. [skip] mfu0=act+mult mfu1=bypass ld=out|evrf|mvu`.
    pub fn parse_fields(text: &str) -> Result<Self, String> {
        let mut instr = NpuInstruction::skip(0);
        instr.mvu_skip = false;
        let mut n_seen = false;
        for tok in text.split_whitespace() {
            if tok == "skip" {
                instr.mvu_skip = true;
                continue;
            }
            let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected field=value, got `{tok}`"))?;
            let count = |v: &str| v.parse::<usize>().map_err(|_| format!("`{v}` is not a count"));
            let ops = |v: &str| -> Result<Vec<MfuOp>, String> {
                if v == "bypass" {
                    Ok(Vec::new())
                } else {
                    v.split('+').map(MfuOp::parse).collect()
                }
            };
            match k {
                "m" => instr.m = count(v)?,
                "n" => {
                    instr.n = count(v)?;
                    n_seen = true;
                }
                "mfu0" => instr.mfu0 = ops(v)?,
                "mfu1" => instr.mfu1 = ops(v)?,
                "ld" => {
                    instr.ld = match v {
                        "out" => LdDest::Out,
                        "evrf" => LdDest::Evrf,
                        "mvu" => LdDest::Mvu,
                        _ => return Err(format!("unknown ld destination `{v}`")),
                    }
                }
                _ => return Err(format!("unknown instruction field `{k}`")),
            }
        }
        if instr.m == 0 {
            return Err("instruction needs m >= 1".into());
        }
        if !instr.mvu_skip && (!n_seen || instr.n == 0) {
            return Err("mvu instruction needs n >= 1".into());
        }
        Ok(instr)
    }
}

impl fmt::Display for NpuInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops = |v: &[MfuOp]| {
            if v.is_empty() {
                "bypass".to_string()
            } else {
                v.iter().map(|o| o.as_str()).collect::<Vec<_>>().join("+")
            }
        };
        let ld = match self.ld {
            LdDest::Out => "out",
            LdDest::Evrf => "evrf",
            LdDest::Mvu => "mvu",
        };
        if self.mvu_skip {
            write!(f, "skip m={}", self.m)?;
        } else {
            write!(f, "m={} n={}", self.m, self.n)?;
        }
        write!(f, " mfu0={} mfu1={} ld={ld}", ops(&self.mfu0), ops(&self.mfu1))
    }
}

/// Module cycles the MVU spends on `instr` (0 when skipped).
pub fn mvu_cycles(instr: &NpuInstruction, cfg: &NpuConfig) -> Result<u64, WorkloadError> {
    if instr.mvu_skip {
        return Ok(0);
    }
    check_fits(instr, cfg)?;
    let rows = instr.m.div_ceil(cfg.cores);
    let steps = rows.div_ceil(cfg.chunk_rows()) * instr.n.div_ceil(cfg.tiles * cfg.lanes);
    Ok(steps as u64 + cfg.latency.mvu_fill)
}

fn check_fits(instr: &NpuInstruction, cfg: &NpuConfig) -> Result<(), WorkloadError> {
    let per_tile = instr.n.div_ceil(cfg.tiles);
    let capacity = cfg.rf_depth * cfg.lanes;
    if per_tile > capacity {
        return Err(WorkloadError::OversizedWorkload(format!(
            "n = {} needs {per_tile} words per tile but a tile stores {capacity}",
            instr.n
        )));
    }
    Ok(())
}

/// Chunks that reach LD for one instruction.
pub fn out_chunks(instr: &NpuInstruction, cfg: &NpuConfig) -> usize {
    if instr.mvu_skip {
        instr.m.div_ceil(cfg.chunk_rows())
    } else {
        (0..cfg.cores).map(|c| cfg.core_rows(instr.m, c).div_ceil(cfg.chunk_rows())).sum()
    }
}

/// `2*M*N` for the matrix-vector product plus one op per element per MFU op.
pub fn instruction_ops(instr: &NpuInstruction) -> u64 {
    let mv = if instr.mvu_skip { 0 } else { 2 * instr.m as u64 * instr.n as u64 };
    mv + instr.m as u64 * (instr.mfu0.len() + instr.mfu1.len()) as u64
}

/// Total operations over all thread instances of all NPUs.
pub fn workload_ops(spec: &NpuTraceSpec) -> u64 {
    let per_npu: u64 = spec.programs.iter().flatten().map(instruction_ops).sum();
    per_npu * spec.npus as u64
}

fn layer_args(text: &str) -> Result<(String, Vec<(String, usize)>), String> {
    let mut it = text.split_whitespace();
    let family = it.next().ok_or("empty layer description")?.to_ascii_lowercase();
    let mut args = Vec::new();
    for tok in it {
        let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
        let v: usize = v.parse().map_err(|_| format!("`{v}` is not a count"))?;
        if v == 0 {
            return Err(format!("`{k}` must be at least 1"));
        }
        args.push((k.to_string(), v));
    }
    Ok((family, args))
}

/// Expands a catalog layer into instructions.
///
/// * `gemv n=N`: one N x N product.
/// * `rnn hidden=H`: H x 2H product over `[x, h]`, activation, written back
///   to the MVU.
/// * `gru hidden=H`: update/reset gates (2H x 2H, act), candidate (H x 2H,
///   mult then act), then `h = h + z*(c - h)` on the vector units.
/// * `lstm hidden=H`: all four gates (4H x 2H, act), `c = f*c + i*g`, then
///   `h = o*act(c)`.
/// * `mlp layers=K size=S`: K chained S x S products with activation.
///
/// Recurrent layers accept `steps=K` to repeat the cell.
pub fn expand_layer(text: &str) -> Result<Vec<NpuInstruction>, String> {
    use MfuOp::*;
    let (family, args) = layer_args(text)?;
    let get = |key: &str, default: Option<usize>| -> Result<usize, String> {
        args.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| format!("{family} layer needs `{key}`"))
    };
    let allowed: &[&str] = match family.as_str() {
        "gemv" => &["n"],
        "rnn" | "gru" | "lstm" => &["hidden", "steps"],
        "mlp" => &["layers", "size"],
        _ => return Err(format!("unknown layer family `{family}`")),
    };
    if let Some((k, _)) = args.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown {family} parameter `{k}`"));
    }
    let cell = match family.as_str() {
        "gemv" => {
            let n = get("n", None)?;
            return Ok(vec![NpuInstruction::mvu(n, n)]);
        }
        "mlp" => {
            let size = get("size", Some(1024))?;
            let layers = get("layers", Some(3))?;
            return Ok((0..layers).map(|_| NpuInstruction::mvu(size, size).mfu0(&[Act]).ld(LdDest::Mvu)).collect());
        }
        "rnn" => {
            let h = get("hidden", None)?;
            vec![NpuInstruction::mvu(h, 2 * h).mfu0(&[Act]).ld(LdDest::Mvu)]
        }
        "gru" => {
            let h = get("hidden", None)?;
            vec![
                NpuInstruction::mvu(2 * h, 2 * h).mfu0(&[Act]).ld(LdDest::Evrf),
                NpuInstruction::mvu(h, 2 * h).mfu0(&[Mult]).mfu1(&[Act]).ld(LdDest::Evrf),
                NpuInstruction::skip(h).mfu0(&[Sub, Mult]).mfu1(&[Add]).ld(LdDest::Mvu),
            ]
        }
        "lstm" => {
            let h = get("hidden", None)?;
            vec![
                NpuInstruction::mvu(4 * h, 2 * h).mfu0(&[Act]).ld(LdDest::Evrf),
                NpuInstruction::skip(h).mfu0(&[Mult, Mult]).mfu1(&[Add]).ld(LdDest::Evrf),
                NpuInstruction::skip(h).mfu0(&[Act]).mfu1(&[Mult]).ld(LdDest::Mvu),
            ]
        }
        _ => unreachable!("family checked above"),
    };
    let steps = get("steps", Some(1))?;
    Ok((0..steps).flat_map(|_| cell.iter().cloned()).collect())
}

/// Message classes carried in the `user` field of NPU stream transactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NpuMsg {
    Issue = 1,
    Data = 2,
    Writeback = 3,
    Done = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NpuTag {
    pub msg: NpuMsg,
    pub thread: u32,
    pub instr: u32,
    pub chunk: u32,
}

impl NpuTag {
    pub fn pack(self) -> u64 {
        (self.msg as u64) << 60 | (self.thread as u64 & 0xff) << 52 | (self.instr as u64 & 0xf_ffff) << 32 | self.chunk as u64
    }

    pub fn unpack(v: u64) -> Option<Self> {
        let msg = match v >> 60 {
            1 => NpuMsg::Issue,
            2 => NpuMsg::Data,
            3 => NpuMsg::Writeback,
            4 => NpuMsg::Done,
            _ => return None,
        };
        Some(NpuTag { msg, thread: (v >> 52 & 0xff) as u32, instr: (v >> 32 & 0xf_ffff) as u32, chunk: v as u32 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_core() -> NpuConfig {
        NpuConfig { cores: 1, latency: BlockLatency { mvu_fill: 0, ..Default::default() }, ..Default::default() }
    }

    #[test]
    fn mvu_cycles_examples() {
        let cfg = one_core();
        assert_eq!(mvu_cycles(&NpuInstruction::mvu(1, 1), &cfg).unwrap(), 1);
        assert_eq!(mvu_cycles(&NpuInstruction::mvu(1024, 1024), &cfg).unwrap(), 104);
    }

    #[test]
    fn doubling_tiles_halves_column_steps() {
        let cfg = one_core();
        let wide = NpuConfig { tiles: 14, ..cfg };
        let i = NpuInstruction::mvu(40, 280 * 64);
        assert_eq!(mvu_cycles(&i, &cfg).unwrap(), 2 * mvu_cycles(&i, &wide).unwrap());
    }

    #[test]
    fn oversized_rejected() {
        let cfg = NpuConfig { rf_depth: 1, ..one_core() };
        assert!(matches!(mvu_cycles(&NpuInstruction::mvu(8, 7 * 41), &cfg), Err(WorkloadError::OversizedWorkload(_))));
        assert!(mvu_cycles(&NpuInstruction::mvu(8, 7 * 40), &cfg).is_ok());
    }

    #[test]
    fn peak_bounds() {
        let cfg = NpuConfig::default();
        assert!((cfg.peak_tops(300) - 13.44).abs() < 1e-9);
        assert!((cfg.peak_tops(600) - 26.88).abs() < 1e-9);
    }

    #[test]
    fn gemv_ops() {
        let ops: u64 = expand_layer("gemv n=1024").unwrap().iter().map(instruction_ops).sum();
        assert_eq!(ops, 2_097_152);
    }

    #[test]
    fn lstm_ops_match_cell_definition() {
        let h = 1024u64;
        let ops: u64 = expand_layer("lstm hidden=1024").unwrap().iter().map(instruction_ops).sum();
        // 4 gates of H x 2H MACs, 4H activations, 2H mults + H add for c, H act + H mult for h
        let macs = 4 * h * 2 * h;
        assert_eq!(macs, 8 * h * h);
        assert_eq!(ops, 2 * macs + 4 * h + 3 * h + 2 * h);
        assert_eq!(expand_layer("lstm hidden=8 steps=3").unwrap().len(), 9);
    }

    #[test]
    fn core_split_covers_all_rows() {
        let cfg = NpuConfig { cores: 3, ..Default::default() };
        for m in 1..200 {
            let total: usize = (0..3).map(|c| cfg.core_rows(m, c)).sum();
            assert_eq!(total, m);
        }
    }

    #[test]
    fn instruction_text_round_trip() {
        let i = NpuInstruction::skip(64).mfu0(&[MfuOp::Sub, MfuOp::Mult]).ld(LdDest::Evrf);
        assert_eq!(NpuInstruction::parse_fields(&i.to_string()).unwrap(), i);
        assert!(NpuInstruction::parse_fields("m=4").is_err());
    }

    #[test]
    fn tag_round_trip() {
        let t = NpuTag { msg: NpuMsg::Writeback, thread: 3, instr: 77, chunk: 123_456 };
        assert_eq!(NpuTag::unpack(t.pack()), Some(t));
        assert_eq!(NpuTag::unpack(0), None);
    }
}
