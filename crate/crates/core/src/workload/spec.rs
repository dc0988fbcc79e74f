use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::adapter::TransactionKind;
use crate::config::strip_comment;

use super::npu::{expand_layer, MvuMapping, NpuConfig, NpuInstruction};
use super::WorkloadError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    NpuTrace,
    LatencyProbe,
    RandomUniform,
}

impl WorkloadKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WorkloadKind::NpuTrace => "npu_trace",
            WorkloadKind::LatencyProbe => "latency_probe",
            WorkloadKind::RandomUniform => "random_uniform",
        }
    }
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One source sends `count` transactions to every other placed port, first
/// to the first port of each router, then to the second, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatencyProbeSpec {
    pub source_module: String,
    pub source_port: String,
    pub count: usize,
    pub kind: TransactionKind,
    pub bytes: usize,
    /// Issue the next transaction only after the previous one was received.
    pub one_at_a_time: bool,
    /// Receivers that never drain their output buffers.
    pub stalled: Vec<String>,
}

/// Every placed port injects packets to uniformly chosen other ports.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomUniformSpec {
    /// Probability of generating a packet on each module cycle.
    pub injection_rate: f64,
    pub packet_bytes: usize,
    /// Module cycles during which packets are generated.
    pub duration: u64,
    pub kind: TransactionKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpuTraceSpec {
    pub cfg: NpuConfig,
    pub npus: usize,
    pub mapping: MvuMapping,
    /// Instruction stream of each thread of one NPU.
    pub programs: Vec<Vec<NpuInstruction>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadSpec {
    NpuTrace(NpuTraceSpec),
    LatencyProbe(LatencyProbeSpec),
    RandomUniform(RandomUniformSpec),
}

fn perr(line: usize, reason: impl Into<String>) -> WorkloadError {
    WorkloadError::Parse { line, reason: reason.into() }
}

struct Kv<'a> {
    values: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Kv<'a> {
    fn take<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, WorkloadError> {
        match self.values.remove(key) {
            Some((line, v)) => v.parse().map_err(|_| perr(line, format!("malformed value `{v}` for `{key}`"))),
            None => Ok(default),
        }
    }

    fn take_positive(&mut self, key: &str, default: usize) -> Result<usize, WorkloadError> {
        let line = self.values.get(key).map_or(0, |(l, _)| *l);
        let v: usize = self.take(key, default)?;
        if v == 0 {
            return Err(perr(line, format!("`{key}` must be at least 1")));
        }
        Ok(v)
    }

    fn finish(self) -> Result<(), WorkloadError> {
        match self.values.into_iter().next() {
            Some((k, (line, _))) => Err(perr(line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

/// Header line and numbered body lines of one `[thread.*]` section.
type Section<'a> = (usize, Vec<(usize, &'a str)>);

impl WorkloadSpec {
    pub fn kind(&self) -> WorkloadKind {
        match self {
            WorkloadSpec::NpuTrace(_) => WorkloadKind::NpuTrace,
            WorkloadSpec::LatencyProbe(_) => WorkloadKind::LatencyProbe,
            WorkloadSpec::RandomUniform(_) => WorkloadKind::RandomUniform,
        }
    }

    pub fn parse(text: &str) -> Result<Self, WorkloadError> {
        let mut top: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        // thread index (None = wildcard) -> (header line, body lines)
        let mut threads: BTreeMap<Option<usize>, Section<'_>> = BTreeMap::new();
        let mut current: Option<Option<usize>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw);
            if content.is_empty() {
                continue;
            }
            if let Some(h) = content.strip_prefix('[') {
                let name = h.strip_suffix(']').ok_or_else(|| perr(line, "unterminated section header"))?.trim();
                let idx = name.strip_prefix("thread.").ok_or_else(|| perr(line, format!("unknown section `[{name}]`")))?;
                let key = if idx == "*" {
                    None
                } else {
                    Some(idx.parse().map_err(|_| perr(line, format!("bad thread index `{idx}`")))?)
                };
                if threads.insert(key, (line, Vec::new())).is_some() {
                    return Err(perr(line, format!("duplicate section `[{name}]`")));
                }
                current = Some(key);
                continue;
            }
            match current {
                Some(t) => threads.get_mut(&t).expect("section").1.push((line, content)),
                None => {
                    let (k, v) = content.split_once('=').ok_or_else(|| perr(line, "expected `key = value`"))?;
                    if top.insert(k.trim(), (line, v.trim())).is_some() {
                        return Err(perr(line, format!("duplicate key `{}`", k.trim())));
                    }
                }
            }
        }
        let (kind_line, kind) = top.remove("kind").ok_or_else(|| perr(1, "missing required key `kind`"))?;
        let mut kv = Kv { values: top };
        let spec = match kind {
            "latency_probe" => {
                let (src_line, source) = kv.values.remove("source").ok_or_else(|| perr(kind_line, "missing `source`"))?;
                let (m, p) = source.split_once('.').ok_or_else(|| perr(src_line, "source must be module.port"))?;
                let kind: String = kv.take("transaction", "mm_write_req".to_string())?;
                let spec = LatencyProbeSpec {
                    source_module: m.to_string(),
                    source_port: p.to_string(),
                    count: kv.take_positive("count", 2)?,
                    kind: kind.parse().map_err(|e: String| perr(kind_line, e))?,
                    bytes: kv.take("bytes", 64)?,
                    one_at_a_time: kv.take("one_at_a_time", true)?,
                    stalled: kv
                        .take("stalled", String::new())?
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect(),
                };
                if !threads.is_empty() {
                    return Err(perr(kind_line, "thread sections are only valid for npu_trace"));
                }
                WorkloadSpec::LatencyProbe(spec)
            }
            "random_uniform" => {
                let line = kv.values.get("injection_rate").map_or(kind_line, |(l, _)| *l);
                let kind: String = kv.take("transaction", "stream".to_string())?;
                let spec = RandomUniformSpec {
                    injection_rate: kv.take("injection_rate", 0.05)?,
                    packet_bytes: kv.take("packet_bytes", 64)?,
                    duration: kv.take("duration", 1000)?,
                    kind: kind.parse().map_err(|e: String| perr(kind_line, e))?,
                };
                if !(0.0..=1.0).contains(&spec.injection_rate) {
                    return Err(perr(line, "injection_rate must lie in [0, 1]"));
                }
                if !threads.is_empty() {
                    return Err(perr(kind_line, "thread sections are only valid for npu_trace"));
                }
                WorkloadSpec::RandomUniform(spec)
            }
            "npu_trace" => {
                let d = NpuConfig::default();
                let mvu: String = kv.take("mvu", "soft".to_string())?;
                let mut cfg = NpuConfig {
                    cores: kv.take_positive("cores", d.cores)?,
                    tiles: kv.take_positive("tiles", d.tiles)?,
                    dpe_sets: kv.take_positive("dpe_sets", d.dpe_sets)?,
                    dpes_per_set: kv.take_positive("dpes_per_set", d.dpes_per_set)?,
                    lanes: kv.take_positive("lanes", d.lanes)?,
                    threads: kv.take_positive("threads", d.threads)?,
                    rf_depth: kv.take_positive("rf_depth", d.rf_depth)?,
                    elem_bits: kv.take_positive("elem_bits", d.elem_bits)?,
                    latency: d.latency,
                };
                cfg.latency.mvu_fill = kv.take("mvu_fill", d.latency.mvu_fill)?;
                cfg.latency.evrf = kv.take("evrf_latency", d.latency.evrf)?;
                cfg.latency.mfu = kv.take("mfu_latency", d.latency.mfu)?;
                cfg.latency.ld = kv.take("ld_latency", d.latency.ld)?;
                if !cfg.elem_bits.is_multiple_of(8) {
                    return Err(perr(kind_line, "elem_bits must be a multiple of 8"));
                }
                let npus = kv.take_positive("npus", 1)?;
                let mapping = match mvu.as_str() {
                    "soft" => MvuMapping::Soft,
                    "hard" => MvuMapping::Hard,
                    other => return Err(perr(kind_line, format!("mvu must be `soft` or `hard`, got `{other}`"))),
                };
                let mut parsed: BTreeMap<Option<usize>, Vec<NpuInstruction>> = BTreeMap::new();
                for (key, (header, body)) in &threads {
                    if let Some(t) = key {
                        if *t >= cfg.threads {
                            return Err(perr(*header, format!("thread {t} exceeds threads = {}", cfg.threads)));
                        }
                    }
                    let mut prog = Vec::new();
                    for (line, text) in body {
                        let instrs = if let Some(rest) = text.strip_prefix("inst") {
                            vec![NpuInstruction::parse_fields(rest).map_err(|e| perr(*line, e))?]
                        } else if let Some((k, v)) = text.split_once('=') {
                            if k.trim() != "layer" {
                                return Err(perr(*line, format!("unknown key `{}`", k.trim())));
                            }
                            expand_layer(v.trim()).map_err(|e| perr(*line, e))?
                        } else {
                            return Err(perr(*line, "expected `inst ...` or `layer = ...`"));
                        };
                        prog.extend(instrs);
                    }
                    parsed.insert(*key, prog);
                }
                let programs = (0..cfg.threads)
                    .map(|t| parsed.get(&Some(t)).or_else(|| parsed.get(&None)).cloned().unwrap_or_default())
                    .collect();
                WorkloadSpec::NpuTrace(NpuTraceSpec { cfg, npus, mapping, programs })
            }
            other => return Err(perr(kind_line, format!("unknown workload kind `{other}`"))),
        };
        kv.finish()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_defaults() {
        let w = WorkloadSpec::parse("kind = latency_probe\nsource = m0_0.io\n").unwrap();
        let WorkloadSpec::LatencyProbe(p) = w else { panic!() };
        assert_eq!((p.count, p.bytes, p.one_at_a_time), (2, 64, true));
        assert_eq!(p.kind, TransactionKind::MmWriteReq);
    }

    #[test]
    fn npu_threads_and_wildcard() {
        let text = "kind = npu_trace\nthreads = 2\nmvu = hard\n[thread.*]\nlayer = gemv n=512\n[thread.1]\ninst m=8 n=8 ld=out\ninst skip m=8 mfu0=act ld=evrf\n";
        let WorkloadSpec::NpuTrace(n) = WorkloadSpec::parse(text).unwrap() else { panic!() };
        assert_eq!(n.mapping, MvuMapping::Hard);
        assert_eq!(n.programs[0].len(), 1);
        assert_eq!(n.programs[1].len(), 2);
    }

    #[test]
    fn errors_carry_lines() {
        let e = WorkloadSpec::parse("kind = npu_trace\nbogus = 1\n").unwrap_err();
        assert_eq!(e, WorkloadError::Parse { line: 2, reason: "unknown key `bogus`".into() });
        let e = WorkloadSpec::parse("kind = npu_trace\nthreads = 1\n[thread.3]\n").unwrap_err();
        assert!(matches!(e, WorkloadError::Parse { line: 3, .. }));
        assert!(WorkloadSpec::parse("kind = warp_drive\n").is_err());
    }
}
