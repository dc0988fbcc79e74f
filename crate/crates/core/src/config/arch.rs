use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::adapter::{AdapterParams, ArbiterKind, VcMapping};
use crate::noc::{NocTopology, RouterId, RoutingFunc, TopologyKind};
use crate::telemetry::Stage;

use super::{strip_comment, ConfigError};

pub const DEFAULT_QUIESCENCE_CYCLES: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NocConfig {
    pub payload_width: usize,
    pub freq_mhz: u32,
    pub topology: TopologyKind,
    pub dim_x: usize,
    pub dim_y: usize,
    pub routing: RoutingFunc,
    pub vcs: usize,
    pub vc_buffer_size: usize,
    pub pipeline_depth: u32,
}

impl NocConfig {
    pub fn new(dim_x: usize, dim_y: usize, freq_mhz: u32) -> Self {
        NocConfig {
            payload_width: 128,
            freq_mhz,
            topology: TopologyKind::Mesh,
            dim_x,
            dim_y,
            routing: RoutingFunc::DimensionOrder,
            vcs: 3,
            vc_buffer_size: 8,
            pipeline_depth: 4,
        }
    }

    pub fn num_routers(&self) -> usize {
        self.dim_x * self.dim_y
    }

    pub fn topology(&self) -> NocTopology {
        NocTopology { kind: self.topology, dim_x: self.dim_x, dim_y: self.dim_y, routing: self.routing }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorKind {
    Fpga,
    Asic,
}

/// `rows[y][x]`; one text row of `F`/`A` characters per mesh row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorGrid {
    pub rows: Vec<Vec<SectorKind>>,
}

impl SectorGrid {
    pub fn dims(&self) -> (usize, usize) {
        (self.rows.first().map_or(0, Vec::len), self.rows.len())
    }

    pub fn kind_of(&self, router: RouterId) -> Option<SectorKind> {
        let (x, _) = self.dims();
        if x == 0 {
            return None;
        }
        self.rows.get(router / x).and_then(|row| row.get(router % x)).copied()
    }

    pub fn count(&self, kind: SectorKind) -> usize {
        self.rows.iter().flatten().filter(|&&k| k == kind).count()
    }

    fn parse_row(text: &str) -> Result<Vec<SectorKind>, String> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'F' | 'f' => Ok(SectorKind::Fpga),
                'A' | 'a' => Ok(SectorKind::Asic),
                other => Err(format!("sector cell `{other}` is neither F nor A")),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelemetryConfig {
    pub num_traces: usize,
    pub trace_names: Vec<String>,
}

impl Default for TelemetryConfig {
    fn default() -> Self {
        TelemetryConfig { num_traces: 6, trace_names: Stage::ALL.iter().map(|s| s.as_str().to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadArchitecture {
    pub nocs: Vec<NocConfig>,
    pub adapter: AdapterParams,
    /// Module name pattern -> module clock in MHz.
    pub module_freqs: BTreeMap<String, u32>,
    pub sectors: Option<SectorGrid>,
    pub telemetry: TelemetryConfig,
    /// Quiescent cycles of NoC 0 after which a run is declared deadlocked.
    pub quiescence_cycles: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Section {
    Top,
    Noc(usize),
    Adapter,
    Module(String),
    Sectors,
    Telemetry,
}

enum KeyError {
    Unknown,
    Malformed(String),
}

fn num<T: FromStr>(v: &str) -> Result<T, KeyError> {
    v.parse().map_err(|_| KeyError::Malformed(format!("`{v}` is not a valid number")))
}

fn positive<T: FromStr + PartialOrd + Default>(v: &str) -> Result<T, KeyError> {
    let n: T = num(v)?;
    if n <= T::default() {
        return Err(KeyError::Malformed("must be at least 1".into()));
    }
    Ok(n)
}

fn parse_dim(v: &str) -> Result<(usize, usize), KeyError> {
    let (x, y) = v.split_once(['x', 'X']).ok_or_else(|| KeyError::Malformed(format!("expected XxY, got `{v}`")))?;
    Ok((positive(x.trim())?, positive(y.trim())?))
}

fn parse_topology(v: &str) -> Result<TopologyKind, KeyError> {
    match v {
        "mesh" => Ok(TopologyKind::Mesh),
        "torus" => Ok(TopologyKind::Torus),
        _ => Err(KeyError::Malformed(format!("unknown topology `{v}`"))),
    }
}

fn parse_routing(v: &str) -> Result<RoutingFunc, KeyError> {
    match v {
        "dimension_order" | "xy" | "XY" => Ok(RoutingFunc::DimensionOrder),
        "minimal_adaptive" | "min_hops" => Ok(RoutingFunc::MinimalAdaptive),
        _ => Err(KeyError::Malformed(format!("unknown routing function `{v}`"))),
    }
}

/// Largest VC count whose switch-allocation request mask fits in 64 bits.
pub(crate) const MAX_VCS: usize = 64 / crate::noc::NUM_PORTS;

fn set_noc_key(n: &mut NocConfig, key: &str, v: &str) -> Result<(), KeyError> {
    match key {
        "noc_payload_width" => {
            let w: usize = positive(v)?;
            if !w.is_multiple_of(8) {
                return Err(KeyError::Malformed("payload width must be a multiple of 8 bits".into()));
            }
            n.payload_width = w;
        }
        "noc_freq" => n.freq_mhz = positive(v)?,
        "noc_topology" => n.topology = parse_topology(v)?,
        "noc_dim" => (n.dim_x, n.dim_y) = parse_dim(v)?,
        "noc_routing_func" => n.routing = parse_routing(v)?,
        "noc_vcs" => {
            let vcs: usize = positive(v)?;
            if vcs > MAX_VCS {
                return Err(KeyError::Malformed(format!("at most {MAX_VCS} VCs are supported")));
            }
            n.vcs = vcs;
        }
        "noc_vc_buffer_size" => n.vc_buffer_size = positive(v)?,
        "noc_pipeline_depth" => n.pipeline_depth = positive(v)?,
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}

fn set_adapter_key(a: &mut AdapterParams, key: &str, v: &str) -> Result<(), KeyError> {
    let arb = |v: &str| v.parse::<ArbiterKind>().map_err(KeyError::Malformed);
    match key {
        "adapter_interfaces" => a.interfaces = positive(v)?,
        "adapter_fifo_size" => a.fifo_size = positive(v)?,
        "adapter_obuff_size" => a.obuff_size = positive(v)?,
        "adapter_in_arbiter" => a.in_arbiter = arb(v)?,
        "adapter_out_arbiter" => a.out_arbiter = arb(v)?,
        "adapter_vc_mapping" => a.vc_mapping = v.parse::<VcMapping>().map_err(KeyError::Malformed)?,
        "adapter_freq" => a.freq_mhz = positive(v)?,
        "adapter_max_transaction_bytes" => a.max_transaction_bytes = positive(v)?,
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}

fn set_telemetry_key(t: &mut TelemetryConfig, key: &str, v: &str) -> Result<(), KeyError> {
    match key {
        "num_traces" => t.num_traces = num(v)?,
        "trace_names" => {
            let names: Vec<String> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
            for n in &names {
                n.parse::<Stage>().map_err(|_| KeyError::Malformed(format!("`{n}` is not a ladder stage")))?;
            }
            t.trace_names = names;
        }
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}

fn set_top_key(arch: &mut RadArchitecture, key: &str, v: &str) -> Result<(), KeyError> {
    match key {
        "quiescence_cycles" => arch.quiescence_cycles = positive(v)?,
        _ => return Err(KeyError::Unknown),
    }
    Ok(())
}

fn key_err(line: usize, key: &str, value: &str, e: KeyError) -> ConfigError {
    match e {
        KeyError::Unknown => ConfigError::UnknownKey { line, key: key.to_string() },
        KeyError::Malformed(reason) => {
            ConfigError::MalformedValue { line, key: key.to_string(), reason: format!("`{value}`: {reason}") }
        }
    }
}

impl RadArchitecture {
    /// A single mesh NoC with default adapter settings and no modules.
    pub fn single_mesh(dim_x: usize, dim_y: usize, noc_freq: u32, adapter_freq: u32) -> Self {
        RadArchitecture {
            nocs: vec![NocConfig::new(dim_x, dim_y, noc_freq)],
            adapter: AdapterParams { freq_mhz: adapter_freq, ..Default::default() },
            module_freqs: BTreeMap::new(),
            sectors: None,
            telemetry: TelemetryConfig::default(),
            quiescence_cycles: DEFAULT_QUIESCENCE_CYCLES,
        }
    }

    /// Sets the clock of modules matching `pattern` (exact name or glob).
    pub fn with_module_freq(mut self, pattern: &str, freq_mhz: u32) -> Self {
        self.module_freqs.insert(pattern.to_string(), freq_mhz);
        self
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut arch = RadArchitecture {
            nocs: Vec::new(),
            adapter: AdapterParams::default(),
            module_freqs: BTreeMap::new(),
            sectors: None,
            telemetry: TelemetryConfig::default(),
            quiescence_cycles: DEFAULT_QUIESCENCE_CYCLES,
        };
        let mut noc_sections: BTreeMap<usize, (usize, NocConfig, Vec<&'static str>)> = BTreeMap::new();
        let mut num_nocs: Option<(usize, usize)> = None;
        let mut adapter_line = None;
        let mut adapter_freq_seen = false;
        let mut module_line: BTreeMap<String, usize> = BTreeMap::new();
        let mut sector_rows: Vec<Vec<SectorKind>> = Vec::new();
        let mut sectors_line = 0;
        let mut section = Section::Top;
        let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw);
            if content.is_empty() {
                continue;
            }
            if let Some(h) = content.strip_prefix('[') {
                let name = h
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::MalformedValue {
                        line,
                        key: content.to_string(),
                        reason: "unterminated section header".into(),
                    })?
                    .trim();
                section = match name {
                    "adapter" => {
                        adapter_line = Some(line);
                        Section::Adapter
                    }
                    "sectors" => {
                        sectors_line = line;
                        Section::Sectors
                    }
                    "telemetry" => Section::Telemetry,
                    _ => {
                        if let Some(idx) = name.strip_prefix("noc.") {
                            let idx: usize = idx.parse().map_err(|_| ConfigError::MalformedValue {
                                line,
                                key: name.to_string(),
                                reason: "noc index must be an integer".into(),
                            })?;
                            noc_sections.entry(idx).or_insert((line, NocConfig::new(0, 0, 0), Vec::new()));
                            Section::Noc(idx)
                        } else if let Some(m) = name.strip_prefix("module.") {
                            if m.is_empty() {
                                return Err(ConfigError::MalformedValue {
                                    line,
                                    key: name.to_string(),
                                    reason: "empty module name".into(),
                                });
                            }
                            module_line.entry(m.to_string()).or_insert(line);
                            Section::Module(m.to_string())
                        } else {
                            return Err(ConfigError::UnknownKey { line, key: format!("[{name}]") });
                        }
                    }
                };
                continue;
            }
            if section == Section::Sectors {
                let row = SectorGrid::parse_row(content)
                    .map_err(|reason| ConfigError::MalformedValue { line, key: "sectors".into(), reason })?;
                if let Some(first) = sector_rows.first() {
                    if first.len() != row.len() {
                        return Err(ConfigError::MalformedValue {
                            line,
                            key: "sectors".into(),
                            reason: format!("row has {} cells, expected {}", row.len(), first.len()),
                        });
                    }
                }
                sector_rows.push(row);
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::MalformedValue {
                line,
                key: content.to_string(),
                reason: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let section_name = format!("{section:?}");
            if let Some(prev) = seen.insert((section_name, key.to_string()), line) {
                return Err(ConfigError::MalformedValue {
                    line,
                    key: key.to_string(),
                    reason: format!("duplicate key (first set on line {prev})"),
                });
            }
            let res = match &section {
                Section::Top if key == "num_nocs" => {
                    num_nocs = Some((line, positive(value).map_err(|e| key_err(line, key, value, e))?));
                    Ok(())
                }
                Section::Top => set_top_key(&mut arch, key, value),
                Section::Noc(idx) => {
                    let entry = noc_sections.get_mut(idx).expect("section opened");
                    for required in ["noc_dim", "noc_freq"] {
                        if key == required {
                            entry.2.push(required);
                        }
                    }
                    set_noc_key(&mut entry.1, key, value)
                }
                Section::Adapter => {
                    if key == "adapter_freq" {
                        adapter_freq_seen = true;
                    }
                    set_adapter_key(&mut arch.adapter, key, value)
                }
                Section::Module(name) => match key {
                    "module_freq" => positive(value).map(|f| {
                        arch.module_freqs.insert(name.clone(), f);
                    }),
                    _ => Err(KeyError::Unknown),
                },
                Section::Telemetry => set_telemetry_key(&mut arch.telemetry, key, value),
                Section::Sectors => unreachable!("handled above"),
            };
            res.map_err(|e| key_err(line, key, value, e))?;
        }

        let count = match num_nocs {
            Some((_, n)) => n,
            None => noc_sections.len().max(1),
        };
        for idx in 0..count {
            let Some((line, cfg, present)) = noc_sections.remove(&idx) else {
                return Err(ConfigError::MissingRequiredKey {
                    line: num_nocs.map_or(0, |(l, _)| l),
                    key: format!("[noc.{idx}]"),
                });
            };
            for required in ["noc_dim", "noc_freq"] {
                if !present.contains(&required) {
                    return Err(ConfigError::MissingRequiredKey { line, key: required.to_string() });
                }
            }
            arch.nocs.push(cfg);
        }
        if let Some((&idx, &(line, _, _))) = noc_sections.iter().next() {
            return Err(ConfigError::MalformedValue {
                line,
                key: format!("[noc.{idx}]"),
                reason: format!("only {count} nocs declared"),
            });
        }
        if !adapter_freq_seen {
            return Err(ConfigError::MissingRequiredKey { line: adapter_line.unwrap_or(0), key: "adapter_freq".into() });
        }
        for (name, line) in module_line {
            if !arch.module_freqs.contains_key(&name) {
                return Err(ConfigError::MissingRequiredKey { line, key: "module_freq".into() });
            }
        }
        if !sector_rows.is_empty() {
            arch.sectors = Some(SectorGrid { rows: sector_rows });
        } else if sectors_line > 0 {
            return Err(ConfigError::MalformedValue { line: sectors_line, key: "sectors".into(), reason: "empty grid".into() });
        }
        Ok(arch)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "num_nocs = {}", self.nocs.len()).unwrap();
        writeln!(out, "quiescence_cycles = {}", self.quiescence_cycles).unwrap();
        for (i, n) in self.nocs.iter().enumerate() {
            writeln!(out, "\n[noc.{i}]").unwrap();
            writeln!(out, "noc_payload_width = {}", n.payload_width).unwrap();
            writeln!(out, "noc_freq = {}", n.freq_mhz).unwrap();
            writeln!(out, "noc_topology = {}", n.topology.as_str()).unwrap();
            writeln!(out, "noc_dim = {}x{}", n.dim_x, n.dim_y).unwrap();
            writeln!(out, "noc_routing_func = {}", n.routing.as_str()).unwrap();
            writeln!(out, "noc_vcs = {}", n.vcs).unwrap();
            writeln!(out, "noc_vc_buffer_size = {}", n.vc_buffer_size).unwrap();
            writeln!(out, "noc_pipeline_depth = {}", n.pipeline_depth).unwrap();
        }
        let a = &self.adapter;
        writeln!(out, "\n[adapter]").unwrap();
        writeln!(out, "adapter_interfaces = {}", a.interfaces).unwrap();
        writeln!(out, "adapter_fifo_size = {}", a.fifo_size).unwrap();
        writeln!(out, "adapter_obuff_size = {}", a.obuff_size).unwrap();
        writeln!(out, "adapter_in_arbiter = {}", a.in_arbiter).unwrap();
        writeln!(out, "adapter_out_arbiter = {}", a.out_arbiter).unwrap();
        writeln!(out, "adapter_vc_mapping = {}", a.vc_mapping).unwrap();
        writeln!(out, "adapter_freq = {}", a.freq_mhz).unwrap();
        writeln!(out, "adapter_max_transaction_bytes = {}", a.max_transaction_bytes).unwrap();
        for (name, f) in &self.module_freqs {
            writeln!(out, "\n[module.{name}]\nmodule_freq = {f}").unwrap();
        }
        if let Some(grid) = &self.sectors {
            writeln!(out, "\n[sectors]").unwrap();
            for row in &grid.rows {
                let s: String = row.iter().map(|k| if *k == SectorKind::Asic { 'A' } else { 'F' }).collect();
                writeln!(out, "{s}").unwrap();
            }
        }
        writeln!(out, "\n[telemetry]").unwrap();
        writeln!(out, "num_traces = {}", self.telemetry.num_traces).unwrap();
        writeln!(out, "trace_names = {}", self.telemetry.trace_names.join(",")).unwrap();
        out
    }

    /// Applies a `key=value` override. Bare `noc_*` keys apply to every NoC;
    /// `noc.<i>.<key>` targets one; `module.<pattern>.module_freq` sets a
    /// module clock.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (key, value) = spec.split_once('=').ok_or_else(|| ConfigError::MalformedValue {
            line: 0,
            key: spec.to_string(),
            reason: "expected key=value".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let err = |e| key_err(0, key, value, e);
        if let Some(rest) = key.strip_prefix("noc.") {
            let (idx, k) = rest.split_once('.').ok_or_else(|| ConfigError::UnknownKey { line: 0, key: key.into() })?;
            let idx: usize = idx.parse().map_err(|_| ConfigError::UnknownKey { line: 0, key: key.into() })?;
            let count = self.nocs.len();
            let noc = self.nocs.get_mut(idx).ok_or(ConfigError::UnknownNoc { line: 0, noc: idx, count })?;
            return set_noc_key(noc, k, value).map_err(err);
        }
        if let Some(rest) = key.strip_prefix("module.") {
            let (name, k) = rest.rsplit_once('.').ok_or_else(|| ConfigError::UnknownKey { line: 0, key: key.into() })?;
            if k != "module_freq" {
                return Err(ConfigError::UnknownKey { line: 0, key: key.into() });
            }
            let f: u32 = positive(value).map_err(err)?;
            self.module_freqs.insert(name.to_string(), f);
            return Ok(());
        }
        if key.starts_with("noc_") {
            for n in &mut self.nocs {
                set_noc_key(n, key, value).map_err(err)?;
            }
            return Ok(());
        }
        if key.starts_with("adapter_") {
            return set_adapter_key(&mut self.adapter, key, value).map_err(err);
        }
        match set_telemetry_key(&mut self.telemetry, key, value) {
            Err(KeyError::Unknown) => set_top_key(self, key, value).map_err(err),
            other => other.map_err(err),
        }
    }

    /// Clock of `module`: an exact section wins, then the longest matching
    /// wildcard pattern.
    pub fn module_freq(&self, module: &str) -> Option<u32> {
        if let Some(f) = self.module_freqs.get(module) {
            return Some(*f);
        }
        self.module_freqs
            .iter()
            .filter(|(p, _)| p.contains('*') && glob_match(p, module))
            .max_by_key(|(p, _)| p.len())
            .map(|(_, f)| *f)
    }
}

/// `*` matches any (possibly empty) run of characters.
pub(crate) fn glob_match(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(pos) => rest = &rest[pos + mid.len()..],
            None => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
[noc.0]
noc_dim = 10x5
noc_freq = 1500
noc_topology = mesh
noc_vcs = 3
noc_vc_buffer_size = 8

[adapter]
adapter_freq = 1200

[module.*]
module_freq = 300
[module.npu*_mvu*]
module_freq = 600
";

    #[test]
    fn parses_vc_config_and_dims() {
        let a = RadArchitecture::parse(BASE).unwrap();
        assert_eq!(a.nocs[0].vcs, 3);
        assert_eq!(a.nocs[0].vc_buffer_size, 8);
        assert_eq!(a.nocs[0].num_routers(), 50);
        assert_eq!(a.nocs[0].pipeline_depth, 4);
        assert_eq!(a.nocs[0].payload_width, 128);
    }

    #[test]
    fn zero_vcs_is_malformed() {
        let text = BASE.replace("noc_vcs = 3", "noc_vcs = 0");
        let e = RadArchitecture::parse(&text).unwrap_err();
        assert!(matches!(e, ConfigError::MalformedValue { line: 6, .. }), "{e}");
    }

    #[test]
    fn unknown_and_missing_keys_name_the_line() {
        let text = BASE.replace("noc_topology = mesh", "noc_flavour = mesh");
        assert_eq!(RadArchitecture::parse(&text).unwrap_err(), ConfigError::UnknownKey { line: 5, key: "noc_flavour".into() });
        let text = BASE.replace("noc_freq = 1500", "");
        assert_eq!(
            RadArchitecture::parse(&text).unwrap_err(),
            ConfigError::MissingRequiredKey { line: 2, key: "noc_freq".into() }
        );
        let text = BASE.replace("adapter_freq = 1200", "");
        assert!(matches!(RadArchitecture::parse(&text).unwrap_err(), ConfigError::MissingRequiredKey { line: 9, .. }));
    }

    #[test]
    fn round_trip_through_text() {
        let mut a = RadArchitecture::parse(BASE).unwrap();
        a.sectors = Some(SectorGrid { rows: vec![vec![SectorKind::Fpga, SectorKind::Asic]; 2] });
        let again = RadArchitecture::parse(&a.to_text()).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn overrides() {
        let mut a = RadArchitecture::parse(BASE).unwrap();
        a.apply_override("noc_vc_buffer_size=2").unwrap();
        assert_eq!(a.nocs[0].vc_buffer_size, 2);
        a.apply_override("noc.0.noc_vcs = 4").unwrap();
        assert_eq!(a.nocs[0].vcs, 4);
        a.apply_override("module.npu0_disp.module_freq=250").unwrap();
        assert_eq!(a.module_freq("npu0_disp"), Some(250));
        a.apply_override("num_traces=0").unwrap();
        assert_eq!(a.telemetry.num_traces, 0);
        assert!(matches!(a.apply_override("bogus=1"), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(a.apply_override("noc.3.noc_vcs=1"), Err(ConfigError::UnknownNoc { .. })));
    }

    #[test]
    fn module_freq_resolution() {
        let a = RadArchitecture::parse(BASE).unwrap();
        assert_eq!(a.module_freq("npu0_mvu1"), Some(600));
        assert_eq!(a.module_freq("npu0_evrf"), Some(300));
    }

    #[test]
    fn glob() {
        assert!(glob_match("a*b*c", "aXXbYc"));
        assert!(glob_match("*", ""));
        assert!(!glob_match("a*b", "ab_"));
        assert!(glob_match("m*", "m"));
    }
}
