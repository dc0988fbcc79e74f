use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::engine::Ps;

use super::TelemetryError;

/// The six points at which a transaction is timestamped, in ladder order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Initiation,
    Packetization,
    Injection,
    Ejection,
    Depacketization,
    Receipt,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Initiation,
        Stage::Packetization,
        Stage::Injection,
        Stage::Ejection,
        Stage::Depacketization,
        Stage::Receipt,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Initiation => "initiation",
            Stage::Packetization => "packetization",
            Stage::Injection => "injection",
            Stage::Ejection => "ejection",
            Stage::Depacketization => "depacketization",
            Stage::Receipt => "receipt",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = TelemetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| TelemetryError::UnknownTrace(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelemetryTrace {
    pub id: u64,
    pub src: String,
    pub dest: String,
    pub times: [Option<Ps>; 6],
    pub hops: Option<u32>,
    /// Workload thread the transaction belongs to, if any.
    pub thread: Option<u32>,
}

impl TelemetryTrace {
    pub fn new(id: u64, src: impl Into<String>, dest: impl Into<String>) -> Self {
        TelemetryTrace { id, src: src.into(), dest: dest.into(), times: [None; 6], hops: None, thread: None }
    }

    pub fn time(&self, stage: Stage) -> Option<Ps> {
        self.times[stage.index()]
    }

    pub fn is_complete(&self) -> bool {
        self.times.iter().all(Option::is_some)
    }

    /// Recorded timestamps are non-decreasing in ladder order.
    pub fn ladder_ok(&self) -> bool {
        let recorded: Vec<Ps> = self.times.iter().flatten().copied().collect();
        recorded.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Trace storage. An empty stage set disables recording entirely.
#[derive(Debug, Clone, Default)]
pub struct TraceRegistry {
    registered: [bool; 6],
    enabled: bool,
    traces: BTreeMap<u64, TelemetryTrace>,
}

impl TraceRegistry {
    pub fn new(stages: &[Stage]) -> Self {
        let mut registered = [false; 6];
        for s in stages {
            registered[s.index()] = true;
        }
        TraceRegistry { registered, enabled: !stages.is_empty(), traces: BTreeMap::new() }
    }

    pub fn all_stages() -> Self {
        Self::new(&Stage::ALL)
    }

    pub fn disabled() -> Self {
        Self::new(&[])
    }

    /// Builds a registry from trace names; unknown names are rejected.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, TelemetryError> {
        let stages = names.iter().map(|n| n.as_ref().parse()).collect::<Result<Vec<Stage>, _>>()?;
        Ok(Self::new(&stages))
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn is_registered(&self, stage: Stage) -> bool {
        self.registered[stage.index()]
    }

    /// Creates the trace for a new transaction.
    pub fn open(&mut self, id: u64, src: &str, dest: &str, thread: Option<u32>) {
        if !self.enabled {
            return;
        }
        let mut t = TelemetryTrace::new(id, src, dest);
        t.thread = thread;
        self.traces.insert(id, t);
    }

    pub fn record(&mut self, id: u64, stage: Stage, time: Ps) -> Result<(), TelemetryError> {
        if !self.enabled {
            return Ok(());
        }
        if !self.registered[stage.index()] {
            return Err(TelemetryError::UnknownTrace(stage.as_str().to_string()));
        }
        let trace = self.traces.entry(id).or_insert_with(|| TelemetryTrace::new(id, "", ""));
        let slot = &mut trace.times[stage.index()];
        if slot.is_some() {
            return Err(TelemetryError::DuplicateRecord { id, stage });
        }
        *slot = Some(time);
        Ok(())
    }

    pub fn set_hops(&mut self, id: u64, hops: u32) {
        if let Some(t) = self.traces.get_mut(&id) {
            t.hops = Some(hops);
        }
    }

    pub fn get(&self, id: u64) -> Option<&TelemetryTrace> {
        self.traces.get(&id)
    }

    /// Traces in ascending id order.
    pub fn traces(&self) -> impl Iterator<Item = &TelemetryTrace> {
        self.traces.values()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// End-to-end latency split at the ladder stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LatencyBreakdown {
    /// initiation -> packetization: queued in the adapter input buffer.
    pub module_wait: Ps,
    /// packetization -> injection.
    pub injection_adapter: Ps,
    /// injection -> ejection.
    pub noc: Ps,
    /// ejection -> receipt.
    pub ejection_adapter: Ps,
}

impl LatencyBreakdown {
    pub fn end_to_end(&self) -> Ps {
        self.module_wait + self.injection_adapter + self.noc + self.ejection_adapter
    }
}

pub fn latency_breakdown(trace: &TelemetryTrace) -> Result<LatencyBreakdown, TelemetryError> {
    let get = |stage| trace.time(stage).ok_or(TelemetryError::IncompleteTrace { id: trace.id, stage });
    let init = get(Stage::Initiation)?;
    let pack = get(Stage::Packetization)?;
    let inj = get(Stage::Injection)?;
    let ej = get(Stage::Ejection)?;
    let rec = get(Stage::Receipt)?;
    Ok(LatencyBreakdown {
        module_wait: pack.saturating_sub(init),
        injection_adapter: inj.saturating_sub(pack),
        noc: ej.saturating_sub(inj),
        ejection_adapter: rec.saturating_sub(ej),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Performance {
    pub runtime_ps: Ps,
    pub ops: u64,
    pub tops: f64,
    /// Latest receipt among the transactions of each thread.
    pub thread_completion: BTreeMap<u32, Ps>,
}

/// `ops / (last receipt - first initiation)`, expressed in TOPS.
pub fn aggregate_performance(registry: &TraceRegistry, ops: u64) -> Result<Performance, TelemetryError> {
    let missing = registry.traces().filter(|t| t.time(Stage::Receipt).is_none()).count();
    if missing > 0 {
        return Err(TelemetryError::IncompleteRun(missing));
    }
    let start = registry.traces().filter_map(|t| t.time(Stage::Initiation)).min();
    let end = registry.traces().filter_map(|t| t.time(Stage::Receipt)).max();
    let runtime_ps = match (start, end) {
        (Some(s), Some(e)) => e.saturating_sub(s),
        _ => 0,
    };
    let mut thread_completion = BTreeMap::new();
    for t in registry.traces() {
        if let (Some(th), Some(r)) = (t.thread, t.time(Stage::Receipt)) {
            let e = thread_completion.entry(th).or_insert(r);
            *e = (*e).max(r);
        }
    }
    Ok(Performance { runtime_ps, ops, tops: tops(ops, runtime_ps), thread_completion })
}

/// Operations per picosecond equal tera-operations per second.
pub fn tops(ops: u64, runtime_ps: Ps) -> f64 {
    if runtime_ps == 0 {
        0.0
    } else {
        ops as f64 / runtime_ps as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(id: u64, times: [Ps; 6]) -> TraceRegistry {
        let mut r = TraceRegistry::all_stages();
        r.open(id, "a.io", "b.io", Some(0));
        for (s, t) in Stage::ALL.into_iter().zip(times) {
            r.record(id, s, t).unwrap();
        }
        r
    }

    #[test]
    fn six_records_complete_a_trace() {
        let r = full(7, [0, 1, 2, 3, 4, 5]);
        assert!(r.get(7).unwrap().is_complete());
        assert!(r.get(7).unwrap().ladder_ok());
    }

    #[test]
    fn duplicate_record_rejected() {
        let mut r = full(1, [0; 6]);
        assert!(matches!(r.record(1, Stage::Receipt, 9), Err(TelemetryError::DuplicateRecord { .. })));
    }

    #[test]
    fn unregistered_stage_is_unknown_trace() {
        let mut r = TraceRegistry::new(&[Stage::Initiation, Stage::Receipt]);
        assert!(matches!(r.record(1, Stage::Injection, 0), Err(TelemetryError::UnknownTrace(_))));
        assert!(TraceRegistry::from_names(&["initiation", "bogus"]).is_err());
    }

    #[test]
    fn disabled_registry_records_nothing() {
        let mut r = TraceRegistry::disabled();
        r.open(1, "a", "b", None);
        r.record(1, Stage::Initiation, 0).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn receipt_before_injection_breaks_ladder() {
        let r = full(1, [0, 10, 50, 60, 70, 20]);
        assert!(!r.get(1).unwrap().ladder_ok());
    }

    #[test]
    fn breakdown_degenerate_and_partition() {
        let r = full(1, [5; 6]);
        assert_eq!(latency_breakdown(r.get(1).unwrap()).unwrap(), LatencyBreakdown::default());
        let r = full(2, [0, 1250, 3000, 12000, 13750, 15000]);
        let b = latency_breakdown(r.get(2).unwrap()).unwrap();
        assert_eq!(b.end_to_end(), 15000);
        assert_eq!(b.noc, 9000);
    }

    #[test]
    fn breakdown_requires_complete_trace() {
        let mut r = TraceRegistry::all_stages();
        r.record(1, Stage::Initiation, 0).unwrap();
        assert!(matches!(latency_breakdown(r.get(1).unwrap()), Err(TelemetryError::IncompleteTrace { .. })));
    }

    #[test]
    fn tops_arithmetic() {
        let r = full(1, [0, 0, 0, 0, 0, 1_000_000]);
        let p = aggregate_performance(&r, 2_097_152).unwrap();
        assert!((p.tops - 2.097152).abs() < 1e-12);
        assert_eq!(p.thread_completion[&0], 1_000_000);
        assert_eq!(aggregate_performance(&r, 0).unwrap().tops, 0.0);
    }

    #[test]
    fn missing_receipt_is_incomplete_run() {
        let mut r = TraceRegistry::all_stages();
        r.record(1, Stage::Initiation, 0).unwrap();
        assert!(matches!(aggregate_performance(&r, 1), Err(TelemetryError::IncompleteRun(1))));
    }
}
