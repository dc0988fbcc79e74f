use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::noc::Port;

use super::{NocCounters, Stage, TelemetryError, TraceRegistry};

pub const TRACES_CSV: &str = "traces.csv";
pub const COUNTERS_CSV: &str = "noc_counters.csv";
pub const TRACES_HEADER: &str =
    "id,src,dest,initiation_ps,packetization_ps,injection_ps,ejection_ps,depacketization_ps,receipt_ps,hops";
pub const COUNTERS_HEADER: &str = "noc,router,port,flits_forwarded,credit_stall_cycles,peak_vc_occupancy";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportReport {
    pub trace_rows: usize,
    pub counter_rows: usize,
    /// Transactions whose recorded timestamps are out of ladder order.
    pub ladder_violations: Vec<u64>,
}

pub fn traces_csv(registry: &TraceRegistry) -> String {
    let mut out = String::with_capacity(64 * (registry.len() + 1));
    out.push_str(TRACES_HEADER);
    out.push('\n');
    for t in registry.traces() {
        write!(out, "{},{},{}", t.id, t.src, t.dest).unwrap();
        for s in Stage::ALL {
            match t.time(s) {
                Some(v) => write!(out, ",{v}").unwrap(),
                None => out.push(','),
            }
        }
        match t.hops {
            Some(h) => writeln!(out, ",{h}").unwrap(),
            None => out.push_str(",\n"),
        }
    }
    out
}

pub fn counters_csv(counters: &[NocCounters]) -> String {
    let mut out = String::new();
    out.push_str(COUNTERS_HEADER);
    out.push('\n');
    for n in counters {
        for (r, ports) in n.routers.iter().enumerate() {
            for p in Port::ALL {
                let c = &ports[p.index()];
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    n.noc,
                    r,
                    p.as_str(),
                    c.flits_forwarded,
                    c.credit_stall_cycles,
                    c.peak_vc_occupancy
                )
                .unwrap();
            }
        }
    }
    out
}

/// Writes `traces.csv` and `noc_counters.csv` into `dir`.
pub fn export_csv(registry: &TraceRegistry, counters: &[NocCounters], dir: &Path) -> Result<ExportReport, TelemetryError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| TelemetryError::IoFailure { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let tp = dir.join(TRACES_CSV);
    fs::write(&tp, traces_csv(registry)).map_err(io(&tp))?;
    let cp = dir.join(COUNTERS_CSV);
    fs::write(&cp, counters_csv(counters)).map_err(io(&cp))?;
    Ok(ExportReport {
        trace_rows: registry.len(),
        counter_rows: counters.iter().map(|n| n.routers.len() * Port::ALL.len()).sum(),
        ladder_violations: registry.traces().filter(|t| !t.ladder_ok()).map(|t| t.id).collect(),
    })
}
