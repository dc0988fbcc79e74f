use super::arch::MAX_VCS;
use super::{ModuleKind, PlacementMap, RadArchitecture, SectorKind};

/// Cross-checks an architecture and a placement. An empty list means the
/// pair can be simulated.
pub fn validate(arch: &RadArchitecture, placement: &PlacementMap) -> Vec<String> {
    let mut diags = Vec::new();
    if arch.nocs.is_empty() {
        diags.push("architecture declares no NoC".to_string());
    }
    for (i, n) in arch.nocs.iter().enumerate() {
        if n.vcs == 0 || n.vcs > MAX_VCS {
            diags.push(format!("noc {i}: noc_vcs = {} is outside 1..={MAX_VCS}", n.vcs));
        }
        if n.vc_buffer_size == 0 || n.pipeline_depth == 0 || n.dim_x == 0 || n.dim_y == 0 || n.freq_mhz == 0 {
            diags.push(format!("noc {i}: dimensions, depths and frequency must be at least 1"));
        }
        if n.payload_width == 0 || n.payload_width % 8 != 0 {
            diags.push(format!("noc {i}: noc_payload_width must be a positive multiple of 8"));
        }
        let max_vc = arch.adapter.vc_mapping.max_vc();
        if max_vc >= n.vcs {
            diags.push(format!(
                "noc {i}: adapter_vc_mapping uses VC {max_vc} but only VCs 0..{} exist",
                n.vcs.saturating_sub(1)
            ));
        }
        if let Some(grid) = &arch.sectors {
            if grid.dims() != (n.dim_x, n.dim_y) {
                let (gx, gy) = grid.dims();
                diags.push(format!("noc {i}: sector grid is {gx}x{gy} but noc_dim is {}x{}", n.dim_x, n.dim_y));
            }
        }
    }
    let a = &arch.adapter;
    if a.interfaces == 0 || a.fifo_size == 0 || a.obuff_size == 0 || a.freq_mhz == 0 || a.max_transaction_bytes == 0 {
        diags.push("adapter sizes and frequency must be at least 1".to_string());
    }
    let t = &arch.telemetry;
    if t.num_traces != 0 && t.num_traces != t.trace_names.len() {
        diags.push(format!("num_traces = {} but {} trace_names are listed", t.num_traces, t.trace_names.len()));
    }

    if placement.is_empty() {
        diags.push("placement is empty".to_string());
    }
    for name in arch.module_freqs.keys().filter(|n| !n.contains('*')) {
        if placement.kind(name).is_none() {
            diags.push(format!("module `{name}` has a clock but no placed ports"));
        }
    }
    for e in placement.entries() {
        let kind = placement.kind(&e.module).unwrap_or_default();
        if arch.module_freq(&e.module).is_none() {
            diags.push(format!("line {}: module `{}` has no module_freq", e.line, e.module));
        }
        let sector = match &arch.sectors {
            Some(grid) if arch.nocs.get(e.noc).is_some_and(|n| grid.dims() == (n.dim_x, n.dim_y)) => grid.kind_of(e.router),
            Some(_) => None,
            None => Some(SectorKind::Fpga),
        };
        match (kind, sector) {
            (ModuleKind::Hard, Some(SectorKind::Fpga)) => diags.push(format!(
                "line {}: hard module `{}` is placed on fpga sector {}",
                e.line, e.module, e.router
            )),
            (ModuleKind::Soft, Some(SectorKind::Asic)) => diags.push(format!(
                "line {}: soft module `{}` is placed on asic sector {}",
                e.line, e.module, e.router
            )),
            _ => {}
        }
    }
    diags
}
