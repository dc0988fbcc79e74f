//! Application-side models: latency probes, random traffic and an NPU
//! overlay built from chained matrix-vector, vector-register, multi-function
//! and loader blocks.
//!
//! Workload files use the same `key = value` grammar as architecture files.
//! NPU programs live in `[thread.<i>]` sections (or `[thread.*]` for every
//! thread without its own section) as `layer = <family> key=value ...` or
//! `inst ...` lines.

mod npu;
mod spec;
mod traffic;

use thiserror::Error;

pub use npu::{
    build_npu, expand_layer, instruction_ops, mvu_cycles, out_chunks, workload_ops, BlockLatency, LdDest, MfuOp,
    MvuMapping, NpuConfig, NpuInstruction, NpuTag, NpuMsg, NPU_PORT,
};
pub use spec::{LatencyProbeSpec, NpuTraceSpec, RandomUniformSpec, WorkloadKind, WorkloadSpec};
pub use traffic::{generate_latency_probe, ProbeSource, RandomTraffic, Sink};

use crate::config::{ModuleKind, PlacementMap, RadArchitecture};
use crate::engine::{Directory, ModuleDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkloadError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("workload does not fit: {0}")]
    OversizedWorkload(String),
    #[error("port {module}.{port} is not placed")]
    UnplacedPort { module: String, port: String },
    #[error("module `{module}` must be {expected} but is placed as {found}")]
    KindMismatch { module: String, expected: ModuleKind, found: ModuleKind },
    #[error("{0}")]
    Invalid(String),
}

/// Modules of a workload together with the operations they represent.
pub struct Instance {
    pub modules: Vec<ModuleDecl>,
    pub ops: u64,
}

/// Creates the module set for `spec` on the given placement.
pub fn instantiate(
    spec: &WorkloadSpec,
    arch: &RadArchitecture,
    placement: &PlacementMap,
    seed: u64,
) -> Result<Instance, WorkloadError> {
    match spec {
        WorkloadSpec::LatencyProbe(p) => traffic::instantiate_probe(p, placement),
        WorkloadSpec::RandomUniform(r) => traffic::instantiate_random(r, placement, seed),
        WorkloadSpec::NpuTrace(n) => {
            let modules = build_npu(n, arch, placement)?;
            Ok(Instance { modules, ops: workload_ops(n) })
        }
    }
}

/// All placed modules with their placed ports, in name order.
pub(crate) fn placed_directory(placement: &PlacementMap) -> Directory {
    let modules: Vec<(String, Vec<String>)> = placement
        .modules()
        .map(|m| {
            let ports = placement.entries().iter().filter(|e| e.module == m).map(|e| e.port.clone()).collect();
            (m.to_string(), ports)
        })
        .collect();
    Directory::new(modules)
}
