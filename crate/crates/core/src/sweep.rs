//! Independent simulation runs over a set of configuration points.
//!
//! With the `parallel` feature (default) points run on a rayon pool whose
//! size is taken from `RADSIM_THREADS` when set. Results always come back in
//! input order, so output is identical to the sequential path.

use crate::config::{ConfigError, PlacementMap, RadArchitecture};
use crate::engine::{build_simulation, EngineError, SimResult, StopCondition, Termination};
use crate::telemetry::tops;
use crate::workload::WorkloadSpec;

/// One fully specified run.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub key: String,
    pub value: String,
    pub arch: RadArchitecture,
    pub placement: PlacementMap,
    pub workload: WorkloadSpec,
    pub seed: u64,
    pub stop: StopCondition,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub key: String,
    pub value: String,
    pub workload: String,
    pub termination: Termination,
    pub runtime_ps: u64,
    pub tops: f64,
    pub result: SimResult,
}

pub const SWEEP_HEADER: &str = "key,value,workload,termination,runtime_ps,tops";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6}",
            self.key,
            self.value,
            self.workload,
            self.termination.as_str(),
            self.runtime_ps,
            self.tops
        )
    }
}

/// Copies of `arch` with `key = value` applied for each value. Placement and
/// workload are shared by every point.
pub fn expand_points(
    arch: &RadArchitecture,
    placement: &PlacementMap,
    workload: &WorkloadSpec,
    key: &str,
    values: &[String],
    seed: u64,
    stop: StopCondition,
) -> Result<Vec<SweepPoint>, ConfigError> {
    values
        .iter()
        .map(|v| {
            let mut a = arch.clone();
            a.apply_override(&format!("{key}={v}"))?;
            Ok(SweepPoint {
                key: key.to_string(),
                value: v.clone(),
                arch: a,
                placement: placement.clone(),
                workload: workload.clone(),
                seed,
                stop,
            })
        })
        .collect()
}

pub fn run_point(p: &SweepPoint) -> Result<SweepRow, EngineError> {
    let mut sim = build_simulation(&p.arch, &p.placement, &p.workload, p.seed)?;
    let result = sim.run_until(p.stop);
    Ok(SweepRow {
        key: p.key.clone(),
        value: p.value.clone(),
        workload: p.workload.kind().to_string(),
        termination: result.termination,
        runtime_ps: result.total_time,
        tops: if result.total_time == 0 { 0.0 } else { tops(result.ops, result.total_time) },
        result,
    })
}

pub fn run_points_sequential(points: &[SweepPoint]) -> Vec<Result<SweepRow, EngineError>> {
    points.iter().map(run_point).collect()
}

#[cfg(feature = "parallel")]
pub fn run_points_parallel(points: &[SweepPoint]) -> Vec<Result<SweepRow, EngineError>> {
    use rayon::prelude::*;
    let threads = std::env::var("RADSIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(run_point).collect()),
        Err(_) => run_points_sequential(points),
    }
}

/// Runs every point, in parallel when the `parallel` feature is enabled.
pub fn run_points(points: &[SweepPoint]) -> Vec<Result<SweepRow, EngineError>> {
    #[cfg(feature = "parallel")]
    {
        run_points_parallel(points)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_points_sequential(points)
    }
}
