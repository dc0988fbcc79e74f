//! `radsim`: run a workload on a device description, sweep one parameter, or
//! verify payload integrity.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 deadlock suspected
//! or deadline hit before completion, 3 integrity mismatch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use radsim_core::config::{PlacementMap, RadArchitecture};
use radsim_core::engine::{build_simulation, SimResult, StopCondition, Termination};
use radsim_core::sweep::{expand_points, run_points, SWEEP_HEADER};
use radsim_core::telemetry::{export_csv, tops};
use radsim_core::workload::WorkloadSpec;

#[derive(Parser)]
#[command(name = "radsim", version, about = "Cycle-level simulator for reconfigurable acceleration devices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one configuration and write telemetry.
    Run(Common),
    /// Simulate the configuration once per value of one architecture key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Architecture key to vary, e.g. `noc_vc_buffer_size`.
        #[arg(long)]
        sweep_key: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        sweep_values: Vec<String>,
    },
    /// Simulate and check that every payload arrived intact.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Digest file from an earlier run to compare against.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    arch: PathBuf,
    #[arg(long)]
    place: PathBuf,
    #[arg(long)]
    workload: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "radsim_out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Architecture override `key=value`; repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
    /// `all`, `time:<ps>` or `cycles:<domain>:<n>`.
    #[arg(long, default_value = "all")]
    stop: String,
}

enum Failure {
    Config(anyhow::Error),
    Stalled(String),
    Mismatch(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn parse_stop(s: &str) -> Result<StopCondition> {
    let parts: Vec<&str> = s.split(':').collect();
    Ok(match parts.as_slice() {
        ["all"] => StopCondition::AllReceived,
        ["time", ps] => StopCondition::MaxTime(ps.parse().context("time:<ps> needs an integer")?),
        ["cycles", d, n] => StopCondition::MaxCycles {
            domain: d.parse().context("cycles:<domain>:<n> needs an integer domain")?,
            cycles: n.parse().context("cycles:<domain>:<n> needs an integer count")?,
        },
        _ => bail!("unknown stop condition `{s}`"),
    })
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

struct Loaded {
    arch: RadArchitecture,
    place: PlacementMap,
    workload: WorkloadSpec,
    stop: StopCondition,
}

fn load(c: &Common) -> Result<Loaded> {
    let mut arch = RadArchitecture::parse(&read(&c.arch)?).with_context(|| format!("in {}", c.arch.display()))?;
    for s in &c.sets {
        arch.apply_override(s).with_context(|| format!("--set {s}"))?;
    }
    let place = PlacementMap::parse(&read(&c.place)?, &arch).with_context(|| format!("in {}", c.place.display()))?;
    let workload = WorkloadSpec::parse(&read(&c.workload)?).with_context(|| format!("in {}", c.workload.display()))?;
    Ok(Loaded { arch, place, workload, stop: parse_stop(&c.stop)? })
}

fn digests(res: &SimResult) -> String {
    let mut s = String::new();
    for (id, d) in &res.sent {
        writeln!(s, "{id} {}", hex::encode(d)).unwrap();
    }
    s
}

fn summary(res: &SimResult, ladder_violations: usize) -> String {
    let mut s = String::new();
    writeln!(s, "termination = {}", res.termination.as_str()).unwrap();
    writeln!(s, "total_time_ps = {}", res.total_time).unwrap();
    writeln!(s, "sent = {}", res.sent.len()).unwrap();
    writeln!(s, "received = {}", res.received.len()).unwrap();
    writeln!(s, "outstanding = {}", res.outstanding()).unwrap();
    writeln!(s, "mismatches = {}", res.mismatches.len()).unwrap();
    writeln!(s, "ops = {}", res.ops).unwrap();
    writeln!(s, "tops = {:.6}", tops(res.ops, res.total_time)).unwrap();
    writeln!(s, "ladder_violations = {ladder_violations}").unwrap();
    for d in &res.domains {
        let cycles = res.cycles_per_domain.get(&d.id).copied().unwrap_or(0);
        writeln!(s, "domain.{}.freq_mhz = {}", d.id, d.freq_mhz).unwrap();
        writeln!(s, "domain.{}.cycles = {cycles}", d.id).unwrap();
    }
    s
}

fn write_outputs(out: &Path, res: &SimResult) -> Result<String> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let report = export_csv(&res.telemetry, &res.counters, out)?;
    let text = summary(res, report.ladder_violations.len());
    fs::write(out.join("summary.txt"), &text)?;
    fs::write(out.join("sent_digests.txt"), digests(res))?;
    Ok(text)
}

fn simulate(l: &Loaded, seed: u64) -> Result<SimResult> {
    let mut sim = build_simulation(&l.arch, &l.place, &l.workload, seed)?;
    Ok(sim.run_until(l.stop))
}

/// A deadline counts as a failure only when the run was meant to drain.
fn finish(res: &SimResult, stop: StopCondition) -> Result<(), Failure> {
    match res.termination {
        Termination::Completed => Ok(()),
        Termination::DeadlineExceeded if !matches!(stop, StopCondition::AllReceived) => Ok(()),
        t => Err(Failure::Stalled(format!("{} with {} transactions outstanding", t.as_str(), res.outstanding()))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Run(c) => {
            let l = load(&c)?;
            let res = simulate(&l, c.seed)?;
            print!("{}", write_outputs(&c.out, &res)?);
            finish(&res, l.stop)
        }
        Cmd::Sweep { common: c, sweep_key, sweep_values } => {
            let l = load(&c)?;
            let points = expand_points(&l.arch, &l.place, &l.workload, &sweep_key, &sweep_values, c.seed, l.stop)
                .with_context(|| format!("--sweep-key {sweep_key}"))?;
            let mut csv = format!("{SWEEP_HEADER}\n");
            let mut stalled = Vec::new();
            for row in run_points(&points) {
                let row = row.map_err(anyhow::Error::from)?;
                if row.termination == Termination::DeadlockSuspected {
                    stalled.push(row.value.clone());
                }
                csv.push_str(&row.csv_line());
                csv.push('\n');
            }
            fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
            fs::write(c.out.join("sweep.csv"), &csv).map_err(anyhow::Error::from)?;
            print!("{csv}");
            if stalled.is_empty() {
                Ok(())
            } else {
                Err(Failure::Stalled(format!("deadlock suspected for {sweep_key} = {}", stalled.join(","))))
            }
        }
        Cmd::Verify { common: c, expected } => {
            let l = load(&c)?;
            let res = simulate(&l, c.seed)?;
            print!("{}", write_outputs(&c.out, &res)?);
            if !res.mismatches.is_empty() {
                return Err(Failure::Mismatch(format!("{} payloads corrupted", res.mismatches.len())));
            }
            if let Some(p) = expected {
                let want = read(&p)?;
                if want != digests(&res) {
                    return Err(Failure::Mismatch(format!("sent digests differ from {}", p.display())));
                }
            }
            finish(&res, l.stop)?;
            if res.outstanding() > 0 {
                return Err(Failure::Mismatch(format!("{} transactions never arrived", res.outstanding())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Stalled(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
