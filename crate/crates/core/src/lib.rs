//! Cycle-level simulation of reconfigurable acceleration devices: FPGA
//! fabric with hardened accelerator blocks, connected by one or more
//! packet-switched networks-on-chip.
//!
//! The crate is organised bottom-up:
//!
//! * [`noc`]: topologies, routing and credit-based VC routers.
//! * [`adapter`]: clock-domain crossing, packetization and arbitration
//!   between module interfaces and a router's local port.
//! * [`engine`]: the multi-clock scheduler and the module interface.
//! * [`config`]: architecture and placement files, validation and the
//!   ASIC area estimate.
//! * [`workload`]: latency probes, random traffic and the NPU overlay.
//! * [`telemetry`]: per-transaction timestamps, latency breakdowns and
//!   CSV export.
//! * [`sweep`]: runs many independent configurations, in parallel when
//!   the `parallel` feature is on.
//!
//! Running a workload end to end:
//!
//! ```
//! use radsim_core::config::{PlacementMap, RadArchitecture};
//! use radsim_core::engine::{build_simulation, StopCondition, Termination};
//! use radsim_core::workload::WorkloadSpec;
//!
//! let arch = RadArchitecture::single_mesh(2, 2, 1000, 800).with_module_freq("*", 200);
//! let place = PlacementMap::parse("a.io 0 0\nb.io 0 3\n", &arch).unwrap();
//! let wl = WorkloadSpec::parse("kind = latency_probe\nsource = a.io\n").unwrap();
//! let mut sim = build_simulation(&arch, &place, &wl, 1).unwrap();
//! let res = sim.run_until(StopCondition::AllReceived);
//! assert_eq!(res.termination, Termination::Completed);
//! assert_eq!(res.received.len(), 2);
//! ```

pub mod adapter;
pub mod config;
pub mod engine;
pub mod noc;
pub mod sweep;
pub mod telemetry;
pub mod workload;
