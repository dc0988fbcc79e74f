use criterion::{criterion_group, criterion_main, Criterion};
use radsim_core::config::{PlacementMap, RadArchitecture};
use radsim_core::engine::StopCondition;
use radsim_core::sweep::{expand_points, run_points_sequential, SweepPoint};
use radsim_core::workload::WorkloadSpec;

fn points() -> Vec<SweepPoint> {
    let arch = RadArchitecture::single_mesh(4, 4, 1000, 800).with_module_freq("*", 250);
    let place: String = (0..16).map(|r| format!("m{r}.io 0 {r}\n")).collect();
    let place = PlacementMap::parse(&place, &arch).unwrap();
    let wl = WorkloadSpec::parse("kind = random_uniform\ninjection_rate = 0.05\nduration = 400\n").unwrap();
    let values: Vec<String> = ["2", "4", "6", "8"].iter().map(|s| s.to_string()).collect();
    expand_points(&arch, &place, &wl, "noc_vc_buffer_size", &values, 7, StopCondition::AllReceived).unwrap()
}

fn bench(c: &mut Criterion) {
    let pts = points();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| run_points_sequential(&pts)));
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| b.iter(|| radsim_core::sweep::run_points_parallel(&pts)));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
