mod common;

use proptest::prelude::*;
use radsim_core::adapter::TransactionKind;
use radsim_core::config::{estimate_asic_area, AreaComposition, NocConfig, PlacementMap, RadArchitecture};
use radsim_core::noc::{min_hops, next_hop_dimension_order, NocTopology, Port};
use radsim_core::telemetry::Stage;

use common::{bfs_hops, cdc_lossless, check_conservation, check_no_loss, csv_pair, random_run, roundtrip, CDC_FREQS};

fn kind() -> impl Strategy<Value = TransactionKind> {
    prop::sample::select(TransactionKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn packet_round_trip(
        data in prop::collection::vec(any::<u8>(), 0..=512),
        width in prop::sample::select(vec![32usize, 64, 128, 256, 512]),
        kind in kind(),
    ) {
        let n = roundtrip(data.clone(), width, kind).map_err(TestCaseError::fail)?;
        prop_assert_eq!(n, if data.is_empty() { 1 } else { 1 + (8 * data.len()).div_ceil(width) });
    }

    #[test]
    fn cdc_is_lossless(
        w in prop::sample::select(CDC_FREQS.to_vec()),
        r in prop::sample::select(CDC_FREQS.to_vec()),
        depth in 1usize..8,
        k in 1u64..300,
    ) {
        cdc_lossless(w, r, depth, k).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn min_hops_matches_bfs(dx in 1usize..=8, dy in 1usize..=8, torus: bool, a in 0usize..64, b in 0usize..64) {
        let n = dx * dy;
        let (s, d) = (a % n, b % n);
        let topo = if torus { NocTopology::torus(dx, dy) } else { NocTopology::mesh(dx, dy) };
        prop_assert_eq!(min_hops(s, d, &topo).unwrap(), bfs_hops(dx, dy, torus, s, d));
    }

    #[test]
    fn dimension_order_walk_is_minimal(dx in 1usize..=8, dy in 1usize..=8, torus: bool, a in 0usize..64, b in 0usize..64) {
        let n = dx * dy;
        let (s, d) = (a % n, b % n);
        let topo = if torus { NocTopology::torus(dx, dy) } else { NocTopology::mesh(dx, dy) };
        let mut cur = s;
        let mut steps = 0;
        let mut turned = false;
        loop {
            let p = next_hop_dimension_order(cur, d, &topo).unwrap();
            if p == Port::Local {
                break;
            }
            // X moves never follow Y moves
            if p.is_x() {
                prop_assert!(!turned);
            } else {
                turned = true;
            }
            cur = topo.neighbor(cur, p).unwrap();
            steps += 1;
            prop_assert!(steps <= n);
        }
        prop_assert_eq!(cur, d);
        prop_assert_eq!(steps, bfs_hops(dx, dy, torus, s, d));
    }

    #[test]
    fn area_is_linear_in_sectors(f0 in 0.0f64..1.0, split in 0.0f64..1.0, r in prop::array::uniform3(1.0f64..40.0), s in 0.1f64..20.0, k in 0.1f64..10.0) {
        let f1 = (1.0 - f0) * split;
        let fr = [f0, f1, 1.0 - f0 - f1];
        let comp = |sectors: f64, ratios: [f64; 3]| {
            let names = ["x", "y", "z"].map(String::from);
            AreaComposition::new(names.clone().into_iter().zip(fr), names.into_iter().zip(ratios), sectors).unwrap()
        };
        let base = estimate_asic_area(&comp(s, r));
        prop_assert!((estimate_asic_area(&comp(k * s, r)) - k * base).abs() <= 1e-9 * (1.0 + k * base));
        // never larger than the FPGA area it replaces
        prop_assert!(base <= s + 1e-12);
        // a higher density ratio never increases the area
        let denser = [r[0] * 1.5, r[1], r[2]];
        prop_assert!(estimate_asic_area(&comp(s, denser)) <= base + 1e-12);
    }

    #[test]
    fn architecture_text_round_trip(
        dx in 1usize..12, dy in 1usize..12, f in 100u32..2000, af in 100u32..2000,
        vcs in 1usize..=4, buf in 1usize..32, depth in 1u32..8, width in prop::sample::select(vec![64usize, 128, 256]),
        torus: bool, modf in 50u32..900, quiet in 100u64..50_000,
    ) {
        let mut arch = RadArchitecture::single_mesh(dx, dy, f, af).with_module_freq("m*", modf);
        arch.nocs.push(NocConfig { vcs, vc_buffer_size: buf, pipeline_depth: depth, payload_width: width, ..NocConfig::new(dy, dx, f) });
        if torus {
            arch.apply_override("noc.1.noc_topology=torus").unwrap();
        }
        arch.quiescence_cycles = quiet;
        let again = RadArchitecture::parse(&arch.to_text()).unwrap();
        prop_assert_eq!(&again, &arch);
        let place_text: String = (0..dx * dy).map(|r| format!("m{r}.io 0 {r}\nm{r}.aux 1 {}\n", r % (dx * dy))).collect();
        let place = PlacementMap::parse(&place_text, &arch).unwrap();
        prop_assert_eq!(PlacementMap::parse(&place.to_text(), &arch).unwrap(), place);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_traffic_conserves_flits(seed: u64, dim in 2usize..=5, rate in 0.02f64..0.4, torus: bool) {
        let (res, census) = random_run(dim, 2, torus, rate, 200, seed);
        if torus {
            check_no_loss(&res, &census).map_err(TestCaseError::fail)?;
        } else {
            check_conservation(&res, &census).map_err(TestCaseError::fail)?;
        }
        for t in res.telemetry.traces().filter(|t| t.is_complete()) {
            prop_assert!(t.ladder_ok(), "trace {} out of order", t.id);
        }
        if !torus {
            prop_assert!(res.telemetry.traces().all(|t| t.is_complete()));
        }
    }

    #[test]
    fn mesh_hops_equal_manhattan_under_load(seed: u64, dim in 2usize..=6) {
        let (res, _) = random_run(dim, 1, false, 0.2, 150, seed);
        for t in res.telemetry.traces() {
            let r = |label: &str| label[1..].split('_').next().unwrap().parse::<usize>().unwrap();
            prop_assert_eq!(t.hops.unwrap() as usize, bfs_hops(dim, dim, false, r(&t.src), r(&t.dest)));
            prop_assert!(t.time(Stage::Ejection) >= t.time(Stage::Injection));
        }
    }

    #[test]
    fn saturated_mesh_never_deadlocks(seed: u64, dim in 2usize..=5) {
        let (res, census) = random_run(dim, 2, false, 1.0, 150, seed);
        check_conservation(&res, &census).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn identical_runs_give_identical_csv(seed: u64) {
        let (a, _) = random_run(3, 2, false, 0.15, 200, seed);
        let (b, _) = random_run(3, 2, false, 0.15, 200, seed);
        prop_assert!(csv_pair(&a) == csv_pair(&b));
    }
}

#[test]
fn ten_thousand_packets_on_4x4_and_8x8() {
    for (dim, per_router, rate, duration) in [(4, 2, 0.3, 1100), (8, 1, 0.2, 800)] {
        let (res, census) = random_run(dim, per_router, false, rate, duration, 3);
        check_conservation(&res, &census).unwrap();
        assert!(res.sent.len() >= 10_000, "{dim}x{dim}: {} packets", res.sent.len());
    }
}
