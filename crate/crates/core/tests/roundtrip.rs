use std::time::Duration;

use paretoshop_core::io::{parse_extended_json, read_run_record, write_extended_json, RunRecord, Store};
use paretoshop_core::solvers::{solve, Method, SolverConfig};
use paretoshop_core::{Instance, InstanceKind, Job, ObjectiveSpec};
use proptest::prelude::*;

fn instances() -> impl Strategy<Value = Instance> {
    (1usize..=4, 1usize..=5, any::<bool>(), "[a-z0-9_-]{0,12}").prop_flat_map(|(m, n, flow, name)| {
        let job = (
            0u64..50,
            proptest::option::of(0u64..200),
            prop::collection::vec((0..m, 0u64..30), if flow { m..=m } else { 1..=6 }),
        );
        prop::collection::vec(job, n).prop_map(move |jobs| {
            let jobs = jobs
                .into_iter()
                .enumerate()
                .map(|(j, (r, d, mut ops))| {
                    if flow {
                        ops.iter_mut().enumerate().for_each(|(k, op)| op.0 = k);
                    }
                    Job::new(j + 1, r, d, &ops)
                })
                .collect();
            let kind = if flow {
                InstanceKind::FlowShop
            } else {
                InstanceKind::JobShop
            };
            Instance::new(name.clone(), kind, m, jobs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extended_json_round_trip(inst in instances()) {
        let text = write_extended_json(&inst);
        let back = parse_extended_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_extended_json(&back), text);
    }

    #[test]
    fn run_record_round_trip(inst in instances(), seed in 0u64..1000, m in 0usize..4) {
        let spec: ObjectiveSpec = "cmax,csum".parse().unwrap();
        let cfg = SolverConfig::new(Method::ALL[m], 60, seed);
        let report = solve(&inst, &spec, &cfg).unwrap();
        let mut rec = RunRecord::from_report(&inst, &spec, &cfg, &report, Duration::from_millis(seed));
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let id = store.save_run(&mut rec).unwrap();
        let back = store.load_run(&id).unwrap();
        prop_assert_eq!(&back, &rec);
        let text = serde_json::to_string(&rec).unwrap();
        prop_assert_eq!(read_run_record(&text).unwrap(), rec);
    }
}
