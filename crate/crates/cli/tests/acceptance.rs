//! Acceptance gate. Runs every primary criterion, prints one PASS/FAIL line
//! per criterion and exits nonzero when any fails.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use paretoshop_core::fixtures::{js3x3, t2};
use paretoshop_core::io::{generate_random_instance, parse_extended_json, write_extended_json, RunRecord, Store};
use paretoshop_core::solvers::{
    crossover, giffler_thompson, metropolis_accept, mutate, solve, two_point_order, CrossoverKind, Method,
    MutationKind, PriorityRule, SolverConfig,
};
use paretoshop_core::{
    brute_force_front, coverage, decode_semi_active, nondominated_filter, random_sequence, AimSession, Archive,
    FrontPoint, Instance, InstanceKind, Job, ObjectiveSpec, ObjectiveVector, OperationSequence,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const METAHEURISTICS: [Method; 3] = [Method::Hillclimb, Method::Moea, Method::Mosa];
const RULES: [PriorityRule; 6] = [
    PriorityRule::Spt,
    PriorityRule::Lpt,
    PriorityRule::Edd,
    PriorityRule::Fcfs,
    PriorityRule::Mwr,
    PriorityRule::Random,
];

fn spec(s: &str) -> ObjectiveSpec {
    s.parse().expect("valid objective list")
}

/// Random job or flow shop with release and due dates, durations from 1.
fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=7);
    let m = rng.gen_range(1..=5);
    let flow = rng.gen_bool(0.3);
    let jobs = (1..=n)
        .map(|j| {
            let ops: Vec<(usize, u64)> = if flow {
                (0..m).map(|k| (k, rng.gen_range(1..=20))).collect()
            } else {
                (0..rng.gen_range(1..=2 * m))
                    .map(|_| (rng.gen_range(0..m), rng.gen_range(1..=20)))
                    .collect()
            };
            let work: u64 = ops.iter().map(|o| o.1).sum();
            Job::new(j, rng.gen_range(0..=15), Some(work + rng.gen_range(0..=30)), &ops)
        })
        .collect();
    let kind = if flow {
        InstanceKind::FlowShop
    } else {
        InstanceKind::JobShop
    };
    Instance::new(format!("fuzz-{}", rng.gen::<u32>()), kind, m, jobs).expect("generated instance is valid")
}

fn exact_front_tiny() -> Check {
    let inst = t2();
    let spec = spec("cmax,tmax");
    let target = vec![ObjectiveVector::new(vec![7, 0])];
    let exact = brute_force_front(&inst, &spec, 100).map_err(|e| e.to_string())?;
    ensure!(exact == target, "enumeration gave {exact:?}");
    let mut slowest = Duration::ZERO;
    for (method, budget) in [
        (Method::Priority, 10),
        (Method::Hillclimb, 2000),
        (Method::Moea, 2000),
        (Method::Mosa, 2000),
    ] {
        let started = Instant::now();
        let r = solve(&inst, &spec, &SolverConfig::new(method, budget, 1)).map_err(|e| e.to_string())?;
        let took = started.elapsed();
        ensure!(
            r.archive.sorted_vectors() == target,
            "{method} returned {:?}",
            r.archive.sorted_vectors()
        );
        ensure!(took < Duration::from_secs(1), "{method} took {took:?}");
        slowest = slowest.max(took);
    }
    Ok(format!("4 methods reach {{(7,0)}}, slowest {slowest:.2?}"))
}

fn exact_front_small() -> Check {
    let started = Instant::now();
    let inst = js3x3();
    let spec = spec("cmax,csum,tmax,u");
    ensure!(
        inst.sequence_count() == 1680,
        "instance has {} sequences",
        inst.sequence_count()
    );
    let exact = brute_force_front(&inst, &spec, 100_000).map_err(|e| e.to_string())?;
    let mut tally = Vec::new();
    for method in METAHEURISTICS {
        let mut hits = 0;
        for seed in 1..=5 {
            let a = solve(&inst, &spec, &SolverConfig::new(method, 2000, seed))
                .map_err(|e| e.to_string())?
                .archive
                .sorted_vectors();
            if coverage(&a, &exact) == 1.0 && coverage(&exact, &a) == 1.0 {
                hits += 1;
            }
        }
        ensure!(hits >= 4, "{method} matched the exact front in {hits}/5 seeds");
        tally.push(format!("{method} {hits}/5"));
    }
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(format!(
        "front of {} points; {}; {took:.2?}",
        exact.len(),
        tally.join(", ")
    ))
}

fn feasibility_fuzz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for i in 0..50 {
        let inst = random_instance(&mut rng);
        for s in 0..1000 {
            let seq = random_sequence(&inst, rng.gen());
            let sched = decode_semi_active(&seq, &inst).map_err(|e| e.to_string())?;
            if let Err(v) = sched.verify(&inst) {
                return Err(format!("instance {i}, sequence {s}: {v}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} schedules, 0 violations"))
}

fn activity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let spec = spec("cmax,csum");
    for i in 0..100 {
        let inst = random_instance(&mut rng);
        let rule = RULES[i % RULES.len()];
        let (sched, _) = giffler_thompson(&inst, rule, &spec, i as u64).map_err(|e| e.to_string())?;
        ensure!(sched.verify(&inst).is_ok(), "{rule} schedule {i} is infeasible");
        if let Some((j, k)) = sched.left_shift_candidate(&inst) {
            return Err(format!(
                "{rule} schedule {i}: operation {k} of job {j} fits an earlier gap"
            ));
        }
    }
    Ok("100 schedules over 6 rules, 0 violations".into())
}

fn archive_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sizes = Vec::new();
    for k in 2..=4 {
        let vectors: Vec<ObjectiveVector> = (0..10_000)
            .map(|_| ObjectiveVector::new((0..k).map(|_| rng.gen_range(0..200)).collect()))
            .collect();
        let mut expected = nondominated_filter(&vectors);
        expected.sort();
        let mut order = vectors.clone();
        for shuffle in 0..20 {
            order.shuffle(&mut rng);
            let mut archive: Archive<()> = Archive::new();
            for v in &order {
                archive.insert(v.clone(), ());
            }
            ensure!(
                archive.sorted_vectors() == expected,
                "k={k}, shuffle {shuffle}: archive differs from filter"
            );
        }
        sizes.push(format!("k={k}: {}", expected.len()));
    }
    Ok(format!("60 shuffles exact; front sizes {}", sizes.join(", ")))
}

fn genotype_closure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut instances: Vec<Instance> = (0..20).map(|_| random_instance(&mut rng)).collect();
    instances.push(generate_random_instance(10, 10, 1, 9, None, 3).map_err(|e| e.to_string())?);
    let fresh = |rng: &mut ChaCha8Rng| {
        let inst = &instances[rng.gen_range(0..instances.len())];
        (inst, random_sequence(inst, rng.gen()), random_sequence(inst, rng.gen()))
    };
    for kind in CrossoverKind::ALL {
        for i in 0..10_000 {
            let (inst, a, b) = fresh(&mut rng);
            let child = crossover(&a, &b, kind, &mut rng).map_err(|e| e.to_string())?;
            ensure!(
                child.validate(inst).is_ok(),
                "{kind:?} application {i} broke job quotas"
            );
        }
    }
    for kind in [MutationKind::Swap, MutationKind::Shift] {
        for i in 0..10_000 {
            let (inst, a, _) = fresh(&mut rng);
            let m = mutate(&a, kind, &mut rng);
            ensure!(m.validate(inst).is_ok(), "{kind:?} application {i} broke job quotas");
        }
    }
    let p1 = OperationSequence::from_genes(vec![1, 2, 3, 1, 2, 3]);
    let p2 = OperationSequence::from_genes(vec![3, 2, 1, 3, 2, 1]);
    let child = two_point_order(&p1, &p2, 2, 3).map_err(|e| e.to_string())?;
    ensure!(
        child.genes() == [3, 2, 3, 1, 2, 1],
        "TPOX example gave {:?}",
        child.genes()
    );
    Ok("60000 applications, 0 violations; TPOX example [3,2,3,1,2,1]".into())
}

fn metropolis() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 100_000;
    let mut accepted = 0;
    for _ in 0..trials {
        if metropolis_accept(1.0, 1.0, &mut rng).map_err(|e| e.to_string())? {
            accepted += 1;
        }
    }
    let freq = accepted as f64 / trials as f64;
    let target = (-1.0f64).exp();
    if (freq - target).abs() > 0.01 {
        return Err(format!("frequency {freq:.5} vs {target:.5}"));
    }
    Ok(format!("frequency {freq:.5}, e^-1 = {target:.5}"))
}

fn aim_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for f in 0..1000 {
        let k = rng.gen_range(1..=4);
        let raw: Vec<ObjectiveVector> = (0..rng.gen_range(1..40))
            .map(|_| ObjectiveVector::new((0..k).map(|_| rng.gen_range(0..50)).collect()))
            .collect();
        let front: Vec<FrontPoint> = nondominated_filter(&raw)
            .into_iter()
            .enumerate()
            .map(|(i, vector)| FrontPoint {
                id: format!("s{i}"),
                vector,
            })
            .collect();
        let mut ids: Vec<String> = front.iter().map(|p| p.id.clone()).collect();
        ids.sort();
        let mut s = AimSession::start(front.clone()).map_err(|e| e.to_string())?;
        let worst: Vec<i64> = (0..k)
            .map(|i| front.iter().map(|p| p.vector[i] as i64).max().unwrap())
            .collect();
        ensure!(
            s.levels() == worst,
            "front {f}: start levels {:?}, maxima {worst:?}",
            s.levels()
        );
        ensure!(
            s.satisfied_count() == front.len(),
            "front {f}: start does not satisfy every point"
        );
        for step in 0..20 {
            let i = rng.gen_range(1..=k);
            let before = s.partition().satisfied;
            let old = s.levels()[i - 1];
            let new = rng.gen_range(-5..60);
            s.set_level(i, new).map_err(|e| e.to_string())?;
            let p = s.partition();
            let mut all: Vec<String> = p.satisfied.iter().chain(&p.unsatisfied).cloned().collect();
            all.sort();
            ensure!(all == ids, "front {f}, step {step}: union differs from the front");
            ensure!(
                p.satisfied.iter().all(|x| !p.unsatisfied.contains(x)),
                "front {f}, step {step}: overlap"
            );
            if new <= old {
                ensure!(
                    p.satisfied.iter().all(|x| before.contains(x)),
                    "front {f}, step {step}: tightening grew the set"
                );
            } else {
                ensure!(
                    before.iter().all(|x| p.satisfied.contains(x)),
                    "front {f}, step {step}: loosening shrank the set"
                );
            }
        }
    }

    let worked: Vec<FrontPoint> = [[3u64, 9], [5, 5], [8, 2]]
        .iter()
        .enumerate()
        .map(|(i, v)| FrontPoint {
            id: format!("s{i}"),
            vector: ObjectiveVector::new(v.to_vec()),
        })
        .collect();
    let mut s = AimSession::start(worked).map_err(|e| e.to_string())?;
    let mut counts = vec![s.satisfied_count()];
    ensure!(s.levels() == [8, 9], "worked example levels {:?}", s.levels());
    s.set_level(1, 5).map_err(|e| e.to_string())?;
    counts.push(s.satisfied_count());
    s.set_level(2, 5).map_err(|e| e.to_string())?;
    counts.push(s.satisfied_count());
    ensure!(counts == [3, 2, 1], "worked example counts {counts:?}");
    let x = s.finalize().map_err(|e| e.to_string())?;
    ensure!(x.vector.values() == [5, 5], "worked example chose {:?}", x.vector);
    Ok("1000 fronts hold; worked sequence 3 -> 2 -> 1, chose (5,5)".into())
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_paretoshop"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "`{}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

fn serve_listing(store: &Path) -> Result<String, String> {
    struct Kill(std::process::Child);
    impl Drop for Kill {
        fn drop(&mut self) {
            let _ = self.0.kill();
            let _ = self.0.wait();
        }
    }
    let mut child = Command::new(env!("CARGO_BIN_EXE_paretoshop"))
        .args(["serve", "--store", store.to_str().unwrap(), "--listen", "127.0.0.1:0"])
        .env("RUST_LOG", "warn")
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    let stderr = child.stderr.take().expect("stderr is piped");
    let _guard = Kill(child);
    let mut line = String::new();
    BufReader::new(stderr).read_line(&mut line).map_err(|e| e.to_string())?;
    let addr = line
        .trim()
        .strip_prefix("listening on ")
        .ok_or(format!("unexpected output {line:?}"))?
        .to_string();
    let mut stream = TcpStream::connect(&addr).map_err(|e| e.to_string())?;
    write!(
        stream,
        "GET /instances HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .map_err(|e| e.to_string())?;
    let mut resp = String::new();
    stream.read_to_string(&mut resp).map_err(|e| e.to_string())?;
    let body = resp.split("\r\n\r\n").nth(1).unwrap_or_default().to_string();
    ensure!(resp.starts_with("HTTP/1.1 200"), "listing failed: {resp}");
    Ok(body)
}

fn determinism() -> Check {
    let big = generate_random_instance(8, 5, 1, 20, Some(1.3), 12).map_err(|e| e.to_string())?;
    for inst in [js3x3(), big] {
        for method in Method::ALL {
            let cfg = SolverConfig::new(method, 1500, 42);
            let a = solve(&inst, &spec("cmax,csum,tmax,u"), &cfg).map_err(|e| e.to_string())?;
            let b = solve(&inst, &spec("cmax,csum,tmax,u"), &cfg).map_err(|e| e.to_string())?;
            ensure!(
                a.archive.entries() == b.archive.entries(),
                "{method} archives differ on {}",
                inst.name()
            );
            ensure!(a.evaluations == b.evaluations, "{method} evaluation counts differ");
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).display().to_string();
    std::fs::write(p("T2.json"), write_extended_json(&t2())).map_err(|e| e.to_string())?;
    std::fs::write(p("js3x3.json"), write_extended_json(&js3x3())).map_err(|e| e.to_string())?;
    std::fs::write(p("T2.jss"), "2 2\n0 3 1 2\n1 2 0 4\n").map_err(|e| e.to_string())?;
    let mut rounds: Vec<Vec<Vec<u8>>> = Vec::new();
    for round in 0..2 {
        std::fs::create_dir_all(dir.path().join(format!("round{round}"))).map_err(|e| e.to_string())?;
        let r = |s: &str| format!("round{round}/{s}");
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for m in ["priority", "hillclimb", "moea", "mosa"] {
            outputs.push(cli(&[
                "solve",
                "--instance",
                &p("js3x3.json"),
                "--method",
                m,
                "--objectives",
                "cmax,csum,tmax,u",
                "--seed",
                "3",
                "--record",
                &p(&r(m)),
                "--output",
                &p(&r(&format!("{m}-front"))),
            ])?);
            outputs.push(std::fs::read(p(&r(&format!("{m}-front")))).map_err(|e| e.to_string())?);
            let rec =
                paretoshop_core::io::read_run_record(&std::fs::read_to_string(p(&r(m))).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            outputs.push(
                serde_json::to_vec(&(&rec.front, &rec.config, &rec.spec, rec.evaluations))
                    .map_err(|e| e.to_string())?,
            );
        }
        outputs.push(cli(&[
            "compare",
            &p(&r("priority")),
            &p(&r("hillclimb")),
            &p(&r("moea")),
            &p(&r("mosa")),
        ])?);
        outputs.push(cli(&[
            "enumerate",
            "--instance",
            &p("js3x3.json"),
            "--objectives",
            "cmax,tmax",
        ])?);
        cli(&["convert", "--input", &p("T2.jss"), "--output", &p(&r("conv.json"))])?;
        outputs.push(std::fs::read(p(&r("conv.json"))).map_err(|e| e.to_string())?);
        cli(&[
            "generate",
            "--jobs",
            "6",
            "--machines",
            "4",
            "--due-factor",
            "1.4",
            "--seed",
            "8",
            "--output",
            &p(&r("gen.json")),
        ])?;
        outputs.push(std::fs::read(p(&r("gen.json"))).map_err(|e| e.to_string())?);
        let store = dir.path().join(r("store"));
        std::fs::create_dir_all(store.join("instances")).map_err(|e| e.to_string())?;
        std::fs::copy(p("T2.json"), store.join("instances/T2.json")).map_err(|e| e.to_string())?;
        outputs.push(serve_listing(&store)?.into_bytes());
        rounds.push(outputs);
    }
    if let Some(i) = (0..rounds[0].len()).find(|&i| rounds[0][i] != rounds[1][i]) {
        return Err(format!(
            "CLI output {i} differs between runs: {:?} vs {:?}",
            String::from_utf8_lossy(&rounds[0][i]),
            String::from_utf8_lossy(&rounds[1][i])
        ));
    }
    Ok(format!(
        "8 solver configurations and {} CLI outputs byte-identical across two runs",
        rounds[0].len()
    ))
}

fn round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = Store::open(dir.path()).map_err(|e| e.to_string())?;
    let specs = ["cmax", "csum,u", "cmax,tmax", "tmax,cmax,csum", "cmax,csum,tmax,u"];
    for i in 0..200 {
        let mut inst = random_instance(&mut rng);
        if rng.gen_bool(0.3) {
            let dues: Vec<u64> = inst.jobs().iter().map(|_| rng.gen_range(0..100)).collect();
            inst = inst.with_due_dates(&dues).map_err(|e| e.to_string())?;
        }
        let text = write_extended_json(&inst);
        let back = parse_extended_json(&text).map_err(|e| format!("instance {i}: {e}"))?;
        ensure!(back == inst, "instance {i} changed in a JSON round trip");

        let spec = spec(specs[i % specs.len()]);
        let mut cfg = SolverConfig::new(Method::ALL[i % 4], rng.gen_range(20..200), rng.gen());
        cfg.initial_temperature = rng.gen_range(0.5..50.0);
        cfg.archive_capacity = rng.gen_bool(0.5).then(|| rng.gen_range(1..10));
        let report = solve(&inst, &spec, &cfg).map_err(|e| e.to_string())?;
        let mut rec = RunRecord::from_report(
            &inst,
            &spec,
            &cfg,
            &report,
            Duration::from_micros(rng.gen_range(0..10_000_000)),
        );
        let id = store.save_run(&mut rec).map_err(|e| e.to_string())?;
        let loaded = store.load_run(&id).map_err(|e| e.to_string())?;
        ensure!(loaded == rec, "run record {i} changed in a store round trip");
    }
    Ok("200 instances and 200 run records unchanged".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact front, tiny instance", exact_front_tiny),
        ("exact front, 3x3 instance", exact_front_small),
        ("feasibility fuzz", feasibility_fuzz),
        ("active schedule check", activity),
        ("archive equals nondominated filter", archive_oracle),
        ("genotype closure", genotype_closure),
        ("Metropolis acceptance frequency", metropolis),
        ("aspiration-level algebra", aim_algebra),
        ("determinism", determinism),
        ("round trips", round_trips),
    ];
    let mut failed = 0;
    println!("running {} acceptance criteria", criteria.len());
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = check();
        let took = started.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{took:.2?}]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason} [{took:.2?}]");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
