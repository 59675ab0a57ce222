use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use paretoshop_core::io::{
    generate_random_instance, load_instance_file, read_run_record, InstanceFormat, RunRecord, Store,
};
use paretoshop_core::solvers::{self, SolverConfig};
use paretoshop_core::{brute_force_front, coverage, Error, Instance, ObjectiveVector};
use paretoshop_service::ServiceConfig;

use crate::{CompareArgs, ConvertArgs, EnumerateArgs, GenerateArgs, MethodParams, ServeArgs, SolveArgs};

pub const USAGE: u8 = 2;
pub const INPUT: u8 = 3;
pub const SOLVER: u8 = 4;
pub const REFUSED: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Schema { .. }
            | Error::Instance(_)
            | Error::Io(_)
            | Error::Integrity(_)
            | Error::NotFound(_) => INPUT,
            Error::EnumerationTooLarge { .. } => REFUSED,
            _ => SOLVER,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(INPUT, format!("{}: {e}", path.display()))
}

fn format_of(path: &Path) -> Result<InstanceFormat, Failure> {
    InstanceFormat::from_path(path).ok_or_else(|| {
        Failure::new(
            USAGE,
            format!(
                "{}: unknown instance format (expected .jss, .fsp or .json)",
                path.display()
            ),
        )
    })
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    format_of(path)?;
    load_instance_file(path).map_err(|e| match e {
        Error::Io(io) => io_failure(path, io),
        other => Failure::new(INPUT, format!("{}: {other}", path.display())),
    })
}

fn write_new(path: &Path, text: &str, force: bool) -> Outcome {
    if path.exists() && !force {
        return Err(Failure::new(
            USAGE,
            format!("{} exists; pass --force to overwrite", path.display()),
        ));
    }
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn front_json(vectors: &[ObjectiveVector]) -> String {
    serde_json::to_string(vectors).expect("vectors serialize")
}

fn apply(params: MethodParams, cfg: &mut SolverConfig) {
    let MethodParams {
        population,
        crossover,
        crossover_probability,
        mutation,
        mutation_probability,
        elitism,
        neighborhood,
        climbers,
        weights,
        temperature,
        cooling,
        chain_length,
        archive_capacity,
    } = params;
    macro_rules! set {
        ($($src:ident => $dst:ident),*) => {$(
            if let Some(v) = $src {
                cfg.$dst = v;
            }
        )*};
    }
    set!(
        population => population_size,
        crossover => crossover,
        crossover_probability => crossover_probability,
        mutation => mutation,
        mutation_probability => mutation_probability,
        elitism => elitism_fraction,
        neighborhood => neighborhood,
        climbers => climbers,
        weights => weight_count,
        temperature => initial_temperature,
        cooling => cooling_factor,
        chain_length => chain_length
    );
    if archive_capacity.is_some() {
        cfg.archive_capacity = archive_capacity;
    }
}

pub fn solve(args: SolveArgs) -> Outcome {
    let inst = read_instance(&args.instance)?;
    let mut cfg = SolverConfig::new(args.method, args.budget, args.seed);
    apply(args.params, &mut cfg);
    cfg.validate()?;
    let started = Instant::now();
    let report = solvers::solve(&inst, &args.objectives, &cfg)?;
    let mut record = RunRecord::from_report(&inst, &args.objectives, &cfg, &report, started.elapsed());
    log::info!("{} evaluations in {} ms", record.evaluations, record.wall_time_ms);

    if let Some(dir) = &args.store {
        let store = Store::open(dir)?;
        let id = store.save_run(&mut record)?;
        eprintln!("saved run {id} in {}", dir.display());
    }
    if let Some(path) = &args.record {
        let text = serde_json::to_string_pretty(&record).expect("records serialize");
        fs::write(path, text + "\n").map_err(|e| io_failure(path, e))?;
    }
    let front = front_json(&record.vectors());
    match &args.output {
        Some(path) => fs::write(path, front + "\n").map_err(|e| io_failure(path, e)),
        None => {
            println!("{front}");
            Ok(())
        }
    }
}

fn read_record(path: &PathBuf) -> Result<RunRecord, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    read_run_record(&text).map_err(|e| Failure::new(INPUT, format!("{}: {e}", path.display())))
}

pub fn compare(args: CompareArgs) -> Outcome {
    let records = args.runs.iter().map(read_record).collect::<Result<Vec<_>, _>>()?;
    let first = &records[0];
    for (r, path) in records.iter().zip(&args.runs).skip(1) {
        if r.spec != first.spec {
            return Err(Failure::new(
                USAGE,
                format!(
                    "{} uses objectives {} but the first run uses {}",
                    path.display(),
                    r.spec,
                    first.spec
                ),
            ));
        }
        if r.instance != first.instance {
            return Err(Failure::new(
                USAGE,
                format!(
                    "{} solves {} but the first run solves {}",
                    path.display(),
                    r.instance,
                    first.instance
                ),
            ));
        }
    }
    let labels: Vec<String> = args
        .runs
        .iter()
        .map(|p| {
            p.file_stem()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
        })
        .collect();
    let width = labels.iter().map(String::len).max().unwrap_or(0).max(5);
    let fronts: Vec<Vec<ObjectiveVector>> = records.iter().map(RunRecord::vectors).collect();
    let mut out = format!("{:width$}", "");
    for l in &labels {
        out.push_str(&format!("  {l:>width$}"));
    }
    out.push('\n');
    for (a, la) in fronts.iter().zip(&labels) {
        out.push_str(&format!("{la:width$}"));
        for b in &fronts {
            out.push_str(&format!("  {:>width$.3}", coverage(a, b)));
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

pub fn enumerate(args: EnumerateArgs) -> Outcome {
    let inst = read_instance(&args.instance)?;
    let front = brute_force_front(&inst, &args.objectives, args.limit)?;
    println!("{}", front_json(&front));
    Ok(())
}

pub fn convert(args: ConvertArgs) -> Outcome {
    let out_format = format_of(&args.output)?;
    let inst = read_instance(&args.input)?;
    let text = out_format
        .write(&inst)
        .map_err(|e| Failure::new(USAGE, format!("cannot write {}: {e}", args.output.display())))?;
    write_new(&args.output, &text, args.force)
}

pub fn generate(args: GenerateArgs) -> Outcome {
    let format = format_of(&args.output)?;
    let mut inst = generate_random_instance(
        args.jobs,
        args.machines,
        args.min_duration,
        args.max_duration,
        args.due_factor,
        args.seed,
    )
    .map_err(|e| Failure::new(USAGE, e.to_string()))?;
    if let Some(name) = args.name {
        inst.set_name(name);
    }
    let text = format
        .write(&inst)
        .map_err(|e| Failure::new(USAGE, format!("cannot write {}: {e}", args.output.display())))?;
    write_new(&args.output, &text, args.force)
}

pub fn serve(args: ServeArgs) -> Outcome {
    let mut config = ServiceConfig::new(args.store, args.listen);
    if let Some(w) = args.workers {
        config.workers = w;
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(INPUT, e.to_string()))?;
    runtime
        .block_on(paretoshop_service::serve(config, |addr| {
            eprintln!("listening on {addr}")
        }))
        .map_err(|e| Failure::new(INPUT, format!("service stopped: {e}")))
}
