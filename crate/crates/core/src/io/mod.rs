//! Instance formats, the random instance generator and run persistence.

mod formats;
mod store;

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, InstanceKind, Job, Time};

pub use formats::{
    instance_from_value, instance_to_value, parse_extended_json, parse_flowshop, parse_orlib_jobshop,
    write_extended_json, write_flowshop, write_orlib_jobshop,
};
pub use store::{new_run_id, read_run_record, valid_name, FrontEntry, RunRecord, Store};

/// On-disk instance formats, chosen by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceFormat {
    /// `.jss`, OR-Library job shop.
    OrLib,
    /// `.fsp`, flow shop duration matrix.
    FlowShop,
    /// `.json`, extended format with release and due dates.
    Json,
}

impl InstanceFormat {
    pub const ALL: [InstanceFormat; 3] = [InstanceFormat::Json, InstanceFormat::OrLib, InstanceFormat::FlowShop];

    pub fn extension(self) -> &'static str {
        match self {
            InstanceFormat::OrLib => "jss",
            InstanceFormat::FlowShop => "fsp",
            InstanceFormat::Json => "json",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "jss" => Some(InstanceFormat::OrLib),
            "fsp" => Some(InstanceFormat::FlowShop),
            "json" => Some(InstanceFormat::Json),
            _ => None,
        }
    }

    pub fn parse(self, text: &str) -> Result<Instance> {
        match self {
            InstanceFormat::OrLib => parse_orlib_jobshop(text),
            InstanceFormat::FlowShop => parse_flowshop(text),
            InstanceFormat::Json => parse_extended_json(text),
        }
    }

    pub fn write(self, inst: &Instance) -> Result<String> {
        match self {
            InstanceFormat::OrLib => write_orlib_jobshop(inst),
            InstanceFormat::FlowShop => write_flowshop(inst),
            InstanceFormat::Json => Ok(write_extended_json(inst)),
        }
    }
}

/// Reads an instance, picking the parser by extension. Text formats take
/// the file stem as instance name; JSON documents keep their own.
pub fn load_instance_file(path: &Path) -> Result<Instance> {
    let format = InstanceFormat::from_path(path).ok_or_else(|| {
        Error::contract(format!(
            "unknown instance format for {} (expected .jss, .fsp or .json)",
            path.display()
        ))
    })?;
    let text = std::fs::read_to_string(path)?;
    let mut inst = format.parse(&text)?;
    if format != InstanceFormat::Json || inst.name().is_empty() {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            inst.set_name(stem);
        }
    }
    Ok(inst)
}

/// Random job shop: each job visits every machine once in a random order
/// with durations uniform in `lo..=hi`. With a due-date factor `f`, each
/// job is due at `ceil(f · total work)`. Release dates are zero.
pub fn generate_random_instance(
    n: usize,
    m: usize,
    lo: Time,
    hi: Time,
    due_factor: Option<f64>,
    seed: u64,
) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::contract("job and machine counts must be positive"));
    }
    if lo < 1 || lo > hi {
        return Err(Error::contract(format!("invalid duration range [{lo}, {hi}]")));
    }
    if let Some(f) = due_factor {
        if !(f >= 0.0 && f.is_finite()) {
            return Err(Error::contract(format!(
                "due-date factor must be a nonnegative number, got {f}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(n);
    for j in 1..=n {
        let mut machines: Vec<usize> = (0..m).collect();
        machines.shuffle(&mut rng);
        let routing: Vec<_> = machines.into_iter().map(|mc| (mc, rng.gen_range(lo..=hi))).collect();
        let work: Time = routing.iter().map(|r| r.1).sum();
        let due = due_factor.map(|f| (f * work as f64).ceil() as Time);
        jobs.push(Job::new(j, 0, due, &routing));
    }
    Instance::new(format!("random-{n}x{m}-{seed}"), InstanceKind::JobShop, m, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_range() {
        let inst = generate_random_instance(2, 2, 1, 1, None, 0).unwrap();
        assert!(inst
            .jobs()
            .iter()
            .all(|j| j.operations().iter().all(|o| o.duration == 1)));
        assert!(inst.jobs().iter().all(|j| j.due().is_none()));
    }

    #[test]
    fn unit_factor_gives_total_work() {
        let inst = generate_random_instance(5, 4, 1, 20, Some(1.0), 3).unwrap();
        for j in inst.jobs() {
            assert_eq!(j.due(), Some(j.total_work()));
            let mut ms: Vec<_> = j.operations().iter().map(|o| o.machine).collect();
            ms.sort_unstable();
            assert_eq!(ms, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn seed_determinism_and_guards() {
        assert_eq!(
            generate_random_instance(4, 3, 2, 9, Some(1.3), 8).unwrap(),
            generate_random_instance(4, 3, 2, 9, Some(1.3), 8).unwrap()
        );
        assert!(generate_random_instance(2, 2, 0, 3, None, 0).is_err());
        assert!(generate_random_instance(2, 2, 5, 3, None, 0).is_err());
        assert!(generate_random_instance(0, 2, 1, 3, None, 0).is_err());
        assert!(generate_random_instance(2, 2, 1, 3, Some(-1.0), 0).is_err());
    }
}
