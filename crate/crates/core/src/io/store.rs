//! Flat-file persistence for instances and solver runs.
//!
//! Layout under the store root:
//!
//! ```text
//! instances/<name>.json | <name>.jss | <name>.fsp
//! runs/<id>.json
//! ```

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{load_instance_file, write_extended_json, InstanceFormat};
use crate::error::{Error, Result};
use crate::model::{Instance, ObjectiveSpec, ObjectiveVector, OperationSequence, Schedule};
use crate::pareto::nondominated_filter;
use crate::solvers::{SolveReport, SolverConfig};

/// One archived solution of a run. Ids are `s0, s1, ...` in lexicographic
/// order of the vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub id: String,
    pub vector: ObjectiveVector,
    pub sequence: OperationSequence,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub instance: String,
    pub spec: ObjectiveSpec,
    pub config: SolverConfig,
    pub front: Vec<FrontEntry>,
    pub evaluations: u64,
    pub wall_time_ms: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp_ms: u64,
}

impl RunRecord {
    /// Snapshot of a finished run. The id is left empty until the record is
    /// saved.
    pub fn from_report(
        instance: &Instance,
        spec: &ObjectiveSpec,
        config: &SolverConfig,
        report: &SolveReport,
        wall_time: Duration,
    ) -> Self {
        let mut entries: Vec<_> = report.archive.entries().iter().collect();
        entries.sort_by(|a, b| a.vector.cmp(&b.vector));
        let front = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| FrontEntry {
                id: format!("s{i}"),
                vector: e.vector.clone(),
                sequence: e.payload.sequence.clone(),
                schedule: e.payload.schedule.clone(),
            })
            .collect();
        RunRecord {
            id: String::new(),
            instance: instance.name().to_string(),
            spec: spec.clone(),
            config: config.clone(),
            front,
            evaluations: report.evaluations,
            wall_time_ms: wall_time.as_millis() as u64,
            timestamp_ms: now_ms(),
        }
    }

    pub fn vectors(&self) -> Vec<ObjectiveVector> {
        self.front.iter().map(|e| e.vector.clone()).collect()
    }

    pub fn solution(&self, id: &str) -> Option<&FrontEntry> {
        self.front.iter().find(|e| e.id == id)
    }

    /// Checks the archive invariants of the stored front.
    pub fn check(&self) -> Result<()> {
        let k = self.spec.len();
        let mut ids = HashSet::new();
        for e in &self.front {
            if e.vector.len() != k {
                return Err(Error::Integrity(format!(
                    "solution {} has {} objective values, the spec selects {k}",
                    e.id,
                    e.vector.len()
                )));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(Error::Integrity(format!("duplicate solution id {}", e.id)));
            }
        }
        let vectors = self.vectors();
        if nondominated_filter(&vectors).len() != vectors.len() {
            return Err(Error::Integrity(
                "stored front contains dominated or duplicate vectors".into(),
            ));
        }
        Ok(())
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

static RUN_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Fresh run id: timestamp, process id and a process-wide counter.
pub fn new_run_id() -> String {
    let n = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
    format!("run-{}-{}-{n}", now_ms(), std::process::id())
}

/// Names usable as file stems: ASCII alphanumerics, `-`, `_`, `.`, not
/// starting with a dot.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    /// Opens a store, creating its directories when missing.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("instances"))?;
        fs::create_dir_all(root.join("runs"))?;
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn run_path(&self, id: &str) -> PathBuf {
        self.root.join("runs").join(format!("{id}.json"))
    }

    /// Persists `record`, assigning a fresh id when it has none. Refuses to
    /// overwrite an existing run.
    pub fn save_run(&self, record: &mut RunRecord) -> Result<String> {
        record.check()?;
        if record.id.is_empty() {
            record.id = new_run_id();
        }
        if !valid_name(&record.id) {
            return Err(Error::contract(format!("invalid run id '{}'", record.id)));
        }
        let body = serde_json::to_vec_pretty(record).map_err(|e| Error::Integrity(e.to_string()))?;
        let mut file = fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.run_path(&record.id))?;
        file.write_all(&body)?;
        file.write_all(b"\n")?;
        Ok(record.id.clone())
    }

    pub fn load_run(&self, id: &str) -> Result<RunRecord> {
        if !valid_name(id) {
            return Err(Error::NotFound(format!("run {id}")));
        }
        let text = match fs::read_to_string(self.run_path(id)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::NotFound(format!("run {id}"))),
            Err(e) => return Err(e.into()),
        };
        let record = read_run_record(&text)?;
        if record.id != id {
            return Err(Error::Integrity(format!("run file {id} holds record {}", record.id)));
        }
        Ok(record)
    }

    pub fn list_runs(&self) -> Result<Vec<String>> {
        list_stems(&self.root.join("runs"), &["json"])
    }

    /// Writes an instance as extended JSON under its own name.
    pub fn save_instance(&self, inst: &Instance, overwrite: bool) -> Result<PathBuf> {
        if !valid_name(inst.name()) {
            return Err(Error::contract(format!("invalid instance name '{}'", inst.name())));
        }
        if !overwrite && self.find_instance(inst.name()).is_some() {
            return Err(Error::contract(format!("instance '{}' already exists", inst.name())));
        }
        let path = self.root.join("instances").join(format!("{}.json", inst.name()));
        fs::write(&path, write_extended_json(inst))?;
        Ok(path)
    }

    fn find_instance(&self, name: &str) -> Option<PathBuf> {
        if !valid_name(name) {
            return None;
        }
        InstanceFormat::ALL
            .iter()
            .map(|f| self.root.join("instances").join(format!("{name}.{}", f.extension())))
            .find(|p| p.is_file())
    }

    pub fn load_instance(&self, name: &str) -> Result<Instance> {
        let path = self
            .find_instance(name)
            .ok_or_else(|| Error::NotFound(format!("instance {name}")))?;
        let mut inst = load_instance_file(&path)?;
        inst.set_name(name);
        Ok(inst)
    }

    /// Instance names, sorted.
    pub fn list_instances(&self) -> Result<Vec<String>> {
        let exts: Vec<&str> = InstanceFormat::ALL.iter().map(|f| f.extension()).collect();
        let mut names = list_stems(&self.root.join("instances"), &exts)?;
        names.dedup();
        Ok(names)
    }
}

/// Parses and validates a run document.
pub fn read_run_record(text: &str) -> Result<RunRecord> {
    let record: RunRecord =
        serde_json::from_str(text).map_err(|e| Error::Integrity(format!("corrupt run document: {e}")))?;
    record.check()?;
    Ok(record)
}

fn list_stems(dir: &Path, exts: &[&str]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| exts.contains(&e));
        if let (true, Some(stem)) = (ext_ok, path.file_stem().and_then(|s| s.to_str())) {
            if valid_name(stem) {
                out.push(stem.to_string());
            }
        }
    }
    out.sort();
    Ok(out)
}
