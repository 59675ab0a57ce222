//! Scheduling instances, the operation-based genotype, the semi-active decoder
//! and the four completion-time objectives.
//!
//! Jobs are numbered from 1 and operations within a job from 1 (routing
//! order); machines are numbered from 0. All times are integral.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Time = u64;
pub type JobId = usize;
pub type MachineId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    JobShop,
    FlowShop,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::JobShop => "job_shop",
            InstanceKind::FlowShop => "flow_shop",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operation {
    pub job: JobId,
    /// Position in the job's routing, starting at 1.
    pub index: usize,
    pub machine: MachineId,
    pub duration: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    id: JobId,
    release: Time,
    due: Option<Time>,
    operations: Vec<Operation>,
}

impl Job {
    /// Builds a job from its routing given as `(machine, duration)` pairs.
    pub fn new(id: JobId, release: Time, due: Option<Time>, routing: &[(MachineId, Time)]) -> Self {
        let operations = routing
            .iter()
            .enumerate()
            .map(|(k, &(machine, duration))| Operation {
                job: id,
                index: k + 1,
                machine,
                duration,
            })
            .collect();
        Job {
            id,
            release,
            due,
            operations,
        }
    }

    pub fn id(&self) -> JobId {
        self.id
    }

    pub fn release(&self) -> Time {
        self.release
    }

    pub fn due(&self) -> Option<Time> {
        self.due
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    /// Operation `k` of the routing, 1-based.
    pub fn operation(&self, k: usize) -> Option<&Operation> {
        k.checked_sub(1).and_then(|i| self.operations.get(i))
    }

    pub fn operation_count(&self) -> usize {
        self.operations.len()
    }

    pub fn total_work(&self) -> Time {
        self.operations.iter().map(|op| op.duration).sum()
    }

    pub fn routing(&self) -> Vec<(MachineId, Time)> {
        self.operations.iter().map(|op| (op.machine, op.duration)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    kind: InstanceKind,
    machine_count: usize,
    jobs: Vec<Job>,
}

impl Instance {
    pub fn new(name: impl Into<String>, kind: InstanceKind, machine_count: usize, jobs: Vec<Job>) -> Result<Self> {
        let inst = Instance {
            name: name.into(),
            kind,
            machine_count,
            jobs,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Job shop without release or due dates; `routes[j]` lists job `j + 1`'s
    /// `(machine, duration)` pairs.
    pub fn job_shop(
        name: impl Into<String>,
        machine_count: usize,
        routes: Vec<Vec<(MachineId, Time)>>,
    ) -> Result<Self> {
        let jobs = routes
            .iter()
            .enumerate()
            .map(|(j, r)| Job::new(j + 1, 0, None, r))
            .collect();
        Self::new(name, InstanceKind::JobShop, machine_count, jobs)
    }

    /// Flow shop from a job-by-machine duration matrix.
    pub fn flow_shop(name: impl Into<String>, durations: Vec<Vec<Time>>) -> Result<Self> {
        let m = durations.first().map_or(0, Vec::len);
        let jobs = durations
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let routing: Vec<_> = row.iter().copied().enumerate().collect();
                Job::new(j + 1, 0, None, &routing)
            })
            .collect();
        Self::new(name, InstanceKind::FlowShop, m, jobs)
    }

    fn validate(&self) -> Result<()> {
        if self.machine_count == 0 {
            return Err(Error::Instance("machine count must be positive".into()));
        }
        if self.jobs.is_empty() {
            return Err(Error::Instance("instance has no jobs".into()));
        }
        for (i, job) in self.jobs.iter().enumerate() {
            if job.id != i + 1 {
                return Err(Error::Instance(format!(
                    "job at position {} carries id {}, expected {}",
                    i + 1,
                    job.id,
                    i + 1
                )));
            }
            if job.operations.is_empty() {
                return Err(Error::Instance(format!("job {} has no operations", job.id)));
            }
            for op in &job.operations {
                if op.machine >= self.machine_count {
                    return Err(Error::Instance(format!(
                        "operation {} of job {} uses machine {}, but only {} machines exist",
                        op.index, job.id, op.machine, self.machine_count
                    )));
                }
            }
            if self.kind == InstanceKind::FlowShop {
                let in_order = job.operations.len() == self.machine_count
                    && job.operations.iter().enumerate().all(|(k, op)| op.machine == k);
                if !in_order {
                    return Err(Error::Instance(format!(
                        "flow-shop job {} does not visit machines 0..{} in order",
                        job.id, self.machine_count
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    /// Job by 1-based id.
    pub fn job(&self, id: JobId) -> Option<&Job> {
        id.checked_sub(1).and_then(|i| self.jobs.get(i))
    }

    /// Total number of operations, i.e. the genotype length.
    pub fn operation_count(&self) -> usize {
        self.jobs.iter().map(Job::operation_count).sum()
    }

    pub fn has_due_dates(&self) -> bool {
        self.jobs.iter().all(|j| j.due.is_some())
    }

    pub fn with_release_dates(mut self, releases: &[Time]) -> Result<Self> {
        if releases.len() != self.jobs.len() {
            return Err(Error::contract(format!(
                "{} release dates given for {} jobs",
                releases.len(),
                self.jobs.len()
            )));
        }
        for (job, &r) in self.jobs.iter_mut().zip(releases) {
            job.release = r;
        }
        Ok(self)
    }

    pub fn with_due_dates(mut self, dues: &[Time]) -> Result<Self> {
        if dues.len() != self.jobs.len() {
            return Err(Error::contract(format!(
                "{} due dates given for {} jobs",
                dues.len(),
                self.jobs.len()
            )));
        }
        for (job, &d) in self.jobs.iter_mut().zip(dues) {
            job.due = Some(d);
        }
        Ok(self)
    }

    /// Number of distinct gene strings: `(Σ o_j)! / Π o_j!`, saturating at
    /// `u128::MAX`.
    pub fn sequence_count(&self) -> u128 {
        let mut total: u128 = 1;
        let mut placed: u128 = 0;
        for job in &self.jobs {
            // multiply by C(placed + o_j, o_j) incrementally; each partial
            // product stays an exact binomial
            for i in 1..=job.operation_count() as u128 {
                placed += 1;
                total = match total.checked_mul(placed) {
                    Some(v) => v / i,
                    None => return u128::MAX,
                };
            }
        }
        total
    }
}

/// The four completion-time criteria, all minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Cmax,
    Csum,
    Tmax,
    U,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Objective::Cmax, Objective::Csum, Objective::Tmax, Objective::U];

    pub fn needs_due_dates(self) -> bool {
        matches!(self, Objective::Tmax | Objective::U)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Cmax => "cmax",
            Objective::Csum => "csum",
            Objective::Tmax => "tmax",
            Objective::U => "u",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmax" => Ok(Objective::Cmax),
            "csum" => Ok(Objective::Csum),
            "tmax" => Ok(Objective::Tmax),
            "u" => Ok(Objective::U),
            other => Err(Error::Spec(format!(
                "unknown objective '{other}' (expected cmax, csum, tmax or u)"
            ))),
        }
    }
}

/// Ordered, nonempty selection of distinct objectives; the order fixes the
/// component order of every [`ObjectiveVector`] evaluated under it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Objective>", into = "Vec<Objective>")]
pub struct ObjectiveSpec(Vec<Objective>);

impl ObjectiveSpec {
    pub fn new(selected: Vec<Objective>) -> Result<Self> {
        if selected.is_empty() {
            return Err(Error::Spec("at least one objective must be selected".into()));
        }
        for (i, o) in selected.iter().enumerate() {
            if selected[..i].contains(o) {
                return Err(Error::Spec(format!("objective {o} selected twice")));
            }
        }
        Ok(ObjectiveSpec(selected))
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that the instance carries the data the selected objectives need.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        if let Some(&objective) = self.0.iter().find(|o| o.needs_due_dates()) {
            if let Some(job) = inst.jobs().iter().find(|j| j.due().is_none()) {
                return Err(Error::MissingDueDate {
                    objective,
                    job: job.id(),
                });
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<Objective>> for ObjectiveSpec {
    type Error = Error;

    fn try_from(v: Vec<Objective>) -> Result<Self> {
        ObjectiveSpec::new(v)
    }
}

impl From<ObjectiveSpec> for Vec<Objective> {
    fn from(s: ObjectiveSpec) -> Self {
        s.0
    }
}

impl FromStr for ObjectiveSpec {
    type Err = Error;

    /// Parses a comma-separated list such as `cmax,tmax`.
    fn from_str(s: &str) -> Result<Self> {
        let selected = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        ObjectiveSpec::new(selected)
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

/// Objective values in spec order. The derived `Ord` is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<u64>);

impl ObjectiveVector {
    pub fn new(values: Vec<u64>) -> Self {
        ObjectiveVector(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pareto dominance for minimization. Panics on a length mismatch; use
    /// [`crate::pareto::dominates`] for a checked comparison.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        assert_eq!(self.0.len(), other.0.len(), "objective vectors of different length");
        let mut strict = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            if a > b {
                return false;
            }
            strict |= a < b;
        }
        strict
    }

    /// `self` equals or dominates `other`.
    pub fn covers(&self, other: &ObjectiveVector) -> bool {
        self == other || self.dominates(other)
    }
}

impl From<Vec<u64>> for ObjectiveVector {
    fn from(v: Vec<u64>) -> Self {
        ObjectiveVector(v)
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = u64;

    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

/// Operation-based genotype: job `j` occurs once per operation, and its
/// `i`-th occurrence stands for operation `O_{j,i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperationSequence(Vec<JobId>);

impl OperationSequence {
    /// Validates `genes` against the instance's per-job operation counts.
    pub fn new(genes: Vec<JobId>, inst: &Instance) -> Result<Self> {
        let seq = OperationSequence(genes);
        seq.validate(inst)?;
        Ok(seq)
    }

    /// Wraps genes without checking them against an instance.
    pub fn from_genes(genes: Vec<JobId>) -> Self {
        OperationSequence(genes)
    }

    /// The canonical sequence `1..1, 2..2, ...` in job order.
    pub fn sorted(inst: &Instance) -> Self {
        let genes = inst
            .jobs()
            .iter()
            .flat_map(|j| std::iter::repeat_n(j.id(), j.operation_count()))
            .collect();
        OperationSequence(genes)
    }

    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let mut counts = vec![0usize; inst.job_count()];
        for &g in &self.0 {
            match g.checked_sub(1).and_then(|i| counts.get_mut(i)) {
                Some(c) => *c += 1,
                None => {
                    let found = self.0.iter().filter(|&&x| x == g).count();
                    return Err(Error::Genotype {
                        job: g,
                        expected: 0,
                        found,
                    });
                }
            }
        }
        for (job, &found) in inst.jobs().iter().zip(&counts) {
            if found != job.operation_count() {
                return Err(Error::Genotype {
                    job: job.id(),
                    expected: job.operation_count(),
                    found,
                });
            }
        }
        Ok(())
    }

    pub fn genes(&self) -> &[JobId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_genes(self) -> Vec<JobId> {
        self.0
    }

    /// Transposes the genes at positions `i` and `j`.
    pub fn swap_genes(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    /// Removes the gene at `from` and reinserts it so that it ends up at `to`.
    pub fn shift_gene(&mut self, from: usize, to: usize) {
        let g = self.0.remove(from);
        self.0.insert(to, g);
    }

    /// Per-job multiplicities, indexed by `job - 1`.
    pub fn job_counts(&self, job_count: usize) -> Vec<usize> {
        let mut counts = vec![0; job_count];
        for &g in &self.0 {
            counts[g - 1] += 1;
        }
        counts
    }
}

/// Start times per operation; completion times per job.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    /// `starts[j - 1][k - 1]` is the start of operation `O_{j,k}`.
    starts: Vec<Vec<Time>>,
    completions: Vec<Time>,
}

/// A broken schedule constraint, as reported by [`Schedule::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    Release {
        job: JobId,
        start: Time,
        release: Time,
    },
    Routing {
        job: JobId,
        index: usize,
    },
    Overlap {
        machine: MachineId,
        first: (JobId, usize),
        second: (JobId, usize),
    },
    Completion {
        job: JobId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(m) => write!(f, "malformed schedule: {m}"),
            Violation::Release { job, start, release } => {
                write!(f, "job {job} starts at {start} before its release {release}")
            }
            Violation::Routing { job, index } => {
                write!(
                    f,
                    "operation {} of job {job} starts before operation {index} ends",
                    index + 1
                )
            }
            Violation::Overlap { machine, first, second } => write!(
                f,
                "operations O{},{} and O{},{} overlap on machine {machine}",
                first.0, first.1, second.0, second.1
            ),
            Violation::Completion { job } => write!(f, "completion time of job {job} is inconsistent"),
        }
    }
}

impl Schedule {
    /// Builds a schedule from start times, deriving completions from the
    /// last operation of each job.
    pub fn from_starts(starts: Vec<Vec<Time>>, inst: &Instance) -> Result<Self> {
        if starts.len() != inst.job_count()
            || starts
                .iter()
                .zip(inst.jobs())
                .any(|(s, j)| s.len() != j.operation_count())
        {
            return Err(Error::contract("start-time table does not match the instance"));
        }
        let completions = starts
            .iter()
            .zip(inst.jobs())
            .map(|(s, j)| {
                let last = j.operations().last().expect("jobs have operations");
                s[s.len() - 1] + last.duration
            })
            .collect();
        Ok(Schedule { starts, completions })
    }

    /// Start of operation `k` (1-based) of job `job`.
    pub fn start(&self, job: JobId, k: usize) -> Time {
        self.starts[job - 1][k - 1]
    }

    pub fn starts(&self) -> &[Vec<Time>] {
        &self.starts
    }

    pub fn completion(&self, job: JobId) -> Time {
        self.completions[job - 1]
    }

    pub fn completions(&self) -> &[Time] {
        &self.completions
    }

    pub fn makespan(&self) -> Time {
        self.completions.iter().copied().max().unwrap_or(0)
    }

    /// Operations in nondecreasing start order (ties by job, then routing
    /// position) as a gene string.
    pub fn to_sequence(&self) -> OperationSequence {
        let mut ops: Vec<(Time, JobId, usize)> = self
            .starts
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.iter().enumerate().map(move |(k, &t)| (t, j + 1, k)))
            .collect();
        ops.sort_unstable();
        OperationSequence(ops.into_iter().map(|(_, j, _)| j).collect())
    }

    /// Checks routing, release and machine-exclusivity constraints.
    pub fn verify(&self, inst: &Instance) -> std::result::Result<(), Violation> {
        if self.starts.len() != inst.job_count() || self.completions.len() != inst.job_count() {
            return Err(Violation::Shape("job count differs from the instance".into()));
        }
        let mut per_machine: Vec<Vec<(Time, Time, JobId, usize)>> = vec![Vec::new(); inst.machine_count()];
        for (job, starts) in inst.jobs().iter().zip(&self.starts) {
            if starts.len() != job.operation_count() {
                return Err(Violation::Shape(format!(
                    "job {} has {} start times for {} operations",
                    job.id(),
                    starts.len(),
                    job.operation_count()
                )));
            }
            if starts[0] < job.release() {
                return Err(Violation::Release {
                    job: job.id(),
                    start: starts[0],
                    release: job.release(),
                });
            }
            for (k, op) in job.operations().iter().enumerate() {
                if k + 1 < starts.len() && starts[k + 1] < starts[k] + op.duration {
                    return Err(Violation::Routing {
                        job: job.id(),
                        index: k + 1,
                    });
                }
                if op.duration > 0 {
                    per_machine[op.machine].push((starts[k], starts[k] + op.duration, job.id(), k + 1));
                }
            }
            let last = job.operations().last().expect("jobs have operations");
            if self.completions[job.id() - 1] != starts[starts.len() - 1] + last.duration {
                return Err(Violation::Completion { job: job.id() });
            }
        }
        for (machine, bars) in per_machine.iter_mut().enumerate() {
            bars.sort_unstable();
            for w in bars.windows(2) {
                if w[1].0 < w[0].1 {
                    return Err(Violation::Overlap {
                        machine,
                        first: (w[0].2, w[0].3),
                        second: (w[1].2, w[1].3),
                    });
                }
            }
        }
        Ok(())
    }

    /// Finds an operation that could start earlier in an idle gap of its
    /// machine without moving anything else, returned as (job, k). `None`
    /// means the schedule is active. Zero-duration operations are skipped.
    pub fn left_shift_candidate(&self, inst: &Instance) -> Option<(JobId, usize)> {
        let mut bars: Vec<Vec<(Time, Time, JobId, usize)>> = vec![Vec::new(); inst.machine_count()];
        for job in inst.jobs() {
            for (k, op) in job.operations().iter().enumerate() {
                let s = self.starts[job.id() - 1][k];
                bars[op.machine].push((s, s + op.duration, job.id(), k + 1));
            }
        }
        for job in inst.jobs() {
            let starts = &self.starts[job.id() - 1];
            for (k, op) in job.operations().iter().enumerate() {
                if op.duration == 0 {
                    continue;
                }
                let earliest = if k == 0 {
                    job.release()
                } else {
                    starts[k - 1] + job.operations()[k - 1].duration
                };
                let others: Vec<_> = bars[op.machine]
                    .iter()
                    .filter(|b| (b.2, b.3) != (job.id(), k + 1) && b.1 > b.0)
                    .collect();
                let fits = |t: Time| others.iter().all(|b| t + op.duration <= b.0 || b.1 <= t);
                let candidates = std::iter::once(earliest).chain(others.iter().map(|b| b.1));
                if candidates.filter(|&t| t >= earliest && t < starts[k]).any(fits) {
                    return Some((job.id(), k + 1));
                }
            }
        }
        None
    }
}

/// Decodes a gene string into a semi-active schedule by appending each
/// operation at the earliest time allowed by its job, its machine and the
/// job's release date. Idle gaps are never filled.
pub fn decode_semi_active(seq: &OperationSequence, inst: &Instance) -> Result<Schedule> {
    seq.validate(inst)?;
    Ok(decode_unchecked(seq.genes(), inst))
}

/// Decoder body for gene strings already known to be valid.
pub(crate) fn decode_unchecked(genes: &[JobId], inst: &Instance) -> Schedule {
    let mut machine_free = vec![0 as Time; inst.machine_count()];
    let mut job_ready: Vec<Time> = inst.jobs().iter().map(Job::release).collect();
    let mut next_op = vec![0usize; inst.job_count()];
    let mut starts: Vec<Vec<Time>> = inst
        .jobs()
        .iter()
        .map(|j| Vec::with_capacity(j.operation_count()))
        .collect();

    for &g in genes {
        let j = g - 1;
        let op = &inst.jobs()[j].operations()[next_op[j]];
        let start = machine_free[op.machine].max(job_ready[j]);
        let end = start + op.duration;
        starts[j].push(start);
        job_ready[j] = end;
        // zero-duration operations do not occupy their machine
        if op.duration > 0 {
            machine_free[op.machine] = end;
        }
        next_op[j] += 1;
    }

    Schedule {
        completions: job_ready,
        starts,
    }
}

/// Evaluates a schedule's completion times under `spec`.
pub fn evaluate(sched: &Schedule, inst: &Instance, spec: &ObjectiveSpec) -> Result<ObjectiveVector> {
    spec.check(inst)?;
    if sched.completions.len() != inst.job_count() {
        return Err(Error::contract("schedule does not match the instance"));
    }
    Ok(evaluate_unchecked(sched.completions(), inst, spec))
}

pub(crate) fn evaluate_unchecked(completions: &[Time], inst: &Instance, spec: &ObjectiveSpec) -> ObjectiveVector {
    let tardiness = || {
        completions
            .iter()
            .zip(inst.jobs())
            .map(|(&c, j)| c.saturating_sub(j.due().expect("checked by spec")))
    };
    let values = spec
        .objectives()
        .iter()
        .map(|o| match o {
            Objective::Cmax => completions.iter().copied().max().unwrap_or(0),
            Objective::Csum => completions.iter().sum(),
            Objective::Tmax => tardiness().max().unwrap_or(0),
            Objective::U => tardiness().filter(|&t| t > 0).count() as u64,
        })
        .collect();
    ObjectiveVector(values)
}

/// Uniformly shuffled gene string, deterministic for a fixed seed.
pub fn random_sequence(inst: &Instance, seed: u64) -> OperationSequence {
    random_sequence_with(inst, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_sequence_with<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> OperationSequence {
    let mut seq = OperationSequence::sorted(inst);
    seq.0.shuffle(rng);
    seq
}

/// Per-machine operation order of a schedule, by start time.
pub fn machine_sequences(sched: &Schedule, inst: &Instance) -> BTreeMap<MachineId, Vec<Operation>> {
    let mut out: BTreeMap<MachineId, Vec<(Time, Operation)>> = BTreeMap::new();
    for job in inst.jobs() {
        for op in job.operations() {
            out.entry(op.machine)
                .or_default()
                .push((sched.start(job.id(), op.index), *op));
        }
    }
    out.into_iter()
        .map(|(m, mut ops)| {
            ops.sort_by_key(|(t, op)| (*t, op.job, op.index));
            (m, ops.into_iter().map(|(_, op)| op).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t2;

    fn seq(genes: &[JobId]) -> OperationSequence {
        OperationSequence::new(genes.to_vec(), &t2()).unwrap()
    }

    fn full_spec() -> ObjectiveSpec {
        "cmax,csum,tmax,u".parse().unwrap()
    }

    #[test]
    fn decode_interleaved() {
        let inst = t2();
        let s = decode_semi_active(&seq(&[1, 2, 1, 2]), &inst).unwrap();
        assert_eq!(
            (s.start(1, 1), s.start(2, 1), s.start(1, 2), s.start(2, 2)),
            (0, 0, 3, 3)
        );
        assert_eq!(s.completions(), &[5, 7]);
        assert_eq!(evaluate(&s, &inst, &full_spec()).unwrap().values(), &[7, 12, 0, 0]);
    }

    #[test]
    fn decode_job_two_first() {
        let inst = t2();
        let s = decode_semi_active(&seq(&[2, 2, 1, 1]), &inst).unwrap();
        assert_eq!(
            (s.start(2, 1), s.start(2, 2), s.start(1, 1), s.start(1, 2)),
            (0, 2, 6, 9)
        );
        assert_eq!(s.completions(), &[11, 6]);
        assert_eq!(evaluate(&s, &inst, &full_spec()).unwrap().values(), &[11, 17, 6, 1]);
    }

    #[test]
    fn decode_job_one_first() {
        let inst = t2();
        let s = decode_semi_active(&seq(&[1, 1, 2, 2]), &inst).unwrap();
        assert_eq!(
            (s.start(1, 1), s.start(1, 2), s.start(2, 1), s.start(2, 2)),
            (0, 3, 5, 7)
        );
        assert_eq!(s.completions(), &[5, 11]);
        assert_eq!(evaluate(&s, &inst, &full_spec()).unwrap().values(), &[11, 16, 4, 1]);
    }

    #[test]
    fn genotype_errors_name_the_job() {
        let inst = t2();
        match OperationSequence::new(vec![1, 1, 1, 2], &inst) {
            Err(Error::Genotype {
                job: 1,
                expected: 2,
                found: 3,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match decode_semi_active(&OperationSequence::from_genes(vec![1, 2, 3, 1]), &inst) {
            Err(Error::Genotype {
                job: 3,
                expected: 0,
                found: 1,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            OperationSequence::new(vec![1, 2, 1], &inst),
            Err(Error::Genotype {
                job: 2,
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn release_dates_delay_first_operation() {
        let inst = t2().with_release_dates(&[4, 0]).unwrap();
        let s = decode_semi_active(&seq(&[1, 2, 1, 2]), &inst).unwrap();
        assert_eq!(s.start(1, 1), 4);
        assert!(s.verify(&inst).is_ok());
    }

    #[test]
    fn zero_duration_does_not_block_machine() {
        let inst = Instance::job_shop("z", 1, vec![vec![(0, 0)], vec![(0, 3)]])
            .unwrap()
            .with_release_dates(&[2, 0])
            .unwrap();
        let s = decode_semi_active(&OperationSequence::new(vec![1, 2], &inst).unwrap(), &inst).unwrap();
        assert_eq!(s.start(1, 1), 2);
        assert_eq!(s.start(2, 1), 0);
        assert!(s.verify(&inst).is_ok());
    }

    #[test]
    fn missing_due_date_is_a_spec_error() {
        let inst = Instance::job_shop("nd", 2, vec![vec![(0, 3), (1, 2)]]).unwrap();
        let s = decode_semi_active(&OperationSequence::sorted(&inst), &inst).unwrap();
        let err = evaluate(&s, &inst, &"cmax,u".parse().unwrap()).unwrap_err();
        assert!(matches!(
            err,
            Error::MissingDueDate {
                objective: Objective::U,
                job: 1
            }
        ));
        assert!(evaluate(&s, &inst, &"csum".parse().unwrap()).is_ok());
    }

    #[test]
    fn random_sequence_contract() {
        let inst = t2();
        let a = random_sequence(&inst, 9);
        assert_eq!(a.len(), 4);
        assert!(a.validate(&inst).is_ok());
        assert_eq!(a, random_sequence(&inst, 9));
    }

    #[test]
    fn spec_parsing() {
        let spec: ObjectiveSpec = "tmax,cmax".parse().unwrap();
        assert_eq!(spec.objectives(), &[Objective::Tmax, Objective::Cmax]);
        assert!("".parse::<ObjectiveSpec>().is_err());
        assert!("cmax,cmax".parse::<ObjectiveSpec>().is_err());
        assert!("lmax".parse::<ObjectiveSpec>().is_err());
        assert_eq!(spec.to_string(), "tmax,cmax");
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::job_shop("bad", 2, vec![vec![(2, 1)]]).is_err());
        assert!(Instance::job_shop("bad", 2, vec![vec![]]).is_err());
        assert!(Instance::job_shop("bad", 0, vec![vec![(0, 1)]]).is_err());
        let jobs = vec![Job::new(1, 0, None, &[(1, 2), (0, 1)])];
        assert!(Instance::new("bad", InstanceKind::FlowShop, 2, jobs).is_err());
    }

    #[test]
    fn sequence_counts() {
        assert_eq!(t2().sequence_count(), 6);
        let three = Instance::job_shop("3x3", 3, vec![vec![(0, 1), (1, 1), (2, 1)]; 3]).unwrap();
        assert_eq!(three.sequence_count(), 1680);
    }

    #[test]
    fn shift_and_swap() {
        let mut s = OperationSequence::from_genes(vec![1, 2, 1, 2]);
        s.swap_genes(1, 2);
        assert_eq!(s.genes(), &[1, 1, 2, 2]);
        let mut s = OperationSequence::from_genes(vec![1, 2, 1, 2]);
        s.shift_gene(0, 3);
        assert_eq!(s.genes(), &[2, 1, 2, 1]);
    }

    #[test]
    fn schedule_to_sequence_reproduces_schedule() {
        let inst = t2();
        let s = decode_semi_active(&seq(&[2, 1, 1, 2]), &inst).unwrap();
        let again = decode_semi_active(&s.to_sequence(), &inst).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn left_shift_detection() {
        let inst = t2();
        let active = Schedule::from_starts(vec![vec![0, 3], vec![0, 3]], &inst).unwrap();
        assert_eq!(active.left_shift_candidate(&inst), None);
        // job 1 idles on M0 for one unit at the start
        let delayed = Schedule::from_starts(vec![vec![1, 4], vec![0, 4]], &inst).unwrap();
        assert!(delayed.verify(&inst).is_ok());
        assert_eq!(delayed.left_shift_candidate(&inst), Some((1, 1)));
    }
}
