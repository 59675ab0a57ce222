//! Giffler-Thompson active schedule generation with priority rules.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{evaluate_unchecked, Instance, ObjectiveSpec, ObjectiveVector, Schedule, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PriorityRule {
    /// Shortest processing time.
    Spt,
    /// Longest processing time.
    Lpt,
    /// Earliest due date.
    Edd,
    /// Earliest ready time of the job.
    Fcfs,
    /// Most work remaining, counting the candidate operation.
    Mwr,
    Random,
}

impl PriorityRule {
    pub const DETERMINISTIC: [PriorityRule; 5] = [
        PriorityRule::Spt,
        PriorityRule::Lpt,
        PriorityRule::Edd,
        PriorityRule::Fcfs,
        PriorityRule::Mwr,
    ];

    pub fn needs_due_dates(self) -> bool {
        self == PriorityRule::Edd
    }

    /// Deterministic rules whose data requirements `inst` meets.
    pub fn applicable(inst: &Instance) -> Vec<PriorityRule> {
        Self::DETERMINISTIC
            .into_iter()
            .filter(|r| !r.needs_due_dates() || inst.has_due_dates())
            .collect()
    }
}

impl fmt::Display for PriorityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorityRule::Spt => "SPT",
            PriorityRule::Lpt => "LPT",
            PriorityRule::Edd => "EDD",
            PriorityRule::Fcfs => "FCFS",
            PriorityRule::Mwr => "MWR",
            PriorityRule::Random => "RANDOM",
        })
    }
}

impl FromStr for PriorityRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SPT" => Ok(PriorityRule::Spt),
            "LPT" => Ok(PriorityRule::Lpt),
            "EDD" => Ok(PriorityRule::Edd),
            "FCFS" => Ok(PriorityRule::Fcfs),
            "MWR" => Ok(PriorityRule::Mwr),
            "RANDOM" => Ok(PriorityRule::Random),
            other => Err(Error::contract(format!("unknown priority rule '{other}'"))),
        }
    }
}

/// Builds one active schedule and evaluates it under `spec`. Only the
/// `RANDOM` rule consumes the seed.
pub fn giffler_thompson(
    inst: &Instance,
    rule: PriorityRule,
    spec: &ObjectiveSpec,
    seed: u64,
) -> Result<(Schedule, ObjectiveVector)> {
    spec.check(inst)?;
    check_rule(inst, rule)?;
    let schedule = build_active(inst, rule, &mut ChaCha8Rng::seed_from_u64(seed));
    let vector = evaluate_unchecked(schedule.completions(), inst, spec);
    Ok((schedule, vector))
}

fn check_rule(inst: &Instance, rule: PriorityRule) -> Result<()> {
    if rule.needs_due_dates() && !inst.has_due_dates() {
        return Err(Error::Spec(format!(
            "priority rule {rule} requires due dates on every job"
        )));
    }
    Ok(())
}

/// Runs every applicable deterministic rule once, then spends the remaining
/// budget on `RANDOM` replications.
pub fn priority_portfolio(inst: &Instance, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveReport> {
    let config = SolverConfig {
        method: super::Method::Priority,
        ..config.clone()
    };
    super::solve(inst, spec, &config)
}

pub(super) fn run_portfolio(eval: &mut Evaluator<'_>, config: &SolverConfig) -> Result<()> {
    let rules = PriorityRule::applicable(eval.inst);
    if config.budget < rules.len() as u64 {
        return Err(Error::contract(format!(
            "budget {} is below the {} applicable priority rules",
            config.budget,
            rules.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for rule in rules {
        eval.evaluate_schedule(build_active(eval.inst, rule, &mut rng));
    }
    while !eval.exhausted() {
        eval.evaluate_schedule(build_active(eval.inst, PriorityRule::Random, &mut rng));
    }
    Ok(())
}

struct Candidate {
    job: usize,
    start: Time,
    end: Time,
}

/// The Giffler-Thompson loop: find the schedulable operation with the
/// earliest completion C* on machine M*, collect the operations on M* that
/// could start before C*, and dispatch one of them by `rule`.
pub(crate) fn build_active<R: Rng + ?Sized>(inst: &Instance, rule: PriorityRule, rng: &mut R) -> Schedule {
    let n = inst.job_count();
    let mut next = vec![0usize; n];
    let mut job_ready: Vec<Time> = inst.jobs().iter().map(|j| j.release()).collect();
    let mut machine_free = vec![0 as Time; inst.machine_count()];
    let mut remaining_work: Vec<Time> = inst.jobs().iter().map(|j| j.total_work()).collect();
    let mut starts: Vec<Vec<Time>> = inst
        .jobs()
        .iter()
        .map(|j| Vec::with_capacity(j.operation_count()))
        .collect();
    let mut left = inst.operation_count();

    let mut candidates: Vec<Candidate> = Vec::with_capacity(n);
    let mut conflict: Vec<usize> = Vec::with_capacity(n);
    while left > 0 {
        candidates.clear();
        for (j, job) in inst.jobs().iter().enumerate() {
            if let Some(op) = job.operations().get(next[j]) {
                let start = job_ready[j].max(machine_free[op.machine]);
                candidates.push(Candidate {
                    job: j,
                    start,
                    end: start + op.duration,
                });
            }
        }
        // earliest completion; ties go to the lowest job id
        let pivot = candidates
            .iter()
            .min_by_key(|c| (c.end, c.job))
            .expect("unscheduled operations remain");
        let (c_star, pivot_job) = (pivot.end, pivot.job);
        let m_star = inst.jobs()[pivot_job].operations()[next[pivot_job]].machine;

        conflict.clear();
        conflict.extend(candidates.iter().filter_map(|c| {
            let op = &inst.jobs()[c.job].operations()[next[c.job]];
            (op.machine == m_star && (c.start < c_star || c.job == pivot_job)).then_some(c.job)
        }));

        let chosen = match rule {
            PriorityRule::Random => conflict[rng.gen_range(0..conflict.len())],
            _ => *conflict
                .iter()
                .min_by_key(|&&j| {
                    let job = &inst.jobs()[j];
                    let p = job.operations()[next[j]].duration;
                    let key: i128 = match rule {
                        PriorityRule::Spt => p as i128,
                        PriorityRule::Lpt => -(p as i128),
                        PriorityRule::Edd => job.due().expect("checked before dispatch") as i128,
                        PriorityRule::Fcfs => job_ready[j] as i128,
                        PriorityRule::Mwr => -(remaining_work[j] as i128),
                        PriorityRule::Random => unreachable!(),
                    };
                    (key, j)
                })
                .expect("conflict set contains the pivot"),
        };

        let op = inst.jobs()[chosen].operations()[next[chosen]];
        let start = job_ready[chosen].max(machine_free[op.machine]);
        let end = start + op.duration;
        starts[chosen].push(start);
        job_ready[chosen] = end;
        if op.duration > 0 {
            machine_free[op.machine] = end;
        }
        remaining_work[chosen] -= op.duration;
        next[chosen] += 1;
        left -= 1;
    }

    Schedule::from_starts(starts, inst).expect("every operation was dispatched")
}
