//! The method database: priority-rule dispatching, a multi-point
//! hillclimber, an elitist evolutionary algorithm and multi-objective
//! simulated annealing. Each method returns a nondominated archive of the
//! schedules it evaluated.
//!
//! Every run draws all random decisions from a single ChaCha8 generator
//! seeded with [`SolverConfig::seed`], so identical inputs reproduce
//! identical archives.

mod dispatch;
mod hillclimb;
mod moea;
mod mosa;
mod operators;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    decode_unchecked, evaluate_unchecked, Instance, ObjectiveSpec, ObjectiveVector, OperationSequence, Schedule,
};
use crate::pareto::{Archive, Solution};

pub use dispatch::{giffler_thompson, priority_portfolio, PriorityRule};
pub use hillclimb::hillclimb;
pub use moea::{moea_run, pareto_rank};
pub use mosa::{metropolis_accept, mosa_accept_probability, mosa_run, simplex_weights};
pub use operators::{
    crossover, mutate, order_based, partially_mapped, two_point_order, uniform_order_based, CrossoverKind, MutationKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(alias = "priority_portfolio")]
    Priority,
    Hillclimb,
    Moea,
    Mosa,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Priority, Method::Hillclimb, Method::Moea, Method::Mosa];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Priority => "priority",
            Method::Hillclimb => "hillclimb",
            Method::Moea => "moea",
            Method::Mosa => "mosa",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "priority" | "priority_portfolio" => Ok(Method::Priority),
            "hillclimb" => Ok(Method::Hillclimb),
            "moea" => Ok(Method::Moea),
            "mosa" => Ok(Method::Mosa),
            other => Err(Error::contract(format!("unknown method '{other}'"))),
        }
    }
}

/// Hillclimber neighbourhoods over gene strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    AdjacentSwap,
    GeneralSwap,
    Shift,
}

impl FromStr for Neighborhood {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacent_swap" => Ok(Neighborhood::AdjacentSwap),
            "general_swap" => Ok(Neighborhood::GeneralSwap),
            "shift" => Ok(Neighborhood::Shift),
            other => Err(Error::contract(format!("unknown neighborhood '{other}'"))),
        }
    }
}

/// Run parameters. Fields not used by the chosen method are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub method: Method,
    /// Maximum number of objective evaluations.
    pub budget: u64,
    pub seed: u64,
    /// Population size μ (moea).
    pub population_size: usize,
    pub crossover: CrossoverKind,
    pub crossover_probability: f64,
    /// Per-offspring mutation probability (moea).
    pub mutation_probability: f64,
    /// Move used by moea mutation and by mosa's neighbour generation.
    pub mutation: MutationKind,
    /// Fraction of μ replaced by archive members each generation (moea).
    pub elitism_fraction: f64,
    pub neighborhood: Neighborhood,
    /// Number of concurrent climbing points (hillclimb).
    pub climbers: usize,
    /// Number of weight vectors W, one annealing chain each (mosa).
    pub weight_count: usize,
    pub initial_temperature: f64,
    /// Geometric cooling factor α.
    pub cooling_factor: f64,
    /// Steps between cooling updates L.
    pub chain_length: usize,
    /// Optional archive bound; `None` keeps every nondominated vector.
    pub archive_capacity: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Moea,
            budget: 2000,
            seed: 1,
            population_size: 20,
            crossover: CrossoverKind::Uobx,
            crossover_probability: 0.9,
            mutation_probability: 0.3,
            mutation: MutationKind::Shift,
            elitism_fraction: 0.25,
            neighborhood: Neighborhood::GeneralSwap,
            climbers: 4,
            weight_count: 5,
            initial_temperature: 10.0,
            cooling_factor: 0.95,
            chain_length: 10,
            archive_capacity: None,
        }
    }
}

impl SolverConfig {
    pub fn new(method: Method, budget: u64, seed: u64) -> Self {
        SolverConfig {
            method,
            budget,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::contract(m.to_string()));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if self.budget == 0 {
            return fail("budget must be at least 1");
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return fail("cooling factor must lie strictly between 0 and 1");
        }
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return fail("initial temperature must be positive");
        }
        if self.method == Method::Moea && self.population_size < 2 {
            return fail("population size must be at least 2");
        }
        if self.weight_count == 0 {
            return fail("weight count must be at least 1");
        }
        if self.climbers == 0 {
            return fail("at least one climbing point is required");
        }
        if self.chain_length == 0 {
            return fail("chain length must be at least 1");
        }
        if !unit(self.crossover_probability) || !unit(self.mutation_probability) || !unit(self.elitism_fraction) {
            return fail("probabilities and fractions must lie in [0, 1]");
        }
        if self.archive_capacity == Some(0) {
            return fail("archive capacity must be positive");
        }
        Ok(())
    }
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub archive: Archive<Solution>,
    pub evaluations: u64,
    /// Climbing points that reached a dominance-local optimum (hillclimb).
    pub restarts: u64,
    /// Completed generations (moea) or cooling steps (mosa).
    pub iterations: u64,
}

/// Runs the configured method.
pub fn solve(inst: &Instance, spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveReport> {
    solve_with_progress(inst, spec, config, None)
}

/// Like [`solve`], publishing the running evaluation count to `progress`.
pub fn solve_with_progress(
    inst: &Instance,
    spec: &ObjectiveSpec,
    config: &SolverConfig,
    progress: Option<&AtomicU64>,
) -> Result<SolveReport> {
    config.validate()?;
    spec.check(inst)?;
    let mut eval = Evaluator::new(inst, spec, config)?;
    eval.progress = progress;
    match config.method {
        Method::Priority => dispatch::run_portfolio(&mut eval, config)?,
        Method::Hillclimb => hillclimb::run(&mut eval, config),
        Method::Moea => moea::run(&mut eval, config)?,
        Method::Mosa => mosa::run(&mut eval, config)?,
    }
    Ok(eval.finish())
}

/// Budget-enforcing evaluation context shared by all methods. Every
/// evaluation goes through here and lands in the run's archive.
pub(crate) struct Evaluator<'a> {
    pub inst: &'a Instance,
    pub spec: &'a ObjectiveSpec,
    budget: u64,
    used: u64,
    archive: Archive<Solution>,
    progress: Option<&'a AtomicU64>,
    pub restarts: u64,
    pub iterations: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance, spec: &'a ObjectiveSpec, config: &SolverConfig) -> Result<Self> {
        let archive = match config.archive_capacity {
            Some(cap) => Archive::with_capacity_limit(cap)?,
            None => Archive::new(),
        };
        Ok(Evaluator {
            inst,
            spec,
            budget: config.budget,
            used: 0,
            archive,
            progress: None,
            restarts: 0,
            iterations: 0,
        })
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    pub fn archive(&self) -> &Archive<Solution> {
        &self.archive
    }

    /// Decodes and evaluates a valid gene string, or returns `None` once the
    /// budget is spent.
    pub fn evaluate(&mut self, seq: &OperationSequence) -> Option<ObjectiveVector> {
        if self.exhausted() {
            return None;
        }
        let schedule = decode_unchecked(seq.genes(), self.inst);
        Some(self.record(seq.clone(), schedule))
    }

    /// Evaluates an already built schedule (priority dispatching).
    pub fn evaluate_schedule(&mut self, schedule: Schedule) -> Option<ObjectiveVector> {
        if self.exhausted() {
            return None;
        }
        Some(self.record(schedule.to_sequence(), schedule))
    }

    fn record(&mut self, sequence: OperationSequence, schedule: Schedule) -> ObjectiveVector {
        self.used += 1;
        if let Some(p) = self.progress {
            p.store(self.used, Ordering::Relaxed);
        }
        let vector = evaluate_unchecked(schedule.completions(), self.inst, self.spec);
        self.archive.insert(vector.clone(), Solution { sequence, schedule });
        vector
    }

    pub fn finish(self) -> SolveReport {
        SolveReport {
            archive: self.archive,
            evaluations: self.used,
            restarts: self.restarts,
            iterations: self.iterations,
        }
    }
}
