//! Multi-objective production scheduling.
//!
//! The crate approximates the Pareto front of job-shop and flow-shop
//! instances under any ordered selection of makespan (`cmax`), total
//! completion time (`csum`), maximum tardiness (`tmax`) and number of tardy
//! jobs (`u`), and supports choosing one schedule from the front by
//! aspiration levels.
//!
//! ```
//! use paretoshop_core::{fixtures, solvers, AimSession, FrontPoint, ObjectiveSpec};
//!
//! let inst = fixtures::t2();
//! let spec: ObjectiveSpec = "cmax,tmax".parse().unwrap();
//! let cfg = solvers::SolverConfig::new(solvers::Method::Moea, 400, 1);
//! let report = solvers::solve(&inst, &spec, &cfg).unwrap();
//!
//! let front = report.archive.entries().iter().enumerate()
//!     .map(|(i, e)| FrontPoint { id: format!("s{i}"), vector: e.vector.clone() })
//!     .collect();
//! let session = AimSession::start(front).unwrap();
//! assert_eq!(session.finalize().unwrap().vector.values(), &[7, 0]);
//! ```

pub mod aim;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod pareto;
pub mod solvers;

pub use aim::{AimSession, FrontPoint, LevelChange, Partition};
pub use error::{Error, Result};
pub use model::{
    decode_semi_active, evaluate, random_sequence, Instance, InstanceKind, Job, JobId, MachineId, Objective,
    ObjectiveSpec, ObjectiveVector, Operation, OperationSequence, Schedule, Time,
};
pub use pareto::{brute_force_front, coverage, dominates, nondominated_filter, Archive, InsertOutcome, Solution};
