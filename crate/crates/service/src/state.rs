use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use paretoshop_core::io::{new_run_id, RunRecord, Store};
use paretoshop_core::solvers::{solve_with_progress, SolverConfig};
use paretoshop_core::{AimSession, Instance, ObjectiveSpec};
use serde::Serialize;
use tokio::sync::Semaphore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunState {
    Queued,
    Running,
    Done,
    Failed,
}

impl RunState {
    pub fn as_str(self) -> &'static str {
        match self {
            RunState::Queued => "queued",
            RunState::Running => "running",
            RunState::Done => "done",
            RunState::Failed => "failed",
        }
    }
}

#[derive(Debug)]
pub(crate) enum Outcome {
    Pending(RunState),
    Done(Arc<RunRecord>),
    Failed(String),
}

/// A run submitted through this process.
#[derive(Debug)]
pub(crate) struct RunSlot {
    pub budget: u64,
    pub progress: AtomicU64,
    pub outcome: Mutex<Outcome>,
}

impl RunSlot {
    fn set(&self, outcome: Outcome) {
        *self.outcome.lock().expect("run slot poisoned") = outcome;
    }
}

#[derive(Debug)]
pub(crate) struct AimEntry {
    pub run: String,
    pub session: AimSession,
}

/// Shared service state: the store, runs started by this process, and open
/// aspiration sessions.
pub struct AppState {
    pub(crate) store: Store,
    pub(crate) runs: Mutex<HashMap<String, Arc<RunSlot>>>,
    pub(crate) sessions: Mutex<HashMap<String, Arc<Mutex<AimEntry>>>>,
    pub(crate) session_counter: AtomicU64,
    /// Serializes instance uploads.
    pub(crate) instance_writes: Mutex<()>,
    workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(store: Store, workers: usize) -> Self {
        AppState {
            store,
            runs: Mutex::default(),
            sessions: Mutex::default(),
            session_counter: AtomicU64::new(0),
            instance_writes: Mutex::new(()),
            workers: Arc::new(Semaphore::new(workers.max(1))),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub(crate) fn run_slot(&self, id: &str) -> Option<Arc<RunSlot>> {
        self.runs.lock().expect("run table poisoned").get(id).cloned()
    }

    /// Queues a solver run and returns its id at once. The run waits for a
    /// free worker (first come, first served), solves on a blocking thread
    /// and persists its record.
    pub(crate) fn submit(self: &Arc<Self>, inst: Instance, spec: ObjectiveSpec, config: SolverConfig) -> String {
        let id = new_run_id();
        let slot = Arc::new(RunSlot {
            budget: config.budget,
            progress: AtomicU64::new(0),
            outcome: Mutex::new(Outcome::Pending(RunState::Queued)),
        });
        self.runs
            .lock()
            .expect("run table poisoned")
            .insert(id.clone(), slot.clone());

        let state = self.clone();
        let run_id = id.clone();
        tokio::spawn(async move {
            let Ok(_permit) = state.workers.clone().acquire_owned().await else {
                return;
            };
            slot.set(Outcome::Pending(RunState::Running));
            let worker_slot = slot.clone();
            let store_state = state.clone();
            let joined = tokio::task::spawn_blocking(move || {
                let started = Instant::now();
                let report = solve_with_progress(&inst, &spec, &config, Some(&worker_slot.progress))?;
                let mut record = RunRecord::from_report(&inst, &spec, &config, &report, started.elapsed());
                record.id = run_id;
                store_state.store.save_run(&mut record)?;
                Ok::<_, paretoshop_core::Error>(record)
            })
            .await;
            match joined {
                Ok(Ok(record)) => {
                    log::info!("run {} finished after {} evaluations", record.id, record.evaluations);
                    slot.progress.store(record.evaluations, Ordering::Relaxed);
                    slot.set(Outcome::Done(Arc::new(record)));
                }
                Ok(Err(e)) => {
                    log::warn!("run failed: {e}");
                    slot.set(Outcome::Failed(e.to_string()));
                }
                Err(e) => slot.set(Outcome::Failed(format!("solver task aborted: {e}"))),
            }
        });
        id
    }
}
