use std::sync::atomic::Ordering;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use paretoshop_core::io::{instance_from_value, instance_to_value, valid_name, InstanceFormat, RunRecord};
use paretoshop_core::solvers::{Method, SolverConfig};
use paretoshop_core::{AimSession, Error, FrontPoint, InstanceKind, ObjectiveSpec, ObjectiveVector};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{ApiError, ApiResult};
use crate::gantt::GanttData;
use crate::state::{AimEntry, AppState, Outcome, RunState};

type Shared = State<Arc<AppState>>;

fn json_object(body: &Bytes) -> ApiResult<Map<String, Value>> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::unprocessable("request body must be a JSON object")),
        Err(e) => Err(ApiError::unprocessable(format!("malformed JSON: {e}"))),
    }
}

fn string_field<'a>(body: &'a Map<String, Value>, key: &str) -> ApiResult<&'a str> {
    body.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ApiError::unprocessable(format!("field {key} must be a string")))
}

fn u64_field(body: &Map<String, Value>, key: &str) -> ApiResult<Option<u64>> {
    match body.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| ApiError::unprocessable(format!("field {key} must be a nonnegative integer"))),
    }
}

#[derive(Debug, Serialize)]
pub struct InstanceSummary {
    pub name: String,
    pub kind: InstanceKind,
    pub jobs: usize,
    pub machines: usize,
}

pub async fn list_instances(State(state): Shared) -> ApiResult<Json<Vec<InstanceSummary>>> {
    let mut out = Vec::new();
    for name in state.store.list_instances()? {
        match state.store.load_instance(&name) {
            Ok(inst) => out.push(InstanceSummary {
                name,
                kind: inst.kind(),
                jobs: inst.job_count(),
                machines: inst.machine_count(),
            }),
            Err(e) => log::warn!("skipping unreadable instance {name}: {e}"),
        }
    }
    Ok(Json(out))
}

pub async fn get_instance(State(state): Shared, Path(name): Path<String>) -> ApiResult<Json<Value>> {
    let inst = state.store.load_instance(&name)?;
    Ok(Json(instance_to_value(&inst)))
}

/// Accepts either an extended-JSON instance document or
/// `{"name", "format": "jss"|"fsp"|"json", "text"}` wrapping a text file.
pub async fn upload_instance(State(state): Shared, body: Bytes) -> ApiResult<(StatusCode, Json<InstanceSummary>)> {
    let body = json_object(&body)?;
    let inst = if body.contains_key("text") {
        let name = string_field(&body, "name")?;
        let format = match string_field(&body, "format")? {
            "jss" => InstanceFormat::OrLib,
            "fsp" => InstanceFormat::FlowShop,
            "json" => InstanceFormat::Json,
            other => return Err(ApiError::unprocessable(format!("unknown instance format {other}"))),
        };
        let mut inst = format.parse(string_field(&body, "text")?)?;
        inst.set_name(name);
        inst
    } else {
        instance_from_value(&Value::Object(body))?
    };
    if !valid_name(inst.name()) {
        return Err(ApiError::unprocessable(format!(
            "invalid instance name {:?}",
            inst.name()
        )));
    }
    {
        let _guard = state.instance_writes.lock().expect("upload lock poisoned");
        if state.store.load_instance(inst.name()).is_ok() {
            return Err(ApiError::conflict(format!("instance {} already exists", inst.name())));
        }
        state.store.save_instance(&inst, false)?;
    }
    log::info!("stored instance {}", inst.name());
    Ok((
        StatusCode::CREATED,
        Json(InstanceSummary {
            name: inst.name().to_string(),
            kind: inst.kind(),
            jobs: inst.job_count(),
            machines: inst.machine_count(),
        }),
    ))
}

fn parse_spec(v: Option<&Value>) -> ApiResult<ObjectiveSpec> {
    let invalid = |e: Error| ApiError::unprocessable(e.to_string());
    match v {
        Some(Value::String(s)) => s.parse().map_err(invalid),
        Some(v @ Value::Array(_)) => {
            serde_json::from_value(v.clone()).map_err(|e| ApiError::unprocessable(format!("objectives: {e}")))
        }
        _ => Err(ApiError::unprocessable("field objectives must list objective names")),
    }
}

/// Body: `{instance, objectives, method?, budget?, seed?, config?}` where
/// `config` holds further solver parameters.
pub async fn create_run(State(state): Shared, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let body = json_object(&body)?;
    let name = string_field(&body, "instance")?;
    let spec = parse_spec(body.get("objectives"))?;
    let mut config: SolverConfig = match body.get("config") {
        None | Some(Value::Null) => SolverConfig::default(),
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| ApiError::unprocessable(format!("config: {e}")))?,
    };
    if let Some(m) = body.get("method") {
        let m = m
            .as_str()
            .ok_or_else(|| ApiError::unprocessable("field method must be a string"))?;
        config.method = m
            .parse::<Method>()
            .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    }
    if let Some(b) = u64_field(&body, "budget")? {
        config.budget = b;
    }
    if let Some(s) = u64_field(&body, "seed")? {
        config.seed = s;
    }
    config.validate()?;
    let inst = state.store.load_instance(name)?;
    spec.check(&inst)?;
    let id = state.submit(inst, spec, config);
    log::info!("queued run {id} on instance {name}");
    Ok((StatusCode::ACCEPTED, Json(json!({ "id": id }))))
}

#[derive(Debug, Serialize)]
pub struct RunStatus {
    pub id: String,
    pub state: RunState,
    pub evaluations: u64,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

enum Lookup {
    Pending(RunState, u64, u64),
    Done(Arc<RunRecord>),
    Failed(String, u64, u64),
}

fn lookup_run(state: &AppState, id: &str) -> ApiResult<Lookup> {
    if let Some(slot) = state.run_slot(id) {
        let evaluations = slot.progress.load(Ordering::Relaxed);
        return Ok(match &*slot.outcome.lock().expect("run slot poisoned") {
            Outcome::Pending(s) => Lookup::Pending(*s, evaluations, slot.budget),
            Outcome::Done(r) => Lookup::Done(r.clone()),
            Outcome::Failed(msg) => Lookup::Failed(msg.clone(), evaluations, slot.budget),
        });
    }
    Ok(Lookup::Done(Arc::new(state.store.load_run(id)?)))
}

fn finished_run(state: &AppState, id: &str) -> ApiResult<Arc<RunRecord>> {
    match lookup_run(state, id)? {
        Lookup::Done(r) => Ok(r),
        Lookup::Pending(s, ..) => Err(ApiError::conflict(format!(
            "run {id} is {} and has no front yet",
            s.as_str()
        ))),
        Lookup::Failed(msg, ..) => Err(ApiError::conflict(format!("run {id} failed: {msg}"))),
    }
}

pub async fn run_status(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<RunStatus>> {
    let status = match lookup_run(&state, &id)? {
        Lookup::Pending(s, evaluations, budget) => RunStatus {
            id,
            state: s,
            evaluations,
            budget,
            front_size: None,
            error: None,
        },
        Lookup::Done(r) => RunStatus {
            id,
            state: RunState::Done,
            evaluations: r.evaluations,
            budget: r.config.budget,
            front_size: Some(r.front.len()),
            error: None,
        },
        Lookup::Failed(msg, evaluations, budget) => RunStatus {
            id,
            state: RunState::Failed,
            evaluations,
            budget,
            front_size: None,
            error: Some(msg),
        },
    };
    Ok(Json(status))
}

pub async fn run_front(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Vec<FrontPoint>>> {
    let record = finished_run(&state, &id)?;
    Ok(Json(front_points(&record)))
}

fn front_points(record: &RunRecord) -> Vec<FrontPoint> {
    record
        .front
        .iter()
        .map(|e| FrontPoint {
            id: e.id.clone(),
            vector: e.vector.clone(),
        })
        .collect()
}

pub async fn gantt(State(state): Shared, Path((id, sid)): Path<(String, String)>) -> ApiResult<Json<GanttData>> {
    let record = finished_run(&state, &id)?;
    let entry = record
        .solution(&sid)
        .ok_or_else(|| ApiError::not_found(format!("run {id} has no solution {sid}")))?;
    let inst = state.store.load_instance(&record.instance)?;
    if let Err(v) = entry.schedule.verify(&inst) {
        return Err(ApiError::internal(format!(
            "stored schedule {sid} does not fit instance {}: {v}",
            record.instance
        )));
    }
    Ok(Json(GanttData::new(&inst, &entry.schedule)))
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub id: String,
    pub run: String,
    pub levels: Vec<i64>,
    pub as_ids: Vec<String>,
    pub not_as_ids: Vec<String>,
}

fn view(id: &str, entry: &AimEntry) -> SessionView {
    let p = entry.session.partition();
    SessionView {
        id: id.to_string(),
        run: entry.run.clone(),
        levels: entry.session.levels().to_vec(),
        as_ids: p.satisfied,
        not_as_ids: p.unsatisfied,
    }
}

fn session(state: &AppState, id: &str) -> ApiResult<Arc<Mutex<AimEntry>>> {
    state
        .sessions
        .lock()
        .expect("session table poisoned")
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no aspiration session {id}")))
}

/// Body: `{"run": <run id>}`.
pub async fn create_session(State(state): Shared, body: Bytes) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let body = json_object(&body)?;
    let run = string_field(&body, "run")?;
    let record = finished_run(&state, run)?;
    let session = AimSession::start(front_points(&record))?;
    let id = format!("aim-{}", state.session_counter.fetch_add(1, Ordering::Relaxed) + 1);
    let entry = AimEntry {
        run: run.to_string(),
        session,
    };
    let out = view(&id, &entry);
    state
        .sessions
        .lock()
        .expect("session table poisoned")
        .insert(id, Arc::new(Mutex::new(entry)));
    Ok((StatusCode::CREATED, Json(out)))
}

pub async fn get_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = session(&state, &id)?;
    let entry = s.lock().expect("session poisoned");
    Ok(Json(view(&id, &entry)))
}

/// Body: `{"value": <integer>}`; `i` counts objectives from 1.
pub async fn set_level(
    State(state): Shared,
    Path((id, i)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let s = session(&state, &id)?;
    let i: usize = i
        .parse()
        .map_err(|_| ApiError::unprocessable(format!("objective index {i} is not a positive integer")))?;
    let body = json_object(&body)?;
    let value = body
        .get("value")
        .and_then(Value::as_i64)
        .ok_or_else(|| ApiError::unprocessable("field value must be an integer"))?;
    let mut entry = s.lock().expect("session poisoned");
    entry.session.set_level(i, value)?;
    Ok(Json(view(&id, &entry)))
}

#[derive(Debug, Serialize)]
pub struct Chosen {
    pub session: String,
    pub run: String,
    pub id: String,
    pub vector: ObjectiveVector,
}

pub async fn finalize(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Chosen>> {
    let s = session(&state, &id)?;
    let entry = s.lock().expect("session poisoned");
    let x = entry.session.finalize()?;
    Ok(Json(Chosen {
        session: id.clone(),
        run: entry.run.clone(),
        id: x.id.clone(),
        vector: x.vector.clone(),
    }))
}
