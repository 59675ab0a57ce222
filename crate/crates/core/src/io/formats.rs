//! Text formats for instances: OR-Library job shop, plain flow shop and an
//! extended JSON document carrying release and due dates.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Instance, InstanceKind, Job, Time};

/// Parses the OR-Library job-shop layout: a header line `n m`, then one line
/// per job with `m` pairs `machine duration` (machines 0-based, in routing
/// order). Lines before the header that are blank, comments or free text are
/// skipped; anything after the last job line is ignored.
pub fn parse_orlib_jobshop(text: &str) -> Result<Instance> {
    let eof = text.lines().count() + 1;
    let mut lines = numbered_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut routes = Vec::with_capacity(n);
    for j in 0..n {
        let (line_no, line) = next_data_line(&mut lines, eof, j + 1)?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 * m {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected {} tokens ({m} machine/duration pairs), found {}",
                    2 * m,
                    tokens.len()
                ),
            ));
        }
        let mut route = Vec::with_capacity(m);
        for pair in tokens.chunks(2) {
            let machine = number(pair[0], line_no, "machine index")? as usize;
            if machine >= m {
                return Err(Error::parse(
                    line_no,
                    format!("machine index {machine} is not below {m}"),
                ));
            }
            let duration = number(pair[1], line_no, "duration")?;
            route.push((machine, duration));
        }
        routes.push(route);
    }
    Instance::job_shop("", m, routes)
}

/// Parses a flow shop: header `n m`, then one row of `m` durations per job.
pub fn parse_flowshop(text: &str) -> Result<Instance> {
    let eof = text.lines().count() + 1;
    let mut lines = numbered_lines(text);
    let (n, m) = header(&mut lines)?;
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let (line_no, line) = next_data_line(&mut lines, eof, j + 1)?;
        let row = line
            .split_whitespace()
            .map(|t| number(t, line_no, "duration"))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != m {
            return Err(Error::parse(
                line_no,
                format!("expected {m} durations, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    Instance::flow_shop("", rows)
}

/// OR-Library job-shop text. Release and due dates are not representable.
pub fn write_orlib_jobshop(inst: &Instance) -> Result<String> {
    if inst.jobs().iter().any(|j| j.release() != 0 || j.due().is_some()) {
        return Err(Error::contract(
            "release or due dates cannot be written in the OR-Library format",
        ));
    }
    if inst.jobs().iter().any(|j| j.operation_count() != inst.machine_count()) {
        return Err(Error::contract(
            "the OR-Library format needs exactly one operation per machine column",
        ));
    }
    let mut out = format!("{} {}\n", inst.job_count(), inst.machine_count());
    for job in inst.jobs() {
        let line: Vec<String> = job
            .operations()
            .iter()
            .map(|op| format!("{} {}", op.machine, op.duration))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Flow-shop text. Fails unless every job visits machines 0..m in order and
/// no release or due dates are set.
pub fn write_flowshop(inst: &Instance) -> Result<String> {
    if inst.jobs().iter().any(|j| j.release() != 0 || j.due().is_some()) {
        return Err(Error::contract(
            "release or due dates cannot be written in the flow-shop format",
        ));
    }
    let m = inst.machine_count();
    let flow = inst
        .jobs()
        .iter()
        .all(|j| j.operation_count() == m && j.operations().iter().enumerate().all(|(k, op)| op.machine == k));
    if !flow {
        return Err(Error::contract("instance routing is not a flow shop"));
    }
    let mut out = format!("{} {}\n", inst.job_count(), m);
    for job in inst.jobs() {
        let row: Vec<String> = job.operations().iter().map(|op| op.duration.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Parses the extended JSON schema:
/// `{name, kind, machines, jobs: [{id, release, due?, ops: [{machine, duration}]}]}`.
/// Errors name the offending JSON path.
pub fn parse_extended_json(text: &str) -> Result<Instance> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
    instance_from_value(&root)
}

pub fn instance_from_value(root: &Value) -> Result<Instance> {
    let obj = as_object(root, "$")?;
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::schema("name", "expected a string")),
        None => return Err(Error::schema("name", "missing field")),
    };
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("job_shop") => InstanceKind::JobShop,
        Some("flow_shop") => InstanceKind::FlowShop,
        _ => return Err(Error::schema("kind", "expected \"job_shop\" or \"flow_shop\"")),
    };
    let machines = unsigned(obj.get("machines"), "machines")? as usize;
    let jobs_val = match obj.get("jobs") {
        Some(Value::Array(a)) => a,
        _ => return Err(Error::schema("jobs", "expected an array")),
    };
    let mut jobs = Vec::with_capacity(jobs_val.len());
    for (i, jv) in jobs_val.iter().enumerate() {
        let path = format!("jobs[{i}]");
        let jo = as_object(jv, &path)?;
        let id = unsigned(jo.get("id"), &format!("{path}.id"))? as usize;
        if id != i + 1 {
            return Err(Error::schema(
                format!("{path}.id"),
                format!("expected job id {}", i + 1),
            ));
        }
        let release = match jo.get("release") {
            None => 0,
            v => unsigned(v, &format!("{path}.release"))?,
        };
        let due = match jo.get("due") {
            None | Some(Value::Null) => None,
            v => Some(unsigned(v, &format!("{path}.due"))?),
        };
        let ops = match jo.get("ops") {
            Some(Value::Array(a)) => a,
            _ => return Err(Error::schema(format!("{path}.ops"), "expected an array")),
        };
        let mut routing = Vec::with_capacity(ops.len());
        for (k, ov) in ops.iter().enumerate() {
            let op_path = format!("{path}.ops[{k}]");
            let oo = as_object(ov, &op_path)?;
            let machine = unsigned(oo.get("machine"), &format!("{op_path}.machine"))? as usize;
            if machine >= machines {
                return Err(Error::schema(
                    format!("{op_path}.machine"),
                    format!("machine {machine} is not below {machines}"),
                ));
            }
            let duration = unsigned(oo.get("duration"), &format!("{op_path}.duration"))?;
            routing.push((machine, duration));
        }
        if routing.is_empty() {
            return Err(Error::schema(
                format!("{path}.ops"),
                "a job needs at least one operation",
            ));
        }
        jobs.push(Job::new(id, release, due, &routing));
    }
    Instance::new(name, kind, machines, jobs).map_err(|e| Error::schema("$", e.to_string()))
}

pub fn instance_to_value(inst: &Instance) -> Value {
    let jobs: Vec<Value> = inst
        .jobs()
        .iter()
        .map(|j| {
            let mut o = Map::new();
            o.insert("id".into(), json!(j.id()));
            o.insert("release".into(), json!(j.release()));
            if let Some(d) = j.due() {
                o.insert("due".into(), json!(d));
            }
            let ops: Vec<Value> = j
                .operations()
                .iter()
                .map(|op| json!({"machine": op.machine, "duration": op.duration}))
                .collect();
            o.insert("ops".into(), Value::Array(ops));
            Value::Object(o)
        })
        .collect();
    json!({
        "name": inst.name(),
        "kind": inst.kind().to_string(),
        "machines": inst.machine_count(),
        "jobs": jobs,
    })
}

pub fn write_extended_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_value(inst)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))
}

fn unsigned(v: Option<&Value>, path: &str) -> Result<u64> {
    match v {
        None => Err(Error::schema(path, "missing field")),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::schema(path, "expected a nonnegative integer")),
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<(usize, usize)> {
    let mut last = 0;
    for (no, line) in lines.by_ref() {
        last = no;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if let [a, b] = tokens[..] {
            if let (Ok(n), Ok(m)) = (a.parse::<usize>(), b.parse::<usize>()) {
                if n == 0 || m == 0 {
                    return Err(Error::parse(no, "job and machine counts must be positive"));
                }
                return Ok((n, m));
            }
        }
    }
    Err(Error::parse(last.max(1), "no \"n m\" header line found"))
}

fn next_data_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    eof_line: usize,
    job: usize,
) -> Result<(usize, &'a str)> {
    lines
        .find(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .ok_or_else(|| Error::parse(eof_line, format!("unexpected end of input, job {job} missing")))
}

fn number(tok: &str, line: usize, what: &str) -> Result<Time> {
    tok.parse::<Time>().map_err(|_| {
        if tok.starts_with('-') {
            Error::parse(line, format!("{what} '{tok}' is negative"))
        } else {
            Error::parse(line, format!("{what} '{tok}' is not a nonnegative integer"))
        }
    })
}
