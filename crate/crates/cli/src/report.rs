//! Runs a task config end to end and assembles the report document.

use metgroup::coverage::Verdict;
use serde_json::{json, Value};

use crate::config::{CliError, Ctx, Deadline, TaskConfig, SCHEMA_VERSION};
use crate::groups::AnyGroup;
use crate::tasks::{dispatch, known_params, Outcome};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the config's seed.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Value,
    pub exit: i32,
    pub csv: Option<String>,
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::True => EXIT_TRUE,
        Verdict::False => EXIT_FALSE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn skeleton(task: Value, params: Value, seed: Option<u64>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "group": null,
        "parameters": params,
        "seed": seed,
        "verdict": null,
        "witness": null,
        "levels": null,
        "certificate": null,
        "result": null,
        "error": null,
        "runtime_ms": 0,
    })
}

fn error_output(mut report: Value, err: CliError, deadline: &Deadline) -> RunOutput {
    let (verdict, exit, kind, pointer) = match &err {
        CliError::Config { pointer, .. } => (Value::Null, EXIT_CONFIG, "config", json!(pointer)),
        CliError::Core(e) => match e {
            metgroup::Error::Capability(_) => (json!("inconclusive"), EXIT_INCONCLUSIVE, "capability", Value::Null),
            metgroup::Error::ConstructionIncomplete { .. } => {
                (json!("inconclusive"), EXIT_INCONCLUSIVE, "construction_incomplete", Value::Null)
            }
            metgroup::Error::NoWitness(_) => (json!("false"), EXIT_FALSE, "no_witness", Value::Null),
            metgroup::Error::Domain(_) => (Value::Null, EXIT_CONFIG, "domain", json!("/parameters")),
            metgroup::Error::Precondition(_) => (Value::Null, EXIT_CONFIG, "precondition", json!("/parameters")),
            metgroup::Error::Parse(_) => (Value::Null, EXIT_CONFIG, "parse", json!("/parameters")),
        },
    };
    let message = match &err {
        CliError::Config { message, .. } => message.clone(),
        CliError::Core(e) => e.to_string(),
    };
    report["verdict"] = verdict;
    report["error"] = json!({"kind": kind, "pointer": pointer, "message": message});
    report["runtime_ms"] = json!(deadline.elapsed_ms());
    RunOutput { report, exit, csv: None }
}

/// Validates `doc`, runs the task and returns the report with its exit
/// status. Never panics on bad input.
pub fn run(doc: &Value, opts: &RunOptions) -> RunOutput {
    let deadline = Deadline::new(None);
    let cfg = match TaskConfig::parse(doc) {
        Ok(c) => c,
        Err(e) => {
            let task = doc.get("task").cloned().unwrap_or(Value::Null);
            return error_output(skeleton(task, Value::Null, opts.seed), e, &deadline);
        }
    };
    let seed = opts.seed.or(cfg.seed);
    let mut report = skeleton(json!(cfg.task.id()), cfg.params.to_json(), seed);
    if cfg.family {
        report["group"] = Value::Array(cfg.groups.iter().map(|g| g.descriptor()).collect());
    } else if let Some(g) = cfg.groups.first() {
        report["group"] = g.descriptor();
    }
    if let Err(e) = cfg.params.check_known(known_params(cfg.task)) {
        return error_output(report, e, &deadline);
    }
    let deadline = Deadline::new(cfg.budgets.time_ms);
    let groups: Vec<AnyGroup> = match cfg.groups.iter().map(|g| g.build()).collect() {
        Ok(gs) => gs,
        Err(e) => return error_output(report, e, &deadline),
    };
    let ctx = Ctx { params: &cfg.params, seed, budgets: &cfg.budgets, deadline };
    match dispatch(&cfg, &groups, &ctx) {
        Ok(out) => finish(report, out, &deadline),
        Err(e) => error_output(report, e, &deadline),
    }
}

fn finish(mut report: Value, out: Outcome, deadline: &Deadline) -> RunOutput {
    let exit = exit_code(out.verdict);
    if !out.group.is_null() {
        report["group"] = out.group;
    }
    report["verdict"] = json!(out.verdict.as_str());
    report["witness"] = out.witness;
    report["levels"] = out.levels;
    report["certificate"] = out.certificate;
    report["result"] = out.result;
    report["runtime_ms"] = json!(deadline.elapsed_ms());
    RunOutput { report, exit, csv: out.csv }
}

/// The report without its timing field, for determinism comparisons.
pub fn without_runtime(report: &Value) -> Value {
    let mut r = report.clone();
    if let Some(o) = r.as_object_mut() {
        o.remove("runtime_ms");
    }
    r
}
