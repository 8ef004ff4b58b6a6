//! Task configuration: top-level shape, parameter access and config errors.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use metgroup::group::DEFAULT_ELEMENT_BUDGET;
use metgroup::scalar::parse_ratio;
use metgroup::Q;
use serde_json::Value;
use thiserror::Error;

use crate::groups::GroupSpec;

/// Bumped on any change to the report format.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Error)]
pub enum CliError {
    /// The config (or a value inside it) is malformed. `pointer` is a JSON
    /// pointer into the config document.
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error(transparent)]
    Core(#[from] metgroup::Error),
}

impl CliError {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { pointer: pointer.into(), message: message.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TaskId {
    Axioms,
    Cover,
    Brenner,
    Bigseq,
    Scan,
    Star,
    Iet,
    Sl,
    Ultra,
    Tree,
    Dirlim,
}

impl TaskId {
    pub const ALL: [TaskId; 11] = [
        TaskId::Axioms,
        TaskId::Cover,
        TaskId::Brenner,
        TaskId::Bigseq,
        TaskId::Scan,
        TaskId::Star,
        TaskId::Iet,
        TaskId::Sl,
        TaskId::Ultra,
        TaskId::Tree,
        TaskId::Dirlim,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TaskId::Axioms => "axioms",
            TaskId::Cover => "cover",
            TaskId::Brenner => "brenner",
            TaskId::Bigseq => "bigseq",
            TaskId::Scan => "scan",
            TaskId::Star => "star",
            TaskId::Iet => "iet",
            TaskId::Sl => "sl",
            TaskId::Ultra => "ultra",
            TaskId::Tree => "tree",
            TaskId::Dirlim => "dirlim",
        }
    }

    pub fn parse(s: &str) -> Option<TaskId> {
        TaskId::ALL.into_iter().find(|t| t.id() == s)
    }
}

#[derive(Clone, Debug)]
pub struct Budgets {
    /// Largest group an exhaustive routine may index.
    pub elements: usize,
    /// Default search bound on conjugate-ball levels.
    pub n_max: usize,
    /// Default depth cap for sequence trees.
    pub depth_cap: usize,
    /// Wall-clock cap, checked between independent work units.
    pub time_ms: Option<u64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { elements: DEFAULT_ELEMENT_BUDGET, n_max: 64, depth_cap: 8, time_ms: None }
    }
}

/// Task parameters: the `parameters` object merged with any extra
/// top-level keys. Each value remembers where it came from.
#[derive(Clone, Debug, Default)]
pub struct Params {
    entries: BTreeMap<String, (Value, String)>,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

impl Params {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Value)>) -> Params {
        let entries = pairs
            .into_iter()
            .map(|(k, v)| {
                let p = format!("/parameters/{}", escape(&k));
                (k, (v, p))
            })
            .collect();
        Params { entries }
    }

    fn insert(&mut self, key: &str, value: Value, pointer: String) -> CliResult<()> {
        if self.entries.contains_key(key) {
            return Err(CliError::config(pointer, format!("parameter {key:?} given twice")));
        }
        self.entries.insert(key.to_string(), (value, pointer));
        Ok(())
    }

    /// Echo for the report.
    pub fn to_json(&self) -> Value {
        Value::Object(self.entries.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key).map(|(v, _)| v)
    }

    pub fn pointer(&self, key: &str) -> String {
        match self.entries.get(key) {
            Some((_, p)) => p.clone(),
            None => format!("/parameters/{}", escape(key)),
        }
    }

    pub fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::config(self.pointer(key), message)
    }

    pub fn require(&self, key: &str) -> CliResult<&Value> {
        self.get(key).ok_or_else(|| self.err(key, format!("missing required parameter {key:?}")))
    }

    /// Rejects keys outside `allowed`.
    pub fn check_known(&self, allowed: &[&str]) -> CliResult<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(self.err(k, format!("unknown parameter {k:?}; expected one of {allowed:?}"))),
            None => Ok(()),
        }
    }

    pub fn rational(&self, key: &str) -> CliResult<Q> {
        parse_q(self.require(key)?, &self.pointer(key))
    }

    pub fn rational_or(&self, key: &str, default: Q) -> CliResult<Q> {
        match self.get(key) {
            Some(v) => parse_q(v, &self.pointer(key)),
            None => Ok(default),
        }
    }

    pub fn rationals(&self, key: &str) -> CliResult<Vec<Q>> {
        let ptr = self.pointer(key);
        let arr = self.require(key)?.as_array().ok_or_else(|| CliError::config(&ptr, "expected an array of rationals"))?;
        arr.iter().enumerate().map(|(i, v)| parse_q(v, &format!("{ptr}/{i}"))).collect()
    }

    pub fn uint(&self, key: &str) -> CliResult<u64> {
        let v = self.require(key)?;
        v.as_u64().ok_or_else(|| self.err(key, format!("expected a non-negative integer, got {v}")))
    }

    pub fn uint_or(&self, key: &str, default: u64) -> CliResult<u64> {
        match self.get(key) {
            Some(_) => self.uint(key),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        Ok(self.uint_or(key, default as u64)? as usize)
    }

    pub fn uints(&self, key: &str) -> CliResult<Vec<u64>> {
        let ptr = self.pointer(key);
        let arr = self.require(key)?.as_array().ok_or_else(|| CliError::config(&ptr, "expected an array of integers"))?;
        arr.iter()
            .enumerate()
            .map(|(i, v)| v.as_u64().ok_or_else(|| CliError::config(format!("{ptr}/{i}"), format!("expected a non-negative integer, got {v}"))))
            .collect()
    }

    /// `[lo, hi]` with `lo ≤ hi`.
    pub fn range(&self, key: &str) -> CliResult<(usize, usize)> {
        let v = self.uints(key)?;
        match v[..] {
            [lo, hi] if lo <= hi => Ok((lo as usize, hi as usize)),
            _ => Err(self.err(key, "expected [lo, hi] with lo <= hi")),
        }
    }

    pub fn range_or(&self, key: &str, default: (usize, usize)) -> CliResult<(usize, usize)> {
        match self.get(key) {
            Some(_) => self.range(key),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.get(key) {
            Some(v) => v.as_bool().ok_or_else(|| self.err(key, format!("expected a boolean, got {v}"))),
            None => Ok(default),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> CliResult<&'a str> {
        match self.get(key) {
            Some(v) => v.as_str().ok_or_else(|| self.err(key, format!("expected a string, got {v}"))),
            None => Ok(default),
        }
    }

    /// A string drawn from a fixed list.
    pub fn choice<'a>(&'a self, key: &str, options: &[&'a str]) -> CliResult<&'a str> {
        let s = self.str_or(key, options[0])?;
        options
            .iter()
            .find(|o| **o == s)
            .copied()
            .ok_or_else(|| self.err(key, format!("unknown value {s:?}; expected one of {options:?}")))
    }
}

/// `"p/q"`, a bare integer string, or a JSON integer. Floats are refused.
pub fn parse_q(v: &Value, pointer: &str) -> CliResult<Q> {
    match v {
        Value::String(s) => parse_ratio::<i64>(s).map_err(|e| CliError::config(pointer, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap())),
        Value::Number(_) => Err(CliError::config(pointer, "floating point values are not accepted; write a \"p/q\" string")),
        other => Err(CliError::config(pointer, format!("expected a rational, got {other}"))),
    }
}

#[derive(Clone, Debug)]
pub struct TaskConfig {
    pub task: TaskId,
    /// `group` (one entry) or `groups` (a family), validated.
    pub groups: Vec<GroupSpec>,
    pub family: bool,
    pub params: Params,
    pub seed: Option<u64>,
    pub budgets: Budgets,
}

impl TaskConfig {
    /// Validates the document shape and every group descriptor without
    /// building any group.
    pub fn parse(doc: &Value) -> CliResult<TaskConfig> {
        let obj = doc.as_object().ok_or_else(|| CliError::config("", "config must be a JSON object"))?;
        let task_v = obj.get("task").ok_or_else(|| CliError::config("/task", "missing \"task\""))?;
        let task = task_v
            .as_str()
            .and_then(TaskId::parse)
            .ok_or_else(|| {
                let known: Vec<&str> = TaskId::ALL.iter().map(|t| t.id()).collect();
                CliError::config("/task", format!("unknown task {task_v}; expected one of {known:?}"))
            })?;

        let (groups, family) = match (obj.get("group"), obj.get("groups")) {
            (Some(_), Some(_)) => return Err(CliError::config("/groups", "give either \"group\" or \"groups\", not both")),
            (Some(g), None) => (vec![GroupSpec::parse(g, "/group")?], false),
            (None, Some(Value::Array(gs))) => {
                if gs.is_empty() {
                    return Err(CliError::config("/groups", "family is empty"));
                }
                let specs = gs
                    .iter()
                    .enumerate()
                    .map(|(i, g)| GroupSpec::parse(g, &format!("/groups/{i}")))
                    .collect::<CliResult<Vec<_>>>()?;
                (specs, true)
            }
            (None, Some(_)) => return Err(CliError::config("/groups", "expected an array of group descriptors")),
            (None, None) => (vec![], false),
        };

        let seed = match obj.get("seed") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| CliError::config("/seed", "seed must be a non-negative 64-bit integer"))?),
        };

        let budgets = match obj.get("budgets") {
            None => Budgets::default(),
            Some(b) => parse_budgets(b)?,
        };

        let mut params = Params::default();
        match obj.get("parameters") {
            None => {}
            Some(Value::Object(m)) => {
                for (k, v) in m {
                    params.insert(k, v.clone(), format!("/parameters/{}", escape(k)))?;
                }
            }
            Some(_) => return Err(CliError::config("/parameters", "expected an object")),
        }
        for (k, v) in obj {
            if !matches!(k.as_str(), "task" | "group" | "groups" | "parameters" | "seed" | "budgets") {
                params.insert(k, v.clone(), format!("/{}", escape(k)))?;
            }
        }
        Ok(TaskConfig { task, groups, family, params, seed, budgets })
    }
}

fn parse_budgets(b: &Value) -> CliResult<Budgets> {
    let obj = b.as_object().ok_or_else(|| CliError::config("/budgets", "expected an object"))?;
    let mut out = Budgets::default();
    for (k, v) in obj {
        let ptr = format!("/budgets/{}", escape(k));
        let n = v.as_u64().ok_or_else(|| CliError::config(&ptr, "expected a non-negative integer"))?;
        match k.as_str() {
            "elements" => out.elements = n as usize,
            "n_max" => out.n_max = n as usize,
            "depth_cap" => out.depth_cap = n as usize,
            "time_ms" => out.time_ms = Some(n),
            _ => return Err(CliError::config(ptr, "unknown budget; expected elements, n_max, depth_cap or time_ms")),
        }
    }
    Ok(out)
}

/// Wall-clock cap shared by a task's work units.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: Instant,
    cap: Option<Duration>,
}

impl Deadline {
    pub fn new(time_ms: Option<u64>) -> Self {
        Deadline { start: Instant::now(), cap: time_ms.map(Duration::from_millis) }
    }

    pub fn expired(&self) -> bool {
        self.cap.is_some_and(|c| self.start.elapsed() > c)
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// Everything a task sees besides its groups.
pub struct Ctx<'a> {
    pub params: &'a Params,
    pub seed: Option<u64>,
    pub budgets: &'a Budgets,
    pub deadline: Deadline,
}

impl Ctx<'_> {
    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::config("/seed", "this task is randomized and needs an explicit seed"))
    }
}
