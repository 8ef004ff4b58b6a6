//! Task implementations. Each task turns parameters and groups into an
//! [`Outcome`]; the report layer adds the bookkeeping fields.

mod axioms;
mod brenner;
mod coverage;
mod iet;
mod sl;
mod ultra;

use fixedbitset::FixedBitSet;
use metgroup::coverage::Verdict;
use metgroup::{ConjProductCert, Enumerated, GroupAdapter};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult, Ctx, TaskConfig, TaskId};
use crate::groups::AnyGroup;

pub(crate) use self::coverage::parse_sets as coverage_sets;

/// What a task hands back to the report layer.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub group: Value,
    pub witness: Value,
    pub levels: Value,
    pub certificate: Value,
    pub result: Value,
    /// Table export for `--format csv`, when the task has one.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new(verdict: Verdict, group: Value, result: Value) -> Self {
        Outcome {
            verdict,
            group,
            witness: Value::Null,
            levels: Value::Null,
            certificate: Value::Null,
            result,
            csv: None,
        }
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = w;
        self
    }

    pub fn levels(mut self, l: impl Into<Value>) -> Self {
        self.levels = l.into();
        self
    }

    pub fn certificate(mut self, c: Value) -> Self {
        self.certificate = c;
        self
    }
}

/// Parameters each task accepts.
pub fn known_params(task: TaskId) -> &'static [&'static str] {
    match task {
        TaskId::Axioms => axioms::PARAMS,
        TaskId::Cover => coverage::COVER_PARAMS,
        TaskId::Brenner => brenner::PARAMS,
        TaskId::Bigseq => coverage::BIGSEQ_PARAMS,
        TaskId::Scan => coverage::SCAN_PARAMS,
        TaskId::Star => coverage::STAR_PARAMS,
        TaskId::Iet => iet::PARAMS,
        TaskId::Sl => sl::PARAMS,
        TaskId::Ultra => ultra::PARAMS,
        TaskId::Tree => coverage::TREE_PARAMS,
        TaskId::Dirlim => coverage::DIRLIM_PARAMS,
    }
}

fn single<'a>(groups: &'a [AnyGroup], cfg: &TaskConfig) -> CliResult<&'a AnyGroup> {
    match groups {
        [g] if !cfg.family => Ok(g),
        [] => Err(CliError::config("/group", format!("task {:?} needs a group", cfg.task.id()))),
        _ => Err(CliError::config("/groups", format!("task {:?} takes a single \"group\"", cfg.task.id()))),
    }
}

fn family<'a>(groups: &'a [AnyGroup], cfg: &TaskConfig) -> CliResult<&'a [AnyGroup]> {
    if groups.is_empty() {
        return Err(CliError::config("/groups", format!("task {:?} needs a family \"groups\"", cfg.task.id())));
    }
    Ok(groups)
}

pub fn dispatch(cfg: &TaskConfig, groups: &[AnyGroup], ctx: &Ctx) -> CliResult<Outcome> {
    match cfg.task {
        TaskId::Axioms => crate::with_group!(single(groups, cfg)?, |g| axioms::run(g, ctx)),
        TaskId::Cover => crate::with_group!(single(groups, cfg)?, |g| coverage::cover(g, ctx)),
        TaskId::Bigseq => crate::with_group!(single(groups, cfg)?, |g| coverage::bigseq(g, ctx)),
        TaskId::Tree => crate::with_group!(single(groups, cfg)?, |g| coverage::tree(g, ctx)),
        TaskId::Scan => crate::with_family!(family(groups, cfg)?, |gs| coverage::scan(&gs, ctx)),
        TaskId::Star => crate::with_family!(family(groups, cfg)?, |gs| coverage::star(&gs, ctx)),
        TaskId::Brenner => brenner::run(groups.first(), ctx),
        TaskId::Iet => iet::run(ctx),
        TaskId::Sl => sl::run(groups.first(), ctx),
        TaskId::Ultra => ultra::run(ctx),
        TaskId::Dirlim => coverage::dirlim(ctx),
    }
}

/// Indexes a group under the configured element budget.
pub(crate) fn enumerate<'g, G: GroupAdapter>(g: &'g G, ctx: &Ctx) -> CliResult<Enumerated<'g, G>> {
    Ok(Enumerated::with_budget(g, ctx.budgets.elements)?)
}

/// Decodes an element parameter.
pub(crate) fn elem_param<G: GroupAdapter>(g: &G, ctx: &Ctx, key: &str) -> CliResult<G::Elem> {
    let v = ctx.params.require(key)?;
    g.decode(v).map_err(|e| ctx.params.err(key, e.to_string()))
}

pub(crate) fn index_param<G: GroupAdapter>(en: &Enumerated<'_, G>, ctx: &Ctx, key: &str) -> CliResult<usize> {
    let x = elem_param(en.group(), ctx, key)?;
    en.index_of(&x).ok_or_else(|| ctx.params.err(key, "element is not in the group"))
}

pub(crate) fn cert_json<G: GroupAdapter>(g: &G, c: &Option<ConjProductCert<G::Elem>>) -> Value {
    c.as_ref().map_or(Value::Null, |c| c.to_json(g))
}

pub(crate) fn encode_set<G: GroupAdapter>(en: &Enumerated<'_, G>, s: &FixedBitSet) -> Value {
    Value::Array(s.ones().map(|i| en.encode(i)).collect())
}

pub(crate) fn timed_out(result: Value) -> Value {
    json!({"stopped": "time budget", "partial": result})
}
