//! Re-checks the claims a report makes: certificates are replayed and
//! witnesses of failure are tested for the specific membership they
//! assert. Nothing else from the original run is recomputed.

use metgroup::coverage::{thickening, ConjBall};
use metgroup::norms::{reproduces_violation, Axiom};
use metgroup::{ConjProductCert, Enumerated, GroupAdapter, NormValue, Q};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult, Params, SCHEMA_VERSION};
use crate::groups::GroupSpec;
use crate::tasks::coverage_sets;

#[derive(Clone, Debug)]
pub struct Check {
    pub claim: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOutcome {
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "verified": self.ok(),
            "checks": self.checks.iter().map(|c| json!({"claim": c.claim, "ok": c.ok})).collect::<Vec<_>>(),
        })
    }

    fn push(&mut self, claim: impl Into<String>, ok: bool) {
        self.checks.push(Check { claim: claim.into(), ok });
    }
}

fn field<'a>(v: &'a Value, key: &str, ptr: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| CliError::config(format!("{ptr}/{key}"), format!("missing {key:?}")))
}

fn decode<G: GroupAdapter>(g: &G, v: &Value, ptr: &str) -> CliResult<G::Elem> {
    g.decode(v).map_err(|e| CliError::config(ptr, e.to_string()))
}

pub fn verify_report(report: &Value) -> CliResult<VerifyOutcome> {
    match report.get("schema_version").and_then(|s| s.as_str()) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(CliError::config("/schema_version", format!("unsupported schema version {other:?}"))),
        None => return Err(CliError::config("/schema_version", "not a report")),
    }
    let task = report.get("task").and_then(|t| t.as_str()).unwrap_or("");
    let params = Params::from_pairs(
        report.get("parameters").and_then(|p| p.as_object()).cloned().unwrap_or_default(),
    );
    let mut out = VerifyOutcome::default();

    let mut certs: Vec<(Value, Value, String)> = Vec::new();
    if let Some(c) = report.get("certificate").filter(|c| !c.is_null()) {
        certs.push((report["group"].clone(), c.clone(), "/certificate".into()));
    }
    if let Some(list) = report.pointer("/result/certificates").and_then(|l| l.as_array()) {
        for (i, item) in list.iter().enumerate() {
            let ptr = format!("/result/certificates/{i}");
            certs.push((field(item, "group", &ptr)?.clone(), field(item, "certificate", &ptr)?.clone(), ptr));
        }
    }
    let bound = match task {
        "dirlim" => params.get("n").and_then(|n| n.as_u64()),
        "brenner" if params.get("check").and_then(|c| c.as_str()) == Some("four_conjugates") => {
            Some(params.get("n_conj").and_then(|n| n.as_u64()).unwrap_or(4))
        }
        _ => None,
    };
    for (desc, cert, ptr) in certs {
        let group = GroupSpec::parse(&desc, &format!("{ptr}/group"))?.build()?;
        let (replays, len) = crate::with_group!(&group, |g| {
            let c = ConjProductCert::from_json(g, &cert).map_err(|e| CliError::config(&ptr, e.to_string()))?;
            (c.replay(g), c.len())
        });
        out.push(format!("{ptr} replays to its claimed product"), replays);
        if let Some(b) = bound {
            out.push(format!("{ptr} has at most {b} factors"), len as u64 <= b);
        }
    }

    let witness = report.get("witness").filter(|w| !w.is_null());
    let falsified = report.get("verdict").and_then(|v| v.as_str()) == Some("false");
    if let (Some(w), true) = (witness, falsified) {
        match task {
            "axioms" | "bigseq" | "cover" => {
                let group = GroupSpec::parse(&report["group"], "/group")?.build()?;
                crate::with_group!(&group, |g| witness_checks(g, task, w, &params, &mut out))?;
            }
            "scan" => {
                let i = field(w, "group_index", "/witness")?.as_u64().unwrap_or(0) as usize;
                let desc = report["group"].get(i).ok_or_else(|| CliError::config("/witness/group_index", "no such group"))?;
                let group = GroupSpec::parse(desc, &format!("/group/{i}"))?.build()?;
                crate::with_group!(&group, |g| scan_check(g, w, &params, &mut out))?;
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `y ∈ X·B` for an indexed set `X` and ball `B`: some `x ∈ X` has
/// `x⁻¹y ∈ B`.
fn in_product<G: GroupAdapter>(en: &Enumerated<'_, G>, xs: &fixedbitset::FixedBitSet, ball: &fixedbitset::FixedBitSet, y: usize) -> bool {
    xs.ones().any(|x| ball.contains(en.mul(en.inv(x), y)))
}

fn witness_checks<G: GroupAdapter>(g: &G, task: &str, w: &Value, params: &Params, out: &mut VerifyOutcome) -> CliResult<()> {
    match task {
        "axioms" => {
            let x = decode(g, field(w, "g", "/witness")?, "/witness/g")?;
            if let Some(n) = w.get("n").and_then(|n| n.as_u64()) {
                out.push("power monotonicity fails at the witness", g.norm(&g.power(&x, n)) > g.norm(&x));
                return Ok(());
            }
            let axiom = match field(w, "axiom", "/witness")?.as_str() {
                Some("(0)") => Axiom::Identity,
                Some("(1)") => Axiom::Subadditive,
                Some("(2)") => Axiom::Invariant,
                _ => return Err(CliError::config("/witness/axiom", "unknown axiom")),
            };
            let y = match w.get("h").filter(|h| !h.is_null()) {
                Some(h) => Some(decode(g, h, "/witness/h")?),
                None => None,
            };
            out.push(format!("axiom {} fails at the witness", axiom.id()), reproduces_violation(g, axiom, &x, y.as_ref()));
        }
        "bigseq" => {
            let en = Enumerated::new(g)?;
            let gi = index(&en, field(w, "g", "/witness")?, "/witness/g")?;
            let hi = index(&en, field(w, "h", "/witness")?, "/witness/h")?;
            let r = params.rational("r")?;
            let t = params.rational("t")?;
            let eps = params.rationals("eps")?;
            let strict = params.bool_or("strict", true)?;
            let start = params.usize_or("start", 0)?;
            out.push("‖g‖ > r", en.norm(gi).cmp_threshold(&r).is_gt());
            out.push("h lies in B_t", en.ball(&t, strict).contains(hi));
            let mut cb = ConjBall::new(&en, gi);
            let covered = eps
                .iter()
                .enumerate()
                .any(|(n, e)| in_product(&en, &cb.level(start + n).clone(), &thickening(&en, e, strict), hi));
            out.push("h lies outside every C_n(g)·B_εn", !covered);
        }
        _ => {
            let en = Enumerated::new(g)?;
            let yi = index(&en, field(w, "uncovered", "/witness")?, "/witness/uncovered")?;
            let sets = coverage_sets(&en, params, "sets")?;
            let eps = params.rationals("eps")?;
            let strict = params.bool_or("strict", true)?;
            let covered = sets.iter().zip(&eps).any(|(x, e)| in_product(&en, x, &thickening(&en, e, strict), yi));
            out.push("the witness lies outside every X_i·B_εi", !covered);
        }
    }
    Ok(())
}

fn scan_check<G: GroupAdapter>(g: &G, w: &Value, params: &Params, out: &mut VerifyOutcome) -> CliResult<()> {
    let en = Enumerated::new(g)?;
    let gi = index(&en, field(w, "g", "/witness")?, "/witness/g")?;
    let Some(h) = w.get("h").filter(|h| !h.is_null()) else {
        return Ok(());
    };
    let hi = index(&en, h, "/witness/h")?;
    let (r, t) = (params.rational("r")?, params.rational("t")?);
    let eps = params.rational_or("eps", Q::from_integer(0))?;
    let strict = params.bool_or("strict", true)?;
    out.push("r < ‖g‖ ≤ t", en.norm(gi).cmp_threshold(&r).is_gt() && en.norm(gi).cmp_threshold(&t).is_le());
    out.push("h lies in B_t", en.ball(&t, strict).contains(hi));
    let mut cb = ConjBall::new(&en, gi);
    cb.generation_number(en.len());
    let top = cb.computed_level(cb.depth()).expect("computed").clone();
    out.push("h lies outside the normal closure of g thickened by ε", !in_product(&en, &top, &thickening(&en, &eps, strict), hi));
    Ok(())
}

fn index<G: GroupAdapter>(en: &Enumerated<'_, G>, v: &Value, ptr: &str) -> CliResult<usize> {
    let x = decode(en.group(), v, ptr)?;
    en.index_of(&x).ok_or_else(|| CliError::config(ptr, "element is not in the group"))
}
