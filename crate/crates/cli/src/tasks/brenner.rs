use metgroup::coverage::{ConjBall, Verdict};
use metgroup::perm::{brenner_cycles, find_conjugator_min_support, nearby_nonexceptional, sigma_infinity, Perm};
use metgroup::{Enumerated, Error, GroupAdapter, SymGroup};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{enumerate, timed_out, Outcome};
use crate::config::{CliError, CliResult, Ctx};
use crate::groups::AnyGroup;

pub const PARAMS: &[&str] = &["check", "m_range", "n_conj", "degrees", "sigma", "n", "attempts"];

const CHECKS: [&str; 5] = ["identity", "four_conjugates", "repair", "conjugator", "sigma_infinity"];

fn perm_group<'a>(group: Option<&'a AnyGroup>, check: &str) -> CliResult<&'a SymGroup> {
    match group {
        Some(AnyGroup::Perm(g)) => Ok(g.inner()),
        Some(AnyGroup::PermConj(g)) => Ok(g.inner()),
        Some(_) => Err(CliError::config("/group/type", format!("check {check:?} needs a sym or alt group"))),
        None => Err(CliError::config("/group", format!("check {check:?} needs a group"))),
    }
}

pub fn run(group: Option<&AnyGroup>, ctx: &Ctx) -> CliResult<Outcome> {
    match ctx.params.choice("check", &CHECKS)? {
        "identity" => identity(ctx),
        "four_conjugates" => four_conjugates(perm_group(group, "four_conjugates")?, ctx),
        "repair" => repair(ctx),
        "conjugator" => conjugator(perm_group(group, "conjugator")?, ctx),
        _ => sigma_inf(ctx),
    }
}

fn perm_str(p: &Perm) -> Value {
    json!(p.to_string())
}

/// `ρ(m)π(m)⁻¹ = (m−4 m−2 m)` over a range of `m`.
fn identity(ctx: &Ctx) -> CliResult<Outcome> {
    let (lo, hi) = ctx.params.range_or("m_range", (5, 15))?;
    if lo < 5 {
        return Err(ctx.params.err("m_range", "m must be at least 5"));
    }
    let mut rows = Vec::new();
    let mut first_bad = None;
    for m in lo..=hi {
        let (rho, pi) = brenner_cycles(m)?;
        let lhs = rho.then(&pi.inverse());
        let rhs = Perm::from_cycles(m, &[vec![m - 4, m - 2, m]])?;
        let ok = lhs == rhs;
        if !ok && first_bad.is_none() {
            first_bad = Some(json!({"m": m, "product": perm_str(&lhs), "expected": perm_str(&rhs)}));
        }
        rows.push(json!({"m": m, "holds": ok, "product": perm_str(&lhs)}));
    }
    let verdict = Verdict::from_bool(first_bad.is_none());
    Ok(Outcome::new(verdict, Value::Null, json!({"rows": rows})).witness(first_bad.unwrap_or(Value::Null)))
}

/// `C_N(σ) = G` for every nonexceptional `σ` of full support.
fn four_conjugates(g: &SymGroup, ctx: &Ctx) -> CliResult<Outcome> {
    let n_conj = ctx.params.usize_or("n_conj", 4)?;
    let en: Enumerated<'_, SymGroup> = enumerate(g, ctx)?;
    let n = g.degree();
    let reps: Vec<usize> = en
        .classes()
        .representatives()
        .filter(|&i| en.elem(i).hamming() == n && !en.elem(i).is_exceptional())
        .collect();
    let runs: Vec<(usize, usize, Option<usize>)> = reps
        .par_iter()
        .map(|&s| {
            let mut cb = ConjBall::new(&en, s);
            let level = cb.level(n_conj);
            (s, level.count_ones(..), level.zeroes().next())
        })
        .collect();
    let failure = runs.iter().find(|(_, _, miss)| miss.is_some());
    let mut out = Outcome::new(
        Verdict::from_bool(failure.is_none()),
        g.descriptor(),
        json!({
            "n_conj": n_conj,
            "checked_classes": reps.len(),
            "classes": runs.iter().map(|(s, size, _)| json!({"sigma": perm_str(en.elem(*s)), "ball_size": size})).collect::<Vec<_>>(),
            "order": en.len(),
        }),
    )
    .levels(runs.iter().map(|r| r.1).collect::<Vec<_>>());
    if let Some((s, _, Some(y))) = failure {
        out = out.witness(json!({"sigma": en.encode(*s), "uncovered": en.encode(*y)}));
    } else if let Some(&s) = reps.first() {
        let cb = {
            let mut cb = ConjBall::new(&en, s);
            cb.grow_to(n_conj);
            cb
        };
        let cert = cb.certificate(en.len() - 1);
        out = out.certificate(super::cert_json(g, &cert));
    }
    Ok(out)
}

fn repair_ok(tau: &Perm, sigma: &Perm) -> bool {
    sigma.support() == tau.support()
        && !sigma.is_exceptional()
        && sigma.is_even()
        && tau.then(&sigma.inverse()).hamming() <= 5
}

/// Every `τ ∈ S_n` with `‖τ‖_H ≥ 5` over a range of degrees.
fn repair(ctx: &Ctx) -> CliResult<Outcome> {
    let (lo, hi) = ctx.params.range_or("degrees", (5, 8))?;
    let mut rows = Vec::new();
    let mut witness = Value::Null;
    let mut stopped = false;
    for n in lo..=hi {
        if ctx.deadline.expired() {
            stopped = true;
            break;
        }
        let all = SymGroup::symmetric(n).enumerate(ctx.budgets.elements)?;
        let checked: Vec<(usize, Option<String>)> = all
            .par_iter()
            .enumerate()
            .filter(|(_, t)| t.hamming() >= 5)
            .map(|(i, tau)| {
                let bad = match nearby_nonexceptional(tau) {
                    Ok(s) if repair_ok(tau, &s) => None,
                    Ok(s) => Some(format!("returned {s}, which violates the postconditions")),
                    Err(e) => Some(e.to_string()),
                };
                (i, bad)
            })
            .collect();
        let failures: Vec<&(usize, Option<String>)> = checked.iter().filter(|(_, b)| b.is_some()).collect();
        let first = failures.first().map(|(i, b)| json!({"tau": perm_str(&all[*i]), "error": b}));
        if witness.is_null() {
            if let Some(f) = &first {
                witness = json!({"n": n, "tau": f["tau"], "error": f["error"]});
            }
        }
        rows.push(json!({"n": n, "checked": checked.len(), "failures": failures.len(), "first_failure": first}));
    }
    let result = json!({"degrees": rows});
    let (verdict, result) = match (witness.is_null(), stopped) {
        (false, _) => (Verdict::False, result),
        (true, true) => (Verdict::Inconclusive, timed_out(result)),
        (true, false) => (Verdict::True, result),
    };
    Ok(Outcome::new(verdict, Value::Null, result).witness(witness))
}

/// All pairs `(a, b)`: a conjugator of minimal support exists exactly for
/// conjugate pairs and satisfies `a^h = b`, `supp(h) ⊆ supp(a) ∪ supp(b)`.
fn conjugator(g: &SymGroup, ctx: &Ctx) -> CliResult<Outcome> {
    let en: Enumerated<'_, SymGroup> = enumerate(g, ctx)?;
    let types: Vec<Vec<usize>> = en.elements().iter().map(|p| p.cycle_type()).collect();
    let rows: Vec<(bool, Option<(usize, usize, String)>)> = (0..en.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let (en, types) = (&en, &types);
            (0..en.len()).map(move |b| {
                let (pa, pb) = (en.elem(a), en.elem(b));
                let conjugate = types[a] == types[b];
                let bad = match find_conjugator_min_support(pa, pb) {
                    Ok(Some(h)) => {
                        let mut allowed = pa.support();
                        allowed.extend(pb.support());
                        let ok = conjugate && pa.conj(&h) == *pb && h.support().is_subset(&allowed);
                        (!ok).then(|| format!("conjugator {h} fails"))
                    }
                    Ok(None) => conjugate.then(|| "no conjugator returned for a conjugate pair".to_string()),
                    Err(e) => Some(e.to_string()),
                };
                (conjugate, bad.map(|m| (a, b, m)))
            })
        })
        .collect();
    let conjugate_pairs = rows.iter().filter(|r| r.0).count();
    let bad: Vec<&(usize, usize, String)> = rows.iter().filter_map(|r| r.1.as_ref()).collect();
    let witness = bad
        .first()
        .map_or(Value::Null, |(a, b, msg)| json!({"a": en.encode(*a), "b": en.encode(*b), "error": msg}));
    Ok(Outcome::new(
        Verdict::from_bool(bad.is_empty()),
        g.descriptor(),
        json!({"pairs": rows.len(), "conjugate_pairs": conjugate_pairs, "failures": bad.len()}),
    )
    .witness(witness))
}

/// Builds `σ_∞` of full support in `S_n` with its certificate.
fn sigma_inf(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let seed = ctx.require_seed()?;
    let n = p.uint("n")? as usize;
    let attempts = p.usize_or("attempts", 64)?;
    let sigma = match p.require("sigma")? {
        Value::String(s) => Perm::parse(s, Some(n)),
        v => serde_json::from_value::<Vec<usize>>(v.clone())
            .map_err(|e| Error::Parse(e.to_string()))
            .and_then(|imgs| Perm::from_one_line(&imgs)),
    }
    .map_err(|e| p.err("sigma", e.to_string()))?;
    let sn = SymGroup::symmetric(n);
    match sigma_infinity(&sigma, n, seed, attempts) {
        Ok((s, cert)) => {
            let full = s.hamming() == n && cert.replay(&sn);
            Ok(Outcome::new(
                Verdict::from_bool(full),
                sn.descriptor(),
                json!({
                    "sigma_infinity": perm_str(&s),
                    "support_size": s.hamming(),
                    "factors": cert.len(),
                    "bound": 4 + n / sigma.hamming(),
                }),
            )
            .certificate(cert.to_json(&sn)))
        }
        Err(Error::ConstructionIncomplete { reason, partial }) => Ok(Outcome::new(
            Verdict::Inconclusive,
            sn.descriptor(),
            json!({"stopped": reason, "partial_support": partial.claimed_product.hamming()}),
        )
        .certificate(partial.to_json(&sn))),
        Err(e @ (Error::Precondition(_) | Error::Domain(_))) => Err(p.err("sigma", e.to_string())),
        Err(e) => Err(e.into()),
    }
}
