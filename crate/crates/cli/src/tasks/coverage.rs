use fixedbitset::FixedBitSet;
use metgroup::coverage::{
    almost_uniform_check, check_thickened_cover, commutator_width, derived_subgroup, direct_limit_check,
    eps_torsion_check, is_rt_big, perturbation_check, star_scan, tree_rank, uniformity_scan, CommutatorWidth, ConjBall,
    CoverOptions, DirectLimitParams, DirectSystem, GenNumber, SetFamily, SlChain, SymChain, Verdict, Witness,
};
use metgroup::perm::PermNorm;
use metgroup::scalar::fmt_ratio;
use metgroup::{Enumerated, GroupAdapter, NormValue, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{cert_json, encode_set, enumerate, index_param, timed_out, Outcome};
use crate::config::{parse_q, CliError, CliResult, Ctx, Params};

pub const COVER_PARAMS: &[&str] =
    &["op", "sets", "eps", "strict", "g", "h", "n", "count", "n_max", "eps_step", "m", "target"];
pub const BIGSEQ_PARAMS: &[&str] = &["r", "t", "eps", "strict", "start"];
pub const SCAN_PARAMS: &[&str] = &["r", "t", "eps", "n_max", "strict"];
pub const STAR_PARAMS: &[&str] = &["n_max", "k_list"];
pub const TREE_PARAMS: &[&str] = &["family", "grid", "depth_cap", "strict"];
pub const DIRLIM_PARAMS: &[&str] = &["system", "r", "t", "n", "samples"];

const COVER_OPS: [&str; 6] = ["thickened", "perturbation", "conj_ball", "torsion", "almost_uniform", "derived"];

fn witness_json<G: GroupAdapter>(g: &G, w: &Option<Witness<G::Elem>>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => json!({"g": g.encode(&w.element), "h": w.uncovered.as_ref().map(|h| g.encode(h))}),
    }
}

fn gen_json(n: GenNumber) -> Value {
    n.to_json()
}

/// A set given as `"all"`, a list of elements, `{"conj_ball": g, "level": k}`
/// or `{"ball": radius, "strict": bool}`.
pub(crate) fn parse_set<G: GroupAdapter>(en: &Enumerated<'_, G>, v: &Value, ptr: &str) -> CliResult<FixedBitSet> {
    let g = en.group();
    let decode = |x: &Value, p: &str| -> CliResult<usize> {
        let e = g.decode(x).map_err(|e| CliError::config(p, e.to_string()))?;
        en.index_of(&e).ok_or_else(|| CliError::config(p, "element is not in the group"))
    };
    match v {
        Value::String(s) if s == "all" => Ok(en.full_set()),
        Value::Array(xs) => {
            let idx = xs.iter().enumerate().map(|(i, x)| decode(x, &format!("{ptr}/{i}"))).collect::<CliResult<Vec<_>>>()?;
            Ok(en.set_of(idx))
        }
        Value::Object(o) if o.contains_key("conj_ball") => {
            let base = decode(&o["conj_ball"], &format!("{ptr}/conj_ball"))?;
            let level = o
                .get("level")
                .and_then(|l| l.as_u64())
                .ok_or_else(|| CliError::config(format!("{ptr}/level"), "expected a level"))?;
            let mut cb = ConjBall::new(en, base);
            Ok(cb.level(level as usize).clone())
        }
        Value::Object(o) if o.contains_key("ball") => {
            let r = parse_q(&o["ball"], &format!("{ptr}/ball"))?;
            let strict = o.get("strict").and_then(|s| s.as_bool()).unwrap_or(true);
            Ok(en.ball(&r, strict))
        }
        _ => Err(CliError::config(ptr, "expected \"all\", an element list, {\"conj_ball\", \"level\"} or {\"ball\"}")),
    }
}

pub(crate) fn parse_sets<G: GroupAdapter>(en: &Enumerated<'_, G>, params: &Params, key: &str) -> CliResult<Vec<FixedBitSet>> {
    let ptr = params.pointer(key);
    let arr = params.require(key)?.as_array().ok_or_else(|| CliError::config(&ptr, "expected an array of sets"))?;
    arr.iter().enumerate().map(|(i, v)| parse_set(en, v, &format!("{ptr}/{i}"))).collect()
}

pub fn cover<G: GroupAdapter>(g: &G, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let op = p.choice("op", &COVER_OPS)?;
    let en = enumerate(g, ctx)?;
    let strict = p.bool_or("strict", true)?;
    let out = Outcome::new(Verdict::True, g.descriptor(), Value::Null);
    match op {
        "thickened" => {
            let sets = parse_sets(&en, p, "sets")?;
            let eps = p.rationals("eps")?;
            if eps.len() != sets.len() {
                return Err(p.err("eps", format!("{} sets but {} radii", sets.len(), eps.len())));
            }
            let rep = check_thickened_cover(&en, &sets, &eps, strict)?;
            let witness = rep.witness.as_ref().map_or(Value::Null, |w| json!({"uncovered": g.encode(&w.element)}));
            Ok(Outcome { verdict: rep.verdict, result: json!({"order": en.len()}), ..out }
                .witness(witness)
                .levels(rep.levels))
        }
        "perturbation" => perturbation(&en, ctx, strict),
        "conj_ball" => {
            let base = index_param(&en, ctx, "g")?;
            let n_max = p.usize_or("n_max", ctx.budgets.n_max)?;
            let mut cb = ConjBall::new(&en, base);
            let n = cb.generation_number(n_max);
            let verdict = match n {
                GenNumber::Finite(_) => Verdict::True,
                GenNumber::Infinite => Verdict::False,
                GenNumber::AtLeast(_) => Verdict::Inconclusive,
            };
            let mut out = Outcome { verdict, result: json!({"generation_number": gen_json(n), "order": en.len()}), ..out }
                .levels(cb.level_sizes());
            if p.get("target").is_some() {
                let y = index_param(&en, ctx, "target")?;
                out.result["target_level"] = json!(cb.level_of(y));
                out = out.certificate(cert_json(g, &cb.certificate(y)));
            }
            if verdict == Verdict::False {
                let missing = cb.computed_level(cb.depth()).and_then(|s| s.zeroes().next());
                out = out.witness(json!({"g": en.encode(base), "outside_normal_closure": missing.map(|y| en.encode(y))}));
            }
            Ok(out)
        }
        "torsion" => {
            let m = p.uint("m")?;
            let eps = p.rational("eps")?;
            let set = eps_torsion_check(&en, m, &eps);
            Ok(Outcome { result: json!({"size": set.count_ones(..), "members": encode_set(&en, &set)}), ..out })
        }
        "almost_uniform" => {
            let eps = p.rational("eps")?;
            let n = p.uint("n")?;
            let (ok, bad) = almost_uniform_check(&en, &eps, n);
            Ok(Outcome { verdict: Verdict::from_bool(ok), result: json!({"order": en.len()}), ..out }
                .witness(bad.map_or(Value::Null, |b| json!({"g": en.encode(b)}))))
        }
        _ => {
            let d = derived_subgroup(&en);
            let width = match commutator_width(&en) {
                CommutatorWidth::Width(w) => json!(w),
                CommutatorWidth::NotPerfect => Value::Null,
            };
            let order = d.count_ones(..);
            Ok(Outcome {
                result: json!({
                    "order": en.len(),
                    "derived_order": order,
                    "derived_index": en.len() / order.max(1),
                    "perfect": order == en.len(),
                    "commutator_width": width,
                }),
                ..out
            })
        }
    }
}

/// Seeded instances of `C_n(h) ⊆ C_n(g)·B_{nε}(e)` with `ε > ‖g⁻¹h‖`, or a
/// single instance when `g`, `h`, `n` and `eps` are all given.
fn perturbation<G: GroupAdapter>(en: &Enumerated<'_, G>, ctx: &Ctx, strict: bool) -> CliResult<Outcome> {
    let p = ctx.params;
    let g = en.group();
    let mut instances: Vec<(usize, usize, usize, Q)> = Vec::new();
    if p.get("g").is_some() {
        instances.push((index_param(en, ctx, "g")?, index_param(en, ctx, "h")?, p.uint("n")? as usize, p.rational("eps")?));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.require_seed()?);
        let count = p.usize_or("count", 200)?;
        let n_max = p.usize_or("n_max", 3)?.max(1);
        let step = p.rational_or("eps_step", Q::new(1, 24))?;
        if step <= Q::from_integer(0) {
            return Err(p.err("eps_step", "step must be positive"));
        }
        for _ in 0..count {
            let a = rng.gen_range(0..en.len());
            let b = rng.gen_range(0..en.len());
            let n = rng.gen_range(1..=n_max);
            let d = en.norm(en.mul(en.inv(a), b));
            let mut k = 1i64;
            while !d.cmp_threshold(&(step * Q::from_integer(k))).is_lt() {
                k += 1;
            }
            k += rng.gen_range(0..4);
            instances.push((a, b, n, step * Q::from_integer(k)));
        }
    }
    let mut failure = None;
    let mut done = 0;
    for (a, b, n, eps) in &instances {
        if ctx.deadline.expired() {
            break;
        }
        let rep = perturbation_check(en, *a, *b, *n, eps, strict)?;
        done += 1;
        if rep.verdict != Verdict::True {
            failure = Some((*a, *b, *n, *eps, rep));
            break;
        }
    }
    let result = json!({"instances": instances.len(), "checked": done});
    Ok(match failure {
        Some((a, b, n, eps, rep)) => Outcome::new(Verdict::False, g.descriptor(), result)
            .witness(json!({
                "g": en.encode(a),
                "h": en.encode(b),
                "n": n,
                "eps": fmt_ratio(&eps),
                "uncovered": rep.witness.map(|w| g.encode(&w.element)),
            }))
            .levels(rep.levels)
            .certificate(cert_json(g, &rep.certificate)),
        None if done < instances.len() => Outcome::new(Verdict::Inconclusive, g.descriptor(), timed_out(result)),
        None => Outcome::new(Verdict::True, g.descriptor(), result),
    })
}

pub fn bigseq<G: GroupAdapter>(g: &G, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let (r, t) = (p.rational("r")?, p.rational("t")?);
    let eps = p.rationals("eps")?;
    let opts = CoverOptions { strict: p.bool_or("strict", true)?, start: p.usize_or("start", 0)? };
    let en = enumerate(g, ctx)?;
    let rep = is_rt_big(&en, &eps, &r, &t, &opts)?;
    Ok(Outcome::new(rep.verdict, g.descriptor(), json!({"order": en.len(), "terms": eps.len()}))
        .witness(witness_json(g, &rep.witness))
        .levels(rep.levels))
}

pub fn scan<G: GroupAdapter>(gs: &[&G], ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let (r, t) = (p.rational("r")?, p.rational("t")?);
    let eps = p.rational_or("eps", Q::from_integer(0))?;
    let n_max = p.usize_or("n_max", ctx.budgets.n_max)?;
    let strict = p.bool_or("strict", true)?;
    let family = gs.iter().map(|g| enumerate(*g, ctx)).collect::<CliResult<Vec<_>>>()?;
    let rep = uniformity_scan(&family, &r, &t, &eps, n_max, strict)?;
    let rows: Vec<Value> = rep
        .groups
        .iter()
        .zip(gs)
        .map(|(u, g)| {
            json!({
                "group": u.group,
                "verdict": u.verdict,
                "n": u.n,
                "checked": u.checked,
                "witness": witness_json(*g, &u.witness),
            })
        })
        .collect();
    let witness = rep
        .groups
        .iter()
        .zip(gs)
        .enumerate()
        .find(|(_, (u, _))| u.verdict != Verdict::True)
        .map_or(Value::Null, |(i, (u, g))| {
            let mut w = witness_json(*g, &u.witness);
            w["group_index"] = json!(i);
            w
        });
    Ok(Outcome::new(
        rep.verdict,
        Value::Array(gs.iter().map(|g| g.descriptor()).collect()),
        json!({"n": rep.n, "n_max": n_max, "groups": rows}),
    )
    .witness(witness)
    .levels(rep.groups.iter().map(|u| json!(u.n)).collect::<Vec<_>>()))
}

pub fn star<G: GroupAdapter>(gs: &[&G], ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let n_max = p.usize_or("n_max", ctx.budgets.n_max)?;
    let k_list: Vec<usize> = match p.get("k_list") {
        Some(_) => p.uints("k_list")?.into_iter().map(|k| k as usize).collect(),
        None => vec![1, 2, 3],
    };
    let family = gs.iter().map(|g| enumerate(*g, ctx)).collect::<CliResult<Vec<_>>>()?;
    let rep = star_scan(&family, n_max, &k_list);
    let clause_one: Vec<Value> = rep
        .clause_one
        .iter()
        .zip(gs)
        .map(|(c, g)| json!({"group": c.group, "n": gen_json(c.n), "witness": c.witness.as_ref().map(|w| g.encode(w))}))
        .collect();
    let enc = |x: &G::Elem| gs[0].encode(x);
    let clause_two: Vec<Value> = rep
        .clause_two
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "l": c.l,
                "vacuous": c.vacuous,
                "witness": c.witness.as_ref().map(|(a, b)| json!([enc(a), enc(b)])),
            })
        })
        .collect();
    let witness = rep
        .clause_two
        .iter()
        .find(|c| c.l.is_none())
        .and_then(|c| c.witness.as_ref())
        .map_or(Value::Null, |(a, b)| json!({"g": enc(a), "h": enc(b)}));
    Ok(Outcome::new(
        rep.verdict,
        Value::Array(gs.iter().map(|g| g.descriptor()).collect()),
        json!({
            "clause_one": clause_one,
            "common_n": rep.common_n,
            "clause_two": clause_two,
            "max_finite_n": rep.max_finite_n,
        }),
    )
    .witness(witness))
}

pub fn tree<G: GroupAdapter>(g: &G, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let en = enumerate(g, ctx)?;
    let ptr = p.pointer("family");
    let fam = p.require("family")?;
    let family = match (fam.get("conj_ball"), fam.get("sets")) {
        (Some(x), None) => {
            let e = g.decode(x).map_err(|e| CliError::config(format!("{ptr}/conj_ball"), e.to_string()))?;
            let i = en
                .index_of(&e)
                .ok_or_else(|| CliError::config(format!("{ptr}/conj_ball"), "element is not in the group"))?;
            SetFamily::ConjBalls(i)
        }
        (None, Some(Value::Array(sets))) => SetFamily::Explicit(
            sets.iter()
                .enumerate()
                .map(|(i, s)| parse_set(&en, s, &format!("{ptr}/sets/{i}")))
                .collect::<CliResult<_>>()?,
        ),
        _ => return Err(CliError::config(ptr, "expected {\"conj_ball\": g} or {\"sets\": [...]}")),
    };
    let grid = p.rationals("grid")?;
    let depth_cap = p.usize_or("depth_cap", ctx.budgets.depth_cap)?;
    let rep = tree_rank(&en, &family, &grid, depth_cap, p.bool_or("strict", true)?)?;
    let path: Vec<String> = rep.path.iter().map(fmt_ratio).collect();
    let witness = if rep.verdict == Verdict::Inconclusive { json!({"capped_path": path}) } else { Value::Null };
    Ok(Outcome::new(rep.verdict, g.descriptor(), json!({"rank": rep.rank, "path": path, "nodes": rep.nodes, "depth_cap": depth_cap}))
        .witness(witness))
}

pub fn dirlim(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let ptr = p.pointer("system");
    let sys = p.require("system")?;
    let field = |k: &str| sys.get(k).ok_or_else(|| CliError::config(format!("{ptr}/{k}"), format!("missing {k:?}")));
    let list = |k: &str| -> CliResult<Vec<usize>> {
        serde_json::from_value(field(k)?.clone())
            .map_err(|_| CliError::config(format!("{ptr}/{k}"), "expected an array of integers"))
    };
    let params = DirectLimitParams {
        r: p.rational("r")?,
        t: p.rational("t")?,
        n: p.uint("n")? as usize,
        samples: p.usize_or("samples", 20)?,
        seed: ctx.require_seed()?,
        budget: ctx.budgets.elements,
    };
    let wrap = |e: metgroup::Error| match e {
        metgroup::Error::Domain(m) | metgroup::Error::Precondition(m) => CliError::config(ptr.clone(), m),
        other => other.into(),
    };
    match field("type")?.as_str() {
        Some("sl_chain") => {
            let prime = field("p")?.as_u64().ok_or_else(|| CliError::config(format!("{ptr}/p"), "expected a prime"))?;
            let chain = SlChain::<i64>::new(prime as u32, &list("dims")?).map_err(wrap)?;
            dirlim_run(&chain, sys, &params).map_err(wrap)
        }
        Some("sym_chain") => {
            let alternating = sys.get("alternating").and_then(|a| a.as_bool()).unwrap_or(false);
            let norm = match sys.get("norm").and_then(|n| n.as_str()).unwrap_or("hamming") {
                "hamming" => PermNorm::Hamming,
                "hamming_normalized" => PermNorm::HammingNormalized,
                other => return Err(CliError::config(format!("{ptr}/norm"), format!("unknown norm {other:?}"))),
            };
            let chain = SymChain::<i64>::new(&list("degrees")?, alternating, norm).map_err(wrap)?;
            dirlim_run(&chain, sys, &params).map_err(wrap)
        }
        _ => Err(CliError::config(format!("{ptr}/type"), "expected \"sl_chain\" or \"sym_chain\"")),
    }
}

fn dirlim_run<S: DirectSystem>(sys: &S, desc: &Value, params: &DirectLimitParams) -> metgroup::Result<Outcome> {
    let rep = direct_limit_check(sys, params)?;
    let stages = sys.stages();
    let samples: Vec<Value> = rep
        .samples
        .iter()
        .map(|s| {
            json!({
                "g_stage": s.g_stage,
                "g": stages[s.g_stage].encode(&s.g),
                "h_stage": s.h_stage,
                "h": stages[s.h_stage].encode(&s.h),
                "stage": s.stage,
            })
        })
        .collect();
    let certificates: Vec<Value> = rep
        .samples
        .iter()
        .filter_map(|s| {
            let k = s.stage?;
            let c = s.certificate.as_ref()?;
            Some(json!({"group": stages[k].descriptor(), "certificate": c.to_json(&stages[k])}))
        })
        .collect();
    let witness = rep.witness.as_ref().map_or(Value::Null, |(g, h)| {
        let s = rep.samples.iter().find(|s| s.stage.is_none()).expect("failing sample");
        json!({"g_stage": s.g_stage, "g": stages[s.g_stage].encode(g), "h_stage": s.h_stage, "h": stages[s.h_stage].encode(h)})
    });
    Ok(Outcome::new(
        rep.verdict,
        desc.clone(),
        json!({
            "system": sys.name(),
            "stages": stages.iter().map(|s| s.descriptor()).collect::<Vec<_>>(),
            "samples": samples,
            "certificates": certificates,
        }),
    )
    .witness(witness))
}
