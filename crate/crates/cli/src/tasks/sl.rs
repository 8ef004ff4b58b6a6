use metgroup::coverage::Verdict;
use metgroup::linear::{block_embed, jordan_length, ls_constant_probe, MatFp};
use metgroup::scalar::fmt_ratio;
use metgroup::{GroupAdapter, SlGroup, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::Outcome;
use crate::config::{CliError, CliResult, Ctx};
use crate::groups::AnyGroup;

pub const PARAMS: &[&str] = &["op", "n", "m", "p", "samples", "word_len", "matrix"];

/// `(n, p)` from the parameters, falling back to an `sl_fp` group.
fn dims(group: Option<&AnyGroup>, ctx: &Ctx) -> CliResult<(usize, u32)> {
    let p = ctx.params;
    let from_group = match group {
        Some(AnyGroup::Sl(g)) => Some((g.inner().dim(), g.inner().modulus())),
        Some(AnyGroup::SlConj(g)) => Some((g.inner().dim(), g.inner().modulus())),
        Some(_) => return Err(CliError::config("/group/type", "task \"sl\" needs an sl_fp group")),
        None => None,
    };
    match (p.get("n"), p.get("p"), from_group) {
        (Some(_), Some(_), None) => {
            let prime = p.uint("p")?;
            if prime > u32::MAX as u64 || !metgroup::linear::is_prime(prime as u32) {
                return Err(p.err("p", format!("{prime} is not a prime")));
            }
            Ok((p.uint("n")? as usize, prime as u32))
        }
        (None, None, Some(d)) => Ok(d),
        (_, _, Some(_)) => Err(p.err("n", "give the dimensions either in the group or as n and p, not both")),
        _ => Err(p.err("n", "needs n and p, or an sl_fp group")),
    }
}

pub fn run(group: Option<&AnyGroup>, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    match p.choice("op", &["probe", "embed", "jordan"])? {
        "probe" => {
            let (n, prime) = dims(group, ctx)?;
            let g = SlGroup::new(n, prime)?;
            let order = g.order();
            if order > ctx.budgets.elements as u128 {
                return Err(metgroup::Error::Capability(format!("|{}| = {order} exceeds the element budget", g.name())).into());
            }
            let probe = ls_constant_probe(n, prime)?;
            let failures: Vec<Value> = probe.failures.iter().map(|m| m.to_json()).collect();
            let infinite: Vec<Value> = probe.rows.iter().filter(|r| r.n.finite().is_none()).map(|r| r.elem.to_json()).collect();
            let witness = match (infinite.first(), failures.first()) {
                (Some(m), _) => json!({"matrix": m, "reason": "N(A) is infinite"}),
                (None, Some(m)) => json!({"matrix": m, "reason": "C_N(A) is not the whole group"}),
                _ => Value::Null,
            };
            let mut out = Outcome::new(
                Verdict::from_bool(probe.consistent()),
                g.descriptor(),
                json!({
                    "noncentral": probe.rows.len(),
                    "all_finite": probe.all_finite,
                    "c_emp": probe.c_emp.as_ref().map(fmt_ratio),
                    "consistent": probe.consistent(),
                    "infinite": infinite,
                    "failures": failures,
                    "max_n": probe.rows.iter().filter_map(|r| r.n.finite()).max(),
                }),
            )
            .witness(witness);
            out.csv = Some(probe.to_csv());
            Ok(out)
        }
        "embed" => embed(group, ctx),
        _ => {
            let m = MatFp::from_json(p.require("matrix")?).map_err(|e| p.err("matrix", e.to_string()))?;
            let value: Q = jordan_length(&m);
            Ok(Outcome::new(Verdict::True, Value::Null, json!({"jordan_length": fmt_ratio(&value)})))
        }
    }
}

/// `f_{n,m}` preserves Jordan length, is a homomorphism, and factors
/// through every intermediate block size `d` with `n | d | m`.
fn embed(group: Option<&AnyGroup>, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let (n, prime) = dims(group, ctx)?;
    let m = p.uint("m")? as usize;
    if n == 0 || m % n != 0 {
        return Err(p.err("m", format!("{n} does not divide {m}")));
    }
    let samples = p.usize_or("samples", 500)?;
    let word_len = p.usize_or("word_len", 24)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.require_seed()?);
    let g = SlGroup::new(n, prime)?;
    let mids: Vec<usize> = (n..=m).filter(|d| d % n == 0 && m % d == 0).collect();
    let mut witness = Value::Null;
    for i in 0..samples {
        let a = g.random_word(&mut rng, word_len);
        let b = g.random_word(&mut rng, word_len);
        let fa = block_embed(&a, m)?;
        let mut failed = None;
        if jordan_length::<i64>(&fa) != jordan_length::<i64>(&a) {
            failed = Some("isometry");
        } else if block_embed(&a.mul(&b), m)? != fa.mul(&block_embed(&b, m)?) {
            failed = Some("homomorphism");
        } else {
            for &d in &mids {
                if block_embed(&block_embed(&a, d)?, m)? != fa {
                    failed = Some("transitivity");
                    break;
                }
            }
        }
        if let Some(what) = failed {
            witness = json!({"check": what, "sample": i, "a": a.to_json(), "b": b.to_json()});
            break;
        }
    }
    Ok(Outcome::new(
        Verdict::from_bool(witness.is_null()),
        json!({"type": "sl_fp", "n": n, "p": prime, "norm": "jordan"}),
        json!({"samples": samples, "target_dim": m, "intermediate": mids}),
    )
    .witness(witness))
}
