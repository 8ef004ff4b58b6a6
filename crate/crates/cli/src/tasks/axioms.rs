use metgroup::norms::{check_power_monotone, verify_exhaustive, verify_norm_axioms, Axiom, CheckMode, NormReport};
use metgroup::{Enumerated, GroupAdapter, NormValue};
use num_integer::Integer;
use serde_json::{json, Map, Value};

use super::{enumerate, Outcome};
use crate::config::{CliResult, Ctx};
use metgroup::coverage::Verdict;

pub const PARAMS: &[&str] = &["mode", "samples", "word_len", "power_monotone"];

/// Least common multiple of the element orders.
fn exponent<G: GroupAdapter>(en: &Enumerated<'_, G>) -> u64 {
    (0..en.len()).fold(1u64, |acc, g| {
        let mut x = g;
        let mut k = 1u64;
        while x != en.identity() {
            x = en.mul(x, g);
            k += 1;
        }
        acc.lcm(&k)
    })
}

pub fn run<G: GroupAdapter>(g: &G, ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let mode = match p.choice("mode", &["exhaustive", "sampled"])? {
        "exhaustive" => CheckMode::Exhaustive,
        _ => CheckMode::Sampled {
            seed: ctx.require_seed()?,
            samples: p.usize_or("samples", 1000)?,
            word_len: p.usize_or("word_len", 16)?,
        },
    };
    let en = match mode {
        CheckMode::Exhaustive => Some(enumerate(g, ctx)?),
        CheckMode::Sampled { .. } => None,
    };
    let report: NormReport<G::Elem> = match &en {
        Some(en) => verify_exhaustive(en),
        None => verify_norm_axioms(g, mode)?,
    };

    let mut axioms = Map::new();
    let mut cex = Map::new();
    for a in Axiom::ALL {
        axioms.insert(a.id().into(), json!(report.passes(a)));
        if let Some((x, y)) = report.counterexamples.get(&a) {
            cex.insert(a.id().into(), json!({"g": g.encode(x), "h": y.as_ref().map(|y| g.encode(y))}));
        }
    }
    let mut result = json!({
        "mode": mode.id(),
        "pairs_checked": report.pairs_checked,
        "axioms": axioms,
        "counterexamples": cex,
        "pseudo_norm": report.is_pseudo_norm(),
        "norm": report.is_norm(),
    });
    if let Some(en) = &en {
        let kernel = en.set_of((0..en.len()).filter(|&i| en.norm(i).is_zero_value()));
        result["kernel_size"] = json!(kernel.count_ones(..));
        result["kernel_is_center"] = json!(kernel == en.center());
    }

    let mut verdict = Verdict::from_bool(report.is_pseudo_norm());
    let mut witness = [Axiom::Identity, Axiom::Subadditive, Axiom::Invariant]
        .iter()
        .find(|a| !report.passes(**a))
        .map(|a| {
            let (x, y) = &report.counterexamples[a];
            json!({"axiom": a.id(), "g": g.encode(x), "h": y.as_ref().map(|y| g.encode(y))})
        })
        .unwrap_or(Value::Null);

    if let Some(pm) = p.get("power_monotone") {
        let max_power = match (pm, &en) {
            (Value::Bool(false), _) => None,
            (Value::Bool(true), Some(en)) => Some(exponent(en)),
            (Value::Bool(true), None) => {
                return Err(p.err("power_monotone", "the group exponent needs exhaustive mode; give an explicit power"))
            }
            (v, _) => Some(v.as_u64().filter(|k| *k >= 1).ok_or_else(|| {
                p.err("power_monotone", "expected a boolean or a positive integer")
            })?),
        };
        if let Some(max_power) = max_power {
            let bad = check_power_monotone(g, max_power, mode)?;
            result["power_monotone"] = json!({
                "max_power": max_power,
                "holds": bad.is_none(),
                "counterexample": bad.as_ref().map(|(x, n)| json!({"g": g.encode(x), "n": n})),
            });
            if let Some((x, n)) = bad {
                verdict = Verdict::False;
                if witness.is_null() {
                    witness = json!({"property": "power_monotone", "g": g.encode(&x), "n": n});
                }
            }
        }
    }
    Ok(Outcome::new(verdict, g.descriptor(), result).witness(witness))
}
