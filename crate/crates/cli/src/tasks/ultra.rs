use metgroup::coverage::Verdict;
use metgroup::scalar::fmt_ratio;
use metgroup::ultraseq::{infinitesimal_check, SeqRule};
use serde_json::{json, Map, Value};

use super::Outcome;
use crate::config::{CliResult, Ctx};

pub const PARAMS: &[&str] = &["rule", "m", "g", "k", "power", "range", "tol"];

pub fn run(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let mut rule_doc = Map::new();
    for key in ["rule", "m", "g", "k"] {
        if let Some(v) = p.get(key) {
            rule_doc.insert(key.into(), v.clone());
        }
    }
    let rule = SeqRule::from_json(&Value::Object(rule_doc)).map_err(|e| p.err("rule", e.to_string()))?;
    let power = p.uint_or("power", 1)?;
    let (lo, hi) = p.range("range")?;
    let tol = p.rational("tol")?;
    let rep = infinitesimal_check(&rule, power, lo, hi, &tol).map_err(|e| p.err("range", e.to_string()))?;
    let witness = match (rep.bound, rep.n0) {
        (Some((false, Some(n))), _) => {
            let v = &rep.profile.iter().find(|(k, _)| *k == n).expect("stage in profile").1;
            json!({"n": n, "norm": fmt_ratio(v), "reason": "analytic bound fails"})
        }
        (_, None) => {
            let (n, v) = rep.profile.last().expect("nonempty range");
            json!({"n": n, "norm": fmt_ratio(v), "reason": "norm above tolerance at the last stage"})
        }
        _ => Value::Null,
    };
    let mut result = rep.to_json();
    result["rule"] = rule.to_json();
    result["power"] = json!(power);
    Ok(Outcome::new(Verdict::from_bool(rep.holds), Value::Null, result).witness(witness))
}
