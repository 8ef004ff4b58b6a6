use metgroup::coverage::Verdict;
use metgroup::iet::{discretize, embed_perm, random_iet};
use metgroup::perm::Perm;
use metgroup::scalar::fmt_ratio;
use metgroup::{GroupAdapter, Iet, SymGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{timed_out, Outcome};
use crate::config::{CliResult, Ctx};

pub const PARAMS: &[&str] = &["op", "f", "g", "h", "n", "samples", "max_pieces", "max_denominator", "embed_max"];

fn iet_param(ctx: &Ctx, key: &str) -> CliResult<Iet> {
    Iet::from_json(ctx.params.require(key)?).map_err(|e| ctx.params.err(key, e.to_string()))
}

pub fn run(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    match p.choice("op", &["suite", "compose", "discretize", "norm"])? {
        "suite" => suite(ctx),
        "compose" => {
            let (f, g) = (iet_param(ctx, "f")?, iet_param(ctx, "g")?);
            let fg = f.compose(&g);
            Ok(Outcome::new(
                Verdict::True,
                Value::Null,
                json!({"composition": fg.to_json(), "norm": fmt_ratio(&fg.support_norm())}),
            ))
        }
        "discretize" => {
            let h = iet_param(ctx, "h")?;
            let n = p.uint("n")? as usize;
            let d = discretize(&h, n).map_err(|e| p.err("n", e.to_string()))?;
            Ok(Outcome::new(
                Verdict::True,
                Value::Null,
                json!({
                    "sigma_prime": d.sigma_prime.one_line(),
                    "h_prime": d.h_prime.to_json(),
                    "distance": fmt_ratio(&d.distance),
                }),
            ))
        }
        _ => {
            let f = iet_param(ctx, "f")?;
            Ok(Outcome::new(Verdict::True, Value::Null, json!({"norm": fmt_ratio(&f.support_norm())})))
        }
    }
}

/// First failing group-law or norm identity on a triple, if any.
fn triple_failure(f: &Iet, g: &Iet, h: &Iet) -> Option<&'static str> {
    let id = Iet::identity();
    if f.compose(g).compose(h) != f.compose(&g.compose(h)) {
        return Some("associativity");
    }
    if f.compose(&id) != *f || id.compose(f) != *f {
        return Some("identity");
    }
    if !f.compose(&f.inverse()).is_identity() || !f.inverse().compose(f).is_identity() {
        return Some("inverse");
    }
    if f.compose(g).support_norm() > f.support_norm() + g.support_norm() {
        return Some("subadditivity");
    }
    let conj = g.inverse().compose(f).compose(g);
    if conj.support_norm() != f.support_norm() || f.inverse().support_norm() != f.support_norm() {
        return Some("invariance");
    }
    None
}

fn suite(ctx: &Ctx) -> CliResult<Outcome> {
    let p = ctx.params;
    let seed = ctx.require_seed()?;
    let samples = p.usize_or("samples", 10_000)?;
    let max_pieces = p.usize_or("max_pieces", 6)?;
    let max_den = p.usize_or("max_denominator", 12)?;
    let embed_max = p.usize_or("embed_max", 5)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[Iet; 3]> = (0..samples)
        .map(|_| {
            [
                random_iet(&mut rng, max_pieces, max_den),
                random_iet(&mut rng, max_pieces, max_den),
                random_iet(&mut rng, max_pieces, max_den),
            ]
        })
        .collect();
    let bad_triple = triples
        .par_iter()
        .enumerate()
        .find_map_first(|(i, [f, g, h])| triple_failure(f, g, h).map(|what| (i, what)));
    let mut witness = bad_triple.map_or(Value::Null, |(i, what)| {
        let [f, g, h] = &triples[i];
        json!({"check": what, "f": f.to_json(), "g": g.to_json(), "h": h.to_json()})
    });

    // φ: S_n → IET is an isometric homomorphism; discretizing its image
    // on a finer grid is exact.
    let mut embed_rows = Vec::new();
    let mut stopped = false;
    for n in 1..=embed_max {
        if ctx.deadline.expired() {
            stopped = true;
            break;
        }
        let sn = SymGroup::symmetric(n).with_norm(metgroup::perm::PermNorm::HammingNormalized);
        let elems = sn.enumerate(ctx.budgets.elements)?;
        let images: Vec<Iet> = elems.iter().map(embed_perm).collect();
        let bad_pair = (0..elems.len()).into_par_iter().find_map_first(|a| {
            (0..elems.len()).find_map(|b| {
                let hom = embed_perm::<i64>(&elems[a].then(&elems[b])) == images[a].compose(&images[b]);
                let iso = images[a].support_norm() == sn.norm(&elems[a]);
                (!(hom && iso)).then(|| (a, b, if hom { "isometry" } else { "homomorphism" }))
            })
        });
        let bad_disc = (0..elems.len()).into_par_iter().find_map_first(|a| {
            let d = discretize(&images[a], 2 * n).ok()?;
            let ok = d.distance == Default::default() && d.h_prime == images[a] && d.sigma_prime == grid_double(&elems[a]);
            (!ok).then_some(a)
        });
        if witness.is_null() {
            if let Some((a, b, what)) = bad_pair {
                witness = json!({"check": what, "n": n, "a": elems[a].one_line(), "b": elems[b].one_line()});
            } else if let Some(a) = bad_disc {
                witness = json!({"check": "discretize", "n": n, "a": elems[a].one_line()});
            }
        }
        embed_rows.push(json!({
            "n": n,
            "pairs": elems.len() * elems.len(),
            "embedding_ok": bad_pair.is_none(),
            "discretize_ok": bad_disc.is_none(),
        }));
    }
    let result = json!({
        "triples": samples,
        "triples_ok": bad_triple.is_none(),
        "embedding": embed_rows,
    });
    let (verdict, result) = match (witness.is_null(), stopped) {
        (false, _) => (Verdict::False, result),
        (true, true) => (Verdict::Inconclusive, timed_out(result)),
        (true, false) => (Verdict::True, result),
    };
    Ok(Outcome::new(verdict, Value::Null, result).witness(witness))
}

/// The permutation of `2n` cells induced by `δ ∈ S_n` acting on halves.
fn grid_double(delta: &Perm) -> Perm {
    let n = delta.degree();
    let mut img = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let j = delta.apply(i);
        img.push(2 * j - 1);
        img.push(2 * j);
    }
    Perm::from_one_line(&img).expect("bijection")
}
