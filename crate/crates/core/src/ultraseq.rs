//! Stage-by-stage norm profiles of element sequences `(g_n)` taken from a
//! fixed catalog of families.
//!
//! All results concern the finite stages in the requested range only.

use num_rational::Ratio;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::group::GroupAdapter;
use crate::norms::CyclicLee;
use crate::perm::{Perm, PermGroup, PermNorm};
use crate::scalar::fmt_ratio;
use crate::Q;

/// Catalog of sequence rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqRule {
    /// `g_n = ⌊2ⁿ/3⌋` in `Z_{2ⁿ}` with the Lee norm, `1 ≤ n ≤ 62`.
    LeeThird,
    /// The fixed residue `g` in `Z_m` at every stage.
    Constant { m: u64, g: u64 },
    /// The cycle `(1 2 … k)` in `S_n`, normalized Hamming norm, `n ≥ k`.
    HammingBlock { k: usize },
}

const LEE_THIRD_MAX: usize = 62;
const HAMMING_BLOCK_MAX: usize = 1 << 20;

impl SeqRule {
    pub fn id(&self) -> &'static str {
        match self {
            SeqRule::LeeThird => "lee_third",
            SeqRule::Constant { .. } => "constant",
            SeqRule::HammingBlock { .. } => "hamming_block",
        }
    }

    pub fn catalog() -> Vec<&'static str> {
        vec!["lee_third", "constant", "hamming_block"]
    }

    /// Parses `{"rule": id, ...}`; `constant` takes `m` and `g`,
    /// `hamming_block` takes `k`.
    pub fn from_json(v: &serde_json::Value) -> Result<SeqRule> {
        let field = |name: &str| {
            v.get(name)
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::Parse(format!("rule needs an integer field {name:?}")))
        };
        match v.get("rule").and_then(|r| r.as_str()) {
            Some("lee_third") => Ok(SeqRule::LeeThird),
            Some("constant") => {
                let (m, g) = (field("m")?, field("g")?);
                if m == 0 || g >= m {
                    return domain(format!("need 0 ≤ g < m, got g = {g}, m = {m}"));
                }
                Ok(SeqRule::Constant { m, g })
            }
            Some("hamming_block") => Ok(SeqRule::HammingBlock { k: field("k")? as usize }),
            Some(other) => Err(Error::Parse(format!("unknown sequence rule {other:?}"))),
            None => Err(Error::Parse("missing \"rule\"".into())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SeqRule::LeeThird => json!({"rule": "lee_third"}),
            SeqRule::Constant { m, g } => json!({"rule": "constant", "m": m, "g": g}),
            SeqRule::HammingBlock { k } => json!({"rule": "hamming_block", "k": k}),
        }
    }

    /// Stages `n` for which the rule is defined.
    pub fn valid_range(&self) -> (usize, usize) {
        match self {
            SeqRule::LeeThird => (1, LEE_THIRD_MAX),
            SeqRule::Constant { .. } => (1, usize::MAX),
            SeqRule::HammingBlock { k } => ((*k).max(1), HAMMING_BLOCK_MAX),
        }
    }

    fn check_range(&self, lo: usize, hi: usize) -> Result<()> {
        let (a, b) = self.valid_range();
        if lo > hi || lo < a || hi > b {
            return domain(format!("range [{lo}, {hi}] is outside [{a}, {b}] for rule {}", self.id()));
        }
        Ok(())
    }

    /// `‖g_n^m‖_n`
    pub fn power_norm(&self, n: usize, m: u64) -> Result<Q> {
        self.check_range(n, n)?;
        Ok(match self {
            SeqRule::LeeThird => {
                let modulus = 1u64 << n;
                let g = CyclicLee::<i64>::new(modulus)?;
                g.norm(&g.power(&(modulus / 3), m))
            }
            SeqRule::Constant { m: modulus, g: x } => {
                let g = CyclicLee::<i64>::new(*modulus)?;
                g.norm(&g.power(x, m))
            }
            SeqRule::HammingBlock { k } => {
                let c = if *k >= 2 { Perm::from_cycles(n, &[(1..=*k).collect()])? } else { Perm::identity(n) };
                let g = PermGroup::<i64>::new(n, false, PermNorm::HammingNormalized);
                g.norm(&c.pow(m))
            }
        })
    }
}

/// `(n, ‖g_n^m‖_n)` for `lo ≤ n ≤ hi`.
pub fn tail_norm_profile(rule: &SeqRule, m: u64, lo: usize, hi: usize) -> Result<Vec<(usize, Q)>> {
    rule.check_range(lo, hi)?;
    (lo..=hi)
        .into_par_iter()
        .map(|n| rule.power_norm(n, m).map(|v| (n, v)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct InfinitesimalReport {
    /// Some stage `n₀` in range has `‖g_n^m‖ ≤ tol` for all `n ≥ n₀`, and
    /// the rule's analytic bound (if any) holds at every stage.
    pub holds: bool,
    /// Least such `n₀`.
    pub n0: Option<usize>,
    /// Largest norm over `n ≥ n₀` (over the whole range if there is no
    /// `n₀`).
    pub max_tail_norm: Q,
    /// Norms are non-increasing in `n` over the tail.
    pub monotone: bool,
    /// For `lee_third` with `m = 3`: whether `‖g_n³‖ ≤ 2^{2−n}` at every
    /// stage, and the first stage where it fails.
    pub bound: Option<(bool, Option<usize>)>,
    pub profile: Vec<(usize, Q)>,
}

impl InfinitesimalReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "holds": self.holds,
            "n0": self.n0,
            "max_tail_norm": fmt_ratio(&self.max_tail_norm),
            "monotone": self.monotone,
            "bound": self.bound.map(|(ok, first)| json!({"holds": ok, "first_failure": first})),
            "profile": self.profile.iter().map(|(n, v)| json!([n, fmt_ratio(v)])).collect::<Vec<_>>(),
            "note": "finite stages only",
        })
    }
}

/// `2^{2−n}` as an exact rational.
pub fn lee_third_bound(n: usize) -> Q {
    if n <= 2 {
        Q::from_integer(1i64 << (2 - n))
    } else {
        Ratio::new(1, 1i64 << (n - 2))
    }
}

pub fn infinitesimal_check(rule: &SeqRule, m: u64, lo: usize, hi: usize, tol: &Q) -> Result<InfinitesimalReport> {
    let profile = tail_norm_profile(rule, m, lo, hi)?;
    let mut n0 = None;
    for (n, v) in profile.iter().rev() {
        if v > tol {
            break;
        }
        n0 = Some(*n);
    }
    let tail: Vec<&Q> = profile.iter().filter(|(n, _)| n0.map_or(true, |s| *n >= s)).map(|(_, v)| v).collect();
    let max_tail_norm = tail.iter().copied().max().copied().unwrap_or_else(|| Q::from_integer(0));
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let bound = (matches!(rule, SeqRule::LeeThird) && m == 3).then(|| {
        let first = profile.iter().find(|(n, v)| *v > lee_third_bound(*n)).map(|(n, _)| *n);
        (first.is_none(), first)
    });
    let holds = n0.is_some() && bound.map_or(true, |(ok, _)| ok);
    Ok(InfinitesimalReport { holds, n0, max_tail_norm, monotone, bound, profile })
}
