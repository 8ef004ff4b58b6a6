//! Group descriptors and the type-erased group handle tasks dispatch on.

use metgroup::linear::is_prime;
use metgroup::norms::{scale_norm, ConjugacyLength, ScaledNorm};
use metgroup::perm::PermNorm;
use metgroup::scalar::{fmt_ratio, parse_ratio};
use metgroup::{GridIetGroup, GroupAdapter, LeeGroup, SlGroup, SymGroup, Q};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult};

pub const GROUP_TYPES: [&str; 5] = ["sym", "alt", "cyclic_lee", "sl_fp", "iet"];

/// `(norm id, group types carrying it)`
pub const NORMS: [(&str, &[&str]); 6] = [
    ("hamming", &["sym", "alt"]),
    ("hamming_normalized", &["sym", "alt"]),
    ("lee", &["cyclic_lee"]),
    ("jordan", &["sl_fp"]),
    ("iet_support", &["iet"]),
    ("conjugacy_length", &["sym", "alt", "cyclic_lee", "sl_fp", "iet"]),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Sym(usize),
    Alt(usize),
    Lee(u64),
    Sl(usize, u32),
    Iet(usize),
}

impl GroupKind {
    fn type_id(&self) -> &'static str {
        match self {
            GroupKind::Sym(_) => "sym",
            GroupKind::Alt(_) => "alt",
            GroupKind::Lee(_) => "cyclic_lee",
            GroupKind::Sl(..) => "sl_fp",
            GroupKind::Iet(_) => "iet",
        }
    }

    fn default_norm(&self) -> &'static str {
        match self {
            GroupKind::Sym(_) | GroupKind::Alt(_) => "hamming",
            GroupKind::Lee(_) => "lee",
            GroupKind::Sl(..) => "jordan",
            GroupKind::Iet(_) => "iet_support",
        }
    }
}

/// A validated descriptor such as `{"type":"sym","n":4,"norm":"hamming"}`.
/// The norm may be written `{"id": "...", "scale": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub norm: String,
    pub scale: Q,
}

impl GroupSpec {
    pub fn parse(v: &Value, pointer: &str) -> CliResult<GroupSpec> {
        let obj = v.as_object().ok_or_else(|| CliError::config(pointer, "group descriptor must be an object"))?;
        let int = |key: &str| -> CliResult<u64> {
            obj.get(key)
                .and_then(|x| x.as_u64())
                .ok_or_else(|| CliError::config(format!("{pointer}/{key}"), format!("missing or non-integer {key:?}")))
        };
        let ty = obj
            .get("type")
            .and_then(|t| t.as_str())
            .ok_or_else(|| CliError::config(format!("{pointer}/type"), "missing group type"))?;
        let allowed: &[&str] = match ty {
            "sym" | "alt" => &["type", "n", "norm"],
            "cyclic_lee" => &["type", "m", "norm"],
            "sl_fp" => &["type", "n", "p", "norm"],
            "iet" => &["type", "n", "norm"],
            _ => {
                return Err(CliError::config(
                    format!("{pointer}/type"),
                    format!("unknown group type {ty:?}; expected one of {GROUP_TYPES:?}"),
                ))
            }
        };
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::config(format!("{pointer}/{k}"), format!("unexpected field {k:?} for type {ty:?}")));
        }
        let kind = match ty {
            "sym" | "alt" => {
                let n = int("n")? as usize;
                if n == 0 {
                    return Err(CliError::config(format!("{pointer}/n"), "degree must be positive"));
                }
                if ty == "sym" {
                    GroupKind::Sym(n)
                } else {
                    GroupKind::Alt(n)
                }
            }
            "cyclic_lee" => {
                let m = int("m")?;
                if m < 2 {
                    return Err(CliError::config(format!("{pointer}/m"), "modulus must be at least 2"));
                }
                GroupKind::Lee(m)
            }
            "sl_fp" => {
                let n = int("n")? as usize;
                let p = int("p")?;
                if n < 1 {
                    return Err(CliError::config(format!("{pointer}/n"), "dimension must be positive"));
                }
                if p > u32::MAX as u64 || !is_prime(p as u32) {
                    return Err(CliError::config(format!("{pointer}/p"), format!("{p} is not a prime")));
                }
                GroupKind::Sl(n, p as u32)
            }
            _ => {
                let n = int("n")? as usize;
                if n == 0 {
                    return Err(CliError::config(format!("{pointer}/n"), "resolution must be positive"));
                }
                GroupKind::Iet(n)
            }
        };
        let norm_ptr = format!("{pointer}/norm");
        let (norm, scale) = match obj.get("norm") {
            None => (kind.default_norm().to_string(), Q::from_integer(1)),
            Some(Value::String(s)) => (s.clone(), Q::from_integer(1)),
            Some(Value::Object(o)) => {
                if let Some(k) = o.keys().find(|k| *k != "id" && *k != "scale") {
                    return Err(CliError::config(format!("{norm_ptr}/{k}"), "norm object takes only \"id\" and \"scale\""));
                }
                let id = match o.get("id") {
                    None => kind.default_norm().to_string(),
                    Some(Value::String(s)) => s.clone(),
                    Some(_) => return Err(CliError::config(format!("{norm_ptr}/id"), "norm id must be a string")),
                };
                let scale = match o.get("scale") {
                    None => Q::from_integer(1),
                    Some(Value::String(s)) => parse_ratio::<i64>(s)
                        .map_err(|e| CliError::config(format!("{norm_ptr}/scale"), e.to_string()))?,
                    Some(_) => return Err(CliError::config(format!("{norm_ptr}/scale"), "scale must be a \"p/q\" string")),
                };
                if scale <= Q::from_integer(0) {
                    return Err(CliError::config(format!("{norm_ptr}/scale"), "scale must be positive"));
                }
                (id, scale)
            }
            Some(_) => return Err(CliError::config(norm_ptr, "norm must be an id or {\"id\", \"scale\"}")),
        };
        let fits = NORMS.iter().any(|(id, types)| *id == norm && types.contains(&kind.type_id()));
        if !fits {
            return Err(CliError::config(norm_ptr, format!("norm {norm:?} is not available on type {:?}", kind.type_id())));
        }
        if norm == "conjugacy_length" && scale != Q::from_integer(1) {
            return Err(CliError::config(format!("{norm_ptr}/scale"), "conjugacy_length cannot be rescaled"));
        }
        Ok(GroupSpec { kind, norm, scale })
    }

    pub fn descriptor(&self) -> Value {
        let norm = if self.scale == Q::from_integer(1) {
            json!(self.norm)
        } else {
            json!({"id": self.norm, "scale": fmt_ratio(&self.scale)})
        };
        match self.kind {
            GroupKind::Sym(n) => json!({"type": "sym", "n": n, "norm": norm}),
            GroupKind::Alt(n) => json!({"type": "alt", "n": n, "norm": norm}),
            GroupKind::Lee(m) => json!({"type": "cyclic_lee", "m": m, "norm": norm}),
            GroupKind::Sl(n, p) => json!({"type": "sl_fp", "n": n, "p": p, "norm": norm}),
            GroupKind::Iet(n) => json!({"type": "iet", "n": n, "norm": norm}),
        }
    }

    pub fn build(&self) -> CliResult<AnyGroup> {
        let conj = self.norm == "conjugacy_length";
        let perm_norm = if self.norm == "hamming_normalized" { PermNorm::HammingNormalized } else { PermNorm::Hamming };
        Ok(match self.kind {
            GroupKind::Sym(n) | GroupKind::Alt(n) => {
                let g = SymGroup::new(n, matches!(self.kind, GroupKind::Alt(_)), perm_norm);
                if conj {
                    AnyGroup::PermConj(ConjugacyLength::new(g)?)
                } else {
                    AnyGroup::Perm(scale_norm(g, self.scale)?)
                }
            }
            GroupKind::Lee(m) => {
                let g = LeeGroup::new(m)?;
                if conj {
                    AnyGroup::LeeConj(ConjugacyLength::new(g)?)
                } else {
                    AnyGroup::Lee(scale_norm(g, self.scale)?)
                }
            }
            GroupKind::Sl(n, p) => {
                let g = SlGroup::new(n, p)?;
                if conj {
                    AnyGroup::SlConj(ConjugacyLength::new(g)?)
                } else {
                    AnyGroup::Sl(scale_norm(g, self.scale)?)
                }
            }
            GroupKind::Iet(n) => {
                let g = GridIetGroup::new(n)?;
                if conj {
                    AnyGroup::IetConj(ConjugacyLength::new(g)?)
                } else {
                    AnyGroup::Iet(scale_norm(g, self.scale)?)
                }
            }
        })
    }
}

/// A built group of any supported type and norm.
pub enum AnyGroup {
    Perm(ScaledNorm<SymGroup>),
    PermConj(ConjugacyLength<SymGroup>),
    Lee(ScaledNorm<LeeGroup>),
    LeeConj(ConjugacyLength<LeeGroup>),
    Sl(ScaledNorm<SlGroup>),
    SlConj(ConjugacyLength<SlGroup>),
    Iet(ScaledNorm<GridIetGroup>),
    IetConj(ConjugacyLength<GridIetGroup>),
}

impl AnyGroup {
    pub fn descriptor(&self) -> Value {
        crate::with_group!(self, |g| g.descriptor())
    }

    pub fn name(&self) -> String {
        crate::with_group!(self, |g| g.name())
    }
}

/// Runs `$body` with `$v` bound to the concrete group inside an
/// [`AnyGroup`].
#[macro_export]
macro_rules! with_group {
    ($g:expr, |$v:ident| $body:expr) => {
        match $g {
            $crate::groups::AnyGroup::Perm($v) => $body,
            $crate::groups::AnyGroup::PermConj($v) => $body,
            $crate::groups::AnyGroup::Lee($v) => $body,
            $crate::groups::AnyGroup::LeeConj($v) => $body,
            $crate::groups::AnyGroup::Sl($v) => $body,
            $crate::groups::AnyGroup::SlConj($v) => $body,
            $crate::groups::AnyGroup::Iet($v) => $body,
            $crate::groups::AnyGroup::IetConj($v) => $body,
        }
    };
}

/// Like [`with_group!`] for a family: `$v` is a `Vec<&G>`. All members must
/// share one variant.
#[macro_export]
macro_rules! with_family {
    ($groups:expr, |$v:ident| $body:expr) => {
        $crate::with_family!(@arms $groups, $v, $body; Perm PermConj Lee LeeConj Sl SlConj Iet IetConj)
    };
    (@arms $groups:expr, $v:ident, $body:expr; $($var:ident)*) => {{
        let groups: &[$crate::groups::AnyGroup] = $groups;
        match groups.first() {
            $(Some($crate::groups::AnyGroup::$var(_)) => {
                let $v = $crate::groups::homogeneous(groups, |g| match g {
                    $crate::groups::AnyGroup::$var(x) => Some(x),
                    _ => None,
                })?;
                $body
            })*
            None => Err($crate::config::CliError::config("/groups", "family is empty")),
        }
    }};
}

pub fn homogeneous<'a, G>(groups: &'a [AnyGroup], pick: impl Fn(&'a AnyGroup) -> Option<&'a G>) -> CliResult<Vec<&'a G>> {
    groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            pick(g).ok_or_else(|| {
                CliError::config(format!("/groups/{i}"), "all groups of a family must share one type and norm kind")
            })
        })
        .collect()
}
