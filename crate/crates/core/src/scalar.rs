//! Exact scalar types for norm values.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Q;

/// Integer type backing an exact rational norm value.
pub trait Scalar:
    Integer + Signed + Clone + Hash + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Hash
        + Debug
        + Display
        + FromStr
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Converts a small rational threshold into `Ratio<T>`.
pub fn lift<T: Scalar>(q: &Q) -> Ratio<T> {
    Ratio::new(
        T::from_i64(*q.numer()).expect("numerator fits the scalar type"),
        T::from_i64(*q.denom()).expect("denominator fits the scalar type"),
    )
}

pub fn from_int<T: Scalar>(v: i64) -> Ratio<T> {
    Ratio::from_integer(T::from_i64(v).expect("integer fits the scalar type"))
}

/// Lowest-terms `"p/q"` string. Integers are written with denominator 1.
pub fn fmt_ratio<T: Scalar>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer.
pub fn parse_ratio<T: Scalar>(s: &str) -> Result<Ratio<T>> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<T>()
            .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Ratio::new(p, q))
        }
        None => Ok(Ratio::from_integer(parse_int(s)?)),
    }
}

/// Fixed-precision decimal expansion by long division (truncated).
pub fn decimal<T: Scalar>(r: &Ratio<T>, digits: usize) -> String {
    let neg = r.is_negative();
    let r = r.abs();
    let (int, mut rem) = r.numer().div_rem(r.denom());
    let ten = T::from_u8(10).unwrap();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    out.push('.');
    for _ in 0..digits {
        rem = rem * ten.clone();
        let (d, m) = rem.div_rem(r.denom());
        out.push_str(&d.to_string());
        rem = m;
    }
    out
}

/// Value type of a norm. Values must be totally ordered, support the
/// addition used by the triangle inequality, and be comparable against
/// rational thresholds exactly.
pub trait NormValue: Clone + Ord + Debug + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn cmp_threshold(&self, t: &Q) -> Ordering;
    fn is_zero_value(&self) -> bool {
        *self == Self::zero_value()
    }
    fn to_json(&self) -> serde_json::Value;
    /// Twelve-digit decimal rendering for human-readable summaries.
    fn to_decimal(&self) -> String;
}

impl<T: Scalar> NormValue for Ratio<T> {
    fn zero_value() -> Self {
        <Ratio<T> as Zero>::zero()
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn cmp_threshold(&self, t: &Q) -> Ordering {
        self.cmp(&lift::<T>(t))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(fmt_ratio(self))
    }

    fn to_decimal(&self) -> String {
        decimal(self, 12)
    }
}

/// The real number `log(arg) / log(base)`, kept as the integer pair.
///
/// Sums of values over the same base multiply the arguments, so the triangle
/// inequality for conjugacy length reduces to integer comparisons.
/// `arg >= 1` always; `arg == 1` is zero regardless of base.
#[derive(Clone, Copy, Debug)]
pub struct LogRatio {
    pub arg: u128,
    pub base: u64,
}

impl LogRatio {
    pub fn new(arg: u128, base: u64) -> Self {
        assert!(arg >= 1, "log argument must be positive");
        assert!(base >= 2, "log base must be at least 2");
        LogRatio { arg, base }
    }

    pub fn to_f64(&self) -> f64 {
        (self.arg as f64).ln() / (self.base as f64).ln()
    }
}

impl PartialEq for LogRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogRatio {}

impl PartialOrd for LogRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.arg == 1 || other.arg == 1 || self.base == other.base {
            return self.arg.cmp(&other.arg);
        }
        // log a / log b  vs  log c / log d; bases differ only across groups.
        self.to_f64().total_cmp(&other.to_f64())
    }
}

impl NormValue for LogRatio {
    fn zero_value() -> Self {
        LogRatio { arg: 1, base: 2 }
    }

    fn plus(&self, other: &Self) -> Self {
        let base = if self.arg == 1 { other.base } else { self.base };
        LogRatio {
            arg: self.arg.checked_mul(other.arg).expect("log argument overflow"),
            base,
        }
    }

    fn cmp_threshold(&self, t: &Q) -> Ordering {
        // log a / log b  vs  p/q   <=>   a^q  vs  b^p   (q > 0, b >= 2)
        let (p, q) = (*t.numer(), *t.denom());
        if p < 0 {
            return Ordering::Greater;
        }
        let lhs = BigUint::from(self.arg).pow(q as u32);
        let rhs = BigUint::from(self.base).pow(p as u32);
        lhs.cmp(&rhs)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "log_ratio": [self.arg.to_string(), self.base.to_string()],
            "decimal": self.to_decimal(),
        })
    }

    fn to_decimal(&self) -> String {
        format!("{:.12}", self.to_f64())
    }
}

impl Display for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log({})/log({})", self.arg, self.base)
    }
}
