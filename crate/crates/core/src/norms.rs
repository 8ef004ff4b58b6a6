//! Norm axioms, scaling and the norms not tied to one group family:
//! the Lee norm on `Z_m` and conjugacy length on finite groups.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;

use num_rational::Ratio;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::group::{Enumerated, GroupAdapter};
use crate::scalar::{fmt_ratio, lift, LogRatio, NormValue, Scalar};
use crate::Q;

/// The four axioms of a bi-invariant norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `‖e‖ = 0`
    Identity,
    /// `‖gh‖ ≤ ‖g‖ + ‖h‖`
    Subadditive,
    /// `‖g⁻¹‖ = ‖g‖ = ‖hgh⁻¹‖`
    Invariant,
    /// `‖g‖ = 0 ⇒ g = e`
    Definite,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::Identity, Axiom::Subadditive, Axiom::Invariant, Axiom::Definite];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::Identity => "(0)",
            Axiom::Subadditive => "(1)",
            Axiom::Invariant => "(2)",
            Axiom::Definite => "(3)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    /// Pairs of random words of length at most `word_len` over the
    /// generators and their inverses.
    Sampled { seed: u64, samples: usize, word_len: usize },
}

impl CheckMode {
    pub fn id(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled { .. } => "sampled",
        }
    }
}

/// Per-axiom verdicts. A failing axiom always has a counterexample
/// `(g, h)`; `h` is absent for the unary checks.
#[derive(Clone, Debug)]
pub struct NormReport<E> {
    pub axiom_results: BTreeMap<Axiom, bool>,
    pub counterexamples: BTreeMap<Axiom, (E, Option<E>)>,
    pub pairs_checked: u64,
    pub mode: CheckMode,
}

impl<E> NormReport<E> {
    pub fn passes(&self, a: Axiom) -> bool {
        self.axiom_results[&a]
    }

    /// Axioms (0)-(2).
    pub fn is_pseudo_norm(&self) -> bool {
        [Axiom::Identity, Axiom::Subadditive, Axiom::Invariant]
            .iter()
            .all(|a| self.passes(*a))
    }

    pub fn is_norm(&self) -> bool {
        self.is_pseudo_norm() && self.passes(Axiom::Definite)
    }
}

/// Re-evaluates a single counterexample; true when the violation is real.
pub fn reproduces_violation<G: GroupAdapter>(
    group: &G,
    axiom: Axiom,
    g: &G::Elem,
    h: Option<&G::Elem>,
) -> bool {
    let ng = group.norm(g);
    match (axiom, h) {
        (Axiom::Identity, _) => !group.norm(&group.identity()).is_zero_value(),
        (Axiom::Subadditive, Some(h)) => group.norm(&group.multiply(g, h)) > ng.plus(&group.norm(h)),
        (Axiom::Invariant, None) => group.norm(&group.invert(g)) != ng,
        (Axiom::Invariant, Some(h)) => group.norm(&group.conjugate(g, &group.invert(h))) != ng,
        (Axiom::Definite, _) => ng.is_zero_value() && *g != group.identity(),
        _ => false,
    }
}

pub fn verify_norm_axioms<G: GroupAdapter>(group: &G, mode: CheckMode) -> Result<NormReport<G::Elem>> {
    match mode {
        CheckMode::Exhaustive => {
            let en = Enumerated::new(group)?;
            Ok(verify_exhaustive(&en))
        }
        CheckMode::Sampled { seed, samples, word_len } => {
            if group.generators().is_empty() {
                return Err(Error::Capability(format!("{} has no generators to sample from", group.name())));
            }
            Ok(verify_sampled(group, seed, samples, word_len, mode))
        }
    }
}

/// Exhaustive check on an already indexed group. Counterexamples are the
/// lexicographically least violations.
pub fn verify_exhaustive<G: GroupAdapter>(en: &Enumerated<'_, G>) -> NormReport<G::Elem> {
    let n = en.len();
    let e = en.identity();
    let mut results = BTreeMap::new();
    let mut cex = BTreeMap::new();

    let ok0 = en.norm(e).is_zero_value();
    results.insert(Axiom::Identity, ok0);
    if !ok0 {
        cex.insert(Axiom::Identity, (en.elem(e).clone(), None));
    }

    let sub = (0..n).into_par_iter().find_map_first(|g| {
        (0..n)
            .find(|&h| *en.norm(en.mul(g, h)) > en.norm(g).plus(en.norm(h)))
            .map(|h| (g, h))
    });
    results.insert(Axiom::Subadditive, sub.is_none());
    if let Some((g, h)) = sub {
        cex.insert(Axiom::Subadditive, (en.elem(g).clone(), Some(en.elem(h).clone())));
    }

    let inv = (0..n).into_par_iter().find_map_first(|g| {
        if en.norm(en.inv(g)) != en.norm(g) {
            return Some((g, None));
        }
        // h g h⁻¹ is the conjugate of g by h⁻¹
        (0..n)
            .find(|&h| en.norm(en.conj(g, en.inv(h))) != en.norm(g))
            .map(|h| (g, Some(h)))
    });
    results.insert(Axiom::Invariant, inv.is_none());
    if let Some((g, h)) = inv {
        cex.insert(Axiom::Invariant, (en.elem(g).clone(), h.map(|h| en.elem(h).clone())));
    }

    let def = (0..n).find(|&g| g != e && en.norm(g).is_zero_value());
    results.insert(Axiom::Definite, def.is_none());
    if let Some(g) = def {
        cex.insert(Axiom::Definite, (en.elem(g).clone(), None));
    }

    NormReport {
        axiom_results: results,
        counterexamples: cex,
        pairs_checked: (n as u64) * (n as u64),
        mode: CheckMode::Exhaustive,
    }
}

fn verify_sampled<G: GroupAdapter>(
    group: &G,
    seed: u64,
    samples: usize,
    word_len: usize,
    mode: CheckMode,
) -> NormReport<G::Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results: BTreeMap<Axiom, bool> = Axiom::ALL.iter().map(|a| (*a, true)).collect();
    let mut cex = BTreeMap::new();
    let mut fail = |a: Axiom, g: &G::Elem, h: Option<&G::Elem>, results: &mut BTreeMap<Axiom, bool>| {
        if results[&a] {
            results.insert(a, false);
            cex.insert(a, (g.clone(), h.cloned()));
        }
    };
    let e = group.identity();
    if !group.norm(&e).is_zero_value() {
        fail(Axiom::Identity, &e, None, &mut results);
    }
    for _ in 0..samples {
        let g = group.random_word(&mut rng, word_len);
        let h = group.random_word(&mut rng, word_len);
        for a in [Axiom::Subadditive, Axiom::Invariant, Axiom::Definite] {
            if reproduces_violation(group, a, &g, None) && a != Axiom::Subadditive {
                fail(a, &g, None, &mut results);
            }
            if a != Axiom::Definite && reproduces_violation(group, a, &g, Some(&h)) {
                fail(a, &g, Some(&h), &mut results);
            }
        }
    }
    NormReport { axiom_results: results, counterexamples: cex, pairs_checked: samples as u64, mode }
}

/// Checks `‖gⁿ‖ ≤ ‖g‖` for `1 ≤ n ≤ max_power`; returns the least
/// violating `(g, n)`.
pub fn check_power_monotone<G: GroupAdapter>(
    group: &G,
    max_power: u64,
    mode: CheckMode,
) -> Result<Option<(G::Elem, u64)>> {
    if max_power < 1 {
        return domain("max_power must be at least 1");
    }
    let violates = |g: &G::Elem| -> Option<u64> {
        let ng = group.norm(g);
        let mut acc = g.clone();
        for n in 1..=max_power {
            if group.norm(&acc) > ng {
                return Some(n);
            }
            acc = group.multiply(&acc, g);
        }
        None
    };
    match mode {
        CheckMode::Exhaustive => {
            let en = Enumerated::new(group)?;
            Ok((0..en.len())
                .into_par_iter()
                .find_map_first(|i| violates(en.elem(i)).map(|n| (en.elem(i).clone(), n))))
        }
        CheckMode::Sampled { seed, samples, word_len } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..samples).find_map(|_| {
                let g = group.random_word(&mut rng, word_len);
                violates(&g).map(|n| (g, n))
            }))
        }
    }
}

/// `min(g, m−g) · 2/m`; for `m = 2ⁿ` this is `min(g, 2ⁿ−g) / 2ⁿ⁻¹`.
pub fn lee_norm<T: Scalar>(g: u64, m: u64) -> Result<Ratio<T>> {
    if m < 2 {
        return domain(format!("Lee norm needs modulus >= 2, got {m}"));
    }
    if g >= m {
        return domain(format!("residue {g} outside 0..{m}"));
    }
    let d = g.min(m - g);
    Ok(Ratio::new(T::from_u64(2 * d).unwrap(), T::from_u64(m).unwrap()))
}

/// `Z_m` under addition with the Lee norm.
#[derive(Clone, Debug)]
pub struct CyclicLee<T = i64> {
    m: u64,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> CyclicLee<T> {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return domain(format!("cyclic group needs m >= 2, got {m}"));
        }
        Ok(CyclicLee { m, _scalar: PhantomData })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }
}

impl<T: Scalar> GroupAdapter for CyclicLee<T> {
    type Elem = u64;
    type Value = Ratio<T>;

    fn name(&self) -> String {
        format!("Z_{}", self.m)
    }
    fn identity(&self) -> u64 {
        0
    }
    fn multiply(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.m as u128) as u64
    }
    fn invert(&self, a: &u64) -> u64 {
        (self.m - a) % self.m
    }
    fn norm(&self, a: &u64) -> Ratio<T> {
        lee_norm(*a, self.m).expect("residue in range")
    }
    fn generators(&self) -> Vec<u64> {
        vec![1]
    }
    fn enumerate(&self, budget: usize) -> Result<Vec<u64>> {
        if self.m > budget as u64 {
            return Err(Error::Capability(format!("|Z_{}| exceeds the element budget {budget}", self.m)));
        }
        Ok((0..self.m).collect())
    }
    fn encode(&self, a: &u64) -> serde_json::Value {
        serde_json::json!(a)
    }
    fn decode(&self, v: &serde_json::Value) -> Result<u64> {
        let g = v.as_u64().ok_or_else(|| Error::Parse(format!("not a residue: {v}")))?;
        if g >= self.m {
            return domain(format!("residue {g} outside 0..{}", self.m));
        }
        Ok(g)
    }
    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({"type": "cyclic_lee", "m": self.m, "norm": "lee"})
    }
}

/// Norm values that can be multiplied by a positive rational exactly.
pub trait Scalable: NormValue {
    fn scale(&self, c: &Q) -> Self;
}

impl<T: Scalar> Scalable for Ratio<T> {
    fn scale(&self, c: &Q) -> Self {
        self * lift::<T>(c)
    }
}

/// `(G, c·‖·‖)` for a positive rational `c`.
#[derive(Clone, Debug)]
pub struct ScaledNorm<G> {
    inner: G,
    factor: Q,
}

pub fn scale_norm<G: GroupAdapter>(group: G, c: Q) -> Result<ScaledNorm<G>>
where
    G::Value: Scalable,
{
    if c <= Q::zero() {
        return domain(format!("scale factor must be positive, got {}", fmt_ratio(&c)));
    }
    Ok(ScaledNorm { inner: group, factor: c })
}

impl<G> ScaledNorm<G> {
    pub fn inner(&self) -> &G {
        &self.inner
    }
    pub fn factor(&self) -> Q {
        self.factor
    }
}

impl<G: GroupAdapter> GroupAdapter for ScaledNorm<G>
where
    G::Value: Scalable,
{
    type Elem = G::Elem;
    type Value = G::Value;

    fn name(&self) -> String {
        if self.factor == Q::from_integer(1) {
            self.inner.name()
        } else {
            format!("{}·{}", fmt_ratio(&self.factor), self.inner.name())
        }
    }
    fn identity(&self) -> G::Elem {
        self.inner.identity()
    }
    fn multiply(&self, a: &G::Elem, b: &G::Elem) -> G::Elem {
        self.inner.multiply(a, b)
    }
    fn invert(&self, a: &G::Elem) -> G::Elem {
        self.inner.invert(a)
    }
    fn norm(&self, a: &G::Elem) -> G::Value {
        self.inner.norm(a).scale(&self.factor)
    }
    fn generators(&self) -> Vec<G::Elem> {
        self.inner.generators()
    }
    fn enumerate(&self, budget: usize) -> Result<Vec<G::Elem>> {
        self.inner.enumerate(budget)
    }
    fn encode(&self, a: &G::Elem) -> serde_json::Value {
        self.inner.encode(a)
    }
    fn decode(&self, v: &serde_json::Value) -> Result<G::Elem> {
        self.inner.decode(v)
    }
    fn descriptor(&self) -> serde_json::Value {
        let mut d = self.inner.descriptor();
        if self.factor != Q::from_integer(1) {
            if let Some(obj) = d.as_object_mut() {
                let id = obj.get("norm").cloned().unwrap_or(serde_json::Value::Null);
                let id = match id {
                    serde_json::Value::Object(o) => o.get("id").cloned().unwrap_or_default(),
                    other => other,
                };
                let scale = match obj.get("norm").and_then(|n| n.get("scale")).and_then(|s| s.as_str()) {
                    Some(s) => crate::scalar::parse_ratio::<i64>(s).unwrap_or(Q::from_integer(1)) * self.factor,
                    None => self.factor,
                };
                obj.insert("norm".into(), serde_json::json!({"id": id, "scale": fmt_ratio(&scale)}));
            }
        }
        d
    }
}

/// `‖g‖_c = log|g^G| / log|G|` on a finite group. A pseudo-norm that
/// vanishes exactly on the center.
pub struct ConjugacyLength<G: GroupAdapter> {
    inner: G,
    class_size: HashMap<G::Elem, u64>,
    order: u64,
}

impl<G: GroupAdapter> ConjugacyLength<G> {
    pub fn new(group: G) -> Result<Self> {
        let (class_size, order) = {
            let en = Enumerated::new(&group)?;
            if en.len() < 2 {
                return domain("conjugacy length is undefined on the trivial group");
            }
            let sizes = (0..en.len())
                .map(|i| (en.elem(i).clone(), en.class_size(i) as u64))
                .collect();
            (sizes, en.len() as u64)
        };
        Ok(ConjugacyLength { inner: group, class_size, order })
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }
}

impl<G: GroupAdapter> fmt::Debug for ConjugacyLength<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConjugacyLength({})", self.inner.name())
    }
}

impl<G: GroupAdapter> GroupAdapter for ConjugacyLength<G> {
    type Elem = G::Elem;
    type Value = LogRatio;

    fn name(&self) -> String {
        self.inner.name()
    }
    fn identity(&self) -> G::Elem {
        self.inner.identity()
    }
    fn multiply(&self, a: &G::Elem, b: &G::Elem) -> G::Elem {
        self.inner.multiply(a, b)
    }
    fn invert(&self, a: &G::Elem) -> G::Elem {
        self.inner.invert(a)
    }
    fn norm(&self, a: &G::Elem) -> LogRatio {
        LogRatio::new(self.class_size[a] as u128, self.order)
    }
    fn generators(&self) -> Vec<G::Elem> {
        self.inner.generators()
    }
    fn enumerate(&self, budget: usize) -> Result<Vec<G::Elem>> {
        self.inner.enumerate(budget)
    }
    fn encode(&self, a: &G::Elem) -> serde_json::Value {
        self.inner.encode(a)
    }
    fn decode(&self, v: &serde_json::Value) -> Result<G::Elem> {
        self.inner.decode(v)
    }
    fn descriptor(&self) -> serde_json::Value {
        let mut d = self.inner.descriptor();
        if let Some(obj) = d.as_object_mut() {
            obj.insert("norm".into(), serde_json::json!("conjugacy_length"));
        }
        d
    }
}

/// `log|g^G| / log|G|` for a single element.
pub fn conjugacy_length_norm<G: GroupAdapter>(g: &G::Elem, group: &G) -> Result<LogRatio> {
    let en = Enumerated::new(group)?;
    if en.len() < 2 {
        return domain("conjugacy length is undefined on the trivial group");
    }
    let i = en
        .index_of(g)
        .ok_or_else(|| Error::Domain(format!("{g:?} is not in {}", group.name())))?;
    Ok(LogRatio::new(en.class_size(i) as u128, en.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{Perm, PermNorm};
    use crate::{LeeGroup, SymGroup};
    use proptest::prelude::*;

    #[test]
    fn lee_examples() {
        assert_eq!(lee_norm::<i64>(0, 8).unwrap(), Ratio::zero());
        assert_eq!(lee_norm::<i64>(3, 8).unwrap(), Ratio::new(3, 4));
        assert_eq!(lee_norm::<i64>(8, 16).unwrap(), Ratio::from_integer(1));
        assert!(lee_norm::<i64>(8, 8).is_err());
        assert!(lee_norm::<i64>(0, 1).is_err());
        // power-of-two formula min(g, 2^n - g) / 2^(n-1)
        for n in 1..=10u32 {
            let m = 1u64 << n;
            for g in 0..m {
                let closed_form = Ratio::new(g.min(m - g) as i64, 1i64 << (n - 1));
                assert_eq!(lee_norm::<i64>(g, m).unwrap(), closed_form);
            }
        }
    }

    proptest! {
        #[test]
        fn lee_symmetry(m in 2u64..500, g in 1u64..500) {
            prop_assume!(g < m);
            prop_assert_eq!(lee_norm::<i64>(g, m).unwrap(), lee_norm::<i64>(m - g, m).unwrap());
        }

        #[test]
        fn scaling_composes(a in 1i64..20, b in 1i64..20, c in 1i64..20, d in 1i64..20) {
            let g = SymGroup::symmetric(5);
            let twice = scale_norm(scale_norm(g.clone(), Q::new(a, b)).unwrap(), Q::new(c, d)).unwrap();
            let once = scale_norm(g, Q::new(a * c, b * d)).unwrap();
            for p in once.enumerate(1000).unwrap() {
                prop_assert_eq!(twice.norm(&p), once.norm(&p));
            }
        }
    }

    #[test]
    fn hamming_on_s4_is_a_norm() {
        let r = verify_norm_axioms(&SymGroup::symmetric(4), CheckMode::Exhaustive).unwrap();
        assert!(r.is_norm());
        assert_eq!(r.pairs_checked, 576);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn conjugacy_length_on_abelian_group() {
        let g = ConjugacyLength::new(LeeGroup::new(4).unwrap()).unwrap();
        let r = verify_norm_axioms(&g, CheckMode::Exhaustive).unwrap();
        assert!(r.is_pseudo_norm());
        assert!(!r.passes(Axiom::Definite));
        let (w, _) = &r.counterexamples[&Axiom::Definite];
        assert_eq!(*w, 1);
        assert!(reproduces_violation(&g, Axiom::Definite, w, None));
    }

    #[test]
    fn conjugacy_length_values() {
        let s4 = SymGroup::symmetric(4);
        assert!(conjugacy_length_norm(&Perm::identity(4), &s4).unwrap().is_zero_value());
        let s3 = SymGroup::symmetric(3);
        let t = Perm::parse("(1 2)", Some(3)).unwrap();
        let v = conjugacy_length_norm(&t, &s3).unwrap();
        assert_eq!((v.arg, v.base), (3, 6));
        let z = LeeGroup::new(7).unwrap();
        assert!(conjugacy_length_norm(&3, &z).unwrap().is_zero_value());
        let s4c = ConjugacyLength::new(s4).unwrap();
        assert!(verify_norm_axioms(&s4c, CheckMode::Exhaustive).unwrap().is_pseudo_norm());
    }

    #[test]
    fn scaling_examples() {
        let g = SymGroup::symmetric(5);
        let s = scale_norm(g.clone(), Q::new(1, 5)).unwrap();
        let c = Perm::parse("(1 2 3)", Some(5)).unwrap();
        assert_eq!(s.norm(&c), Ratio::new(3, 5));
        let one = scale_norm(g.clone(), Q::from_integer(1)).unwrap();
        assert_eq!(one.norm(&c), g.norm(&c));
        let back = scale_norm(scale_norm(g.clone(), Q::new(1, 2)).unwrap(), Q::from_integer(2)).unwrap();
        assert_eq!(back.norm(&c), g.norm(&c));
        assert!(scale_norm(g.clone(), Q::zero()).is_err());
        assert!(scale_norm(g, Q::new(-1, 2)).is_err());
        let r = verify_norm_axioms(&s, CheckMode::Exhaustive).unwrap();
        assert!(r.is_norm());
    }

    #[test]
    fn sampled_mode_reports_seed_and_passes() {
        let g = SymGroup::symmetric(9).with_norm(PermNorm::HammingNormalized);
        let mode = CheckMode::Sampled { seed: 11, samples: 500, word_len: 12 };
        let r = verify_norm_axioms(&g, mode).unwrap();
        assert!(r.is_norm());
        assert_eq!(r.mode, mode);
    }

    #[test]
    fn power_monotone_examples() {
        let g = SymGroup::symmetric(5);
        assert_eq!(check_power_monotone(&g, 10, CheckMode::Exhaustive).unwrap(), None);
        assert!(check_power_monotone(&g, 0, CheckMode::Exhaustive).is_err());
    }

    /// Not conjugation invariant: measures where 1 is sent.
    struct Broken(SymGroup);
    impl GroupAdapter for Broken {
        type Elem = Perm;
        type Value = Q;
        fn name(&self) -> String {
            "broken".into()
        }
        fn identity(&self) -> Perm {
            self.0.identity()
        }
        fn multiply(&self, a: &Perm, b: &Perm) -> Perm {
            self.0.multiply(a, b)
        }
        fn invert(&self, a: &Perm) -> Perm {
            a.inverse()
        }
        fn norm(&self, a: &Perm) -> Q {
            Q::from_integer(a.apply(1) as i64 - 1)
        }
        fn generators(&self) -> Vec<Perm> {
            self.0.generators()
        }
        fn enumerate(&self, b: usize) -> Result<Vec<Perm>> {
            self.0.enumerate(b)
        }
        fn encode(&self, a: &Perm) -> serde_json::Value {
            self.0.encode(a)
        }
        fn decode(&self, v: &serde_json::Value) -> Result<Perm> {
            self.0.decode(v)
        }
        fn descriptor(&self) -> serde_json::Value {
            serde_json::Value::Null
        }
    }

    #[test]
    fn failures_carry_reproducible_counterexamples() {
        let g = Broken(SymGroup::symmetric(3));
        let en = Enumerated::new(&g).unwrap();
        assert!(en.spot_check_norm().is_err());
        let r = verify_exhaustive(&en);
        assert!(!r.passes(Axiom::Invariant));
        for (a, (x, y)) in &r.counterexamples {
            assert!(!r.passes(*a));
            assert!(reproduces_violation(&g, *a, x, y.as_ref()), "{a:?}");
        }
        let sampled = verify_norm_axioms(&g, CheckMode::Sampled { seed: 3, samples: 200, word_len: 6 }).unwrap();
        assert!(!sampled.passes(Axiom::Invariant));
    }
}
