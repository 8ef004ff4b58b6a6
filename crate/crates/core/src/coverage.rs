//! Conjugate balls `C_N(g, G)` and the covering checks built on them.
//!
//! Everything here runs on an [`Enumerated`] group and works with element
//! indices; index order is the order in which witnesses are chosen, so the
//! reported witness is always the least one.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cert::{ConjProductCert, Factor};
use crate::error::{domain, Error, Result};
use crate::group::{Enumerated, GroupAdapter, DEFAULT_ELEMENT_BUDGET};
use crate::linear::{block_embed, SlGroup};
use crate::perm::{PermGroup, PermNorm};
use crate::scalar::{NormValue, Scalar};
use crate::Q;

/// Outcome of a finite check. `Inconclusive` means a budget or depth cap
/// stopped the search before it could decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => True,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Normal generation number `N(g, G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenNumber {
    Finite(usize),
    /// Not reached within the level budget; the true value is at least
    /// this.
    AtLeast(usize),
    /// The chain stabilized below `G`.
    Infinite,
}

impl GenNumber {
    pub fn finite(self) -> Option<usize> {
        match self {
            GenNumber::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            GenNumber::Finite(n) => serde_json::json!(n),
            GenNumber::AtLeast(n) => serde_json::json!({ "at_least": n }),
            GenNumber::Infinite => serde_json::json!("infinite"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Gen {
    elem: usize,
    sign: i8,
    conjugator: usize,
}

#[derive(Clone, Copy, Debug)]
struct ClassParent {
    from: u32,
    gen: u32,
    /// `rep(from) · gen`, the element of the reached class found first.
    hit: u32,
}

/// The chain `{e} = C_0 ⊆ C_1 ⊆ C_2 ⊆ …` for one base element, grown on
/// demand. `C_1` is `{e} ∪ g^G ∪ (g⁻¹)^G` and `C_{k+1} = C_k ∪ C_k·C_1`.
///
/// Every level is a union of conjugacy classes, and the classes met by
/// `K·C_1` are those of `rep(K)·C_1`, so the search runs over classes.
pub struct ConjBall<'a, 'g, G: GroupAdapter> {
    en: &'a Enumerated<'g, G>,
    base: usize,
    gens: Vec<Gen>,
    parent: Vec<Option<ClassParent>>,
    class_level: Vec<Option<usize>>,
    sets: Vec<FixedBitSet>,
    frontier: Vec<usize>,
    stable: bool,
}

impl<'a, 'g, G: GroupAdapter> ConjBall<'a, 'g, G> {
    pub fn new(en: &'a Enumerated<'g, G>, base: usize) -> Self {
        let mut gens: Vec<Gen> = Vec::new();
        let mut seen = en.empty_set();
        for (sign, x) in [(1i8, base), (-1i8, en.inv(base))] {
            for (elem, conjugator) in en.orbit(x) {
                if elem != en.identity() && !seen.put(elem) {
                    gens.push(Gen { elem, sign, conjugator });
                }
            }
        }
        gens.sort_by_key(|g| g.elem);
        let classes = en.classes();
        let e_class = classes.class_of[en.identity()];
        let mut class_level = vec![None; classes.members.len()];
        class_level[e_class] = Some(0);
        ConjBall {
            en,
            base,
            gens,
            parent: vec![None; classes.members.len()],
            class_level,
            sets: vec![en.set_of([en.identity()])],
            frontier: vec![e_class],
            stable: false,
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Highest level computed so far.
    pub fn depth(&self) -> usize {
        self.sets.len() - 1
    }

    /// Whether `C_{k+1} = C_k` at the last computed level.
    pub fn is_stable(&self) -> bool {
        self.stable
    }

    fn step(&mut self) {
        if self.stable {
            return;
        }
        let en = self.en;
        let classes = en.classes();
        let depth = self.depth();
        let reached = &self.class_level;
        let found: Vec<Vec<ClassParent>> = self
            .frontier
            .par_iter()
            .map(|&k| {
                let rep = classes.members[k][0];
                self.gens
                    .iter()
                    .enumerate()
                    .filter_map(|(gi, c)| {
                        let z = en.mul(rep, c.elem);
                        reached[classes.class_of[z]]
                            .is_none()
                            .then_some(ClassParent { from: k as u32, gen: gi as u32, hit: z as u32 })
                    })
                    .collect()
            })
            .collect();
        let mut next = self.sets.last().unwrap().clone();
        let mut new_frontier = Vec::new();
        for cp in found.into_iter().flatten() {
            let k = classes.class_of[cp.hit as usize];
            if self.class_level[k].is_none() {
                self.class_level[k] = Some(depth + 1);
                self.parent[k] = Some(cp);
                new_frontier.push(k);
                for &y in &classes.members[k] {
                    next.insert(y);
                }
            }
        }
        self.stable = new_frontier.is_empty();
        self.frontier = new_frontier;
        self.sets.push(next);
    }

    /// Computes levels up to `k` (fewer if the chain stabilizes first).
    pub fn grow_to(&mut self, k: usize) {
        while self.depth() < k && !self.stable {
            self.step();
        }
    }

    /// `C_k`; levels past stabilization equal the last one.
    pub fn level(&mut self, k: usize) -> &FixedBitSet {
        self.grow_to(k);
        let i = k.min(self.depth());
        &self.sets[i]
    }

    /// `C_k` without growing; `None` if not yet computed.
    pub fn computed_level(&self, k: usize) -> Option<&FixedBitSet> {
        if k <= self.depth() {
            Some(&self.sets[k])
        } else if self.stable {
            self.sets.last()
        } else {
            None
        }
    }

    /// Sizes `|C_0|, |C_1|, …` of the computed levels.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.count_ones(..)).collect()
    }

    /// Least `k` with `y ∈ C_k` among computed levels.
    pub fn level_of(&self, y: usize) -> Option<usize> {
        self.class_level[self.en.classes().class_of[y]]
    }

    /// Grows until `C_k = G`, the chain stabilizes, or `max_level` is hit.
    pub fn generation_number(&mut self, max_level: usize) -> GenNumber {
        let n = self.en.len();
        loop {
            if let Some(k) = self.sets.iter().position(|s| s.count_ones(..) == n) {
                return GenNumber::Finite(k);
            }
            if self.stable {
                return GenNumber::Infinite;
            }
            if self.depth() >= max_level {
                return GenNumber::AtLeast(max_level + 1);
            }
            self.step();
        }
    }

    /// Expresses `y` as a product of conjugates of `g^{±1}` of minimal
    /// length, if `y` is in a computed level.
    pub fn certificate(&self, y: usize) -> Option<ConjProductCert<G::Elem>> {
        self.level_of(y)?;
        let factors = self
            .factors(y)
            .into_iter()
            .map(|(sign, x)| Factor { sign, conjugator: self.en.elem(x).clone() })
            .collect();
        Some(ConjProductCert {
            base: self.en.elem(self.base).clone(),
            factors,
            claimed_product: self.en.elem(y).clone(),
        })
    }

    /// `(sign, conjugator)` pairs whose conjugates multiply to `y`.
    fn factors(&self, y: usize) -> Vec<(i8, usize)> {
        let en = self.en;
        if y == en.identity() {
            return vec![];
        }
        let classes = en.classes();
        let cp = self.parent[classes.class_of[y]].expect("reached class has a parent");
        let hit = cp.hit as usize;
        let h = if hit == y {
            en.identity()
        } else {
            let orbit = en.orbit(hit);
            orbit[orbit.binary_search_by_key(&y, |&(m, _)| m).expect("y is conjugate to hit")].1
        };
        // y = (rep · c)^h = rep^h · c^h
        let mut fs = self.factors(classes.members[cp.from as usize][0]);
        let c = self.gens[cp.gen as usize];
        fs.push((c.sign, c.conjugator));
        fs.into_iter().map(|(s, x)| (s, en.mul(x, h))).collect()
    }
}

/// `C_0, …, C_n` for `g`.
pub fn conj_ball<'a, 'g, G: GroupAdapter>(en: &'a Enumerated<'g, G>, g: usize, n: usize) -> ConjBall<'a, 'g, G> {
    let mut b = ConjBall::new(en, g);
    b.grow_to(n);
    b
}

pub fn normal_gen_number<G: GroupAdapter>(en: &Enumerated<'_, G>, g: usize) -> GenNumber {
    ConjBall::new(en, g).generation_number(en.len())
}

/// `N(g)` for every element, computed once per conjugacy class.
pub fn gen_numbers<G: GroupAdapter>(en: &Enumerated<'_, G>, max_level: usize) -> Vec<GenNumber> {
    let classes = en.classes();
    let per_class: Vec<GenNumber> = classes
        .members
        .par_iter()
        .map(|m| ConjBall::new(en, m[0]).generation_number(max_level))
        .collect();
    classes.class_of.iter().map(|&c| per_class[c]).collect()
}

/// `{x : ‖x‖ < t}` (strict) or `{x : ‖x‖ ≤ t}`.
pub fn ball<G: GroupAdapter>(en: &Enumerated<'_, G>, t: &Q, strict: bool) -> FixedBitSet {
    en.ball(t, strict)
}

/// The ball used to thicken a set. A radius of zero means no thickening.
pub fn thickening<G: GroupAdapter>(en: &Enumerated<'_, G>, eps: &Q, strict: bool) -> FixedBitSet {
    if *eps == Q::from_integer(0) {
        en.set_of([en.identity()])
    } else {
        en.ball(eps, strict)
    }
}

/// Witness attached to a failed check: the offending element and, for
/// per-element checks, the least element it fails to reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness<E> {
    pub element: E,
    pub uncovered: Option<E>,
}

#[derive(Clone, Debug)]
pub struct CoverageReport<E> {
    pub verdict: Verdict,
    pub witness: Option<Witness<E>>,
    /// Sizes of the sets built along the way (per level or per term).
    pub levels: Vec<usize>,
    pub certificate: Option<ConjProductCert<E>>,
}

fn least_missing(target: &FixedBitSet, covered: &FixedBitSet) -> Option<usize> {
    target.difference(covered).next()
}

/// Whether `G = ⋃ᵢ Xᵢ·B_{εᵢ}(e)`; on failure the least uncovered element.
pub fn check_thickened_cover<G: GroupAdapter>(
    en: &Enumerated<'_, G>,
    sets: &[FixedBitSet],
    eps: &[Q],
    strict: bool,
) -> Result<CoverageReport<G::Elem>> {
    if sets.len() != eps.len() {
        return domain(format!("{} sets but {} radii", sets.len(), eps.len()));
    }
    let mut covered = en.empty_set();
    let mut levels = Vec::with_capacity(sets.len());
    for (x, e) in sets.iter().zip(eps) {
        covered.union_with(&en.product_set(x, &thickening(en, e, strict)));
        levels.push(covered.count_ones(..));
    }
    let missing = least_missing(&en.full_set(), &covered);
    Ok(CoverageReport {
        verdict: Verdict::from_bool(missing.is_none()),
        witness: missing.map(|h| Witness { element: en.elem(h).clone(), uncovered: None }),
        levels,
        certificate: None,
    })
}

/// Options shared by the bigness and uniformity checks.
#[derive(Clone, Debug)]
pub struct CoverOptions {
    /// Balls are `‖x‖ < ε` when set, `‖x‖ ≤ ε` otherwise.
    pub strict: bool,
    /// Index of the conjugate ball paired with `ε₀`.
    pub start: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions { strict: true, start: 0 }
    }
}

fn check_positive(eps: &[Q]) -> Result<()> {
    if let Some(e) = eps.iter().find(|e| **e <= Q::from_integer(0)) {
        return domain(format!("ε = {e} is not positive"));
    }
    Ok(())
}

fn check_r_t(r: &Q, t: &Q) -> Result<()> {
    if !(*r > Q::from_integer(0) && t > r) {
        return domain(format!("need t > r > 0, got r = {r}, t = {t}"));
    }
    Ok(())
}

/// Whether `(ε₀, …, ε_N)` is `(r, t)`-big: for every `g` with `‖g‖ > r`,
/// `B_t(e) ⊆ ⋃ₙ C_{start+n}(g)·B_{εₙ}(e)`.
pub fn is_rt_big<G: GroupAdapter>(
    en: &Enumerated<'_, G>,
    eps: &[Q],
    r: &Q,
    t: &Q,
    opts: &CoverOptions,
) -> Result<CoverageReport<G::Elem>> {
    check_r_t(r, t)?;
    check_positive(eps)?;
    let target = en.ball(t, opts.strict);
    let thick: Vec<FixedBitSet> = eps.iter().map(|e| thickening(en, e, opts.strict)).collect();
    let reps: Vec<usize> = en
        .classes()
        .representatives()
        .filter(|&g| en.norm(g).cmp_threshold(r).is_gt())
        .collect();
    let results: Vec<(usize, Option<usize>, Vec<usize>)> = reps
        .par_iter()
        .map(|&g| {
            let mut cb = ConjBall::new(en, g);
            let mut covered = en.empty_set();
            let mut levels = Vec::with_capacity(eps.len());
            for (n, b) in thick.iter().enumerate() {
                covered.union_with(&en.product_set(cb.level(opts.start + n), b));
                levels.push(covered.count_ones(..));
            }
            (g, least_missing(&target, &covered), levels)
        })
        .collect();
    let failure = results.iter().filter(|(_, m, _)| m.is_some()).min_by_key(|(g, _, _)| *g);
    Ok(match failure {
        Some((g, Some(h), levels)) => CoverageReport {
            verdict: Verdict::False,
            witness: Some(Witness { element: en.elem(*g).clone(), uncovered: Some(en.elem(*h).clone()) }),
            levels: levels.clone(),
            certificate: None,
        },
        _ => CoverageReport {
            verdict: Verdict::True,
            witness: None,
            levels: results.iter().map(|(_, _, l)| *l.last().unwrap_or(&0)).collect(),
            certificate: None,
        },
    })
}

/// Per-group outcome of [`uniformity_scan`].
#[derive(Clone, Debug)]
pub struct GroupUniformity<E> {
    pub group: String,
    pub verdict: Verdict,
    /// Least `N` that works for every admissible `g` in this group.
    pub n: Option<usize>,
    /// The admissible `g` needing the largest `N`, or the counterexample.
    pub witness: Option<Witness<E>>,
    pub checked: usize,
}

#[derive(Clone, Debug)]
pub struct UniformityReport<E> {
    pub verdict: Verdict,
    pub n: Option<usize>,
    pub groups: Vec<GroupUniformity<E>>,
}

/// Least common `N` such that `B_t(e) ⊆ C_N(g)·B_ε(e)` for every `g` with
/// `r < ‖g‖ ≤ t` in every group of the family. `ε = 0` means no
/// thickening.
pub fn uniformity_scan<G: GroupAdapter>(
    family: &[Enumerated<'_, G>],
    r: &Q,
    t: &Q,
    eps: &Q,
    n_max: usize,
    strict: bool,
) -> Result<UniformityReport<G::Elem>> {
    check_r_t(r, t)?;
    if *eps < Q::from_integer(0) {
        return domain(format!("ε = {eps} is negative"));
    }
    let mut groups = Vec::new();
    for en in family {
        groups.push(uniformity_one(en, r, t, eps, n_max, strict));
    }
    let verdict = groups.iter().fold(Verdict::True, |v, g| v.and(g.verdict));
    let n = (verdict == Verdict::True).then(|| groups.iter().filter_map(|g| g.n).max().unwrap_or(0));
    Ok(UniformityReport { verdict, n, groups })
}

enum Need {
    Level(usize),
    Never(usize),
    Budget,
}

fn uniformity_one<G: GroupAdapter>(
    en: &Enumerated<'_, G>,
    r: &Q,
    t: &Q,
    eps: &Q,
    n_max: usize,
    strict: bool,
) -> GroupUniformity<G::Elem> {
    let target = en.ball(t, strict);
    let thick = thickening(en, eps, strict);
    let reps: Vec<usize> = en
        .classes()
        .representatives()
        .filter(|&g| en.norm(g).cmp_threshold(r).is_gt() && en.norm(g).cmp_threshold(t).is_le())
        .collect();
    let needs: Vec<(usize, Need)> = reps
        .par_iter()
        .map(|&g| {
            let mut cb = ConjBall::new(en, g);
            let mut k = 0;
            loop {
                let covered = en.product_set(cb.level(k), &thick);
                match least_missing(&target, &covered) {
                    None => return (g, Need::Level(k)),
                    Some(h) if cb.is_stable() && k >= cb.depth() => return (g, Need::Never(h)),
                    Some(_) if k >= n_max => return (g, Need::Budget),
                    Some(_) => k += 1,
                }
            }
        })
        .collect();
    let mut out = GroupUniformity { group: en.group().name(), verdict: Verdict::True, n: Some(0), witness: None, checked: reps.len() };
    if let Some((g, Need::Never(h))) = needs.iter().find(|(_, n)| matches!(n, Need::Never(_))) {
        out.verdict = Verdict::False;
        out.n = None;
        out.witness = Some(Witness { element: en.elem(*g).clone(), uncovered: Some(en.elem(*h).clone()) });
        return out;
    }
    if let Some((g, _)) = needs.iter().find(|(_, n)| matches!(n, Need::Budget)) {
        out.verdict = Verdict::Inconclusive;
        out.n = None;
        out.witness = Some(Witness { element: en.elem(*g).clone(), uncovered: None });
        return out;
    }
    let worst = needs
        .iter()
        .filter_map(|(g, n)| match n {
            Need::Level(k) => Some((*k, std::cmp::Reverse(*g))),
            _ => None,
        })
        .max();
    if let Some((k, std::cmp::Reverse(g))) = worst {
        out.n = Some(k);
        out.witness = Some(Witness { element: en.elem(g).clone(), uncovered: None });
    }
    out
}

/// Clause (1) of the star property for one group: the least `N(g)`.
#[derive(Clone, Debug)]
pub struct StarClauseOne<E> {
    pub group: String,
    pub n: GenNumber,
    pub witness: Option<E>,
}

/// Clause (2) for one threshold `k`.
#[derive(Clone, Debug)]
pub struct StarClauseTwo<E> {
    pub k: usize,
    /// Least `l` such that `N(g), N(h) ≥ l` forces `N(gh) ≥ k`; `None`
    /// when no finite `l` works.
    pub l: Option<usize>,
    /// `l` exceeds every finite `N(g)`, so the implication has no
    /// instances.
    pub vacuous: bool,
    /// The pair forcing `l` up (largest `min(N(g), N(h))` with
    /// `N(gh) < k`).
    pub witness: Option<(E, E)>,
}

#[derive(Clone, Debug)]
pub struct StarReport<E> {
    pub verdict: Verdict,
    pub clause_one: Vec<StarClauseOne<E>>,
    pub common_n: Option<usize>,
    pub clause_two: Vec<StarClauseTwo<E>>,
    pub max_finite_n: usize,
}

pub fn star_scan<G: GroupAdapter>(
    family: &[Enumerated<'_, G>],
    n_max: usize,
    k_list: &[usize],
) -> StarReport<G::Elem> {
    let numbers: Vec<Vec<GenNumber>> = family.iter().map(|en| gen_numbers(en, n_max)).collect();
    let mut clause_one = Vec::new();
    let mut verdict = Verdict::True;
    let mut common = Some(0usize);
    for (en, ns) in family.iter().zip(&numbers) {
        let best = (0..en.len())
            .filter(|&i| i != en.identity() || en.len() == 1)
            .min_by_key(|&i| (ns[i], i));
        let n = best.map(|i| ns[i]).unwrap_or(GenNumber::Finite(0));
        match n {
            GenNumber::Finite(k) => common = common.map(|c| c.max(k)),
            GenNumber::AtLeast(_) => {
                verdict = verdict.and(Verdict::Inconclusive);
                common = None;
            }
            GenNumber::Infinite => {
                verdict = Verdict::False;
                common = None;
            }
        }
        clause_one.push(StarClauseOne { group: en.group().name(), n, witness: best.map(|i| en.elem(i).clone()) });
    }
    let max_finite_n = numbers.iter().flatten().filter_map(|n| n.finite()).max().unwrap_or(0);
    let undecided = numbers.iter().flatten().any(|n| matches!(n, GenNumber::AtLeast(_)));

    let mut clause_two = Vec::new();
    for &k in k_list {
        // Bad pairs have N(gh) < k; l must exceed min(N(g), N(h)) for each.
        let mut worst: Option<(GenNumber, usize, usize, usize)> = None;
        for (gi, (en, ns)) in family.iter().zip(&numbers).enumerate() {
            for g in en.classes().representatives() {
                for h in 0..en.len() {
                    let bad = match ns[en.mul(g, h)] {
                        GenNumber::Finite(v) => v < k,
                        _ => false,
                    };
                    if bad {
                        let m = ns[g].min(ns[h]);
                        if worst.map_or(true, |w| m > w.0) {
                            worst = Some((m, gi, g, h));
                        }
                    }
                }
            }
        }
        let (l, witness) = match worst {
            None => (Some(0), None),
            Some((m, gi, g, h)) => {
                let en = &family[gi];
                let pair = Some((en.elem(g).clone(), en.elem(h).clone()));
                match m {
                    GenNumber::Finite(v) => (Some(v + 1), pair),
                    _ => (None, pair),
                }
            }
        };
        if l.is_none() {
            verdict = Verdict::False;
        }
        let vacuous = l.is_some_and(|l| l > max_finite_n) && !undecided;
        clause_two.push(StarClauseTwo { k, l, vacuous, witness });
    }
    StarReport { verdict, clause_one, common_n: common, clause_two, max_finite_n }
}

/// `[a, b] = a⁻¹ b⁻¹ a b`
pub fn commutator<G: GroupAdapter>(en: &Enumerated<'_, G>, a: usize, b: usize) -> usize {
    en.mul(en.mul(en.inv(a), en.inv(b)), en.mul(a, b))
}

fn commutator_set<G: GroupAdapter>(en: &Enumerated<'_, G>) -> FixedBitSet {
    let parts: Vec<FixedBitSet> = (0..en.len())
        .into_par_iter()
        .map(|a| en.set_of((0..en.len()).map(|b| commutator(en, a, b))))
        .collect();
    let mut all = en.empty_set();
    for p in parts {
        all.union_with(&p);
    }
    all
}

/// Subgroup generated by a set.
pub fn generated_subgroup<G: GroupAdapter>(en: &Enumerated<'_, G>, gens: &FixedBitSet) -> FixedBitSet {
    let gens: Vec<usize> = gens.ones().collect();
    let mut seen = en.set_of([en.identity()]);
    let mut stack = vec![en.identity()];
    while let Some(x) = stack.pop() {
        for &s in &gens {
            let y = en.mul(x, s);
            if !seen.put(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// `[G, G]`
pub fn derived_subgroup<G: GroupAdapter>(en: &Enumerated<'_, G>) -> FixedBitSet {
    generated_subgroup(en, &commutator_set(en))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutatorWidth {
    Width(usize),
    NotPerfect,
}

/// Least `w` such that every element is a product of `w` commutators.
pub fn commutator_width<G: GroupAdapter>(en: &Enumerated<'_, G>) -> CommutatorWidth {
    let comms = commutator_set(en);
    if generated_subgroup(en, &comms).count_ones(..) != en.len() {
        return CommutatorWidth::NotPerfect;
    }
    let mut cur = en.set_of([en.identity()]);
    let mut w = 0;
    while cur.count_ones(..) != en.len() {
        cur = en.product_set(&cur, &comms);
        w += 1;
    }
    CommutatorWidth::Width(w)
}

/// `{g : ‖g^m‖ ≤ ε}`
pub fn eps_torsion_check<G: GroupAdapter>(en: &Enumerated<'_, G>, m: u64, eps: &Q) -> FixedBitSet {
    en.set_of((0..en.len()).filter(|&g| en.norm(en.pow(g, m)).cmp_threshold(eps).is_le()))
}

/// Whether every `g` has some `1 ≤ m ≤ n` with `‖g^m‖ < ε`; on failure the
/// least `g` without one.
pub fn almost_uniform_check<G: GroupAdapter>(en: &Enumerated<'_, G>, eps: &Q, n: u64) -> (bool, Option<usize>) {
    let bad = (0..en.len()).find(|&g| {
        let mut x = g;
        for _ in 0..n {
            if en.norm(x).cmp_threshold(eps).is_lt() {
                return false;
            }
            x = en.mul(x, g);
        }
        true
    });
    (bad.is_none(), bad)
}

/// Checks `C_n(h) ⊆ C_n(g)·B_{nε}(e)` for `ε > ‖g⁻¹h‖`. A radius of zero
/// (`n = 0`) is read as the closed ball `{e}`.
pub fn perturbation_check<G: GroupAdapter>(
    en: &Enumerated<'_, G>,
    g: usize,
    h: usize,
    n: usize,
    eps: &Q,
    strict: bool,
) -> Result<CoverageReport<G::Elem>> {
    let d = en.mul(en.inv(g), h);
    if !en.norm(d).cmp_threshold(eps).is_lt() {
        return domain(format!("ε = {eps} does not exceed ‖g⁻¹h‖ = {}", en.norm(d).to_decimal()));
    }
    let radius = eps * Q::from_integer(n as i64);
    let mut cg = ConjBall::new(en, g);
    let mut ch = ConjBall::new(en, h);
    let thick = en.product_set(cg.level(n), &thickening(en, &radius, strict));
    let missing = least_missing(ch.level(n), &thick);
    Ok(CoverageReport {
        verdict: Verdict::from_bool(missing.is_none()),
        witness: missing.map(|y| Witness { element: en.elem(y).clone(), uncovered: None }),
        levels: vec![ch.level(n).count_ones(..), thick.count_ones(..)],
        certificate: missing.and_then(|y| ch.certificate(y)),
    })
}

/// The sets `X_0, X_1, …` a sequence tree is built over.
#[derive(Clone, Debug)]
pub enum SetFamily {
    /// Sequences are limited to the length of the list.
    Explicit(Vec<FixedBitSet>),
    /// `X_m = C_m(g)`.
    ConjBalls(usize),
}

#[derive(Clone, Debug)]
pub struct TreeRankReport {
    pub verdict: Verdict,
    /// Maximal length of a small sequence (`None` if the depth cap bound).
    pub rank: Option<usize>,
    /// A longest small sequence found, or the capped path.
    pub path: Vec<Q>,
    pub nodes: usize,
}

/// Explores all non-increasing sequences over `grid` that are small, i.e.
/// `G ≠ ⋃ᵢ Xᵢ·B_{εᵢ}(e)`. The rank is the maximal length of a small
/// sequence; if a small sequence of length `depth_cap` exists the result is
/// inconclusive and carries it.
pub fn tree_rank<G: GroupAdapter>(
    en: &Enumerated<'_, G>,
    family: &SetFamily,
    grid: &[Q],
    depth_cap: usize,
    strict: bool,
) -> Result<TreeRankReport> {
    check_positive(grid)?;
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| b.cmp(a));
    grid.dedup();
    let mut cb = match family {
        SetFamily::ConjBalls(g) => Some(ConjBall::new(en, *g)),
        SetFamily::Explicit(_) => None,
    };
    let max_len = match family {
        SetFamily::Explicit(sets) => sets.len().min(depth_cap),
        SetFamily::ConjBalls(_) => depth_cap,
    };
    let mut xs: Vec<FixedBitSet> = Vec::new();
    for m in 0..max_len {
        xs.push(match (family, cb.as_mut()) {
            (SetFamily::Explicit(sets), _) => sets[m].clone(),
            (_, Some(cb)) => cb.level(m).clone(),
            _ => unreachable!(),
        });
    }
    let balls: Vec<FixedBitSet> = grid.iter().map(|e| thickening(en, e, strict)).collect();
    let mut memo: HashMap<(usize, usize), FixedBitSet> = HashMap::new();
    let full = en.len();

    struct Search<'s> {
        best: Vec<usize>,
        capped: Option<Vec<usize>>,
        nodes: usize,
        path: Vec<usize>,
        xs: &'s [FixedBitSet],
    }
    fn dfs<G: GroupAdapter>(
        s: &mut Search<'_>,
        en: &Enumerated<'_, G>,
        balls: &[FixedBitSet],
        memo: &mut HashMap<(usize, usize), FixedBitSet>,
        covered: &FixedBitSet,
        min_idx: usize,
        max_len: usize,
        depth_cap: usize,
        full: usize,
    ) {
        s.nodes += 1;
        if s.path.len() > s.best.len() {
            s.best = s.path.clone();
        }
        if s.path.len() == depth_cap {
            s.capped.get_or_insert_with(|| s.path.clone());
            return;
        }
        if s.path.len() >= max_len || s.capped.is_some() {
            return;
        }
        let m = s.path.len();
        // Non-increasing: the next radius is no larger than the last one.
        for gi in min_idx..balls.len() {
            let xb = memo
                .entry((m, gi))
                .or_insert_with(|| en.product_set(&s.xs[m], &balls[gi]))
                .clone();
            let mut next = covered.clone();
            next.union_with(&xb);
            if next.count_ones(..) == full {
                continue;
            }
            s.path.push(gi);
            dfs(s, en, balls, memo, &next, gi, max_len, depth_cap, full);
            s.path.pop();
        }
    }

    let mut s = Search { best: vec![], capped: None, nodes: 0, path: vec![], xs: &xs };
    dfs(&mut s, en, &balls, &mut memo, &en.empty_set(), 0, max_len, depth_cap, full);
    let to_q = |p: &[usize]| p.iter().map(|&i| grid[i]).collect::<Vec<_>>();
    Ok(match s.capped {
        Some(path) => TreeRankReport { verdict: Verdict::Inconclusive, rank: None, path: to_q(&path), nodes: s.nodes },
        None => TreeRankReport { verdict: Verdict::True, rank: Some(s.best.len()), path: to_q(&s.best), nodes: s.nodes },
    })
}

/// A chain of groups `G_0 → G_1 → …` with embeddings `f_{i,j}`.
pub trait DirectSystem: Sync {
    type Stage: GroupAdapter;

    fn name(&self) -> String;
    fn stages(&self) -> &[Self::Stage];
    /// `f_{i,j}(x)` for `i ≤ j`.
    fn embed(&self, i: usize, j: usize, x: &<Self::Stage as GroupAdapter>::Elem)
        -> Result<<Self::Stage as GroupAdapter>::Elem>;
}

/// `SL_{d_0}(F_p) → SL_{d_1}(F_p) → …` by block-diagonal copies.
pub struct SlChain<T: Scalar = i64> {
    stages: Vec<SlGroup<T>>,
}

impl<T: Scalar> SlChain<T> {
    pub fn new(p: u32, dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return domain("a direct system needs at least one stage");
        }
        for w in dims.windows(2) {
            if w[0] == 0 || w[1] % w[0] != 0 {
                return domain(format!("{} does not divide {}", w[0], w[1]));
            }
        }
        Ok(SlChain { stages: dims.iter().map(|&d| SlGroup::new(d, p)).collect::<Result<_>>()? })
    }
}

impl<T: Scalar> DirectSystem for SlChain<T> {
    type Stage = SlGroup<T>;

    fn name(&self) -> String {
        self.stages.iter().map(|s| s.name()).collect::<Vec<_>>().join(" -> ")
    }
    fn stages(&self) -> &[SlGroup<T>] {
        &self.stages
    }
    fn embed(&self, i: usize, j: usize, x: &crate::linear::MatFp) -> Result<crate::linear::MatFp> {
        if i > j || j >= self.stages.len() {
            return domain(format!("no embedding from stage {i} to stage {j}"));
        }
        block_embed(x, self.stages[j].dim())
    }
}

/// `S_{n_0} ⊂ S_{n_1} ⊂ …` by fixing the added points.
pub struct SymChain<T: Scalar = i64> {
    stages: Vec<PermGroup<T>>,
}

impl<T: Scalar> SymChain<T> {
    pub fn new(degrees: &[usize], alternating: bool, norm: PermNorm) -> Result<Self> {
        if degrees.is_empty() {
            return domain("a direct system needs at least one stage");
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return domain("degrees must be non-decreasing");
        }
        Ok(SymChain { stages: degrees.iter().map(|&n| PermGroup::new(n, alternating, norm)).collect() })
    }
}

impl<T: Scalar> DirectSystem for SymChain<T> {
    type Stage = PermGroup<T>;

    fn name(&self) -> String {
        self.stages.iter().map(|s| s.name()).collect::<Vec<_>>().join(" -> ")
    }
    fn stages(&self) -> &[PermGroup<T>] {
        &self.stages
    }
    fn embed(&self, i: usize, j: usize, x: &crate::perm::Perm) -> Result<crate::perm::Perm> {
        if i > j || j >= self.stages.len() {
            return domain(format!("no embedding from stage {i} to stage {j}"));
        }
        x.extend(self.stages[j].degree())
    }
}

/// One verified membership `f_{j,k}(h) ∈ C_N(f_{i,k}(g), G_k)`.
#[derive(Clone, Debug)]
pub struct DirectLimitSample<E> {
    pub g_stage: usize,
    pub g: E,
    pub h_stage: usize,
    pub h: E,
    /// Stage where membership was found, if any.
    pub stage: Option<usize>,
    pub certificate: Option<ConjProductCert<E>>,
}

#[derive(Clone, Debug)]
pub struct DirectLimitReport<E> {
    pub verdict: Verdict,
    pub samples: Vec<DirectLimitSample<E>>,
    pub witness: Option<(E, E)>,
}

#[derive(Clone, Debug)]
pub struct DirectLimitParams {
    pub r: Q,
    pub t: Q,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub budget: usize,
}

/// Checks on random pairs `(g, h)` with `‖g‖ > r` and `‖h‖ < t` that
/// `f_{j,k}(h) ∈ C_N(f_{i,k}(g), G_k)` at some stage `k`. Embeddings are
/// first checked to be isometric homomorphisms on the same kind of
/// samples.
pub fn direct_limit_check<S: DirectSystem>(
    system: &S,
    params: &DirectLimitParams,
) -> Result<DirectLimitReport<<S::Stage as GroupAdapter>::Elem>> {
    type E<S> = <<S as DirectSystem>::Stage as GroupAdapter>::Elem;
    let stages = system.stages();
    let last = stages.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for i in 0..=last {
        for j in i + 1..=last {
            for _ in 0..params.samples.min(64) {
                let x = stages[i].random_word(&mut rng, 24);
                let y = stages[i].random_word(&mut rng, 24);
                let (fx, fy) = (system.embed(i, j, &x)?, system.embed(i, j, &y)?);
                if stages[j].norm(&fx) != stages[i].norm(&x) {
                    return Err(Error::Precondition(format!(
                        "embedding {} -> {} is not isometric at {x:?}",
                        stages[i].name(),
                        stages[j].name()
                    )));
                }
                let fxy = system.embed(i, j, &stages[i].multiply(&x, &y))?;
                if fxy != stages[j].multiply(&fx, &fy) {
                    return Err(Error::Precondition(format!(
                        "embedding {} -> {} is not a homomorphism at ({x:?}, {y:?})",
                        stages[i].name(),
                        stages[j].name()
                    )));
                }
            }
        }
    }

    let enums: Vec<Enumerated<'_, S::Stage>> = stages
        .iter()
        .map(|s| Enumerated::with_budget(s, params.budget))
        .collect::<Result<_>>()?;

    let pick = |rng: &mut ChaCha8Rng, pred: &dyn Fn(&S::Stage, &E<S>) -> bool| -> Option<(usize, E<S>)> {
        for _ in 0..1000 {
            let i = rng.gen_range(0..=last);
            let x = enums[i].elem(rng.gen_range(0..enums[i].len())).clone();
            if pred(&stages[i], &x) {
                return Some((i, x));
            }
        }
        None
    };
    let mut balls: HashMap<(usize, E<S>), ConjBall<'_, '_, S::Stage>> = HashMap::new();
    let mut samples = Vec::new();
    let mut verdict = Verdict::True;
    let mut witness = None;
    for _ in 0..params.samples {
        let Some((gi, g)) = pick(&mut rng, &|s, x| s.norm(x).cmp_threshold(&params.r).is_gt()) else {
            verdict = verdict.and(Verdict::Inconclusive);
            break;
        };
        let Some((hi, h)) = pick(&mut rng, &|s, x| s.norm(x).cmp_threshold(&params.t).is_lt()) else {
            verdict = verdict.and(Verdict::Inconclusive);
            break;
        };
        let mut found = None;
        for k in gi.max(hi)..=last {
            let (fg, fh) = (system.embed(gi, k, &g)?, system.embed(hi, k, &h)?);
            let en = &enums[k];
            let gk = en.index_of(&fg).expect("embedded element lies in the stage");
            let hk = en.index_of(&fh).expect("embedded element lies in the stage");
            let cb = balls.entry((k, fg)).or_insert_with(|| ConjBall::new(en, gk));
            cb.grow_to(params.n);
            if cb.computed_level(params.n).is_some_and(|s| s.contains(hk)) {
                found = Some((k, cb.certificate(hk).expect("member of a computed level")));
                break;
            }
        }
        if found.is_none() && witness.is_none() {
            witness = Some((g.clone(), h.clone()));
            verdict = Verdict::False;
        }
        samples.push(DirectLimitSample {
            g_stage: gi,
            g,
            h_stage: hi,
            h,
            stage: found.as_ref().map(|f| f.0),
            certificate: found.map(|f| f.1),
        });
    }
    Ok(DirectLimitReport { verdict, samples, witness })
}

/// Convenience: the default element budget for stage enumeration.
pub fn default_direct_limit_params(r: Q, t: Q, n: usize, samples: usize, seed: u64) -> DirectLimitParams {
    DirectLimitParams { r, t, n, samples, seed, budget: DEFAULT_ELEMENT_BUDGET }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::SymGroup;
    use std::collections::HashSet;

    fn q(p: i64, d: i64) -> Q {
        Q::new(p, d)
    }

    fn idx(en: &Enumerated<'_, SymGroup>, s: &str) -> usize {
        let n = en.group().degree();
        en.index_of(&Perm::parse(s, Some(n)).unwrap()).unwrap()
    }

    fn normalized(n: usize, alt: bool) -> SymGroup {
        SymGroup::new(n, alt, PermNorm::HammingNormalized)
    }

    #[test]
    fn conj_ball_examples() {
        let a4 = SymGroup::alternating(4);
        let en = Enumerated::new(&a4).unwrap();
        let mut cb = conj_ball(&en, en.identity(), 3);
        assert_eq!(cb.level(3).count_ones(..), 1);
        assert_eq!(normal_gen_number(&en, en.identity()), GenNumber::Infinite);

        let g = idx(&en, "(1 2 3)");
        let mut cb = conj_ball(&en, g, 2);
        assert_eq!(cb.level(1).count_ones(..), 9);
        assert_eq!(cb.level(2).count_ones(..), 12);
        assert_eq!(normal_gen_number(&en, g), GenNumber::Finite(2));

        let v = idx(&en, "(1 2)(3 4)");
        assert_eq!(normal_gen_number(&en, v), GenNumber::Infinite);
        let mut cb = conj_ball(&en, v, 5);
        assert_eq!(cb.level(5).count_ones(..), 4);

        let s3 = SymGroup::symmetric(3);
        let en = Enumerated::new(&s3).unwrap();
        let mut cb = conj_ball(&en, idx(&en, "(1 2 3)"), 6);
        for k in 2..=6 {
            assert_eq!(cb.level(k).count_ones(..), 3);
        }
        assert_eq!(normal_gen_number(&Enumerated::new(&SymGroup::symmetric(1)).unwrap(), 0), GenNumber::Finite(0));
    }

    #[test]
    fn certificates_replay() {
        let a5 = SymGroup::alternating(5);
        let en = Enumerated::new(&a5).unwrap();
        let g = idx(&en, "(1 2 3)");
        let cb = conj_ball(&en, g, 10);
        for y in 0..en.len() {
            let c = cb.certificate(y).unwrap();
            assert!(c.replay(&a5));
            assert_eq!(c.len(), cb.level_of(y).unwrap());
        }
    }

    /// Products of at most `n` elements of `{x⁻¹ g^{±1} x : x ∈ G} ∪ {e}`,
    /// by direct multiplication of permutations.
    fn naive_conj_ball(group: &SymGroup, g: &Perm, n: usize) -> Vec<HashSet<Perm>> {
        let all = group.enumerate(usize::MAX).unwrap();
        let mut c1: HashSet<Perm> = HashSet::from([group.identity()]);
        for x in &all {
            c1.insert(g.conj(x));
            c1.insert(g.inverse().conj(x));
        }
        let mut levels = vec![HashSet::from([group.identity()])];
        for _ in 0..n {
            let prev = levels.last().unwrap();
            let mut next = HashSet::new();
            for a in prev {
                for b in &c1 {
                    next.insert(a.then(b));
                }
            }
            levels.push(next);
        }
        levels
    }

    #[test]
    fn matches_naive_oracle_on_small_groups() {
        for group in [SymGroup::alternating(4), SymGroup::symmetric(4)] {
            let en = Enumerated::new(&group).unwrap();
            for g in 0..en.len() {
                let naive = naive_conj_ball(&group, en.elem(g), 4);
                let mut cb = ConjBall::new(&en, g);
                for (k, set) in naive.iter().enumerate() {
                    let ours: HashSet<Perm> = cb.level(k).ones().map(|i| en.elem(i).clone()).collect();
                    assert_eq!(&ours, set, "{} level {k}", en.elem(g));
                }
            }
        }
    }

    #[test]
    fn chain_properties() {
        for group in [SymGroup::alternating(4), SymGroup::symmetric(4)] {
            let en = Enumerated::new(&group).unwrap();
            for g in 0..en.len() {
                let mut cb = ConjBall::new(&en, g);
                for k in 0..4 {
                    let a = cb.level(k).clone();
                    let b = cb.level(k + 1).clone();
                    assert!(a.is_subset(&b));
                    assert_eq!(en.set_of(a.ones().map(|x| en.inv(x))), a);
                    for h in en.generators() {
                        assert_eq!(en.set_of(a.ones().map(|x| en.conj(x, *h))), a);
                    }
                }
                let n = normal_gen_number(&en, g);
                for (y, _) in en.orbit(g) {
                    assert_eq!(normal_gen_number(&en, y), n);
                }
            }
        }
    }

    #[test]
    fn balls_on_s3() {
        let g = normalized(3, false);
        let en = Enumerated::new(&g).unwrap();
        assert_eq!(ball(&en, &q(0, 1), true).count_ones(..), 0);
        assert_eq!(ball(&en, &q(0, 1), false).count_ones(..), 1);
        let b = ball(&en, &q(9, 10), true);
        assert_eq!(b.count_ones(..), 4);
        assert!(b.ones().all(|i| en.elem(i).hamming() != 3));
        assert_eq!(ball(&en, &q(2, 1), true).count_ones(..), 6);
    }

    #[test]
    fn thickened_cover_examples() {
        let g = normalized(3, false);
        let en = Enumerated::new(&g).unwrap();
        let e = en.set_of([en.identity()]);
        let r = check_thickened_cover(&en, &[en.full_set()], &[q(1, 100)], true).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        let r = check_thickened_cover(&en, &[e.clone()], &[q(7, 10)], true).unwrap();
        assert_eq!(r.verdict, Verdict::False);
        assert_eq!(r.witness.unwrap().element, Perm::parse("(1 2 3)", Some(3)).unwrap());
        let three = en.set_of((0..6).filter(|&i| en.elem(i).hamming() == 3));
        let r = check_thickened_cover(&en, &[e.clone(), three], &[q(7, 10), q(1, 10)], true).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!(check_thickened_cover(&en, &[e], &[], true).is_err());
    }

    #[test]
    fn bigness_examples() {
        let g = normalized(3, false);
        let en = Enumerated::new(&g).unwrap();
        let opts = CoverOptions::default();
        for len in [1, 3, 8] {
            let r = is_rt_big(&en, &vec![q(1, 10); len], &q(9, 10), &q(101, 100), &opts).unwrap();
            assert_eq!(r.verdict, Verdict::False);
            let w = r.witness.unwrap();
            assert_eq!(w.element.hamming(), 3);
        }
        let r = is_rt_big(&en, &[q(2, 1)], &q(1, 10), &q(101, 100), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!(is_rt_big(&en, &[q(1, 2)], &q(1, 2), &q(1, 2), &opts).is_err());
        assert!(is_rt_big(&en, &[q(0, 1)], &q(1, 2), &q(1, 1), &opts).is_err());
    }

    #[test]
    fn bigness_is_monotone() {
        let g = normalized(4, true);
        let en = Enumerated::new(&g).unwrap();
        let opts = CoverOptions::default();
        let t = q(101, 100);
        let radii = [q(1, 4), q(1, 2), q(3, 4), q(1, 1)];
        for &a in &radii {
            for &b in &radii {
                for r in [q(1, 4), q(1, 2), q(3, 4)] {
                    let base = is_rt_big(&en, &[a, b], &r, &t, &opts).unwrap().verdict;
                    if base == Verdict::True {
                        let longer = is_rt_big(&en, &[a, b, q(1, 8)], &r, &t, &opts).unwrap().verdict;
                        assert_eq!(longer, Verdict::True);
                        let wider = is_rt_big(&en, &[a.max(q(1, 2)), b], &r, &t, &opts).unwrap().verdict;
                        assert_eq!(wider, Verdict::True);
                        let higher = is_rt_big(&en, &[a, b], &(r + q(1, 8)), &t, &opts).unwrap().verdict;
                        assert_eq!(higher, Verdict::True);
                    }
                }
            }
        }
    }

    #[test]
    fn uniformity_examples() {
        let s3 = normalized(3, false);
        let en = Enumerated::new(&s3).unwrap();
        let r = uniformity_scan(&[en], &q(9, 10), &q(101, 100), &q(0, 1), 50, true).unwrap();
        assert_eq!(r.verdict, Verdict::False);
        assert_eq!(r.groups[0].witness.as_ref().unwrap().element.hamming(), 3);

        let s1 = normalized(1, false);
        let en = Enumerated::new(&s1).unwrap();
        let r = uniformity_scan(&[en], &q(1, 2), &q(1, 1), &q(0, 1), 5, true).unwrap();
        assert_eq!((r.verdict, r.n), (Verdict::True, Some(0)));

        let a5 = normalized(5, true);
        let en = Enumerated::new(&a5).unwrap();
        let r = uniformity_scan(&[en], &q(1, 2), &q(101, 100), &q(0, 1), 50, true).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!(r.n.unwrap() <= 24);

        let en = Enumerated::new(&a5).unwrap();
        let r = uniformity_scan(&[en], &q(1, 2), &q(101, 100), &q(0, 1), 1, true).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn star_examples() {
        let a4 = SymGroup::alternating(4);
        let r = star_scan(&[Enumerated::new(&a4).unwrap()], 20, &[]);
        assert_eq!(r.clause_one[0].n, GenNumber::Finite(2));
        assert_eq!(r.clause_one[0].witness.as_ref().unwrap().cycle_type(), vec![1, 3]);

        let a5 = SymGroup::alternating(5);
        let a6 = SymGroup::alternating(6);
        let fam = [Enumerated::new(&a5).unwrap(), Enumerated::new(&a6).unwrap()];
        let r = star_scan(&fam, 20, &[3]);
        assert!(r.common_n.unwrap() <= 4);
        assert_eq!(r.verdict, Verdict::True);

        let fam = [Enumerated::new(&a5).unwrap()];
        let r = star_scan(&fam, 20, &[3]);
        let c = &r.clause_two[0];
        // Brute-force the clause: every l above the reported one holds,
        // and the reported one is least.
        let en = &fam[0];
        let ns: Vec<GenNumber> = (0..en.len()).map(|i| normal_gen_number(en, i)).collect();
        let ge = |n: GenNumber, l: usize| n.finite().map_or(true, |v| v >= l);
        let holds = |l: usize| {
            (0..en.len()).all(|g| {
                (0..en.len()).all(|h| !(ge(ns[g], l) && ge(ns[h], l)) || ge(ns[en.mul(g, h)], 3))
            })
        };
        let l = c.l.unwrap();
        assert!(holds(l));
        assert!(l == 0 || !holds(l - 1));
        assert_eq!(c.vacuous, l > r.max_finite_n);
    }

    #[test]
    fn derived_subgroups_and_width() {
        for n in 3..=5 {
            let s = SymGroup::symmetric(n);
            let en = Enumerated::new(&s).unwrap();
            let d = derived_subgroup(&en);
            assert_eq!(d, en.set_of((0..en.len()).filter(|&i| en.elem(i).is_even())));
        }
        let a5 = SymGroup::alternating(5);
        let en = Enumerated::new(&a5).unwrap();
        assert_eq!(commutator_width(&en), CommutatorWidth::Width(1));
        let z4 = crate::LeeGroup::new(4).unwrap();
        assert_eq!(commutator_width(&Enumerated::new(&z4).unwrap()), CommutatorWidth::NotPerfect);
    }

    #[test]
    fn torsion_examples() {
        let s4 = normalized(4, false);
        let en = Enumerated::new(&s4).unwrap();
        assert_eq!(eps_torsion_check(&en, 1, &q(0, 1)), en.set_of([en.identity()]));
        assert!(almost_uniform_check(&en, &q(1, 10), 12).0);
        assert!(!almost_uniform_check(&en, &q(1, 10), 1).0);

        let z8 = crate::LeeGroup::new(8).unwrap();
        let en = Enumerated::new(&z8).unwrap();
        let t = eps_torsion_check(&en, 2, &q(1, 2));
        let t: Vec<u64> = t.ones().map(|i| *en.elem(i)).collect();
        assert_eq!(t, vec![0, 1, 3, 4, 5, 7]);
    }

    #[test]
    fn perturbation_examples() {
        let s5 = normalized(5, false);
        let en = Enumerated::new(&s5).unwrap();
        let (g, h) = (idx(&en, "(1 2 3)"), idx(&en, "(1 2 4)"));
        let r = perturbation_check(&en, g, h, 2, &q(4, 5), true).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        for n in 0..=3 {
            assert_eq!(perturbation_check(&en, g, g, n, &q(1, 10), true).unwrap().verdict, Verdict::True);
        }
        assert!(perturbation_check(&en, g, h, 2, &q(3, 5), true).is_err());
    }

    #[test]
    fn tree_rank_examples() {
        let s3 = normalized(3, false);
        let en = Enumerated::new(&s3).unwrap();
        let r = tree_rank(&en, &SetFamily::ConjBalls(idx(&en, "(1 2)")), &[q(1, 5)], 10, true).unwrap();
        assert_eq!((r.verdict, r.rank), (Verdict::True, Some(2)));
        let r = tree_rank(&en, &SetFamily::Explicit(vec![en.full_set(); 3]), &[q(1, 5), q(1, 2)], 10, true).unwrap();
        assert_eq!(r.rank, Some(0));
        let r = tree_rank(&en, &SetFamily::ConjBalls(idx(&en, "(1 2 3)")), &[q(1, 5)], 6, true).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.path.len(), 6);
    }

    #[test]
    fn direct_limits() {
        let sys = SlChain::<i64>::new(2, &[2, 4]).unwrap();
        let params = default_direct_limit_params(q(1, 4), q(101, 100), 8, 6, 3);
        let r = direct_limit_check(&sys, &params).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        for s in &r.samples {
            assert!(s.certificate.as_ref().unwrap().replay(&sys.stages()[s.stage.unwrap()]));
        }

        let sys = SymChain::<i64>::new(&[5, 10], false, PermNorm::HammingNormalized).unwrap();
        let params = default_direct_limit_params(q(1, 4), q(1, 1), 4, 4, 3);
        assert!(matches!(direct_limit_check(&sys, &params), Err(Error::Precondition(_))));

        let sys = SymChain::<i64>::new(&[5, 6], true, PermNorm::Hamming).unwrap();
        let params = default_direct_limit_params(q(1, 1), q(100, 1), 6, 4, 9);
        assert_eq!(direct_limit_check(&sys, &params).unwrap().verdict, Verdict::True);
    }
}
