//! Uniform handle on a finite normed group and its indexed enumeration.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::NormValue;
use crate::Q;

/// Default cap on the number of elements an exhaustive routine may touch.
pub const DEFAULT_ELEMENT_BUDGET: usize = 1_000_000;

/// A group together with a norm. Multiplication follows whatever
/// convention the concrete group documents; all generic code only relies
/// on associativity.
pub trait GroupAdapter: Send + Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;
    type Value: NormValue;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn norm(&self, a: &Self::Elem) -> Self::Value;
    fn generators(&self) -> Vec<Self::Elem>;

    /// Every element exactly once. Groups that cannot be listed, or whose
    /// order exceeds `budget`, return a capability error.
    fn enumerate(&self, budget: usize) -> Result<Vec<Self::Elem>> {
        let _ = budget;
        Err(Error::Capability(format!("{} is not enumerable", self.name())))
    }

    /// Stable JSON encoding of an element.
    fn encode(&self, a: &Self::Elem) -> serde_json::Value;
    fn decode(&self, v: &serde_json::Value) -> Result<Self::Elem>;

    /// JSON group descriptor, as accepted by the task runner.
    fn descriptor(&self) -> serde_json::Value;

    fn conjugate(&self, x: &Self::Elem, by: &Self::Elem) -> Self::Elem {
        self.multiply(&self.multiply(&self.invert(by), x), by)
    }

    fn power(&self, x: &Self::Elem, n: u64) -> Self::Elem {
        let mut acc = self.identity();
        let mut base = x.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Random word of length at most `max_len` over generators and their
    /// inverses.
    fn random_word<R: Rng>(&self, rng: &mut R, max_len: usize) -> Self::Elem
    where
        Self: Sized,
    {
        let gens = self.generators();
        let len = rng.gen_range(0..=max_len);
        let mut acc = self.identity();
        for _ in 0..len {
            if let Some(g) = gens.choose(rng) {
                let g = if rng.gen_bool(0.5) { g.clone() } else { self.invert(g) };
                acc = self.multiply(&acc, &g);
            }
        }
        acc
    }
}

/// Partition of an enumerated group into conjugacy classes.
#[derive(Clone, Debug)]
pub struct Classes {
    /// Class id of each element index.
    pub class_of: Vec<usize>,
    /// Members of each class, ascending; classes ordered by least member.
    pub members: Vec<Vec<usize>>,
}

impl Classes {
    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|m| m[0])
    }
}

/// Indexed view of an enumerable group. Elements are stored in ascending
/// order, so index order is the lexicographic order used for witnesses.
pub struct Enumerated<'g, G: GroupAdapter> {
    group: &'g G,
    elems: Vec<G::Elem>,
    index: HashMap<G::Elem, usize>,
    norms: Vec<G::Value>,
    inverse: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
    classes: OnceLock<Classes>,
}

impl<'g, G: GroupAdapter> Enumerated<'g, G> {
    pub fn new(group: &'g G) -> Result<Self> {
        Self::with_budget(group, DEFAULT_ELEMENT_BUDGET)
    }

    pub fn with_budget(group: &'g G, budget: usize) -> Result<Self> {
        let mut elems = group.enumerate(budget)?;
        elems.sort();
        elems.dedup();
        let index: HashMap<G::Elem, usize> =
            elems.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let lookup = |e: &G::Elem| {
            index.get(e).copied().ok_or_else(|| {
                Error::Domain(format!("{}: enumeration is not closed under the group law", group.name()))
            })
        };
        let identity = lookup(&group.identity())?;
        let inverse = elems
            .iter()
            .map(|e| lookup(&group.invert(e)))
            .collect::<Result<Vec<_>>>()?;
        let generators = group
            .generators()
            .iter()
            .map(lookup)
            .collect::<Result<Vec<_>>>()?;
        let norms = elems.iter().map(|e| group.norm(e)).collect();
        let en = Enumerated {
            group,
            elems,
            index,
            norms,
            inverse,
            identity,
            generators,
            classes: OnceLock::new(),
        };
        en.check_generators()?;
        Ok(en)
    }

    fn check_generators(&self) -> Result<()> {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut queue = VecDeque::from([self.identity]);
        seen.insert(self.identity);
        while let Some(x) = queue.pop_front() {
            for &s in &self.generators {
                let y = self.mul(x, s);
                if !seen.put(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.count_ones(..) != self.len() {
            return Err(Error::Domain(format!(
                "{}: generators span {} of {} elements",
                self.group.name(),
                seen.count_ones(..),
                self.len()
            )));
        }
        Ok(())
    }

    /// Axioms (0) and (2) on the identity and the generators.
    pub fn spot_check_norm(&self) -> Result<()> {
        if !self.norms[self.identity].is_zero_value() {
            return Err(Error::Domain("norm of the identity is not zero".into()));
        }
        for &s in &self.generators {
            if self.norms[self.inverse[s]] != self.norms[s] {
                return Err(Error::Domain("norm is not inverse invariant on generators".into()));
            }
            for &h in &self.generators {
                if self.norms[self.conj(s, h)] != self.norms[s] {
                    return Err(Error::Domain("norm is not conjugation invariant on generators".into()));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &'g G {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[G::Elem] {
        &self.elems
    }

    pub fn elem(&self, i: usize) -> &G::Elem {
        &self.elems[i]
    }

    pub fn index_of(&self, e: &G::Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let p = self.group.multiply(&self.elems[a], &self.elems[b]);
        self.index[&p]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `by⁻¹ · x · by`
    pub fn conj(&self, x: usize, by: usize) -> usize {
        self.mul(self.mul(self.inverse[by], x), by)
    }

    pub fn pow(&self, x: usize, n: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..n {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn norm(&self, i: usize) -> &G::Value {
        &self.norms[i]
    }

    pub fn norms(&self) -> &[G::Value] {
        &self.norms
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, items: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = self.empty_set();
        for i in items {
            s.insert(i);
        }
        s
    }

    /// Indices of the given elements; unknown elements are a domain error.
    pub fn indices_of<'a>(&self, items: impl IntoIterator<Item = &'a G::Elem>) -> Result<FixedBitSet>
    where
        G::Elem: 'a,
    {
        let mut s = self.empty_set();
        for e in items {
            let i = self
                .index_of(e)
                .ok_or_else(|| Error::Domain(format!("{e:?} is not an element of {}", self.group.name())))?;
            s.insert(i);
        }
        Ok(s)
    }

    /// `{x : ‖x‖ < t}` when strict, `{x : ‖x‖ ≤ t}` otherwise.
    pub fn ball(&self, t: &Q, strict: bool) -> FixedBitSet {
        self.set_of((0..self.len()).filter(|&i| {
            let c = self.norms[i].cmp_threshold(t);
            c.is_lt() || (!strict && c.is_eq())
        }))
    }

    /// `X · Y` as index sets.
    pub fn product_set(&self, xs: &FixedBitSet, ys: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        let ys: Vec<usize> = ys.ones().collect();
        for x in xs.ones() {
            for &y in &ys {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    /// Conjugation orbit of `x` under the generators, with a conjugator
    /// `h` for every member (`member = h⁻¹ x h`).
    pub fn orbit(&self, x: usize) -> Vec<(usize, usize)> {
        let mut conj: HashMap<usize, usize> = HashMap::from([(x, self.identity)]);
        let mut order = vec![(x, self.identity)];
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            let hy = conj[&y];
            for &s in &self.generators {
                let z = self.conj(y, s);
                if let std::collections::hash_map::Entry::Vacant(v) = conj.entry(z) {
                    let hz = self.mul(hy, s);
                    v.insert(hz);
                    order.push((z, hz));
                    queue.push_back(z);
                }
            }
        }
        order.sort_unstable();
        order
    }

    pub fn classes(&self) -> &Classes {
        self.classes.get_or_init(|| {
            let mut class_of = vec![usize::MAX; self.len()];
            let mut members = Vec::new();
            for i in 0..self.len() {
                if class_of[i] != usize::MAX {
                    continue;
                }
                let orbit: Vec<usize> = self.orbit(i).into_iter().map(|(y, _)| y).collect();
                for &y in &orbit {
                    class_of[y] = members.len();
                }
                members.push(orbit);
            }
            Classes { class_of, members }
        })
    }

    pub fn class_size(&self, i: usize) -> usize {
        let c = self.classes();
        c.members[c.class_of[i]].len()
    }

    /// Elements commuting with everything.
    pub fn center(&self) -> FixedBitSet {
        self.set_of((0..self.len()).filter(|&i| self.class_size(i) == 1))
    }

    pub fn encode(&self, i: usize) -> serde_json::Value {
        self.group.encode(&self.elems[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SymGroup;

    #[test]
    fn classes_of_s4() {
        let g = SymGroup::symmetric(4);
        let en = Enumerated::new(&g).unwrap();
        assert_eq!(en.len(), 24);
        let mut sizes: Vec<usize> = en.classes().members.iter().map(|m| m.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
        assert_eq!(en.center().count_ones(..), 1);
    }

    #[test]
    fn orbit_conjugators_are_correct() {
        let g = SymGroup::alternating(5);
        let en = Enumerated::new(&g).unwrap();
        let x = 7;
        for (y, h) in en.orbit(x) {
            assert_eq!(en.conj(x, h), y);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = SymGroup::symmetric(7);
        assert!(matches!(Enumerated::with_budget(&g, 100), Err(Error::Capability(_))));
    }
}
