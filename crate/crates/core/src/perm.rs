//! Permutations, the Hamming norm and the constructions around
//! nonexceptional permutations.
//!
//! Composition is a right action: `(σ·τ)(x) = τ(σ(x))`, apply `σ` first.
//! Conjugation is `σ^h = h⁻¹·σ·h`, which relabels the cycles of `σ` by `h`.
//! All point-level API is 1-based.

use std::collections::BTreeSet;
use std::fmt;
use std::marker::PhantomData;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::{ConjProductCert, Factor};
use crate::error::{domain, Error, Result};
use crate::group::GroupAdapter;
use crate::scalar::{from_int, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    // 0-based images; images[i] is the image of point i + 1, minus one.
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n as u32).collect() }
    }

    /// One-line notation, 1-based: `images[i]` is the image of `i + 1`.
    pub fn from_one_line(images: &[usize]) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return domain(format!("{images:?} is not a permutation of 1..{n}"));
            }
            seen[x - 1] = true;
            out.push((x - 1) as u32);
        }
        Ok(Perm { images: out })
    }

    /// Product of the given cycles (1-based points) in `S_n`. The cycles
    /// must be disjoint.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Perm> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x == 0 || x > n {
                    return domain(format!("point {x} outside 1..{n}"));
                }
                if used[x - 1] {
                    return domain(format!("point {x} repeated in cycle notation"));
                }
                used[x - 1] = true;
                images[x - 1] = (c[(i + 1) % c.len()] - 1) as u32;
            }
        }
        Ok(Perm { images })
    }

    /// Parses `"[2,1,3]"` (one-line) or `"(1 2)(3 4 5)"` (cycles). Cycle
    /// notation needs `degree`, otherwise the largest point is used.
    pub fn parse(s: &str, degree: Option<usize>) -> Result<Perm> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a permutation: {s:?}"));
        if let Some(body) = s.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or_else(bad)?;
            let images = body
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            let p = Perm::from_one_line(&images)?;
            return match degree {
                Some(n) if n != p.degree() => p.extend(n),
                _ => Ok(p),
            };
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = inner.find(')').ok_or_else(bad)?;
            let pts = inner[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if !pts.is_empty() {
                cycles.push(pts);
            }
            rest = inner[close + 1..].trim_start();
        }
        let max = cycles.iter().flatten().copied().max().unwrap_or(0);
        let n = degree.unwrap_or(max);
        if max > n {
            return domain(format!("point {max} exceeds degree {n}"));
        }
        Perm::from_cycles(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Same permutation viewed in `S_n` for a larger `n`.
    pub fn extend(&self, n: usize) -> Result<Perm> {
        if n < self.degree() {
            return domain(format!("cannot shrink degree {} to {n}", self.degree()));
        }
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..n as u32);
        Ok(Perm { images })
    }

    /// Image of the 1-based point `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1] as usize + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Perm { images }
    }

    /// `h⁻¹ · self · h`
    pub fn conj(&self, h: &Perm) -> Perm {
        h.inverse().then(self).then(h)
    }

    pub fn pow(&self, n: u64) -> Perm {
        (0..n).fold(Perm::identity(self.degree()), |acc, _| acc.then(self))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Moved points, 1-based.
    pub fn support(&self) -> BTreeSet<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// All cycles including fixed points, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x + 1);
                x = self.images[x] as usize;
            }
            out.push(c);
        }
        out
    }

    /// Cycle lengths including fixed points, ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    pub fn is_even(&self) -> bool {
        (self.degree() - self.cycles().len()) % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }

    /// `‖σ‖_H = |supp(σ)|`
    pub fn hamming(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &x)| i as u32 != x).count()
    }

    pub fn hamming_normalized<T: Scalar>(&self) -> Ratio<T> {
        Ratio::new(
            T::from_usize(self.hamming()).unwrap(),
            T::from_usize(self.degree().max(1)).unwrap(),
        )
    }

    /// True iff all cycle lengths, fixed points included, are odd and
    /// pairwise distinct. For even permutations this is exactly when the
    /// `S_n`-class splits into two `A_n`-classes.
    pub fn is_exceptional(&self) -> bool {
        let t = self.cycle_type();
        t.iter().all(|l| l % 2 == 1) && t.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            let pts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// A conjugator `h` with `a^h = b` and `supp(h) ⊆ supp(a) ∪ supp(b)`, or
/// `None` when `a` and `b` have different cycle types.
///
/// Nontrivial cycles of equal length are matched in order of their least
/// point; the remaining points of `supp(b) \ supp(a)` are sent onto
/// `supp(a) \ supp(b)` in increasing order.
pub fn find_conjugator_min_support(a: &Perm, b: &Perm) -> Result<Option<Perm>> {
    let n = a.degree();
    if n != b.degree() {
        return domain(format!("degree mismatch: {} vs {}", n, b.degree()));
    }
    if a.cycle_type() != b.cycle_type() {
        return Ok(None);
    }
    let nontrivial = |p: &Perm| -> Vec<Vec<usize>> {
        let mut cs: Vec<Vec<usize>> = p.cycles().into_iter().filter(|c| c.len() > 1).collect();
        cs.sort_by_key(|c| (c.len(), c[0]));
        cs
    };
    let mut h = vec![0usize; n + 1];
    let mut assigned = vec![false; n + 1];
    let mut hit = vec![false; n + 1];
    for (ca, cb) in nontrivial(a).iter().zip(nontrivial(b).iter()) {
        for (&x, &y) in ca.iter().zip(cb.iter()) {
            h[x] = y;
            assigned[x] = true;
            hit[y] = true;
        }
    }
    let sa = a.support();
    let sb = b.support();
    let dom: Vec<usize> = sb.difference(&sa).copied().collect();
    let cod: Vec<usize> = sa.difference(&sb).copied().collect();
    for (&x, &y) in dom.iter().zip(cod.iter()) {
        h[x] = y;
        assigned[x] = true;
    }
    for x in 1..=n {
        if !assigned[x] {
            h[x] = x;
        }
    }
    let h = Perm::from_one_line(&h[1..])?;
    debug_assert_eq!(a.conj(&h), *b);
    Ok(Some(h))
}

/// `ρ(m) = (1 2 … m)` and `π(m) = (1 … m−4)(m−3 m−2)(m−1 m)`.
pub fn brenner_cycles(m: usize) -> Result<(Perm, Perm)> {
    if m < 5 {
        return domain(format!("brenner cycles need m >= 5, got {m}"));
    }
    let rho = Perm::from_cycles(m, &[(1..=m).collect()])?;
    let pi = Perm::from_cycles(
        m,
        &[(1..=m - 4).collect(), vec![m - 3, m - 2], vec![m - 1, m]],
    )?;
    Ok((rho, pi))
}

fn repaired_ok(tau: &Perm, sigma: &Perm) -> bool {
    sigma.is_even()
        && !sigma.is_exceptional()
        && sigma.support() == tau.support()
        && tau.then(&sigma.inverse()).hamming() <= 5
}

/// Replaces a cycle `(c_1 … c_L)` of `p` by `(c_1 … c_{L−4})(c_{L−3} c_{L−2})(c_{L−1} c_L)`.
fn replace_by_pi_pattern(p: &Perm, cycle: &[usize]) -> Perm {
    let l = cycle.len();
    let mut cycles: Vec<Vec<usize>> =
        p.cycles().into_iter().filter(|c| c.len() > 1 && c[0] != cycle[0]).collect();
    cycles.push(cycle[..l - 4].to_vec());
    cycles.push(vec![cycle[l - 4], cycle[l - 3]]);
    cycles.push(vec![cycle[l - 2], cycle[l - 1]]);
    cycles.retain(|c| c.len() > 1);
    Perm::from_cycles(p.degree(), &cycles).expect("disjoint cycles")
}

/// Every `y` with `supp(y) ⊆ points` and `2 ≤ ‖y‖_H ≤ max_support`,
/// ordered by support size and then lexicographically.
fn small_support_perms(n: usize, points: &[usize], max_support: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    for size in 2..=max_support.min(points.len()) {
        let mut batch = Vec::new();
        for subset in combinations(points, size) {
            let mut order: Vec<usize> = (0..size).collect();
            loop {
                if order.iter().enumerate().all(|(i, &j)| i != j) {
                    let mut img: Vec<usize> = (1..=n).collect();
                    for (i, &j) in order.iter().enumerate() {
                        img[subset[i] - 1] = subset[j];
                    }
                    batch.push(Perm::from_one_line(&img).expect("valid"));
                }
                if !next_permutation(&mut order) {
                    break;
                }
            }
        }
        batch.sort();
        out.extend(batch);
    }
    out
}

fn combinations(points: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(points: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..points.len() {
            cur.push(points[i]);
            go(points, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(points, k, 0, &mut cur, &mut out);
    out
}

/// Lexicographic successor in place; false when `v` was the last one.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A nonexceptional even `σ` with `supp(σ) = supp(τ)` and `‖τσ⁻¹‖_H ≤ 5`.
///
/// First applies the constructive recipe: multiply an odd `τ` by a
/// transposition inside its support, then replace a cycle of odd length
/// `L ≥ 7` by the pattern of `π(L)`. When the recipe does not apply (the
/// only long cycle has length 5, or a support-preserving transposition does
/// not exist) every correction of support at most 5 inside `supp(τ)` is
/// tried in order. If none works there is no such `σ` and an error is
/// returned; this happens for a 5-cycle in `S_5` or `S_6`.
pub fn nearby_nonexceptional(tau: &Perm) -> Result<Perm> {
    if tau.hamming() < 5 {
        return Err(Error::Precondition(format!(
            "‖τ‖_H = {} < 5 for τ = {tau}",
            tau.hamming()
        )));
    }
    if let Some(sigma) = repair_by_recipe(tau) {
        if repaired_ok(tau, &sigma) {
            return Ok(sigma);
        }
    }
    let n = tau.degree();
    let supp: Vec<usize> = tau.support().into_iter().collect();
    small_support_perms(n, &supp, 5)
        .into_iter()
        .map(|y| tau.then(&y))
        .find(|s| repaired_ok(tau, s))
        .ok_or_else(|| {
            Error::NoWitness(format!(
                "no nonexceptional even permutation with support {supp:?} lies within Hamming distance 5 of {tau}"
            ))
        })
}

fn repair_by_recipe(tau: &Perm) -> Option<Perm> {
    let supp = tau.support();
    let mut cur = tau.clone();
    if !cur.is_even() {
        let pts: Vec<usize> = supp.iter().copied().collect();
        let mut fallback = None;
        let mut chosen = None;
        'outer: for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                let t = Perm::from_cycles(tau.degree(), &[vec![a, b]]).ok()?;
                let cand = cur.then(&t);
                if cand.support() != supp {
                    continue;
                }
                if !cand.is_exceptional() {
                    chosen = Some(cand);
                    break 'outer;
                }
                fallback.get_or_insert(cand);
            }
        }
        cur = chosen.or(fallback)?;
    }
    if cur.is_exceptional() {
        let cycle = cur
            .cycles()
            .into_iter()
            .filter(|c| c.len() >= 7)
            .max_by_key(|c| c.len())?;
        cur = replace_by_pi_pattern(&cur, &cycle);
    }
    Some(cur)
}

/// Builds `σ_∞ ∈ C_{4+⌊n/k⌋}(σ, S_n)` with full support `{1..n}`.
///
/// `{1..n}` is split as `X_1 ∪ … ∪ X_q ∪ Y` with `X_1 = supp(σ)`,
/// `|X_i| = k = ‖σ‖_H`, `q = ⌊n/k⌋` and `|Y| < k`. Each `σ_i` is `σ`
/// conjugated by the involution swapping `X_1` and `X_i` pointwise. When
/// `Y` is nonempty a product `σ_0` of at most four signed conjugates of
/// `σ` supported in `X_q ∪ Y` is searched for, seeded, such that
/// `σ_1 ⋯ σ_q σ_0` moves every point.
pub fn sigma_infinity(
    sigma: &Perm,
    n: usize,
    seed: u64,
    attempts: usize,
) -> Result<(Perm, ConjProductCert<Perm>)> {
    if n < sigma.degree() {
        return domain(format!("degree {n} is smaller than the degree of σ"));
    }
    let sigma = sigma.extend(n)?;
    let k = sigma.hamming();
    if k < 5 {
        return Err(Error::Precondition(format!("‖σ‖_H = {k} < 5")));
    }
    if sigma.is_exceptional() {
        return Err(Error::Precondition(format!("σ = {sigma} is exceptional")));
    }
    let x1: Vec<usize> = sigma.support().into_iter().collect();
    let rest: Vec<usize> = (1..=n).filter(|p| !x1.contains(p)).collect();
    let q = n / k;
    let blocks: Vec<&[usize]> = rest.chunks(k).take(q - 1).collect();
    let y: Vec<usize> = rest[(q - 1) * k..].to_vec();

    let mut factors = vec![Factor { sign: 1, conjugator: Perm::identity(n) }];
    let mut product = sigma.clone();
    for block in &blocks {
        let mut cycles = Vec::new();
        for (&a, &b) in x1.iter().zip(block.iter()) {
            cycles.push(vec![a, b]);
        }
        let rho = Perm::from_cycles(n, &cycles)?;
        product = product.then(&sigma.conj(&rho));
        factors.push(Factor { sign: 1, conjugator: rho });
    }
    let cert_so_far = |factors: &Vec<Factor<Perm>>, product: &Perm| ConjProductCert {
        base: sigma.clone(),
        factors: factors.clone(),
        claimed_product: product.clone(),
    };
    if y.is_empty() {
        return Ok((product.clone(), cert_so_far(&factors, &product)));
    }

    // Targets for σ_0: the last X block together with Y.
    let last_block: Vec<usize> = if q == 1 { x1.clone() } else { blocks[q - 2].to_vec() };
    let mut pool = last_block;
    pool.extend(&y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_inv = sigma.inverse();
    for attempt in 0..attempts {
        let len = 1 + attempt % 4;
        let mut sigma0 = Perm::identity(n);
        let mut extra = Vec::with_capacity(len);
        for _ in 0..len {
            let mut target = pool.clone();
            target.shuffle(&mut rng);
            target.truncate(k);
            let h = relabeling(n, &x1, &target);
            let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let base = if sign == 1 { &sigma } else { &sigma_inv };
            sigma0 = sigma0.then(&base.conj(&h));
            extra.push(Factor { sign, conjugator: h });
        }
        let candidate = product.then(&sigma0);
        if candidate.hamming() == n {
            let mut all = factors.clone();
            all.extend(extra);
            return Ok((candidate.clone(), cert_so_far(&all, &candidate)));
        }
    }
    Err(Error::ConstructionIncomplete {
        reason: format!(
            "no product of at most 4 conjugates supported in the last block and Y = {y:?} completed the support after {attempts} attempts"
        ),
        partial: Box::new(cert_so_far(&factors, &product)),
    })
}

/// A permutation sending `from[i] ↦ to[i]`, completed by mapping the
/// remaining points order-preservingly.
fn relabeling(n: usize, from: &[usize], to: &[usize]) -> Perm {
    let mut img = vec![0usize; n + 1];
    let mut used = vec![false; n + 1];
    let mut is_from = vec![false; n + 1];
    for (&a, &b) in from.iter().zip(to) {
        img[a] = b;
        used[b] = true;
        is_from[a] = true;
    }
    let mut free = (1..=n).filter(|&p| !used[p]);
    for p in 1..=n {
        if !is_from[p] {
            img[p] = free.next().expect("bijection");
        }
    }
    Perm::from_one_line(&img[1..]).expect("bijection")
}

/// Which norm a [`PermGroup`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermNorm {
    /// `|supp(σ)|`
    Hamming,
    /// `|supp(σ)| / n`
    HammingNormalized,
}

impl PermNorm {
    pub fn id(self) -> &'static str {
        match self {
            PermNorm::Hamming => "hamming",
            PermNorm::HammingNormalized => "hamming_normalized",
        }
    }
}

/// `S_n` or `A_n` with a Hamming norm.
#[derive(Clone, Debug)]
pub struct PermGroup<T = i64> {
    n: usize,
    alternating: bool,
    norm: PermNorm,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> PermGroup<T> {
    pub fn new(n: usize, alternating: bool, norm: PermNorm) -> Self {
        PermGroup { n, alternating, norm, _scalar: PhantomData }
    }

    pub fn symmetric(n: usize) -> Self {
        Self::new(n, false, PermNorm::Hamming)
    }

    pub fn alternating(n: usize) -> Self {
        Self::new(n, true, PermNorm::Hamming)
    }

    pub fn with_norm(mut self, norm: PermNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn is_alternating(&self) -> bool {
        self.alternating
    }

    pub fn order(&self) -> u128 {
        let f: u128 = (1..=self.n as u128).product();
        if self.alternating && self.n >= 2 {
            f / 2
        } else {
            f
        }
    }
}

impl<T: Scalar> GroupAdapter for PermGroup<T> {
    type Elem = Perm;
    type Value = Ratio<T>;

    fn name(&self) -> String {
        format!("{}_{}", if self.alternating { "A" } else { "S" }, self.n)
    }

    fn identity(&self) -> Perm {
        Perm::identity(self.n)
    }

    fn multiply(&self, a: &Perm, b: &Perm) -> Perm {
        a.then(b)
    }

    fn invert(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn norm(&self, a: &Perm) -> Ratio<T> {
        match self.norm {
            PermNorm::Hamming => from_int(a.hamming() as i64),
            PermNorm::HammingNormalized => a.hamming_normalized(),
        }
    }

    fn generators(&self) -> Vec<Perm> {
        let n = self.n;
        if n < 2 || (self.alternating && n < 3) {
            return vec![];
        }
        if self.alternating {
            (3..=n)
                .map(|k| Perm::from_cycles(n, &[vec![1, 2, k]]).unwrap())
                .collect()
        } else {
            vec![
                Perm::from_cycles(n, &[vec![1, 2]]).unwrap(),
                Perm::from_cycles(n, &[(1..=n).collect()]).unwrap(),
            ]
        }
    }

    fn enumerate(&self, budget: usize) -> Result<Vec<Perm>> {
        if self.order() > budget as u128 {
            return Err(Error::Capability(format!(
                "|{}| = {} exceeds the element budget {budget}",
                self.name(),
                self.order()
            )));
        }
        let mut cur: Vec<u32> = (0..self.n as u32).collect();
        let mut out = Vec::with_capacity(self.order() as usize);
        loop {
            let p = Perm { images: cur.clone() };
            if !self.alternating || p.is_even() {
                out.push(p);
            }
            if !next_permutation(&mut cur) {
                break;
            }
        }
        Ok(out)
    }

    fn encode(&self, a: &Perm) -> serde_json::Value {
        serde_json::json!(a.one_line())
    }

    fn decode(&self, v: &serde_json::Value) -> Result<Perm> {
        let p = match v {
            serde_json::Value::String(s) => Perm::parse(s, Some(self.n))?,
            serde_json::Value::Array(_) => {
                let imgs: Vec<usize> = serde_json::from_value(v.clone())
                    .map_err(|e| Error::Parse(format!("bad one-line permutation: {e}")))?;
                Perm::from_one_line(&imgs)?
            }
            _ => return Err(Error::Parse(format!("not a permutation: {v}"))),
        };
        if p.degree() != self.n {
            return domain(format!("{p} has degree {}, expected {}", p.degree(), self.n));
        }
        if self.alternating && !p.is_even() {
            return domain(format!("{p} is odd, not in {}", self.name()));
        }
        Ok(p)
    }

    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "type": if self.alternating { "alt" } else { "sym" },
            "n": self.n,
            "norm": self.norm.id(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Enumerated;

    fn p(s: &str, n: usize) -> Perm {
        Perm::parse(s, Some(n)).unwrap()
    }

    #[test]
    fn parsing_formats() {
        assert_eq!(p("[2,1,3]", 3), p("(1 2)", 3));
        assert_eq!(p("()", 4), Perm::identity(4));
        assert_eq!(p("(1 2)(3 4 5)", 6).to_string(), "(1 2)(3 4 5)");
        assert!(Perm::parse("[1,1]", None).is_err());
        assert!(Perm::parse("(1 2", Some(3)).is_err());
        assert!(Perm::parse("(1 2)(2 3)", Some(3)).is_err());
    }

    #[test]
    fn right_action_composition() {
        // (1 2) first, then (2 3): 1 -> 2 -> 3
        let s = p("(1 2)", 3).then(&p("(2 3)", 3));
        assert_eq!(s.apply(1), 3);
        assert_eq!(s, p("(1 3 2)", 3));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(Perm::identity(7).hamming(), 0);
        let c = p("(1 2 3)", 5);
        assert_eq!(c.hamming(), 3);
        assert_eq!(c.hamming_normalized::<i64>(), Ratio::new(3, 5));
        assert_eq!(p("(1 2)(3 4 5)", 6).hamming(), 5);
    }

    #[test]
    fn exceptional_examples() {
        assert!(p("(1 2 3 4 5)", 5).is_exceptional());
        assert!(!p("(1 2)(3 4 5)", 5).is_exceptional());
        assert!(!p("(1 2 3)", 5).is_exceptional());
        assert!(p("(1 2 3)", 4).is_exceptional());
    }

    /// `|σ^{A_n}| < |σ^{S_n}|` computed by brute-force orbits.
    fn splits(sigma: &Perm) -> bool {
        let n = sigma.degree();
        let s = PermGroup::<i64>::symmetric(n);
        let all = s.enumerate(usize::MAX).unwrap();
        let mut full = BTreeSet::new();
        let mut alt = BTreeSet::new();
        for h in &all {
            let c = sigma.conj(h);
            if h.is_even() {
                alt.insert(c.clone());
            }
            full.insert(c);
        }
        alt.len() < full.len()
    }

    #[test]
    fn exceptional_matches_class_splitting() {
        for n in 2..=7 {
            let a = PermGroup::<i64>::alternating(n).enumerate(usize::MAX).unwrap();
            let mut seen_types = BTreeSet::new();
            for sigma in a {
                if seen_types.insert(sigma.cycle_type()) {
                    assert_eq!(sigma.is_exceptional(), splits(&sigma), "{sigma} in S_{n}");
                }
            }
        }
    }

    #[test]
    fn conjugator_examples() {
        let a = p("(1 2 3)", 3);
        assert_eq!(find_conjugator_min_support(&a, &a).unwrap(), Some(Perm::identity(3)));
        let h = find_conjugator_min_support(&p("(1 2)", 5), &p("(3 4)", 5)).unwrap().unwrap();
        assert_eq!(h, p("(1 3)(2 4)", 5));
        assert_eq!(find_conjugator_min_support(&p("(1 2)", 5), &p("(1 2 3)", 5)).unwrap(), None);
        assert!(find_conjugator_min_support(&p("(1 2)", 5), &p("(1 2)", 4)).is_err());
    }

    #[test]
    fn brenner_examples() {
        let (rho, pi) = brenner_cycles(7).unwrap();
        assert_eq!(rho.then(&pi.inverse()), p("(3 5 7)", 7));
        let (rho, pi) = brenner_cycles(5).unwrap();
        assert_eq!(rho.then(&pi.inverse()), p("(1 3 5)", 5));
        for m in 2..12 {
            assert!(brenner_cycles(2 * m + 1).unwrap().1.is_even());
        }
        assert!(brenner_cycles(4).is_err());
    }

    #[test]
    fn repair_examples() {
        let tau = p("(1 2)(3 4)(5 6 7)", 7);
        assert_eq!(nearby_nonexceptional(&tau).unwrap(), tau);

        let tau = p("(1 2)(3 4 5 6 7)", 7);
        let s = nearby_nonexceptional(&tau).unwrap();
        assert!(s.is_even() && !s.is_exceptional());
        assert_eq!(s.support(), tau.support());
        assert!(tau.then(&s.inverse()).hamming() <= 5);

        let tau = p("(1 2 3 4 5 6)", 6);
        let s = nearby_nonexceptional(&tau).unwrap();
        assert!(s.is_even() && !s.is_exceptional());
        assert_eq!(s.support(), tau.support());
        assert!(tau.then(&s.inverse()).hamming() <= 5);

        let tau = p("(1 2 3 4 5 6 7)", 7);
        let s = nearby_nonexceptional(&tau).unwrap();
        assert_eq!(s.cycle_type(), vec![2, 2, 3]);
        assert_eq!(tau.then(&s.inverse()).hamming(), 3);

        // A 5-cycle in S_5 has no admissible repair.
        assert!(matches!(nearby_nonexceptional(&p("(1 2 3 4 5)", 5)), Err(Error::NoWitness(_))));
        assert!(matches!(nearby_nonexceptional(&p("(1 2 3)", 5)), Err(Error::Precondition(_))));
    }

    #[test]
    fn sigma_infinity_examples() {
        let sigma = p("(1 2)(3 4 5)", 5);
        let (s, cert) = sigma_infinity(&sigma, 5, 1, 100).unwrap();
        assert_eq!(s, sigma);
        assert_eq!(cert.len(), 1);

        let g = PermGroup::<i64>::symmetric(10);
        let (s, cert) = sigma_infinity(&sigma, 10, 1, 100).unwrap();
        assert_eq!(s.hamming(), 10);
        assert!(cert.len() <= 6);
        assert!(cert.replay(&g));

        for n in 6..=14 {
            let g = PermGroup::<i64>::symmetric(n);
            let (s, cert) = sigma_infinity(&sigma, n, 7, 10_000).unwrap();
            assert_eq!(s.hamming(), n, "n = {n}");
            assert!(cert.len() <= 4 + n / 5);
            assert!(cert.replay(&g));
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(PermGroup::<i64>::symmetric(5).enumerate(1000).unwrap().len(), 120);
        assert_eq!(PermGroup::<i64>::alternating(5).enumerate(1000).unwrap().len(), 60);
        let a4 = PermGroup::<i64>::alternating(4);
        assert_eq!(Enumerated::new(&a4).unwrap().len(), 12);
    }
}
