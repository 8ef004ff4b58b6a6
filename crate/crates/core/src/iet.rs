//! Interval exchange transformations of `[0, 1)` with rational breakpoints.

use std::fmt;
use std::marker::PhantomData;

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::group::GroupAdapter;
use crate::perm::{next_permutation, Perm};
use crate::scalar::{fmt_ratio, parse_ratio, Scalar};

/// A piecewise translation of `[0, 1)`.
///
/// Source intervals have the given lengths, left to right; source interval
/// `i` lands in destination slot `perm[i]` (0-based internally, 1-based in
/// JSON). Values are kept canonical: adjacent intervals that translate by
/// the same amount are merged, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IetMap<T: Scalar = i64> {
    lengths: Vec<Ratio<T>>,
    perm: Vec<usize>,
}

struct Piece<T: Scalar> {
    start: Ratio<T>,
    len: Ratio<T>,
    offset: Ratio<T>,
}

impl<T: Scalar> IetMap<T> {
    pub fn identity() -> Self {
        IetMap { lengths: vec![Ratio::one()], perm: vec![0] }
    }

    /// `perm` is 1-based, as in the JSON form.
    pub fn new(lengths: Vec<Ratio<T>>, perm: &[usize]) -> Result<Self> {
        if lengths.is_empty() || lengths.len() != perm.len() {
            return domain("lengths and perm must be nonempty and of equal size");
        }
        if lengths.iter().any(|l| *l <= Ratio::zero()) {
            return domain("interval lengths must be positive");
        }
        let total = lengths.iter().fold(Ratio::zero(), |a: Ratio<T>, b| a + b);
        if !total.is_one() {
            return domain(format!("interval lengths sum to {}, not 1", fmt_ratio(&total)));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p == 0 || p > perm.len() || seen[p - 1] {
                return domain(format!("{perm:?} is not a permutation"));
            }
            seen[p - 1] = true;
        }
        let perm = perm.iter().map(|p| p - 1).collect();
        Ok(IetMap { lengths, perm }.canonical())
    }

    pub fn lengths(&self) -> &[Ratio<T>] {
        &self.lengths
    }

    /// 1-based destination slots.
    pub fn perm(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.lengths.len() == 1
    }

    /// Left endpoints of the source intervals.
    pub fn breakpoints(&self) -> Vec<Ratio<T>> {
        let mut acc = Ratio::zero();
        self.lengths
            .iter()
            .map(|l| {
                let s = acc.clone();
                acc = acc.clone() + l;
                s
            })
            .collect()
    }

    fn pieces(&self) -> Vec<Piece<T>> {
        let k = self.lengths.len();
        let mut slot_len = vec![Ratio::zero(); k];
        for i in 0..k {
            slot_len[self.perm[i]] = self.lengths[i].clone();
        }
        let mut slot_start = Vec::with_capacity(k);
        let mut acc = Ratio::zero();
        for l in &slot_len {
            slot_start.push(acc.clone());
            acc = acc + l;
        }
        self.breakpoints()
            .into_iter()
            .enumerate()
            .map(|(i, start)| Piece {
                offset: slot_start[self.perm[i]].clone() - &start,
                start,
                len: self.lengths[i].clone(),
            })
            .collect()
    }

    /// Builds a map from pieces sorted by source start that tile `[0, 1)`.
    fn from_pieces(pieces: Vec<Piece<T>>) -> Self {
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&a, &b| {
            (pieces[a].start.clone() + &pieces[a].offset).cmp(&(pieces[b].start.clone() + &pieces[b].offset))
        });
        let mut perm = vec![0; pieces.len()];
        for (slot, &i) in order.iter().enumerate() {
            perm[i] = slot;
        }
        IetMap { lengths: pieces.into_iter().map(|p| p.len).collect(), perm }.canonical()
    }

    fn canonical(self) -> Self {
        let mut lengths: Vec<Ratio<T>> = Vec::with_capacity(self.lengths.len());
        let mut slots: Vec<usize> = Vec::with_capacity(self.perm.len());
        let mut tail = usize::MAX;
        for (l, p) in self.lengths.into_iter().zip(self.perm) {
            if let Some(last) = lengths.last_mut() {
                if p == tail.wrapping_add(1) {
                    *last = last.clone() + l;
                    tail = p;
                    continue;
                }
            }
            lengths.push(l);
            slots.push(p);
            tail = p;
        }
        let mut sorted = slots.clone();
        sorted.sort_unstable();
        let perm = slots.iter().map(|s| sorted.binary_search(s).unwrap()).collect();
        IetMap { lengths, perm }
    }

    fn piece_at(&self, x: &Ratio<T>) -> Result<(usize, Ratio<T>)> {
        if *x < Ratio::zero() || *x >= Ratio::one() {
            return domain(format!("{} is outside [0, 1)", fmt_ratio(x)));
        }
        let pieces = self.pieces();
        let i = pieces.iter().rposition(|p| p.start <= *x).expect("0 is a breakpoint");
        Ok((i, pieces[i].offset.clone()))
    }

    pub fn apply(&self, x: &Ratio<T>) -> Result<Ratio<T>> {
        let (_, off) = self.piece_at(x)?;
        Ok(x.clone() + off)
    }

    pub fn inverse(&self) -> Self {
        let mut pieces: Vec<Piece<T>> = self
            .pieces()
            .into_iter()
            .map(|p| Piece { start: p.start + &p.offset, len: p.len, offset: -p.offset })
            .collect();
        pieces.sort_by(|a, b| a.start.cmp(&b.start));
        Self::from_pieces(pieces)
    }

    /// `f` then `g`: the map `x ↦ g(f(x))`.
    pub fn compose(&self, g: &Self) -> Self {
        let f_inv = self.inverse();
        let mut cuts = self.breakpoints();
        cuts.extend(g.breakpoints().iter().map(|b| f_inv.apply(b).expect("breakpoints lie in [0, 1)")));
        cuts.sort();
        cuts.dedup();
        let mut pieces = Vec::with_capacity(cuts.len());
        for (k, start) in cuts.iter().enumerate() {
            let end = cuts.get(k + 1).cloned().unwrap_or_else(Ratio::one);
            let y = self.apply(start).unwrap();
            let off = g.apply(&y).unwrap() - start;
            pieces.push(Piece { start: start.clone(), len: end - start, offset: off });
        }
        Self::from_pieces(pieces)
    }

    /// Measure of the set of moved points.
    pub fn support_norm(&self) -> Ratio<T> {
        self.pieces()
            .into_iter()
            .filter(|p| !p.offset.is_zero())
            .fold(Ratio::zero(), |a, p| a + p.len)
    }

    pub fn min_length(&self) -> Ratio<T> {
        self.lengths.iter().min().cloned().expect("nonempty")
    }

    /// Whether every breakpoint lies on the `1/n` grid.
    pub fn is_on_grid(&self, n: usize) -> bool {
        let n = T::from_usize(n).expect("resolution fits the scalar type");
        self.breakpoints()
            .iter()
            .all(|b| (n.clone() % b.denom().clone()).is_zero())
    }

    /// The grid permutation of an IET that lives on the `1/n` grid:
    /// cell `j` goes to cell `σ(j)`.
    pub fn grid_perm(&self, n: usize) -> Result<Perm> {
        if !self.is_on_grid(n) {
            return Err(Error::Domain(format!("{self:?} is not on the 1/{n} grid")));
        }
        let nn = T::from_usize(n).unwrap();
        let images = (0..n)
            .map(|j| {
                let x = Ratio::new(T::from_usize(j).unwrap(), nn.clone());
                let y = self.apply(&x).unwrap() * Ratio::from_integer(nn.clone());
                y.to_integer().to_usize().unwrap() + 1
            })
            .collect::<Vec<_>>();
        Perm::from_one_line(&images)
    }

    /// Rotation `x ↦ x + α mod 1`, `α ∈ [0, 1)`.
    pub fn rotation(alpha: Ratio<T>) -> Result<Self> {
        if alpha < Ratio::zero() || alpha >= Ratio::one() {
            return domain(format!("rotation amount {} outside [0, 1)", fmt_ratio(&alpha)));
        }
        if alpha.is_zero() {
            return Ok(Self::identity());
        }
        Self::new(vec![Ratio::one() - &alpha, alpha], &[2, 1])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lengths": self.lengths.iter().map(fmt_ratio).collect::<Vec<_>>(),
            "perm": self.perm(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Parse(format!("not an interval exchange: {v}"));
        let lengths = v
            .get("lengths")
            .and_then(|l| l.as_array())
            .ok_or_else(bad)?
            .iter()
            .map(|s| s.as_str().ok_or_else(bad).and_then(parse_ratio::<T>))
            .collect::<Result<Vec<_>>>()?;
        let perm: Vec<usize> = serde_json::from_value(v.get("perm").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        Self::new(lengths, &perm)
    }
}

impl<T: Scalar> fmt::Debug for IetMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls: Vec<String> = self.lengths.iter().map(fmt_ratio).collect();
        write!(f, "T({}; {:?})", ls.join(", "), self.perm())
    }
}

/// `x ↦ g(f(x))`
pub fn compose<T: Scalar>(f: &IetMap<T>, g: &IetMap<T>) -> IetMap<T> {
    f.compose(g)
}

pub fn support_norm<T: Scalar>(f: &IetMap<T>) -> Ratio<T> {
    f.support_norm()
}

/// `n` equal cells, cell `i` carried to cell `δ(i)`.
pub fn embed_perm<T: Scalar>(delta: &Perm) -> IetMap<T> {
    let n = delta.degree().max(1);
    let cell = Ratio::new(T::one(), T::from_usize(n).unwrap());
    let perm: Vec<usize> = if delta.degree() == 0 { vec![1] } else { delta.one_line() };
    IetMap::new(vec![cell; n], &perm).expect("a permutation of equal cells is an IET")
}

/// Result of snapping an IET to the `1/n` grid.
#[derive(Clone, Debug)]
pub struct Discretized<T: Scalar> {
    pub sigma_prime: Perm,
    pub h_prime: IetMap<T>,
    /// `‖h′ h⁻¹‖`, measured exactly.
    pub distance: Ratio<T>,
}

/// Moves every breakpoint `b` of `h` to `⌊n b⌋ / n`, keeping the order in
/// which the intervals are exchanged. Requires `1/n` below every interval
/// length so no interval collapses.
pub fn discretize<T: Scalar>(h: &IetMap<T>, n: usize) -> Result<Discretized<T>> {
    if n == 0 {
        return domain("resolution must be positive");
    }
    let nn = T::from_usize(n).unwrap();
    let cell = Ratio::new(T::one(), nn.clone());
    if cell >= h.min_length() {
        return Err(Error::Precondition(format!(
            "1/{n} is not below the minimal interval length {}",
            fmt_ratio(&h.min_length())
        )));
    }
    let snap = |b: &Ratio<T>| Ratio::new((b * Ratio::from_integer(nn.clone())).floor().to_integer(), nn.clone());
    let mut cuts: Vec<Ratio<T>> = h.breakpoints().iter().map(snap).collect();
    cuts.push(Ratio::one());
    let lengths = cuts.windows(2).map(|w| w[1].clone() - &w[0]).collect();
    let h_prime = IetMap::new(lengths, &h.perm())?;
    let sigma_prime = h_prime.grid_perm(n)?;
    let distance = h_prime.compose(&h.inverse()).support_norm();
    Ok(Discretized { sigma_prime, h_prime, distance })
}

/// Random IET with at most `max_pieces` intervals whose breakpoints lie on
/// the `1/d` grid for some `d ≤ max_denominator`.
pub fn random_iet<T: Scalar, R: Rng>(rng: &mut R, max_pieces: usize, max_denominator: usize) -> IetMap<T> {
    let d = rng.gen_range(1..=max_denominator.max(1));
    let k = rng.gen_range(1..=max_pieces.max(1).min(d));
    let mut cuts = rand::seq::index::sample(rng, d - 1, k - 1).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(d);
    let dd = T::from_usize(d).unwrap();
    let lengths = cuts
        .windows(2)
        .map(|w| Ratio::new(T::from_usize(w[1] - w[0]).unwrap(), dd.clone()))
        .collect();
    let mut perm: Vec<usize> = (1..=k).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
    IetMap::new(lengths, &perm).expect("valid by construction")
}

/// IETs on the `1/n` grid, i.e. the image of `S_n` under [`embed_perm`],
/// with the support-measure norm.
#[derive(Clone, Debug)]
pub struct GridIet<T = i64> {
    n: usize,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> GridIet<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("resolution must be positive");
        }
        Ok(GridIet { n, _scalar: PhantomData })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }
}

impl<T: Scalar> GroupAdapter for GridIet<T> {
    type Elem = IetMap<T>;
    type Value = Ratio<T>;

    fn name(&self) -> String {
        format!("IET_{}", self.n)
    }
    fn identity(&self) -> IetMap<T> {
        IetMap::identity()
    }
    fn multiply(&self, a: &IetMap<T>, b: &IetMap<T>) -> IetMap<T> {
        a.compose(b)
    }
    fn invert(&self, a: &IetMap<T>) -> IetMap<T> {
        a.inverse()
    }
    fn norm(&self, a: &IetMap<T>) -> Ratio<T> {
        a.support_norm()
    }
    fn generators(&self) -> Vec<IetMap<T>> {
        if self.n < 2 {
            return vec![];
        }
        let n = self.n;
        vec![
            embed_perm(&Perm::from_cycles(n, &[vec![1, 2]]).unwrap()),
            embed_perm(&Perm::from_cycles(n, &[(1..=n).collect()]).unwrap()),
        ]
    }
    fn enumerate(&self, budget: usize) -> Result<Vec<IetMap<T>>> {
        let order: u128 = (1..=self.n as u128).product();
        if order > budget as u128 {
            return Err(Error::Capability(format!("|{}| = {order} exceeds the element budget {budget}", self.name())));
        }
        let mut cur: Vec<usize> = (1..=self.n).collect();
        let mut out = Vec::with_capacity(order as usize);
        loop {
            out.push(embed_perm(&Perm::from_one_line(&cur)?));
            if !next_permutation(&mut cur) {
                return Ok(out);
            }
        }
    }
    fn encode(&self, a: &IetMap<T>) -> serde_json::Value {
        a.to_json()
    }
    fn decode(&self, v: &serde_json::Value) -> Result<IetMap<T>> {
        let f = IetMap::from_json(v)?;
        if !f.is_on_grid(self.n) {
            return domain(format!("{f:?} is not on the 1/{} grid", self.n));
        }
        Ok(f)
    }
    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({"type": "iet", "n": self.n, "norm": "iet_support"})
    }
}
