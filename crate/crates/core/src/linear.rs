//! Square matrices over prime fields, `SL_n(F_p)` and the Jordan length.

use std::fmt;
use std::marker::PhantomData;

use num_rational::Ratio;

use crate::coverage::{gen_numbers, ConjBall, GenNumber};
use crate::error::{domain, Error, Result};
use crate::group::{Enumerated, GroupAdapter};
use crate::scalar::{fmt_ratio, Scalar};
use crate::Q;

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a != 0.
    let (mut base, mut e, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// An `n × n` matrix over `F_p`, entries row-major in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatFp {
    // Field order keeps derived Ord lexicographic on the entry vector
    // within one (p, n).
    p: u32,
    n: usize,
    entries: Vec<u32>,
}

impl MatFp {
    pub fn new(p: u32, n: usize, entries: Vec<u32>) -> Result<MatFp> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if entries.len() != n * n {
            return domain(format!("expected {} entries, got {}", n * n, entries.len()));
        }
        Ok(MatFp { p, n, entries: entries.into_iter().map(|x| x % p).collect() })
    }

    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<MatFp> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return domain("matrix rows must form a square");
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| x.rem_euclid(p as i64) as u32)
            .collect();
        MatFp::new(p, n, entries)
    }

    pub fn identity(p: u32, n: usize) -> MatFp {
        Self::scalar(p, n, 1)
    }

    pub fn zero(p: u32, n: usize) -> MatFp {
        MatFp { p, n, entries: vec![0; n * n] }
    }

    pub fn scalar(p: u32, n: usize, lambda: u32) -> MatFp {
        let mut m = Self::zero(p, n);
        for i in 0..n {
            m.entries[i * n + i] = lambda % p;
        }
        m
    }

    /// `I + E_ij`
    pub fn transvection(p: u32, n: usize, i: usize, j: usize) -> MatFp {
        let mut m = Self::identity(p, n);
        m.entries[i * n + j] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n.max(1)).map(<[u32]>::to_vec).collect()
    }

    pub fn mul(&self, other: &MatFp) -> MatFp {
        assert_eq!((self.p, self.n), (other.p, other.n), "shape mismatch");
        let (n, p) = (self.n, self.p as u64);
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s += self.entries[i * n + k] as u64 * other.entries[k * n + j] as u64;
                }
                out[i * n + j] = (s % p) as u32;
            }
        }
        MatFp { p: self.p, n, entries: out }
    }

    pub fn sub(&self, other: &MatFp) -> MatFp {
        let p = self.p;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        MatFp { p, n: self.n, entries }
    }

    /// Row reduction; returns the rank and the determinant.
    fn eliminate(&self) -> (usize, u32) {
        let (n, p) = (self.n, self.p as u64);
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut rank = 0;
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for c in 0..n {
                    a.swap(piv * n + c, rank * n + c);
                }
                det = (p - det) % p;
            }
            let pv = a[rank * n + col];
            det = det * pv % p;
            let inv = inv_mod(pv as u32, self.p) as u64;
            for r in 0..n {
                if r != rank && a[r * n + col] != 0 {
                    let f = a[r * n + col] * inv % p;
                    for c in 0..n {
                        a[r * n + c] = (a[r * n + c] + p - f * a[rank * n + c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        if rank < n {
            det = 0;
        }
        (rank, det as u32)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn det(&self) -> u32 {
        self.eliminate().1
    }

    pub fn is_special(&self) -> bool {
        self.det() == 1
    }

    /// Inverse of an invertible matrix via the adjugate-free route
    /// `A⁻¹ = A^{|GL|-1}` is too slow; Gauss-Jordan on `[A | I]` instead.
    pub fn inverse(&self) -> Result<MatFp> {
        let (n, p) = (self.n, self.p as u64);
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut b: Vec<u64> = Self::identity(self.p, n).entries.iter().map(|&x| x as u64).collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or_else(|| Error::Domain("matrix is singular".into()))?;
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
                b.swap(piv * n + c, col * n + c);
            }
            let inv = inv_mod(a[col * n + col] as u32, self.p) as u64;
            for c in 0..n {
                a[col * n + c] = a[col * n + c] * inv % p;
                b[col * n + c] = b[col * n + c] * inv % p;
            }
            for r in 0..n {
                if r != col && a[r * n + col] != 0 {
                    let f = a[r * n + col];
                    for c in 0..n {
                        a[r * n + c] = (a[r * n + c] + p - f * a[col * n + c] % p) % p;
                        b[r * n + c] = (b[r * n + c] + p - f * b[col * n + c] % p) % p;
                    }
                }
            }
        }
        Ok(MatFp { p: self.p, n, entries: b.into_iter().map(|x| x as u32).collect() })
    }

    pub fn is_scalar(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j) == 0))
            && (0..n).all(|i| self.get(i, i) == self.get(0, 0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"p": self.p, "n": self.n, "rows": self.rows()})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MatFp> {
        let bad = || Error::Parse(format!("not a matrix: {v}"));
        let p = v.get("p").and_then(|x| x.as_u64()).ok_or_else(bad)? as u32;
        let rows: Vec<Vec<i64>> =
            serde_json::from_value(v.get("rows").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        let m = MatFp::from_rows(p, &rows)?;
        if let Some(n) = v.get("n").and_then(|x| x.as_u64()) {
            if n as usize != m.n {
                return domain(format!("declared n = {n} but {} rows given", m.n));
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for MatFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}{:?}", self.p, self.rows())
    }
}

/// Rank over `F_p` by row reduction.
pub fn rank_fp(a: &MatFp) -> usize {
    a.rank()
}

/// `ℓ_J(A) = (1/n) · min_{λ ∈ F_p*} rk(A − λI)`
pub fn jordan_length<T: Scalar>(a: &MatFp) -> Ratio<T> {
    let n = a.dim();
    let best = (1..a.modulus())
        .map(|lambda| a.sub(&MatFp::scalar(a.modulus(), n, lambda)).rank())
        .min()
        .unwrap_or(0);
    Ratio::new(T::from_usize(best).unwrap(), T::from_usize(n.max(1)).unwrap())
}

/// `|SL_n(F_p)| = p^{n(n−1)/2} ∏_{i=2}^{n} (p^i − 1)`
pub fn sl_order(n: usize, p: u32) -> u128 {
    let p = p as u128;
    let mut order = p.saturating_pow((n * n.saturating_sub(1) / 2) as u32);
    for i in 2..=n {
        order = order.saturating_mul(p.saturating_pow(i as u32) - 1);
    }
    order
}

/// Largest `p^{n²}` scan the brute-force enumeration will attempt.
const MAX_MATRIX_SCAN: u128 = 50_000_000;

/// Every element of `SL_n(F_p)` once, lexicographic on row-major entries.
pub fn sl_enumerate(n: usize, p: u32, budget: usize) -> Result<Vec<MatFp>> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if n == 0 {
        return domain("dimension must be positive");
    }
    let order = sl_order(n, p);
    if order > budget as u128 {
        return Err(Error::Capability(format!(
            "|SL_{n}(F_{p})| = {order} exceeds the element budget {budget}"
        )));
    }
    let scan = (p as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if scan > MAX_MATRIX_SCAN {
        return Err(Error::Capability(format!("scanning {p}^{} matrices is too large", n * n)));
    }
    let mut out = Vec::with_capacity(order as usize);
    let mut entries = vec![0u32; n * n];
    loop {
        let m = MatFp { p, n, entries: entries.clone() };
        if m.det() == 1 {
            out.push(m);
        }
        // odometer, last entry fastest
        let mut k = n * n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            entries[k] += 1;
            if entries[k] < p {
                break;
            }
            entries[k] = 0;
        }
    }
}

/// Transvections `I + E_ij`, `i ≠ j`; they generate `SL_n(F_p)`.
pub fn sl_generators(n: usize, p: u32) -> Vec<MatFp> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(MatFp::transvection(p, n, i, j));
            }
        }
    }
    out
}

/// Block-diagonal matrix with `m / n` copies of `a`.
pub fn block_embed(a: &MatFp, m: usize) -> Result<MatFp> {
    let n = a.dim();
    if n == 0 || m % n != 0 {
        return domain(format!("{n} does not divide {m}"));
    }
    let mut out = MatFp::zero(a.modulus(), m);
    for b in 0..m / n {
        for i in 0..n {
            for j in 0..n {
                out.entries[(b * n + i) * m + b * n + j] = a.get(i, j);
            }
        }
    }
    Ok(out)
}

/// `SL_n(F_p)` with the Jordan length.
#[derive(Clone, Debug)]
pub struct SlGroup<T = i64> {
    n: usize,
    p: u32,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> SlGroup<T> {
    pub fn new(n: usize, p: u32) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if n == 0 {
            return domain("dimension must be positive");
        }
        Ok(SlGroup { n, p, _scalar: PhantomData })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u128 {
        sl_order(self.n, self.p)
    }
}

impl<T: Scalar> GroupAdapter for SlGroup<T> {
    type Elem = MatFp;
    type Value = Ratio<T>;

    fn name(&self) -> String {
        format!("SL_{}(F_{})", self.n, self.p)
    }
    fn identity(&self) -> MatFp {
        MatFp::identity(self.p, self.n)
    }
    fn multiply(&self, a: &MatFp, b: &MatFp) -> MatFp {
        a.mul(b)
    }
    fn invert(&self, a: &MatFp) -> MatFp {
        a.inverse().expect("SL elements are invertible")
    }
    fn norm(&self, a: &MatFp) -> Ratio<T> {
        jordan_length(a)
    }
    fn generators(&self) -> Vec<MatFp> {
        sl_generators(self.n, self.p)
    }
    fn enumerate(&self, budget: usize) -> Result<Vec<MatFp>> {
        sl_enumerate(self.n, self.p, budget)
    }
    fn encode(&self, a: &MatFp) -> serde_json::Value {
        a.to_json()
    }
    fn decode(&self, v: &serde_json::Value) -> Result<MatFp> {
        let m = MatFp::from_json(v)?;
        if m.p != self.p || m.n != self.n {
            return domain(format!("{m:?} is not in {}", self.name()));
        }
        if !m.is_special() {
            return domain(format!("{m:?} has determinant {} != 1", m.det()));
        }
        Ok(m)
    }
    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({"type": "sl_fp", "n": self.n, "p": self.p, "norm": "jordan"})
    }
}

/// One noncentral element of the probe table.
#[derive(Clone, Debug)]
pub struct LsRow {
    pub elem: MatFp,
    pub jordan: Q,
    pub n: GenNumber,
}

/// Empirical constant for "`ℓ_J(A)·N ≥ C` implies `C_N(A) = SL_n(F_p)`".
#[derive(Clone, Debug)]
pub struct LsProbe {
    pub n: usize,
    pub p: u32,
    pub rows: Vec<LsRow>,
    /// Every noncentral `A` has finite `N(A)`.
    pub all_finite: bool,
    /// `max ℓ_J(A)·N(A)` over rows with finite `N(A)`.
    pub c_emp: Option<Q>,
    /// Noncentral `A` for which `C_N(A) ≠ G` at `N = ⌈C_emp/ℓ_J(A)⌉`.
    pub failures: Vec<MatFp>,
}

impl LsProbe {
    pub fn consistent(&self) -> bool {
        self.all_finite && self.failures.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("matrix,jordan_length,normal_generation_number\n");
        for r in &self.rows {
            let n = match r.n {
                GenNumber::Finite(k) => k.to_string(),
                GenNumber::AtLeast(k) => format!(">={k}"),
                GenNumber::Infinite => "infinite".into(),
            };
            let m = serde_json::to_string(&r.elem.rows()).unwrap();
            out.push_str(&format!("\"{m}\",{},{n}\n", fmt_ratio(&r.jordan)));
        }
        out
    }
}

/// Computes `N(A)` for every noncentral `A ∈ SL_n(F_p)`, the empirical
/// constant `C_emp`, and checks `C_N(A) = G` at `N = ⌈C_emp/ℓ_J(A)⌉`.
pub fn ls_constant_probe(n: usize, p: u32) -> Result<LsProbe> {
    if n < 2 {
        return domain("dimension must be at least 2");
    }
    let g = SlGroup::<i64>::new(n, p)?;
    let en = Enumerated::new(&g)?;
    let numbers = gen_numbers(&en, en.len());
    let rows: Vec<LsRow> = (0..en.len())
        .filter(|&i| !en.elem(i).is_scalar())
        .map(|i| LsRow { elem: en.elem(i).clone(), jordan: en.norm(i).clone(), n: numbers[i] })
        .collect();
    let all_finite = rows.iter().all(|r| r.n.finite().is_some());
    let c_emp = rows
        .iter()
        .filter_map(|r| r.n.finite().map(|k| r.jordan * Q::from_integer(k as i64)))
        .max();
    let mut failures = Vec::new();
    if let Some(c) = c_emp {
        for r in &rows {
            let bound = (c / r.jordan).ceil().to_integer() as usize;
            let i = en.index_of(&r.elem).expect("row element is enumerated");
            let mut cb = ConjBall::new(&en, i);
            if cb.level(bound).count_ones(..) != en.len() {
                failures.push(r.elem.clone());
            }
        }
    }
    Ok(LsProbe { n, p, rows, all_finite, c_emp, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Enumerated;
    use crate::norms::{verify_exhaustive, Axiom};

    fn m(p: u32, rows: &[&[i64]]) -> MatFp {
        MatFp::from_rows(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_fp(&MatFp::zero(5, 3)), 0);
        assert_eq!(rank_fp(&MatFp::identity(2, 3)), 3);
        assert_eq!(rank_fp(&m(5, &[&[1, 1], &[0, 0]])), 1);
        assert_eq!(rank_fp(&m(3, &[&[1, 2], &[2, 1]])), 1);
    }

    /// Rank as the largest nonvanishing minor, by brute force over row and
    /// column subsets with a permutation-expansion determinant.
    fn rank_by_minors(a: &MatFp) -> usize {
        fn det(rows: &[Vec<i64>], p: i64) -> i64 {
            let k = rows.len();
            let mut idx: Vec<usize> = (0..k).collect();
            let mut total = 0i64;
            loop {
                let inv = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| idx[i] > idx[j]).count();
                let prod = (0..k).fold(1i64, |acc, i| acc * rows[i][idx[i]] % p);
                total = (total + if inv % 2 == 0 { prod } else { p - prod }) % p;
                if !crate::perm::next_permutation(&mut idx) {
                    break;
                }
            }
            total
        }
        let n = a.dim();
        let p = a.modulus() as i64;
        for k in (1..=n).rev() {
            let subsets: Vec<Vec<usize>> = (0u32..1 << n)
                .filter(|s| s.count_ones() as usize == k)
                .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
                .collect();
            for rs in &subsets {
                for cs in &subsets {
                    let minor: Vec<Vec<i64>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| a.get(r, c) as i64).collect()).collect();
                    if det(&minor, p) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rank_matches_minor_oracle() {
        for p in [2u32, 3] {
            let n = 3;
            let total = (p as usize).pow(9);
            for code in (0..total).step_by(7) {
                let mut c = code;
                let entries = (0..9)
                    .map(|_| {
                        let d = (c % p as usize) as u32;
                        c /= p as usize;
                        d
                    })
                    .collect();
                let a = MatFp::new(p, n, entries).unwrap();
                assert_eq!(a.rank(), rank_by_minors(&a), "{a:?}");
            }
        }
    }

    #[test]
    fn jordan_examples() {
        for p in [2, 3, 5, 7] {
            assert_eq!(jordan_length::<i64>(&MatFp::identity(p, 3)), Ratio::from_integer(0));
        }
        assert_eq!(jordan_length::<i64>(&m(5, &[&[1, 1], &[0, 1]])), Ratio::new(1, 2));
        assert_eq!(jordan_length::<i64>(&m(5, &[&[4, 0], &[0, 4]])), Ratio::from_integer(0));
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(sl_enumerate(2, 3, 1000).unwrap().len(), 24);
        assert_eq!(sl_enumerate(2, 5, 1000).unwrap().len(), 120);
        assert_eq!(sl_enumerate(3, 2, 1000).unwrap().len(), 168);
        assert_eq!(sl_order(4, 2), 20160);
        assert!(matches!(sl_enumerate(2, 5, 100), Err(Error::Capability(_))));
        assert!(sl_enumerate(2, 4, 100).is_err());
        let e = sl_enumerate(2, 3, 1000).unwrap();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn inverse_and_det() {
        for a in sl_enumerate(2, 5, 1000).unwrap() {
            assert_eq!(a.mul(&a.inverse().unwrap()), MatFp::identity(5, 2));
            assert!(a.is_special());
        }
        assert!(m(5, &[&[1, 1], &[1, 1]]).inverse().is_err());
    }

    #[test]
    fn jordan_is_pseudo_norm_vanishing_on_center() {
        for p in [3, 5] {
            let g = SlGroup::<i64>::new(2, p).unwrap();
            let en = Enumerated::new(&g).unwrap();
            let r = verify_exhaustive(&en);
            assert!(r.is_pseudo_norm());
            assert!(!r.passes(Axiom::Definite));
            let center = en.center();
            for i in 0..en.len() {
                assert_eq!(en.norm(i) == &Ratio::from_integer(0), center.contains(i));
            }
        }
    }

    #[test]
    fn block_embedding() {
        assert_eq!(block_embed(&MatFp::identity(7, 2), 6).unwrap(), MatFp::identity(7, 6));
        let t = m(3, &[&[1, 1], &[0, 1]]);
        let big = block_embed(&t, 4).unwrap();
        assert_eq!(jordan_length::<i64>(&big), Ratio::new(1, 2));
        let two_step = block_embed(&block_embed(&t, 4).unwrap(), 8).unwrap();
        assert_eq!(two_step, block_embed(&t, 8).unwrap());
        assert!(block_embed(&t, 3).is_err());
    }

    #[test]
    fn ls_probe_examples() {
        let probe = ls_constant_probe(2, 5).unwrap();
        assert_eq!(probe.rows.len(), 118);
        assert!(probe.consistent());
        assert!(probe.rows.iter().all(|r| !r.elem.is_scalar()));
        // Brute-force N(A) for a transvection: least k with C_k = G.
        let g = SlGroup::<i64>::new(2, 5).unwrap();
        let en = Enumerated::new(&g).unwrap();
        let t = MatFp::transvection(5, 2, 0, 1);
        let row = probe.rows.iter().find(|r| r.elem == t).unwrap();
        let ti = en.index_of(&t).unwrap();
        let class: Vec<usize> = (0..en.len()).map(|h| en.conj(ti, h)).chain((0..en.len()).map(|h| en.conj(en.inv(ti), h))).collect();
        let mut cur = en.set_of([en.identity()]);
        let mut k = 0;
        while cur.count_ones(..) < en.len() {
            let mut next = cur.clone();
            for x in cur.ones() {
                for &c in &class {
                    next.insert(en.mul(x, c));
                }
            }
            cur = next;
            k += 1;
        }
        assert_eq!(row.n, GenNumber::Finite(k));
        assert!(probe.to_csv().lines().count() == 119);

        // Elements of order 4 in SL_2(F_3) normally generate Q_8 only.
        let probe = ls_constant_probe(2, 3).unwrap();
        assert!(!probe.all_finite);
        assert!(probe.rows.iter().filter(|r| r.n == GenNumber::Infinite).count() == 6);
    }

    #[test]
    fn json_round_trip() {
        let a = m(5, &[&[1, 1], &[0, 1]]);
        assert_eq!(a.to_json(), serde_json::json!({"p": 5, "n": 2, "rows": [[1, 1], [0, 1]]}));
        assert_eq!(MatFp::from_json(&a.to_json()).unwrap(), a);
        let g = SlGroup::<i64>::new(2, 5).unwrap();
        assert!(g.decode(&serde_json::json!({"p": 5, "n": 2, "rows": [[2, 0], [0, 2]]})).is_err());
    }
}
