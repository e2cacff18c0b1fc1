//! Concrete groups: cyclic groups, lattices, free products of cyclic
//! groups, small finite groups given by multiplication tables, and the
//! rational points of the circle.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::CirclePoint;

/// A group with exact, canonical element representatives.
///
/// Two representatives are equal as group elements iff they compare equal
/// with `==`. Operations are fallible because some groups (quotients by a
/// cofinal central element, central extensions of a fallible order) can
/// only compute products within a step budget.
pub trait Group: Send + Sync + 'static {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn contains(&self, a: &Self::Elem) -> bool;

    /// All elements when the group is finite and small enough to list.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, k: i64) -> Result<Self::Elem> {
        let base = if k < 0 { self.inv(a)? } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq)?;
            }
        }
        Ok(acc)
    }

    /// `a⁻¹ b`, the quantity every left-invariant comparison is built on.
    fn left_quotient(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.mul(&self.inv(a)?, b)
    }
}

/// Product with membership checks on both operands.
pub fn multiply<G: Group>(g: &G, a: &G::Elem, b: &G::Elem) -> Result<G::Elem> {
    if !g.contains(a) || !g.contains(b) {
        return Err(Error::ForeignElement);
    }
    g.mul(a, b)
}

/// Inverse with a membership check.
pub fn inverse<G: Group>(g: &G, a: &G::Elem) -> Result<G::Elem> {
    if !g.contains(a) {
        return Err(Error::ForeignElement);
    }
    g.inv(a)
}

/// Smallest q ≥ 1 with a^q = 1, searching up to `bound`.
pub fn element_order<G: Group>(g: &G, a: &G::Elem, bound: u64) -> Result<Option<u64>> {
    let mut x = a.clone();
    for q in 1..=bound {
        if g.is_identity(&x) {
            return Ok(Some(q));
        }
        x = g.mul(&x, a)?;
    }
    Ok(None)
}

/// ℤ/n, or ℤ when `modulus` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cyclic {
    pub modulus: Option<u64>,
}

impl Cyclic {
    pub fn integers() -> Self {
        Cyclic { modulus: None }
    }

    pub fn finite(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cyclic group needs modulus ≥ 1".into()));
        }
        Ok(Cyclic { modulus: Some(n) })
    }

    pub fn reduce(&self, x: i64) -> i64 {
        match self.modulus {
            Some(n) => x.rem_euclid(n as i64),
            None => x,
        }
    }
}

impl Group for Cyclic {
    type Elem = i64;

    fn identity(&self) -> i64 {
        0
    }

    fn mul(&self, a: &i64, b: &i64) -> Result<i64> {
        match self.modulus {
            Some(n) => Ok((a + b).rem_euclid(n as i64)),
            None => a.checked_add(*b).ok_or(Error::Overflow),
        }
    }

    fn inv(&self, a: &i64) -> Result<i64> {
        match self.modulus {
            Some(n) => Ok((-a).rem_euclid(n as i64)),
            None => a.checked_neg().ok_or(Error::Overflow),
        }
    }

    fn contains(&self, a: &i64) -> bool {
        match self.modulus {
            Some(n) => (0..n as i64).contains(a),
            None => true,
        }
    }

    fn elements(&self) -> Option<Vec<i64>> {
        self.modulus.map(|n| (0..n as i64).collect())
    }

    fn pow(&self, a: &i64, k: i64) -> Result<i64> {
        match self.modulus {
            Some(n) => {
                let n = n as i128;
                Ok(((*a as i128 * k as i128).rem_euclid(n)) as i64)
            }
            None => a.checked_mul(k).ok_or(Error::Overflow),
        }
    }
}

/// ℤ^N with componentwise addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Lattice<const N: usize>;

impl<const N: usize> Group for Lattice<N> {
    type Elem = [i64; N];

    fn identity(&self) -> [i64; N] {
        [0; N]
    }

    fn mul(&self, a: &[i64; N], b: &[i64; N]) -> Result<[i64; N]> {
        let mut out = [0; N];
        for i in 0..N {
            out[i] = a[i].checked_add(b[i]).ok_or(Error::Overflow)?;
        }
        Ok(out)
    }

    fn inv(&self, a: &[i64; N]) -> Result<[i64; N]> {
        let mut out = [0; N];
        for i in 0..N {
            out[i] = a[i].checked_neg().ok_or(Error::Overflow)?;
        }
        Ok(out)
    }

    fn contains(&self, _: &[i64; N]) -> bool {
        true
    }
}

/// A syllable (factor index, exponent) of a word in a free product.
pub type Syllable = (usize, i64);
/// A reduced word: adjacent syllables lie in different factors and no
/// exponent is trivial in its factor.
pub type Word = Vec<Syllable>;

/// Free product of cyclic groups; `None` stands for an infinite cyclic
/// factor, `Some(a)` for ℤ/a with a ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeProduct {
    pub factors: Vec<Option<u64>>,
}

impl FreeProduct {
    pub fn new(factors: Vec<Option<u64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("free product needs at least one factor".into()));
        }
        if factors.iter().any(|f| matches!(f, Some(a) if *a < 2)) {
            return Err(Error::InvalidInput("finite free factors need order ≥ 2".into()));
        }
        Ok(FreeProduct { factors })
    }

    fn normalize(&self, i: usize, e: i64) -> Result<i64> {
        match self.factors.get(i) {
            None => Err(Error::InvalidFactor(i)),
            Some(Some(a)) => Ok(e.rem_euclid(*a as i64)),
            Some(None) => Ok(e),
        }
    }

    /// The generator of factor `i` as a one-syllable word.
    pub fn generator(&self, i: usize) -> Result<Word> {
        self.reduce(&[(i, 1)])
    }

    /// Reduce an arbitrary syllable sequence to its normal form.
    pub fn reduce(&self, raw: &[Syllable]) -> Result<Word> {
        free_reduce(&self.factors, raw)
    }

    /// Syllable length of a reduced word.
    pub fn length(w: &Word) -> usize {
        w.len()
    }

    /// Every reduced word of syllable length at most `max_len` whose
    /// exponents in infinite factors lie in [-exp_bound, exp_bound].
    pub fn ball(&self, max_len: usize, exp_bound: i64) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Word> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for (i, f) in self.factors.iter().enumerate() {
                    if w.last().map(|s| s.0) == Some(i) {
                        continue;
                    }
                    let exps: Vec<i64> = match f {
                        Some(a) => (1..*a as i64).collect(),
                        None => (-exp_bound..=exp_bound).filter(|e| *e != 0).collect(),
                    };
                    for e in exps {
                        let mut v = w.clone();
                        v.push((i, e));
                        next.push(v);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort();
        out
    }
}

/// Stack-based free reduction: each syllable is normalized in its factor
/// and merged into the top of the stack when the factors agree.
pub fn free_reduce(factors: &[Option<u64>], raw: &[Syllable]) -> Result<Word> {
    let norm = |i: usize, e: i64| -> Result<i64> {
        match factors.get(i) {
            None => Err(Error::InvalidFactor(i)),
            Some(Some(a)) => Ok(e.rem_euclid(*a as i64)),
            Some(None) => Ok(e),
        }
    };
    let mut stack: Word = Vec::with_capacity(raw.len());
    for &(i, e) in raw {
        let e = norm(i, e)?;
        if e == 0 {
            continue;
        }
        match stack.last() {
            Some(&(j, f)) if j == i => {
                stack.pop();
                let m = norm(i, f.checked_add(e).ok_or(Error::Overflow)?)?;
                if m != 0 {
                    stack.push((i, m));
                }
            }
            _ => stack.push((i, e)),
        }
    }
    Ok(stack)
}

impl Group for FreeProduct {
    type Elem = Word;

    fn identity(&self) -> Word {
        Vec::new()
    }

    fn mul(&self, a: &Word, b: &Word) -> Result<Word> {
        let mut raw = a.clone();
        raw.extend_from_slice(b);
        self.reduce(&raw)
    }

    fn inv(&self, a: &Word) -> Result<Word> {
        let raw: Vec<Syllable> = a.iter().rev().map(|&(i, e)| (i, -e)).collect();
        self.reduce(&raw)
    }

    fn contains(&self, a: &Word) -> bool {
        let mut prev = None;
        for &(i, e) in a {
            if Some(i) == prev {
                return false;
            }
            match self.normalize(i, e) {
                Ok(n) if n == e && e != 0 => {}
                _ => return false,
            }
            prev = Some(i);
        }
        true
    }
}

/// A raw multiplication table: `mul[i][j]` is the index of i·j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    pub name: String,
    pub mul: Vec<Vec<usize>>,
}

/// Problems found when checking a multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TableDiagnostic {
    Empty,
    NotSquare { row: usize, len: usize },
    OutOfRange { row: usize, col: usize, value: usize },
    NoIdentity,
    NoInverse { element: usize },
    NotAssociative { a: usize, b: usize, c: usize },
}

const MAX_ASSOCIATIVITY_REPORTS: usize = 8;

/// Check the group axioms on a table; an empty list means it is a group.
pub fn validate_table(t: &FiniteGroupTable) -> Vec<TableDiagnostic> {
    let n = t.mul.len();
    if n == 0 {
        return vec![TableDiagnostic::Empty];
    }
    let mut out = Vec::new();
    for (r, row) in t.mul.iter().enumerate() {
        if row.len() != n {
            out.push(TableDiagnostic::NotSquare { row: r, len: row.len() });
        }
        for (c, &v) in row.iter().enumerate() {
            if v >= n {
                out.push(TableDiagnostic::OutOfRange { row: r, col: c, value: v });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let m = &t.mul;
    let identity = (0..n).find(|&e| (0..n).all(|x| m[e][x] == x && m[x][e] == x));
    let Some(e) = identity else {
        out.push(TableDiagnostic::NoIdentity);
        return out;
    };
    for x in 0..n {
        if !(0..n).any(|y| m[x][y] == e && m[y][x] == e) {
            out.push(TableDiagnostic::NoInverse { element: x });
        }
    }
    let mut reported = 0;
    'outer: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if m[m[a][b]][c] != m[a][m[b][c]] {
                    out.push(TableDiagnostic::NotAssociative { a, b, c });
                    reported += 1;
                    if reported >= MAX_ASSOCIATIVITY_REPORTS {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

/// A validated finite group on the indices 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mul: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn new(table: FiniteGroupTable) -> Result<Self> {
        let diags = validate_table(&table);
        if !diags.is_empty() {
            return Err(Error::InvalidTable(format!("{:?}", diags)));
        }
        let n = table.mul.len();
        let m = &table.mul;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| m[e][x] == x))
            .expect("validated table has an identity");
        let inverse = (0..n)
            .map(|x| (0..n).find(|&y| m[x][y] == identity).expect("validated"))
            .collect();
        Ok(FiniteGroup { name: table.name, mul: table.mul, inverse, identity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }
}

impl Group for FiniteGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: &usize, b: &usize) -> Result<usize> {
        self.mul
            .get(*a)
            .and_then(|r| r.get(*b))
            .copied()
            .ok_or(Error::ForeignElement)
    }

    fn inv(&self, a: &usize) -> Result<usize> {
        self.inverse.get(*a).copied().ok_or(Error::ForeignElement)
    }

    fn contains(&self, a: &usize) -> bool {
        *a < self.order()
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.order()).collect())
    }
}

/// The rational points of ℝ/ℤ under addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CircleGroup;

impl Group for CircleGroup {
    type Elem = CirclePoint;

    fn identity(&self) -> CirclePoint {
        CirclePoint::zero()
    }

    fn mul(&self, a: &CirclePoint, b: &CirclePoint) -> Result<CirclePoint> {
        Ok(a.add(b))
    }

    fn inv(&self, a: &CirclePoint) -> Result<CirclePoint> {
        Ok(a.neg())
    }

    fn contains(&self, _: &CirclePoint) -> bool {
        true
    }
}

/// Catalog of small finite groups used throughout the crate and its tests.
pub mod catalog {
    use super::*;

    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::InvalidInput("cyclic group needs order ≥ 1".into()));
        }
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(FiniteGroupTable { name: format!("Z/{n}"), mul })
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
        let (na, nb) = (a.order(), b.order());
        let mut mul = vec![vec![0; na * nb]; na * nb];
        for x in 0..na * nb {
            for y in 0..na * nb {
                let (xa, xb) = (x / nb, x % nb);
                let (ya, yb) = (y / nb, y % nb);
                mul[x][y] = a.product(xa, ya) * nb + b.product(xb, yb);
            }
        }
        FiniteGroup::new(FiniteGroupTable { name: format!("{} x {}", a.name(), b.name()), mul })
    }

    pub fn klein4() -> Result<FiniteGroup> {
        let mut g = direct_product(&cyclic(2)?, &cyclic(2)?)?;
        g.name = "V4".into();
        Ok(g)
    }

    pub fn z2xz4() -> Result<FiniteGroup> {
        direct_product(&cyclic(2)?, &cyclic(4)?)
    }

    /// Closure of a set of permutations under composition, listed with the
    /// identity first and the rest in lexicographic order.
    pub fn permutation_group(name: &str, gens: &[Vec<usize>]) -> Result<FiniteGroup> {
        let d = gens.first().map(|g| g.len()).unwrap_or(0);
        if gens.iter().any(|g| g.len() != d) {
            return Err(Error::InvalidInput("generators act on different sets".into()));
        }
        let id: Vec<usize> = (0..d).collect();
        let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { t.iter().map(|&x| s[x]).collect() };
        let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
        seen.insert(id.clone(), ());
        let mut queue = VecDeque::from([id.clone()]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q = compose(&p, g);
                if seen.insert(q.clone(), ()).is_none() {
                    queue.push_back(q);
                }
            }
        }
        let mut elems: Vec<Vec<usize>> = seen.into_keys().filter(|p| *p != id).collect();
        elems.insert(0, id);
        let index: HashMap<&Vec<usize>, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mul = elems
            .iter()
            .map(|s| elems.iter().map(|t| index[&compose(s, t)]).collect())
            .collect();
        FiniteGroup::new(FiniteGroupTable { name: name.into(), mul })
    }

    pub fn s3() -> Result<FiniteGroup> {
        permutation_group("S3", &[vec![1, 0, 2], vec![1, 2, 0]])
    }

    pub fn d4() -> Result<FiniteGroup> {
        permutation_group("D4", &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
    }

    /// Quaternion group: index 2u + s encodes (-1)^s · unit[u] with units 1, i, j, k.
    pub fn q8() -> Result<FiniteGroup> {
        // unit products as (sign flip, unit)
        let unit = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let mul = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (ux, sx) = (x / 2, x % 2);
                        let (uy, sy) = (y / 2, y % 2);
                        let (f, u) = unit(ux, uy);
                        2 * u + (sx + sy + f) % 2
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::new(FiniteGroupTable { name: "Q8".into(), mul })
    }

    /// Look a catalog group up by name.
    pub fn by_name(name: &str) -> Result<FiniteGroup> {
        let key = name.trim().to_ascii_lowercase().replace(['_', ' ', '/'], "");
        match key.as_str() {
            "s3" => s3(),
            "d4" | "d8" => d4(),
            "q8" => q8(),
            "v4" | "klein4" | "z2xz2" => klein4(),
            "z2xz4" => z2xz4(),
            k if k.starts_with('z') || k.starts_with('c') => {
                let n: usize = k[1..]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("unknown group {name:?}")))?;
                cyclic(n)
            }
            _ => Err(Error::InvalidInput(format!("unknown group {name:?}"))),
        }
    }
}
