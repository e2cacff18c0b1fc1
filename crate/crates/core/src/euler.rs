//! Integer linear algebra (Smith normal form) and the Euler class of a
//! circular ordering of a finite group.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::Group;
use crate::orders::CircularOrderOracle;

pub type Matrix = Vec<Vec<i128>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow)
}

/// U·A·V = D with U, V unimodular and D diagonal, d₁ | d₂ | … ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.rank).map(|i| self.d[i][i]).collect()
    }
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> Result<Snf> {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("ragged matrix".into()));
    }
    let mut d: Matrix = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = identity(m);
    let mut v = identity(n);

    // row_i += k·row_j on d and u
    fn row_add(d: &mut Matrix, u: &mut Matrix, i: usize, j: usize, k: i128) -> Result<()> {
        for mat in [d, u] {
            for c in 0..mat[i].len() {
                let t = ck(mat[j][c].checked_mul(k))?;
                mat[i][c] = ck(mat[i][c].checked_add(t))?;
            }
        }
        Ok(())
    }
    fn col_add(d: &mut Matrix, v: &mut Matrix, i: usize, j: usize, k: i128) -> Result<()> {
        for mat in [d, v] {
            for row in mat.iter_mut() {
                let t = ck(row[j].checked_mul(k))?;
                row[i] = ck(row[i].checked_add(t))?;
            }
        }
        Ok(())
    }
    fn swap_cols(mat: &mut Matrix, i: usize, j: usize) {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    }

    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j] != 0 && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[i][t] != 0 {
                    let k = d[i][t] / d[t][t];
                    row_add(&mut d, &mut u, i, t, -k)?;
                    if d[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if d[t][j] != 0 {
                    let k = d[t][j] / d[t][t];
                    col_add(&mut d, &mut v, j, t, -k)?;
                    if d[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // move the smallest leftover in row or column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    if d[i][t] != 0 && d[i][t].abs() < d[bi][bj].abs() {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..n {
                    if d[t][j] != 0 && d[t][j].abs() < d[bi][bj].abs() {
                        (bi, bj) = (t, j);
                    }
                }
                d.swap(t, bi);
                u.swap(t, bi);
                swap_cols(&mut d, t, bj);
                swap_cols(&mut v, t, bj);
                continue;
            }
            let p = d[t][t];
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % p != 0));
            match bad {
                Some(i) => row_add(&mut d, &mut u, t, i, 1)?,
                None => break,
            }
        }
        if d[t][t] < 0 {
            for c in 0..n {
                d[t][c] = -d[t][c];
            }
            for c in 0..m {
                u[t][c] = -u[t][c];
            }
        }
        t += 1;
    }
    Ok(Snf { u, d, v, rank: t })
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = b.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s: i128 = 0;
                    for k in 0..inner {
                        s = ck(s.checked_add(ck(row[k].checked_mul(b[k][j]))?))?;
                    }
                    Ok(s)
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &Matrix) -> Result<i128> {
    let n = a.len();
    if n == 0 {
        return Ok(1);
    }
    let mut m = a.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = ck(ck(m[i][j].checked_mul(m[k][k]))?.checked_sub(ck(m[i][k].checked_mul(m[k][j]))?))?;
                m[i][j] = x / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Finitely generated abelian group ℤ^rank ⊕ ⨁ ℤ/t_i with t₁ | t₂ | ….
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<i128>,
}

impl AbelianInvariants {
    pub fn order(&self) -> Option<i128> {
        if self.rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        (self.rank == 0 && self.torsion.len() <= 1) || (self.rank == 1 && self.torsion.is_empty())
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// The abelian group ℤ^gens / (row span of the relation matrix), with
/// coordinates adapted to its Smith form.
#[derive(Debug, Clone)]
pub struct AbelianPresentation {
    pub gens: usize,
    snf: Snf,
    invariants: AbelianInvariants,
}

/// Image of a vector: residues in each nontrivial cyclic summand and the
/// free coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianImage {
    pub torsion: Vec<(i128, i128)>,
    pub free: Vec<i128>,
}

impl AbelianPresentation {
    pub fn new(relations: &[Vec<i64>], gens: usize) -> Result<Self> {
        if relations.iter().any(|r| r.len() != gens) {
            return Err(Error::InvalidInput("relation of the wrong length".into()));
        }
        let rel: Vec<Vec<i64>> = if relations.is_empty() { vec![vec![0; gens]] } else { relations.to_vec() };
        let snf = smith_normal_form(&rel)?;
        let diag = snf.diagonal();
        let invariants = AbelianInvariants { rank: gens - snf.rank, torsion: diag.into_iter().filter(|&x| x > 1).collect() };
        Ok(AbelianPresentation { gens, snf, invariants })
    }

    pub fn invariants(&self) -> &AbelianInvariants {
        &self.invariants
    }

    /// Row vector x ↦ x·V, read in the Smith basis.
    pub fn image(&self, x: &[i64]) -> Result<AbelianImage> {
        if x.len() != self.gens {
            return Err(Error::InvalidInput("vector of the wrong length".into()));
        }
        let mut y = vec![0i128; self.gens];
        for (j, yj) in y.iter_mut().enumerate() {
            for (i, &xi) in x.iter().enumerate() {
                *yj = ck(yj.checked_add(ck((xi as i128).checked_mul(self.snf.v[i][j]))?))?;
            }
        }
        let diag = self.snf.diagonal();
        let torsion = diag
            .iter()
            .enumerate()
            .filter(|(_, &dd)| dd > 1)
            .map(|(i, &dd)| (y[i].rem_euclid(dd), dd))
            .collect();
        let free = y[self.snf.rank..].to_vec();
        Ok(AbelianImage { torsion, free })
    }

    /// Order of the class of x; None when it has infinite order.
    pub fn order_of(&self, x: &[i64]) -> Result<Option<i128>> {
        let img = self.image(x)?;
        if img.free.iter().any(|&f| f != 0) {
            return Ok(None);
        }
        let mut ord: i128 = 1;
        for (r, dd) in img.torsion {
            let o = dd / gcd128(r, dd);
            ord = ord / gcd128(ord, o) * o;
        }
        Ok(Some(ord))
    }
}

pub fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// f_c of a circular ordering of a finite group, on the indices of a
/// fixed element list whose first entry is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleTable {
    pub mul: Vec<Vec<usize>>,
    pub f: Vec<Vec<i64>>,
}

impl CocycleTable {
    pub fn from_order<G: Group>(c: &CircularOrderOracle<G>) -> Result<Self> {
        let group = c.group();
        let mut elems = group
            .elements()
            .ok_or_else(|| Error::InvalidInput("the group must be finite and enumerable".into()))?;
        let e = group.identity();
        elems.retain(|x| *x != e);
        elems.insert(0, e);
        let index: HashMap<&G::Elem, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let ext = crate::extensions::CentralExtension::new(c.clone());
        let n = elems.len();
        let mut mul = vec![vec![0; n]; n];
        let mut f = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = group.mul(&elems[i], &elems[j])?;
                mul[i][j] = *index.get(&p).ok_or(Error::ForeignElement)?;
                f[i][j] = ext.cocycle(&elems[i], &elems[j])?;
            }
        }
        let t = CocycleTable { mul, f };
        t.validate()?;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mul.len();
        if self.f.len() != n || self.f.iter().any(|r| r.len() != n) || self.mul.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedCocycle("table shape".into()));
        }
        if self.f.iter().flatten().any(|&x| x != 0 && x != 1) {
            return Err(Error::MalformedCocycle("entries must be 0 or 1".into()));
        }
        let m = &self.mul;
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    if self.f[g][h] + self.f[m[g][h]][k] != self.f[h][k] + self.f[g][m[h][k]] {
                        return Err(Error::MalformedCocycle(format!("cocycle identity fails at ({g}, {h}, {k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows (g, h), columns η(x) for x ≠ id: η(g) − η(gh) + η(h).
    fn coboundary_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.order();
        let mut rows = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                let mut r = vec![0i64; n.saturating_sub(1)];
                let mut add = |x: usize, v: i64| {
                    if x != 0 {
                        r[x - 1] += v;
                    }
                };
                add(g, 1);
                add(self.mul[g][h], -1);
                add(h, 1);
                rows.push(r);
            }
        }
        rows
    }
}

/// The least k ≥ 1 with k·F a coboundary, read off as the order of F in
/// the cokernel of the coboundary map.
pub fn euler_class_order(t: &CocycleTable) -> Result<u64> {
    t.validate()?;
    let n = t.order();
    if n <= 1 {
        return Ok(1);
    }
    let a = t.coboundary_matrix();
    let snf = smith_normal_form(&a)?;
    let b: Vec<i128> = t.f.iter().flatten().map(|&x| x as i128).collect();
    let c = mat_vec(&snf.u, &b)?;
    let mut k: i128 = 1;
    for (i, &ci) in c.iter().enumerate() {
        if i < snf.rank {
            let dd = snf.d[i][i];
            let need = dd / gcd128(dd, ci);
            k = k / gcd128(k, need) * need;
        } else if ci != 0 {
            return Err(Error::Internal("class has infinite order over a finite group".into()));
        }
    }
    u64::try_from(k).map_err(|_| Error::Overflow)
}

fn mat_vec(a: &Matrix, x: &[i128]) -> Result<Vec<i128>> {
    a.iter()
        .map(|row| {
            row.iter().zip(x).try_fold(0i128, |s, (&r, &xi)| ck(s.checked_add(ck(r.checked_mul(xi))?)))
        })
        .collect()
}

/// η with η(id) = 0 and k·F(g, h) = η(g) − η(gh) + η(h).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaFunction {
    pub k: i64,
    pub eta: Vec<i64>,
}

pub fn eta_solve(t: &CocycleTable, k: i64) -> Result<EtaFunction> {
    t.validate()?;
    let n = t.order();
    if n <= 1 {
        return Ok(EtaFunction { k, eta: vec![0; n] });
    }
    let a = t.coboundary_matrix();
    let snf = smith_normal_form(&a)?;
    let b: Vec<i128> = t.f.iter().flatten().map(|&x| x as i128 * k as i128).collect();
    let c = mat_vec(&snf.u, &b)?;
    let vars = n - 1;
    let mut y = vec![0i128; vars];
    for (i, &ci) in c.iter().enumerate() {
        if i < snf.rank {
            let dd = snf.d[i][i];
            if ci % dd != 0 {
                return Err(Error::NoSolution(format!("{k}·F is not a coboundary")));
            }
            y[i] = ci / dd;
        } else if ci != 0 {
            return Err(Error::NoSolution(format!("{k}·F is not a coboundary")));
        }
    }
    let x = mat_vec(&snf.v, &y)?;
    let mut eta = vec![0i64];
    for xi in x {
        eta.push(i64::try_from(xi).map_err(|_| Error::Overflow)?);
    }
    let sol = EtaFunction { k, eta };
    for g in 0..n {
        for h in 0..n {
            if k * t.f[g][h] != sol.eta[g] - sol.eta[t.mul[g][h]] + sol.eta[h] {
                return Err(Error::Internal("η fails its defining equation".into()));
            }
        }
    }
    Ok(sol)
}

/// H = ker(η mod k), with G/H ≅ ℤ/k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoNormalSubgroup {
    pub k: u64,
    /// Kernel elements as indices into the cocycle table (identity is 0).
    pub kernel: Vec<usize>,
    pub eta: EtaFunction,
}

pub fn lo_normal_subgroup<G: Group>(c: &CircularOrderOracle<G>) -> Result<LoNormalSubgroup> {
    let t = CocycleTable::from_order(c)?;
    let n = t.order();
    let k = euler_class_order(&t)?;
    let eta = eta_solve(&t, k as i64)?;
    let psi: Vec<i64> = eta.eta.iter().map(|x| x.rem_euclid(k as i64)).collect();
    for g in 0..n {
        for h in 0..n {
            if psi[t.mul[g][h]] != (psi[g] + psi[h]).rem_euclid(k as i64) {
                return Err(Error::Internal("η mod k is not a homomorphism".into()));
            }
        }
    }
    let mut image: Vec<i64> = psi.clone();
    image.sort();
    image.dedup();
    if image.len() as u64 != k {
        return Err(Error::Internal("η mod k is not surjective".into()));
    }
    let kernel: Vec<usize> = (0..n).filter(|&g| psi[g] == 0).collect();
    if kernel != [0] || k as usize != n {
        return Err(Error::Internal(format!("expected trivial kernel and k = {n}, got {} and {k}", kernel.len())));
    }
    Ok(LoNormalSubgroup { k, kernel, eta })
}
