//! Left and circular orderings as exact oracles, the standard ways of
//! building new circular orderings out of old ones, and an exhaustive
//! axiom checker.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{Cyclic, FreeProduct, Group, Lattice, Word};
use crate::rational::{gcd, q, CirclePoint};

pub type SignFn<E> = Arc<dyn Fn(&E) -> Result<i8> + Send + Sync>;
pub type TripleFn<E> = Arc<dyn Fn(&E, &E, &E) -> Result<i8> + Send + Sync>;
pub type RotationTag<E> = Arc<dyn Fn(&E) -> Result<Option<CirclePoint>> + Send + Sync>;

/// A left-invariant strict total order, given by the sign of each element:
/// +1 on the positive cone, -1 on its inverse, 0 at the identity.
pub struct LeftOrderOracle<G: Group> {
    group: Arc<G>,
    name: String,
    sign: SignFn<G::Elem>,
}

impl<G: Group> Clone for LeftOrderOracle<G> {
    fn clone(&self) -> Self {
        LeftOrderOracle { group: self.group.clone(), name: self.name.clone(), sign: self.sign.clone() }
    }
}

impl<G: Group> fmt::Debug for LeftOrderOracle<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeftOrderOracle({})", self.name)
    }
}

impl<G: Group> LeftOrderOracle<G> {
    pub fn new(
        group: Arc<G>,
        name: impl Into<String>,
        sign: impl Fn(&G::Elem) -> Result<i8> + Send + Sync + 'static,
    ) -> Self {
        LeftOrderOracle { group, name: name.into(), sign: Arc::new(sign) }
    }

    pub fn group(&self) -> &Arc<G> {
        &self.group
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sign(&self, g: &G::Elem) -> Result<i8> {
        (self.sign)(g)
    }

    /// Compare a and b: a < b iff a⁻¹b is positive.
    pub fn compare(&self, a: &G::Elem, b: &G::Elem) -> Result<Ordering> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let s = self.sign(&self.group.left_quotient(a, b)?)?;
        Ok(match s {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => return Err(Error::Internal(format!("left order {} gave sign {s} to a non-identity", self.name))),
        })
    }
}

/// A left-invariant circular ordering c: G³ → {-1, 0, 1}, optionally
/// tagged with exact rotation numbers known from its construction.
pub struct CircularOrderOracle<G: Group> {
    group: Arc<G>,
    name: String,
    c: TripleFn<G::Elem>,
    rotation: Option<RotationTag<G::Elem>>,
}

impl<G: Group> Clone for CircularOrderOracle<G> {
    fn clone(&self) -> Self {
        CircularOrderOracle {
            group: self.group.clone(),
            name: self.name.clone(),
            c: self.c.clone(),
            rotation: self.rotation.clone(),
        }
    }
}

impl<G: Group> fmt::Debug for CircularOrderOracle<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircularOrderOracle({})", self.name)
    }
}

impl<G: Group> CircularOrderOracle<G> {
    pub fn new(
        group: Arc<G>,
        name: impl Into<String>,
        c: impl Fn(&G::Elem, &G::Elem, &G::Elem) -> Result<i8> + Send + Sync + 'static,
    ) -> Self {
        CircularOrderOracle { group, name: name.into(), c: Arc::new(c), rotation: None }
    }

    pub fn with_rotation_tag(
        mut self,
        tag: impl Fn(&G::Elem) -> Result<Option<CirclePoint>> + Send + Sync + 'static,
    ) -> Self {
        self.rotation = Some(Arc::new(tag));
        self
    }

    pub fn without_rotation_tag(mut self) -> Self {
        self.rotation = None;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn group(&self) -> &Arc<G> {
        &self.group
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: &G::Elem, b: &G::Elem, c: &G::Elem) -> Result<i8> {
        (self.c)(a, b, c)
    }

    /// Rotation number known from the construction, if any.
    pub fn tagged_rotation(&self, g: &G::Elem) -> Result<Option<CirclePoint>> {
        match &self.rotation {
            Some(t) => t(g),
            None => Ok(None),
        }
    }

    pub fn has_rotation_tag(&self) -> bool {
        self.rotation.is_some()
    }
}

/// +1 when sorting (a, b, c) ascending is an even permutation, -1 when
/// odd, 0 when two of them coincide.
pub fn sort_sign<T>(a: &T, b: &T, c: &T, cmp: impl Fn(&T, &T) -> Result<Ordering>) -> Result<i8> {
    let ab = cmp(a, b)?;
    let bc = cmp(b, c)?;
    let ac = cmp(a, c)?;
    if ab == Ordering::Equal || bc == Ordering::Equal || ac == Ordering::Equal {
        return Ok(0);
    }
    let inversions = [ab, bc, ac].iter().filter(|o| **o == Ordering::Greater).count();
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// The usual order on ℤ.
pub fn standard_left_order_z() -> LeftOrderOracle<Cyclic> {
    LeftOrderOracle::new(Arc::new(Cyclic::integers()), "standard order on Z", |g: &i64| Ok(g.signum() as i8))
}

/// Lexicographic order on ℤ^N (first nonzero coordinate decides).
pub fn lex_left_order_lattice<const N: usize>() -> LeftOrderOracle<Lattice<N>> {
    LeftOrderOracle::new(Arc::new(Lattice::<N>), format!("lexicographic order on Z^{N}"), |g: &[i64; N]| {
        Ok(g.iter().find(|x| **x != 0).map(|x| x.signum() as i8).unwrap_or(0))
    })
}

/// The circular ordering obtained by reading a left order cyclically.
pub fn secret_left_order<G: Group>(lo: &LeftOrderOracle<G>) -> CircularOrderOracle<G> {
    let lo2 = lo.clone();
    CircularOrderOracle::new(lo.group().clone(), format!("cyclic reading of {}", lo.name()), move |a, b, c| {
        if a == b || b == c || a == c {
            return Ok(0);
        }
        sort_sign(a, b, c, |x, y| lo2.compare(x, y))
    })
    .with_rotation_tag(|_| Ok(Some(CirclePoint::zero())))
}

/// Counterclockwise order of rational points on the circle.
pub fn standard_circle_order() -> CircularOrderOracle<crate::groups::CircleGroup> {
    CircularOrderOracle::new(Arc::new(crate::groups::CircleGroup), "standard order on Q/Z", |a: &CirclePoint, b, c| {
        sort_sign(a, b, c, |x, y| Ok(x.cmp(y)))
    })
    .with_rotation_tag(|g| Ok(Some(*g)))
}

/// The circular ordering of ℤ/n pulled back along g ↦ e^{2πi kg/n}.
pub fn cyclic_rot_order(n: u64, k: i64) -> Result<CircularOrderOracle<Cyclic>> {
    if n == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if gcd(k, n as i64) != 1 {
        return Err(Error::InvalidInput(format!("multiplier {k} is not a unit mod {n}")));
    }
    let group = Arc::new(Cyclic::finite(n)?);
    let n = n as i64;
    let pos = move |g: &i64| (k as i128 * *g as i128).rem_euclid(n as i128) as i64;
    Ok(CircularOrderOracle::new(group, format!("rotation order on Z/{n} with multiplier {k}"), move |a, b, c| {
        sort_sign(a, b, c, |x, y| Ok(pos(x).cmp(&pos(y))))
    })
    .with_rotation_tag(move |g| Ok(Some(CirclePoint::new(q(pos(g), n))))))
}

/// Maps describing 1 → K → G → H → 1: the projection to H, and the
/// inclusion read backwards (None off the kernel).
pub struct ExactSequence<G: Group, K: Group, H: Group> {
    pub quotient: Arc<dyn Fn(&G::Elem) -> Result<H::Elem> + Send + Sync>,
    pub to_kernel: Arc<dyn Fn(&G::Elem) -> Result<Option<K::Elem>> + Send + Sync>,
}

impl<G: Group, K: Group, H: Group> Clone for ExactSequence<G, K, H> {
    fn clone(&self) -> Self {
        ExactSequence { quotient: self.quotient.clone(), to_kernel: self.to_kernel.clone() }
    }
}

impl<G: Group, K: Group, H: Group> ExactSequence<G, K, H> {
    pub fn new(
        quotient: impl Fn(&G::Elem) -> Result<H::Elem> + Send + Sync + 'static,
        to_kernel: impl Fn(&G::Elem) -> Result<Option<K::Elem>> + Send + Sync + 'static,
    ) -> Self {
        ExactSequence { quotient: Arc::new(quotient), to_kernel: Arc::new(to_kernel) }
    }

    fn kernel_elem(&self, g: &G::Elem) -> Result<K::Elem> {
        (self.to_kernel)(g)?.ok_or(Error::KernelUndecidable)
    }
}

/// Lexicographic circular ordering from a left-ordered kernel and a
/// circularly ordered quotient. Each coset is laid out as an interval in
/// kernel order, and the intervals are arranged by the quotient order.
pub fn lex_circular_order<G: Group, K: Group, H: Group>(
    group: Arc<G>,
    seq: ExactSequence<G, K, H>,
    kernel: LeftOrderOracle<K>,
    quotient: CircularOrderOracle<H>,
) -> CircularOrderOracle<G> {
    let name = format!("lexicographic order from {} and {}", kernel.name(), quotient.name());
    let g2 = group.clone();
    let s2 = seq.clone();
    let d = quotient.clone();
    let c = move |a: &G::Elem, b: &G::Elem, c: &G::Elem| -> Result<i8> {
        if a == b || b == c || a == c {
            return Ok(0);
        }
        let (qa, qb, qc) = ((s2.quotient)(a)?, (s2.quotient)(b)?, (s2.quotient)(c)?);
        let same = (qa == qb, qb == qc, qc == qa);
        let kernel_sign = |x: &G::Elem, y: &G::Elem| -> Result<i8> {
            kernel.sign(&s2.kernel_elem(&g2.left_quotient(x, y)?)?)
        };
        match same {
            (false, false, false) => d.eval(&qa, &qb, &qc),
            (true, true, _) | (true, _, true) | (_, true, true) => {
                let k1 = kernel.group().identity();
                let k2 = s2.kernel_elem(&g2.left_quotient(a, b)?)?;
                let k3 = s2.kernel_elem(&g2.left_quotient(a, c)?)?;
                sort_sign(&k1, &k2, &k3, |x, y| kernel.compare(x, y))
            }
            // rotate so that the pair in a common coset comes first
            (true, false, false) => kernel_sign(a, b),
            (false, true, false) => kernel_sign(b, c),
            (false, false, true) => kernel_sign(c, a),
        }
    };
    let s3 = seq;
    let d2 = quotient;
    CircularOrderOracle::new(group, name, c).with_rotation_tag(move |g| d2.tagged_rotation(&(s3.quotient)(g)?))
}

/// Lexicographic left order: quotient sign first, kernel sign on the kernel.
pub fn lex_left_order<G: Group, K: Group, H: Group>(
    group: Arc<G>,
    seq: ExactSequence<G, K, H>,
    kernel: LeftOrderOracle<K>,
    quotient: LeftOrderOracle<H>,
) -> LeftOrderOracle<G> {
    let name = format!("lexicographic left order from {} and {}", kernel.name(), quotient.name());
    LeftOrderOracle::new(group, name, move |g| {
        let s = quotient.sign(&(seq.quotient)(g)?)?;
        if s != 0 {
            return Ok(s);
        }
        kernel.sign(&seq.kernel_elem(g)?)
    })
}

/// Default circular ordering of each factor: rotation order on ℤ/a, the
/// cyclic reading of the usual order on ℤ.
pub fn default_factor_orders(fp: &FreeProduct) -> Result<Vec<CircularOrderOracle<Cyclic>>> {
    fp.factors
        .iter()
        .map(|f| match f {
            Some(a) => cyclic_rot_order(*a, 1),
            None => Ok(secret_left_order(&standard_left_order_z())),
        })
        .collect()
}

/// Circular ordering of a free product of cyclic groups read off the
/// boundary of its planar Bass–Serre tree.
///
/// Element vertex g is joined to the coset vertices gG_0, …, gG_{n-1} in
/// that cyclic order; coset vertices order their neighbours by the factor
/// ordering. Each element vertex is placed on the contour at its corner
/// between the last and the first edge, which is preserved by the action,
/// so the resulting cyclic order is left-invariant.
pub fn planar_free_product_order(
    fp: Arc<FreeProduct>,
    factor_orders: Vec<CircularOrderOracle<Cyclic>>,
) -> Result<CircularOrderOracle<FreeProduct>> {
    if factor_orders.len() != fp.factors.len() {
        return Err(Error::InvalidInput("one factor ordering per free factor is required".into()));
    }
    for (o, f) in factor_orders.iter().zip(&fp.factors) {
        if o.group().modulus != *f {
            return Err(Error::InvalidInput("factor ordering lives on a different cyclic group".into()));
        }
    }
    let n = fp.factors.len();
    let orders = Arc::new(factor_orders);
    let fp2 = fp.clone();
    let before = move |a: &Word, b: &Word| -> Result<bool> { contour_before(n, &orders, a, b) };
    Ok(CircularOrderOracle::new(fp, "planar free product order", move |u: &Word, v: &Word, w: &Word| {
        if u == v || v == w || u == w {
            return Ok(0);
        }
        let a = fp2.left_quotient(u, v)?;
        let b = fp2.left_quotient(u, w)?;
        Ok(if before(&a, &b)? { 1 } else { -1 })
    }))
}

/// Whether a precedes b on the contour cut at the identity's distinguished
/// corner. Both words are reduced, distinct and nontrivial.
fn contour_before(n: usize, orders: &[CircularOrderOracle<Cyclic>], a: &Word, b: &Word) -> Result<bool> {
    let t = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
    let n = n as i64;
    // key of a word at the vertex reached after the common prefix
    let key = |w: &Word| -> i64 {
        if t == 0 {
            return match w.first() {
                None => -1,
                Some(&(f, _)) => 2 * f as i64,
            };
        }
        let arrived = w[t - 1].0 as i64;
        let slot = |j: i64| (j - arrived - 1).rem_euclid(n);
        match w.get(t) {
            Some(&(f, _)) => 2 * slot(f as i64),
            None if arrived == n - 1 => -1,
            None => 2 * slot(n - 1) + 1,
        }
    };
    let (ka, kb) = (key(a), key(b));
    if ka != kb {
        return Ok(ka < kb);
    }
    // same factor next: order the two children of the coset vertex
    let (f, ea) = a[t];
    let (_, eb) = b[t];
    Ok(orders[f].eval(&0, &ea, &eb)? == 1)
}

/// Circular ordering of ℤ with rot(1) = r, for rational r = p/m in lowest
/// terms: lexicographic from mℤ and the rotation order on ℤ/m.
pub fn rational_rotation_order_on_z(r: CirclePoint) -> Result<CircularOrderOracle<Cyclic>> {
    let p = *r.value().numer();
    let m = *r.value().denom();
    if m == 1 {
        return Ok(secret_left_order(&standard_left_order_z()));
    }
    lex_from_cyclic_quotient(m, p, 1).map(|c| c.renamed(format!("order on Z with rot(1) = {r}")))
}

/// Lex order on ℤ from ℤ → ℤ/m (multiplier p) with kernel mℤ ordered by
/// `kernel_sign` times the usual sign.
fn lex_from_cyclic_quotient(m: i64, p: i64, kernel_sign: i8) -> Result<CircularOrderOracle<Cyclic>> {
    let quotient = cyclic_rot_order(m as u64, p)?;
    let z = Arc::new(Cyclic::integers());
    let kernel = LeftOrderOracle::new(z.clone(), format!("order on {m}Z"), move |g: &i64| {
        Ok(kernel_sign * g.signum() as i8)
    });
    let seq = ExactSequence::<Cyclic, Cyclic, Cyclic>::new(
        move |g: &i64| Ok(g.rem_euclid(m)),
        move |g: &i64| Ok(if g.rem_euclid(m) == 0 { Some(*g) } else { None }),
    );
    Ok(lex_circular_order(z, seq, kernel, quotient))
}

/// Extend a circular ordering of kℤ ⊂ ℤ to all of ℤ.
///
/// `sub` is consulted only on multiples of k. Its rotation number α at k
/// must be certified exactly (rational); with α = p/q the ordering is
/// lexicographic with kernel qkℤ, and the extension is lexicographic from
/// the same kernel order and the quotient ℤ → ℤ/m, 1 ↦ α/k. Irrational α
/// cannot arise from exact rational data and is not handled.
pub fn extend_cyclic_order(k: i64, sub: &CircularOrderOracle<Cyclic>) -> Result<CircularOrderOracle<Cyclic>> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if sub.group().modulus.is_some() {
        return Err(Error::InvalidInput("the ordering to extend must live on Z".into()));
    }
    if k == 1 {
        return Ok(sub.clone());
    }
    let cfg = crate::extensions::RotConfig::default();
    let alpha = match crate::extensions::rot(&k, sub, &cfg)? {
        crate::extensions::RotationValue::Exact { value, .. } => value,
        crate::extensions::RotationValue::Interval { interval: i } => {
            return Err(Error::Unsupported(format!("rotation number of {k} not certified exactly (within {i})")))
        }
    };
    let p = *alpha.value().numer();
    let qd = *alpha.value().denom();
    let qk = qd.checked_mul(k).ok_or(Error::Overflow)?;
    let eps = sub.eval(&0, &qk, &(2 * qk))?;
    if eps == 0 {
        return Err(Error::Internal("restricted order degenerate on the kernel".into()));
    }
    let g = gcd(p, qk);
    let m = qk / g;
    let name = format!("extension to Z of {} on {k}Z", sub.name());
    if m == 1 {
        let lo = LeftOrderOracle::new(Arc::new(Cyclic::integers()), "kernel order", move |x: &i64| {
            Ok(eps * x.signum() as i8)
        });
        return Ok(secret_left_order(&lo).renamed(name));
    }
    Ok(lex_from_cyclic_quotient(m, p / g, eps)?.renamed(name))
}

/// One failed axiom instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation<E> {
    pub axiom: u8,
    pub tuple: Vec<E>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport<E> {
    pub elements: usize,
    pub checked: [u64; 3],
    pub total_violations: u64,
    pub violations: Vec<Violation<E>>,
}

impl<E> AxiomReport<E> {
    pub fn is_ok(&self) -> bool {
        self.total_violations == 0
    }
}

const MAX_REPORTED_VIOLATIONS: usize = 64;

/// Exhaustively check the three circular-order axioms on a finite set:
/// (1) c vanishes exactly on degenerate triples, (2) the cocycle identity,
/// (3) left invariance under multiplication by elements of the set.
/// Violations are reported in a deterministic order.
pub fn validate_axioms<G: Group>(c: &CircularOrderOracle<G>, elems: &[G::Elem]) -> Result<AxiomReport<G::Elem>> {
    let n = elems.len();
    let index: HashMap<&G::Elem, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    if index.len() != n {
        return Err(Error::InvalidInput("element list has repeats".into()));
    }
    let table: Vec<i8> = (0..n * n * n)
        .into_par_iter()
        .map(|t| c.eval(&elems[t / (n * n)], &elems[(t / n) % n], &elems[t % n]))
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize, k: usize| table[(i * n + j) * n + k];

    let mut found: Vec<(u8, Vec<usize>, String)> = Vec::new();
    let mut total = 0u64;

    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = at(i, j, k);
                let distinct = i != j && j != k && i != k;
                let ok = if distinct { v == 1 || v == -1 } else { v == 0 };
                if !ok {
                    total += 1;
                    found.push((1, vec![i, j, k], format!("value {v}")));
                }
            }
        }
    }

    let cocycle: Vec<(Vec<usize>, String)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let s = at(b, cc, d) as i32 - at(a, cc, d) as i32 + at(a, b, d) as i32 - at(a, b, cc) as i32;
                        if s != 0 {
                            out.push((vec![a, b, cc, d], format!("coboundary {s}")));
                        }
                    }
                }
            }
            out
        })
        .collect();
    total += cocycle.len() as u64;
    found.extend(cocycle.into_iter().map(|(t, d)| (2, t, d)));

    let group = c.group().clone();
    let invariance: Vec<(Vec<usize>, String)> = (0..n)
        .into_par_iter()
        .map(|gi| -> Result<Vec<(Vec<usize>, String)>> {
            let g = &elems[gi];
            let moved: Vec<G::Elem> = elems.iter().map(|x| group.mul(g, x)).collect::<Result<_>>()?;
            let moved_idx: Vec<Option<usize>> = moved.iter().map(|x| index.get(x).copied()).collect();
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = at(i, j, k);
                        let w = match (moved_idx[i], moved_idx[j], moved_idx[k]) {
                            (Some(a), Some(b), Some(cc)) => at(a, b, cc),
                            _ => c.eval(&moved[i], &moved[j], &moved[k])?,
                        };
                        if v != w {
                            out.push((vec![gi, i, j, k], format!("{v} becomes {w}")));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    total += invariance.len() as u64;
    found.extend(invariance.into_iter().map(|(t, d)| (3, t, d)));

    found.sort();
    found.truncate(MAX_REPORTED_VIOLATIONS);
    let violations = found
        .into_iter()
        .map(|(axiom, t, detail)| Violation { axiom, tuple: t.into_iter().map(|i| elems[i].clone()).collect(), detail })
        .collect();
    let n = n as u64;
    Ok(AxiomReport { elements: n as usize, checked: [n * n * n, n.pow(4), n.pow(4)], total_violations: total, violations })
}
