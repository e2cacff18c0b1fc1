//! Circular orderability of small finite groups by exhaustive search over
//! cyclic arrangements of the elements.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::orders::{sort_sign, CircularOrderOracle};

pub const DEFAULT_BOUND: usize = 8;

/// A cyclic arrangement of element indices, starting at the identity.
pub type Arrangement = Vec<usize>;

/// Left multiplication by every g carries the cyclic sequence to a
/// rotation of itself.
pub fn is_left_invariant(arr: &[usize], g: &FiniteGroup) -> bool {
    let n = g.order();
    if arr.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in arr.iter().enumerate() {
        if x >= n || pos[x] != usize::MAX {
            return false;
        }
        pos[x] = i;
    }
    (0..n).all(|h| {
        let shift = pos[g.product(h, arr[0])];
        arr.iter().enumerate().all(|(i, &x)| pos[g.product(h, x)] == (shift + i) % n)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteforceResult {
    pub orderable: bool,
    pub witness: Option<Arrangement>,
    /// Arrangements examined (all (n-1)! of them when none works).
    pub examined: u64,
}

fn check_bound(g: &FiniteGroup, bound: usize) -> Result<()> {
    if g.order() > bound {
        return Err(Error::BoundExceeded { order: g.order(), bound });
    }
    Ok(())
}

/// Lexicographic successor of a permutation in place; false at the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// All arrangements starting with id then `first`, in lexicographic order.
fn arrangements_with_first(g: &FiniteGroup, first: usize) -> (Vec<Arrangement>, u64) {
    let e = g.identity_index();
    let mut rest: Vec<usize> = (0..g.order()).filter(|&x| x != e && x != first).collect();
    let mut found = Vec::new();
    let mut examined = 0u64;
    loop {
        let mut arr = vec![e, first];
        arr.extend_from_slice(&rest);
        examined += 1;
        if is_left_invariant(&arr, g) {
            found.push(arr);
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    (found, examined)
}

/// Every left-invariant arrangement, sorted lexicographically.
pub fn enumerate_circular_orders(g: &FiniteGroup, bound: usize) -> Result<Vec<Arrangement>> {
    check_bound(g, bound)?;
    let e = g.identity_index();
    if g.order() == 1 {
        return Ok(vec![vec![e]]);
    }
    let firsts: Vec<usize> = (0..g.order()).filter(|&x| x != e).collect();
    let mut parts: Vec<(usize, Vec<Arrangement>)> =
        firsts.par_iter().map(|&f| (f, arrangements_with_first(g, f).0)).collect();
    parts.sort_by_key(|p| p.0);
    let mut out: Vec<Arrangement> = parts.into_iter().flat_map(|p| p.1).collect();
    out.sort();
    Ok(out)
}

pub fn is_circularly_orderable_bruteforce(g: &FiniteGroup, bound: usize) -> Result<BruteforceResult> {
    check_bound(g, bound)?;
    let e = g.identity_index();
    if g.order() == 1 {
        return Ok(BruteforceResult { orderable: true, witness: Some(vec![e]), examined: 1 });
    }
    let mut examined = 0;
    let mut firsts: Vec<usize> = (0..g.order()).filter(|&x| x != e).collect();
    firsts.sort();
    for f in firsts {
        let (found, n) = arrangements_with_first(g, f);
        examined += n;
        if let Some(w) = found.into_iter().next() {
            return Ok(BruteforceResult { orderable: true, witness: Some(w), examined });
        }
    }
    Ok(BruteforceResult { orderable: false, witness: None, examined })
}

/// The circular ordering read off an arrangement.
pub fn arrangement_order(g: Arc<FiniteGroup>, arr: &[usize]) -> Result<CircularOrderOracle<FiniteGroup>> {
    if !is_left_invariant(arr, &g) {
        return Err(Error::InvalidInput("arrangement is not left-invariant".into()));
    }
    let mut pos = vec![0usize; arr.len()];
    for (i, &x) in arr.iter().enumerate() {
        pos[x] = i;
    }
    let name = format!("arrangement {:?} of {}", arr, g.name());
    Ok(CircularOrderOracle::new(g, name, move |a: &usize, b: &usize, c: &usize| {
        sort_sign(a, b, c, |x, y| Ok(pos[*x].cmp(&pos[*y])))
    }))
}
