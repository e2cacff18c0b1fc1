//! JSJ trees of Seifert pieces and the circular-orderability verdict
//! engine for graph manifolds.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::euler::{AbelianInvariants, AbelianPresentation};
use crate::rational::{ext_gcd, format_q, gcd, CirclePoint};
use crate::seifert::{
    self, admits_finite_filling, base_orbifold_class, dehn_fill, fibre_rotation_classification, presentation, Filling,
    OrbifoldClass, RationalLongitude, SeifertData, SeifertPresentation, Slope,
};
use crate::verdict::{Hypothesis, Rule, Verdict, VerdictKind};

/// 2×2 gluing matrix [[x, y], [z, w]] acting on column vectors: the
/// section of side a maps to x·s + z·h, the fibre to y·s + w·h.
pub type Matrix2 = [[i64; 2]; 2];

pub fn det2(m: &Matrix2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn ck(x: Option<i64>) -> Result<i64> {
    x.ok_or(Error::Overflow)
}

pub fn apply(m: &Matrix2, s: &Slope) -> Result<Slope> {
    let a = ck(ck(m[0][0].checked_mul(s.a))?.checked_add(ck(m[0][1].checked_mul(s.b))?))?;
    let b = ck(ck(m[1][0].checked_mul(s.a))?.checked_add(ck(m[1][1].checked_mul(s.b))?))?;
    Slope::new(a, b)
}

/// Inverse of a determinant −1 matrix.
pub fn inverse(m: &Matrix2) -> Result<Matrix2> {
    match det2(m) {
        -1 => Ok([[-m[1][1], m[0][1]], [m[1][0], -m[0][0]]]),
        1 => Ok([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]),
        d => invalid(format!("matrix of determinant {d} is not invertible over Z")),
    }
}

fn mat_mul2(a: &Matrix2, b: &Matrix2) -> Result<Matrix2> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ck(ck(a[i][0].checked_mul(b[0][j]))?.checked_add(ck(a[i][1].checked_mul(b[1][j]))?))?;
        }
    }
    Ok(out)
}

/// Geometric intersection number of two slopes in the same basis.
pub fn delta(s1: &Slope, s2: &Slope) -> i64 {
    s1.delta(s2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub a: usize,
    #[serde(rename = "aBdry")]
    pub a_bdry: usize,
    pub b: usize,
    #[serde(rename = "bBdry")]
    pub b_bdry: usize,
    pub matrix: Matrix2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsjTree {
    pub nodes: Vec<SeifertData>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

/// A boundary torus: (node, boundary index).
pub type Port = (usize, usize);

struct Assembled {
    pres: AbelianPresentation,
    blocks: Vec<Option<(usize, SeifertPresentation)>>,
    gens: usize,
}

impl Assembled {
    fn unit(&self, col: usize) -> Vec<i64> {
        let mut v = vec![0; self.gens];
        v[col] = 1;
        v
    }

    fn section(&self, (node, bdry): Port) -> Vec<i64> {
        let (off, p) = self.blocks[node].as_ref().expect("node in subtree");
        self.unit(off + p.sections[bdry])
    }

    fn fibre(&self, node: usize) -> Vec<i64> {
        let (off, p) = self.blocks[node].as_ref().expect("node in subtree");
        self.unit(off + p.fibre)
    }
}

/// Longitude of the single free boundary of a subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryLongitude {
    pub node: usize,
    pub boundary: usize,
    pub longitude: RationalLongitude,
}

impl JsjTree {
    pub fn single(sd: SeifertData) -> Self {
        JsjTree { nodes: vec![sd], edges: vec![] }
    }

    pub fn pair(m1: SeifertData, m2: SeifertData, matrix: Matrix2) -> Self {
        JsjTree { nodes: vec![m1, m2], edges: vec![Edge { a: 0, a_bdry: 0, b: 1, b_bdry: 0, matrix }] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return invalid("empty tree");
        }
        for (i, n) in self.nodes.iter().enumerate() {
            n.validate().map_err(|e| Error::InvalidInput(format!("node {i}: {e}")))?;
            if !n.total_orientable {
                return Err(Error::Refused(format!("node {i}: nonorientable pieces are not supported")));
            }
            if self.nodes.len() > 1 && n.base_orientable && n.genus == 0 {
                let cones = n.cone_orders().len();
                if n.boundaries == 1 && cones <= 1 {
                    return invalid(format!("node {i} is a solid torus, not a JSJ piece"));
                }
                if n.boundaries == 2 && cones == 0 {
                    return invalid(format!("node {i} is T²×I, not a JSJ piece"));
                }
            }
        }
        let mut used = BTreeSet::new();
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (k, e) in self.edges.iter().enumerate() {
            for (n, bd) in [(e.a, e.a_bdry), (e.b, e.b_bdry)] {
                let node = self.nodes.get(n).ok_or_else(|| Error::InvalidInput(format!("edge {k}: no node {n}")))?;
                if bd >= node.boundaries as usize {
                    return invalid(format!("edge {k}: node {n} has no boundary {bd}"));
                }
                if !used.insert((n, bd)) {
                    return invalid(format!("edge {k}: boundary {bd} of node {n} glued twice"));
                }
            }
            if det2(&e.matrix) != -1 {
                return invalid(format!("edge {k}: gluing determinant is {}, expected -1", det2(&e.matrix)));
            }
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra == rb {
                return invalid(format!("edge {k} closes a cycle"));
            }
            parent[ra] = rb;
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return invalid("the gluing graph is not connected");
        }
        Ok(())
    }

    /// Unglued boundary tori of the subtree on `nodes`.
    pub fn free_boundaries(&self, nodes: &[usize]) -> Vec<Port> {
        let inside: BTreeSet<usize> = nodes.iter().copied().collect();
        let glued: BTreeSet<Port> = self
            .edges
            .iter()
            .filter(|e| inside.contains(&e.a) && inside.contains(&e.b))
            .flat_map(|e| [(e.a, e.a_bdry), (e.b, e.b_bdry)])
            .collect();
        let mut out = Vec::new();
        for &n in &inside {
            for bd in 0..self.nodes[n].boundaries as usize {
                if !glued.contains(&(n, bd)) {
                    out.push((n, bd));
                }
            }
        }
        out
    }

    pub fn all_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.free_boundaries(&self.all_nodes()).is_empty()
    }

    /// H₁ presentation of the subtree: one block per node plus two
    /// relations per internal edge identifying s_a, h_a with their images.
    fn assemble(&self, nodes: &[usize]) -> Result<Assembled> {
        let inside: BTreeSet<usize> = nodes.iter().copied().collect();
        let mut blocks: Vec<Option<(usize, SeifertPresentation)>> = vec![None; self.nodes.len()];
        let mut gens = 0;
        for &n in &inside {
            let p = presentation(&self.nodes[n])?;
            let g = p.gens;
            blocks[n] = Some((gens, p));
            gens += g;
        }
        let mut rel = Vec::new();
        for &n in &inside {
            let (off, p) = blocks[n].as_ref().unwrap();
            for r in &p.relations {
                let mut row = vec![0; gens];
                row[*off..off + p.gens].copy_from_slice(r);
                rel.push(row);
            }
        }
        let col = |blocks: &Vec<Option<(usize, SeifertPresentation)>>, n: usize, which: Option<usize>| {
            let (off, p) = blocks[n].as_ref().unwrap();
            off + which.map(|b| p.sections[b]).unwrap_or(p.fibre)
        };
        for e in self.edges.iter().filter(|e| inside.contains(&e.a) && inside.contains(&e.b)) {
            let (sa, ha) = (col(&blocks, e.a, Some(e.a_bdry)), col(&blocks, e.a, None));
            let (sb, hb) = (col(&blocks, e.b, Some(e.b_bdry)), col(&blocks, e.b, None));
            let m = &e.matrix;
            let mut r1 = vec![0; gens];
            r1[sa] += 1;
            r1[sb] -= m[0][0];
            r1[hb] -= m[1][0];
            let mut r2 = vec![0; gens];
            r2[ha] += 1;
            r2[sb] -= m[0][1];
            r2[hb] -= m[1][1];
            rel.push(r1);
            rel.push(r2);
        }
        Ok(Assembled { pres: AbelianPresentation::new(&rel, gens)?, blocks, gens })
    }

    pub fn h1(&self) -> Result<AbelianInvariants> {
        Ok(self.assemble(&self.all_nodes())?.pres.invariants().clone())
    }

    /// Node sets on either side of an edge: (side of e.a, side of e.b).
    pub fn split(&self, edge: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let start = self.edges[edge].a;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for (k, e) in self.edges.iter().enumerate() {
                if k == edge {
                    continue;
                }
                let y = if e.a == x {
                    e.b
                } else if e.b == x {
                    e.a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        ((0..n).filter(|&i| seen[i]).collect(), (0..n).filter(|&i| !seen[i]).collect())
    }
}

/// Rational longitude of a subtree with exactly one free boundary, in the
/// (section, fibre) basis of that boundary.
pub fn rational_longitude_graph(tree: &JsjTree, nodes: &[usize]) -> Result<BoundaryLongitude> {
    let free = tree.free_boundaries(nodes);
    if free.len() != 1 {
        return invalid(format!("subtree has {} free boundaries, expected 1", free.len()));
    }
    let port = free[0];
    let asm = tree.assemble(nodes)?;
    let longitude = seifert::rational_longitude_in(&asm.pres, &asm.section(port), &asm.fibre(port.0))?;
    Ok(BoundaryLongitude { node: port.0, boundary: port.1, longitude })
}

/// Twisted I-bundle over the Klein bottle, in either Seifert structure.
pub fn is_klein_ibundle(sd: &SeifertData) -> bool {
    if !sd.total_orientable || sd.boundaries != 1 {
        return false;
    }
    let cones = sd.cone_orders();
    (!sd.base_orientable && sd.genus == 1 && cones.is_empty()) || (sd.base_orientable && sd.genus == 0 && cones == [2, 2])
}

/// H₁(M) ≅ ℤ with the boundary surjecting: the exterior of a knot in an
/// integer homology sphere.
pub fn is_integral_knot_exterior(sd: &SeifertData) -> Result<bool> {
    if sd.boundaries != 1 || !sd.total_orientable {
        return Ok(false);
    }
    let p = presentation(sd)?;
    let ap = AbelianPresentation::new(&p.relations, p.gens)?;
    let inv = ap.invariants();
    if inv.rank != 1 || !inv.torsion.is_empty() {
        return Ok(false);
    }
    let fs = ap.image(&p.unit(p.sections[0]))?.free[0];
    let fh = ap.image(&p.unit(p.fibre))?.free[0];
    Ok(crate::euler::gcd128(fs, fh) == 1)
}

/// Result of filling one side of a cut along a slope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideFilling {
    pub slope: Slope,
    pub infinite: Option<bool>,
    pub description: String,
}

fn fill_side(tree: &JsjTree, side: &[usize], port: Port, slope: Slope) -> Result<SideFilling> {
    let sd = &tree.nodes[port.0];
    if side.len() == 1 {
        let f = dehn_fill(sd, port.1, &slope)?;
        return Ok(SideFilling { slope, infinite: f.pi1_infinite()?, description: f.describe() });
    }
    if slope.delta(&Slope::fibre()) == 0 {
        return Ok(SideFilling { slope, infinite: None, description: "fibre slope of the outer piece: reducible filling, not analysed".into() });
    }
    let Filling::Seifert { data } = dehn_fill(sd, port.1, &slope)? else {
        return Err(Error::Internal("non-fibre filling did not stay Seifert".into()));
    };
    let cones = data.cone_orders().len();
    let collapses = data.base_orientable && data.genus == 0 && ((data.boundaries == 1 && cones <= 1) || (data.boundaries == 2 && cones == 0));
    if collapses {
        return Ok(SideFilling { slope, infinite: None, description: format!("outer piece becomes {}, JSJ structure changes", data.base_symbol()) });
    }
    Ok(SideFilling {
        slope,
        infinite: Some(true),
        description: format!("graph manifold with {} pieces and an incompressible torus", side.len()),
    })
}

/// Everything the two-piece rules consume.
#[derive(Debug, Clone, Serialize)]
pub struct TwoPieceAnalysis {
    pub lambda1: RationalLongitude,
    pub lambda2: RationalLongitude,
    pub phi_lambda1: Slope,
    pub phi_inv_lambda2: Slope,
    /// Δ(φ(λ₁), h₂).
    pub delta_12: i64,
    /// Δ(φ⁻¹(λ₂), h₁).
    pub delta_21: i64,
    /// Δ(φ(h₁), h₂); zero means the fibrations match and W is Seifert.
    pub delta_fibres: i64,
    pub class1: OrbifoldClass,
    pub class2: OrbifoldClass,
    /// M₁ filled along φ⁻¹(λ₂).
    pub filling1: SideFilling,
    /// M₂ filled along φ(λ₁).
    pub filling2: SideFilling,
}

pub fn analyze_two_piece(m1: &SeifertData, m2: &SeifertData, phi: &Matrix2) -> Result<TwoPieceAnalysis> {
    let lambda1 = seifert::rational_longitude(m1)?;
    let lambda2 = seifert::rational_longitude(m2)?;
    let inv = inverse(phi)?;
    let phi_lambda1 = apply(phi, &lambda1.slope)?;
    let phi_inv_lambda2 = apply(&inv, &lambda2.slope)?;
    let h = Slope::fibre();
    let delta_fibres = apply(phi, &h)?.delta(&h);
    let tree = JsjTree::pair(m1.clone(), m2.clone(), *phi);
    let (filling1, filling2) = rayon::join(
        || fill_side(&tree, &[0], (0, 0), phi_inv_lambda2),
        || fill_side(&tree, &[1], (1, 0), phi_lambda1),
    );
    Ok(TwoPieceAnalysis {
        lambda1,
        lambda2,
        phi_lambda1,
        phi_inv_lambda2,
        delta_12: phi_lambda1.delta(&h),
        delta_21: phi_inv_lambda2.delta(&h),
        delta_fibres,
        class1: base_orbifold_class(m1),
        class2: base_orbifold_class(m2),
        filling1: filling1?,
        filling2: filling2?,
    })
}

/// The base-orbifold and intersection-number clause satisfied, if any.
/// Two ℱ bases are tested with the symmetric Δ condition and reported
/// under (3a).
pub fn two_piece_clause(t: &TwoPieceAnalysis) -> Option<Rule> {
    let (a1, a2) = (t.class1.in_a, t.class2.in_a);
    let (f1, f2) = (t.class1.in_f, t.class2.in_f);
    let d23 = |c: &OrbifoldClass| c.cones == [2, 3];
    if !a1 && !a2 {
        return Some(Rule::TwoPiece1);
    }
    if a1 != a2 {
        return Some(Rule::TwoPiece2);
    }
    let hit = match (f1, f2) {
        (false, true) => (t.delta_21 != 1 || (d23(&t.class2) && t.delta_12 > 5)).then_some(Rule::TwoPiece3b),
        (true, false) => (t.delta_12 != 1 || (d23(&t.class1) && t.delta_21 > 5)).then_some(Rule::TwoPiece3c),
        _ => (t.delta_12 != 1 || t.delta_21 != 1).then_some(Rule::TwoPiece3a),
    };
    hit
}

fn coprime_splice(m1: &SeifertData, m2: &SeifertData) -> Result<(bool, String)> {
    let disk = |s: &SeifertData| s.base_orientable && s.genus == 0;
    if !disk(m1) || !disk(m2) {
        return Ok((false, "a base is not a disk".into()));
    }
    if !is_integral_knot_exterior(m1)? || !is_integral_knot_exterior(m2)? {
        return Ok((false, "a piece is not a knot exterior in an integer homology sphere".into()));
    }
    let all: Vec<i64> = m1.cone_orders().into_iter().chain(m2.cone_orders()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if gcd(all[i], all[j]) != 1 {
                return Ok((false, format!("cone orders {} and {} share a factor", all[i], all[j])));
            }
        }
    }
    Ok((true, format!("cone orders {all:?} pairwise coprime")))
}

fn b1_hypothesis(h: &AbelianInvariants) -> Hypothesis {
    Hypothesis::checked("first Betti number positive", h.rank > 0, format!("H1 = {}", h.describe()))
}

/// The closed Seifert space M₁ ∪_φ M₂ when φ carries fibre to fibre.
///
/// Flipping both s and h on M₂ preserves its presentation, so φ(h₁) = −h₂
/// reduces to φ(h₁) = h₂. Then φ(s₁) = −s₂ + z·h₂ and the product of all
/// cone generators is h^{−z}.
pub fn merge_fibred_pair(m1: &SeifertData, m2: &SeifertData, phi: &Matrix2) -> Result<SeifertData> {
    if phi[0][1] != 0 || phi[1][1].abs() != 1 || det2(phi) != -1 {
        return invalid("the gluing does not match fibres");
    }
    if m1.boundaries != 1 || m2.boundaries != 1 {
        return invalid("fibre matching is implemented for two single-boundary pieces");
    }
    let w = phi[1][1];
    let z = phi[1][0];
    let both = m1.base_orientable && m2.base_orientable;
    let weight = |m: &SeifertData| if m.base_orientable && !both { 2 * m.genus } else { m.genus };
    let mut pairs = m1.pairs.clone();
    pairs.extend(m2.pairs.iter().copied());
    Ok(SeifertData {
        total_orientable: m1.total_orientable && m2.total_orientable,
        base_orientable: both,
        genus: weight(m1) + weight(m2),
        boundaries: 0,
        pairs,
        b: -z * w,
    })
}

/// Verdict for a closed two-piece tree.
pub fn two_piece_verdict(tree: &JsjTree) -> Result<Verdict> {
    tree.validate()?;
    if tree.nodes.len() != 2 || tree.nodes.iter().any(|n| n.boundaries != 1) {
        return invalid("two-piece verdict needs two nodes with one boundary torus each");
    }
    let e = &tree.edges[0];
    let (m1, m2) = (&tree.nodes[e.a], &tree.nodes[e.b]);
    let h = tree.h1()?;
    let mut hyps = vec![b1_hypothesis(&h)];
    if h.rank > 0 {
        return Ok(Verdict::certified(Rule::B1PositiveLo, hyps, json!({ "h1": h })));
    }
    let klein = is_klein_ibundle(m1) && is_klein_ibundle(m2);
    hyps.push(Hypothesis::checked("both pieces twisted I-bundles over the Klein bottle", klein, format!("{m1} | {m2}")));
    if klein {
        return Ok(Verdict::certified(Rule::KleinIbundleUnion, hyps, json!({ "h1": h })));
    }
    let t = analyze_two_piece(m1, m2, &e.matrix)?;
    let data = json!({ "h1": h, "analysis": t });
    hyps.push(Hypothesis::checked("fibres not matched across the torus", t.delta_fibres != 0, format!("Δ(φ(h1), h2) = {}", t.delta_fibres)));
    if t.delta_fibres == 0 {
        let merged = merge_fibred_pair(m1, m2, &e.matrix)?;
        let same = seifert::h1(&merged)? == h;
        hyps.push(Hypothesis::checked(
            "union is the Seifert space obtained by matching fibres",
            same,
            format!("{} with H1 = {}", merged.normalized(), seifert::h1(&merged)?.describe()),
        ));
        if !same {
            return Ok(Verdict::unknown(vec!["fibres match but the merged Seifert data disagrees with the homology of the union".into()], hyps, data));
        }
        let v = single_seifert_verdict(&merged)?;
        hyps.extend(v.hypotheses.iter().cloned());
        let mut data = data;
        data["merged"] = json!(merged.normalized().to_string());
        return Ok(match (v.verdict, v.rule) {
            (VerdictKind::CO_CERTIFIED, Some(rule)) => Verdict::certified(rule, hyps, data),
            _ => Verdict { hypotheses: hyps, data, ..v },
        });
    }
    let clause = two_piece_clause(&t);
    hyps.push(Hypothesis::checked(
        "base-orbifold and intersection clause",
        clause.is_some(),
        format!(
            "B1 = {} (A: {}, F: {}), B2 = {} (A: {}, F: {}), Δ(φ(λ1), h2) = {}, Δ(φ⁻¹(λ2), h1) = {}",
            t.class1.symbol, t.class1.in_a, t.class1.in_f, t.class2.symbol, t.class2.in_a, t.class2.in_f, t.delta_12, t.delta_21
        ),
    ));
    let inf = t.filling1.infinite == Some(true) || t.filling2.infinite == Some(true);
    hyps.push(Hypothesis::checked(
        "a longitude filling has infinite π1",
        inf,
        format!("M1({}) = {}; M2({}) = {}", t.filling1.slope, t.filling1.description, t.filling2.slope, t.filling2.description),
    ));
    let mut notes = Vec::new();
    if inf {
        return Ok(Verdict::certified(clause.unwrap_or(Rule::LongitudeFilling), hyps, data));
    }
    if let Some(c) = clause {
        notes.push(format!("clause {} matched but neither longitude filling was certified infinite", c.name()));
    }
    let (splice, detail) = coprime_splice(m1, m2)?;
    hyps.push(Hypothesis::checked("coprime knot-exterior splice", splice, detail));
    if splice {
        return Ok(Verdict::certified(Rule::CoprimeSplice, hyps, data));
    }
    notes.push("both pieces admit finite fillings and every implemented condition fails; this two-piece case is open".into());
    Ok(Verdict::unknown(notes, hyps, data))
}

/// Caller-supplied facts that the engine cannot compute.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassCHints {
    /// Asserts that every irreducible filling of every cut side lies in class C.
    #[serde(default)]
    pub fillings_in_class_c: bool,
    /// Edges for which the caller asserts that a longitude filling is infinite.
    #[serde(default)]
    pub infinite_filling_edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeCheck {
    pub edge: usize,
    pub filling_a: Option<SideFilling>,
    pub filling_b: Option<SideFilling>,
    pub holds: bool,
    pub asserted: bool,
    pub note: Option<String>,
}

fn check_edge(tree: &JsjTree, k: usize, hints: &ClassCHints) -> Result<EdgeCheck> {
    let e = &tree.edges[k];
    let (sa, sb) = tree.split(k);
    let asserted = hints.infinite_filling_edges.contains(&k);
    let (la, lb) = match (rational_longitude_graph(tree, &sa), rational_longitude_graph(tree, &sb)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(x), _) | (_, Err(x)) => {
            return Ok(EdgeCheck { edge: k, filling_a: None, filling_b: None, holds: asserted, asserted, note: Some(x.to_string()) })
        }
    };
    let inv = inverse(&e.matrix)?;
    let fa = fill_side(tree, &sa, (e.a, e.a_bdry), apply(&inv, &lb.longitude.slope)?)?;
    let fb = fill_side(tree, &sb, (e.b, e.b_bdry), apply(&e.matrix, &la.longitude.slope)?)?;
    let holds = fa.infinite == Some(true) || fb.infinite == Some(true);
    Ok(EdgeCheck { edge: k, filling_a: Some(fa), filling_b: Some(fb), holds: holds || asserted, asserted: asserted && !holds, note: None })
}

/// Verdict for a closed tree.
pub fn class_c_verdict(tree: &JsjTree, hints: &ClassCHints) -> Result<Verdict> {
    tree.validate()?;
    if !tree.is_closed() {
        return invalid("class C verdict needs a closed tree");
    }
    if tree.nodes.len() == 1 {
        return single_seifert_verdict(&tree.nodes[0]);
    }
    let h = tree.h1()?;
    let mut hyps = vec![b1_hypothesis(&h)];
    if h.rank > 0 {
        return Ok(Verdict::certified(Rule::B1PositiveLo, hyps, json!({ "h1": h })));
    }
    let mut blocking = Vec::new();
    for (i, n) in tree.nodes.iter().enumerate() {
        if n.boundaries == 1 && admits_finite_filling(n)? {
            blocking.push(format!("node {i}: {}", n.base_symbol()));
        }
    }
    hyps.push(Hypothesis::checked(
        "no single-boundary piece admits a finite filling",
        blocking.is_empty(),
        if blocking.is_empty() { "all such bases lie outside the finite-filling list".to_string() } else { blocking.join(", ") },
    ));
    hyps.push(Hypothesis::checked("π1 infinite", true, "an incompressible gluing torus gives a Z² subgroup"));
    if blocking.is_empty() {
        return Ok(Verdict::certified(Rule::NoFiniteFilling, hyps, json!({ "h1": h })));
    }
    if tree.nodes.len() == 2 {
        let v = two_piece_verdict(tree)?;
        let fibres_match = delta(&apply(&tree.edges[0].matrix, &Slope::fibre())?, &Slope::fibre()) == 0;
        if v.verdict != VerdictKind::UNKNOWN || fibres_match || !hints.infinite_filling_edges.contains(&0) {
            return Ok(v);
        }
        let mut hyps = v.hypotheses.clone();
        hyps.push(Hypothesis::asserted("a longitude filling has infinite π1", "caller witness for edge 0"));
        return Ok(Verdict::certified(Rule::ClassC, hyps, v.data));
    }
    let checks: Vec<EdgeCheck> = (0..tree.edges.len()).into_par_iter().map(|k| check_edge(tree, k, hints)).collect::<Result<_>>()?;
    for c in &checks {
        let hyp = format!("edge {}: a longitude filling has infinite π1", c.edge);
        hyps.push(if c.asserted { Hypothesis::asserted(hyp, "caller witness") } else { Hypothesis::checked(hyp, c.holds, c.note.clone().unwrap_or_default()) });
    }
    let all_a = checks.iter().all(|c| c.holds);
    let data = json!({ "h1": h, "edges": checks });
    if all_a && hints.fillings_in_class_c {
        hyps.push(Hypothesis::asserted("every irreducible filling of a cut side lies in class C", "caller assertion"));
        return Ok(Verdict::certified(Rule::ClassC, hyps, data));
    }
    let mut notes = Vec::new();
    if !all_a {
        notes.push("some edge has no certified infinite longitude filling".into());
    }
    if !hints.fillings_in_class_c {
        notes.push("membership of all fillings of cut sides quantifies over every slope and is not checked; supply it as a hint".into());
    }
    Ok(Verdict::unknown(notes, hyps, data))
}

/// Closed Seifert space: infinite, finite cyclic, or finite noncyclic.
pub fn single_seifert_verdict(sd: &SeifertData) -> Result<Verdict> {
    if !sd.is_closed() {
        return invalid("expected closed Seifert data");
    }
    if !sd.total_orientable {
        return Ok(Verdict::unknown(vec!["nonorientable total space: not classified".into()], vec![], json!({})));
    }
    match seifert::finite_pi1(sd)? {
        None => {
            let hyps = vec![Hypothesis::checked(
                "π1 infinite",
                true,
                format!("χ = {}, e = {}", format_q(&seifert::orbifold_euler_char(sd)), format_q(&seifert::euler_number(sd))),
            )];
            Ok(Verdict::certified(Rule::SfsInfinite, hyps, json!({ "seifert": sd.to_string() })))
        }
        Some(f) => {
            let hyps = vec![Hypothesis::checked("π1 finite", true, f.description.clone()), Hypothesis::checked("π1 cyclic", f.cyclic, format!("order {}", f.order))];
            let data = json!({ "seifert": sd.to_string(), "order": f.order, "group": f.description });
            if f.cyclic {
                Ok(Verdict::certified(Rule::FiniteCyclic, hyps, data))
            } else {
                Ok(Verdict::not_co(Rule::FiniteNoncyclic, format!("finite noncyclic π1: {}", f.description), hyps, data))
            }
        }
    }
}

/// How the caller vouches for a rotation number on one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RotWitness {
    /// The dual class is the regular fibre of the filled Seifert space;
    /// achievable values come from the fibre rotation classification.
    Fibre,
    /// A rotation number realised by some ordering, asserted by the caller.
    Explicit {
        #[serde(with = "crate::rational::q_string")]
        value: crate::rational::Q,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SlopeDetectQuery {
    pub m1: SeifertData,
    pub m2: SeifertData,
    pub matrix: Matrix2,
    pub alpha: Slope,
    /// A class dual to α on ∂M₁; computed when absent.
    #[serde(default)]
    pub beta: Option<Slope>,
    /// Side (1 or 2) whose peripheral subgroup the caller asserts is
    /// normally generated by the filling slope.
    #[serde(default)]
    pub peripheral_killed: Option<u8>,
    #[serde(default)]
    pub rot1: Option<RotWitness>,
    #[serde(default)]
    pub rot2: Option<RotWitness>,
    #[serde(default)]
    pub lo_hint1: Option<bool>,
    #[serde(default)]
    pub lo_hint2: Option<bool>,
}

fn dual_slope(alpha: &Slope) -> Slope {
    // solve a·y − b·x = 1
    let (_, u, v) = ext_gcd(alpha.a, alpha.b);
    // a·u + b·v = 1, so β = (−v, u) has Δ(α, β) = 1
    Slope::new(-v, u).expect("ext_gcd output is primitive")
}

fn achievable(sd_filled: &Filling, witness: &RotWitness, lo: Option<bool>, beta_is_fibre: bool) -> Result<(Vec<CirclePoint>, String)> {
    match witness {
        RotWitness::Explicit { value } => Ok((vec![CirclePoint::new(*value)], "caller-asserted value".into())),
        RotWitness::Fibre => {
            if !beta_is_fibre {
                return invalid("fibre witness given but the dual class is not the regular fibre");
            }
            let Filling::Seifert { data } = sd_filled else {
                return invalid("fibre witness needs a Seifert filling");
            };
            let rep = fibre_rotation_classification(data, lo)?;
            let mut cands = vec![CirclePoint::zero(), CirclePoint::new(crate::rational::q(1, 2))];
            for p in 3..=12 {
                cands.push(CirclePoint::new(crate::rational::q(1, p)));
            }
            let vals: Vec<CirclePoint> = cands.into_iter().filter(|r| rep.achieves(r)).collect();
            Ok((vals, rep.rules.join("; ")))
        }
    }
}

/// Slope-detection verdict for M₁ ∪_φ M₂ and a slope α on ∂M₁.
pub fn slope_detect_verdict(q: &SlopeDetectQuery) -> Result<Verdict> {
    if q.m1.boundaries != 1 || q.m2.boundaries != 1 {
        return invalid("both pieces need exactly one boundary torus");
    }
    if det2(&q.matrix) != -1 {
        return invalid("gluing determinant must be -1");
    }
    let alpha = Slope::new(q.alpha.a, q.alpha.b)?;
    let alpha2 = apply(&q.matrix, &alpha)?;
    let beta = match q.beta {
        Some(b) => {
            let b = Slope::new(b.a, b.b)?;
            if b.delta(&alpha) != 1 {
                return invalid(format!("β = {b} is not dual to α = {alpha}"));
            }
            b
        }
        None => {
            if alpha.delta(&Slope::fibre()) == 1 {
                Slope::fibre()
            } else {
                dual_slope(&alpha)
            }
        }
    };
    let beta2 = apply(&q.matrix, &beta)?;
    let f1 = dehn_fill(&q.m1, 0, &alpha)?;
    let f2 = dehn_fill(&q.m2, 0, &alpha2)?;
    let (i1, i2) = (f1.pi1_infinite()?, f2.pi1_infinite()?);
    let mut hyps = vec![
        Hypothesis::checked("M1(α) has infinite π1", i1 == Some(true), format!("M1({alpha}) = {}", f1.describe())),
        Hypothesis::checked("M2(φ(α)) has infinite π1", i2 == Some(true), format!("M2({alpha2}) = {}", f2.describe())),
    ];
    let data = json!({ "alpha": alpha, "phi_alpha": alpha2, "beta": beta, "phi_beta": beta2 });
    if i1 != Some(true) || i2 != Some(true) {
        return Ok(Verdict::unknown(vec!["a filling is not certified infinite, hypotheses unmet".into()], hyps, data));
    }
    if let Some(side) = q.peripheral_killed {
        let (sd, slope, dual) = match side {
            1 => (&q.m1, alpha, beta),
            2 => (&q.m2, alpha2, beta2),
            _ => return invalid("peripheral_killed must be 1 or 2"),
        };
        // homological necessary condition: the dual class must die in H₁ of the filling
        let p = presentation(sd)?;
        let mut rel = p.relations.clone();
        rel.push(p.slope_vector(0, &slope));
        let ap = AbelianPresentation::new(&rel, p.gens)?;
        if ap.order_of(&p.slope_vector(0, &dual))? != Some(1) {
            return invalid(format!("peripheral-kill witness for side {side} contradicts homology"));
        }
        hyps.push(Hypothesis::checked("dual class dies in homology of the filling", true, format!("side {side}")));
        hyps.push(Hypothesis::asserted(format!("peripheral subgroup of side {side} lies in the normal closure of the slope"), "caller witness"));
        return Ok(Verdict::certified(Rule::SlopePeripheralKill, hyps, data));
    }
    if let (Some(w1), Some(w2)) = (&q.rot1, &q.rot2) {
        let h = Slope::fibre();
        let (v1, src1) = achievable(&f1, w1, q.lo_hint1, beta == h)?;
        let (v2, src2) = achievable(&f2, w2, q.lo_hint2, beta2 == h)?;
        let common: Vec<&CirclePoint> = v1.iter().filter(|r| v2.contains(r)).collect();
        hyps.push(Hypothesis::checked(
            "rotation numbers of the dual classes can be matched",
            !common.is_empty(),
            format!("side 1 [{src1}]: {v1:?}; side 2 [{src2}]: {v2:?}"),
        ));
        for (k, w) in [(1, w1), (2, w2)] {
            if matches!(w, RotWitness::Explicit { .. }) {
                hyps.push(Hypothesis::asserted(format!("side {k} rotation value realised"), "caller witness"));
            }
        }
        if let Some(r) = common.first() {
            let mut data = data;
            data["matched_rotation"] = json!(r);
            return Ok(Verdict::certified(Rule::SlopeRotMatch, hyps, data));
        }
        return Ok(Verdict::unknown(vec!["no common rotation value".into()], hyps, data));
    }
    Ok(Verdict::unknown(vec!["no peripheral-kill or rotation witness supplied".into()], hyps, data))
}

/// Meridian and longitude of a knot-exterior piece in (section, fibre)
/// coordinates, with det[μ λ] = 1.
pub fn meridian_longitude(sd: &SeifertData) -> Result<(Slope, Slope)> {
    let lam = seifert::rational_longitude(sd)?.slope;
    let (_, u, v) = ext_gcd(lam.a, lam.b);
    // a·u + b·v = 1; μ = (v, −u)·sign gives det[μ λ] = v·b + u·a = 1
    let mu = Slope { a: v, b: -u };
    debug_assert_eq!(mu.a * lam.b - mu.b * lam.a, 1);
    Ok((mu, lam))
}

/// Convert a gluing given in meridian–longitude bases, φ(μ₁) = aμ₂ + bλ₂
/// and φ(λ₁) = cμ₂ + dλ₂, to section–fibre coordinates.
pub fn gluing_from_meridian_longitude(m1: &SeifertData, m2: &SeifertData, ml: Matrix2) -> Result<(Matrix2, serde_json::Value)> {
    let (mu1, l1) = meridian_longitude(m1)?;
    let (mu2, l2) = meridian_longitude(m2)?;
    let p1: Matrix2 = [[mu1.a, l1.a], [mu1.b, l1.b]];
    let p2: Matrix2 = [[mu2.a, l2.a], [mu2.b, l2.b]];
    let sf = mat_mul2(&mat_mul2(&p2, &ml)?, &inverse(&p1)?)?;
    let record = json!({ "P1": p1, "P2": p2, "meridian_longitude": ml, "section_fibre": sf });
    Ok((sf, record))
}

impl VerdictKind {
    pub fn label(&self) -> &'static str {
        match self {
            VerdictKind::CO_CERTIFIED => "CO_CERTIFIED",
            VerdictKind::NOT_CO => "NOT_CO",
            VerdictKind::UNKNOWN => "UNKNOWN",
        }
    }
}
