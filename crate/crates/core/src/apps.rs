//! Applications: branched covers of torus and two-bridge knots, a small
//! database of known non-orderable manifolds, divisibility propagation,
//! generalized Fibonacci and periodic Takahashi criteria, and the surgery
//! window for fibred knots.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::graph::single_seifert_verdict;
use crate::groups::{FreeProduct, Group, Syllable, Word};
use crate::orders::{default_factor_orders, planar_free_product_order, validate_axioms};
use crate::rational::{format_q, gcd, lcm, q, Q};
use crate::seifert::{self, SeifertData};
use crate::verdict::{Hypothesis, Rule, Verdict};

/// Seifert invariants of the Brieskorn manifold Σ(p, q, r), the link of
/// z₁^p + z₂^q + z₃^r = 0 and the r-fold branched cover of T(p, q).
///
/// With a = lcm and A = product of the exponents, the fibres over the
/// cone points come in three types: a'_i = lcm of the other two, fibres
/// of type i have order a/a'_i and there are (product of the other two)/a'_i
/// of them. e = −A/a² and all fibres of a type share β, which is then
/// fixed modulo α by the integrality of b.
pub fn brieskorn_seifert(p: i64, qq: i64, r: i64) -> Result<SeifertData> {
    let ex = [p, qq, r];
    if ex.iter().any(|&x| x < 2) {
        return invalid("Brieskorn exponents must be at least 2");
    }
    let a = lcm(lcm(p, qq), r);
    let big_a = p.checked_mul(qq).and_then(|x| x.checked_mul(r)).ok_or(Error::Overflow)?;
    let mut types = Vec::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let ap = lcm(ex[j], ex[k]);
        types.push((a / ap, ex[j] * ex[k] / ap));
    }
    let mut two_minus_2g = Q::from_integer(big_a / a) * (Q::from_integer(2) - ex.iter().map(|&x| Q::from_integer(1) - q(1, x)).sum::<Q>());
    for &(alpha, s) in &types {
        two_minus_2g += Q::from_integer(s) * (Q::from_integer(1) - q(1, alpha));
    }
    if !two_minus_2g.is_integer() || two_minus_2g.to_integer() > 2 || two_minus_2g.to_integer() % 2 != 0 {
        return Err(Error::Internal(format!("Brieskorn genus computation gave 2-2g = {two_minus_2g}")));
    }
    let genus = ((2 - two_minus_2g.to_integer()) / 2) as u32;
    let target = Q::new(big_a as i64, (a as i64) * (a as i64));
    let l: i64 = types.iter().map(|t| t.0).product();
    for i in 0..3 {
        for j in i + 1..3 {
            if gcd(types[i].0, types[j].0) != 1 {
                return Err(Error::Internal("fibre orders are not pairwise coprime".into()));
            }
        }
    }
    let tl = target * Q::from_integer(l);
    if !tl.is_integer() {
        return Err(Error::Internal("A·L/a² is not integral".into()));
    }
    let tl = tl.to_integer();
    let mut pairs = Vec::new();
    let mut sum = Q::zero();
    for &(alpha, s) in &types {
        if alpha == 1 {
            continue;
        }
        let coef = (s * (l / alpha)).rem_euclid(alpha);
        let (g, inv, _) = crate::rational::ext_gcd(coef, alpha);
        if g != 1 {
            return Err(Error::Internal(format!("cannot solve for β modulo {alpha}")));
        }
        let beta = (tl.rem_euclid(alpha) * inv).rem_euclid(alpha);
        if gcd(beta, alpha) != 1 {
            return Err(Error::Internal(format!("β = {beta} not coprime to {alpha}")));
        }
        for _ in 0..s {
            pairs.push((alpha, beta));
        }
        sum += Q::from_integer(s) * q(beta, alpha);
    }
    let b = target - sum;
    if !b.is_integer() {
        return Err(Error::Internal(format!("b = {b} is not an integer")));
    }
    pairs.sort();
    let sd = SeifertData { total_orientable: true, base_orientable: true, genus, boundaries: 0, pairs, b: b.to_integer() };
    debug_assert_eq!(seifert::euler_number(&sd), -target);
    Ok(sd)
}

/// Knot input for branched-cover queries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KnotDescriptor {
    Torus { p: i64, q: i64 },
    TwoBridge { p: i64, q: i64 },
    Named { name: String },
}

impl KnotDescriptor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KnotDescriptor::Torus { p, q } => {
                if p < 2 || q < 2 || gcd(p, q) != 1 {
                    return invalid(format!("torus knot T({p},{q}) needs coprime p, q ≥ 2"));
                }
            }
            KnotDescriptor::TwoBridge { p, q } => {
                if p < 1 || gcd(p, q) != 1 {
                    return invalid(format!("two-bridge fraction {p}/{q} needs p ≥ 1 and gcd 1"));
                }
                if p % 2 == 0 {
                    return invalid(format!("{p}/{q} with p even is a two-component link, not a knot"));
                }
            }
            KnotDescriptor::Named { ref name } => {
                if name.trim().is_empty() {
                    return invalid("empty knot name");
                }
            }
        }
        Ok(())
    }
}

pub fn torus_knot_cover_verdict(p: i64, qq: i64, n: i64) -> Result<Verdict> {
    KnotDescriptor::Torus { p, q: qq }.validate()?;
    if n < 2 {
        return invalid("cover degree must be at least 2");
    }
    let sd = brieskorn_seifert(p, qq, n)?;
    let mut v = single_seifert_verdict(&sd)?;
    v.hypotheses.insert(0, Hypothesis::checked("branched cover is the Brieskorn manifold", true, format!("Σ_{n}(T({p},{qq})) = Σ({p},{qq},{n}) = {sd}")));
    v.data["brieskorn"] = json!([p, qq, n]);
    Ok(v)
}

/// The double branched cover of the two-bridge knot p/q is L(p, q).
pub fn two_bridge_double_cover_verdict(p: i64, qq: i64) -> Result<Verdict> {
    if p < 1 || gcd(p, qq) != 1 {
        return invalid(format!("invalid two-bridge fraction {p}/{qq}"));
    }
    let hyps = vec![
        Hypothesis::checked("double branched cover is a lens space", true, format!("Σ2 = L({p},{})", qq.rem_euclid(p))),
        Hypothesis::checked("π1 cyclic", true, format!("π1 ≅ Z/{p}")),
    ];
    Ok(Verdict::certified(Rule::FiniteCyclic, hyps, json!({ "lens_space": [p, qq.rem_euclid(p)], "order": p })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnownNegativeEntry {
    pub name: &'static str,
    pub identifications: &'static [&'static str],
    pub citation: &'static str,
}

pub static KNOWN_NEGATIVES: &[KnownNegativeEntry] = &[
    KnownNegativeEntry {
        name: "Weeks manifold",
        identifications: &["weeks", "weeks manifold", "Σ₃(5₂)", "Σ₂(9₄₉)", "m003(-3,1)"],
        citation: "the fundamental group of the Weeks manifold is not circularly orderable; the Weeks manifold is the 3-fold cyclic branched cover of 5₂ and the double branched cover of 9₄₉",
    },
    KnownNegativeEntry {
        name: "Poincaré homology sphere",
        identifications: &["poincaré homology sphere", "poincare sphere", "poincaré", "Σ(2,3,5)", "Σ₅(3₁)", "Σ₃(5₁)", "Σ₂(10₁₂₄)"],
        citation: "π1 is the binary icosahedral group of order 120, finite and noncyclic",
    },
    KnownNegativeEntry {
        name: "quaternionic manifold S³/Q8",
        identifications: &["Σ₃(3₁)", "Σ(2,3,3)", "s3/q8"],
        citation: "π1 is the quaternion group of order 8, finite and noncyclic",
    },
    KnownNegativeEntry {
        name: "S³ / binary tetrahedral group",
        identifications: &["Σ₄(3₁)", "Σ(2,3,4)", "Σ₂(8₁₉)"],
        citation: "π1 is the binary tetrahedral group of order 24, finite and noncyclic",
    },
];

/// Lowercase, fold subscripts and Σ/sigma, drop spacing and separators.
pub fn normalize_name(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        let c = match ch {
            '₀'..='₉' => char::from_digit(ch as u32 - '₀' as u32, 10).unwrap(),
            'Σ' | 'σ' => 's',
            'é' | 'É' => 'e',
            c if c.is_whitespace() || "_-{}^'\\".contains(c) => continue,
            c => c.to_ascii_lowercase(),
        };
        out.push(c);
    }
    out.replace("sigma", "s")
}

pub fn known_negative_lookup(name: &str) -> Option<&'static KnownNegativeEntry> {
    let key = normalize_name(name);
    KNOWN_NEGATIVES.iter().find(|e| normalize_name(e.name) == key || e.identifications.iter().any(|i| normalize_name(i) == key))
}

pub fn known_negative_verdict(entry: &KnownNegativeEntry, queried: &str) -> Verdict {
    let mut v = Verdict::not_co(
        Rule::KnownNegative,
        format!("{} is recorded as not circularly orderable", entry.name),
        vec![Hypothesis::checked("database match", true, format!("'{queried}' resolves to {}", entry.name))],
        json!({ "entry": entry }),
    );
    v.citations.push(entry.citation.to_string());
    v
}

/// Small table of two-bridge knots by fraction class.
const TWO_BRIDGE_NAMES: &[(i64, i64, &str)] = &[(3, 1, "3₁"), (5, 2, "4₁"), (5, 1, "5₁"), (7, 2, "5₂"), (7, 1, "7₁"), (9, 2, "6₁")];

/// Name of the two-bridge knot p/q, identifying q with ±q^{±1} mod p.
pub fn two_bridge_name(p: i64, qq: i64) -> Option<&'static str> {
    let reps = |q0: i64| -> Vec<i64> {
        let mut v = vec![q0.rem_euclid(p), (-q0).rem_euclid(p)];
        let (g, inv, _) = crate::rational::ext_gcd(q0.rem_euclid(p), p);
        if g == 1 {
            v.push(inv.rem_euclid(p));
            v.push((-inv).rem_euclid(p));
        }
        v
    };
    let ours = reps(qq);
    TWO_BRIDGE_NAMES.iter().find(|&&(pp, q0, _)| pp == p && reps(q0).iter().any(|x| ours.contains(x))).map(|t| t.2)
}

fn torus_name(name: &str) -> Option<(i64, i64)> {
    match normalize_name(name).as_str() {
        "31" | "trefoil" => Some((2, 3)),
        "51" => Some((2, 5)),
        "71" => Some((2, 7)),
        "819" => Some((3, 4)),
        "10124" => Some((3, 5)),
        _ => None,
    }
}

/// Verdict for Σ_n(K).
pub fn branched_cover_verdict(knot: &KnotDescriptor, n: i64) -> Result<Verdict> {
    knot.validate()?;
    if n < 2 {
        return invalid("cover degree must be at least 2");
    }
    let name = match knot {
        KnotDescriptor::Torus { p, q } => return torus_knot_cover_verdict(*p, *q, n),
        KnotDescriptor::TwoBridge { p, q } => {
            if n == 2 {
                return two_bridge_double_cover_verdict(*p, *q);
            }
            match two_bridge_name(*p, *q) {
                Some(nm) => nm.to_string(),
                None => {
                    return Ok(Verdict::unknown(
                        vec![format!("{n}-fold covers of the two-bridge knot {p}/{q} are not implemented")],
                        vec![],
                        json!({}),
                    ))
                }
            }
        }
        KnotDescriptor::Named { name } => name.clone(),
    };
    let query = format!("Σ{n}({name})");
    if let Some(e) = known_negative_lookup(&query) {
        return Ok(known_negative_verdict(e, &query));
    }
    if let Some((p, q)) = torus_name(&name) {
        return torus_knot_cover_verdict(p, q, n);
    }
    Ok(Verdict::unknown(
        vec![format!("no rule applies to {query}; the set of n with circularly orderable Σ_n(K) is not known in general")],
        vec![],
        json!({}),
    ))
}

/// A degree whose branched cover is known to have infinite circularly
/// orderable π₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnownCover {
    pub n: i64,
    pub infinite: bool,
}

pub fn divisible_propagation(known: &[KnownCover], m: i64, prime: bool) -> Result<Verdict> {
    if m < 2 {
        return invalid("cover degree must be at least 2");
    }
    let mut hyps = vec![Hypothesis::checked("knot is prime", prime, "caller flag")];
    if !prime {
        return Ok(Verdict::unknown(vec!["the divisibility surjection needs a prime knot".into()], hyps, json!({})));
    }
    hyps[0] = Hypothesis::asserted("knot is prime", "caller flag");
    let found = known.iter().filter(|k| k.n >= 2 && k.infinite && m % k.n == 0).min_by_key(|k| k.n);
    match found {
        Some(k) => {
            hyps.push(Hypothesis::asserted(format!("Σ{}(K) has infinite circularly orderable π1", k.n), "caller witness"));
            hyps.push(Hypothesis::checked("degree divides", true, format!("{} | {m}", k.n)));
            Ok(Verdict::certified(Rule::DivisibleCovers, hyps, json!({ "n": k.n, "m": m })))
        }
        None => Ok(Verdict::unknown(vec![format!("no known infinite circularly orderable cover degree divides {m}")], hyps, json!({}))),
    }
}

fn word_pow(fp: &FreeProduct, w: &Word, k: i64) -> Result<Word> {
    fp.pow(w, k)
}

/// ℤ_k ∗ ℤ_k carries the planar circular ordering; check it on a small
/// ball when that is cheap.
fn validate_free_product_order(factors: Vec<Option<u64>>) -> Result<Option<(usize, bool)>> {
    let fp = Arc::new(FreeProduct::new(factors)?);
    let ball = fp.ball(2, 3);
    if ball.len() > 60 {
        return Ok(None);
    }
    let c = planar_free_product_order(fp.clone(), default_factor_orders(&fp)?)?;
    let rep = validate_axioms(&c, &ball)?;
    Ok(Some((ball.len(), rep.is_ok())))
}

/// π₁(M(k, m)) is the generalized Fibonacci group with relations
/// x_i x_{i+1}^k = x_{i+2}, indices mod 2m. Sending even generators to x
/// and odd ones to y gives an epimorphism onto ℤ_k ∗ ℤ_k.
pub fn fibonacci_verdict(k: i64, m: i64) -> Result<Verdict> {
    if k < 1 || m < 1 {
        return invalid("k and m must be positive");
    }
    if k == 1 {
        return Ok(Verdict::unknown(
            vec!["k = 1: the quotient Z/1 * Z/1 is trivial, so the criterion says nothing".into()],
            vec![Hypothesis::checked("k ≥ 2", false, "k = 1")],
            json!({}),
        ));
    }
    let fp = FreeProduct::new(vec![Some(k as u64), Some(k as u64)])?;
    let gens = [fp.generator(0)?, fp.generator(1)?];
    let n = 2 * m;
    let rho = |i: i64| gens[(i.rem_euclid(n) % 2) as usize].clone();
    let mut checked = Vec::new();
    for i in 0..n {
        let lhs = fp.mul(&rho(i), &word_pow(&fp, &rho(i + 1), k)?)?;
        let rhs = rho(i + 2);
        if lhs != rhs {
            return Err(Error::Internal(format!("relation {i} does not map to the identity")));
        }
        checked.push(format!("ρ(x{}·x{}^{k}) = {} = ρ(x{})", i, (i + 1) % n, show_word(&lhs), (i + 2) % n));
    }
    let mut hyps = vec![
        Hypothesis::checked("k ≥ 2", true, format!("k = {k}")),
        Hypothesis::checked("ρ respects every relation", true, format!("{} relations reduced in Z/{k} * Z/{k}", checked.len())),
        Hypothesis::checked("ρ is onto", true, "both free factor generators are images"),
        Hypothesis::checked("Z/k * Z/k is infinite", true, "two nontrivial factors"),
        Hypothesis::asserted("M(k, m) is irreducible", "known for k ≥ 2"),
    ];
    if let Some((size, ok)) = validate_free_product_order(vec![Some(k as u64), Some(k as u64)])? {
        hyps.push(Hypothesis::checked("planar ordering of the quotient passes the axioms", ok, format!("ball of {size} elements")));
    }
    Ok(Verdict::certified(Rule::FreeProductQuotient, hyps, json!({ "k": k, "m": m, "relations": checked })))
}

fn show_word(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|&(f, e): &Syllable| format!("{}^{e}", ["x", "y"].get(f).copied().unwrap_or("g"))).collect::<Vec<_>>().join("·")
}

/// One (p_j/q_j; r_j/s_j) pair of a periodic Takahashi manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TakahashiPair {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

/// Periodic Takahashi manifolds surject onto ℤ_{p₁} ∗ ℤ_{r₁} ∗ ⋯; the
/// free product is infinite once two factors are nontrivial. Factors are
/// counted with multiplicity.
pub fn takahashi_verdict(pairs: &[TakahashiPair], n: i64, prime: bool) -> Result<Verdict> {
    if pairs.is_empty() || n < 1 {
        return invalid("need at least one pair and n ≥ 1");
    }
    for t in pairs {
        if t.p < 0 || t.r < 0 || gcd(t.p, t.q) != 1 || gcd(t.r, t.s) != 1 {
            return invalid(format!("invalid pair {}/{}; {}/{}", t.p, t.q, t.r, t.s));
        }
    }
    let orders: Vec<i64> = pairs.iter().flat_map(|t| [t.p, t.r]).collect();
    let nontrivial = orders.iter().filter(|&&x| x != 1).count();
    let mut hyps = vec![
        Hypothesis::checked("at least two factors differ from 1", nontrivial >= 2, format!("factor orders {orders:?}")),
        Hypothesis::checked("branch link is prime", prime, "caller flag"),
    ];
    if !prime {
        return Ok(Verdict::unknown(vec!["primeness of the branch link is required for irreducibility".into()], hyps, json!({})));
    }
    hyps[1] = Hypothesis::asserted("branch link is prime", "caller flag");
    if nontrivial < 2 {
        return Ok(Verdict::unknown(vec!["the free product quotient is finite or cyclic".into()], hyps, json!({ "orders": orders })));
    }
    let desc: Vec<String> = orders.iter().filter(|&&x| x != 1).map(|&x| if x == 0 { "Z".to_string() } else { format!("Z/{x}") }).collect();
    Ok(Verdict::certified(Rule::FreeProductQuotient, hyps, json!({ "quotient": desc.join(" * "), "n": n })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryQuery {
    pub p: i64,
    pub q: i64,
    /// Fractional Dehn twist coefficient of the monodromy.
    #[serde(with = "crate::rational::q_string")]
    pub c: Q,
}

/// True when p/q lies outside the excluded window around p·c.
pub fn surgery_window(query: &SurgeryQuery) -> Result<bool> {
    let SurgeryQuery { p, q: qq, c } = *query;
    if p < 1 {
        return invalid("p must be at least 1");
    }
    if qq == 0 {
        return invalid("q = 0 is the meridian slope, not a surgery");
    }
    if gcd(p, qq) != 1 {
        return invalid(format!("p = {p} and q = {qq} are not coprime"));
    }
    let pc = c * Q::from_integer(p);
    if pc.is_integer() {
        Ok(Q::from_integer(qq) != pc)
    } else {
        let f = pc.floor().to_integer();
        Ok(qq != f && qq != f + 1)
    }
}

pub fn surgery_verdict(query: &SurgeryQuery, hypotheses_asserted: bool) -> Result<Verdict> {
    let outside = surgery_window(query)?;
    let pc = query.c * Q::from_integer(query.p);
    let mut hyps = vec![Hypothesis::checked("q outside the window", outside, format!("p·c = {}", format_q(&pc)))];
    let data = json!({ "p": query.p, "q": query.q, "pc": format_q(&pc), "outside_window": outside });
    if !hypotheses_asserted {
        hyps.push(Hypothesis::checked("fibred hyperbolic knot in an irreducible integer homology sphere", false, "not asserted"));
        return Ok(Verdict::unknown(vec!["applicability hypotheses not asserted".into()], hyps, data));
    }
    hyps.push(Hypothesis::asserted("fibred hyperbolic knot in an irreducible integer homology sphere", "caller assertion"));
    if outside {
        Ok(Verdict::certified(Rule::SurgeryWindow, hyps, data))
    } else {
        Ok(Verdict::unknown(vec!["q lies in the excluded window".into()], hyps, data))
    }
}
