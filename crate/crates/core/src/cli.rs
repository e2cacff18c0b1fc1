//! Command-line front end. Every invocation answers exactly one query and
//! prints one result document:
//!
//! ```text
//! {schema, query, verdict, rule, citations, hypotheses, data}
//! ```
//!
//! Queries come from subcommand flags or from an input document
//! `{"schema": "circord/v1", "query": {"command": ..., ...}}`. A result
//! document can be fed back with `--replay`, which recomputes it and
//! compares.

use std::ffi::OsString;
use std::fmt::Debug;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::apps::{self, KnotDescriptor, KnownCover, SurgeryQuery, TakahashiPair};
use crate::bruteforce::{arrangement_order, is_circularly_orderable_bruteforce, DEFAULT_BOUND};
use crate::error::{invalid, Error, Result};
use crate::euler::{euler_class_order, lo_normal_subgroup, CocycleTable};
use crate::extensions::{quotient_circular_order, rot, rot_one_over_p, CentralExtension, RotConfig};
use crate::graph::{self, ClassCHints, JsjTree, SlopeDetectQuery};
use crate::groups::{catalog, Cyclic, FreeProduct, Group};
use crate::orders::{
    cyclic_rot_order, default_factor_orders, extend_cyclic_order, planar_free_product_order, rational_rotation_order_on_z,
    secret_left_order, standard_circle_order, standard_left_order_z, validate_axioms, CircularOrderOracle,
};
use crate::rational::{format_q, parse_q, q_string, CirclePoint, Q};
use crate::seifert::{self, Filling, SeifertData, Slope};
use crate::verdict::{Hypothesis, Rule, Verdict, VerdictKind};

pub const SCHEMA: &str = "circord/v1";

/// A circular ordering the library can build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Construction {
    /// ℤ/n with g ↦ e^{2πi kg/n}.
    CyclicRot { n: u64, k: i64 },
    /// ℤ with rot(1) = r.
    RationalRotation {
        #[serde(with = "q_string")]
        r: Q,
    },
    /// ℤ/z as the quotient of the standard order on ℤ.
    QuotientZ { z: i64 },
    /// ℤ with rot(1) = 1/p, from the standard order and z = 1.
    RotOneOverP { p: i64 },
    /// Extension to ℤ of the ordering on kℤ given by rot(k) = r.
    Extend {
        k: i64,
        #[serde(with = "q_string")]
        r: Q,
    },
    /// The standard left order on ℤ read cyclically.
    Secret,
    /// Rational points of the circle with the given denominator.
    Circle { denominator: i64 },
    /// Planar ordering of a free product of cyclic groups; 0 means ℤ.
    FreeProduct { factors: Vec<u64> },
    /// A catalog group with an explicit arrangement, or the first one found.
    Finite {
        group: String,
        #[serde(default)]
        arrangement: Option<Vec<usize>>,
    },
    /// The left order of the central extension of cyclic-rot(n, k), read cyclically.
    Extension { n: u64, k: i64 },
    /// ℤ³ with fibre rotation r.
    Torus3 {
        #[serde(with = "q_string")]
        r: Q,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum GraphOp {
    ClassC {
        tree: JsjTree,
        #[serde(default)]
        hints: ClassCHints,
    },
    RationalLongitude { tree: JsjTree, nodes: Vec<usize> },
    SlopeDetect { query: SlopeDetectQuery },
    Fill { piece: SeifertData, boundary: usize, slope: Slope },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillSpec {
    #[serde(default)]
    pub boundary: usize,
    pub slope: Slope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Query {
    ValidateOrder {
        construction: Construction,
        #[serde(default)]
        radius: Option<i64>,
    },
    FiniteCo {
        group: String,
        #[serde(default = "default_bound")]
        bound: usize,
    },
    EulerOrder { construction: Construction },
    Rot {
        construction: Construction,
        g: i64,
        #[serde(default = "default_n_max")]
        n_max: u64,
        #[serde(default)]
        denominator_bound: u64,
    },
    Seifert {
        data: SeifertData,
        #[serde(default)]
        fill: Option<FillSpec>,
        #[serde(default)]
        rotation: bool,
        #[serde(default)]
        lo_hint: Option<bool>,
    },
    Graph { op: GraphOp },
    TwoPiece { tree: JsjTree },
    BranchedCover {
        knot: KnotDescriptor,
        #[serde(default)]
        n: Option<i64>,
        #[serde(default)]
        range: Option<[i64; 2]>,
        #[serde(default)]
        known: Vec<KnownCover>,
        #[serde(default)]
        prime: bool,
    },
    SurgeryWindow {
        p: i64,
        q: i64,
        #[serde(with = "q_string")]
        c: Q,
        #[serde(default)]
        hypotheses_asserted: bool,
    },
    Fibonacci { k: i64, m: i64 },
    Takahashi {
        pairs: Vec<TakahashiPair>,
        n: i64,
        #[serde(default)]
        prime: bool,
    },
}

fn default_bound() -> usize {
    DEFAULT_BOUND
}

fn default_n_max() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema: String,
    pub query: Query,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub schema: &'static str,
    pub query: Query,
    pub verdict: VerdictKind,
    pub rule: Option<Rule>,
    pub citations: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub data: Value,
}

impl ResultDocument {
    fn new(query: Query, v: Verdict) -> Self {
        let mut data = match v.data {
            Value::Object(m) => Value::Object(m),
            Value::Null => json!({}),
            other => json!({ "value": other }),
        };
        if !v.notes.is_empty() {
            data["notes"] = json!(v.notes);
        }
        ResultDocument { schema: SCHEMA, query, verdict: v.verdict, rule: v.rule, citations: v.citations, hypotheses: v.hypotheses, data }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("result documents serialize")
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents serialize")
    }
}

pub fn parse_input(text: &str) -> Result<Query> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("input document: {e}")))?;
    if doc.schema != SCHEMA {
        return invalid(format!("unsupported schema {:?}, expected {SCHEMA:?}", doc.schema));
    }
    Ok(doc.query)
}

/// Answer one query.
pub fn run_query(query: &Query) -> Result<ResultDocument> {
    let v = match query {
        Query::ValidateOrder { construction, radius } => validate_order(construction, *radius)?,
        Query::FiniteCo { group, bound } => finite_co(group, *bound)?,
        Query::EulerOrder { construction } => euler_order(construction)?,
        Query::Rot { construction, g, n_max, denominator_bound } => rot_query(construction, *g, *n_max, *denominator_bound)?,
        Query::Seifert { data, fill, rotation, lo_hint } => seifert_query(data, fill.as_ref(), *rotation, *lo_hint)?,
        Query::Graph { op } => graph_query(op)?,
        Query::TwoPiece { tree } => {
            tree.validate()?;
            if tree.nodes.len() != 2 {
                return invalid("two-piece needs exactly two nodes");
            }
            graph::two_piece_verdict(tree)?
        }
        Query::BranchedCover { knot, n, range, known, prime } => branched_cover(knot, *n, *range, known, *prime)?,
        Query::SurgeryWindow { p, q, c, hypotheses_asserted } => {
            apps::surgery_verdict(&SurgeryQuery { p: *p, q: *q, c: *c }, *hypotheses_asserted)?
        }
        Query::Fibonacci { k, m } => apps::fibonacci_verdict(*k, *m)?,
        Query::Takahashi { pairs, n, prime } => apps::takahashi_verdict(pairs, *n, *prime)?,
    };
    Ok(ResultDocument::new(query.clone(), v))
}

/// Outcome of re-running a stored result document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub identical: bool,
    pub failed_hypotheses: Vec<String>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.identical && self.failed_hypotheses.is_empty()
    }
}

pub fn replay(text: &str) -> Result<ReplayReport> {
    let stored: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("result document: {e}")))?;
    let schema = stored.get("schema").and_then(Value::as_str).unwrap_or_default();
    if schema != SCHEMA {
        return invalid(format!("unsupported schema {schema:?}"));
    }
    let query: Query = serde_json::from_value(stored.get("query").cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::InvalidInput(format!("embedded query: {e}")))?;
    let fresh = run_query(&query)?.to_value();
    let mut failed = Vec::new();
    if fresh["verdict"] == json!("CO_CERTIFIED") {
        for h in fresh["hypotheses"].as_array().into_iter().flatten() {
            if h["holds"] != json!(true) {
                failed.push(h["name"].as_str().unwrap_or("?").to_string());
            }
        }
    }
    Ok(ReplayReport { identical: fresh == stored, failed_hypotheses: failed })
}

fn ordering_verdict(hyps: Vec<Hypothesis>, data: Value) -> Verdict {
    if hyps.iter().all(|h| h.holds) {
        Verdict::certified(Rule::ExplicitOrdering, hyps, data)
    } else {
        Verdict::unknown(vec!["the constructed ordering failed a check".into()], hyps, data)
    }
}

fn report_value<G: Group>(c: &CircularOrderOracle<G>, elems: &[G::Elem]) -> Result<(bool, Value)> {
    let rep = validate_axioms(c, elems)?;
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| json!({ "axiom": v.axiom, "tuple": format!("{:?}", v.tuple), "detail": v.detail }))
        .collect();
    let value = json!({
        "order": c.name(),
        "elements": rep.elements,
        "checked": rep.checked,
        "totalViolations": rep.total_violations,
        "violations": violations,
    });
    Ok((rep.is_ok(), value))
}

fn window(radius: i64) -> Vec<i64> {
    (-radius..=radius).collect()
}

fn positive(x: i64, what: &str) -> Result<i64> {
    if x < 1 {
        return invalid(format!("{what} must be positive"));
    }
    Ok(x)
}

/// Orderings whose group is ℤ or ℤ/n with integer elements.
fn integer_order(c: &Construction) -> Result<Option<CircularOrderOracle<Cyclic>>> {
    Ok(Some(match c {
        Construction::CyclicRot { n, k } => cyclic_rot_order(*n, *k)?,
        Construction::RationalRotation { r } => rational_rotation_order_on_z(CirclePoint::new(*r))?,
        Construction::RotOneOverP { p } => rot_one_over_p(standard_left_order_z(), 1, positive(*p, "p")?)?,
        Construction::Extend { k, r } => extend_cyclic_order(positive(*k, "k")?, &rational_rotation_order_on_z(CirclePoint::new(*r))?)?,
        Construction::Secret => secret_left_order(&standard_left_order_z()),
        _ => return Ok(None),
    }))
}

fn validate_order(c: &Construction, radius: Option<i64>) -> Result<Verdict> {
    let r = radius.unwrap_or(6).clamp(0, 40);
    let (ok, data) = if let Some(o) = integer_order(c)? {
        let elems = match c {
            Construction::CyclicRot { n, .. } => (0..*n as i64).collect(),
            _ => window(r),
        };
        report_value(&o, &elems)?
    } else {
        match c {
            Construction::QuotientZ { z } => {
                let o = quotient_circular_order(standard_left_order_z(), positive(*z, "z")?)?;
                report_value(&o, &(0..*z).collect::<Vec<_>>())?
            }
            Construction::Circle { denominator } => {
                let d = positive(*denominator, "denominator")?;
                let elems: Vec<CirclePoint> = (0..d).map(|a| CirclePoint::new(Q::new(a, d))).collect();
                report_value(&standard_circle_order(), &elems)?
            }
            Construction::FreeProduct { factors } => {
                let fp = Arc::new(FreeProduct::new(factors.iter().map(|&f| if f == 0 { None } else { Some(f) }).collect())?);
                let o = planar_free_product_order(fp.clone(), default_factor_orders(&fp)?)?;
                let ball = fp.ball(radius.unwrap_or(2).clamp(0, 4) as usize, 2);
                report_value(&o, &ball)?
            }
            Construction::Finite { group, arrangement } => {
                let g = Arc::new(catalog::by_name(group)?);
                let arr = match arrangement {
                    Some(a) => a.clone(),
                    None => match is_circularly_orderable_bruteforce(&g, DEFAULT_BOUND)?.witness {
                        Some(w) => w,
                        None => return Ok(Verdict::not_co(
                            Rule::FiniteNoncyclic,
                            format!("{} admits no circular ordering", g.name()),
                            vec![Hypothesis::checked("group is cyclic", false, g.name().to_string())],
                            json!({}),
                        )),
                    },
                };
                let o = arrangement_order(g.clone(), &arr)?;
                report_value(&o, &(0..g.order()).collect::<Vec<_>>())?
            }
            Construction::Extension { n, k } => {
                let ext = Arc::new(CentralExtension::new(cyclic_rot_order(*n, *k)?));
                let o = secret_left_order(&ext.left_order());
                let elems: Vec<(i64, i64)> = (-1..=1).flat_map(|a| (0..*n as i64).map(move |g| (a, g))).collect();
                report_value(&o, &elems)?
            }
            Construction::Torus3 { r } => {
                let o = seifert::materialize_t3_order(CirclePoint::new(*r))?;
                let rr = radius.unwrap_or(1).clamp(0, 2);
                let mut elems = Vec::new();
                for x in -rr..=rr {
                    for y in -rr..=rr {
                        for z in -rr..=rr {
                            elems.push([x, y, z]);
                        }
                    }
                }
                report_value(&o, &elems)?
            }
            _ => unreachable!("integer constructions handled above"),
        }
    };
    let hyps = vec![Hypothesis::checked("circular order axioms hold on the window", ok, format!("{} elements", data["elements"]))];
    Ok(ordering_verdict(hyps, json!({ "validation": data })))
}

fn finite_co(name: &str, bound: usize) -> Result<Verdict> {
    let g = catalog::by_name(name)?;
    let n = g.order();
    if n <= bound {
        let r = is_circularly_orderable_bruteforce(&g, bound)?;
        let data = json!({ "group": g.name(), "order": n, "examined": r.examined, "witness": r.witness });
        if r.orderable {
            let hyps = vec![Hypothesis::checked("left-invariant arrangement found", true, format!("{:?}", r.witness.unwrap_or_default()))];
            return Ok(Verdict::certified(Rule::ExplicitOrdering, hyps, data));
        }
        let hyps = vec![Hypothesis::checked("exhaustive search", true, format!("no invariant arrangement among {} candidates", r.examined))];
        return Ok(Verdict::not_co(Rule::FiniteNoncyclic, format!("{} is not cyclic", g.name()), hyps, data));
    }
    let cyclic = g.is_cyclic();
    let hyps = vec![Hypothesis::checked("group is cyclic", cyclic, format!("order {n}, above the enumeration bound {bound}"))];
    let data = json!({ "group": g.name(), "order": n });
    Ok(if cyclic {
        Verdict::certified(Rule::FiniteCyclic, hyps, data)
    } else {
        Verdict::not_co(Rule::FiniteNoncyclic, format!("{} is not cyclic", g.name()), hyps, data)
    })
}

fn euler_report<G: Group>(c: &CircularOrderOracle<G>) -> Result<Verdict> {
    let t = CocycleTable::from_order(c)?;
    t.validate()?;
    let k = euler_class_order(&t)?;
    let sub = lo_normal_subgroup(c)?;
    let hyps = vec![
        Hypothesis::checked("cocycle identity", true, format!("{} elements", t.order())),
        Hypothesis::checked("η solves k·F = δη", true, format!("k = {k}")),
    ];
    let data = json!({
        "order": c.name(),
        "groupOrder": t.order(),
        "eulerClassOrder": k,
        "kernel": sub.kernel,
        "quotient": format!("Z/{}", sub.k),
        "eta": sub.eta.eta,
    });
    Ok(ordering_verdict(hyps, data))
}

fn euler_order(c: &Construction) -> Result<Verdict> {
    match c {
        Construction::CyclicRot { n, k } => euler_report(&cyclic_rot_order(*n, *k)?),
        Construction::QuotientZ { z } => euler_report(&quotient_circular_order(standard_left_order_z(), positive(*z, "z")?)?),
        Construction::Finite { group, arrangement } => {
            let g = Arc::new(catalog::by_name(group)?);
            let arr = match arrangement {
                Some(a) => a.clone(),
                None => is_circularly_orderable_bruteforce(&g, DEFAULT_BOUND)?
                    .witness
                    .ok_or_else(|| Error::InvalidInput(format!("{} has no circular ordering", g.name())))?,
            };
            euler_report(&arrangement_order(g, &arr)?)
        }
        _ => invalid("euler-order needs a finite group: cyclic-rot, quotient-z or finite"),
    }
}

fn rot_value<G: Group<Elem = i64>>(c: &CircularOrderOracle<G>, g: i64, cfg: &RotConfig) -> Result<Verdict> {
    let value = rot(&g, c, cfg)?;
    let detail = match value.exact() {
        Some(v) => format!("exact {v}"),
        None => format!("within {}", value.interval()),
    };
    let hyps = vec![Hypothesis::checked("rotation number computed", true, detail)];
    Ok(ordering_verdict(hyps, json!({ "order": c.name(), "g": g, "nMax": cfg.n_max, "rot": value })))
}

fn rot_query(c: &Construction, g: i64, n_max: u64, denominator_bound: u64) -> Result<Verdict> {
    if n_max == 0 {
        return invalid("nMax must be positive");
    }
    let cfg = RotConfig { n_max, denominator_bound, ..RotConfig::default() };
    if let Some(o) = integer_order(c)? {
        return rot_value(&o, g, &cfg);
    }
    match c {
        Construction::QuotientZ { z } => {
            let o = quotient_circular_order(standard_left_order_z(), positive(*z, "z")?)?;
            let g = g.rem_euclid(*z);
            rot_value(&o, g, &cfg)
        }
        _ => invalid("rot needs an ordering of Z or Z/n"),
    }
}

fn bounded_seifert_verdict(sd: &SeifertData) -> Result<Verdict> {
    let h = seifert::h1(sd)?;
    if !sd.total_orientable {
        return Ok(Verdict::unknown(vec!["nonorientable total space: not classified".into()], vec![], json!({})));
    }
    let hyps = vec![Hypothesis::checked("b1 > 0", h.rank > 0, format!("H1 = {}", h.describe()))];
    Ok(Verdict::certified(Rule::B1PositiveLo, hyps, json!({})))
}

/// Verdict for the result of a Dehn filling.
pub fn filling_verdict(f: &Filling) -> Result<Verdict> {
    match f {
        Filling::Seifert { data } if data.is_closed() => graph::single_seifert_verdict(data),
        Filling::Seifert { data } => bounded_seifert_verdict(data),
        Filling::ConnectedSum { summands, nontrivial, s1xs2 } => {
            let infinite = *s1xs2 > 0 || *nontrivial >= 2;
            let d = json!({ "summands": summands });
            if infinite {
                let hyps = vec![Hypothesis::checked("at least two nontrivial free factors", true, f.describe())];
                Ok(Verdict::certified(Rule::FreeProductQuotient, hyps, d))
            } else {
                let hyps = vec![Hypothesis::checked("π1 finite cyclic", true, f.describe())];
                Ok(Verdict::certified(Rule::FiniteCyclic, hyps, d))
            }
        }
        Filling::Degenerate { .. } => Ok(Verdict::unknown(vec![format!("{}: infinite, circular orderability not decided", f.describe())], vec![], json!({}))),
    }
}

fn seifert_query(sd: &SeifertData, fill: Option<&FillSpec>, rotation: bool, lo_hint: Option<bool>) -> Result<Verdict> {
    sd.validate()?;
    let mut v = if sd.is_closed() { graph::single_seifert_verdict(sd)? } else { bounded_seifert_verdict(sd)? };
    let h = seifert::h1(sd)?;
    let class = if sd.boundaries <= 1 { Some(seifert::base_orbifold_class(sd)) } else { None };
    let mut data = json!({
        "seifert": sd.normalized().to_string(),
        "h1": h.describe(),
        "orbifoldEulerCharacteristic": format_q(&seifert::orbifold_euler_char(sd)),
        "baseOrbifold": class,
    });
    if sd.is_closed() {
        data["eulerNumber"] = json!(format_q(&seifert::euler_number(sd)));
        data["finitePi1"] = json!(seifert::finite_pi1(sd)?);
    }
    if sd.boundaries == 1 {
        data["rationalLongitude"] = json!(seifert::rational_longitude(sd)?);
        data["admitsFiniteFilling"] = json!(seifert::admits_finite_filling(sd)?);
    }
    if rotation {
        data["fibreRotation"] = match seifert::fibre_rotation_classification(sd, lo_hint) {
            Ok(r) => json!(r),
            Err(Error::Refused(m)) => json!({ "refused": m }),
            Err(e) => return Err(e),
        };
    }
    if let Some(fs) = fill {
        let f = seifert::dehn_fill(sd, fs.boundary, &fs.slope)?;
        let fv = filling_verdict(&f)?;
        data["fill"] = json!({
            "slope": fs.slope,
            "result": f.describe(),
            "pi1Infinite": f.pi1_infinite()?,
            "verdict": fv.verdict,
            "rule": fv.rule,
        });
    }
    if let Value::Object(extra) = std::mem::take(&mut v.data) {
        for (k, x) in extra {
            data[k] = x;
        }
    }
    v.data = data;
    Ok(v)
}

fn graph_query(op: &GraphOp) -> Result<Verdict> {
    match op {
        GraphOp::ClassC { tree, hints } => {
            tree.validate()?;
            graph::class_c_verdict(tree, hints)
        }
        GraphOp::RationalLongitude { tree, nodes } => {
            tree.validate()?;
            let l = graph::rational_longitude_graph(tree, nodes)?;
            Ok(Verdict::unknown(vec!["informational query: no verdict requested".into()], vec![], json!({ "longitude": l })))
        }
        GraphOp::SlopeDetect { query } => graph::slope_detect_verdict(query),
        GraphOp::Fill { piece, boundary, slope } => {
            piece.validate()?;
            let f = seifert::dehn_fill(piece, *boundary, slope)?;
            let mut v = filling_verdict(&f)?;
            v.data["filling"] = json!(f);
            v.data["result"] = json!(f.describe());
            Ok(v)
        }
    }
}

fn branched_cover(knot: &KnotDescriptor, n: Option<i64>, range: Option<[i64; 2]>, known: &[KnownCover], prime: bool) -> Result<Verdict> {
    let single = |m: i64| -> Result<Verdict> {
        let v = apps::branched_cover_verdict(knot, m)?;
        if v.verdict == VerdictKind::UNKNOWN && !known.is_empty() {
            let d = apps::divisible_propagation(known, m, prime)?;
            if d.is_certified() {
                return Ok(d);
            }
        }
        Ok(v)
    };
    match (n, range) {
        (Some(m), None) => single(m),
        (None, Some([lo, hi])) => {
            if lo < 2 || hi < lo || hi - lo > 1000 {
                return invalid("range must satisfy 2 ≤ from ≤ to with at most 1000 degrees");
            }
            let mut table = Vec::new();
            let mut co = Vec::new();
            for m in lo..=hi {
                let v = single(m)?;
                if v.is_certified() {
                    co.push(m);
                }
                let reason = v.notes.first().cloned().or_else(|| v.data.get("group").and_then(Value::as_str).map(String::from));
                table.push(json!({ "n": m, "verdict": v.verdict, "rule": v.rule, "reason": reason }));
            }
            Ok(Verdict::unknown(
                vec!["table query: per-degree verdicts are listed in data.table".into()],
                vec![],
                json!({ "table": table, "certified": co }),
            ))
        }
        _ => invalid("give exactly one of n or range"),
    }
}

#[derive(Parser, Debug)]
#[command(name = "circord", version, about = "Exact circular orderings and circular-orderability certificates")]
pub struct Cli {
    /// Read the query from an input document ("-" for standard input).
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Recompute a stored result document and compare.
    #[arg(long, value_name = "RESULT_FILE", conflicts_with = "input")]
    pub replay: Option<PathBuf>,
    /// Single-line output.
    #[arg(long, global = true)]
    pub compact: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ConstructionArgs {
    /// cyclic-rot, rational-rotation, quotient-z, rot-one-over-p, extend,
    /// secret, circle, free-product, finite, extension, torus3
    #[arg(long)]
    pub construction: Option<String>,
    /// Modulus (cyclic-rot, extension) or denominator (circle).
    #[arg(long)]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub z: Option<i64>,
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<u64>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub arrangement: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the circular order axioms on a finite window.
    ValidateOrder {
        #[command(flatten)]
        c: ConstructionArgs,
        #[arg(long)]
        radius: Option<i64>,
    },
    /// Circular orderability of a catalog group.
    FiniteCo {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Order of the Euler class and the associated normal subgroup.
    EulerOrder {
        #[command(flatten)]
        c: ConstructionArgs,
    },
    /// Rotation number of an element.
    Rot {
        #[command(flatten)]
        c: ConstructionArgs,
        #[arg(long, allow_hyphen_values = true)]
        g: Option<i64>,
        /// Power used for the interval bracket; the bracket has width 1/n.
        #[arg(long = "n", visible_alias = "n-max", default_value_t = 1000)]
        n_max: u64,
        #[arg(long, default_value_t = 0)]
        denominator_bound: u64,
    },
    /// Invariants and verdict for a Seifert fibred space.
    Seifert {
        /// Exceptional fibres as "alpha,beta" items separated by spaces or ';'.
        #[arg(long, allow_hyphen_values = true)]
        pairs: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long, default_value_t = 0)]
        boundaries: u32,
        #[arg(long)]
        nonorientable_base: bool,
        #[arg(long)]
        nonorientable: bool,
        /// Fill boundary 0 along "a,b" = a·section + b·fibre.
        #[arg(long, allow_hyphen_values = true)]
        fill: Option<String>,
        #[arg(long)]
        rotation: bool,
        #[arg(long)]
        lo: bool,
    },
    /// Graph manifold queries; needs --input or --tree.
    Graph {
        #[arg(long, default_value = "class-c")]
        op: String,
        /// JSJ tree as JSON, or @FILE.
        #[arg(long)]
        tree: Option<String>,
        #[arg(long)]
        fillings_in_class_c: bool,
        #[arg(long, value_delimiter = ',')]
        infinite_filling_edges: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
    },
    /// Two-piece graph manifold verdict.
    TwoPiece {
        #[arg(long)]
        tree: Option<String>,
    },
    /// Cyclic branched covers of knots.
    BranchedCover {
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        torus: Option<Vec<i64>>,
        #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true)]
        two_bridge: Option<Vec<i64>>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        range: Option<Vec<i64>>,
        /// Degrees known to give infinite circularly orderable covers.
        #[arg(long, value_delimiter = ',')]
        known: Vec<i64>,
        #[arg(long)]
        prime: bool,
    },
    /// Surgery window for a fibred knot.
    SurgeryWindow {
        #[arg(long)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        /// Fractional Dehn twist coefficient as "a/b".
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        assert_hypotheses: bool,
    },
    /// Generalized Fibonacci manifolds M(k, m).
    Fibonacci {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        m: i64,
    },
    /// Periodic Takahashi manifolds.
    Takahashi {
        /// "p,q,r,s"; repeat for each pair.
        #[arg(long = "pair", allow_hyphen_values = true)]
        pairs: Vec<String>,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        prime: bool,
    },
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.ok_or_else(|| Error::InvalidInput(format!("missing --{flag}")))
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("not an integer: {t:?}"))))
        .collect()
}

fn construction_from(c: &ConstructionArgs, default: &str) -> Result<Construction> {
    let kind = c.construction.clone().unwrap_or_else(|| default.to_string());
    let r = || -> Result<Q> { parse_q(&need(c.r.clone(), "r")?) };
    Ok(match kind.as_str() {
        "cyclic-rot" => Construction::CyclicRot { n: need(c.modulus, "modulus")?, k: c.k.unwrap_or(1) },
        "rational-rotation" => Construction::RationalRotation { r: r()? },
        "quotient-z" => Construction::QuotientZ { z: need(c.z, "z")? },
        "rot-one-over-p" => Construction::RotOneOverP { p: need(c.p, "p")? },
        "extend" => Construction::Extend { k: need(c.k, "k")?, r: r()? },
        "secret" => Construction::Secret,
        "circle" => Construction::Circle { denominator: need(c.modulus, "modulus")? as i64 },
        "free-product" => Construction::FreeProduct { factors: c.factors.clone() },
        "finite" => Construction::Finite { group: need(c.group.clone(), "group")?, arrangement: c.arrangement.clone() },
        "extension" => Construction::Extension { n: need(c.modulus, "modulus")?, k: c.k.unwrap_or(1) },
        "torus3" => Construction::Torus3 { r: r()? },
        other => return invalid(format!("unknown construction {other:?}")),
    })
}

fn read_arg_or_file(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn parse_tree(s: Option<String>) -> Result<JsjTree> {
    let text = read_arg_or_file(&need(s, "tree")?)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("tree: {e}")))
}

fn parse_slope(s: &str) -> Result<Slope> {
    match parse_ints(s)?.as_slice() {
        [a, b] => Slope::new(*a, *b),
        _ => invalid(format!("slope {s:?} must be \"a,b\"")),
    }
}

/// Translate subcommand flags into a query.
pub fn query_from_command(cmd: Command) -> Result<Query> {
    Ok(match cmd {
        Command::ValidateOrder { c, radius } => Query::ValidateOrder { construction: construction_from(&c, "cyclic-rot")?, radius },
        Command::FiniteCo { group, bound } => Query::FiniteCo { group: need(group, "group")?, bound },
        Command::EulerOrder { c } => Query::EulerOrder { construction: construction_from(&c, "cyclic-rot")? },
        Command::Rot { c, g, n_max, denominator_bound } => {
            Query::Rot { construction: construction_from(&c, "cyclic-rot")?, g: need(g, "g")?, n_max, denominator_bound }
        }
        Command::Seifert { pairs, b, genus, boundaries, nonorientable_base, nonorientable, fill, rotation, lo } => {
            let mut ps = Vec::new();
            for item in pairs.unwrap_or_default().split([' ', ';']).filter(|t| !t.is_empty()) {
                match parse_ints(item)?.as_slice() {
                    [a, bb] => ps.push((*a, *bb)),
                    _ => return invalid(format!("pair {item:?} must be \"alpha,beta\"")),
                }
            }
            let data = SeifertData {
                total_orientable: !nonorientable,
                base_orientable: !nonorientable_base,
                genus,
                boundaries,
                pairs: ps,
                b,
            };
            let fill = fill.map(|s| parse_slope(&s).map(|slope| FillSpec { boundary: 0, slope })).transpose()?;
            Query::Seifert { data, fill, rotation, lo_hint: lo.then_some(true) }
        }
        Command::Graph { op, tree, fillings_in_class_c, infinite_filling_edges, nodes } => {
            let tree = parse_tree(tree)?;
            let op = match op.as_str() {
                "class-c" => GraphOp::ClassC { tree, hints: ClassCHints { fillings_in_class_c, infinite_filling_edges } },
                "rational-longitude" => GraphOp::RationalLongitude { tree, nodes },
                other => return invalid(format!("graph op {other:?} needs an input document (class-c and rational-longitude have flags)")),
            };
            Query::Graph { op }
        }
        Command::TwoPiece { tree } => Query::TwoPiece { tree: parse_tree(tree)? },
        Command::BranchedCover { torus, two_bridge, name, n, range, known, prime } => {
            let knot = match (torus, two_bridge, name) {
                (Some(t), None, None) => KnotDescriptor::Torus { p: t[0], q: t[1] },
                (None, Some(t), None) => KnotDescriptor::TwoBridge { p: t[0], q: t[1] },
                (None, None, Some(name)) => KnotDescriptor::Named { name },
                _ => return invalid("give exactly one of --torus, --two-bridge, --name"),
            };
            let range = range.map(|r| [r[0], r[1]]);
            let known = known.into_iter().map(|n| KnownCover { n, infinite: true }).collect();
            Query::BranchedCover { knot, n, range, known, prime }
        }
        Command::SurgeryWindow { p, q, c, assert_hypotheses } => {
            Query::SurgeryWindow { p, q, c: parse_q(&c)?, hypotheses_asserted: assert_hypotheses }
        }
        Command::Fibonacci { k, m } => Query::Fibonacci { k, m },
        Command::Takahashi { pairs, n, prime } => {
            let mut ps = Vec::new();
            for s in pairs {
                match parse_ints(&s)?.as_slice() {
                    [p, q, r, s] => ps.push(TakahashiPair { p: *p, q: *q, r: *r, s: *s }),
                    _ => return invalid(format!("pair {s:?} must be \"p,q,r,s\"")),
                }
            }
            Query::Takahashi { pairs: ps, n, prime }
        }
    })
}

fn read_path(p: &PathBuf) -> Result<String> {
    if p.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
}

/// Run the CLI; returns the process exit code. 0 for any verdict, 1 for a
/// replay mismatch, 2 for usage and input errors.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(cli) {
        Ok((out, code)) => {
            println!("{out}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_cli(cli: Cli) -> Result<(String, i32)> {
    if let Some(path) = &cli.replay {
        let rep = replay(&read_path(path)?)?;
        let out = json!({
            "replay": if rep.ok() { "ok" } else { "mismatch" },
            "identical": rep.identical,
            "failedHypotheses": rep.failed_hypotheses,
        });
        return Ok((serde_json::to_string_pretty(&out).expect("json"), if rep.ok() { 0 } else { 1 }));
    }
    let query = match (&cli.input, cli.command) {
        (Some(path), _) => parse_input(&read_path(path)?)?,
        (None, Some(cmd)) => query_from_command(cmd)?,
        (None, None) => return invalid("no subcommand given (see --help)"),
    };
    let doc = run_query(&query)?;
    let out = if cli.compact { serde_json::to_string(&doc).expect("json") } else { doc.render() };
    Ok((out, 0))
}

/// Debug helper shared by tests: run a query given as JSON text.
pub fn run_json(text: &str) -> Result<Value> {
    Ok(run_query(&parse_input(text)?)?.to_value())
}
