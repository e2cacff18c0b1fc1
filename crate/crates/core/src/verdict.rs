//! Three-valued certification results shared by the graph and apps
//! modules. Certified verdicts always name exactly one rule.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(non_camel_case_types)]
pub enum VerdictKind {
    CO_CERTIFIED,
    NOT_CO,
    UNKNOWN,
}

/// The implemented certification rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    B1PositiveLo,
    SfsInfinite,
    FiniteCyclic,
    FiniteNoncyclic,
    TwoPiece1,
    TwoPiece2,
    TwoPiece3a,
    TwoPiece3b,
    TwoPiece3c,
    LongitudeFilling,
    KleinIbundleUnion,
    CoprimeSplice,
    NoFiniteFilling,
    ClassC,
    SlopePeripheralKill,
    SlopeRotMatch,
    KnownNegative,
    FreeProductQuotient,
    DivisibleCovers,
    SurgeryWindow,
    ExplicitOrdering,
}

impl Rule {
    pub const ALL: [Rule; 21] = [
        Rule::B1PositiveLo,
        Rule::SfsInfinite,
        Rule::FiniteCyclic,
        Rule::FiniteNoncyclic,
        Rule::TwoPiece1,
        Rule::TwoPiece2,
        Rule::TwoPiece3a,
        Rule::TwoPiece3b,
        Rule::TwoPiece3c,
        Rule::LongitudeFilling,
        Rule::KleinIbundleUnion,
        Rule::CoprimeSplice,
        Rule::NoFiniteFilling,
        Rule::ClassC,
        Rule::SlopePeripheralKill,
        Rule::SlopeRotMatch,
        Rule::KnownNegative,
        Rule::FreeProductQuotient,
        Rule::DivisibleCovers,
        Rule::SurgeryWindow,
        Rule::ExplicitOrdering,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::B1PositiveLo => "b1-positive-LO",
            Rule::SfsInfinite => "sfs-infinite",
            Rule::FiniteCyclic => "finite-cyclic",
            Rule::FiniteNoncyclic => "finite-noncyclic",
            Rule::TwoPiece1 => "two-piece(1)",
            Rule::TwoPiece2 => "two-piece(2)",
            Rule::TwoPiece3a => "two-piece(3a)",
            Rule::TwoPiece3b => "two-piece(3b)",
            Rule::TwoPiece3c => "two-piece(3c)",
            Rule::LongitudeFilling => "longitude-filling",
            Rule::KleinIbundleUnion => "klein-ibundle-union",
            Rule::CoprimeSplice => "coprime-splice",
            Rule::NoFiniteFilling => "no-finite-filling",
            Rule::ClassC => "class-C",
            Rule::SlopePeripheralKill => "slope-peripheral-kill",
            Rule::SlopeRotMatch => "slope-rot-match",
            Rule::KnownNegative => "known-negative",
            Rule::FreeProductQuotient => "free-product-quotient",
            Rule::DivisibleCovers => "divisible-covers",
            Rule::SurgeryWindow => "surgery-window",
            Rule::ExplicitOrdering => "explicit-ordering",
        }
    }

    /// The mathematical statement the rule applies.
    pub fn citation(&self) -> &'static str {
        match self {
            Rule::B1PositiveLo => "a compact irreducible 3-manifold with positive first Betti number has left-orderable, hence circularly orderable, fundamental group",
            Rule::SfsInfinite => "an infinite Seifert fibred fundamental group admits a circular ordering with rot(h) = 0",
            Rule::FiniteCyclic => "finite cyclic groups are circularly orderable",
            Rule::FiniteNoncyclic => "a finite circularly orderable group is cyclic",
            Rule::TwoPiece1 | Rule::TwoPiece2 | Rule::TwoPiece3a | Rule::TwoPiece3b | Rule::TwoPiece3c => {
                "a two-piece rational homology sphere graph manifold satisfying the base-orbifold and intersection-number conditions lies in class C, whose infinite members are circularly orderable"
            }
            Rule::LongitudeFilling => "if one piece has rational-rank-one homology and the other piece filled along the glued rational longitude has infinite circularly orderable fundamental group, the union is circularly orderable",
            Rule::KleinIbundleUnion => "the union of two twisted I-bundles over the Klein bottle has circularly orderable fundamental group (lexicographic orders made compatible across the amalgam)",
            Rule::CoprimeSplice => "gluing two Seifert knot exteriors in integer homology spheres with pairwise coprime cone orders gives a manifold whose commutator subgroup is left-orderable and whose homology is cyclic",
            Rule::NoFiniteFilling => "a graph manifold none of whose single-boundary pieces admit a finite filling has circularly orderable fundamental group whenever it is infinite",
            Rule::ClassC => "members of class C with infinite fundamental group are circularly orderable",
            Rule::SlopePeripheralKill => "if both fillings along identified slopes are infinite and one filling kills the peripheral subgroup, the union surjects onto an infinite circularly orderable group",
            Rule::SlopeRotMatch => "if both fillings along identified slopes are infinite and admit circular orderings with equal rotation numbers on the dual classes, the union is circularly orderable",
            Rule::KnownNegative => "recorded non-circularly-orderable manifold",
            Rule::FreeProductQuotient => "a group surjecting onto an infinite circularly orderable group (a free product of at least two nontrivial cyclic groups) is circularly orderable",
            Rule::DivisibleCovers => "for a prime knot, the m-fold branched cover group surjects onto the n-fold one when n divides m; an infinite circularly orderable quotient suffices",
            Rule::SurgeryWindow => "for a fibred hyperbolic knot in an irreducible integer homology sphere with fractional Dehn twist coefficient c, p/q surgery outside the window around p·c has circularly orderable fundamental group",
            Rule::ExplicitOrdering => "an explicit circular ordering was constructed and its axioms validated",
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// One machine-checked (or caller-asserted) hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
    /// True when the hypothesis was supplied by the caller rather than computed.
    pub asserted: bool,
}

impl Hypothesis {
    pub fn checked(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Hypothesis { name: name.into(), holds, detail: detail.into(), asserted: false }
    }

    pub fn asserted(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Hypothesis { name: name.into(), holds: true, detail: detail.into(), asserted: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub rule: Option<Rule>,
    pub citations: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub notes: Vec<String>,
    pub data: serde_json::Value,
}

impl Verdict {
    /// Checks that fail here belong to rules tried earlier; they move to
    /// `data.skippedChecks` so that `hypotheses` lists what the rule rests on.
    pub fn certified(rule: Rule, hypotheses: Vec<Hypothesis>, mut data: serde_json::Value) -> Self {
        debug_assert!(rule != Rule::FiniteNoncyclic && rule != Rule::KnownNegative);
        let (hypotheses, skipped): (Vec<_>, Vec<_>) = hypotheses.into_iter().partition(|h| h.holds);
        if !skipped.is_empty() {
            if !data.is_object() {
                data = serde_json::json!({ "value": data });
            }
            data["skippedChecks"] = serde_json::to_value(&skipped).expect("hypotheses serialize");
        }
        Verdict {
            verdict: VerdictKind::CO_CERTIFIED,
            rule: Some(rule),
            citations: vec![rule.citation().to_string()],
            hypotheses,
            notes: Vec::new(),
            data,
        }
    }

    pub fn not_co(rule: Rule, reason: impl Into<String>, hypotheses: Vec<Hypothesis>, data: serde_json::Value) -> Self {
        Verdict {
            verdict: VerdictKind::NOT_CO,
            rule: Some(rule),
            citations: vec![rule.citation().to_string()],
            hypotheses,
            notes: vec![reason.into()],
            data,
        }
    }

    pub fn unknown(notes: Vec<String>, hypotheses: Vec<Hypothesis>, data: serde_json::Value) -> Self {
        Verdict { verdict: VerdictKind::UNKNOWN, rule: None, citations: Vec::new(), hypotheses, notes, data }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == VerdictKind::CO_CERTIFIED
    }

    pub fn rule_name(&self) -> Option<&'static str> {
        self.rule.map(|r| r.name())
    }
}
