//! The central extension G̃_c of a circularly ordered group, its left
//! order, quotients by cofinal central elements, and exact rotation
//! numbers.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{element_order, Group};
use crate::orders::{lex_circular_order, sort_sign, CircularOrderOracle, ExactSequence, LeftOrderOracle};
use crate::rational::{format_q, q, CirclePoint, Q};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;
pub const STEP_BUDGET_ENV: &str = "CORDA_STEP_BUDGET";

/// Step budget for cofinality searches, overridable from the environment.
pub fn default_step_budget() -> u64 {
    std::env::var(STEP_BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_STEP_BUDGET)
}

/// G̃_c = ℤ × G with (a, g)(b, h) = (a + b + f(g, h), gh).
pub struct CentralExtension<G: Group> {
    base: Arc<G>,
    order: CircularOrderOracle<G>,
}

impl<G: Group> fmt::Debug for CentralExtension<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CentralExtension({})", self.order.name())
    }
}

impl<G: Group> CentralExtension<G> {
    pub fn new(order: CircularOrderOracle<G>) -> Self {
        CentralExtension { base: order.group().clone(), order }
    }

    pub fn base(&self) -> &Arc<G> {
        &self.base
    }

    pub fn order(&self) -> &CircularOrderOracle<G> {
        &self.order
    }

    /// The cocycle f_c(g, h) ∈ {0, 1}.
    pub fn cocycle(&self, g: &G::Elem, h: &G::Elem) -> Result<i64> {
        let e = self.base.identity();
        if *g == e || *h == e {
            return Ok(0);
        }
        let gh = self.base.mul(g, h)?;
        if gh == e {
            return Ok(1);
        }
        let v = self.order.eval(&e, g, &gh)?;
        match v {
            1 => Ok(0),
            -1 => Ok(1),
            _ => Err(Error::Internal(format!("order {} vanished on a distinct triple", self.order.name()))),
        }
    }

    /// The central generator z = (1, id).
    pub fn z(&self) -> (i64, G::Elem) {
        (1, self.base.identity())
    }

    pub fn lift(&self, g: &G::Elem) -> (i64, G::Elem) {
        (0, g.clone())
    }

    /// Left order with positive cone {(a, g) : a ≥ 0} minus the identity.
    pub fn left_order(self: &Arc<Self>) -> LeftOrderOracle<Self> {
        let id = self.base.identity();
        LeftOrderOracle::new(self.clone(), format!("extension order of {}", self.order.name()), move |x: &(i64, G::Elem)| {
            Ok(if x.0 < 0 {
                -1
            } else if x.0 == 0 && x.1 == id {
                0
            } else {
                1
            })
        })
    }
}

impl<G: Group> Group for CentralExtension<G> {
    type Elem = (i64, G::Elem);

    fn identity(&self) -> Self::Elem {
        (0, self.base.identity())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let f = self.cocycle(&a.1, &b.1)?;
        let level = a.0.checked_add(b.0).and_then(|x| x.checked_add(f)).ok_or(Error::Overflow)?;
        Ok((level, self.base.mul(&a.1, &b.1)?))
    }

    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        let gi = self.base.inv(&a.1)?;
        let f = self.cocycle(&gi, &a.1)?;
        let level = a.0.checked_neg().and_then(|x| x.checked_sub(f)).ok_or(Error::Overflow)?;
        Ok((level, gi))
    }

    fn contains(&self, a: &Self::Elem) -> bool {
        self.base.contains(&a.1)
    }
}

/// The integer a with z^a ≤ g < z^{a+1}, found by exponential search and
/// bisection. Fails when no such a shows up within the step budget, which
/// is how a non-cofinal z manifests.
pub fn floor_by_z<G: Group>(lo: &LeftOrderOracle<G>, z: &G::Elem, g: &G::Elem, budget: u64) -> Result<i64> {
    let group = lo.group();
    let mut steps = 0u64;
    let mut le = |a: i64| -> Result<bool> {
        steps += 1;
        if steps > budget {
            return Err(Error::CofinalityNotWitnessed(budget));
        }
        let za = group.pow(z, a)?;
        Ok(lo.compare(&za, g)? != std::cmp::Ordering::Greater)
    };
    let exhausted = || Error::CofinalityNotWitnessed(budget);
    // invariant: le(low) holds, le(high) fails
    let (mut low, mut high) = if le(0)? {
        let mut low = 0i64;
        let mut step = 1i64;
        loop {
            if !le(step)? {
                break (low, step);
            }
            low = step;
            step = step.checked_mul(2).ok_or_else(exhausted)?;
        }
    } else {
        let mut high = 0i64;
        let mut step = -1i64;
        loop {
            if le(step)? {
                break (step, high);
            }
            high = step;
            step = step.checked_mul(2).ok_or_else(exhausted)?;
        }
    };
    while high - low > 1 {
        let mid = low + (high - low) / 2;
        if le(mid)? {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(low)
}

/// G/⟨z⟩ for a positive cofinal central z, with elements represented by
/// their minimal representatives id ≤ g < z.
pub struct ZQuotient<G: Group> {
    base: Arc<G>,
    order: LeftOrderOracle<G>,
    z: G::Elem,
    budget: u64,
}

impl<G: Group> fmt::Debug for ZQuotient<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZQuotient({} by {:?})", self.order.name(), self.z)
    }
}

impl<G: Group> ZQuotient<G> {
    pub fn new(order: LeftOrderOracle<G>, z: G::Elem) -> Result<Self> {
        Self::with_budget(order, z, default_step_budget())
    }

    pub fn with_budget(order: LeftOrderOracle<G>, z: G::Elem, budget: u64) -> Result<Self> {
        if order.sign(&z)? != 1 {
            return Err(Error::InvalidInput("the central element must be positive".into()));
        }
        Ok(ZQuotient { base: order.group().clone(), order, z, budget })
    }

    pub fn z(&self) -> &G::Elem {
        &self.z
    }

    pub fn base(&self) -> &Arc<G> {
        &self.base
    }

    pub fn order(&self) -> &LeftOrderOracle<G> {
        &self.order
    }

    pub fn floor(&self, g: &G::Elem) -> Result<i64> {
        floor_by_z(&self.order, &self.z, g, self.budget)
    }

    /// Minimal representative of the coset g⟨z⟩.
    pub fn reduce(&self, g: &G::Elem) -> Result<G::Elem> {
        let a = self.floor(g)?;
        self.base.mul(g, &self.base.pow(&self.z, -a)?)
    }
}

impl<G: Group> Group for ZQuotient<G> {
    type Elem = G::Elem;

    fn identity(&self) -> G::Elem {
        self.base.identity()
    }

    fn mul(&self, a: &G::Elem, b: &G::Elem) -> Result<G::Elem> {
        self.reduce(&self.base.mul(a, b)?)
    }

    fn inv(&self, a: &G::Elem) -> Result<G::Elem> {
        self.reduce(&self.base.inv(a)?)
    }

    fn contains(&self, a: &G::Elem) -> bool {
        self.base.contains(a) && matches!(self.floor(a), Ok(0))
    }
}

/// The circular ordering of G/⟨z⟩ obtained by comparing minimal
/// representatives in the left order.
pub fn quotient_circular_order<G: Group>(order: LeftOrderOracle<G>, z: G::Elem) -> Result<CircularOrderOracle<ZQuotient<G>>> {
    let quotient = Arc::new(ZQuotient::new(order.clone(), z)?);
    let name = format!("quotient of {} by a cofinal central element", order.name());
    Ok(CircularOrderOracle::new(quotient, name, move |a, b, c| {
        if a == b || b == c || a == c {
            return Ok(0);
        }
        sort_sign(a, b, c, |x, y| order.compare(x, y))
    }))
}

/// A circular ordering of G in which z has rotation number 1/p: the
/// lexicographic ordering from the kernel ⟨z^p⟩ (ordered by restriction)
/// and the quotient ordering of G/⟨z^p⟩.
pub fn rot_one_over_p<G: Group>(order: LeftOrderOracle<G>, z: G::Elem, p: i64) -> Result<CircularOrderOracle<G>> {
    if p < 1 {
        return Err(Error::InvalidInput("p must be at least 1".into()));
    }
    let group = order.group().clone();
    let zp = group.pow(&z, p)?;
    let d = quotient_circular_order(order.clone(), zp)?;
    let quotient = d.group().clone();
    let q2 = quotient.clone();
    let seq = ExactSequence::<G, G, ZQuotient<G>>::new(
        move |g| quotient.reduce(g),
        move |g| Ok(if q2.reduce(g)? == q2.identity() { Some(g.clone()) } else { None }),
    );
    let by_z = Arc::new(ZQuotient::new(order.clone(), z)?);
    let name = format!("order with rot(z) = 1/{p} built from {}", order.name());
    Ok(lex_circular_order(group, seq, order, d)
        .renamed(name)
        .with_rotation_tag(move |g| {
            // exact only on powers of z
            if by_z.reduce(g)? != by_z.identity() {
                return Ok(None);
            }
            Ok(Some(CirclePoint::new(q(by_z.floor(g)?, p))))
        }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotConfig {
    /// Power used for the interval bracket; the interval has width 1/n_max.
    pub n_max: u64,
    /// Largest order searched for when looking for g^q = id.
    pub periodicity_bound: u64,
    /// When nonzero, accept the unique fraction with at most this
    /// denominator in the bracket once g̃^q z^{-p} is seen to stay in
    /// [z^{-1}, z) for `witness_depth` powers. The result then assumes the
    /// rotation number has denominator at most this bound.
    pub denominator_bound: u64,
    pub witness_depth: u64,
    pub step_budget: u64,
}

impl Default for RotConfig {
    fn default() -> Self {
        RotConfig { n_max: 256, periodicity_bound: 1024, denominator_bound: 0, witness_depth: 64, step_budget: default_step_budget() }
    }
}

/// Why an exact rotation number is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotCertificate {
    Identity,
    /// g^q = id in G and g̃^q = z^level.
    Periodic { period: u64, level: i64 },
    /// Value supplied by the construction and checked against the bracket.
    Construction { order: String },
    /// Unique fraction of bounded denominator with a bounded power check.
    BoundedWitness { numerator: i64, denominator: i64, depth: u64, assumes_denominator_at_most: u64 },
}

/// The real interval [a/n, (a+1)/n] containing a lift of rot, reported mod 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotInterval {
    pub a: i64,
    pub n: u64,
}

impl RotInterval {
    pub fn lower(&self) -> Q {
        q(self.a, self.n as i64)
    }

    pub fn upper(&self) -> Q {
        q(self.a + 1, self.n as i64)
    }

    pub fn width(&self) -> Q {
        q(1, self.n as i64)
    }

    /// Whether the circle point has a lift in the closed bracket.
    pub fn contains(&self, p: &CirclePoint) -> bool {
        let lo = self.lower();
        let shift = (lo - p.value()).ceil();
        let x = p.value() + shift;
        x <= self.upper()
    }
}

impl fmt::Display for RotInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = CirclePoint::new(self.lower());
        let hi = lo.value() + self.width();
        write!(f, "[{}, {}] mod 1", lo, format_q(&hi))
    }
}

impl Serialize for RotInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let lo = CirclePoint::new(self.lower());
        let mut st = s.serialize_struct("RotInterval", 3)?;
        st.serialize_field("lower", &lo.to_string())?;
        st.serialize_field("upper", &format_q(&(lo.value() + self.width())))?;
        st.serialize_field("width", &format_q(&self.width()))?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RotationValue {
    Exact { value: CirclePoint, certificate: RotCertificate, interval: RotInterval },
    Interval { interval: RotInterval },
}

impl RotationValue {
    pub fn exact(&self) -> Option<CirclePoint> {
        match self {
            RotationValue::Exact { value, .. } => Some(*value),
            RotationValue::Interval { .. } => None,
        }
    }

    pub fn interval(&self) -> RotInterval {
        match self {
            RotationValue::Exact { interval, .. } | RotationValue::Interval { interval } => *interval,
        }
    }
}

/// Bracket for rot computed from the lift (level, g).
pub fn rot_interval_with_lift<G: Group>(g: &G::Elem, level: i64, c: &CircularOrderOracle<G>, n: u64, budget: u64) -> Result<RotInterval> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let ext = Arc::new(CentralExtension::new(c.clone()));
    let lo = ext.left_order();
    let gn = ext.pow(&(level, g.clone()), n as i64)?;
    let a = floor_by_z(&lo, &ext.z(), &gn, budget)?;
    Ok(RotInterval { a, n })
}

/// Rotation number of g with respect to c.
///
/// Always returns a bracket of width 1/n_max; upgrades to an exact value
/// when g has finite order, when the construction tags a value that lies
/// in the bracket, or (if enabled) through a bounded-denominator witness.
pub fn rot<G: Group>(g: &G::Elem, c: &CircularOrderOracle<G>, cfg: &RotConfig) -> Result<RotationValue> {
    let base = c.group().clone();
    if !base.contains(g) {
        return Err(Error::ForeignElement);
    }
    let interval = rot_interval_with_lift(g, 0, c, cfg.n_max, cfg.step_budget)?;
    if base.is_identity(g) {
        return Ok(RotationValue::Exact { value: CirclePoint::zero(), certificate: RotCertificate::Identity, interval });
    }
    let ext = Arc::new(CentralExtension::new(c.clone()));
    if let Some(period) = element_order(base.as_ref(), g, cfg.periodicity_bound)? {
        let (level, top) = ext.pow(&ext.lift(g), period as i64)?;
        debug_assert!(base.is_identity(&top));
        let value = CirclePoint::new(q(level, period as i64));
        if !interval.contains(&value) {
            return Err(Error::Internal(format!("periodic value {value} outside {interval}")));
        }
        return Ok(RotationValue::Exact { value, certificate: RotCertificate::Periodic { period, level }, interval });
    }
    if let Some(value) = c.tagged_rotation(g)? {
        if !interval.contains(&value) {
            return Err(Error::InconsistentRotation { tag: value.to_string(), interval: interval.to_string() });
        }
        return Ok(RotationValue::Exact {
            value,
            certificate: RotCertificate::Construction { order: c.name().to_string() },
            interval,
        });
    }
    if cfg.denominator_bound > 0 {
        if let Some((p, qd)) = unique_fraction(&interval, cfg.denominator_bound) {
            let lo = ext.left_order();
            let z = ext.z();
            let w = ext.mul(&ext.pow(&ext.lift(g), qd)?, &ext.pow(&z, -p)?)?;
            let mut wm = w.clone();
            let mut ok = true;
            for _ in 0..cfg.witness_depth {
                let a = floor_by_z(&lo, &z, &wm, cfg.step_budget)?;
                if !(a == -1 || a == 0) {
                    ok = false;
                    break;
                }
                wm = ext.mul(&wm, &w)?;
            }
            if ok {
                return Ok(RotationValue::Exact {
                    value: CirclePoint::new(q(p, qd)),
                    certificate: RotCertificate::BoundedWitness {
                        numerator: p,
                        denominator: qd,
                        depth: cfg.witness_depth,
                        assumes_denominator_at_most: cfg.denominator_bound,
                    },
                    interval,
                });
            }
        }
    }
    Ok(RotationValue::Interval { interval })
}

/// The only reduced fraction p/q with q ≤ bound in the closed bracket.
fn unique_fraction(i: &RotInterval, bound: u64) -> Option<(i64, i64)> {
    let mut found: Option<Q> = None;
    for d in 1..=bound as i64 {
        let lo = (i.lower() * Q::from_integer(d)).ceil().to_integer();
        let hi = (i.upper() * Q::from_integer(d)).floor().to_integer();
        for p in lo..=hi {
            let f = q(p, d);
            match found {
                None => found = Some(f),
                Some(g) if g == f => {}
                Some(_) => return None,
            }
        }
    }
    found.map(|f| (*f.numer(), *f.denom()))
}
