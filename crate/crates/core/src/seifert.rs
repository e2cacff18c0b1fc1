//! Seifert fibred spaces from their invariants: homology, finiteness of
//! π₁, rational longitudes, Dehn fillings, base orbifolds, and which
//! rotation numbers of the fibre are realised by circular orderings.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::euler::{smith_normal_form, AbelianInvariants, AbelianPresentation};
use crate::groups::{Cyclic, Lattice};
use crate::orders::{lex_circular_order, lex_left_order_lattice, rational_rotation_order_on_z, CircularOrderOracle, ExactSequence};
use crate::rational::{gcd, q, CirclePoint, Q};

/// Unnormalized Seifert invariants.
///
/// π₁ is generated by the base surface generators, γ_i, the boundary
/// curves x_k of a section and the fibre h, with γ_i^{α_i} h^{β_i} = 1 and
/// (product of surface words)·γ_1⋯γ_n·x_1⋯x_m = h^b. With boundary the
/// term b is absorbed into the section and ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeifertData {
    #[serde(rename = "orientable")]
    pub total_orientable: bool,
    #[serde(rename = "baseOrientable")]
    pub base_orientable: bool,
    pub genus: u32,
    #[serde(default)]
    pub boundaries: u32,
    #[serde(default)]
    pub pairs: Vec<(i64, i64)>,
    #[serde(default)]
    pub b: i64,
}

impl SeifertData {
    pub fn sphere(pairs: &[(i64, i64)], b: i64) -> Self {
        SeifertData { total_orientable: true, base_orientable: true, genus: 0, boundaries: 0, pairs: pairs.to_vec(), b }
    }

    pub fn disk(pairs: &[(i64, i64)]) -> Self {
        SeifertData { total_orientable: true, base_orientable: true, genus: 0, boundaries: 1, pairs: pairs.to_vec(), b: 0 }
    }

    /// Orientable total space over a Möbius band.
    pub fn mobius(pairs: &[(i64, i64)]) -> Self {
        SeifertData { total_orientable: true, base_orientable: false, genus: 1, boundaries: 1, pairs: pairs.to_vec(), b: 0 }
    }

    pub fn projective(pairs: &[(i64, i64)], b: i64) -> Self {
        SeifertData { total_orientable: true, base_orientable: false, genus: 1, boundaries: 0, pairs: pairs.to_vec(), b }
    }

    pub fn torus_bundle_trivial() -> Self {
        SeifertData { total_orientable: true, base_orientable: true, genus: 1, boundaries: 0, pairs: vec![], b: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, be) in &self.pairs {
            if a < 1 {
                return invalid(format!("fibre multiplicity {a} must be at least 1"));
            }
            if gcd(a, be) != 1 {
                return invalid(format!("pair ({a}, {be}) is not coprime"));
            }
        }
        if !self.base_orientable && self.genus == 0 {
            return invalid("a nonorientable base needs genus at least 1");
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.boundaries == 0
    }

    /// Cone orders α ≥ 2, sorted.
    pub fn cone_orders(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.pairs.iter().map(|p| p.0).filter(|&a| a >= 2).collect();
        v.sort();
        v
    }

    pub fn has_exceptional_fibre(&self) -> bool {
        !self.cone_orders().is_empty()
    }

    /// For closed data, fold (1, k) pairs into b; the manifold is unchanged.
    pub fn normalized(&self) -> SeifertData {
        let mut out = self.clone();
        if self.is_closed() {
            out.b += self.pairs.iter().filter(|p| p.0 == 1).map(|p| p.1).sum::<i64>();
            out.pairs.retain(|p| p.0 != 1);
        }
        out.pairs.sort();
        out
    }

    pub fn base_symbol(&self) -> String {
        let cones = self.cone_orders();
        let c = if cones.is_empty() {
            String::new()
        } else {
            format!("({})", cones.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        };
        let surface = match (self.base_orientable, self.genus, self.boundaries) {
            (true, 0, 0) => "S²".to_string(),
            (true, 0, 1) => "D²".to_string(),
            (true, 0, 2) => "A".to_string(),
            (true, 1, 0) => "T²".to_string(),
            (false, 1, 0) => "P²".to_string(),
            (false, 1, 1) => "Mö".to_string(),
            (false, 2, 0) => "K²".to_string(),
            (true, g, m) => format!("Σ[g={g},b={m}]"),
            (false, g, m) => format!("N[g={g},b={m}]"),
        };
        format!("{surface}{c}")
    }
}

impl fmt::Display for SeifertData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{} {}", self.base_symbol(), pairs.join(""))?;
        if self.is_closed() {
            write!(f, " b={}", self.b)?;
        }
        if !self.total_orientable {
            write!(f, " [nonorientable]")?;
        }
        Ok(())
    }
}

/// Abelianized presentation with the columns of the section curves x_k
/// and of the fibre h recorded.
#[derive(Debug, Clone)]
pub struct SeifertPresentation {
    pub relations: Vec<Vec<i64>>,
    pub gens: usize,
    pub sections: Vec<usize>,
    pub fibre: usize,
}

impl SeifertPresentation {
    pub fn unit(&self, col: usize) -> Vec<i64> {
        let mut v = vec![0; self.gens];
        v[col] = 1;
        v
    }

    /// The vector a·x_k + b·h.
    pub fn slope_vector(&self, boundary: usize, slope: &Slope) -> Vec<i64> {
        let mut v = vec![0; self.gens];
        v[self.sections[boundary]] += slope.a;
        v[self.fibre] += slope.b;
        v
    }
}

pub fn presentation(sd: &SeifertData) -> Result<SeifertPresentation> {
    sd.validate()?;
    if !sd.total_orientable {
        return Err(Error::Refused("nonorientable total spaces are outside the implemented presentations".into()));
    }
    let surf = if sd.base_orientable { 2 * sd.genus as usize } else { sd.genus as usize };
    let n = sd.pairs.len();
    let m = sd.boundaries as usize;
    let gens = surf + n + m + 1;
    let gamma = |i: usize| surf + i;
    let x = |k: usize| surf + n + k;
    let h = gens - 1;
    let mut rel = Vec::new();
    for (i, &(a, be)) in sd.pairs.iter().enumerate() {
        let mut r = vec![0; gens];
        r[gamma(i)] = a;
        r[h] = be;
        rel.push(r);
    }
    let mut prod = vec![0; gens];
    if !sd.base_orientable {
        for j in 0..surf {
            prod[j] = 2;
        }
        let mut r = vec![0; gens];
        r[h] = 2;
        rel.push(r);
    }
    for i in 0..n {
        prod[gamma(i)] = 1;
    }
    for k in 0..m {
        prod[x(k)] = 1;
    }
    if m == 0 {
        prod[h] = -sd.b;
    }
    rel.push(prod);
    Ok(SeifertPresentation { relations: rel, gens, sections: (0..m).map(x).collect(), fibre: h })
}

pub fn h1(sd: &SeifertData) -> Result<AbelianInvariants> {
    let p = presentation(sd)?;
    Ok(AbelianPresentation::new(&p.relations, p.gens)?.invariants().clone())
}

pub fn surface_euler_char(sd: &SeifertData) -> i64 {
    let g = sd.genus as i64;
    let m = sd.boundaries as i64;
    if sd.base_orientable {
        2 - 2 * g - m
    } else {
        2 - g - m
    }
}

/// χ of the base orbifold: χ(surface) − Σ(1 − 1/α_i).
pub fn orbifold_euler_char(sd: &SeifertData) -> Q {
    let mut chi = Q::from_integer(surface_euler_char(sd));
    for &(a, _) in &sd.pairs {
        chi -= Q::from_integer(1) - q(1, a);
    }
    chi
}

/// e = −(b + Σ β_i/α_i).
pub fn euler_number(sd: &SeifertData) -> Q {
    let mut s = Q::from_integer(sd.b);
    for &(a, be) in &sd.pairs {
        s += q(be, a);
    }
    -s
}

pub fn is_finite_pi1(sd: &SeifertData) -> Result<bool> {
    sd.validate()?;
    if !sd.is_closed() {
        return invalid("finiteness test needs closed Seifert data");
    }
    if !sd.total_orientable {
        return Err(Error::Refused("nonorientable total space: not classified here".into()));
    }
    Ok(orbifold_euler_char(sd) > Q::zero() && !euler_number(sd).is_zero())
}

/// Finite π₁ summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitePi1 {
    pub order: i64,
    pub cyclic: bool,
    pub description: String,
}

/// |π₁| and cyclicity for closed data with finite π₁.
///
/// Over S² with at most two cone points M is a lens space and
/// |π₁| = |H₁|. Otherwise the base orbifold is spherical with
/// χ = 2/N, and pulling back to the universal cover multiplies e by N,
/// giving |π₁| = N²|e| = 4|e|/χ².
pub fn finite_pi1(sd: &SeifertData) -> Result<Option<FinitePi1>> {
    if !is_finite_pi1(sd)? {
        return Ok(None);
    }
    let homology = h1(sd)?;
    let h_order = homology.order().ok_or_else(|| Error::Internal("finite π₁ with infinite H₁".into()))? as i64;
    let cones = sd.cone_orders();
    let lens = sd.base_orientable && cones.len() <= 2;
    if lens {
        return Ok(Some(FinitePi1 { order: h_order, cyclic: true, description: format!("lens space with π₁ ≅ Z/{h_order}") }));
    }
    let chi = orbifold_euler_char(sd);
    let n = Q::from_integer(4) * euler_number(sd).abs() / (chi * chi);
    if !n.is_integer() {
        return Err(Error::Internal(format!("|π₁| formula gave non-integer {n}")));
    }
    let order = n.to_integer();
    let cyclic = homology.is_cyclic() && h_order == order;
    let description = if cyclic {
        format!("lens space with π₁ ≅ Z/{order}")
    } else {
        name_spherical_group(sd, order)
    };
    Ok(Some(FinitePi1 { order, cyclic, description }))
}

fn name_spherical_group(sd: &SeifertData, order: i64) -> String {
    let cones = sd.cone_orders();
    if sd.base_orientable {
        match cones.as_slice() {
            [2, 2, 2] if order == 8 => return "quaternion group Q8 (order 8)".into(),
            [2, 2, n] if order == 4 * n => return format!("binary dihedral group of order {order}"),
            [2, 3, 3] if order == 24 => return "binary tetrahedral group (order 24)".into(),
            [2, 3, 4] if order == 48 => return "binary octahedral group (order 48)".into(),
            [2, 3, 5] if order == 120 => return "binary icosahedral group (order 120)".into(),
            _ => {}
        }
    }
    format!("noncyclic group of order {order} over {}", sd.base_symbol())
}

/// A slope a·s + b·h in the (section, fibre) basis of a boundary torus,
/// primitive and taken up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slope {
    pub a: i64,
    pub b: i64,
}

impl Slope {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 && b == 0 {
            return invalid("the zero vector is not a slope");
        }
        if gcd(a, b) != 1 {
            return invalid(format!("({a}, {b}) is not primitive"));
        }
        Ok(if a < 0 || (a == 0 && b < 0) { Slope { a: -a, b: -b } } else { Slope { a, b } })
    }

    pub fn fibre() -> Self {
        Slope { a: 0, b: 1 }
    }

    pub fn section() -> Self {
        Slope { a: 1, b: 0 }
    }

    /// Geometric intersection number |a₁b₂ − a₂b₁|.
    pub fn delta(&self, other: &Slope) -> i64 {
        (self.a * other.b - self.b * other.a).abs()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RationalLongitude {
    pub slope: Slope,
    pub image_order: i64,
}

/// Rank over ℚ of the span of the images of s and h.
pub fn boundary_image_rank(p: &AbelianPresentation, s: &[i64], h: &[i64]) -> Result<usize> {
    let fs = p.image(s)?.free;
    let fh = p.image(h)?.free;
    let m: Vec<Vec<i64>> = vec![to_i64(&fs)?, to_i64(&fh)?];
    if m[0].is_empty() {
        return Ok(0);
    }
    Ok(smith_normal_form(&m)?.rank)
}

fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect()
}

/// The primitive a·s + b·h whose image in H₁ has finite order.
pub fn rational_longitude_in(p: &AbelianPresentation, s: &[i64], h: &[i64]) -> Result<RationalLongitude> {
    let fs = to_i64(&p.image(s)?.free)?;
    let fh = to_i64(&p.image(h)?.free)?;
    if fs.is_empty() {
        return Err(Error::Internal("boundary torus in a manifold with b₁ = 0".into()));
    }
    let snf = smith_normal_form(&[fs, fh])?;
    if snf.rank != 1 {
        return Err(Error::Internal(format!("boundary image has rank {} instead of 1", snf.rank)));
    }
    let (a, b) = (snf.u[1][0] as i64, snf.u[1][1] as i64);
    let slope = Slope::new(a, b)?;
    let v: Vec<i64> = s.iter().zip(h).map(|(x, y)| slope.a * x + slope.b * y).collect();
    let image_order = p.order_of(&v)?.ok_or_else(|| Error::Internal("longitude image of infinite order".into()))? as i64;
    Ok(RationalLongitude { slope, image_order })
}

pub fn rational_longitude(sd: &SeifertData) -> Result<RationalLongitude> {
    if sd.boundaries != 1 {
        return invalid("rational longitude needs exactly one boundary torus");
    }
    let pres = presentation(sd)?;
    let ap = AbelianPresentation::new(&pres.relations, pres.gens)?;
    rational_longitude_in(&ap, &pres.unit(pres.sections[0]), &pres.unit(pres.fibre))
}

/// Result of Dehn filling one boundary torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Filling {
    /// Non-fibre slope: the fibration extends over the new solid torus.
    Seifert { data: SeifertData },
    /// Fibre slope on an orientable base: a connected sum of lens spaces
    /// and copies of S¹×S².
    ConnectedSum { summands: Vec<String>, nontrivial: usize, s1xs2: usize },
    /// Fibre slope on a nonorientable base. π₁ is the orbifold group of
    /// the base, a free product with a nontrivial free factor, so it is
    /// infinite; only homology is recorded.
    Degenerate { homology: AbelianInvariants },
}

impl Filling {
    /// Some(true) when π₁ is certainly infinite, Some(false) when it is
    /// certainly finite, None when undecided.
    pub fn pi1_infinite(&self) -> Result<Option<bool>> {
        match self {
            Filling::Seifert { data } => {
                if !data.is_closed() {
                    return Ok(Some(true));
                }
                Ok(Some(!is_finite_pi1(data)?))
            }
            Filling::ConnectedSum { nontrivial, s1xs2, .. } => Ok(Some(*s1xs2 > 0 || *nontrivial >= 2)),
            Filling::Degenerate { .. } => Ok(Some(true)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Filling::Seifert { data } => data.normalized().to_string(),
            Filling::ConnectedSum { summands, .. } if summands.is_empty() => "S³".into(),
            Filling::ConnectedSum { summands, .. } => summands.join(" # "),
            Filling::Degenerate { homology } => format!("fibre filling with H₁ = {}", homology.describe()),
        }
    }
}

/// H₁ after killing a·x_k + b·h.
pub fn filled_h1(sd: &SeifertData, boundary: usize, slope: &Slope) -> Result<AbelianInvariants> {
    let mut p = presentation(sd)?;
    if boundary >= p.sections.len() {
        return invalid(format!("no boundary torus {boundary}"));
    }
    let v = p.slope_vector(boundary, slope);
    p.relations.push(v);
    Ok(AbelianPresentation::new(&p.relations, p.gens)?.invariants().clone())
}

pub fn dehn_fill(sd: &SeifertData, boundary: usize, slope: &Slope) -> Result<Filling> {
    sd.validate()?;
    if boundary >= sd.boundaries as usize {
        return invalid(format!("no boundary torus {boundary}"));
    }
    if slope.a != 0 {
        // the boundary curve becomes the new exceptional fibre's γ
        let mut out = sd.clone();
        out.boundaries -= 1;
        out.pairs.push((slope.a, slope.b));
        if out.is_closed() {
            out.b = 0;
            out = out.normalized();
        }
        return Ok(Filling::Seifert { data: out });
    }
    if sd.boundaries != 1 {
        return Err(Error::Unsupported("fibre filling of a piece with several boundary tori".into()));
    }
    if !sd.total_orientable {
        return Err(Error::Refused("nonorientable total spaces are outside the implemented presentations".into()));
    }
    if !sd.base_orientable {
        return Ok(Filling::Degenerate { homology: filled_h1(sd, boundary, slope)? });
    }
    let mut summands: Vec<String> = sd
        .pairs
        .iter()
        .filter(|p| p.0 >= 2)
        .map(|&(a, be)| format!("L({a},{})", be.rem_euclid(a)))
        .collect();
    let nontrivial = summands.len();
    let s1xs2 = 2 * sd.genus as usize;
    summands.extend((0..s1xs2).map(|_| "S¹×S²".to_string()));
    Ok(Filling::ConnectedSum { summands, nontrivial, s1xs2 })
}

/// Base orbifold class and membership in the finite-filling families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbifoldClass {
    pub symbol: String,
    pub cones: Vec<i64>,
    /// Disk bases admitting a filling with finite π₁.
    pub in_a: bool,
    /// 𝔻²(2,2) and 𝔻²(2,3).
    pub in_f: bool,
    pub note: Option<String>,
}

pub fn base_orbifold_class(sd: &SeifertData) -> OrbifoldClass {
    let cones = sd.cone_orders();
    let symbol = sd.base_symbol();
    let disk = sd.base_orientable && sd.genus == 0 && sd.boundaries == 1;
    if !disk {
        return OrbifoldClass { symbol, cones, in_a: false, in_f: false, note: Some("base is not a disk".into()) };
    }
    let in_a = match cones.as_slice() {
        [_, _] => true,
        [2, 2, _] => true,
        [2, 3, 3] | [2, 3, 4] | [2, 3, 5] => true,
        _ => false,
    };
    let in_f = matches!(cones.as_slice(), [2, 2] | [2, 3]);
    OrbifoldClass { symbol, cones, in_a, in_f, note: None }
}

/// Whether some Dehn filling of a single-boundary piece has finite π₁.
///
/// Non-fibre fillings add one cone point of order Δ(α, h) ≥ 1 to the
/// capped base; fibre fillings have π₁ equal to the orbifold group of
/// the bounded base. Disk bases reduce to the finite-filling list; a
/// Möbius band base with at most one cone point caps off to a projective
/// plane with at most two, which has finite fillings. Other bases have
/// none.
pub fn admits_finite_filling(sd: &SeifertData) -> Result<bool> {
    sd.validate()?;
    if sd.boundaries != 1 {
        return invalid("finite-filling test needs exactly one boundary torus");
    }
    let cones = sd.cone_orders().len();
    Ok(match (sd.base_orientable, sd.genus) {
        (true, 0) => cones <= 1 || base_orbifold_class(sd).in_a,
        (false, 1) => cones <= 1,
        _ => false,
    })
}

/// Known achievable values of rot(h) over circular orderings of π₁.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibreRotationReport {
    /// 0 is always achievable when π₁ is infinite.
    pub zero: bool,
    /// 1/p achievable for every p ≥ 1.
    pub one_over_p: bool,
    /// Every rational (and, though not materialized, every real) value.
    pub all_values: bool,
    /// Every circular ordering has rot(h) in this set, when constrained.
    pub constraint: Option<Vec<CirclePoint>>,
    pub left_orderable: Option<bool>,
    pub rules: Vec<String>,
    pub notes: Vec<String>,
}

impl FibreRotationReport {
    /// Whether r is known to be achievable.
    pub fn achieves(&self, r: &CirclePoint) -> bool {
        if let Some(c) = &self.constraint {
            if !c.contains(r) {
                return false;
            }
        }
        r.value().is_zero() || self.all_values || (self.one_over_p && r.value().numer().abs() == 1)
    }
}

/// Which values rot(h) takes over circular orderings of π₁(M), for
/// infinite π₁. `lo_hint` lets the caller assert left-orderability when
/// it is known by other means; otherwise b₁ > 0 is used.
pub fn fibre_rotation_classification(sd: &SeifertData, lo_hint: Option<bool>) -> Result<FibreRotationReport> {
    sd.validate()?;
    if sd.is_closed() && sd.total_orientable {
        if let Some(f) = finite_pi1(sd)? {
            return Err(Error::Refused(format!(
                "finite fundamental group ({}): circularly orderable only if cyclic, which it {}",
                f.description,
                if f.cyclic { "is" } else { "is not" }
            )));
        }
    }
    let mut rep = FibreRotationReport {
        zero: true,
        one_over_p: false,
        all_values: false,
        constraint: None,
        left_orderable: None,
        rules: vec!["infinite Seifert fibred group: some ordering has rot(h) = 0".into()],
        notes: Vec::new(),
    };
    let b1 = if sd.total_orientable { Some(h1(sd)?.rank) } else { None };
    rep.left_orderable = match (lo_hint, b1) {
        (Some(x), _) => Some(x),
        (None, Some(r)) if r > 0 => Some(true),
        _ => None,
    };
    let exceptional = sd.has_exceptional_fibre();
    let half = [CirclePoint::zero(), CirclePoint::new(q(1, 2))];
    if !sd.total_orientable || (!sd.base_orientable && exceptional) {
        rep.constraint = Some(half.to_vec());
        rep.rules.push("fibre conjugate to its inverse: rot(h) ∈ {0, 1/2}".into());
    } else if !sd.base_orientable {
        // a_j h a_j⁻¹ = h⁻¹ also holds without exceptional fibres
        rep.constraint = Some(half.to_vec());
        rep.rules.push("fibre conjugate to its inverse: rot(h) ∈ {0, 1/2}".into());
        rep.notes.push("no exceptional fibres, but the nonorientable base still reverses h".into());
    } else if !exceptional {
        rep.all_values = true;
        rep.rules.push("no exceptional fibres: every rot(h) is realised".into());
        rep.notes.push("irrational values exist but are not materialized".into());
    } else if rep.left_orderable == Some(true) {
        rep.one_over_p = true;
        rep.rules.push("left-orderable with orientable base: rot(h) = 1/p for every p".into());
    } else {
        rep.notes.push("left-orderability not established, 1/p family not claimed".into());
    }
    Ok(rep)
}

/// A circular ordering of ℤ³ with rot((0,0,1)) = r: lexicographic from
/// the kernel ℤ² (first two coordinates) and an ordering of ℤ with
/// rot(1) = r on the last coordinate.
pub fn materialize_t3_order(r: CirclePoint) -> Result<CircularOrderOracle<Lattice<3>>> {
    let quotient = rational_rotation_order_on_z(r)?;
    let seq = ExactSequence::<Lattice<3>, Lattice<2>, Cyclic>::new(
        |g: &[i64; 3]| Ok(g[2]),
        |g: &[i64; 3]| Ok(if g[2] == 0 { Some([g[0], g[1]]) } else { None }),
    );
    Ok(lex_circular_order(Arc::new(Lattice::<3>), seq, lex_left_order_lattice::<2>(), quotient)
        .renamed(format!("order on Z^3 with fibre rotation {r}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{rot, RotConfig};

    fn poincare() -> SeifertData {
        SeifertData::sphere(&[(2, 1), (3, 1), (5, 1)], -1)
    }

    #[test]
    fn homology_examples() {
        assert!(h1(&poincare()).unwrap().is_trivial());
        let t = h1(&SeifertData::disk(&[(2, 1), (3, 1)])).unwrap();
        assert_eq!((t.rank, t.torsion.len()), (1, 0));
        assert_eq!(h1(&SeifertData::sphere(&[], 0)).unwrap().rank, 1);
        assert_eq!(h1(&SeifertData::torus_bundle_trivial()).unwrap().rank, 3);
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(orbifold_euler_char(&poincare()), q(1, 30));
        assert_eq!(orbifold_euler_char(&SeifertData::sphere(&[(2, 1), (3, 1), (7, 1)], -1)), q(-1, 42));
        assert_eq!(orbifold_euler_char(&SeifertData::torus_bundle_trivial()), q(0, 1));
        assert_eq!(euler_number(&poincare()), q(-1, 30));
    }

    #[test]
    fn finiteness_examples() {
        assert!(is_finite_pi1(&poincare()).unwrap());
        assert!(!is_finite_pi1(&SeifertData::sphere(&[(2, 1), (3, 1), (7, 1)], -1)).unwrap());
        assert!(!is_finite_pi1(&SeifertData::sphere(&[(2, 1), (3, 1), (6, -5)], 0)).unwrap());
        let f = finite_pi1(&poincare()).unwrap().unwrap();
        assert_eq!((f.order, f.cyclic), (120, false));
        assert!(f.description.contains("icosahedral"));
        let lens = finite_pi1(&SeifertData::sphere(&[(2, 1), (3, 1)], 0)).unwrap().unwrap();
        assert_eq!((lens.order, lens.cyclic), (5, true));
        let q8 = finite_pi1(&SeifertData::sphere(&[(2, 1), (2, 1), (2, 1)], -1)).unwrap().unwrap();
        assert_eq!((q8.order, q8.cyclic), (8, false));
        let i120 = finite_pi1(&SeifertData::sphere(&[(2, -1), (3, 1), (5, 1)], 0)).unwrap().unwrap();
        assert_eq!(i120.order, 120);
        assert!(i120.description.contains("icosahedral"));
    }

    #[test]
    fn rational_longitude_examples() {
        let st = rational_longitude(&SeifertData::disk(&[])).unwrap();
        assert_eq!((st.slope, st.image_order), (Slope::section(), 1));
        let tr = rational_longitude(&SeifertData::disk(&[(2, 1), (3, 1)])).unwrap();
        assert_eq!(tr.image_order, 1);
        assert_eq!(tr.slope.delta(&Slope::fibre()), 6);
        let d22 = rational_longitude(&SeifertData::disk(&[(2, 1), (2, 1)])).unwrap();
        assert_eq!(d22.image_order, 2);
        let mob = rational_longitude(&SeifertData::mobius(&[])).unwrap();
        assert_eq!((mob.slope, mob.image_order), (Slope::fibre(), 2));
    }

    #[test]
    fn fillings() {
        let trefoil = SeifertData::disk(&[(2, 1), (3, 1)]);
        let lam = rational_longitude(&trefoil).unwrap().slope;
        let Filling::Seifert { data } = dehn_fill(&trefoil, 0, &lam).unwrap() else { panic!() };
        assert_eq!(euler_number(&data), q(0, 1));
        assert_eq!(h1(&data).unwrap().rank, 1);
        // solid torus: the meridian gives S¹×S², (1,1) gives S³
        let st = SeifertData::disk(&[]);
        assert_eq!(filled_h1(&st, 0, &Slope::section()).unwrap().rank, 1);
        let Filling::Seifert { data } = dehn_fill(&st, 0, &Slope::new(1, 1).unwrap()).unwrap() else { panic!() };
        assert!(h1(&data).unwrap().is_trivial());
        assert_eq!(dehn_fill(&st, 0, &Slope::fibre()).unwrap().describe(), "S³");
        let fib = dehn_fill(&trefoil, 0, &Slope::fibre()).unwrap();
        assert_eq!(fib.pi1_infinite().unwrap(), Some(true));
    }

    #[test]
    fn orbifold_classes() {
        let c = base_orbifold_class(&SeifertData::disk(&[(2, 1), (3, 1)]));
        assert!(c.in_a && c.in_f);
        let c = base_orbifold_class(&SeifertData::disk(&[(2, 1), (2, 1), (7, 1)]));
        assert!(c.in_a && !c.in_f);
        let c = base_orbifold_class(&SeifertData::disk(&[(3, 1), (4, 1)]));
        assert!(c.in_a && !c.in_f);
        let c = base_orbifold_class(&SeifertData::disk(&[(3, 1), (4, 1), (5, 1)]));
        assert!(!c.in_a && !c.in_f);
        let c = base_orbifold_class(&SeifertData::mobius(&[]));
        assert!(!c.in_a && c.note.is_some());
    }

    #[test]
    fn finite_fillings() {
        assert!(admits_finite_filling(&SeifertData::disk(&[(2, 1), (3, 1)])).unwrap());
        assert!(!admits_finite_filling(&SeifertData::disk(&[(2, 1), (3, 1), (7, 1)])).unwrap());
        assert!(admits_finite_filling(&SeifertData::mobius(&[])).unwrap());
        assert!(!admits_finite_filling(&SeifertData::mobius(&[(2, 1), (3, 1)])).unwrap());
        // S²(2,3,5) is a filling of the trefoil-like piece, consistent with 𝒜
        let Filling::Seifert { data } = dehn_fill(&SeifertData::disk(&[(2, 1), (3, 1)]), 0, &Slope::new(5, 1).unwrap()).unwrap() else { panic!() };
        assert!(is_finite_pi1(&data).unwrap());
    }

    #[test]
    fn serde_names() {
        let sd: SeifertData = serde_json::from_str(r#"{"orientable":true,"baseOrientable":true,"genus":0,"boundaries":0,"pairs":[[2,1],[3,1],[5,1]],"b":-1}"#).unwrap();
        assert_eq!(sd, poincare());
        assert!(serde_json::from_str::<SeifertData>(r#"{"orientable":true,"baseOrientable":true,"genus":0,"extra":1}"#).is_err());
    }

    #[test]
    fn fibre_rotation_examples() {
        let t3 = fibre_rotation_classification(&SeifertData::torus_bundle_trivial(), None).unwrap();
        assert!(t3.all_values && t3.achieves(&CirclePoint::new(q(2, 7))));
        let nonor = SeifertData::projective(&[(3, 1), (3, 1)], 0);
        let r = fibre_rotation_classification(&nonor, None).unwrap();
        assert_eq!(r.constraint.as_ref().unwrap().len(), 2);
        let trefoil = SeifertData::disk(&[(2, 1), (3, 1)]);
        let r = fibre_rotation_classification(&trefoil, None).unwrap();
        assert!(r.one_over_p && r.achieves(&CirclePoint::new(q(1, 5))));
        assert!(matches!(fibre_rotation_classification(&poincare(), None), Err(Error::Refused(_))));
    }

    #[test]
    fn t3_orders_have_the_requested_rotation() {
        for r in [q(0, 1), q(1, 3), q(2, 5)] {
            let c = materialize_t3_order(CirclePoint::new(r)).unwrap();
            let v = rot(&[0, 0, 1], &c, &RotConfig::default()).unwrap();
            assert_eq!(v.exact(), Some(CirclePoint::new(r)));
        }
    }
}
