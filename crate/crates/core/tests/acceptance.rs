//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances and time limits are pinned
//! in the constants below.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use circord::apps::{known_negative_lookup, known_negative_verdict, torus_knot_cover_verdict, two_bridge_double_cover_verdict};
use circord::bruteforce::{arrangement_order, enumerate_circular_orders, is_circularly_orderable_bruteforce, DEFAULT_BOUND};
use circord::euler::{euler_class_order, eta_solve, lo_normal_subgroup, smith_normal_form, AbelianPresentation, CocycleTable};
use circord::extensions::{quotient_circular_order, rot, rot_one_over_p, CentralExtension, RotConfig, RotationValue};
use circord::graph::{class_c_verdict, gluing_from_meridian_longitude, inverse, apply, two_piece_verdict, ClassCHints, Edge, JsjTree, Matrix2};
use circord::groups::{catalog, Cyclic, FiniteGroup, FreeProduct, Group};
use circord::orders::{
    cyclic_rot_order, default_factor_orders, extend_cyclic_order, lex_left_order_lattice, planar_free_product_order,
    rational_rotation_order_on_z, secret_left_order, standard_circle_order, standard_left_order_z, validate_axioms,
    CircularOrderOracle,
};
use circord::error::Error;
use circord::rational::{ext_gcd, gcd, q, CirclePoint};
use circord::seifert::{self, fibre_rotation_classification, materialize_t3_order, SeifertData, Slope};
use circord::verdict::{Rule, VerdictKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIMIT_FINITE_LAW: Duration = Duration::from_secs(60);
const LIMIT_COUNTING: Duration = Duration::from_secs(60);
const LIMIT_EULER: Duration = Duration::from_secs(30);
const LIMIT_ROT: Duration = Duration::from_secs(30);
const LIMIT_COVERS: Duration = Duration::from_secs(10);
const LIMIT_HOMOLOGY: Duration = Duration::from_secs(60);
const LIMIT_GRAPH: Duration = Duration::from_secs(10);

/// Interval mode must bracket rot within this width at n_max = ROT_N_MAX.
const ROT_N_MAX: u64 = 1000;
const ROT_MAX_WIDTH: (i64, i64) = (1, 1000);
/// Window [−W, W] of ℤ used for the lexicographic round trip.
const LEX_WINDOW: i64 = 20;
const RANK_SAMPLES: usize = 30;
const GLUING_SAMPLES: usize = 50;
const SEED: u64 = 0x5eed_c0de;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

/// Euler's totient by trial factorization.
fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

fn catalog_groups() -> Vec<FiniteGroup> {
    let mut gs: Vec<FiniteGroup> = (2..=8).map(|n| catalog::cyclic(n).unwrap()).collect();
    gs.extend([catalog::klein4(), catalog::z2xz4(), catalog::s3(), catalog::d4(), catalog::q8()].into_iter().map(Result::unwrap));
    gs
}

fn finite_group_law() -> Check {
    let gs = catalog_groups();
    for g in &gs {
        let r = is_circularly_orderable_bruteforce(g, DEFAULT_BOUND).map_err(e)?;
        ensure!(r.orderable == g.is_cyclic(), "{}: brute force says {}, cyclic = {}", g.name(), r.orderable, g.is_cyclic());
    }
    Ok(format!("{} groups agree", gs.len()))
}

fn order_counting() -> Check {
    for n in 3..=8usize {
        let ws = enumerate_circular_orders(&catalog::cyclic(n).unwrap(), DEFAULT_BOUND).map_err(e)?;
        ensure!(ws.len() as u64 == totient(n as u64), "Z/{n}: {} orders, φ = {}", ws.len(), totient(n as u64));
    }
    Ok("counts equal φ(n) for n = 3..8".into())
}

fn euler_pipeline() -> Check {
    let mut cases = 0;
    for n in 1..=12u64 {
        for k in (1..n.max(2) as i64).filter(|&k| gcd(k, n as i64) == 1) {
            let c = cyclic_rot_order(n, k).map_err(e)?;
            let t = CocycleTable::from_order(&c).map_err(e)?;
            let ord = euler_class_order(&t).map_err(e)?;
            ensure!(ord == n, "({n},{k}): euler class order {ord}");
            let eta = eta_solve(&t, n as i64).map_err(e)?;
            for g in 0..t.order() {
                for h in 0..t.order() {
                    let lhs = n as i64 * t.f[g][h];
                    let rhs = eta.eta[g] - eta.eta[t.mul[g][h]] + eta.eta[h];
                    ensure!(lhs == rhs, "({n},{k}): η equation fails at ({g},{h})");
                }
            }
            let sub = lo_normal_subgroup(&c).map_err(e)?;
            ensure!(sub.k == n && sub.kernel == vec![0], "({n},{k}): H = {:?}, quotient Z/{}", sub.kernel, sub.k);
            cases += 1;
        }
    }
    Ok(format!("{cases} orders, all with euler order n and H = {{id}}"))
}

/// Compare c with the quotient of its central extension on every triple of `elems`.
fn round_trip_on(c: &CircularOrderOracle<Cyclic>, elems: &[i64]) -> std::result::Result<usize, String> {
    let ext = Arc::new(CentralExtension::new(c.clone()));
    let back = quotient_circular_order(ext.left_order(), ext.z()).map_err(e)?;
    let mut n = 0;
    for &a in elems {
        for &b in elems {
            for &d in elems {
                let x = back.eval(&(0, a), &(0, b), &(0, d)).map_err(e)?;
                let y = c.eval(&a, &b, &d).map_err(e)?;
                ensure!(x == y, "{}: differs at ({a},{b},{d}): {x} vs {y}", c.name());
                n += 1;
            }
        }
    }
    Ok(n)
}

fn construction_round_trip() -> Check {
    let mut triples = 0;
    for n in 1..=12u64 {
        for k in (1..n.max(2) as i64).filter(|&k| gcd(k, n as i64) == 1) {
            let c = cyclic_rot_order(n, k).map_err(e)?;
            triples += round_trip_on(&c, &(0..n as i64).collect::<Vec<_>>())?;
        }
    }
    let window: Vec<i64> = (-LEX_WINDOW..=LEX_WINDOW).collect();
    for m in [3, 4] {
        let c = rational_rotation_order_on_z(CirclePoint::new(q(1, m))).map_err(e)?;
        triples += round_trip_on(&c, &window)?;
    }
    Ok(format!("{triples} triples agree"))
}

fn rotation_numbers() -> Check {
    let cfg = RotConfig::default();
    let width = q(ROT_MAX_WIDTH.0, ROT_MAX_WIDTH.1);
    for p in 1..=10i64 {
        let target = CirclePoint::new(q(1, p));
        let c = quotient_circular_order(standard_left_order_z(), p).map_err(e)?;
        let r = rot(&(1 % p), &c, &cfg).map_err(e)?;
        ensure!(r.exact() == Some(target), "Z/{p}Z quotient: rot = {r:?}");
        let o = rot_one_over_p(standard_left_order_z(), 1, p).map_err(e)?;
        let exact = rot(&1, &o, &cfg).map_err(e)?;
        ensure!(exact.exact() == Some(target), "rot_one_over_p({p}): {exact:?}");
        let report = validate_axioms(&o, &(-10..=10).collect::<Vec<_>>()).map_err(e)?;
        ensure!(report.is_ok(), "rot_one_over_p({p}) violates the axioms");
        let iv = match rot(&1, &o.clone().without_rotation_tag(), &RotConfig { n_max: ROT_N_MAX, ..cfg }).map_err(e)? {
            RotationValue::Interval { interval } => interval,
            other => other.interval(),
        };
        ensure!(iv.width() <= width, "p = {p}: width {} > {}", iv.width(), width);
        ensure!(iv.contains(&target), "p = {p}: {iv} misses 1/{p}");
    }
    Ok("exact 1/p and bracket width ≤ 1/1000 for p ≤ 10".into())
}

fn trefoil_table() -> Check {
    let mut co = Vec::new();
    for n in 2..=12 {
        let v = torus_knot_cover_verdict(2, 3, n).map_err(e)?;
        match v.verdict {
            VerdictKind::CO_CERTIFIED => co.push(n),
            VerdictKind::NOT_CO => {
                let expected = match n {
                    3 => 8,
                    4 => 24,
                    5 => 120,
                    _ => return Err(format!("n = {n} unexpectedly NOT_CO")),
                };
                ensure!(v.rule == Some(Rule::FiniteNoncyclic), "n = {n}: rule {:?}", v.rule);
                ensure!(v.data["order"] == expected, "n = {n}: order {} instead of {expected}", v.data["order"]);
            }
            VerdictKind::UNKNOWN => return Err(format!("n = {n} is UNKNOWN")),
        }
    }
    let want: Vec<i64> = std::iter::once(2).chain(6..=12).collect();
    ensure!(co == want, "CO set {co:?}");
    Ok(format!("CO at {co:?}, NOT_CO at 3, 4, 5 with orders 8, 24, 120"))
}

fn five_two_covers() -> Check {
    let v = two_bridge_double_cover_verdict(7, 4).map_err(e)?;
    ensure!(v.verdict == VerdictKind::CO_CERTIFIED, "Σ2(5₂): {:?}", v.verdict);
    let entry = known_negative_lookup("Σ₃(5₂)").ok_or("Σ₃(5₂) not in the database")?;
    let v = known_negative_verdict(entry, "Σ₃(5₂)");
    ensure!(v.verdict == VerdictKind::NOT_CO, "Σ₃(5₂): {:?}", v.verdict);
    ensure!(v.citations.iter().any(|c| c.contains("Weeks")), "no Weeks citation in {:?}", v.citations);
    Ok("Σ2(5₂) = L(7,4) CO, Σ₃(5₂) is the Weeks manifold".into())
}

fn random_pair(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let a = rng.gen_range(2..8);
        let b = rng.gen_range(-7..8);
        if gcd(a, b) == 1 {
            return (a, b);
        }
    }
}

/// Rank of the image of all boundary classes in H₁(M; ℚ), from the
/// free parts of their images stacked into one matrix.
fn boundary_rank(sd: &SeifertData) -> std::result::Result<usize, String> {
    let p = seifert::presentation(sd).map_err(e)?;
    let ap = AbelianPresentation::new(&p.relations, p.gens).map_err(e)?;
    let mut rows = Vec::new();
    for k in 0..sd.boundaries as usize {
        for s in [Slope::section(), Slope::fibre()] {
            let img = ap.image(&p.slope_vector(k, &s)).map_err(e)?;
            rows.push(img.free.iter().map(|&x| x as i64).collect::<Vec<_>>());
        }
    }
    if rows[0].is_empty() {
        return Ok(0);
    }
    Ok(smith_normal_form(&rows).map_err(e)?.rank)
}

fn homology_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANK_SAMPLES {
        let orientable = rng.gen_bool(0.5);
        let genus = if orientable { rng.gen_range(0..3) } else { rng.gen_range(1..3) };
        let pairs = (0..rng.gen_range(0..4)).map(|_| random_pair(&mut rng)).collect();
        let sd = SeifertData { total_orientable: true, base_orientable: orientable, genus, boundaries: rng.gen_range(1..4), pairs, b: 0 };
        let r = boundary_rank(&sd)?;
        ensure!(r == sd.boundaries as usize, "{sd}: boundary image rank {r}");
        if sd.boundaries == 1 {
            let lam = seifert::rational_longitude(&sd).map_err(e)?;
            ensure!(gcd(lam.slope.a, lam.slope.b) == 1, "{sd}: longitude not primitive");
        }
    }
    let primes = [2i64, 3, 5, 7, 11];
    let exterior = |rng: &mut ChaCha8Rng| loop {
        let mut alphas: Vec<i64> = primes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        alphas.truncate(3);
        if alphas.len() < 2 {
            continue;
        }
        let pairs: Vec<(i64, i64)> = alphas.iter().map(|&a| (a, rng.gen_range(1..a))).collect();
        return SeifertData::disk(&pairs);
    };
    let mut done = 0;
    while done < GLUING_SAMPLES {
        let (a, c) = (rng.gen_range(-7..8), rng.gen_range(-7..8));
        if gcd(a, c) != 1 {
            continue;
        }
        let (_, u, v) = ext_gcd(a, c);
        let (b, d) = (v, -u);
        let (m1, m2) = (exterior(&mut rng), exterior(&mut rng));
        let (sf, _) = gluing_from_meridian_longitude(&m1, &m2, [[a, c], [b, d]]).map_err(e)?;
        let h = JsjTree::pair(m1.clone(), m2.clone(), sf).h1().map_err(e)?;
        ensure!(h.is_cyclic(), "{m1} ∪ {m2} via {:?}: H1 = {}", [[a, c], [b, d]], h.describe());
        ensure!(h.order().unwrap_or(0) == (c as i128).abs(), "{m1} ∪ {m2}: |H1| = {:?}, expected {}", h.order(), c.abs());
        done += 1;
    }
    Ok(format!("{RANK_SAMPLES} rank samples, {GLUING_SAMPLES} gluings with |H1| = |c| (seed {SEED:#x})"))
}

fn seifert_classification() -> Check {
    let cfg = RotConfig::default();
    for r in [q(0, 1), q(1, 3), q(2, 5)] {
        let c = materialize_t3_order(CirclePoint::new(r)).map_err(e)?;
        let v = rot(&[0, 0, 1], &c, &cfg).map_err(e)?;
        ensure!(v.exact() == Some(CirclePoint::new(r)), "T³ order for {r}: rot(h) = {v:?}");
        let cube: Vec<[i64; 3]> = (0..27).map(|i| [i / 9 - 1, (i / 3) % 3 - 1, i % 3 - 1]).collect();
        ensure!(validate_axioms(&c, &cube).map_err(e)?.is_ok(), "T³ order for {r} violates the axioms");
    }
    let half = vec![CirclePoint::zero(), CirclePoint::new(q(1, 2))];
    let nonorientable = [
        SeifertData { total_orientable: true, base_orientable: false, genus: 2, boundaries: 0, pairs: vec![(3, 1)], b: 0 },
        SeifertData::projective(&[(2, 1), (3, 1)], 0),
        SeifertData::mobius(&[(5, 2)]),
    ];
    for sd in &nonorientable {
        let rep = fibre_rotation_classification(sd, None).map_err(e)?;
        ensure!(rep.constraint.as_ref() == Some(&half), "{sd}: constraint {:?}", rep.constraint);
    }
    for sd in [SeifertData::sphere(&[(2, 1), (3, 1), (5, 1)], -1), SeifertData::sphere(&[(2, 1), (2, 1), (3, 1)], -1)] {
        match fibre_rotation_classification(&sd, None) {
            Err(Error::Refused(_)) => {}
            other => return Err(format!("{sd} not refused: {other:?}")),
        }
    }
    Ok("T³ rot(h) ∈ {0, 1/3, 2/5}; nonorientable bases give {0, 1/2}; finite π1 refused".into())
}

fn graph_verdicts() -> Check {
    let trefoil = || SeifertData::disk(&[(2, 1), (3, 1)]);
    let v = two_piece_verdict(&JsjTree::pair(trefoil(), trefoil(), [[5, 6], [1, 1]])).map_err(e)?;
    ensure!(v.rule == Some(Rule::TwoPiece3a), "trefoil ∪ trefoil: {:?}", v.rule);

    let klein = JsjTree::pair(SeifertData::mobius(&[]), SeifertData::disk(&[(2, 1), (2, 1)]), [[0, 1], [1, 0]]);
    let v = two_piece_verdict(&klein).map_err(e)?;
    ensure!(v.rule == Some(Rule::KleinIbundleUnion), "Klein bottle I-bundles: {:?}", v.rule);

    let mid = SeifertData { total_orientable: true, base_orientable: true, genus: 0, boundaries: 2, pairs: vec![(3, 1)], b: 0 };
    let chain = JsjTree {
        nodes: vec![SeifertData::disk(&[(2, 1), (3, 1), (7, 1)]), mid, SeifertData::disk(&[(3, 1), (4, 1), (5, 1)])],
        edges: vec![
            Edge { a: 0, a_bdry: 0, b: 1, b_bdry: 0, matrix: [[0, 1], [1, 0]] },
            Edge { a: 1, a_bdry: 1, b: 2, b_bdry: 0, matrix: [[1, 1], [1, 0]] },
        ],
    };
    let b1 = chain.h1().map_err(e)?.rank;
    let v = class_c_verdict(&chain, &ClassCHints::default()).map_err(e)?;
    let expected = if b1 == 0 { Rule::NoFiniteFilling } else { Rule::B1PositiveLo };
    ensure!(v.rule == Some(expected), "chain with b1 = {b1}: {:?}", v.rule);

    let lam = seifert::rational_longitude(&trefoil()).map_err(e)?.slope;
    let h = Slope::fibre();
    let mut open: Option<Matrix2> = None;
    'search: for x in -5..=5 {
        for y in -5..=5 {
            for z in -5..=5 {
                for w in -5..=5 {
                    let m = [[x, y], [z, w]];
                    if x * w - y * z != -1 {
                        continue;
                    }
                    let inv = inverse(&m).map_err(e)?;
                    let fails = apply(&m, &lam).map_err(e)?.delta(&h) == 1
                        && apply(&inv, &lam).map_err(e)?.delta(&h) == 1
                        && apply(&m, &h).map_err(e)?.delta(&h) != 0;
                    if fails {
                        open = Some(m);
                        break 'search;
                    }
                }
            }
        }
    }
    let m = open.ok_or("no gluing with every Δ condition failing in the search box")?;
    let t = JsjTree::pair(trefoil(), trefoil(), m);
    let v = two_piece_verdict(&t).map_err(e)?;
    ensure!(v.verdict == VerdictKind::UNKNOWN, "open case {m:?}: {:?} {:?}", v.verdict, v.rule);
    Ok(format!("3a, Klein union, special chain (b1 = {b1}), open case {m:?} UNKNOWN"))
}

fn check_construction<G: Group>(c: &CircularOrderOracle<G>, elems: &[G::Elem]) -> std::result::Result<(), String> {
    let r = validate_axioms(c, elems).map_err(e)?;
    ensure!(r.is_ok(), "{}: {} violations", c.name(), r.total_violations);
    Ok(())
}

fn axiom_validator() -> Check {
    let mut paths = 0;
    let z: Vec<i64> = (-4..=4).collect();
    let mut run = |r: std::result::Result<(), String>| {
        paths += 1;
        r
    };
    run(check_construction(&secret_left_order(&standard_left_order_z()), &z))?;
    run(check_construction(&cyclic_rot_order(5, 2).map_err(e)?, &(0..5).collect::<Vec<_>>()))?;
    let pts: Vec<CirclePoint> = (0..6).map(|i| CirclePoint::new(q(i, 6))).collect();
    run(check_construction(&standard_circle_order(), &pts))?;
    let third = rational_rotation_order_on_z(CirclePoint::new(q(1, 3))).map_err(e)?;
    run(check_construction(&third, &z))?;
    run(check_construction(&extend_cyclic_order(2, &third).map_err(e)?, &z))?;
    let quot = quotient_circular_order(standard_left_order_z(), 4).map_err(e)?;
    run(check_construction(&quot, &(0..4).collect::<Vec<_>>()))?;
    run(check_construction(&rot_one_over_p(standard_left_order_z(), 1, 3).map_err(e)?, &z))?;
    let fp = Arc::new(FreeProduct::new(vec![Some(2), Some(3)]).map_err(e)?);
    let planar = planar_free_product_order(fp.clone(), default_factor_orders(&fp).map_err(e)?).map_err(e)?;
    run(check_construction(&planar, &fp.ball(2, 2)))?;
    let z6 = Arc::new(catalog::cyclic(6).map_err(e)?);
    let w = is_circularly_orderable_bruteforce(&z6, DEFAULT_BOUND).map_err(e)?.witness.ok_or("Z/6 has no witness")?;
    run(check_construction(&arrangement_order(z6, &w).map_err(e)?, &(0..6).collect::<Vec<_>>()))?;
    let ext = Arc::new(CentralExtension::new(cyclic_rot_order(3, 1).map_err(e)?));
    let lifted: Vec<(i64, i64)> = (-1..=1).flat_map(|i| (0..3).map(move |g| (i, g))).collect();
    run(check_construction(&secret_left_order(&ext.left_order()), &lifted))?;
    let back = quotient_circular_order(ext.left_order(), ext.z()).map_err(e)?;
    run(check_construction(&back, &(0..3).map(|g| (0, g)).collect::<Vec<_>>()))?;
    let cube: Vec<[i64; 3]> = (0..27).map(|i| [i / 9 - 1, (i / 3) % 3 - 1, i % 3 - 1]).collect();
    run(check_construction(&materialize_t3_order(CirclePoint::new(q(2, 5))).map_err(e)?, &cube))?;
    let grid: Vec<[i64; 2]> = (0..9).map(|i| [i / 3 - 1, i % 3 - 1]).collect();
    run(check_construction(&secret_left_order(&lex_left_order_lattice::<2>()), &grid))?;
    ensure!(paths >= 12, "only {paths} construction paths");

    // Flip one value of a valid order; the validator must locate it.
    let good = cyclic_rot_order(5, 1).map_err(e)?;
    let corrupt = CircularOrderOracle::new(good.group().clone(), "corrupted", move |a: &i64, b: &i64, c: &i64| {
        let v = good.eval(a, b, c)?;
        Ok(if (*a, *b, *c) == (0, 1, 2) { -v } else { v })
    });
    let r = validate_axioms(&corrupt, &(0..5).collect::<Vec<_>>()).map_err(e)?;
    ensure!(!r.is_ok(), "corrupted oracle passed");
    let first = r.violations.first().ok_or("no violation reported")?;
    ensure!(!first.tuple.is_empty(), "violation without a witness tuple");
    Ok(format!("{paths} constructions valid; corruption located at axiom {} tuple {:?}", first.axiom, first.tuple))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 11] = [
        ("1 finite-group law", finite_group_law, Some(LIMIT_FINITE_LAW)),
        ("2 order counting", order_counting, Some(LIMIT_COUNTING)),
        ("3 euler pipeline", euler_pipeline, Some(LIMIT_EULER)),
        ("4 construction round trip", construction_round_trip, None),
        ("5 rotation numbers", rotation_numbers, Some(LIMIT_ROT)),
        ("6 trefoil cover table", trefoil_table, Some(LIMIT_COVERS)),
        ("7 5_2 covers", five_two_covers, None),
        ("8 homology suites", homology_suites, Some(LIMIT_HOMOLOGY)),
        ("9 seifert classification", seifert_classification, None),
        ("10 graph verdicts", graph_verdicts, Some(LIMIT_GRAPH)),
        ("11 axiom validator", axiom_validator, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if let (Ok(_), Some(l)) = (&outcome, limit) {
            if took > l {
                outcome = Err(format!("took {took:.2?}, limit {l:?}"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}  ({took:.2?})  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}  ({took:.2?})  {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
