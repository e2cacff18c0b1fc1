//! Property tests for the invariants each module promises. Oracles here
//! are computed independently of the code under test wherever possible
//! (explicit sorting, direct matrix products, closed-form counts).

use std::sync::Arc;

use circord::euler::{determinant, euler_class_order, eta_solve, lo_normal_subgroup, mat_mul, smith_normal_form, AbelianPresentation, CocycleTable};
use circord::extensions::{floor_by_z, quotient_circular_order, rot, rot_interval_with_lift, CentralExtension, RotConfig};
use circord::graph::{self, apply, class_c_verdict, delta, gluing_from_meridian_longitude, ClassCHints, Edge, JsjTree, Matrix2};
use circord::groups::{catalog, validate_table, Cyclic, FiniteGroupTable, FreeProduct, Group, Lattice, Syllable};
use circord::orders::{
    cyclic_rot_order, default_factor_orders, extend_cyclic_order, planar_free_product_order, rational_rotation_order_on_z,
    secret_left_order, standard_left_order_z, validate_axioms,
};
use circord::rational::{gcd, q, CirclePoint};
use circord::seifert::{self, SeifertData, Slope};
use circord::verdict::VerdictKind;
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

// ---------- groups ----------

fn raw_word(factors: usize) -> impl Strategy<Value = Vec<Syllable>> {
    prop::collection::vec((0..factors, -4i64..=4), 0..8)
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn cyclic_and_lattice_axioms(n in 1u64..20, a in -50i64..50, b in -50i64..50, c in -50i64..50) {
        let g = Cyclic::finite(n).unwrap();
        let (a, b, c) = (g.reduce(a), g.reduce(b), g.reduce(c));
        prop_assert_eq!(g.mul(&a, &g.inv(&a).unwrap()).unwrap(), g.identity());
        prop_assert_eq!(g.mul(&g.identity(), &a).unwrap(), a);
        let l = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
        let r = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        let z3 = Lattice::<3>;
        let (x, y) = ([a, b, c], [c, a, b]);
        prop_assert_eq!(z3.mul(&x, &z3.inv(&x).unwrap()).unwrap(), z3.identity());
        prop_assert_eq!(z3.mul(&x, &y).unwrap(), z3.mul(&y, &x).unwrap());
    }

    #[test]
    fn free_reduction_is_confluent(a in raw_word(3), b in raw_word(3), c in raw_word(3)) {
        let fp = FreeProduct::new(vec![Some(2), Some(3), None]).unwrap();
        let whole: Vec<Syllable> = a.iter().chain(&b).chain(&c).copied().collect();
        let direct = fp.reduce(&whole).unwrap();
        // any bracketing gives the same normal form
        let ra = fp.reduce(&a).unwrap();
        let rb = fp.reduce(&b).unwrap();
        let rc = fp.reduce(&c).unwrap();
        let left = fp.mul(&fp.mul(&ra, &rb).unwrap(), &rc).unwrap();
        let right = fp.mul(&ra, &fp.mul(&rb, &rc).unwrap()).unwrap();
        prop_assert_eq!(&direct, &left);
        prop_assert_eq!(&direct, &right);
        prop_assert_eq!(fp.reduce(&direct).unwrap(), direct.clone());
        prop_assert_eq!(fp.mul(&direct, &fp.inv(&direct).unwrap()).unwrap(), fp.identity());
    }
}

#[test]
fn catalog_tables_validate() {
    let mut gs: Vec<_> = (1..=12).map(|n| catalog::cyclic(n).unwrap()).collect();
    gs.extend([catalog::klein4().unwrap(), catalog::s3().unwrap(), catalog::d4().unwrap(), catalog::q8().unwrap(), catalog::z2xz4().unwrap()]);
    for g in gs {
        let t = FiniteGroupTable { name: g.name().to_string(), mul: g.table().to_vec() };
        assert!(validate_table(&t).is_empty(), "{}", g.name());
        let n = g.order();
        for a in 0..n {
            assert_eq!(g.product(a, g.inverse_of(a)), g.identity_index());
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.product(g.product(a, b), c), g.product(a, g.product(b, c)));
                }
            }
        }
    }
}

// ---------- orders ----------

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn secret_order_is_positive_on_chains(a in -1000i64..1000, d1 in 1i64..100, d2 in 1i64..100) {
        let c = secret_left_order(&standard_left_order_z());
        prop_assert_eq!(c.eval(&a, &(a + d1), &(a + d1 + d2)).unwrap(), 1);
        prop_assert_eq!(c.eval(&(a + d1), &a, &(a + d1 + d2)).unwrap(), -1);
    }

    #[test]
    fn extension_restricts_to_the_given_order(k in 1i64..5, p in 0i64..7, m in 1i64..7, xs in prop::collection::vec(-8i64..8, 3)) {
        prop_assume!(gcd(p, m) == 1);
        let sub = rational_rotation_order_on_z(CirclePoint::new(q(p, m))).unwrap();
        let ext = extend_cyclic_order(k, &sub).unwrap();
        let (a, b, c) = (k * xs[0], k * xs[1], k * xs[2]);
        prop_assert_eq!(ext.eval(&a, &b, &c).unwrap(), sub.eval(&a, &b, &c).unwrap());
    }

    #[test]
    fn planar_order_restricts_to_factors(orders in prop::collection::vec(prop::option::of(2u64..6), 2..4), i in 0usize..3, es in prop::collection::vec(-6i64..6, 3)) {
        let i = i % orders.len();
        let fp = Arc::new(FreeProduct::new(orders.clone()).unwrap());
        let factor = default_factor_orders(&fp).unwrap();
        let c = planar_free_product_order(fp.clone(), factor.clone()).unwrap();
        let red = |e: i64| match orders[i] { Some(a) => e.rem_euclid(a as i64), None => e };
        let w = |e: i64| fp.reduce(&[(i, e)]).unwrap();
        prop_assert_eq!(
            c.eval(&w(es[0]), &w(es[1]), &w(es[2])).unwrap(),
            factor[i].eval(&red(es[0]), &red(es[1]), &red(es[2])).unwrap()
        );
    }

    #[test]
    fn lex_order_preserves_rotation_numbers(p in 0i64..9, m in 1i64..9, g in -30i64..30) {
        prop_assume!(gcd(p, m) == 1);
        let c = rational_rotation_order_on_z(CirclePoint::new(q(p, m))).unwrap();
        let d = cyclic_rot_order(m as u64, p).unwrap();
        let rc = rot(&g, &c.clone().without_rotation_tag(), &RotConfig { n_max: 64, ..RotConfig::default() }).unwrap();
        let rd = rot(&g.rem_euclid(m), &d, &RotConfig::default()).unwrap().exact().unwrap();
        prop_assert!(rc.interval().contains(&rd), "{} vs {}", rc.interval(), rd);
        prop_assert_eq!(rot(&g, &c, &RotConfig::default()).unwrap().exact(), Some(rd));
    }
}

#[test]
fn oracles_pass_the_axioms_on_small_groups_and_short_words() {
    for n in 1..=12u64 {
        for k in 1..n.max(2) as i64 {
            if gcd(k, n as i64) == 1 {
                let c = cyclic_rot_order(n, k).unwrap();
                assert!(validate_axioms(&c, &(0..n as i64).collect::<Vec<_>>()).unwrap().is_ok());
            }
        }
    }
    let fp = Arc::new(FreeProduct::new(vec![Some(2), Some(3)]).unwrap());
    let c = planar_free_product_order(fp.clone(), default_factor_orders(&fp).unwrap()).unwrap();
    let ball = fp.ball(3, 2);
    assert!(validate_axioms(&c, &ball).unwrap().is_ok(), "{} words", ball.len());
}

// ---------- extensions ----------

#[test]
fn cocycle_identity_and_extension_associativity() {
    for n in 1..=12u64 {
        for k in (1..n.max(2) as i64).filter(|&k| gcd(k, n as i64) == 1) {
            let c = cyclic_rot_order(n, k).unwrap();
            let t = CocycleTable::from_order(&c).unwrap();
            t.validate().unwrap();
            if n <= 8 {
                let ext = CentralExtension::new(c.clone());
                let elems: Vec<(i64, i64)> = (-1..=1).flat_map(|a| (0..n as i64).map(move |g| (a, g))).collect();
                for x in &elems {
                    for y in &elems {
                        let xy = ext.mul(x, y).unwrap();
                        for z in &elems {
                            assert_eq!(ext.mul(&xy, z).unwrap(), ext.mul(x, &ext.mul(y, z).unwrap()).unwrap());
                        }
                    }
                }
            }
        }
    }
}

fn a_n(ext: &Arc<CentralExtension<Cyclic>>, g: i64, n: i64) -> i64 {
    let lo = ext.left_order();
    let gn = ext.pow(&ext.lift(&g), n).unwrap();
    floor_by_z(&lo, &ext.z(), &gn, 1_000_000).unwrap()
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn round_trip_through_the_extension(n in 1u64..=12, k in 1i64..12, a in 0i64..12, b in 0i64..12, c in 0i64..12) {
        prop_assume!(gcd(k, n as i64) == 1);
        let base = cyclic_rot_order(n, k).unwrap();
        let ext = Arc::new(CentralExtension::new(base.clone()));
        let back = quotient_circular_order(ext.left_order(), ext.z()).unwrap();
        let m = n as i64;
        let (a, b, c) = (a % m, b % m, c % m);
        prop_assert_eq!(back.eval(&(0, a), &(0, b), &(0, c)).unwrap(), base.eval(&a, &b, &c).unwrap());
    }

    #[test]
    fn translation_numbers_are_almost_additive(p in 1i64..9, den in 2i64..9, g in -20i64..20, m in 1i64..40, n in 1i64..40) {
        prop_assume!(gcd(p, den) == 1);
        let c = rational_rotation_order_on_z(CirclePoint::new(q(p, den))).unwrap();
        let ext = Arc::new(CentralExtension::new(c));
        let (am, an, amn) = (a_n(&ext, g, m), a_n(&ext, g, n), a_n(&ext, g, m + n));
        prop_assert!(am + an <= amn && amn <= am + an + 1, "a_m = {}, a_n = {}, a_(m+n) = {}", am, an, amn);
    }

    #[test]
    fn rotation_is_a_homomorphism_on_cyclic_subgroups(p in 0i64..11, den in 1i64..11, g in -15i64..15, k in -6i64..6) {
        prop_assume!(gcd(p, den) == 1);
        let c = rational_rotation_order_on_z(CirclePoint::new(q(p, den))).unwrap();
        let cfg = RotConfig { n_max: 40, ..RotConfig::default() };
        let r1 = rot(&g, &c, &cfg).unwrap().exact().unwrap();
        let rk = rot(&(g * k), &c, &cfg).unwrap().exact().unwrap();
        prop_assert_eq!(rk, r1.scale(k));
        let untagged = rot(&(g * k), &c.clone().without_rotation_tag(), &cfg).unwrap();
        prop_assert!(untagged.interval().contains(&r1.scale(k)));
    }

    /// rot is computed from the lift (0, g); any other lift gives the same class mod 1.
    #[test]
    fn rotation_does_not_depend_on_the_lift(n in 1u64..=12, k in 1i64..12, g in 0i64..12, level in -4i64..5, m in 1u64..30) {
        prop_assume!(gcd(k, n as i64) == 1);
        let c = cyclic_rot_order(n, k).unwrap();
        let g = g % n as i64;
        let exact = rot(&g, &c, &RotConfig::default()).unwrap().exact().unwrap();
        let iv = rot_interval_with_lift(&g, level, &c, m, 100_000).unwrap();
        prop_assert!(iv.contains(&exact), "lift level {}: {} misses {}", level, iv, exact);
        let base = rot_interval_with_lift(&g, 0, &c, m, 100_000).unwrap();
        prop_assert_eq!(iv.a - base.a, level * m as i64);
    }
}

#[test]
fn rotation_is_conjugation_invariant_in_a_free_product() {
    let fp = Arc::new(FreeProduct::new(vec![Some(2), Some(3)]).unwrap());
    let c = planar_free_product_order(fp.clone(), default_factor_orders(&fp).unwrap()).unwrap();
    let cfg = RotConfig { n_max: 24, ..RotConfig::default() };
    let x = fp.generator(0).unwrap();
    let y = fp.generator(1).unwrap();
    for g in [x.clone(), y.clone(), fp.pow(&y, 2).unwrap()] {
        let r = rot(&g, &c, &cfg).unwrap().exact().unwrap();
        for h in fp.ball(2, 2) {
            let conj = fp.mul(&fp.mul(&h, &g).unwrap(), &fp.inv(&h).unwrap()).unwrap();
            assert_eq!(rot(&conj, &c, &cfg).unwrap().exact(), Some(r), "h = {h:?}");
        }
    }
}

// ---------- euler ----------

proptest! {
    #![proptest_config(cfg(96))]

    #[test]
    fn smith_normal_form_is_correct(rows in 1usize..5, cols in 1usize..5, entries in prop::collection::vec(-9i64..10, 16)) {
        let a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * 4 + j]).collect()).collect();
        let s = smith_normal_form(&a).unwrap();
        let wide: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let uav = mat_mul(&mat_mul(&s.u, &wide).unwrap(), &s.v).unwrap();
        prop_assert_eq!(&uav, &s.d);
        prop_assert_eq!(determinant(&s.u).unwrap().abs(), 1);
        prop_assert_eq!(determinant(&s.v).unwrap().abs(), 1);
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert_eq!(s.d[i][j], 0);
                }
            }
        }
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0] > 0 && w[1] % w[0] == 0);
        }
    }
}

#[test]
fn euler_class_and_eta_for_cyclic_orders() {
    for n in 1..=12u64 {
        for k in (1..n.max(2) as i64).filter(|&k| gcd(k, n as i64) == 1) {
            let c = cyclic_rot_order(n, k).unwrap();
            let t = CocycleTable::from_order(&c).unwrap();
            let ord = euler_class_order(&t).unwrap();
            assert_eq!(ord, n);
            let eta = eta_solve(&t, ord as i64).unwrap();
            let m = t.order();
            for g in 0..m {
                for h in 0..m {
                    let lhs = ord as i64 * t.f[g][h];
                    assert_eq!(lhs, eta.eta[g] - eta.eta[t.mul[g][h]] + eta.eta[h]);
                    let psi = |x: usize| eta.eta[x].rem_euclid(ord as i64);
                    assert_eq!(psi(t.mul[g][h]), (psi(g) + psi(h)).rem_euclid(ord as i64));
                }
            }
            let sub = lo_normal_subgroup(&c).unwrap();
            assert_eq!((sub.k, sub.kernel.clone()), (n, vec![0]));
        }
    }
}

// ---------- seifert ----------

fn coprime_pair() -> impl Strategy<Value = (i64, i64)> {
    (2i64..8, -7i64..8).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1)
}

fn bounded_seifert() -> impl Strategy<Value = SeifertData> {
    (any::<bool>(), 0u32..3, 1u32..4, prop::collection::vec(coprime_pair(), 0..4)).prop_map(|(orient, genus, boundaries, pairs)| SeifertData {
        total_orientable: true,
        base_orientable: orient || genus == 0,
        genus: if orient { genus } else { genus.max(1) },
        boundaries,
        pairs,
        b: 0,
    })
}

fn boundary_rank(sd: &SeifertData) -> usize {
    let p = seifert::presentation(sd).unwrap();
    let ap = AbelianPresentation::new(&p.relations, p.gens).unwrap();
    let mut rows = Vec::new();
    for k in 0..sd.boundaries as usize {
        for s in [Slope::section(), Slope::fibre()] {
            let img = ap.image(&p.slope_vector(k, &s)).unwrap();
            rows.push(img.free.iter().map(|&x| x as i64).collect::<Vec<_>>());
        }
    }
    if rows[0].is_empty() {
        return 0;
    }
    smith_normal_form(&rows).unwrap().rank
}

proptest! {
    #![proptest_config(cfg(30))]

    /// Half of the boundary homology survives rationally.
    #[test]
    fn boundary_image_has_half_rank(sd in bounded_seifert()) {
        prop_assert_eq!(boundary_rank(&sd), sd.boundaries as usize, "{}", sd);
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn longitude_is_primitive_and_its_order_divides_torsion(pairs in prop::collection::vec(coprime_pair(), 0..4), mobius in any::<bool>(), genus in 0u32..2) {
        let sd = SeifertData {
            total_orientable: true,
            base_orientable: !mobius,
            genus: if mobius { 1 } else { genus },
            boundaries: 1,
            pairs,
            b: 0,
        };
        let l = seifert::rational_longitude(&sd).unwrap();
        prop_assert_eq!(gcd(l.slope.a, l.slope.b), 1);
        let h = seifert::h1(&sd).unwrap();
        let torsion: i128 = h.torsion.iter().product();
        prop_assert!(l.image_order >= 1 && torsion % l.image_order as i128 == 0, "{} in {}", l.image_order, h.describe());
    }

    #[test]
    fn unit_pairs_do_not_change_homology(sd in bounded_seifert(), closed in any::<bool>(), k in -5i64..6, b in -3i64..4) {
        let mut sd = sd;
        if closed {
            sd.boundaries = 0;
            sd.b = b;
        }
        let mut moved = sd.clone();
        moved.pairs.push((1, k));
        moved.b -= k;
        prop_assert_eq!(seifert::h1(&sd).unwrap(), seifert::h1(&moved).unwrap());
        if closed {
            prop_assert_eq!(seifert::euler_number(&sd), seifert::euler_number(&moved));
        }
    }
}

fn unimodular() -> impl Strategy<Value = Matrix2> {
    (-6i64..7, -6i64..7, any::<bool>()).prop_filter_map("primitive column", |(x, z, flip)| {
        if gcd(x, z) != 1 {
            return None;
        }
        let (_, u, v) = circord::rational::ext_gcd(x, z);
        // x·u + z·v = 1, so [[x, −v], [z, u]] has determinant 1
        let m = [[x, -v], [z, u]];
        Some(if flip { [[m[0][1], m[0][0]], [m[1][1], m[1][0]]] } else { m })
    })
}

fn slope() -> impl Strategy<Value = Slope> {
    (-9i64..10, -9i64..10).prop_filter_map("primitive", |(a, b)| Slope::new(a, b).ok())
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn delta_is_invariant_under_basis_change(s1 in slope(), s2 in slope(), m in unimodular()) {
        let t1 = apply(&m, &s1).unwrap();
        let t2 = apply(&m, &s2).unwrap();
        prop_assert_eq!(delta(&t1, &t2), delta(&s1, &s2));
    }

    #[test]
    fn longitude_fibre_delta_is_basis_free(pairs in prop::collection::vec(coprime_pair(), 0..4), m in unimodular()) {
        let sd = SeifertData::disk(&pairs);
        let l = seifert::rational_longitude(&sd).unwrap().slope;
        let d = delta(&l, &Slope::fibre());
        prop_assert_eq!(delta(&apply(&m, &l).unwrap(), &apply(&m, &Slope::fibre()).unwrap()), d);
    }
}

// ---------- graph ----------

fn knot_exterior() -> impl Strategy<Value = SeifertData> {
    let orders = [2i64, 3, 5, 7, 11];
    (prop::sample::subsequence(orders.to_vec(), 2..=3), prop::collection::vec(1i64..11, 3)).prop_filter_map("coprime betas", |(alphas, betas)| {
        let pairs: Vec<(i64, i64)> = alphas.iter().zip(&betas).map(|(&a, &b)| (a, b % a)).collect();
        if pairs.iter().any(|&(a, b)| gcd(a, b) != 1) {
            return None;
        }
        Some(SeifertData::disk(&pairs))
    })
}

fn det_minus_one() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (-7i64..8, -7i64..8).prop_filter_map("unimodular", |(a, c)| {
        if gcd(a, c) != 1 {
            return None;
        }
        // a·d − b·c = −1: from a·u + c·v = 1 take d = −u, b = v
        let (_, u, v) = circord::rational::ext_gcd(a, c);
        Some((a, v, c, -u))
    })
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn glued_knot_exteriors_have_cyclic_homology(m1 in knot_exterior(), m2 in knot_exterior(), (a, b, c, d) in det_minus_one()) {
        prop_assert_eq!(a * d - b * c, -1);
        let (sf, _) = gluing_from_meridian_longitude(&m1, &m2, [[a, c], [b, d]]).unwrap();
        let h = JsjTree::pair(m1, m2, sf).h1().unwrap();
        prop_assert!(h.is_cyclic());
        prop_assert_eq!(h.order().unwrap_or(0), (c as i128).abs());
    }
}

fn small_tree() -> impl Strategy<Value = JsjTree> {
    let piece = (prop::collection::vec(coprime_pair(), 2..4), 1u32..3).prop_map(|(pairs, boundaries)| SeifertData {
        total_orientable: true,
        base_orientable: true,
        genus: 0,
        boundaries,
        pairs,
        b: 0,
    });
    (prop::collection::vec(piece, 2..4), prop::collection::vec(det_minus_one(), 3)).prop_filter_map("valid tree", |(mut nodes, ms)| {
        // chain: interior nodes get two boundaries, ends get one
        let last = nodes.len() - 1;
        for (i, n) in nodes.iter_mut().enumerate() {
            n.boundaries = if i == 0 || i == last { 1 } else { 2 };
        }
        let edges = (0..last)
            .map(|i| Edge { a: i, a_bdry: if i == 0 { 0 } else { 1 }, b: i + 1, b_bdry: 0, matrix: [[ms[i].0, ms[i].1], [ms[i].2, ms[i].3]] })
            .collect();
        let t = JsjTree { nodes, edges };
        t.validate().ok().map(|_| t)
    })
}

proptest! {
    #![proptest_config(cfg(40))]

    #[test]
    fn class_c_is_monotone_in_hints(tree in small_tree()) {
        let bare = class_c_verdict(&tree, &ClassCHints::default()).unwrap();
        let hints = ClassCHints { fillings_in_class_c: true, infinite_filling_edges: (0..tree.edges.len()).collect() };
        let rich = class_c_verdict(&tree, &hints).unwrap();
        if bare.verdict == VerdictKind::CO_CERTIFIED {
            prop_assert_eq!(rich.verdict, VerdictKind::CO_CERTIFIED);
        }
        prop_assert!(rich.verdict != VerdictKind::NOT_CO || bare.verdict == VerdictKind::NOT_CO);
        // certified verdicts never rest on a failed machine check
        for v in [&bare, &rich] {
            if v.is_certified() {
                prop_assert!(v.hypotheses.iter().all(|h| h.holds), "{:?}", v);
            }
        }
    }
}

#[test]
fn certified_two_piece_verdicts_replay() {
    let trefoil = SeifertData::disk(&[(2, 1), (3, 1)]);
    let tree = JsjTree::pair(trefoil.clone(), trefoil, [[5, 6], [1, 1]]);
    let a = graph::two_piece_verdict(&tree).unwrap();
    let b = graph::two_piece_verdict(&tree).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

// ---------- apps / cli ----------

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn cli_documents_are_deterministic_and_replay(n in 2i64..14, k in 1i64..6, m in 1i64..5) {
        for text in [
            format!(r#"{{"schema":"circord/v1","query":{{"command":"branched-cover","knot":{{"kind":"torus","p":2,"q":3}},"n":{n}}}}}"#),
            format!(r#"{{"schema":"circord/v1","query":{{"command":"fibonacci","k":{k},"m":{m}}}}}"#),
        ] {
            let q = circord::cli::parse_input(&text).unwrap();
            let a = circord::cli::run_query(&q).unwrap().render();
            let b = circord::cli::run_query(&q).unwrap().render();
            prop_assert_eq!(&a, &b);
            prop_assert!(circord::cli::replay(&a).unwrap().ok());
        }
    }
}

fn one_boundary_piece() -> impl Strategy<Value = SeifertData> {
    (prop::collection::vec(coprime_pair(), 0..4), any::<bool>()).prop_filter_map("JSJ piece", |(pairs, mobius)| {
        if !mobius && pairs.len() < 2 {
            return None;
        }
        Some(if mobius { SeifertData::mobius(&pairs) } else { SeifertData::disk(&pairs) })
    })
}

proptest! {
    #![proptest_config(cfg(64))]

    /// Matching fibres merges two pieces into one closed Seifert space
    /// with the homology of the union.
    #[test]
    fn fibre_matched_union_is_the_merged_seifert_space(m1 in one_boundary_piece(), m2 in one_boundary_piece(), z in -6i64..7, flip in any::<bool>()) {
        let w = if flip { -1 } else { 1 };
        let phi = [[-w, 0], [z, w]];
        let merged = graph::merge_fibred_pair(&m1, &m2, &phi).unwrap();
        let tree = JsjTree::pair(m1, m2, phi);
        prop_assert_eq!(seifert::h1(&merged).unwrap(), tree.h1().unwrap(), "{}", merged);
    }
}
