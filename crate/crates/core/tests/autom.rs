use num_rational::BigRational;
use proptest::prelude::*;
use treerep::autom::{
    activity, apply_vertex, n_g, section, subexp_profile, support_cylinders, truncate,
    AutomatonElement, FinitaryAutomorphism, GroupWord, Letter,
};
use treerep::groups::GroupSpec;
use treerep::perm::Perm;
use treerep::tree::{CylinderSet, Degree, Vertex};

fn d2() -> Degree {
    Degree::new(2).unwrap()
}

fn v(s: &str) -> Vertex {
    Vertex::parse(s, d2()).unwrap()
}

fn grigorchuk() -> GroupSpec {
    GroupSpec::builtin("grigorchuk").unwrap()
}

fn odometer() -> GroupSpec {
    GroupSpec::builtin("odometer2").unwrap()
}

fn swap_at(s: &str) -> FinitaryAutomorphism {
    FinitaryAutomorphism::at_vertex(d2(), v(s), Perm::transposition(2, 0, 1)).unwrap()
}

/// Reads a binary vertex as an integer with the first letter least significant.
fn as_int(v: &Vertex) -> usize {
    v.letters().iter().rev().fold(0, |acc, &x| 2 * acc + x as usize)
}

#[test]
fn odometer_adds_one() {
    let a = odometer().parse_element("a").unwrap();
    assert_eq!(apply_vertex(&a, &v("111")), v("000"));
    for n in 1..=5 {
        for w in Vertex::level_vertices(d2(), n) {
            let image = apply_vertex(&a, &w);
            assert_eq!(as_int(&image), (as_int(&w) + 1) % (1 << n));
        }
    }
}

#[test]
fn identity_fixes_vertices() {
    let id = AutomatonElement::identity(grigorchuk().automaton().clone());
    assert_eq!(apply_vertex(&id, &v("0110")), v("0110"));
    assert!(section(&id, &v("01")).word().is_empty());
}

#[test]
fn grigorchuk_sections_of_b() {
    let g = grigorchuk();
    let b = g.parse_element("b").unwrap();
    // b fixes level 1 and its section a at 0 flips the second letter
    assert!(Vertex::level_vertices(d2(), 1).all(|w| apply_vertex(&b, &w) == w));
    assert_eq!(apply_vertex(&b, &v("00")), v("01"));
    assert_eq!(g.automaton().format_word(section(&b, &v("0")).word()), "a");
    assert_eq!(g.automaton().format_word(section(&b, &v("1")).word()), "c");
    // section identity g(uw) = g(u) g|_u(w) checked to depth 3
    for u in Vertex::level_vertices(d2(), 2) {
        let s = section(&b, &u);
        for w in Vertex::level_vertices(d2(), 3) {
            let direct = apply_vertex(&b, &u.concat(&w));
            assert_eq!(direct, apply_vertex(&b, &u).concat(&apply_vertex(&s, &w)));
        }
    }
}

#[test]
fn grigorchuk_a_is_an_involution() {
    let g = grigorchuk();
    let aa = g.parse_element("a a").unwrap();
    for w in Vertex::level_vertices(d2(), 4) {
        assert_eq!(apply_vertex(&aa, &w), w);
    }
}

#[test]
fn truncation_examples() {
    let a = odometer().parse_element("a").unwrap();
    let t = truncate(&a, 2);
    let cycle = ["00", "10", "01", "11"];
    for i in 0..4 {
        assert_eq!(t.apply(&v(cycle[i])), v(cycle[(i + 1) % 4]));
    }
    assert!(truncate(&a, 0).is_identity());
    let id = AutomatonElement::identity(odometer().automaton().clone());
    assert!(truncate(&id, 3).is_identity());
}

/// Counts level-`n` vertices whose section moves something three levels
/// further down, using only the vertex action.
fn activity_oracle(g: &AutomatonElement, n: usize) -> usize {
    Vertex::level_vertices(d2(), n)
        .filter(|u| {
            let gu = apply_vertex(g, u);
            Vertex::level_vertices(d2(), 3).any(|w| apply_vertex(g, &u.concat(&w)) != gu.concat(&w))
        })
        .count()
}

#[test]
fn activity_of_b_matches_action_oracle() {
    let g = grigorchuk();
    let b = g.parse_element("b").unwrap();
    let ks: Vec<usize> = (0..=6).map(|n| activity(&b, n).unwrap()).collect();
    let oracle: Vec<usize> = (0..=6).map(|n| activity_oracle(&b, n)).collect();
    assert_eq!(ks, oracle);
    assert_eq!(ks, [1, 2, 2, 1, 2, 2, 1]);
    let odo = odometer().parse_element("a").unwrap();
    assert!((0..=8).all(|n| activity(&odo, n).unwrap() == 1));
}

#[test]
fn subexp_profile_values() {
    let g = grigorchuk();
    let b = g.parse_element("b").unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let profile = subexp_profile(&b, 10, std::slice::from_ref(&half)).unwrap();
    assert_eq!(profile.rows[10].weighted[0], BigRational::new(1.into(), 512.into()));

    let nine_tenths = BigRational::new(9.into(), 10.into());
    let a = odometer().parse_element("a").unwrap();
    let profile = subexp_profile(&a, 20, std::slice::from_ref(&nine_tenths)).unwrap();
    let expected = BigRational::new(9.into(), 10.into()).pow(20);
    assert_eq!(profile.rows[20].weighted[0], expected);

    let id = AutomatonElement::identity(g.automaton().clone());
    let profile = subexp_profile(&id, 5, &[half]).unwrap();
    assert!(profile.rows.iter().all(|r| r.activity == 0));
}

#[test]
fn support_cylinder_examples() {
    assert!(support_cylinders(&FinitaryAutomorphism::identity(d2()), 3).unwrap().is_empty());
    assert!(support_cylinders(&swap_at(""), 1).unwrap().is_whole());
    let a = grigorchuk().parse_element("a").unwrap();
    for n in 1..=4 {
        assert_eq!(support_cylinders(&a, n).unwrap(), CylinderSet::whole(d2()));
    }
    assert_eq!(
        support_cylinders(&swap_at("01"), 3).unwrap(),
        CylinderSet::cylinder(v("01"), d2()).unwrap()
    );
}

#[test]
fn n_g_examples() {
    let id = FinitaryAutomorphism::identity(d2());
    assert!(Vertex::level_vertices(d2(), 3).all(|w| n_g(&id, &w) == 0));
    assert!(Vertex::level_vertices(d2(), 3).all(|w| n_g(&swap_at(""), &w) == 1));
    let double = swap_at("").compose(&swap_at("0")).unwrap();
    assert_eq!(n_g(&double, &v("00")), 2);
    assert_eq!(n_g(&double, &v("10")), 1);
}

#[test]
fn alpha_beta_examples() {
    let (a, b) = FinitaryAutomorphism::identity(d2()).alpha_beta();
    assert!(a.is_identity() && b.is_identity());
    let (a, b) = swap_at("").alpha_beta();
    assert_eq!(a, swap_at(""));
    assert!(b.is_identity());
    let double = swap_at("").compose(&swap_at("0")).unwrap();
    let (a, b) = double.alpha_beta();
    assert_eq!(a, swap_at(""));
    for w in Vertex::level_vertices(d2(), 2) {
        assert_eq!(n_g(&b, &w), if w.letters()[0] == 0 { 1 } else { 0 });
    }
}

fn letters_differ(x: &Vertex, y: &Vertex) -> usize {
    x.letters().iter().zip(y.letters()).filter(|(a, b)| a != b).count()
}

#[test]
fn alpha_beta_counting_identities_exhaustive() {
    let all = FinitaryAutomorphism::enumerate(d2(), 3);
    assert_eq!(all.len(), 128);
    for g in &all {
        let (alpha, beta) = g.alpha_beta();
        assert_eq!(&alpha.compose(&beta).unwrap(), g);
        for x in Vertex::level_vertices(d2(), 3) {
            assert!(letters_differ(&x, &alpha.apply(&x)) <= 1);
            if g.apply(&x) == x {
                continue;
            }
            assert_eq!(n_g(&alpha, &x), 1);
            assert_eq!(n_g(&beta, &x) + 1, n_g(g, &x));
        }
    }
}

fn finitary_strategy(depth: usize) -> impl Strategy<Value = FinitaryAutomorphism> {
    let vertices: Vec<Vertex> = (0..depth).flat_map(|n| Vertex::level_vertices(d2(), n)).collect();
    proptest::collection::vec(any::<bool>(), vertices.len()).prop_map(move |flags| {
        let portrait = vertices
            .iter()
            .zip(flags)
            .filter(|(_, f)| *f)
            .map(|(u, _)| (u.clone(), Perm::transposition(2, 0, 1)));
        FinitaryAutomorphism::new(d2(), depth, portrait).unwrap()
    })
}

fn grigorchuk_word() -> impl Strategy<Value = GroupWord> {
    proptest::collection::vec(0usize..4, 0..12)
        .prop_map(|gens| GroupWord::from_letters(gens.into_iter().map(|g| Letter::new(g, false)).collect()))
}

proptest! {
    #[test]
    fn section_cocycle(g in finitary_strategy(4), h in finitary_strategy(4), idx in 0usize..4) {
        let u = Vertex::from_index(idx, 2, d2());
        let gh = g.compose(&h).unwrap();
        let lhs = gh.section(&u);
        let rhs = g.section(&h.apply(&u)).compose(&h.section(&u)).unwrap();
        for w in Vertex::level_vertices(d2(), 2) {
            prop_assert_eq!(lhs.apply(&w), rhs.apply(&w));
        }
    }

    #[test]
    fn word_action_is_a_homomorphism(u in grigorchuk_word(), w in grigorchuk_word()) {
        let g = grigorchuk();
        let gu = g.element(u.clone());
        let gw = g.element(w.clone());
        let guw = g.element(u.concat(&w));
        for x in Vertex::level_vertices(d2(), 5) {
            prop_assert_eq!(apply_vertex(&guw, &x), apply_vertex(&gu, &apply_vertex(&gw, &x)));
        }
        let n = 4;
        let lhs = truncate(&guw, n);
        let rhs = truncate(&gu, n).compose(&truncate(&gw, n)).unwrap().truncate(n);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn n_g_grows_along_a_ray(g in finitary_strategy(5), idx in 0usize..32) {
        let x = Vertex::from_index(idx, 5, d2());
        let counts: Vec<usize> = (0..=5).map(|k| n_g(&g, &x.prefix(k))).collect();
        prop_assert!(counts.windows(2).all(|c| c[0] <= c[1] && c[1] <= c[0] + 1));
    }

    #[test]
    fn support_cylinders_are_monotone(u in grigorchuk_word()) {
        let g = grigorchuk().element(u);
        let coarse = support_cylinders(&g, 2).unwrap();
        let fine = support_cylinders(&g, 4).unwrap();
        prop_assert!(coarse.is_subset(&fine));
    }
}
