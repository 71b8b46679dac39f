use nalgebra::DMatrix;
use num_rational::BigRational;
use proptest::prelude::*;
use treerep::autom::{truncate, FinitaryAutomorphism};
use treerep::groups::{orbit_ball, GroupSpec};
use treerep::measure::BernoulliDistribution;
use treerep::perm::Perm;
use treerep::rep::{
    fixed_space, fixed_space_exact, gamma_decay_check, h_a_profile, intertwiner_dim,
    koopman_inner, koopman_level_matrix, quasi_regular_matrices, subset_lemma_bruteforce, Basis,
    SqrtSum,
};
use treerep::tree::{CylinderSet, Degree, Vertex};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn d2() -> Degree {
    Degree::new(2).unwrap()
}

fn p13() -> BernoulliDistribution {
    "1/3,2/3".parse().unwrap()
}

fn swap() -> FinitaryAutomorphism {
    FinitaryAutomorphism::at_vertex(d2(), Vertex::root(), Perm::transposition(2, 0, 1)).unwrap()
}

fn perm_matrix(p: &Perm) -> DMatrix<f64> {
    let n = p.len();
    DMatrix::from_fn(n, n, |i, j| if p.apply(j) == i { 1.0 } else { 0.0 })
}

#[test]
fn swap_matrix_entries() {
    let raw = koopman_level_matrix(&swap(), &p13(), 1, Basis::Raw).unwrap();
    assert_eq!(raw.entry(1, 0), SqrtSum::sqrt(&q(1, 2)).unwrap());
    assert_eq!(raw.entry(0, 1), SqrtSum::sqrt(&q(2, 1)).unwrap());
    assert!(raw.entry(0, 0).is_zero());
    let normalized = koopman_level_matrix(&swap(), &p13(), 1, Basis::Normalized).unwrap();
    assert!(normalized.entry(1, 0).as_rational() == Some(q(1, 1)));
    assert!(normalized.is_permutation_matrix());
    let id = koopman_level_matrix(&FinitaryAutomorphism::identity(d2()), &p13(), 3, Basis::Raw).unwrap();
    assert!(id.is_identity());
}

#[test]
fn raw_entries_follow_the_radon_nikodym_derivative() {
    let p = p13();
    for g in FinitaryAutomorphism::sample(d2(), 3, 20, 7) {
        let dense = koopman_level_matrix(&g, &p, 3, Basis::Raw).unwrap().to_dense();
        for v in Vertex::level_vertices(d2(), 3) {
            let gv = g.apply(&v);
            let rn = p.rn_derivative(&g, &gv).unwrap();
            let expected = num_traits::ToPrimitive::to_f64(&rn).unwrap().sqrt();
            assert!((dense[(gv.index(d2()), v.index(d2()))] - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn uniform_matrices_are_permutations() {
    let u = BernoulliDistribution::uniform(d2());
    let a = truncate(&GroupSpec::builtin("grigorchuk").unwrap().parse_element("a").unwrap(), 3);
    let m = koopman_level_matrix(&a, &u, 3, Basis::Raw).unwrap();
    assert_eq!(m.size(), 8);
    assert!(m.is_permutation_matrix());
}

#[test]
fn inner_products() {
    let p = p13();
    let whole = CylinderSet::whole(d2());
    let id = FinitaryAutomorphism::identity(d2());
    let zero = CylinderSet::cylinder(Vertex::parse("0", d2()).unwrap(), d2()).unwrap();
    assert_eq!(koopman_inner(&id, &zero, &p, 2).unwrap(), SqrtSum::rational(q(1, 3)));
    let lhs = koopman_inner(&swap(), &whole, &p, 1).unwrap();
    let gamma = p.a_gamma().unwrap().gamma;
    assert_eq!(lhs, gamma);
    assert_eq!(lhs, SqrtSum::term(q(2, 3), &q(2, 1)).unwrap());
}

#[test]
fn decay_base_case_and_swap_equality() {
    let p = p13();
    let whole = CylinderSet::whole(d2());
    let base = gamma_decay_check(&FinitaryAutomorphism::identity(d2()), &whole, &p, 0, 2).unwrap();
    assert!(base.holds());
    let swap_case = gamma_decay_check(&swap(), &whole, &p, 1, 1).unwrap();
    assert!(swap_case.is_equality());
    assert!(swap_case.comparison.exact);
}

#[test]
fn fixed_space_basics() {
    let identity = DMatrix::<f64>::identity(4, 4);
    assert_eq!(fixed_space(4, &[identity]).unwrap().dim(), 4);
    let cycle = perm_matrix(&Perm::cycle(8));
    let fixed = fixed_space(8, &[cycle]).unwrap();
    assert_eq!(fixed.dim(), 1);
    let (idem, sym) = fixed.projection_defects();
    assert!(idem < 1e-10 && sym < 1e-10);
}

#[test]
fn fixed_dimension_counts_orbits() {
    // Burnside: the dimension of the fixed space equals the average number of
    // fixed points over the finite group
    for (name, n) in [("grigorchuk", 3), ("odometer2", 4), ("gupta_sidki_3", 2)] {
        let quotient = GroupSpec::builtin(name).unwrap().level_quotient(n);
        let elements = quotient.elements(100_000).unwrap();
        let fixed_points: usize = elements
            .iter()
            .map(|g| (0..quotient.size()).filter(|&i| g.apply(i) == i).count())
            .sum();
        assert_eq!(fixed_points % elements.len(), 0);
        let burnside = fixed_points / elements.len();
        let mats: Vec<DMatrix<f64>> = quotient.images().iter().map(perm_matrix).collect();
        assert_eq!(fixed_space(quotient.size(), &mats).unwrap().dim(), burnside);
        assert_eq!(fixed_space_exact(quotient.size(), quotient.images()).unwrap().dim(), burnside);
    }
}

#[test]
fn projection_is_the_group_average() {
    let quotient = GroupSpec::builtin("grigorchuk").unwrap().level_quotient(3);
    let size = quotient.size();
    let elements = quotient.elements(1000).unwrap();
    let average = elements
        .iter()
        .fold(DMatrix::<f64>::zeros(size, size), |acc, g| acc + perm_matrix(g))
        / elements.len() as f64;
    let mats: Vec<DMatrix<f64>> = quotient.images().iter().map(perm_matrix).collect();
    let fixed = fixed_space(size, &mats).unwrap();
    assert!((&fixed.projection - &average).abs().max() < 1e-10);

    // Cesàro averages of one unitary converge to the projection onto its fixed vectors
    let a = perm_matrix(quotient.image("a").unwrap());
    let fixed_a = fixed_space(size, std::slice::from_ref(&a)).unwrap();
    let mut power = DMatrix::<f64>::identity(size, size);
    let mut sum = DMatrix::<f64>::zeros(size, size);
    let steps = 2000;
    for _ in 0..steps {
        sum += &power;
        power = &a * &power;
    }
    let cesaro = sum / steps as f64;
    assert!((&fixed_a.projection - &cesaro).abs().max() < 1e-3);

    let exact = fixed_space_exact(size, quotient.images()).unwrap();
    for i in 0..size {
        for j in 0..size {
            let e = num_traits::ToPrimitive::to_f64(&exact.projection[i][j]).unwrap();
            assert!((e - fixed.projection[(i, j)]).abs() < 1e-10);
        }
    }
}

#[test]
fn intertwiner_examples() {
    let flip = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!(intertwiner_dim(std::slice::from_ref(&flip), std::slice::from_ref(&flip)).unwrap() >= 1);
    let plus = DMatrix::from_element(1, 1, 1.0);
    let minus = DMatrix::from_element(1, 1, -1.0);
    assert_eq!(intertwiner_dim(&[plus], &[minus]).unwrap(), 0);
}

#[test]
fn schreier_matrices_match_the_ball() {
    let g = GroupSpec::builtin("grigorchuk").unwrap();
    let x = "(1)".parse().unwrap();
    let rep = quasi_regular_matrices(&g, &x, 2, 1000).unwrap();
    let ball = orbit_ball(&g, &x, 2, 1000).unwrap();
    let dot = ball.to_dot();
    let mut edges = 0;
    for (s, m) in rep.matrices().iter().enumerate() {
        for j in 0..rep.size() {
            for i in 0..rep.size() {
                if m[(i, j)] == 1.0 {
                    edges += 1;
                    let line = format!("n{j} -> n{i} [label=\"{}\"]", ball.names[s]);
                    assert!(dot.contains(&line), "missing {line}");
                }
            }
        }
    }
    assert_eq!(edges, dot.matches("->").count());
    assert!(rep.composition_consistent(&g, 1000).unwrap());
}

#[test]
fn h_a_profiles() {
    let g = GroupSpec::builtin("grigorchuk").unwrap();
    let p = p13();
    let empty = h_a_profile(&g, &CylinderSet::empty(d2()), &p, 3, 2, 4, 2000).unwrap();
    assert!(empty.rows.iter().all(|r| r.dim == 8));

    let zero = CylinderSet::cylinder(Vertex::parse("0", d2()).unwrap(), d2()).unwrap();
    let profile = h_a_profile(&g, &zero, &p, 3, 3, 6, 2000).unwrap();
    assert_eq!(profile.predicted, 4);
    assert!(profile.is_monotone());
    assert_eq!(profile.rows.last().unwrap().dim, 4);

    let whole = h_a_profile(&g, &CylinderSet::whole(d2()), &p, 4, 3, 4, 2000).unwrap();
    assert!(whole.is_monotone());
    assert_eq!(whole.rows[0].dim, 16);
    assert_eq!(whole.rows.last().unwrap().dim, 0);
}

#[test]
fn subset_lemma_small() {
    let report = subset_lemma_bruteforce(4, 2).unwrap();
    assert!(report.counterexamples.is_empty());
    assert_eq!(report.rows[3].groups, 9);
    assert_eq!(report.rows[3].min_satisfying_size, Some(3));
}

fn finitary(depth: usize) -> impl Strategy<Value = FinitaryAutomorphism> {
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

fn distribution() -> impl Strategy<Value = BernoulliDistribution> {
    (1i64..30, 1i64..30).prop_map(|(a, b)| BernoulliDistribution::new(vec![q(a, a + b), q(b, a + b)]).unwrap())
}

fn sqrt_sum() -> impl Strategy<Value = SqrtSum> {
    proptest::collection::vec((-5i64..6, 1i64..4, 1i64..13), 0..3).prop_map(|terms| {
        terms.into_iter().fold(SqrtSum::zero(), |acc, (c, d, r)| {
            &acc + &SqrtSum::term(q(c, d), &q(r, 1)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn koopman_is_a_homomorphism(g in finitary(3), h in finitary(3), p in distribution()) {
        for basis in [Basis::Raw, Basis::Normalized] {
            let kg = koopman_level_matrix(&g, &p, 3, basis).unwrap();
            let kh = koopman_level_matrix(&h, &p, 3, basis).unwrap();
            let kgh = koopman_level_matrix(&g.compose(&h).unwrap(), &p, 3, basis).unwrap();
            prop_assert_eq!(kgh, kg.mul(&kh).unwrap());
        }
    }

    #[test]
    fn koopman_is_unitary(g in finitary(4), p in distribution()) {
        let m = koopman_level_matrix(&g, &p, 4, Basis::Raw).unwrap();
        prop_assert!(m.is_unitary(&p));
        // Mᵀ W M = W for the Gram matrix W of the cylinder indicators
        let dense = m.to_dense();
        let weights: Vec<f64> = Vertex::level_vertices(d2(), 4)
            .map(|v| num_traits::ToPrimitive::to_f64(&p.cylinder_measure(&v)).unwrap())
            .collect();
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(weights));
        let defect = (dense.transpose() * &w * &dense - &w).abs().max();
        prop_assert!(defect < 1e-12);
        let inverse = koopman_level_matrix(&g.inverse(), &p, 4, Basis::Normalized).unwrap();
        let normalized = koopman_level_matrix(&g, &p, 4, Basis::Normalized).unwrap();
        prop_assert_eq!(inverse, normalized.transpose());
    }

    #[test]
    fn sqrt_sum_ring_laws(a in sqrt_sum(), b in sqrt_sum(), c in sqrt_sum()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        let product = (&a * &b).to_f64();
        prop_assert!((product - a.to_f64() * b.to_f64()).abs() < 1e-9 * (1.0 + product.abs()));
    }

    #[test]
    fn square_roots_square_to_rationals(n in 1i64..200, d in 1i64..50) {
        let r = SqrtSum::sqrt(&q(n, d)).unwrap();
        prop_assert_eq!((&r * &r).as_rational(), Some(q(n, d)));
    }
}
