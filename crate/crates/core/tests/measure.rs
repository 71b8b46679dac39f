use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use treerep::autom::FinitaryAutomorphism;
use treerep::measure::BernoulliDistribution;
use treerep::perm::Perm;
use treerep::rep::SqrtSum;
use treerep::tree::{CylinderSet, Degree, Vertex};
use treerep::Error;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn d2() -> Degree {
    Degree::new(2).unwrap()
}

fn p13() -> BernoulliDistribution {
    "1/3,2/3".parse().unwrap()
}

fn v(s: &str) -> Vertex {
    Vertex::parse(s, d2()).unwrap()
}

fn swap() -> FinitaryAutomorphism {
    FinitaryAutomorphism::at_vertex(d2(), Vertex::root(), Perm::transposition(2, 0, 1)).unwrap()
}

#[test]
fn cylinder_measures() {
    let uniform = BernoulliDistribution::uniform(d2());
    assert_eq!(uniform.cylinder_measure(&v("010")), q(1, 8));
    assert_eq!(p13().cylinder_measure(&v("011")), q(4, 27));
    assert!(p13().cylinder_measure(&Vertex::root()).is_one());
}

#[test]
fn set_measures() {
    let p = p13();
    assert!(p.set_measure(&CylinderSet::whole(d2())).unwrap().is_one());
    assert!(p.set_measure(&CylinderSet::empty(d2())).unwrap().is_zero());
    let a = CylinderSet::normalize(d2(), [v("0"), v("10")]).unwrap();
    assert_eq!(p.set_measure(&a).unwrap(), q(5, 9));
}

#[test]
fn radon_nikodym_examples() {
    let p = p13();
    let id = FinitaryAutomorphism::identity(d2());
    assert!(Vertex::level_vertices(d2(), 3).all(|w| p.rn_derivative(&id, &w).unwrap().is_one()));
    assert_eq!(p.rn_derivative(&swap(), &v("1")).unwrap(), q(1, 2));
    assert_eq!(p.rn_derivative(&swap(), &v("0")).unwrap(), q(2, 1));
    let uniform = BernoulliDistribution::uniform(d2());
    for g in FinitaryAutomorphism::enumerate(d2(), 2) {
        for w in Vertex::level_vertices(d2(), 2) {
            assert!(uniform.rn_derivative(&g, &w).unwrap().is_one());
        }
    }
}

#[test]
fn gamma_constants() {
    let c = p13().a_gamma().unwrap();
    assert_eq!(c.a, q(2, 1));
    assert_eq!(c.gamma, SqrtSum::term(q(2, 3), &q(2, 1)).unwrap());
    assert!((c.gamma.to_f64() - 0.94281).abs() < 1e-5);

    let p3: BernoulliDistribution = "1/5,3/10,1/2".parse().unwrap();
    let c = p3.a_gamma().unwrap();
    assert_eq!(c.a, q(3, 2));
    // 2√(3/2)/(5/2) = (2/5)√6
    assert_eq!(c.gamma, SqrtSum::term(q(2, 5), &q(6, 1)).unwrap());
    assert!((c.gamma.to_f64() - 0.97980).abs() < 1e-5);

    let err = BernoulliDistribution::uniform(d2()).a_gamma().unwrap_err();
    assert!(matches!(err, Error::NotInPStar));
}

#[test]
fn distribution_validation() {
    assert!("1/2,1/3".parse::<BernoulliDistribution>().is_err());
    assert!("0,1".parse::<BernoulliDistribution>().is_err());
    assert!("1".parse::<BernoulliDistribution>().is_err());
    assert!(p13().in_p_star());
    assert!(!BernoulliDistribution::uniform(d2()).in_p_star());
}

#[test]
fn hellinger_values() {
    let p = p13();
    let r: BernoulliDistribution = "2/3,1/3".parse().unwrap();
    let one = p.hellinger_affinity(&r, 1).unwrap();
    assert_eq!(one.exact, SqrtSum::term(q(2, 3), &q(2, 1)).unwrap());
    let hundred = p.hellinger_affinity(&r, 100).unwrap();
    // (2√2/3)^100 = 2^150 / 3^100
    let exact = BigRational::new(
        num_bigint::BigInt::from(2).pow(150),
        num_bigint::BigInt::from(3).pow(100),
    );
    assert_eq!(hundred.exact.as_rational(), Some(exact));
    assert!(hundred.value < 1e-2);
    assert!((hundred.value - 2.7693e-3).abs() < 1e-6);
    for n in [1, 5, 50] {
        assert!(p.hellinger_affinity(&p, n).unwrap().exact.as_rational().unwrap().is_one());
    }
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
    (1i64..50, 1i64..50).prop_map(|(a, b)| {
        BernoulliDistribution::new(vec![q(a, a + b), q(b, a + b)]).unwrap()
    })
}

proptest! {
    #[test]
    fn level_measures_sum_to_one(p in distribution(), n in 0usize..7) {
        let total = Vertex::level_vertices(d2(), n)
            .fold(BigRational::zero(), |acc, w| acc + p.cylinder_measure(&w));
        prop_assert!(total.is_one());
    }

    #[test]
    fn radon_nikodym_is_a_cocycle(g in finitary(3), h in finitary(3), p in distribution(), idx in 0usize..8) {
        // dμ((gh)⁻¹x)/dμ(x) = dμ(h⁻¹g⁻¹x)/dμ(g⁻¹x) · dμ(g⁻¹x)/dμ(x)
        let w = Vertex::from_index(idx, 3, d2());
        let gh = g.compose(&h).unwrap();
        let lhs = p.rn_derivative(&gh, &w).unwrap();
        let rhs = p.rn_derivative(&h, &g.inverse().apply(&w)).unwrap() * p.rn_derivative(&g, &w).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushforward_preserves_total_mass(g in finitary(3), p in distribution()) {
        // Σ_v dμ(g⁻¹x)/dμ(x) μ(X_v) = μ(g⁻¹X) = 1
        let total = Vertex::level_vertices(d2(), 3).fold(BigRational::zero(), |acc, w| {
            acc + p.rn_derivative(&g, &w).unwrap() * p.cylinder_measure(&w)
        });
        prop_assert!(total.is_one());
    }
}
