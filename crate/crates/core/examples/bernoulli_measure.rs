//! Cylinder measures, Radon-Nikodym derivatives, the constants a(p) and
//! γ(p), and the Hellinger affinity between two Bernoulli measures.

use treerep::autom::FinitaryAutomorphism;
use treerep::measure::BernoulliDistribution;
use treerep::perm::Perm;
use treerep::tree::{CylinderSet, Vertex};

fn main() -> treerep::Result<()> {
    let p: BernoulliDistribution = "1/3,2/3".parse()?;
    let d = p.degree();
    let v = Vertex::parse("011", d)?;
    println!("mu_p(X_011) = {}", p.cylinder_measure(&v));

    let a = CylinderSet::normalize(d, [Vertex::parse("0", d)?, Vertex::parse("10", d)?])?;
    println!("mu_p(X_0 ∪ X_10) = {}", p.set_measure(&a)?);

    let swap = FinitaryAutomorphism::at_vertex(d, Vertex::root(), Perm::transposition(2, 0, 1))?;
    for v in ["0", "1"] {
        let v = Vertex::parse(v, d)?;
        println!("dμ(g⁻¹x)/dμ(x) on X_{v}: {}", p.rn_derivative(&swap, &v)?);
    }

    let c = p.a_gamma()?;
    println!("a = {}, gamma = {} ≈ {:.6}", c.a, c.gamma, c.gamma.to_f64());

    let q: BernoulliDistribution = "2/3,1/3".parse()?;
    for n in [1, 10, 100] {
        let h = p.hellinger_affinity(&q, n)?;
        println!("Hellinger affinity at n = {n}: {:.6e}", h.value);
    }
    Ok(())
}
