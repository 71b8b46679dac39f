//! Koopman matrices of tree automorphisms on level-n cylinder functions:
//! exact monomial entries, unitarity, and the decay bound for a swap.

use treerep::autom::{truncate, FinitaryAutomorphism};
use treerep::groups::GroupSpec;
use treerep::measure::BernoulliDistribution;
use treerep::perm::Perm;
use treerep::rep::{gamma_decay_check, koopman_level_matrix, Basis};
use treerep::tree::{CylinderSet, Vertex};

fn main() -> treerep::Result<()> {
    let group = GroupSpec::builtin("grigorchuk")?;
    let p: BernoulliDistribution = "1/3,2/3".parse()?;
    let n = 2;

    let a = truncate(&group.parse_element("a")?, n);
    let b = truncate(&group.parse_element("b")?, n);
    let ka = koopman_level_matrix(&a, &p, n, Basis::Raw)?;
    println!("kappa_p(a) on level {n}, raw cylinder basis:\n{}", ka.to_csv());
    println!("unitary: {}", ka.is_unitary(&p));

    let kb = koopman_level_matrix(&b, &p, n, Basis::Raw)?;
    let ab = koopman_level_matrix(&a.compose(&b)?, &p, n, Basis::Raw)?;
    println!("kappa(ab) = kappa(a) kappa(b): {}", ab == ka.mul(&kb)?);

    let normalized = koopman_level_matrix(&a, &p, n, Basis::Normalized)?;
    println!("normalized basis gives a permutation matrix: {}", normalized.is_permutation_matrix());

    let d = p.degree();
    let swap = FinitaryAutomorphism::at_vertex(d, Vertex::root(), Perm::transposition(2, 0, 1))?;
    let check = gamma_decay_check(&swap, &CylinderSet::whole(d), &p, 1, 1)?;
    println!(
        "swap: (kappa xi, xi) = {}  vs  gamma mu(X) = {}  equality: {}",
        check.lhs,
        check.rhs,
        check.is_equality()
    );
    Ok(())
}
