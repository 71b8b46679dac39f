//! Splitting a finitary automorphism into a one-letter change α and a
//! remainder β with one active vertex fewer on every moved ray.

use treerep::autom::{n_g, FinitaryAutomorphism};
use treerep::perm::Perm;
use treerep::tree::{Degree, Vertex};

fn main() -> treerep::Result<()> {
    let d = Degree::new(2)?;
    let swap = |v: &str| -> treerep::Result<FinitaryAutomorphism> {
        FinitaryAutomorphism::at_vertex(d, Vertex::parse(v, d)?, Perm::transposition(2, 0, 1))
    };
    let g = swap("")?.compose(&swap("0")?)?.compose(&swap("11")?)?;
    let (alpha, beta) = g.alpha_beta();
    println!("g = alpha ∘ beta: {}", alpha.compose(&beta)? == g);
    println!("{:>5} {:>5} {:>4} {:>8} {:>7}", "x", "g x", "N_g", "N_alpha", "N_beta");
    for x in Vertex::level_vertices(d, 3) {
        let gx = g.apply(&x);
        if gx == x {
            continue;
        }
        println!(
            "{:>5} {:>5} {:>4} {:>8} {:>7}",
            x.to_string(),
            gx.to_string(),
            n_g(&g, &x),
            n_g(&alpha, &x),
            n_g(&beta, &x)
        );
    }
    Ok(())
}
