//! A ball in the Schreier graph of a boundary orbit, its DOT rendering and
//! the quasi-regular generator matrices it supports.

use treerep::groups::GroupSpec;
use treerep::rep::quasi_regular_matrices;

fn main() -> treerep::Result<()> {
    let group = GroupSpec::builtin("grigorchuk")?;
    let rep = quasi_regular_matrices(&group, &"(1)".parse()?, 3, 1000)?;
    print!("{}", rep.ball.to_dot());
    println!("// {} nodes", rep.size());
    println!("// generator a:\n{}", rep.matrix(0));
    println!("// composition consistent: {}", rep.composition_consistent(&group, 1000)?);
    Ok(())
}
