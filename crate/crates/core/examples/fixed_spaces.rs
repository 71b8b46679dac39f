//! Joint fixed vectors of finite families of operators: exact orbit
//! averaging for permutation matrices, and the subspace of level-n functions
//! fixed by elements supported in a region.

use treerep::groups::GroupSpec;
use treerep::measure::BernoulliDistribution;
use treerep::rep::{fixed_space_exact, h_a_profile};
use treerep::tree::{CylinderSet, Vertex};

fn main() -> treerep::Result<()> {
    let group = GroupSpec::builtin("grigorchuk")?;
    let q = group.level_quotient(3);
    let exact = fixed_space_exact(q.size(), q.images())?;
    println!("fixed vectors of the level-3 action: {}", exact.dim());
    println!("projection row 0: {:?}", exact.projection[0].iter().map(|x| x.to_string()).collect::<Vec<_>>());

    let p: BernoulliDistribution = "1/3,2/3".parse()?;
    let d = group.degree();
    let region = CylinderSet::cylinder(Vertex::parse("0", d)?, d)?;
    let profile = h_a_profile(&group, &region, &p, 3, 3, 6, 2000)?;
    for row in &profile.rows {
        println!("after {} fill steps: {} elements, fixed dimension {}", row.steps, row.elements, row.dim);
    }
    println!("functions supported off X_0 on level 3: {}", profile.predicted);
    Ok(())
}
