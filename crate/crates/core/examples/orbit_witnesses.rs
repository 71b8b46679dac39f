//! Elements fixing one ray y that move another ray x to pairwise distinct
//! places, certifying that the stabilizer orbit of x is infinite.

use treerep::groups::{distinct_orbit_points, GroupSpec};
use treerep::tree::BoundaryPoint;

fn main() -> treerep::Result<()> {
    let group = GroupSpec::builtin("grigorchuk")?;
    let x: BoundaryPoint = "(0)".parse()?;
    let y: BoundaryPoint = "(1)".parse()?;
    let out = distinct_orbit_points(&group, &x, &y, 4, 2000)?;
    for w in &out.witnesses {
        println!(
            "spine {:>4}  departs at level {:>2}  word length {:>5}  image {}",
            w.spine.to_string(),
            w.departure,
            w.word.len(),
            w.image
        );
    }
    println!("images separated at depth {}: {}", out.depth, out.prefixes_distinct());
    Ok(())
}
