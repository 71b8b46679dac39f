//! Rigid elements, greedy filling of a region by supports, and boosting the
//! number of active vertices along rays.

use num_rational::BigRational;
use treerep::groups::{good_rigid_element, n_g_boost, support_fill, GroupSpec};
use treerep::measure::BernoulliDistribution;
use treerep::tree::{CylinderSet, Vertex};

fn main() -> treerep::Result<()> {
    let group = GroupSpec::builtin("grigorchuk")?;
    let p: BernoulliDistribution = "1/3,2/3".parse()?;
    let d = group.degree();
    let automaton = group.automaton();

    for v in ["", "0", "1", "00"] {
        let v = Vertex::parse(v, d)?;
        let g = good_rigid_element(&group, &v, &p, 2000)?;
        println!(
            "rigid at '{v}': {} ({}), mu(supp) >= {}  mu(X_v) = {}",
            automaton.format_word(&g.rigid.word),
            g.rigid.origin,
            g.support_lower_bound,
            g.cylinder_measure
        );
    }

    let region = CylinderSet::cylinder(Vertex::parse("0", d)?, d)?;
    let fill = support_fill(&group, &region, &p, 4, 2000)?;
    for s in &fill.steps {
        println!(
            "step {}: residual {} <= bound {}  (word length {})",
            s.index,
            s.residual,
            s.rate_bound,
            s.word.len()
        );
    }

    let epsilon = BigRational::new(1.into(), 4.into());
    let boost = n_g_boost(&group, &CylinderSet::whole(d), &p, 2, &epsilon, 2000)?;
    println!(
        "N_g >= 2 on measure {} > {} with a word of length {}",
        boost.census,
        boost.threshold,
        boost.word.len()
    );
    Ok(())
}
