//! Level quotients G/St_G(n): orbit structure, orders and the centralizer of
//! the level action in the symmetric group of the level.

use treerep::groups::{level_centralizer, GroupSpec};

fn main() -> treerep::Result<()> {
    for name in ["grigorchuk", "odometer2", "gupta_sidki_3"] {
        let group = GroupSpec::builtin(name)?;
        println!("{name}:");
        for n in 1..=4 {
            let q = group.level_quotient(n);
            let t = q.transitivity();
            let order = q.order(10_000).map_or(">10000".to_string(), |o| o.to_string());
            println!("  level {n}: transitive = {}, |G/St(n)| = {order}", t.transitive);
        }
    }
    for (name, n) in [("grigorchuk", 4), ("odometer2", 3)] {
        let q = GroupSpec::builtin(name)?.level_quotient(n);
        let c = level_centralizer(&q, 10_000_000)?;
        println!("centralizer of {name} on level {n}: {} elements", c.len());
    }
    Ok(())
}
