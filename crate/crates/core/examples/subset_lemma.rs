//! Exhaustive search over small transitive permutation groups for subsets A
//! with |gA Δ hA| <= |A| for all distinct g, h, recording the smallest such A.

use treerep::rep::subset_lemma_bruteforce;

fn main() -> treerep::Result<()> {
    let report = subset_lemma_bruteforce(5, 2)?;
    for row in &report.rows {
        println!(
            "n = {}: {} groups, {} qualifying subsets, smallest size {:?}",
            row.n, row.groups, row.satisfying, row.min_satisfying_size
        );
    }
    println!("subsets with |A| <= n/2: {}", report.counterexamples.len());
    Ok(())
}
