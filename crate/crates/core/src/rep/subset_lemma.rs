use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`subset_lemma_bruteforce`].
pub const SUBSET_LEMMA_MAX_N: usize = 8;

/// A permutation of at most 8 points packed three bits per image.
type Code = u32;

fn encode(images: &[u8]) -> Code {
    images
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &y)| acc | (Code::from(y) << (3 * i)))
}

fn image(code: Code, i: usize) -> usize {
    ((code >> (3 * i)) & 7) as usize
}

/// `a ∘ b`.
fn compose(a: Code, b: Code, n: usize) -> Code {
    (0..n).fold(0, |acc, i| acc | ((image(a, image(b, i)) as Code) << (3 * i)))
}

fn all_perms(n: usize) -> Vec<Code> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (0..n as u8).collect();
    permute(&mut current, 0, &mut out);
    out.sort_unstable();
    out
}

fn permute(xs: &mut Vec<u8>, k: usize, out: &mut Vec<Code>) {
    if k == xs.len() {
        out.push(encode(xs));
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, out);
        xs.swap(k, i);
    }
}

/// The group generated by `gens`, as a sorted element list.
fn closure(gens: &[Code], n: usize) -> Vec<Code> {
    let id = encode(&(0..n as u8).collect::<Vec<_>>());
    let mut seen = BTreeSet::from([id]);
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for &s in gens {
            let h = compose(s, g, n);
            if seen.insert(h) {
                frontier.push(h);
            }
        }
    }
    seen.into_iter().collect()
}

fn is_transitive(elements: &[Code], n: usize) -> bool {
    let orbit: BTreeSet<usize> = elements.iter().map(|&g| image(g, 0)).collect();
    orbit.len() == n
}

/// Transitive subgroups of `Sym(n)` generated by at most `generators`
/// elements, deduplicated by element set. Each comes with one generating tuple.
pub fn transitive_groups(n: usize, generators: usize) -> Vec<(Vec<Code>, Vec<Code>)> {
    let perms = all_perms(n);
    // one generator per cyclic subgroup
    let mut cyclic: BTreeMap<Vec<Code>, Code> = BTreeMap::new();
    for &g in &perms {
        cyclic.entry(closure(&[g], n)).or_insert(g);
    }
    let cyclic_gens: Vec<Code> = cyclic.values().copied().collect();
    let mut groups: BTreeMap<Vec<Code>, Vec<Code>> = BTreeMap::new();
    let mut layer: Vec<(Vec<Code>, Vec<Code>)> = cyclic
        .iter()
        .map(|(elements, &g)| (elements.clone(), vec![g]))
        .collect();
    for round in 1..=generators {
        for (elements, gens) in &layer {
            groups.entry(elements.clone()).or_insert_with(|| gens.clone());
        }
        if round == generators {
            break;
        }
        let next: Vec<(Vec<Code>, Vec<Code>)> = layer
            .par_iter()
            .flat_map_iter(|(elements, gens)| {
                cyclic_gens.iter().filter_map(move |&c| {
                    if elements.binary_search(&c).is_ok() {
                        return None;
                    }
                    let mut g2 = gens.clone();
                    g2.push(c);
                    Some((closure(&g2, n), g2))
                })
            })
            .collect();
        let mut dedup: BTreeMap<Vec<Code>, Vec<Code>> = BTreeMap::new();
        for (elements, gens) in next {
            if !groups.contains_key(&elements) {
                dedup.entry(elements).or_insert(gens);
            }
        }
        layer = dedup.into_iter().collect();
    }
    groups
        .into_iter()
        .filter(|(elements, _)| is_transitive(elements, n))
        .collect()
}

/// `|g(A) Δ h(A)| ≤ |A|` for all `g ≠ h`, as bit masks.
fn hypothesis_holds(elements: &[Code], subset: u32, n: usize) -> bool {
    let size = subset.count_ones();
    let images: BTreeSet<u32> = elements
        .iter()
        .map(|&g| {
            (0..n)
                .filter(|&i| subset >> i & 1 == 1)
                .fold(0u32, |acc, i| acc | 1 << image(g, i))
        })
        .collect();
    let images: Vec<u32> = images.into_iter().collect();
    images
        .iter()
        .enumerate()
        .all(|(i, a)| images[i + 1..].iter().all(|b| (a ^ b).count_ones() <= size))
}

/// A subset satisfying the hypothesis with `|A| ≤ n/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub n: usize,
    /// Images of the generators, 0-based.
    pub generators: Vec<Vec<usize>>,
    pub subset: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetLemmaRow {
    pub n: usize,
    pub groups: usize,
    pub subsets_checked: usize,
    /// Nonempty subsets satisfying the hypothesis.
    pub satisfying: usize,
    /// Smallest `|A|` among them.
    pub min_satisfying_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetLemmaReport {
    pub rows: Vec<SubsetLemmaRow>,
    pub counterexamples: Vec<Counterexample>,
}

/// Every nonempty subset of `{0, …, n−1}` for every transitive group generated
/// by at most `generators` permutations, for `1 ≤ n ≤ n_max`.
pub fn subset_lemma_bruteforce(n_max: usize, generators: usize) -> Result<SubsetLemmaReport> {
    if n_max > SUBSET_LEMMA_MAX_N {
        return Err(Error::Guard(format!(
            "n_max = {n_max} exceeds {SUBSET_LEMMA_MAX_N}"
        )));
    }
    if generators == 0 {
        return Err(Error::Precondition("at least one generator is needed".into()));
    }
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    for n in 1..=n_max {
        let groups = transitive_groups(n, generators);
        let per_group: Vec<(usize, Option<usize>, Vec<Counterexample>)> = groups
            .par_iter()
            .map(|(elements, gens)| {
                let mut satisfying = 0;
                let mut min_size: Option<usize> = None;
                let mut found = Vec::new();
                for subset in 1u32..(1 << n) {
                    if !hypothesis_holds(elements, subset, n) {
                        continue;
                    }
                    satisfying += 1;
                    let size = subset.count_ones() as usize;
                    min_size = Some(min_size.map_or(size, |m| m.min(size)));
                    if 2 * size <= n {
                        found.push(Counterexample {
                            n,
                            generators: gens.iter().map(|&g| (0..n).map(|i| image(g, i)).collect()).collect(),
                            subset: (0..n).filter(|&i| subset >> i & 1 == 1).collect(),
                        });
                    }
                }
                (satisfying, min_size, found)
            })
            .collect();
        let mut row = SubsetLemmaRow {
            n,
            groups: groups.len(),
            subsets_checked: groups.len() * ((1usize << n) - 1),
            satisfying: 0,
            min_satisfying_size: None,
        };
        for (satisfying, min_size, found) in per_group {
            row.satisfying += satisfying;
            row.min_satisfying_size = match (row.min_satisfying_size, min_size) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            counterexamples.extend(found);
        }
        rows.push(row);
    }
    Ok(SubsetLemmaReport {
        rows,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_examples() {
        let shift = encode(&[1, 2, 3, 0]);
        let group = closure(&[shift], 4);
        assert_eq!(group.len(), 4);
        // A = {0,1,2}: every pair of shifts differs in two points
        assert!(hypothesis_holds(&group, 0b0111, 4));
        // A = {0,1}: shifting by two gives a symmetric difference of 4
        assert!(!hypothesis_holds(&group, 0b0011, 4));
    }

    #[test]
    fn transitive_group_counts() {
        assert_eq!(transitive_groups(3, 2).len(), 2);
        // three cyclic, one Klein, three dihedral, A4 and S4
        assert_eq!(transitive_groups(4, 2).len(), 9);
        assert_eq!(transitive_groups(4, 1).len(), 3);
    }

    #[test]
    fn guard() {
        assert!(matches!(subset_lemma_bruteforce(9, 2), Err(Error::Guard(_))));
    }
}
