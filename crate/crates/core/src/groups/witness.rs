use std::collections::{HashMap, VecDeque};

use super::orbit::{boundary_image, first_difference, stabilizes};
use super::rigid::{certified_rigid_at, RigidElement};
use super::GroupSpec;
use crate::autom::{apply_vertex, GroupWord};
use crate::error::{Error, Result};
use crate::tree::{BoundaryPoint, Vertex};

/// One element `h ∈ St_G(y)` together with the ray `h·x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitWitness {
    pub word: GroupWord,
    pub image: BoundaryPoint,
    /// Spine vertex `v_k` of `x` holding the support of `word`.
    pub spine: Vertex,
    /// Level of the first letter where `h·x` leaves `x`.
    pub departure: usize,
    pub rigid: RigidElement,
    pub transporter: GroupWord,
}

/// Witnesses with pairwise distinct images, separated by their prefixes at
/// `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitWitnesses {
    pub x: BoundaryPoint,
    pub y: BoundaryPoint,
    pub witnesses: Vec<OrbitWitness>,
    pub depth: usize,
}

impl OrbitWitnesses {
    /// Re-checks that the prefixes of the images at `depth` are pairwise distinct.
    pub fn prefixes_distinct(&self) -> bool {
        let prefixes: Vec<Vertex> = self
            .witnesses
            .iter()
            .map(|w| w.image.prefix(self.depth))
            .collect();
        prefixes
            .iter()
            .enumerate()
            .all(|(i, a)| prefixes[i + 1..].iter().all(|b| a != b))
    }
}

/// Produces `m` elements of `St_G(y)` moving `x` to pairwise distinct rays.
///
/// Step `k` takes a rigid element `g` at the spine vertex `v_k = x_1…x_k`
/// (which lies off the path of `y`), finds the shallowest vertex `u` it
/// moves, and a transporter `h` with `h·u = v_{|u|}`. Then `h g h⁻¹` lies in
/// `rist(v_k)` and moves `v_{|u|}`, so its image of `x` departs from `x`
/// between levels `k` and `|u|`. The next step starts below `|u|`, which
/// keeps the departure levels strictly increasing.
pub fn distinct_orbit_points(
    group: &GroupSpec,
    x: &BoundaryPoint,
    y: &BoundaryPoint,
    m: usize,
    budget: usize,
) -> Result<OrbitWitnesses> {
    let automaton = group.automaton();
    x.check_degree(group.degree())?;
    y.check_degree(group.degree())?;
    let split = first_difference(x, y).ok_or_else(|| {
        Error::Precondition(format!("rays {x} and {y} share every prefix"))
    })?;
    let mut k = split + 1;
    let mut witnesses = Vec::with_capacity(m);
    while witnesses.len() < m {
        let spine = x.prefix(k);
        let rigid = certified_rigid_at(group, &spine, budget)?;
        let g = group.element(rigid.word.clone());
        let u = shallowest_moved(&g, &spine, budget)?;
        let target = x.prefix(u.level());
        let transporter = transporter(group, &u, &target, budget)?;
        let word = automaton.reduce(
            transporter
                .concat(&rigid.word)
                .concat(&transporter.inverse()),
        );
        if !stabilizes(automaton, &word, y, budget)? {
            return Err(Error::Precondition(format!(
                "witness at spine '{spine}' fails to fix {y}"
            )));
        }
        let image = boundary_image(automaton, &word, x, budget)?;
        let departure = first_difference(&image, x).ok_or_else(|| {
            Error::Precondition(format!("witness at spine '{spine}' fixes {x}"))
        })?;
        witnesses.push(OrbitWitness {
            word,
            image,
            spine,
            departure,
            rigid,
            transporter,
        });
        k = u.level() + 1;
    }
    let depth = witnesses.iter().map(|w| w.departure + 1).max().unwrap_or(0);
    let out = OrbitWitnesses {
        x: x.clone(),
        y: y.clone(),
        witnesses,
        depth,
    };
    if !out.prefixes_distinct() {
        return Err(Error::Precondition(format!(
            "witness images are not separated at depth {depth}"
        )));
    }
    Ok(out)
}

/// Lexicographically first vertex of least level below `v` moved by `g`.
fn shallowest_moved<T: crate::autom::SectionTree>(
    g: &T,
    v: &Vertex,
    budget: usize,
) -> Result<Vertex> {
    let mut layer = vec![v.clone()];
    let mut seen = 0usize;
    while !layer.is_empty() {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for w in &layer {
            if apply_vertex(g, w) != *w {
                return Ok(w.clone());
            }
            seen += 1;
            if seen > budget {
                return Err(Error::budget(budget, format!("looking for a vertex moved below '{v}'")));
            }
            for c in 0..g.degree().get() {
                next.push(w.child(c as u8));
            }
        }
        layer = next;
    }
    unreachable!("the layer never empties")
}

/// A word `h` with `h·from = to`, by breadth-first search in the Schreier
/// graph of the level.
fn transporter(group: &GroupSpec, from: &Vertex, to: &Vertex, budget: usize) -> Result<GroupWord> {
    let automaton = group.automaton();
    let letters: Vec<(crate::autom::Letter, crate::autom::AutomatonElement)> = automaton
        .all_letters()
        .into_iter()
        .map(|l| (l, group.element(GroupWord::from_letters(vec![l]))))
        .collect();
    let mut words: HashMap<Vertex, GroupWord> = HashMap::from([(from.clone(), GroupWord::identity())]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(v) = queue.pop_front() {
        if v == *to {
            return Ok(words.remove(&v).expect("visited"));
        }
        for (l, e) in &letters {
            let w = apply_vertex(e, &v);
            if !words.contains_key(&w) {
                if words.len() >= budget {
                    return Err(Error::budget(budget, format!("transporting '{from}' to '{to}'")));
                }
                let mut letters = vec![*l];
                letters.extend_from_slice(words[&v].letters());
                words.insert(w.clone(), GroupWord::from_letters(letters));
                queue.push_back(w);
            }
        }
    }
    Err(Error::NotFound(format!(
        "'{to}' is not in the orbit of '{from}' (level not transitive)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_rays_are_rejected() {
        let g = GroupSpec::builtin("grigorchuk").unwrap();
        let x: BoundaryPoint = "(0)".parse().unwrap();
        assert!(matches!(
            distinct_orbit_points(&g, &x, &x, 1, 1000),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn grigorchuk_single_witness() {
        let g = GroupSpec::builtin("grigorchuk").unwrap();
        let x: BoundaryPoint = "(0)".parse().unwrap();
        let y: BoundaryPoint = "(1)".parse().unwrap();
        let out = distinct_orbit_points(&g, &x, &y, 1, 2000).unwrap();
        let w = &out.witnesses[0];
        assert_ne!(w.image, x);
        assert!(stabilizes(g.automaton(), &w.word, &y, 2000).unwrap());
    }
}
