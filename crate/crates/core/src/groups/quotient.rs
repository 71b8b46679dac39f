use std::collections::{HashSet, VecDeque};

use super::GroupSpec;
use crate::autom::{apply_vertex, GroupWord};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::{Degree, Vertex};

/// Largest level size accepted by [`level_centralizer`].
pub const CENTRALIZER_POINT_LIMIT: usize = 4096;

/// `G/St_G(n)` as the permutation group generated by the level-`n` images
/// of the generators. Points are indexed by [`Vertex::index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelQuotient {
    level: usize,
    degree: Degree,
    names: Vec<String>,
    images: Vec<Perm>,
}

/// Orbit partition of a level, with the transitivity verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTransitivity {
    pub level: usize,
    pub transitive: bool,
    pub orbits: Vec<Vec<usize>>,
}

impl LevelQuotient {
    pub fn new(group: &GroupSpec, n: usize) -> Self {
        let degree = group.degree();
        let vertices: Vec<Vertex> = Vertex::level_vertices(degree, n).collect();
        let images = group
            .generators()
            .iter()
            .map(|g| {
                let imgs = vertices
                    .iter()
                    .map(|v| apply_vertex(g, v).index(degree) as u32)
                    .collect();
                Perm::from_images(imgs).expect("automorphisms permute levels")
            })
            .collect();
        LevelQuotient {
            level: n,
            degree,
            names: group.automaton().names().map(String::from).collect(),
            images,
        }
    }

    /// A quotient given directly by permutations of `d^n` points.
    pub fn from_images(degree: Degree, level: usize, images: Vec<Perm>) -> Result<Self> {
        let size = degree.level_size(level);
        if let Some(p) = images.iter().find(|p| p.len() != size) {
            return Err(Error::SizeMismatch(format!(
                "permutation on {} points, level has {size}",
                p.len()
            )));
        }
        let names = (0..images.len()).map(|i| format!("g{i}")).collect();
        Ok(LevelQuotient {
            level,
            degree,
            names,
            images,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.degree.level_size(self.level)
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn image(&self, name: &str) -> Option<&Perm> {
        self.names.iter().position(|n| n == name).map(|i| &self.images[i])
    }

    /// Image of a word; the rightmost letter acts first.
    pub fn word_image(&self, w: &GroupWord) -> Perm {
        let mut acc = Perm::identity(self.size());
        for l in w.letters() {
            let p = &self.images[l.generator()];
            let p = if l.is_inverse() { p.inverse() } else { p.clone() };
            acc = acc.compose(&p);
        }
        acc
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let m = self.size();
        let mut seen = vec![false; m];
        let mut orbits = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < orbit.len() {
                let x = orbit[i];
                for p in &self.images {
                    let y = p.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    pub fn transitivity(&self) -> LevelTransitivity {
        let orbits = self.orbits();
        LevelTransitivity {
            level: self.level,
            transitive: orbits.len() == 1,
            orbits,
        }
    }

    /// All elements of the quotient, by breadth-first closure.
    pub fn elements(&self, limit: usize) -> Result<Vec<Perm>> {
        let id = Perm::identity(self.size());
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut out = Vec::new();
        while let Some(g) = queue.pop_front() {
            for p in &self.images {
                let h = p.compose(&g);
                if seen.insert(h.clone()) {
                    if seen.len() > limit {
                        return Err(Error::budget(limit, "enumerating a level quotient"));
                    }
                    queue.push_back(h);
                }
            }
            out.push(g);
        }
        out.sort();
        Ok(out)
    }

    pub fn order(&self, limit: usize) -> Result<usize> {
        Ok(self.elements(limit)?.len())
    }
}

/// The centralizer of a level quotient inside `Sym(V_n)`, by backtracking
/// over the images of orbit representatives. A centralizing permutation is
/// determined on an orbit by the image of its representative, through
/// `c(g·x) = g·c(x)`.
pub fn level_centralizer(quotient: &LevelQuotient, budget: usize) -> Result<Vec<Perm>> {
    let m = quotient.size();
    if m > CENTRALIZER_POINT_LIMIT {
        return Err(Error::Guard(format!(
            "level has {m} points, limit {CENTRALIZER_POINT_LIMIT}"
        )));
    }
    let gens = quotient.images();
    let orbits = quotient.orbits();
    // spanning tree of each orbit: (point, parent, generator) in BFS order
    let mut trees: Vec<Vec<(usize, usize, usize)>> = Vec::with_capacity(orbits.len());
    let mut orbit_of = vec![0usize; m];
    for (k, orbit) in orbits.iter().enumerate() {
        let root = orbit[0];
        let mut seen = HashSet::from([root]);
        let mut tree = Vec::with_capacity(orbit.len());
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            orbit_of[x] = k;
            for (gi, p) in gens.iter().enumerate() {
                let y = p.apply(x);
                if seen.insert(y) {
                    tree.push((y, x, gi));
                    queue.push_back(y);
                }
            }
        }
        trees.push(tree);
    }
    let mut search = CentralizerSearch {
        gens,
        orbits: &orbits,
        trees: &trees,
        orbit_of: &orbit_of,
        image: vec![None; m],
        used: vec![false; m],
        nodes: 0,
        budget,
        found: Vec::new(),
    };
    search.run(0)?;
    let mut found = search.found;
    found.sort();
    for c in &found {
        debug_assert!(gens.iter().all(|g| g.compose(c) == c.compose(g)));
    }
    Ok(found)
}

struct CentralizerSearch<'a> {
    gens: &'a [Perm],
    orbits: &'a [Vec<usize>],
    trees: &'a [Vec<(usize, usize, usize)>],
    orbit_of: &'a [usize],
    image: Vec<Option<usize>>,
    used: Vec<bool>,
    nodes: usize,
    budget: usize,
    found: Vec<Perm>,
}

impl CentralizerSearch<'_> {
    fn run(&mut self, k: usize) -> Result<()> {
        if k == self.orbits.len() {
            let images = self.image.iter().map(|y| y.unwrap() as u32).collect();
            self.found.push(Perm::from_images(images)?);
            return Ok(());
        }
        let orbit = &self.orbits[k];
        let rep = orbit[0];
        for y in 0..self.image.len() {
            if self.used[y] || self.orbits[self.orbit_of[y]].len() != orbit.len() {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::budget(self.budget, format!(
                    "centralizer backtracking, {} complete solutions so far",
                    self.found.len()
                )));
            }
            let mut assigned = Vec::with_capacity(orbit.len());
            if self.assign(rep, y, &mut assigned) && self.propagate(k, &mut assigned) {
                self.run(k + 1)?;
            }
            for x in assigned {
                let c = self.image[x].take().unwrap();
                self.used[c] = false;
            }
        }
        Ok(())
    }

    fn assign(&mut self, x: usize, y: usize, assigned: &mut Vec<usize>) -> bool {
        if self.used[y] {
            return false;
        }
        self.image[x] = Some(y);
        self.used[y] = true;
        assigned.push(x);
        true
    }

    fn propagate(&mut self, k: usize, assigned: &mut Vec<usize>) -> bool {
        for &(x, parent, gi) in &self.trees[k] {
            let y = self.gens[gi].apply(self.image[parent].unwrap());
            if !self.assign(x, y, assigned) {
                return false;
            }
        }
        self.orbits[k].iter().all(|&x| {
            let cx = self.image[x].unwrap();
            self.gens
                .iter()
                .all(|g| self.image[g.apply(x)] == Some(g.apply(cx)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grigorchuk_first_level() {
        let g = GroupSpec::builtin("grigorchuk").unwrap();
        let q = g.level_quotient(1);
        assert_eq!(q.image("a").unwrap(), &Perm::transposition(2, 0, 1));
        for n in ["b", "c", "d"] {
            assert!(q.image(n).unwrap().is_identity());
        }
        assert_eq!(g.level_quotient(0).size(), 1);
    }

    #[test]
    fn cycle_centralizer_is_the_cycle() {
        let q = LevelQuotient::from_images(Degree::new(2).unwrap(), 3, vec![Perm::cycle(8)])
            .unwrap();
        let c = level_centralizer(&q, 100_000).unwrap();
        let powers: Vec<Perm> = {
            let mut out = vec![Perm::identity(8)];
            for _ in 1..8 {
                out.push(out.last().unwrap().compose(&Perm::cycle(8)));
            }
            out.sort();
            out
        };
        assert_eq!(c, powers);
    }

    #[test]
    fn trivial_group_centralizer_is_symmetric_group() {
        let q = LevelQuotient::from_images(Degree::new(2).unwrap(), 1, vec![Perm::identity(2)])
            .unwrap();
        assert_eq!(level_centralizer(&q, 100).unwrap().len(), 2);
        let q3 = LevelQuotient::from_images(Degree::new(3).unwrap(), 1, vec![Perm::identity(3)])
            .unwrap();
        assert_eq!(level_centralizer(&q3, 1000).unwrap().len(), 6);
    }
}
