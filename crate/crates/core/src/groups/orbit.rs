use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;

use super::GroupSpec;
use crate::autom::{Automaton, GroupWord, Letter};
use crate::error::{Error, Result};
use crate::tree::{BoundaryPoint, Vertex};

/// `w·x` for an eventually periodic ray. The preperiod is walked letter by
/// letter; along the period the pair (section, position in period) is
/// tracked until it repeats, at which point the output is periodic too.
pub fn boundary_image(
    automaton: &Automaton,
    w: &GroupWord,
    x: &BoundaryPoint,
    budget: usize,
) -> Result<BoundaryPoint> {
    x.check_degree(automaton.degree())?;
    let pre = x.preperiod().letters();
    let per = x.period().letters();
    let mut out: Vec<u8> = Vec::with_capacity(pre.len() + per.len());
    let mut g = automaton.reduce(w.clone());
    for (i, &y) in pre.iter().enumerate() {
        if g.is_empty() {
            out.extend_from_slice(&pre[i..]);
            return BoundaryPoint::new(Vertex::from_letters(out), x.period().clone());
        }
        out.push(automaton.root_image(&g, y as usize) as u8);
        g = automaton.section(&g, y as usize);
    }
    let mut seen: HashMap<(GroupWord, usize), usize> = HashMap::new();
    let mut j = 0;
    loop {
        if g.is_empty() {
            let mut rotated = per[j..].to_vec();
            rotated.extend_from_slice(&per[..j]);
            return BoundaryPoint::new(Vertex::from_letters(out), Vertex::from_letters(rotated));
        }
        if let Some(&start) = seen.get(&(g.clone(), j)) {
            let period = out[start..].to_vec();
            out.truncate(start);
            return BoundaryPoint::new(Vertex::from_letters(out), Vertex::from_letters(period));
        }
        if seen.len() >= budget {
            return Err(Error::budget(budget, "following a ray through sections"));
        }
        seen.insert((g.clone(), j), out.len());
        let y = per[j] as usize;
        out.push(automaton.root_image(&g, y) as u8);
        g = automaton.section(&g, y);
        j = (j + 1) % per.len();
    }
}

/// Decides `w·x = x`.
pub fn stabilizes(
    automaton: &Automaton,
    w: &GroupWord,
    x: &BoundaryPoint,
    budget: usize,
) -> Result<bool> {
    Ok(boundary_image(automaton, w, x, budget)? == *x)
}

/// Index of the first letter where two rays differ, if any. Distinct
/// canonical rays differ before `max(preperiods) + lcm(periods)`.
pub fn first_difference(x: &BoundaryPoint, y: &BoundaryPoint) -> Option<usize> {
    let pre = x.preperiod().level().max(y.preperiod().level());
    let bound = pre + x.period().level().lcm(&y.period().level());
    (0..bound).find(|&i| x.letter(i) != y.letter(i))
}

/// A labelled edge `from --generator--> to` of a Schreier graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchreierEdge {
    pub from: usize,
    pub to: usize,
    pub generator: usize,
}

/// The ball of radius `r` around a point in its Schreier graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierBall {
    pub radius: usize,
    pub names: Vec<String>,
    /// Breadth-first order; node 0 is the centre.
    pub nodes: Vec<BoundaryPoint>,
    pub distance: Vec<usize>,
    /// Generator edges between ball nodes, sorted by source then generator.
    pub edges: Vec<SchreierEdge>,
}

impl SchreierBall {
    pub fn index_of(&self, x: &BoundaryPoint) -> Option<usize> {
        self.nodes.iter().position(|n| n == x)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph schreier {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{n}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}\"];",
                e.from, e.to, self.names[e.generator]
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first search from `x` with generators and their inverses.
pub fn orbit_ball(
    group: &GroupSpec,
    x: &BoundaryPoint,
    radius: usize,
    budget: usize,
) -> Result<SchreierBall> {
    let automaton = group.automaton();
    let n = automaton.generator_count();
    let mut letters: Vec<Letter> = (0..n).map(|g| Letter::new(g, false)).collect();
    letters.extend(
        (0..n)
            .filter(|&g| !automaton.is_involution(g))
            .map(|g| Letter::new(g, true)),
    );
    let image = |l: Letter, p: &BoundaryPoint| {
        boundary_image(automaton, &GroupWord::from_letters(vec![l]), p, budget)
    };
    let mut index: HashMap<BoundaryPoint, usize> = HashMap::new();
    let mut nodes = vec![x.clone()];
    let mut distance = vec![0];
    index.insert(x.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if distance[i] == radius {
            continue;
        }
        for &l in &letters {
            let y = image(l, &nodes[i].clone())?;
            if !index.contains_key(&y) {
                index.insert(y.clone(), nodes.len());
                nodes.push(y);
                distance.push(distance[i] + 1);
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    let mut edges = Vec::new();
    for (i, p) in nodes.iter().enumerate() {
        for g in 0..n {
            let y = image(Letter::new(g, false), p)?;
            if let Some(&j) = index.get(&y) {
                edges.push(SchreierEdge {
                    from: i,
                    to: j,
                    generator: g,
                });
            }
        }
    }
    Ok(SchreierBall {
        radius,
        names: automaton.names().map(String::from).collect(),
        nodes,
        distance,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autom::DEFAULT_SECTION_BUDGET;

    fn point(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    #[test]
    fn odometer_moves_zero_ray() {
        let g = GroupSpec::builtin("odometer2").unwrap();
        let a = g.automaton().parse_word("a").unwrap();
        let img = boundary_image(g.automaton(), &a, &point("(0)"), 100).unwrap();
        assert_eq!(img, point("1(0)"));
        assert_eq!(first_difference(&img, &point("(0)")), Some(0));
        // 111… + 1 = 000…
        let img = boundary_image(g.automaton(), &a, &point("(1)"), 100).unwrap();
        assert_eq!(img, point("(0)"));
    }

    #[test]
    fn grigorchuk_b_fixes_all_ones() {
        let g = GroupSpec::builtin("grigorchuk").unwrap();
        for w in ["b", "c", "d", "b c"] {
            let word = g.automaton().parse_word(w).unwrap();
            assert!(stabilizes(g.automaton(), &word, &point("(1)"), DEFAULT_SECTION_BUDGET).unwrap());
        }
        let a = g.automaton().parse_word("a").unwrap();
        assert!(!stabilizes(g.automaton(), &a, &point("(1)"), 100).unwrap());
    }

    #[test]
    fn odometer_ball_is_a_path() {
        let g = GroupSpec::builtin("odometer2").unwrap();
        let ball = orbit_ball(&g, &point("(0)"), 4, 1000).unwrap();
        assert_eq!(ball.nodes.len(), 9);
        assert_eq!(ball.edges.len(), 8);
        assert!(ball.to_dot().contains("label=\"1(0)\""));
    }

    #[test]
    fn trivial_group_ball_is_a_point() {
        let g = GroupSpec::trivial(crate::tree::Degree::new(2).unwrap()).unwrap();
        let ball = orbit_ball(&g, &point("(0)"), 3, 100).unwrap();
        assert_eq!(ball.nodes.len(), 1);
        assert_eq!(ball.edges.len(), 1);
    }
}
