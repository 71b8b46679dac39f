use nalgebra::DMatrix;

use crate::autom::{GroupWord, Letter};
use crate::error::Result;
use crate::groups::{boundary_image, orbit_ball, GroupSpec, SchreierBall};

/// `ρ_x` restricted to a Schreier ball: for each generator `s` a partial
/// permutation sending node `j` to the node `s·x_j`, when that stays in the
/// ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierBallRep {
    pub ball: SchreierBall,
    /// `images[s][j]`.
    pub images: Vec<Vec<Option<usize>>>,
}

impl SchreierBallRep {
    pub fn size(&self) -> usize {
        self.ball.nodes.len()
    }

    /// 0/1 matrix of generator `s`: column `j` has a 1 in row `s·x_j`.
    pub fn matrix(&self, s: usize) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (j, img) in self.images[s].iter().enumerate() {
            if let Some(i) = img {
                m[(*i, j)] = 1.0;
            }
        }
        m
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        (0..self.images.len()).map(|s| self.matrix(s)).collect()
    }

    /// For every ordered pair of generators and every node where both steps
    /// stay in the ball, the product of the matrices agrees with the action
    /// of the two-letter word.
    pub fn composition_consistent(&self, group: &GroupSpec, budget: usize) -> Result<bool> {
        let automaton = group.automaton();
        for s in 0..self.images.len() {
            for t in 0..self.images.len() {
                let word = GroupWord::from_letters(vec![Letter::new(s, false), Letter::new(t, false)]);
                for j in 0..self.size() {
                    let Some(k) = self.images[t][j] else { continue };
                    let Some(i) = self.images[s][k] else { continue };
                    let direct = boundary_image(automaton, &word, &self.ball.nodes[j], budget)?;
                    if direct != self.ball.nodes[i] {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Builds the ball by [`orbit_ball`] and reads the generator matrices off
/// its edges.
pub fn quasi_regular_matrices(
    group: &GroupSpec,
    x: &crate::tree::BoundaryPoint,
    radius: usize,
    budget: usize,
) -> Result<SchreierBallRep> {
    let ball = orbit_ball(group, x, radius, budget)?;
    let mut images = vec![vec![None; ball.nodes.len()]; group.generator_count()];
    for e in &ball.edges {
        images[e.generator][e.from] = Some(e.to);
    }
    Ok(SchreierBallRep { ball, images })
}
