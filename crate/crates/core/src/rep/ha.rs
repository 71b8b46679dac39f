use nalgebra::DMatrix;
use num_traits::ToPrimitive;

use super::linalg::fixed_space;
use crate::autom::{truncate, FinitaryAutomorphism, GroupWord};
use crate::error::{Error, Result};
use crate::groups::{support_fill, GroupSpec};
use crate::measure::BernoulliDistribution;
use crate::tree::{CylinderSet, Vertex};

/// `E_n κ_p(g) E_n` in the normalized basis of level-`n` cylinder functions,
/// where `E_n` is the conditional expectation onto them and `κ_p(g)` is
/// evaluated exactly on level-`m` cylinders, `m ≥ depth(g)`.
///
/// Entry `(w, u)` is `Σ √(μ_p(X_s) μ_p(X_{gs})) / √(μ_p(X_u) μ_p(X_w))` over
/// level-`m` vertices `s` below `u` with `gs` below `w`. The result is a
/// contraction whose fixed vectors are exactly the level-`n` functions fixed
/// by `κ_p(g)`.
pub fn compressed_koopman(
    g: &FinitaryAutomorphism,
    p: &BernoulliDistribution,
    n: usize,
    m: usize,
) -> Result<DMatrix<f64>> {
    g.degree().check(p.degree())?;
    if m < n || g.effective_depth() > m {
        return Err(Error::Precondition(format!(
            "compression level {m} must lie below level {n} and the depth {}",
            g.effective_depth()
        )));
    }
    let degree = g.degree();
    let size = degree.level_size(n);
    let mut out = DMatrix::zeros(size, size);
    let coarse: Vec<f64> = Vertex::level_vertices(degree, n)
        .map(|u| p.cylinder_measure(&u).to_f64().unwrap_or(f64::NAN))
        .collect();
    for s in Vertex::level_vertices(degree, m) {
        let gs = g.apply(&s);
        let u = s.prefix(n).index(degree);
        let w = gs.prefix(n).index(degree);
        let ratio = (p.cylinder_measure(&s) * p.cylinder_measure(&gs))
            .to_f64()
            .unwrap_or(f64::NAN);
        out[(w, u)] += (ratio / (coarse[u] * coarse[w])).sqrt();
    }
    Ok(out)
}

/// Fixed-space dimension after including the fill elements of the first
/// `steps` iterations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaRow {
    pub steps: usize,
    pub elements: usize,
    pub dim: usize,
    pub ill_conditioned: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaProfile {
    pub level: usize,
    pub resolution: usize,
    /// `|V_N ∖ refine(A, N)|`.
    pub predicted: usize,
    pub rows: Vec<HaRow>,
}

impl HaProfile {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].dim <= w[0].dim)
    }

    /// First number of steps at which the dimension equals the prediction.
    pub fn reached_at(&self) -> Option<usize> {
        self.rows.iter().find(|r| r.dim == self.predicted).map(|r| r.steps)
    }
}

/// Joint fixed space of compressed Koopman matrices of elements supported
/// in `A`: the support-filling iterates on `A` and on each level-`N`
/// cylinder of `A`, taken cumulatively for `0, 1, …, steps` iterations.
pub fn h_a_profile(
    group: &GroupSpec,
    region: &CylinderSet,
    p: &BernoulliDistribution,
    n: usize,
    steps: usize,
    extra: usize,
    budget: usize,
) -> Result<HaProfile> {
    group.degree().check(region.degree())?;
    let cells = region.refine(n)?;
    let size = group.degree().level_size(n);
    let predicted = size - cells.len();
    let resolution = n + extra;
    let mut fills: Vec<Vec<GroupWord>> = Vec::new();
    if !region.is_empty() {
        let mut parts = vec![region.clone()];
        if cells.len() > 1 {
            for u in &cells {
                parts.push(CylinderSet::cylinder(u.clone(), group.degree())?);
            }
        }
        for part in &parts {
            let fill = support_fill(group, part, p, steps, budget)?;
            fills.push(fill.steps.iter().map(|s| s.word.clone()).collect());
        }
    }
    let mut mats: Vec<DMatrix<f64>> = Vec::new();
    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        if i > 0 {
            for words in &fills {
                let w = &words[i];
                if w.is_empty() || words[..i].contains(w) {
                    continue;
                }
                let g = truncate(&group.element(w.clone()), resolution);
                mats.push(compressed_koopman(&g, p, n, resolution)?);
            }
        }
        let fixed = fixed_space(size, &mats)?;
        rows.push(HaRow {
            steps: i,
            elements: mats.len(),
            dim: fixed.dim(),
            ill_conditioned: fixed.ill_conditioned,
        });
    }
    Ok(HaProfile {
        level: n,
        resolution,
        predicted,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::tree::Degree;

    #[test]
    fn compression_of_level_map_is_its_matrix() {
        let d2 = Degree::new(2).unwrap();
        let p: BernoulliDistribution = "[1/3, 2/3]".parse().unwrap();
        let swap = FinitaryAutomorphism::at_vertex(d2, Vertex::root(), Perm::transposition(2, 0, 1)).unwrap();
        let c = compressed_koopman(&swap, &p, 1, 1).unwrap();
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        // at a finer resolution the off-diagonal mass is √(p0 p1)/√(p0 p1) summed over the subtree
        let fine = compressed_koopman(&swap, &p, 0, 3).unwrap();
        let expected = 2.0 * (2.0f64 / 9.0).sqrt();
        assert!((fine[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_region_keeps_everything() {
        let g = GroupSpec::builtin("grigorchuk").unwrap();
        let p: BernoulliDistribution = "[1/3, 2/3]".parse().unwrap();
        let profile = h_a_profile(&g, &CylinderSet::empty(g.degree()), &p, 2, 2, 4, 2000).unwrap();
        assert!(profile.rows.iter().all(|r| r.dim == 4));
        assert_eq!(profile.reached_at(), Some(0));
    }
}
