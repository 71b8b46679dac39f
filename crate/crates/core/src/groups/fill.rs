use num_rational::BigRational;
use num_traits::{One, Zero};

use super::rigid::{certification_depth, good_rigid_element};
use super::GroupSpec;
use crate::autom::{ng_profile, support_cylinders, support_profile, GroupWord};
use crate::error::{Error, Result};
use crate::measure::BernoulliDistribution;
use crate::tree::{CylinderSet, Vertex};

/// Deepest level the filling procedures walk to before giving up.
pub const MAX_RUN_DEPTH: usize = 24;

/// One iterate `g_i` of the support-filling sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillStep {
    pub index: usize,
    pub word: GroupWord,
    /// `μ_p(A ∖ M_N(g_i))`, an upper bound for `μ_p(A ∖ supp g_i)`.
    pub residual: BigRational,
    /// `(d/(d+1))^i · μ_p(A)`.
    pub rate_bound: BigRational,
    /// Level `N` at which the residual was measured.
    pub depth: usize,
    /// Cylinders that received a rigid element to form `g_{i+1}`.
    pub filled: Vec<Vertex>,
}

impl FillStep {
    pub fn within_rate(&self) -> bool {
        self.residual <= self.rate_bound
    }
}

/// The sequence `g_0 = 1, g_1, …, g_n` with `supp g_i ⊆ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportFill {
    pub region: CylinderSet,
    pub region_measure: BigRational,
    pub steps: Vec<FillStep>,
}

impl SupportFill {
    pub fn last(&self) -> &FillStep {
        self.steps.last().expect("at least g_0")
    }

    pub fn all_within_rate(&self) -> bool {
        self.steps.iter().all(FillStep::within_rate)
    }
}

/// Builds `g_{i+1} = g_i h_1 ⋯ h_k`, where the `h_j` are good rigid elements
/// in maximal cylinders of `A` fixed pointwise by `g_i`, chosen greedily by
/// measure until they cover `d/(d+1)` of the residual.
pub fn support_fill(
    group: &GroupSpec,
    region: &CylinderSet,
    p: &BernoulliDistribution,
    steps: usize,
    budget: usize,
) -> Result<SupportFill> {
    group.degree().check(region.degree())?;
    group.degree().check(p.degree())?;
    if region.is_empty() {
        return Err(Error::Precondition("support filling needs a nonempty region".into()));
    }
    let d = group.degree().get();
    let region_measure = p.set_measure(region)?;
    let ratio = BigRational::new(d.into(), (d + 1).into());
    let automaton = group.automaton();
    let mut depth = certification_depth(&deepest(region));
    let mut word = GroupWord::identity();
    let mut rate = region_measure.clone();
    let mut out = Vec::with_capacity(steps + 1);
    for index in 0..=steps {
        let (profile, residual) = loop {
            let profile = support_profile(&group.element(word.clone()), region, depth)?;
            let moved: BigRational = profile.moved.iter().map(|v| p.cylinder_measure(v)).sum();
            let residual = &region_measure - moved;
            let free: BigRational = profile.free.iter().map(|v| p.cylinder_measure(v)).sum();
            if index == steps || free >= &ratio * &residual || depth + 2 > MAX_RUN_DEPTH {
                break (profile, residual);
            }
            depth += 2;
        };
        let mut step = FillStep {
            index,
            word: word.clone(),
            residual: residual.clone(),
            rate_bound: rate.clone(),
            depth,
            filled: Vec::new(),
        };
        if index == steps || residual.is_zero() {
            out.push(step);
            rate = &rate * &ratio;
            continue;
        }
        let target = &ratio * &residual;
        let chosen = greedy_cover(&profile.free, p, &target).ok_or_else(|| Error::StepStall {
            step: index,
            reason: format!(
                "free cylinders at depth {depth} cover less than {ratio} of the residual {residual}"
            ),
        })?;
        let mut next = word.letters().to_vec();
        for v in &chosen {
            let h = good_rigid_element(group, v, p, budget)?;
            depth = depth.max(h.certification_depth);
            next.extend_from_slice(h.rigid.word.letters());
        }
        word = automaton.reduce(GroupWord::from_letters(next));
        step.filled = chosen;
        out.push(step);
        rate = &rate * &ratio;
    }
    Ok(SupportFill {
        region: region.clone(),
        region_measure,
        steps: out,
    })
}

fn deepest(region: &CylinderSet) -> Vertex {
    region
        .vertices()
        .max_by_key(|v| v.level())
        .cloned()
        .unwrap_or_else(Vertex::root)
}

/// Largest cylinders first, lexicographic among equal measures, until the
/// target is reached.
fn greedy_cover(
    free: &[Vertex],
    p: &BernoulliDistribution,
    target: &BigRational,
) -> Option<Vec<Vertex>> {
    let mut ranked: Vec<(BigRational, &Vertex)> =
        free.iter().map(|v| (p.cylinder_measure(v), v)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let mut covered = BigRational::zero();
    let mut chosen = Vec::new();
    for (m, v) in ranked {
        if covered >= *target {
            break;
        }
        covered += m;
        chosen.push(v.clone());
    }
    (covered >= *target).then_some(chosen)
}

/// Result of the `N_g` boosting construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoostResult {
    pub word: GroupWord,
    pub k: usize,
    pub epsilon: BigRational,
    pub region_measure: BigRational,
    /// `μ_p` of the level-`N` cylinders of `A` on which `N_g ≥ k` is certified.
    pub census: BigRational,
    /// `(1 − ε) μ_p(A)`.
    pub threshold: BigRational,
    pub certification_depth: usize,
    /// Number of cylinders filled at each stage `j = 0, …, k−1`.
    pub stage_fills: Vec<usize>,
}

impl BoostResult {
    pub fn holds(&self) -> bool {
        self.census > self.threshold
    }
}

/// Produces `g` with `supp g ⊆ A` and `μ_p{N_g ≥ k} > (1 − ε) μ_p(A)`.
///
/// Stage `j` walks the current `g` down to a truncation level `m` and, in
/// every cylinder `X_u ⊆ A` where `g` acts trivially and `N_g = j`, fills
/// the cylinder with rigid elements `h_u`. Since `h_u` fixes every vertex
/// outside `T_u` and the section of `g` at `u` is trivial, `N_{g h}` gains
/// `N_{h_u}` on `X_u` and is unchanged elsewhere.
pub fn n_g_boost(
    group: &GroupSpec,
    region: &CylinderSet,
    p: &BernoulliDistribution,
    k: usize,
    epsilon: &BigRational,
    budget: usize,
) -> Result<BoostResult> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if *epsilon <= BigRational::zero() || *epsilon >= BigRational::one() {
        return Err(Error::Precondition(format!("epsilon {epsilon} not in (0,1)")));
    }
    group.degree().check(region.degree())?;
    let d = group.degree().get();
    let region_measure = p.set_measure(region)?;
    let share = epsilon / BigRational::from_integer((2 * k).into());
    let loss_cap = &share * &region_measure;
    // fill steps so that (d/(d+1))^s ≤ share
    let ratio = BigRational::new(d.into(), (d + 1).into());
    let mut fill_steps = 0usize;
    let mut power = BigRational::one();
    while power > share {
        power = &power * &ratio;
        fill_steps += 1;
    }
    let automaton = group.automaton();
    let mut word = GroupWord::identity();
    let mut stage_fills = Vec::with_capacity(k);
    let base_depth = certification_depth(&deepest(region));
    let mut depth = base_depth;
    for j in 0..k {
        let g = group.element(word.clone());
        let mut m = region.max_level();
        let profile = loop {
            let profile = ng_profile(&g, region, m)?;
            let open: BigRational = profile.open.iter().map(|(v, _)| p.cylinder_measure(v)).sum();
            if open <= loss_cap || m >= MAX_RUN_DEPTH {
                break profile;
            }
            m += 1;
        };
        let targets: Vec<Vertex> = profile
            .exact
            .iter()
            .filter(|(_, c)| *c == j)
            .map(|(v, _)| v.clone())
            .collect();
        let mut next = word.letters().to_vec();
        for u in &targets {
            let cyl = CylinderSet::cylinder(u.clone(), group.degree())?;
            let fill = support_fill(group, &cyl, p, fill_steps, budget)?;
            let last = fill.last();
            depth = depth.max(last.depth);
            next.extend_from_slice(last.word.letters());
        }
        word = automaton.reduce(GroupWord::from_letters(next));
        stage_fills.push(targets.len());
    }
    let g = group.element(word.clone());
    let support = support_cylinders(&g, depth)?;
    if !support.is_subset(region) {
        return Err(Error::Precondition(format!(
            "constructed element moves points outside the region at depth {depth}"
        )));
    }
    let profile = ng_profile(&g, region, depth)?;
    let census: BigRational = profile.at_least(k).map(|v| p.cylinder_measure(v)).sum();
    let threshold = (BigRational::one() - epsilon) * &region_measure;
    Ok(BoostResult {
        word,
        k,
        epsilon: epsilon.clone(),
        region_measure,
        census,
        threshold,
        certification_depth: depth,
        stage_fills,
    })
}
