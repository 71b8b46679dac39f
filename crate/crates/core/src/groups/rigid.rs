use std::collections::HashSet;
use std::fmt;

use num_rational::BigRational;

use super::GroupSpec;
use crate::autom::{apply_vertex, support_cylinders, Automaton, GroupWord, Letter};
use crate::error::{Error, Result};
use crate::measure::BernoulliDistribution;
use crate::tree::{CylinderSet, Vertex};

/// Default number of candidate words examined by the rigid searches.
pub const DEFAULT_SEARCH_BUDGET: usize = 2_000;

/// How a rigid element was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RigidOrigin {
    /// Breadth-first search over short words and commutators.
    Search,
    /// Lifted from the root through the branching data of the group.
    BranchLift,
    /// Conjugate of another rigid element by a word fixing the vertex.
    Conjugate,
}

impl fmt::Display for RigidOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RigidOrigin::Search => "search",
            RigidOrigin::BranchLift => "branch-lift",
            RigidOrigin::Conjugate => "conjugate",
        })
    }
}

/// A nontrivial element supported in `X_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidElement {
    pub vertex: Vertex,
    pub word: GroupWord,
    pub origin: RigidOrigin,
    /// Depth to which the truncations were checked to move nothing outside
    /// `T_v`, on top of the exact section certificate.
    pub certified_depth: usize,
}

/// A rigid element with a certified lower bound on the measure of its
/// support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodRigidElement {
    pub rigid: RigidElement,
    /// `μ_p(M_N(g))` at the certification depth `N`.
    pub support_lower_bound: BigRational,
    pub cylinder_measure: BigRational,
    pub certification_depth: usize,
}

/// Exact test of `g ≠ 1` and `supp(g) ⊆ X_v`: every section along the path
/// to `v` fixes the first level, every section leaving the path is the
/// identity, and the section at `v` is nontrivial.
pub fn certify_rigid(automaton: &Automaton, w: &GroupWord, v: &Vertex) -> Result<bool> {
    let d = automaton.degree().get();
    let mut g = automaton.reduce(w.clone());
    for &x in v.letters() {
        if g.is_empty() {
            return Ok(false);
        }
        if (0..d).any(|y| automaton.root_image(&g, y) != y) {
            return Ok(false);
        }
        for y in (0..d).filter(|&y| y != x as usize) {
            if !automaton.is_trivial(&automaton.section(&g, y))? {
                return Ok(false);
            }
        }
        g = automaton.section(&g, x as usize);
    }
    Ok(!automaton.is_trivial(&g)?)
}

/// Default certification depth for a vertex.
pub fn certification_depth(v: &Vertex) -> usize {
    8.max(2 * v.level())
}

/// Reduced words in length-lexicographic order, without repetitions of
/// reduced forms, the identity first.
pub(crate) fn reduced_words(automaton: &Automaton, max_len: usize, cap: usize) -> Vec<GroupWord> {
    let letters: Vec<Letter> = automaton
        .all_letters()
        .into_iter()
        .filter(|&l| automaton.canonical_letter(l) == l)
        .collect();
    let mut seen: HashSet<GroupWord> = HashSet::from([GroupWord::identity()]);
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut letters = w.letters().to_vec();
                letters.push(l);
                let r = automaton.reduce(GroupWord::from_letters(letters));
                if r.len() == len && seen.insert(r.clone()) {
                    next.push(r.clone());
                    out.push(r);
                    if out.len() >= cap {
                        return out;
                    }
                }
            }
        }
        layer = next;
    }
    out
}

/// A product `Π c_j t^{±1} c_j⁻¹` of conjugates of the branching element.
type ConjProduct = Vec<(GroupWord, bool)>;

/// Data witnessing that the group branches over the normal closure of an
/// element `t`: for every first-level position `i`, an explicit product of
/// conjugates of `t` whose wreath recursion is `t` at `i` and trivial
/// elsewhere, and for every generator `s` a first-level stabilizing word
/// whose section at `i` equals `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchData {
    pub t: GroupWord,
    unit_lifts: Vec<ConjProduct>,
    letter_lifts: Vec<Vec<GroupWord>>,
}

impl BranchData {
    /// Searches short words for branching data. Returns `None` when nothing
    /// is found within the budget, which does not prove the group is not
    /// branch.
    pub fn discover(automaton: &Automaton, budget: usize) -> Result<Option<BranchData>> {
        let d = automaton.degree().get();
        let words = reduced_words(automaton, 5, budget.max(64));
        let mut letter_lifts = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(automaton.generator_count());
            for s in 0..automaton.generator_count() {
                let target = GroupWord::generator(s).inverse();
                let mut found = None;
                for w in &words {
                    if !automaton.root_perm(w).is_identity() {
                        continue;
                    }
                    let probe = automaton.section(w, i).concat(&target);
                    if automaton.is_trivial(&probe)? {
                        found = Some(w.clone());
                        break;
                    }
                }
                match found {
                    Some(w) => row.push(w),
                    None => return Ok(None),
                }
            }
            letter_lifts.push(row);
        }
        let mut data = BranchData {
            t: GroupWord::identity(),
            unit_lifts: Vec::new(),
            letter_lifts,
        };
        let short: Vec<&GroupWord> = words.iter().filter(|w| w.len() <= 2).collect();
        let mut tested = 0usize;
        for t in words.iter().filter(|w| !w.is_empty() && w.len() <= 4) {
            if automaton.is_trivial(t)? {
                continue;
            }
            for c in &short {
                for w in &short {
                    tested += 1;
                    if tested > budget * 8 {
                        return Ok(None);
                    }
                    let candidate: ConjProduct = vec![((*c).clone(), false), (w.concat(c), true)];
                    if let Some(units) = data.try_units(automaton, t, &candidate, &words)? {
                        data.t = t.clone();
                        data.unit_lifts = units;
                        return Ok(Some(data));
                    }
                }
            }
        }
        Ok(None)
    }

    fn try_units(
        &self,
        automaton: &Automaton,
        t: &GroupWord,
        candidate: &ConjProduct,
        words: &[GroupWord],
    ) -> Result<Option<Vec<ConjProduct>>> {
        let d = automaton.degree().get();
        let b = flatten(automaton, t, candidate);
        if b.is_empty() || !automaton.root_perm(&b).is_identity() {
            return Ok(None);
        }
        let mut live = None;
        for i in 0..d {
            if !automaton.is_trivial(&automaton.section(&b, i))? {
                if live.is_some() {
                    return Ok(None);
                }
                live = Some(i);
            }
        }
        let Some(i0) = live else { return Ok(None) };
        let s = automaton.section(&b, i0);
        let mut base: Option<ConjProduct> = None;
        'outer: for e in words.iter().filter(|w| w.len() <= 2) {
            for inverse in [false, true] {
                // s = e t^{±1} e⁻¹ ?
                let te = if inverse { t.clone() } else { t.inverse() };
                let probe = s.concat(e).concat(&te).concat(&e.inverse());
                if automaton.is_trivial(&probe)? {
                    let oriented = if inverse {
                        invert(candidate)
                    } else {
                        candidate.clone()
                    };
                    let l = self.lift_word(automaton, i0, e).inverse();
                    base = Some(conjugate(automaton, &l, &oriented));
                    break 'outer;
                }
            }
        }
        let Some(base) = base else { return Ok(None) };
        let mut units = vec![Vec::new(); d];
        for (j, slot) in units.iter_mut().enumerate() {
            let Some(r) = words.iter().find(|r| automaton.root_image(r, i0) == j) else {
                return Ok(None);
            };
            let moved = conjugate(automaton, r, &base);
            let rs = automaton.section(r, i0);
            let l = self.lift_word(automaton, j, &rs).inverse();
            let unit = conjugate(automaton, &l, &moved);
            if !is_unit_at(automaton, t, &unit, j)? {
                return Ok(None);
            }
            *slot = unit;
        }
        Ok(Some(units))
    }

    /// A first-level stabilizing word whose section at `i` equals `w`.
    fn lift_word(&self, automaton: &Automaton, i: usize, w: &GroupWord) -> GroupWord {
        let mut out = Vec::new();
        for &l in w.letters() {
            let base = &self.letter_lifts[i][l.generator()];
            if l.is_inverse() {
                out.extend_from_slice(base.inverse().letters());
            } else {
                out.extend_from_slice(base.letters());
            }
        }
        automaton.reduce(GroupWord::from_letters(out))
    }

    fn lift_once(&self, automaton: &Automaton, r: &ConjProduct, i: usize) -> ConjProduct {
        let mut out = Vec::new();
        for (c, inv) in r {
            let lc = self.lift_word(automaton, i, c);
            let unit = if *inv {
                invert(&self.unit_lifts[i])
            } else {
                self.unit_lifts[i].clone()
            };
            out.extend(conjugate(automaton, &lc, &unit));
        }
        out
    }

    /// A word for an element with section `t` at `v` and trivial sections
    /// at every other vertex of the same level.
    pub fn lift(&self, automaton: &Automaton, v: &Vertex) -> GroupWord {
        let mut r: ConjProduct = vec![(GroupWord::identity(), false)];
        for &x in v.letters().iter().rev() {
            r = self.lift_once(automaton, &r, x as usize);
        }
        flatten(automaton, &self.t, &r)
    }
}

fn invert(p: &ConjProduct) -> ConjProduct {
    p.iter().rev().map(|(c, inv)| (c.clone(), !inv)).collect()
}

fn conjugate(automaton: &Automaton, h: &GroupWord, p: &ConjProduct) -> ConjProduct {
    p.iter()
        .map(|(c, inv)| (automaton.reduce(h.concat(c)), *inv))
        .collect()
}

fn flatten(automaton: &Automaton, t: &GroupWord, p: &ConjProduct) -> GroupWord {
    let t_inv = t.inverse();
    let mut out = Vec::new();
    for (c, inv) in p {
        out.extend_from_slice(c.letters());
        out.extend_from_slice(if *inv { t_inv.letters() } else { t.letters() });
        out.extend_from_slice(c.inverse().letters());
    }
    automaton.reduce(GroupWord::from_letters(out))
}

fn is_unit_at(automaton: &Automaton, t: &GroupWord, p: &ConjProduct, j: usize) -> Result<bool> {
    let w = flatten(automaton, t, p);
    if !automaton.root_perm(&w).is_identity() {
        return Ok(false);
    }
    for i in 0..automaton.degree().get() {
        let s = automaton.section(&w, i);
        let probe = if i == j { s.concat(&t.inverse()) } else { s };
        if !automaton.is_trivial(&probe)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn truncation_check(group: &GroupSpec, w: &GroupWord, v: &Vertex, depth: usize) -> Result<bool> {
    let g = group.element(w.clone());
    let moved = support_cylinders(&g, depth)?;
    let cyl = CylinderSet::cylinder(v.clone(), group.degree())?;
    Ok(moved.is_subset(&cyl))
}

fn certified(
    group: &GroupSpec,
    w: GroupWord,
    v: &Vertex,
    origin: RigidOrigin,
) -> Result<Option<RigidElement>> {
    if !certify_rigid(group.automaton(), &w, v)? {
        return Ok(None);
    }
    let depth = certification_depth(v);
    if !truncation_check(group, &w, v, depth)? {
        return Ok(None);
    }
    Ok(Some(RigidElement {
        vertex: v.clone(),
        word: w,
        origin,
        certified_depth: depth,
    }))
}

/// Finds a nontrivial element supported in `X_v`: first among commutators of
/// short words and short words themselves, then by lifting the branching
/// element of the group to `v`. Every result carries an exact certificate.
pub fn rigid_element_search(group: &GroupSpec, v: &Vertex, budget: usize) -> Result<RigidElement> {
    let automaton = group.automaton();
    Vertex::new(v.letters().to_vec(), group.degree())?;
    let words = reduced_words(automaton, 8, budget);
    for w in words.iter().filter(|w| w.len() == 1) {
        if let Some(found) = certified(group, w.clone(), v, RigidOrigin::Search)? {
            return Ok(found);
        }
    }
    let mut tested = 0usize;
    let short: Vec<&GroupWord> = words.iter().filter(|w| w.len() <= 3).collect();
    for a in &short {
        for b in &short {
            if tested >= budget {
                break;
            }
            tested += 1;
            let c = automaton.reduce(GroupWord::commutator(a, b));
            if c.is_empty() {
                continue;
            }
            if let Some(found) = certified(group, c, v, RigidOrigin::Search)? {
                return Ok(found);
            }
        }
    }
    for w in words.iter().filter(|w| w.len() > 1) {
        if let Some(found) = certified(group, w.clone(), v, RigidOrigin::Search)? {
            return Ok(found);
        }
    }
    if let Some(data) = group.branch_data(budget)? {
        let w = data.lift(automaton, v);
        if let Some(found) = certified(group, w, v, RigidOrigin::BranchLift)? {
            return Ok(found);
        }
    }
    Err(Error::NotFound(format!(
        "no rigid element at '{v}' within {budget} candidates"
    )))
}

/// A certified rigid element at `v`, taking the branch lift when the group
/// has branching data and falling back to the word search otherwise.
pub(crate) fn certified_rigid_at(group: &GroupSpec, v: &Vertex, budget: usize) -> Result<RigidElement> {
    if let Some(data) = group.branch_data(budget)? {
        let w = data.lift(group.automaton(), v);
        if let Some(found) = certified(group, w, v, RigidOrigin::BranchLift)? {
            return Ok(found);
        }
    }
    rigid_element_search(group, v, budget)
}

/// A rigid element at `v` with `μ_p(supp g) ≥ μ_p(X_v)/d`, certified by the
/// exact measure of the moved cylinders at the certification depth.
pub fn good_rigid_element(
    group: &GroupSpec,
    v: &Vertex,
    p: &BernoulliDistribution,
    budget: usize,
) -> Result<GoodRigidElement> {
    group.degree().check(p.degree())?;
    let automaton = group.automaton();
    let depth = certification_depth(v);
    let cylinder_measure = p.cylinder_measure(v);
    let target = &cylinder_measure / BigRational::from_integer(group.degree().get().into());
    let mut candidates: Vec<RigidElement> = Vec::new();
    if let Ok(found) = rigid_element_search(group, v, budget) {
        candidates.push(found);
    }
    if let Some(data) = group.branch_data(budget)? {
        let w = data.lift(automaton, v);
        if let Some(found) = certified(group, w, v, RigidOrigin::BranchLift)? {
            candidates.push(found);
        }
    }
    if candidates.is_empty() {
        return Err(Error::NotFound(format!("no rigid element at '{v}'")));
    }
    let evaluate = |r: &RigidElement| -> Result<BigRational> {
        let moved = support_cylinders(&group.element(r.word.clone()), depth)?;
        p.set_measure(&moved)
    };
    // the largest certified support wins; shorter words break ties
    let mut best: Option<(BigRational, &RigidElement)> = None;
    for r in &candidates {
        let bound = evaluate(r)?;
        let better = match &best {
            None => true,
            Some((b, cur)) => bound > *b || (bound == *b && r.word.len() < cur.word.len()),
        };
        if better {
            best = Some((bound, r));
        }
    }
    if let Some((bound, r)) = best {
        if bound >= target {
            return Ok(GoodRigidElement {
                rigid: r.clone(),
                support_lower_bound: bound,
                cylinder_measure,
                certification_depth: depth,
            });
        }
    }
    // conjugates by short words fixing v keep the support inside X_v
    let fixers: Vec<GroupWord> = reduced_words(automaton, 4, budget)
        .into_iter()
        .filter(|h| !h.is_empty() && apply_vertex(&group.element(h.clone()), v) == *v)
        .collect();
    for r in &candidates {
        for h in &fixers {
            let w = automaton.reduce(h.concat(&r.word).concat(&h.inverse()));
            let conj = RigidElement {
                vertex: v.clone(),
                word: w,
                origin: RigidOrigin::Conjugate,
                certified_depth: r.certified_depth,
            };
            let bound = evaluate(&conj)?;
            if bound >= target {
                return Ok(GoodRigidElement {
                    rigid: conj,
                    support_lower_bound: bound,
                    cylinder_measure,
                    certification_depth: depth,
                });
            }
        }
    }
    Err(Error::NotFound(format!(
        "no rigid element at '{v}' with support measure ≥ {target} at depth {depth}"
    )))
}
