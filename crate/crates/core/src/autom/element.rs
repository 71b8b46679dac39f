use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::automaton::{Automaton, GroupWord};
use super::finitary::FinitaryAutomorphism;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::{CylinderSet, Degree, Vertex};

/// A group word evaluated in a fixed automaton family.
#[derive(Clone)]
pub struct AutomatonElement {
    automaton: Arc<Automaton>,
    word: GroupWord,
}

impl AutomatonElement {
    pub fn new(automaton: Arc<Automaton>, word: GroupWord) -> Result<Self> {
        if let Some(l) = word
            .letters()
            .iter()
            .find(|l| l.generator() >= automaton.generator_count())
        {
            return Err(Error::Precondition(format!(
                "word references undeclared generator #{}",
                l.generator()
            )));
        }
        let word = automaton.reduce(word);
        Ok(AutomatonElement { automaton, word })
    }

    pub fn identity(automaton: Arc<Automaton>) -> Self {
        AutomatonElement {
            automaton,
            word: GroupWord::identity(),
        }
    }

    pub fn automaton(&self) -> &Arc<Automaton> {
        &self.automaton
    }

    pub fn word(&self) -> &GroupWord {
        &self.word
    }

    pub fn compose(&self, other: &AutomatonElement) -> Result<AutomatonElement> {
        if !Arc::ptr_eq(&self.automaton, &other.automaton) {
            return Err(Error::AutomatonMismatch);
        }
        Ok(AutomatonElement {
            word: self.automaton.reduce(self.word.concat(&other.word)),
            automaton: self.automaton.clone(),
        })
    }

    pub fn inverse(&self) -> AutomatonElement {
        AutomatonElement {
            word: self.automaton.reduce(self.word.inverse()),
            automaton: self.automaton.clone(),
        }
    }

    pub fn conjugate_by(&self, h: &AutomatonElement) -> Result<AutomatonElement> {
        h.compose(self)?.compose(&h.inverse())
    }

    pub fn is_identity(&self) -> Result<bool> {
        self.automaton.is_trivial(&self.word)
    }
}

impl PartialEq for AutomatonElement {
    /// Syntactic equality of reduced words in the same automaton.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.automaton, &other.automaton) && self.word == other.word
    }
}

impl Eq for AutomatonElement {}

impl fmt::Debug for AutomatonElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.automaton.format_word(&self.word))
    }
}

impl fmt::Display for AutomatonElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.automaton.format_word(&self.word))
    }
}

/// Recursive access to an automorphism through its root permutation and
/// first-level sections.
pub trait SectionTree: Sized + Clone {
    fn degree(&self) -> Degree;
    fn root_image(&self, x: usize) -> usize;
    fn child_section(&self, x: usize) -> Self;
    /// Certified identity test; may fail on budget.
    fn is_identity(&self) -> Result<bool>;
    /// Cheap syntactic check; `true` implies the identity.
    fn is_trivially_identity(&self) -> bool;

    fn root_perm(&self) -> Perm {
        let images = (0..self.degree().get())
            .map(|x| self.root_image(x) as u32)
            .collect();
        Perm::from_images(images).expect("root action is a permutation")
    }

    fn root_active(&self) -> bool {
        (0..self.degree().get()).any(|x| self.root_image(x) != x)
    }
}

impl SectionTree for FinitaryAutomorphism {
    fn degree(&self) -> Degree {
        FinitaryAutomorphism::degree(self)
    }
    fn root_image(&self, x: usize) -> usize {
        self.image_at(&Vertex::root(), x)
    }
    fn child_section(&self, x: usize) -> Self {
        self.section(&Vertex::from_letters(vec![x as u8]))
    }
    fn is_identity(&self) -> Result<bool> {
        Ok(FinitaryAutomorphism::is_identity(self))
    }
    fn is_trivially_identity(&self) -> bool {
        FinitaryAutomorphism::is_identity(self)
    }
}

impl SectionTree for AutomatonElement {
    fn degree(&self) -> Degree {
        self.automaton.degree()
    }
    fn root_image(&self, x: usize) -> usize {
        self.automaton.root_image(&self.word, x)
    }
    fn child_section(&self, x: usize) -> Self {
        AutomatonElement {
            word: self.automaton.section(&self.word, x),
            automaton: self.automaton.clone(),
        }
    }
    fn is_identity(&self) -> Result<bool> {
        AutomatonElement::is_identity(self)
    }
    fn is_trivially_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// An automorphism of the regular rooted tree: either a finitary portrait
/// or a word over an automaton family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeAutomorphism {
    Finitary(FinitaryAutomorphism),
    Word(AutomatonElement),
}

impl From<FinitaryAutomorphism> for TreeAutomorphism {
    fn from(g: FinitaryAutomorphism) -> Self {
        TreeAutomorphism::Finitary(g)
    }
}

impl From<AutomatonElement> for TreeAutomorphism {
    fn from(g: AutomatonElement) -> Self {
        TreeAutomorphism::Word(g)
    }
}

impl fmt::Display for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeAutomorphism::Finitary(g) => {
                let items: Vec<String> = g.portrait().map(|(v, p)| format!("{v}:{p}")).collect();
                write!(f, "finitary{{{}}}", items.join(" "))
            }
            TreeAutomorphism::Word(w) => write!(f, "{w}"),
        }
    }
}

impl SectionTree for TreeAutomorphism {
    fn degree(&self) -> Degree {
        match self {
            TreeAutomorphism::Finitary(g) => SectionTree::degree(g),
            TreeAutomorphism::Word(g) => SectionTree::degree(g),
        }
    }
    fn root_image(&self, x: usize) -> usize {
        match self {
            TreeAutomorphism::Finitary(g) => SectionTree::root_image(g, x),
            TreeAutomorphism::Word(g) => SectionTree::root_image(g, x),
        }
    }
    fn child_section(&self, x: usize) -> Self {
        match self {
            TreeAutomorphism::Finitary(g) => TreeAutomorphism::Finitary(g.child_section(x)),
            TreeAutomorphism::Word(g) => TreeAutomorphism::Word(g.child_section(x)),
        }
    }
    fn is_identity(&self) -> Result<bool> {
        match self {
            TreeAutomorphism::Finitary(g) => SectionTree::is_identity(g),
            TreeAutomorphism::Word(g) => SectionTree::is_identity(g),
        }
    }
    fn is_trivially_identity(&self) -> bool {
        match self {
            TreeAutomorphism::Finitary(g) => g.is_trivially_identity(),
            TreeAutomorphism::Word(g) => g.is_trivially_identity(),
        }
    }
}

impl TreeAutomorphism {
    pub fn identity(degree: Degree) -> Self {
        TreeAutomorphism::Finitary(FinitaryAutomorphism::identity(degree))
    }

    pub fn apply_vertex(&self, v: &Vertex) -> Vertex {
        apply_vertex(self, v)
    }

    pub fn section(&self, v: &Vertex) -> TreeAutomorphism {
        match self {
            TreeAutomorphism::Finitary(g) => TreeAutomorphism::Finitary(g.section(v)),
            TreeAutomorphism::Word(_) => section(self, v),
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &TreeAutomorphism) -> Result<TreeAutomorphism> {
        SectionTree::degree(self).check(SectionTree::degree(other))?;
        match (self, other) {
            (TreeAutomorphism::Finitary(g), TreeAutomorphism::Finitary(h)) => {
                Ok(TreeAutomorphism::Finitary(g.compose(h)?))
            }
            (TreeAutomorphism::Word(g), TreeAutomorphism::Word(h)) => {
                Ok(TreeAutomorphism::Word(g.compose(h)?))
            }
            // the identity portrait composes with anything
            (TreeAutomorphism::Finitary(g), h) if g.is_identity() => Ok(h.clone()),
            (g, TreeAutomorphism::Finitary(h)) if h.is_identity() => Ok(g.clone()),
            _ => Err(Error::MixedRepresentation),
        }
    }

    pub fn inverse(&self) -> TreeAutomorphism {
        match self {
            TreeAutomorphism::Finitary(g) => TreeAutomorphism::Finitary(g.inverse()),
            TreeAutomorphism::Word(g) => TreeAutomorphism::Word(g.inverse()),
        }
    }

    pub fn truncate(&self, n: usize) -> FinitaryAutomorphism {
        match self {
            TreeAutomorphism::Finitary(g) => g.truncate(n),
            TreeAutomorphism::Word(g) => truncate(g, n),
        }
    }

    pub fn activity(&self, n: usize) -> Result<usize> {
        activity(self, n)
    }

    pub fn n_g(&self, v: &Vertex) -> usize {
        n_g(self, v)
    }

    pub fn support_cylinders(&self, n: usize) -> Result<CylinderSet> {
        support_cylinders(self, n)
    }

    pub fn is_identity(&self) -> Result<bool> {
        SectionTree::is_identity(self)
    }

    pub fn as_finitary(&self) -> Option<&FinitaryAutomorphism> {
        match self {
            TreeAutomorphism::Finitary(g) => Some(g),
            TreeAutomorphism::Word(_) => None,
        }
    }

    pub fn as_word(&self) -> Option<&AutomatonElement> {
        match self {
            TreeAutomorphism::Word(g) => Some(g),
            TreeAutomorphism::Finitary(_) => None,
        }
    }
}

/// Image of a vertex, computed letter by letter through successive sections.
pub fn apply_vertex<T: SectionTree>(g: &T, v: &Vertex) -> Vertex {
    let mut current = g.clone();
    let mut out = Vec::with_capacity(v.level());
    for (i, &x) in v.letters().iter().enumerate() {
        if current.is_trivially_identity() {
            out.extend_from_slice(&v.letters()[i..]);
            break;
        }
        out.push(current.root_image(x as usize) as u8);
        current = current.child_section(x as usize);
    }
    Vertex::from_letters(out)
}

pub fn section<T: SectionTree>(g: &T, v: &Vertex) -> T {
    let mut current = g.clone();
    for &x in v.letters() {
        current = current.child_section(x as usize);
    }
    current
}

/// `g^(n)` as a portrait. Branches whose section word is empty are skipped.
pub fn truncate<T: SectionTree>(g: &T, n: usize) -> FinitaryAutomorphism {
    let degree = g.degree();
    let mut portrait = BTreeMap::new();
    let mut stack = vec![(Vertex::root(), g.clone())];
    while let Some((u, s)) = stack.pop() {
        if u.level() >= n || s.is_trivially_identity() {
            continue;
        }
        let p = s.root_perm();
        if !p.is_identity() {
            portrait.insert(u.clone(), p);
        }
        for x in 0..degree.get() {
            stack.push((u.child(x as u8), s.child_section(x)));
        }
    }
    FinitaryAutomorphism::new(degree, n, portrait).expect("portrait above depth n")
}

/// `k_n(g)`: number of level-`n` vertices with a nontrivial section.
pub fn activity<T: SectionTree>(g: &T, n: usize) -> Result<usize> {
    let mut frontier: Vec<T> = Vec::new();
    if !g.is_identity()? {
        frontier.push(g.clone());
    }
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &frontier {
            for x in 0..g.degree().get() {
                let t = s.child_section(x);
                if !t.is_trivially_identity() && !t.is_identity()? {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.len())
}

/// One row of a subexponential-boundedness table.
#[derive(Clone, Debug, PartialEq)]
pub struct SubexpRow {
    pub level: usize,
    pub activity: usize,
    /// `k_n γ^n` per requested γ, exact.
    pub weighted: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubexpProfile {
    pub gammas: Vec<BigRational>,
    pub rows: Vec<SubexpRow>,
    /// Per γ: `k_n γ^n` is nonincreasing over the second half of the table.
    pub decreasing_tail: Vec<bool>,
}

pub fn subexp_profile<T: SectionTree>(
    g: &T,
    n_max: usize,
    gammas: &[BigRational],
) -> Result<SubexpProfile> {
    for gamma in gammas {
        if *gamma <= BigRational::zero() || *gamma >= BigRational::one() {
            return Err(Error::Precondition(format!("gamma {gamma} not in (0,1)")));
        }
    }
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let k = activity(g, n)?;
        let weighted = gammas
            .iter()
            .map(|gamma| BigRational::from_integer(k.into()) * num_traits::pow(gamma.clone(), n))
            .collect();
        rows.push(SubexpRow {
            level: n,
            activity: k,
            weighted,
        });
    }
    let start = rows.len() / 2;
    let decreasing_tail = (0..gammas.len())
        .map(|j| rows[start..].windows(2).all(|w| w[1].weighted[j] <= w[0].weighted[j]))
        .collect();
    Ok(SubexpProfile {
        gammas: gammas.to_vec(),
        rows,
        decreasing_tail,
    })
}

/// Number of proper prefixes `u` of `v` whose section acts nontrivially on
/// the first level.
pub fn n_g<T: SectionTree>(g: &T, v: &Vertex) -> usize {
    let mut current = g.clone();
    let mut count = 0;
    for &x in v.letters() {
        if current.is_trivially_identity() {
            break;
        }
        if current.root_active() {
            count += 1;
        }
        current = current.child_section(x as usize);
    }
    count
}

/// Cylinder classification of an automorphism down to a fixed depth.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportProfile {
    /// Cylinders every point of which is moved.
    pub moved: Vec<Vertex>,
    /// Fixed vertices whose section is the identity: the whole cylinder is fixed.
    pub free: Vec<Vertex>,
    /// Fixed vertices at the cutoff depth whose section is not certified trivial.
    pub open: Vec<Vertex>,
}

/// Walks the tree below the cylinders of `region`, down to level `depth`.
pub fn support_profile<T: SectionTree>(
    g: &T,
    region: &CylinderSet,
    depth: usize,
) -> Result<SupportProfile> {
    let mut profile = SupportProfile::default();
    let d = g.degree().get();
    let mut stack = vec![(Vertex::root(), g.clone())];
    while let Some((u, s)) = stack.pop() {
        if !region.meets_cylinder(&u) {
            continue;
        }
        let inside = region.contains_cylinder(&u);
        if s.is_trivially_identity() || s.is_identity()? {
            if inside {
                profile.free.push(u);
            } else {
                push_region_part(region, &u, &mut profile.free);
            }
            continue;
        }
        if u.level() >= depth {
            if inside {
                profile.open.push(u);
            } else {
                push_region_part(region, &u, &mut profile.open);
            }
            continue;
        }
        for x in 0..d {
            let child = u.child(x as u8);
            if s.root_image(x) != x {
                if region.contains_cylinder(&child) {
                    profile.moved.push(child);
                } else {
                    push_region_part(region, &child, &mut profile.moved);
                }
            } else {
                stack.push((child, s.child_section(x)));
            }
        }
    }
    profile.moved.sort();
    profile.free.sort();
    profile.open.sort();
    Ok(profile)
}

fn push_region_part(region: &CylinderSet, u: &Vertex, out: &mut Vec<Vertex>) {
    out.extend(region.vertices().filter(|w| u.is_prefix_of(w)).cloned());
}

/// `M_n`: union of cylinders `X_v`, `v ∈ V_n`, with `g(v) ≠ v`.
pub fn support_cylinders<T: SectionTree>(g: &T, n: usize) -> Result<CylinderSet> {
    let degree = g.degree();
    let mut moved = Vec::new();
    let mut stack = vec![(Vertex::root(), g.clone())];
    while let Some((u, s)) = stack.pop() {
        if u.level() >= n || s.is_trivially_identity() {
            continue;
        }
        for x in 0..degree.get() {
            let child = u.child(x as u8);
            if s.root_image(x) != x {
                moved.push(child);
            } else {
                stack.push((child, s.child_section(x)));
            }
        }
    }
    CylinderSet::normalize(degree, moved)
}

/// Lower bounds for `N_g` on cylinders inside a region.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NgProfile {
    /// Cylinders on which `N_g` is constant, with that value.
    pub exact: Vec<(Vertex, usize)>,
    /// Cutoff-depth cylinders with the count of active prefixes seen so far.
    pub open: Vec<(Vertex, usize)>,
}

impl NgProfile {
    /// Cylinders certified to have `N_g ≥ k`.
    pub fn at_least(&self, k: usize) -> impl Iterator<Item = &Vertex> {
        self.exact
            .iter()
            .chain(self.open.iter())
            .filter(move |(_, c)| *c >= k)
            .map(|(v, _)| v)
    }
}

pub fn ng_profile<T: SectionTree>(g: &T, region: &CylinderSet, depth: usize) -> Result<NgProfile> {
    let mut profile = NgProfile::default();
    let d = g.degree().get();
    let mut stack = vec![(Vertex::root(), g.clone(), 0usize)];
    while let Some((u, s, count)) = stack.pop() {
        if !region.meets_cylinder(&u) {
            continue;
        }
        let inside = region.contains_cylinder(&u);
        let identity = s.is_trivially_identity() || s.is_identity()?;
        if identity || u.level() >= depth {
            let target = if identity {
                &mut profile.exact
            } else {
                &mut profile.open
            };
            if inside {
                target.push((u, count));
            } else {
                let mut parts = Vec::new();
                push_region_part(region, &u, &mut parts);
                target.extend(parts.into_iter().map(|w| (w, count)));
            }
            continue;
        }
        let next = count + s.root_active() as usize;
        for x in 0..d {
            stack.push((u.child(x as u8), s.child_section(x), next));
        }
    }
    profile.exact.sort();
    profile.open.sort();
    Ok(profile)
}
