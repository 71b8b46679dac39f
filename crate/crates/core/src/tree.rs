//! Addressing of the d-regular rooted tree.
//!
//! Letters are zero-based: a vertex is a word over `{0, .., d-1}` and the
//! root is the empty word. A vertex `v` also names the cylinder `X_v` of
//! boundary rays passing through it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Valency of a regular rooted tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(usize);

impl Degree {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDegree(d));
        }
        if d > DIGITS.len() {
            return Err(Error::Precondition(format!(
                "degree {d} exceeds the supported maximum of {}",
                DIGITS.len()
            )));
        }
        Ok(Degree(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of vertices on level `n`.
    pub fn level_size(self, n: usize) -> usize {
        self.0.pow(n as u32)
    }

    pub(crate) fn check(self, other: Degree) -> Result<()> {
        if self != other {
            return Err(Error::DegreeMismatch(self.0, other.0));
        }
        Ok(())
    }
}

/// A finite word over the alphabet; its length is the level.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(letters: Vec<u8>, degree: Degree) -> Result<Self> {
        for &l in &letters {
            if l as usize >= degree.get() {
                return Err(Error::LetterOutOfRange {
                    letter: l as usize,
                    degree: degree.get(),
                });
            }
        }
        Ok(Vertex(letters))
    }

    /// Builds a vertex without validating letters against a degree.
    pub fn from_letters(letters: impl Into<Vec<u8>>) -> Self {
        Vertex(letters.into())
    }

    pub fn parse(s: &str, degree: Degree) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for (col, ch) in s.chars().enumerate() {
            let l = ch
                .to_digit(36)
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    column: col + 1,
                    message: format!("'{ch}' is not a letter"),
                })? as usize;
            if l >= degree.get() {
                return Err(Error::LetterOutOfRange {
                    letter: l,
                    degree: degree.get(),
                });
            }
            letters.push(l as u8);
        }
        Ok(Vertex(letters))
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, letter: u8) -> Vertex {
        let mut v = self.0.clone();
        v.push(letter);
        Vertex(v)
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.0.is_empty() {
            None
        } else {
            Some(Vertex(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, n: usize) -> Vertex {
        Vertex(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn concat(&self, tail: &Vertex) -> Vertex {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        Vertex(v)
    }

    /// Position of the vertex in `V_n` with the first letter most significant.
    pub fn index(&self, degree: Degree) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &l| acc * degree.get() + l as usize)
    }

    pub fn from_index(mut index: usize, level: usize, degree: Degree) -> Vertex {
        let d = degree.get();
        let mut letters = vec![0u8; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % d) as u8;
            index /= d;
        }
        Vertex(letters)
    }

    /// All vertices of level `n`, in index order.
    pub fn level_vertices(degree: Degree, n: usize) -> impl Iterator<Item = Vertex> {
        (0..degree.level_size(n)).map(move |i| Vertex::from_index(i, n, degree))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", DIGITS[l as usize] as char)?;
        }
        Ok(())
    }
}

/// A clopen subset of the boundary as a canonical antichain of cylinders.
///
/// Canonical means: no vertex is a prefix of another, and no vertex has all
/// `d` of its children present. Two sets cover the same boundary set exactly
/// when they compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    degree: Degree,
    vertices: BTreeSet<Vertex>,
}

impl CylinderSet {
    pub fn empty(degree: Degree) -> Self {
        CylinderSet {
            degree,
            vertices: BTreeSet::new(),
        }
    }

    pub fn whole(degree: Degree) -> Self {
        CylinderSet {
            degree,
            vertices: BTreeSet::from([Vertex::root()]),
        }
    }

    pub fn cylinder(v: Vertex, degree: Degree) -> Result<Self> {
        Self::normalize(degree, [v])
    }

    /// Canonical antichain covering the union of the given cylinders.
    pub fn normalize(degree: Degree, vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut sorted = BTreeSet::new();
        for v in vertices {
            if let Some(&l) = v.0.iter().find(|&&l| l as usize >= degree.get()) {
                return Err(Error::LetterOutOfRange {
                    letter: l as usize,
                    degree: degree.get(),
                });
            }
            sorted.insert(v);
        }
        Ok(Self::canonicalize(degree, sorted))
    }

    fn canonicalize(degree: Degree, sorted: BTreeSet<Vertex>) -> Self {
        // prefix absorption: in lexicographic order an absorbing prefix is
        // always the last kept element
        let mut set: BTreeSet<Vertex> = BTreeSet::new();
        let mut last: Option<Vertex> = None;
        for v in sorted {
            if let Some(p) = &last {
                if p.is_prefix_of(&v) {
                    continue;
                }
            }
            last = Some(v.clone());
            set.insert(v);
        }

        // sibling collapse until nothing changes
        let d = degree.get();
        loop {
            let mut parents: Vec<Vertex> = Vec::new();
            for v in &set {
                let Some(parent) = v.parent() else { continue };
                if *v.0.last().unwrap() != 0 {
                    continue;
                }
                let mut all = true;
                for l in 1..d {
                    if !set.contains(&parent.child(l as u8)) {
                        all = false;
                        break;
                    }
                }
                if all {
                    parents.push(parent);
                }
            }
            if parents.is_empty() {
                break;
            }
            for p in parents {
                for l in 0..d {
                    set.remove(&p.child(l as u8));
                }
                set.insert(p);
            }
        }
        CylinderSet {
            degree,
            vertices: set,
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.vertices.len() == 1 && self.vertices.iter().next().unwrap().is_root()
    }

    pub fn max_level(&self) -> usize {
        self.vertices.iter().map(Vertex::level).max().unwrap_or(0)
    }

    /// Expresses the set as level-`n` cylinders (not canonical).
    pub fn refine(&self, n: usize) -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        for v in &self.vertices {
            if v.level() > n {
                return Err(Error::RefineTooShallow {
                    level: n,
                    vertex_level: v.level(),
                });
            }
            let extra = n - v.level();
            for tail in Vertex::level_vertices(self.degree, extra) {
                out.push(v.concat(&tail));
            }
        }
        Ok(out)
    }

    /// `X_v ⊆ self`.
    pub fn contains_cylinder(&self, v: &Vertex) -> bool {
        (0..=v.level()).any(|n| self.vertices.contains(&v.prefix(n)))
    }

    /// `X_v` meets `self`.
    pub fn meets_cylinder(&self, v: &Vertex) -> bool {
        self.contains_cylinder(v)
            || self
                .vertices
                .range(v.clone()..)
                .next()
                .is_some_and(|w| v.is_prefix_of(w))
    }

    pub fn is_subset(&self, other: &CylinderSet) -> bool {
        self.vertices.iter().all(|v| other.contains_cylinder(v))
    }

    pub fn union(&self, other: &CylinderSet) -> Result<CylinderSet> {
        self.degree.check(other.degree)?;
        Self::normalize(
            self.degree,
            self.vertices.iter().chain(other.vertices.iter()).cloned(),
        )
    }

    pub fn intersection(&self, other: &CylinderSet) -> Result<CylinderSet> {
        self.degree.check(other.degree)?;
        let mut out = Vec::new();
        for v in &self.vertices {
            if other.contains_cylinder(v) {
                out.push(v.clone());
            }
        }
        for w in &other.vertices {
            if self.contains_cylinder(w) {
                out.push(w.clone());
            }
        }
        Self::normalize(self.degree, out)
    }

    pub fn complement(&self) -> CylinderSet {
        let mut out = Vec::new();
        self.complement_below(&Vertex::root(), &mut out);
        Self::canonicalize(self.degree, out.into_iter().collect())
    }

    fn complement_below(&self, v: &Vertex, out: &mut Vec<Vertex>) {
        if self.contains_cylinder(v) {
            return;
        }
        if !self.meets_cylinder(v) {
            out.push(v.clone());
            return;
        }
        for l in 0..self.degree.get() {
            self.complement_below(&v.child(l as u8), out);
        }
    }

    pub fn difference(&self, other: &CylinderSet) -> Result<CylinderSet> {
        self.intersection(&other.complement())
    }

    /// JSON-style array of vertex strings, e.g. `["0","10"]`.
    pub fn to_json(&self) -> String {
        let items: Vec<String> = self.vertices.iter().map(|v| format!("\"{v}\"")).collect();
        format!("[{}]", items.join(","))
    }

    pub fn from_json(s: &str, degree: Degree) -> Result<Self> {
        let parsed: Vec<String> = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let vertices = parsed
            .iter()
            .map(|s| Vertex::parse(s, degree))
            .collect::<Result<Vec<_>>>()?;
        Self::normalize(degree, vertices)
    }
}

/// An eventually periodic boundary point `preperiod · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPoint {
    preperiod: Vertex,
    period: Vertex,
}

impl BoundaryPoint {
    pub fn new(preperiod: Vertex, period: Vertex) -> Result<Self> {
        if period.is_root() {
            return Err(Error::EmptyPeriod);
        }
        let mut period = period.0;
        // primitive root of the period
        let n = period.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p]) {
                period.truncate(p);
                break;
            }
        }
        // roll trailing preperiod letters into the period
        let mut pre = preperiod.0;
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Ok(BoundaryPoint {
            preperiod: Vertex(pre),
            period: Vertex(period),
        })
    }

    /// The constant ray `l l l …`.
    pub fn constant(letter: u8) -> Self {
        BoundaryPoint {
            preperiod: Vertex::root(),
            period: Vertex(vec![letter]),
        }
    }

    pub fn preperiod(&self) -> &Vertex {
        &self.preperiod
    }

    pub fn period(&self) -> &Vertex {
        &self.period
    }

    pub fn letter(&self, i: usize) -> u8 {
        let pre = self.preperiod.level();
        if i < pre {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - pre) % self.period.level()]
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Vertex {
        Vertex((0..n).map(|i| self.letter(i)).collect())
    }

    pub fn check_degree(&self, degree: Degree) -> Result<()> {
        for &l in self.preperiod.0.iter().chain(self.period.0.iter()) {
            if l as usize >= degree.get() {
                return Err(Error::LetterOutOfRange {
                    letter: l as usize,
                    degree: degree.get(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod, self.period)
    }
}

impl FromStr for BoundaryPoint {
    type Err = Error;

    /// Parses `pre(period)`, e.g. `1(0)` for `1000…`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |message: &str| Error::Parse {
            line: 1,
            column: 1,
            message: format!("{message}: '{s}'"),
        };
        let open = s.find('(').ok_or_else(|| err("expected pre(period)"))?;
        if !s.ends_with(')') {
            return Err(err("expected closing parenthesis"));
        }
        let digits = |t: &str| -> Result<Vertex> {
            t.chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(|d| d as u8)
                        .ok_or_else(|| err("bad letter"))
                })
                .collect::<Result<Vec<u8>>>()
                .map(Vertex)
        };
        let pre = digits(&s[..open])?;
        let period = digits(&s[open + 1..s.len() - 1])?;
        BoundaryPoint::new(pre, period)
    }
}
