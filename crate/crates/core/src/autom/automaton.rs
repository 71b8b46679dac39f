use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::Degree;

/// Default cap on distinct sections explored by an identity test.
pub const DEFAULT_SECTION_BUDGET: usize = 10_000;

/// A generator or its inverse, packed as `index << 1 | inverse`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter(((generator as u32) << 1) | inverse as u32)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.generator(), if self.is_inverse() { "'" } else { "" })
    }
}

/// A product `s_1 s_2 … s_k` acting on the left, so `s_k` is applied first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        GroupWord(letters)
    }

    pub fn generator(index: usize) -> Self {
        GroupWord(vec![Letter::new(index, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation `self · other` (not reduced).
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &GroupWord) -> GroupWord {
        self.concat(other).concat(&self.inverse())
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }
}

/// One generator of a self-similar family: root permutation plus the
/// words of its first-level sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recursion {
    pub name: String,
    pub root_perm: Perm,
    pub sections: Vec<GroupWord>,
}

/// A family of tree automorphisms given by wreath recursion at level one.
pub struct Automaton {
    degree: Degree,
    recursions: Vec<Recursion>,
    root_inverse: Vec<Perm>,
    rewrite: HashMap<(Letter, Letter), Option<Letter>>,
    budget: usize,
    trivial_cache: RwLock<HashSet<GroupWord>>,
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automaton")
            .field("degree", &self.degree.get())
            .field("generators", &self.names().collect::<Vec<_>>())
            .finish()
    }
}

impl Automaton {
    /// Builds the family and derives its length-two rewriting rules
    /// (`xy = 1` and `xy = z`) by certified identity tests.
    pub fn new(degree: Degree, recursions: Vec<Recursion>) -> Result<Self> {
        Self::with_budget(degree, recursions, DEFAULT_SECTION_BUDGET)
    }

    pub fn with_budget(degree: Degree, recursions: Vec<Recursion>, budget: usize) -> Result<Self> {
        let n = recursions.len();
        for r in &recursions {
            if r.root_perm.len() != degree.get() {
                return Err(Error::InvalidPermutation(format!(
                    "{}: root permutation has {} points, expected {}",
                    r.name,
                    r.root_perm.len(),
                    degree.get()
                )));
            }
            if r.sections.len() != degree.get() {
                return Err(Error::Precondition(format!(
                    "{}: expected {} sections, got {}",
                    r.name,
                    degree.get(),
                    r.sections.len()
                )));
            }
            for w in &r.sections {
                if let Some(l) = w.letters().iter().find(|l| l.generator() >= n) {
                    return Err(Error::Precondition(format!(
                        "{}: section references undeclared generator #{}",
                        r.name,
                        l.generator()
                    )));
                }
            }
        }
        let root_inverse = recursions.iter().map(|r| r.root_perm.inverse()).collect();
        let mut automaton = Automaton {
            degree,
            recursions,
            root_inverse,
            rewrite: HashMap::new(),
            budget,
            trivial_cache: RwLock::new(HashSet::new()),
        };
        automaton.rewrite = automaton.derive_rewrites();
        Ok(automaton)
    }

    fn derive_rewrites(&self) -> HashMap<(Letter, Letter), Option<Letter>> {
        let letters = self.all_letters();
        let mut table = HashMap::new();
        // the product search is quadratic in the alphabet; small alphabets only
        let search_products = letters.len() <= 24;
        for &x in &letters {
            for &y in &letters {
                if x == y.inverse() {
                    continue;
                }
                let pair = GroupWord(vec![x, y]);
                if let Ok(true) = self.is_trivial(&pair) {
                    table.insert((x, y), None);
                    continue;
                }
                if !search_products {
                    continue;
                }
                for &z in &letters {
                    let w = GroupWord(vec![x, y, z.inverse()]);
                    if let Ok(true) = self.is_trivial(&w) {
                        table.insert((x, y), Some(z));
                        break;
                    }
                }
            }
        }
        // the cache was filled under plain free reduction; keep it, it is sound
        table
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn generator_count(&self) -> usize {
        self.recursions.len()
    }

    pub fn recursions(&self) -> &[Recursion] {
        &self.recursions
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.recursions.iter().map(|r| r.name.as_str())
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.recursions[generator].name
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.recursions.iter().position(|r| r.name == name)
    }

    /// Generators then their inverses, in declaration order.
    pub fn all_letters(&self) -> Vec<Letter> {
        let n = self.recursions.len();
        (0..n)
            .map(|g| Letter::new(g, false))
            .chain((0..n).map(|g| Letter::new(g, true)))
            .collect()
    }

    /// Whether the rewriting table knows `x·x = 1`.
    pub fn is_involution(&self, generator: usize) -> bool {
        let x = Letter::new(generator, false);
        matches!(self.rewrite.get(&(x, x)), Some(None))
    }

    /// Letter used when a word is built from scratch: involutions never need
    /// their formal inverse.
    pub fn canonical_letter(&self, l: Letter) -> Letter {
        if l.is_inverse() && self.is_involution(l.generator()) {
            l.inverse()
        } else {
            l
        }
    }

    #[inline]
    pub fn letter_perm(&self, l: Letter) -> &Perm {
        if l.is_inverse() {
            &self.root_inverse[l.generator()]
        } else {
            &self.recursions[l.generator()].root_perm
        }
    }

    fn letter_section(&self, l: Letter, x: usize) -> GroupWord {
        let r = &self.recursions[l.generator()];
        if l.is_inverse() {
            let pre = self.root_inverse[l.generator()].apply(x);
            r.sections[pre].inverse()
        } else {
            r.sections[x].clone()
        }
    }

    /// Image of a first-level letter under the word.
    pub fn root_image(&self, w: &GroupWord, mut x: usize) -> usize {
        for &l in w.0.iter().rev() {
            x = self.letter_perm(l).apply(x);
        }
        x
    }

    pub fn root_perm(&self, w: &GroupWord) -> Perm {
        let images = (0..self.degree.get())
            .map(|x| self.root_image(w, x) as u32)
            .collect();
        Perm::from_images(images).expect("product of permutations")
    }

    /// Section of the word at the first-level vertex `x`, reduced.
    pub fn section(&self, w: &GroupWord, mut x: usize) -> GroupWord {
        let mut parts: Vec<GroupWord> = Vec::with_capacity(w.len());
        for &l in w.0.iter().rev() {
            parts.push(self.letter_section(l, x));
            x = self.letter_perm(l).apply(x);
        }
        let mut out = Vec::new();
        for p in parts.into_iter().rev() {
            out.extend(p.0);
        }
        self.reduce(GroupWord(out))
    }

    /// Free reduction plus the derived length-two rewriting rules.
    pub fn reduce(&self, w: GroupWord) -> GroupWord {
        let mut stack: Vec<Letter> = Vec::with_capacity(w.0.len());
        for l in w.0 {
            let l = self.canonical_letter(l);
            stack.push(l);
            while stack.len() >= 2 {
                let b = stack[stack.len() - 1];
                let a = stack[stack.len() - 2];
                if a == b.inverse() {
                    stack.truncate(stack.len() - 2);
                    continue;
                }
                match self.rewrite.get(&(a, b)) {
                    Some(None) => {
                        stack.truncate(stack.len() - 2);
                    }
                    Some(Some(z)) => {
                        stack.truncate(stack.len() - 2);
                        stack.push(*z);
                    }
                    None => break,
                }
            }
        }
        GroupWord(stack)
    }

    /// Decides `w = 1` by exploring the closure of its sections: the word is
    /// trivial exactly when every section in the closure has trivial root
    /// permutation. Fails with `BudgetExceeded` when the closure is larger
    /// than the budget.
    pub fn is_trivial(&self, w: &GroupWord) -> Result<bool> {
        let w = self.reduce(w.clone());
        if w.is_empty() {
            return Ok(true);
        }
        if self.trivial_cache.read().unwrap().contains(&w) {
            return Ok(true);
        }
        let d = self.degree.get();
        let mut visited: HashSet<GroupWord> = HashSet::new();
        let mut queue: VecDeque<GroupWord> = VecDeque::new();
        visited.insert(w.clone());
        queue.push_back(w);
        while let Some(s) = queue.pop_front() {
            if (0..d).any(|x| self.root_image(&s, x) != x) {
                return Ok(false);
            }
            for x in 0..d {
                let t = self.section(&s, x);
                if t.is_empty() || visited.contains(&t) {
                    continue;
                }
                if self.trivial_cache.read().unwrap().contains(&t) {
                    continue;
                }
                if visited.len() >= self.budget {
                    return Err(Error::budget(self.budget, "testing a word for identity"));
                }
                visited.insert(t.clone());
                queue.push_back(t);
            }
        }
        let mut cache = self.trivial_cache.write().unwrap();
        cache.extend(visited);
        Ok(true)
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        parse_word_with(s, |name| self.generator_index(name))
    }

    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.0.iter()
            .map(|l| {
                format!(
                    "{}{}",
                    self.name(l.generator()),
                    if l.is_inverse() { "'" } else { "" }
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Parses `"a b' c"`; `""` and `"1"` denote the identity.
pub(crate) fn parse_word_with(
    s: &str,
    lookup: impl Fn(&str) -> Option<usize>,
) -> Result<GroupWord> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(GroupWord::identity());
    }
    let mut letters = Vec::new();
    let mut column = 1;
    for token in s.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, inverse) = match token.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (token, false),
        };
        let g = lookup(name).ok_or_else(|| Error::Parse {
            line: 1,
            column,
            message: format!("undeclared generator '{name}'"),
        })?;
        letters.push(Letter::new(g, inverse));
        column += token.len() + 1;
    }
    Ok(GroupWord(letters))
}
