//! Finitely generated self-similar groups: the built-in registry, level
//! quotients, boundary orbits and the constructive searches.

mod fill;
mod orbit;
mod quotient;
mod rigid;
mod witness;

use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::autom::{
    parse_automaton, Automaton, AutomatonElement, GroupWord, Recursion, DEFAULT_SECTION_BUDGET,
};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::{Degree, Vertex};

pub use fill::{n_g_boost, support_fill, BoostResult, FillStep, SupportFill, MAX_RUN_DEPTH};
pub use orbit::{
    boundary_image, first_difference, orbit_ball, stabilizes, SchreierBall, SchreierEdge,
};
pub use quotient::{level_centralizer, LevelQuotient, LevelTransitivity};
pub use rigid::{
    certification_depth, certify_rigid, good_rigid_element, rigid_element_search, BranchData,
    GoodRigidElement, RigidElement, RigidOrigin, DEFAULT_SEARCH_BUDGET,
};
pub use witness::{distinct_orbit_points, OrbitWitness, OrbitWitnesses};

/// Names accepted by [`GroupSpec::builtin`].
pub const REGISTRY: [&str; 4] = ["grigorchuk", "odometer2", "gupta_sidki_3", "finitary(d,N)"];

const GRIGORCHUK: &str = "\
degree = 2
a = [1,0]
b = (a, c)
c = (a, d)
d = (1, b)
";

const ODOMETER: &str = "\
degree = 2
a = [1,0] (1, a)
";

const GUPTA_SIDKI_3: &str = "\
degree = 3
a = [1,2,0]
t = (a, a', t)
";

/// A finitely generated group given by an automaton family.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    name: String,
    automaton: Arc<Automaton>,
    weakly_branch: bool,
    branch: Arc<OnceLock<Option<Arc<BranchData>>>>,
}

struct SelfTest {
    transitive_depth: usize,
    trivial: Vec<String>,
    nontrivial: Vec<String>,
}

impl GroupSpec {
    pub fn new(name: impl Into<String>, automaton: Automaton, weakly_branch: bool) -> Self {
        GroupSpec {
            name: name.into(),
            automaton: Arc::new(automaton),
            weakly_branch,
            branch: Arc::new(OnceLock::new()),
        }
    }

    /// Looks up a registry entry and runs its self-test.
    pub fn builtin(name: &str) -> Result<Self> {
        Self::builtin_with_budget(name, DEFAULT_SECTION_BUDGET)
    }

    pub fn builtin_with_budget(name: &str, budget: usize) -> Result<Self> {
        let parse = |text: &str| -> Result<Automaton> {
            let a = parse_automaton(text)?;
            Automaton::with_budget(a.degree(), a.recursions().to_vec(), budget)
        };
        let (spec, test) = match name {
            "grigorchuk" => (
                GroupSpec::new(name, parse(GRIGORCHUK)?, true),
                SelfTest {
                    transitive_depth: 5,
                    trivial: words(&["a a", "b b", "c c", "d d", "b c d"]),
                    nontrivial: words(&["a", "b", "c", "d", "a b a b"]),
                },
            ),
            "odometer2" => (
                GroupSpec::new(name, parse(ODOMETER)?, false),
                SelfTest {
                    transitive_depth: 5,
                    trivial: vec![],
                    nontrivial: words(&["a", "a a", "a a a a", "a a a a a a a a"]),
                },
            ),
            "gupta_sidki_3" => (
                GroupSpec::new(name, parse(GUPTA_SIDKI_3)?, true),
                SelfTest {
                    transitive_depth: 5,
                    trivial: words(&["a a a", "t t t"]),
                    nontrivial: words(&["a", "t", "a t", "a t a' t'"]),
                },
            ),
            other => {
                let (d, n) = parse_finitary_name(other)
                    .ok_or_else(|| Error::UnknownGroup(other.to_string()))?;
                let spec = Self::finitary_with_budget(d, n, budget)?;
                let order = d.get();
                let mut trivial = Vec::new();
                for r in spec.automaton.recursions() {
                    let power = if r.name.starts_with('t') { 2 } else { order };
                    trivial.push(vec![r.name.as_str(); power].join(" "));
                }
                let nontrivial = spec
                    .automaton
                    .names()
                    .map(|s| s.to_string())
                    .collect();
                (
                    spec,
                    SelfTest {
                        transitive_depth: n.min(5),
                        trivial,
                        nontrivial,
                    },
                )
            }
        };
        spec.run_self_test(&test)?;
        Ok(spec)
    }

    /// The group of all automorphisms acting trivially below level `depth`,
    /// generated by a transposition (and a `d`-cycle when `d > 2`) at each
    /// vertex above that level. Generator `tU` swaps letters 0 and 1 at
    /// vertex `U`; `cU` cycles all letters there.
    pub fn finitary(degree: Degree, depth: usize) -> Result<Self> {
        Self::finitary_with_budget(degree, depth, DEFAULT_SECTION_BUDGET)
    }

    fn finitary_with_budget(degree: Degree, depth: usize, budget: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Precondition("finitary group needs depth ≥ 1".into()));
        }
        let d = degree.get();
        let vertices: Vec<Vertex> = (0..depth)
            .flat_map(|n| Vertex::level_vertices(degree, n))
            .collect();
        let mut kinds: Vec<(char, Perm)> = vec![('t', Perm::transposition(d, 0, 1))];
        if d > 2 {
            kinds.push(('c', Perm::cycle(d)));
        }
        let mut index = std::collections::HashMap::new();
        let mut names = Vec::new();
        for (k, (c, _)) in kinds.iter().enumerate() {
            for v in &vertices {
                index.insert((k, v.clone()), names.len());
                names.push(format!("{c}{v}"));
            }
        }
        let mut recursions = Vec::with_capacity(names.len());
        for (k, (_, perm)) in kinds.iter().enumerate() {
            for v in &vertices {
                let name = names[index[&(k, v.clone())]].clone();
                let mut sections = vec![GroupWord::identity(); d];
                let root_perm = if v.is_root() {
                    perm.clone()
                } else {
                    let tail = Vertex::from_letters(v.letters()[1..].to_vec());
                    sections[v.letters()[0] as usize] = GroupWord::generator(index[&(k, tail)]);
                    Perm::identity(d)
                };
                recursions.push(Recursion {
                    name,
                    root_perm,
                    sections,
                });
            }
        }
        let automaton = Automaton::with_budget(degree, recursions, budget)?;
        Ok(GroupSpec::new(format!("finitary({d},{depth})"), automaton, false))
    }

    /// A group with one identity generator, used as a degenerate control.
    pub fn trivial(degree: Degree) -> Result<Self> {
        let automaton = Automaton::new(
            degree,
            vec![Recursion {
                name: "e".into(),
                root_perm: Perm::identity(degree.get()),
                sections: vec![GroupWord::identity(); degree.get()],
            }],
        )?;
        Ok(GroupSpec::new("trivial", automaton, false))
    }

    pub fn from_spec_text(name: impl Into<String>, text: &str) -> Result<Self> {
        Ok(GroupSpec::new(name, parse_automaton(text)?, false))
    }

    pub fn from_spec_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spec".into());
        Self::from_spec_text(name, &text)
    }

    fn run_self_test(&self, test: &SelfTest) -> Result<()> {
        let fail = |reason: String| Error::SelfTest {
            group: self.name.clone(),
            reason,
        };
        for n in 1..=test.transitive_depth {
            if !self.level_transitive(n).transitive {
                return Err(fail(format!("not transitive on level {n}")));
            }
        }
        for w in &test.trivial {
            if !self.automaton.is_trivial(&self.automaton.parse_word(w)?)? {
                return Err(fail(format!("relation '{w}' fails")));
            }
        }
        for w in &test.nontrivial {
            if self.automaton.is_trivial(&self.automaton.parse_word(w)?)? {
                return Err(fail(format!("'{w}' is unexpectedly trivial")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn automaton(&self) -> &Arc<Automaton> {
        &self.automaton
    }

    pub fn degree(&self) -> Degree {
        self.automaton.degree()
    }

    pub fn generator_count(&self) -> usize {
        self.automaton.generator_count()
    }

    /// Registry metadata; never verified.
    pub fn claimed_weakly_branch(&self) -> bool {
        self.weakly_branch
    }

    pub fn element(&self, word: GroupWord) -> AutomatonElement {
        AutomatonElement::new(self.automaton.clone(), word).expect("word over this automaton")
    }

    pub fn parse_element(&self, s: &str) -> Result<AutomatonElement> {
        Ok(self.element(self.automaton.parse_word(s)?))
    }

    pub fn generators(&self) -> Vec<AutomatonElement> {
        (0..self.generator_count())
            .map(|i| self.element(GroupWord::generator(i)))
            .collect()
    }

    /// Branching data found by a bounded search, computed once per group.
    pub fn branch_data(&self, budget: usize) -> Result<Option<Arc<BranchData>>> {
        if let Some(found) = self.branch.get() {
            return Ok(found.clone());
        }
        let found = BranchData::discover(&self.automaton, budget)?.map(Arc::new);
        Ok(self.branch.get_or_init(|| found).clone())
    }

    pub fn level_quotient(&self, n: usize) -> LevelQuotient {
        LevelQuotient::new(self, n)
    }

    pub fn level_transitive(&self, n: usize) -> LevelTransitivity {
        self.level_quotient(n).transitivity()
    }
}

fn words(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|s| s.to_string()).collect()
}

fn parse_finitary_name(s: &str) -> Option<(Degree, usize)> {
    let body = s.strip_prefix("finitary(")?.strip_suffix(')')?;
    let (d, n) = body.split_once(',')?;
    let d = Degree::new(d.trim().parse().ok()?).ok()?;
    let n: usize = n.trim().parse().ok()?;
    // the generating set grows like d^N
    if n == 0 || d.get().checked_pow(n as u32)? > 4096 {
        return None;
    }
    Some((d, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_loads_and_self_tests() {
        for name in ["grigorchuk", "odometer2", "gupta_sidki_3", "finitary(2,3)", "finitary(3,2)"] {
            let g = GroupSpec::builtin(name).unwrap();
            assert_eq!(g.name(), name);
        }
        assert!(matches!(
            GroupSpec::builtin("lamplighter"),
            Err(Error::UnknownGroup(_))
        ));
    }

    #[test]
    fn finitary_generators() {
        let g = GroupSpec::builtin("finitary(2,3)").unwrap();
        assert_eq!(g.generator_count(), 7);
        let names: Vec<&str> = g.automaton().names().collect();
        assert_eq!(names, ["t", "t0", "t1", "t00", "t01", "t10", "t11"]);
    }
}
