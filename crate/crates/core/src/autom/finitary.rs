use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::{Degree, Vertex};

/// An automorphism that acts trivially below level `depth`, stored as the
/// nontrivial part of its portrait.
#[derive(Clone, Debug)]
pub struct FinitaryAutomorphism {
    degree: Degree,
    depth: usize,
    portrait: BTreeMap<Vertex, Perm>,
}

impl PartialEq for FinitaryAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.portrait == other.portrait
    }
}

impl Eq for FinitaryAutomorphism {}

impl Hash for FinitaryAutomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.degree.hash(state);
        self.portrait.hash(state);
    }
}

impl FinitaryAutomorphism {
    pub fn identity(degree: Degree) -> Self {
        FinitaryAutomorphism {
            degree,
            depth: 0,
            portrait: BTreeMap::new(),
        }
    }

    pub fn new(
        degree: Degree,
        depth: usize,
        portrait: impl IntoIterator<Item = (Vertex, Perm)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (v, p) in portrait {
            if v.level() >= depth {
                return Err(Error::Precondition(format!(
                    "portrait vertex '{v}' is not above depth {depth}"
                )));
            }
            Vertex::new(v.letters().to_vec(), degree)?;
            if p.len() != degree.get() {
                return Err(Error::InvalidPermutation(format!(
                    "permutation at '{v}' has {} points",
                    p.len()
                )));
            }
            if !p.is_identity() {
                map.insert(v, p);
            }
        }
        Ok(FinitaryAutomorphism {
            degree,
            depth,
            portrait: map,
        })
    }

    /// The permutation `perm` applied at vertex `v`, trivial elsewhere.
    pub fn at_vertex(degree: Degree, v: Vertex, perm: Perm) -> Result<Self> {
        let depth = v.level() + 1;
        Self::new(degree, depth, [(v, perm)])
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Smallest `N` such that the portrait is trivial from level `N` on.
    pub fn effective_depth(&self) -> usize {
        self.portrait.keys().map(|v| v.level() + 1).max().unwrap_or(0)
    }

    pub fn portrait(&self) -> impl Iterator<Item = (&Vertex, &Perm)> {
        self.portrait.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.portrait.is_empty()
    }

    pub fn perm_at(&self, v: &Vertex) -> Perm {
        self.portrait
            .get(v)
            .cloned()
            .unwrap_or_else(|| Perm::identity(self.degree.get()))
    }

    #[inline]
    pub(crate) fn image_at(&self, v: &Vertex, x: usize) -> usize {
        self.portrait.get(v).map_or(x, |p| p.apply(x))
    }

    /// Whether some portrait entry lies at or below `v`.
    pub fn active_below(&self, v: &Vertex) -> bool {
        self.portrait
            .range(v.clone()..)
            .next()
            .is_some_and(|(w, _)| v.is_prefix_of(w))
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        let mut u = Vertex::root();
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            out.push(self.image_at(&u, x as usize) as u8);
            u = u.child(x);
        }
        Vertex::from_letters(out)
    }

    pub fn section(&self, v: &Vertex) -> FinitaryAutomorphism {
        let portrait = self
            .portrait
            .range(v.clone()..)
            .take_while(|(w, _)| v.is_prefix_of(w))
            .map(|(w, p)| {
                (
                    Vertex::from_letters(w.letters()[v.level()..].to_vec()),
                    p.clone(),
                )
            })
            .collect();
        FinitaryAutomorphism {
            degree: self.degree,
            depth: self.depth.saturating_sub(v.level()),
            portrait,
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &FinitaryAutomorphism) -> Result<FinitaryAutomorphism> {
        self.degree.check(other.degree)?;
        let depth = self.depth.max(other.depth);
        let mut portrait = BTreeMap::new();
        self.compose_walk(other, Vertex::root(), Vertex::root(), &mut portrait);
        Ok(FinitaryAutomorphism {
            degree: self.degree,
            depth,
            portrait,
        })
    }

    fn compose_walk(
        &self,
        other: &FinitaryAutomorphism,
        u: Vertex,
        hu: Vertex,
        out: &mut BTreeMap<Vertex, Perm>,
    ) {
        if !self.active_below(&hu) && !other.active_below(&u) {
            return;
        }
        let h = other.perm_at(&u);
        let p = self.perm_at(&hu).compose(&h);
        if !p.is_identity() {
            out.insert(u.clone(), p);
        }
        for x in 0..self.degree.get() {
            self.compose_walk(
                other,
                u.child(x as u8),
                hu.child(h.apply(x) as u8),
                out,
            );
        }
    }

    pub fn inverse(&self) -> FinitaryAutomorphism {
        let portrait = self
            .portrait
            .iter()
            .map(|(u, p)| (self.apply(u), p.inverse()))
            .collect();
        FinitaryAutomorphism {
            degree: self.degree,
            depth: self.depth,
            portrait,
        }
    }

    /// `g^(n)`: the action on the first `n` levels, trivial below.
    pub fn truncate(&self, n: usize) -> FinitaryAutomorphism {
        FinitaryAutomorphism {
            degree: self.degree,
            depth: n,
            portrait: self
                .portrait
                .iter()
                .filter(|(v, _)| v.level() < n)
                .map(|(v, p)| (v.clone(), p.clone()))
                .collect(),
        }
    }

    /// Permutation of `V_n` induced by the automorphism, indexed by
    /// [`Vertex::index`].
    pub fn level_perm(&self, n: usize) -> Perm {
        let images = Vertex::level_vertices(self.degree, n)
            .map(|v| self.apply(&v).index(self.degree) as u32)
            .collect();
        Perm::from_images(images).expect("automorphisms permute levels")
    }

    /// Every portrait of depth at most `depth` over the given degree.
    ///
    /// There are `(d!)^((d^depth - 1)/(d - 1))` of them; callers keep the
    /// arguments small.
    pub fn enumerate(degree: Degree, depth: usize) -> Vec<FinitaryAutomorphism> {
        let d = degree.get();
        let perms = all_perms(d);
        let vertices: Vec<Vertex> = (0..depth)
            .flat_map(|n| Vertex::level_vertices(degree, n))
            .collect();
        let total = perms.len().pow(vertices.len() as u32);
        let mut out = Vec::with_capacity(total);
        for mut code in 0..total {
            let mut portrait = BTreeMap::new();
            for v in &vertices {
                let p = &perms[code % perms.len()];
                code /= perms.len();
                if !p.is_identity() {
                    portrait.insert(v.clone(), p.clone());
                }
            }
            out.push(FinitaryAutomorphism {
                degree,
                depth,
                portrait,
            });
        }
        out
    }

    /// `count` portraits of depth at most `depth`, each vertex label drawn
    /// uniformly from `Sym(d)` by a ChaCha stream seeded with `seed`.
    pub fn sample(degree: Degree, depth: usize, count: usize, seed: u64) -> Vec<FinitaryAutomorphism> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = all_perms(degree.get());
        let vertices: Vec<Vertex> = (0..depth)
            .flat_map(|n| Vertex::level_vertices(degree, n))
            .collect();
        (0..count)
            .map(|_| {
                let portrait = vertices
                    .iter()
                    .map(|v| (v.clone(), perms[rng.random_range(0..perms.len())].clone()))
                    .filter(|(_, p)| !p.is_identity())
                    .collect();
                FinitaryAutomorphism {
                    degree,
                    depth,
                    portrait,
                }
            })
            .collect()
    }

    /// Splits `self = α ∘ β` where `α` changes each moved ray in exactly one
    /// letter (the first letter where `self` moves it) and fixes the rest.
    /// Then `β = α⁻¹ ∘ self` fixes the first moved vertex of every ray and
    /// along a moved ray `x` has one active vertex fewer than `self`.
    ///
    /// `α` keeps the portrait of `self` at the vertices fixed by `self` and is
    /// trivial below the first moved vertex of every ray.
    pub fn alpha_beta(&self) -> (FinitaryAutomorphism, FinitaryAutomorphism) {
        let mut portrait = BTreeMap::new();
        let mut stack = vec![Vertex::root()];
        while let Some(u) = stack.pop() {
            if !self.active_below(&u) {
                continue;
            }
            // u is fixed by self here
            let p = self.perm_at(&u);
            for x in 0..self.degree.get() {
                if p.apply(x) == x {
                    stack.push(u.child(x as u8));
                }
            }
            if !p.is_identity() {
                portrait.insert(u, p);
            }
        }
        let alpha = FinitaryAutomorphism {
            degree: self.degree,
            depth: self.depth,
            portrait,
        };
        let beta = alpha
            .inverse()
            .compose(self)
            .expect("same degree by construction");
        (alpha, beta)
    }
}

fn all_perms(d: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (0..d as u32).collect();
    permute(&mut current, 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut Vec<u32>, k: usize, out: &mut Vec<Perm>) {
    if k == items.len() {
        out.push(Perm::from_images(items.clone()).unwrap());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}
