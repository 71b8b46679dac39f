use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{Comparison, SqrtSum};
use crate::autom::{n_g, FinitaryAutomorphism};
use crate::error::{Error, Result};
use crate::measure::BernoulliDistribution;
use crate::perm::Perm;
use crate::tree::{CylinderSet, Degree, Vertex};

/// Coordinates for level-`N` cylinder functions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Indicators `ξ_v` of the cylinders; unitary for `Σ f h̄ μ_p(X_v)`.
    Raw,
    /// `ξ_v / √μ_p(X_v)`; the Koopman matrix is a permutation matrix.
    #[default]
    Normalized,
}

/// A matrix with exactly one nonzero entry `√r_v` per column `v`, in row
/// `π(v)`. Rows and columns are level-`N` vertices in [`Vertex::index`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    degree: Degree,
    level: usize,
    basis: Basis,
    perm: Perm,
    radicands: Vec<BigRational>,
}

impl MonomialMatrix {
    pub fn identity(degree: Degree, level: usize, basis: Basis) -> Self {
        let m = degree.level_size(level);
        MonomialMatrix {
            degree,
            level,
            basis,
            perm: Perm::identity(m),
            radicands: vec![BigRational::one(); m],
        }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    /// Squared entry of column `v`.
    pub fn radicand(&self, v: usize) -> &BigRational {
        &self.radicands[v]
    }

    pub fn entry(&self, row: usize, col: usize) -> SqrtSum {
        if self.perm.apply(col) == row {
            SqrtSum::sqrt(&self.radicands[col]).expect("positive radicand")
        } else {
            SqrtSum::zero()
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &MonomialMatrix) -> Result<MonomialMatrix> {
        if self.size() != other.size() || self.basis != other.basis {
            return Err(Error::SizeMismatch(format!(
                "{}x{} ({:?}) times {}x{} ({:?})",
                self.size(),
                self.size(),
                self.basis,
                other.size(),
                other.size(),
                other.basis
            )));
        }
        let radicands = (0..self.size())
            .map(|v| &other.radicands[v] * &self.radicands[other.perm.apply(v)])
            .collect();
        Ok(MonomialMatrix {
            degree: self.degree,
            level: self.level,
            basis: self.basis,
            perm: self.perm.compose(&other.perm),
            radicands,
        })
    }

    /// Plain transpose.
    pub fn transpose(&self) -> MonomialMatrix {
        let mut radicands = vec![BigRational::zero(); self.size()];
        for (v, r) in self.radicands.iter().enumerate() {
            radicands[self.perm.apply(v)] = r.clone();
        }
        MonomialMatrix {
            degree: self.degree,
            level: self.level,
            basis: self.basis,
            perm: self.perm.inverse(),
            radicands,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity() && self.radicands.iter().all(One::is_one)
    }

    pub fn is_permutation_matrix(&self) -> bool {
        self.radicands.iter().all(One::is_one)
    }

    /// Exact unitarity: `M Mᵀ = I` in the normalized basis, or
    /// `r_v μ_p(X_{πv}) = μ_p(X_v)` for the weighted inner product of the raw
    /// basis.
    pub fn is_unitary(&self, p: &BernoulliDistribution) -> bool {
        match self.basis {
            Basis::Normalized => self.mul(&self.transpose()).is_ok_and(|m| m.is_identity()),
            Basis::Raw => {
                let level: Vec<Vertex> = Vertex::level_vertices(self.degree, self.level).collect();
                (0..self.size()).all(|v| {
                    &self.radicands[v] * p.cylinder_measure(&level[self.perm.apply(v)])
                        == p.cylinder_measure(&level[v])
                })
            }
        }
    }

    /// For every `n < N`, the image of each level-`n` indicator is again a
    /// level-`n` cylinder function.
    pub fn preserves_filtration(&self) -> bool {
        let d = self.degree.get();
        (0..self.level).all(|n| {
            let block = d.pow((self.level - n) as u32);
            (0..self.size() / block).all(|u| {
                let mut image: BTreeMap<usize, &BigRational> = BTreeMap::new();
                for v in u * block..(u + 1) * block {
                    image.insert(self.perm.apply(v), &self.radicands[v]);
                }
                let first = *image.keys().next().expect("nonempty block");
                let start = first - first % block;
                let value = image[&first];
                image.len() == block
                    && image.keys().all(|&w| w >= start && w < start + block)
                    && image.values().all(|r| *r == value)
            })
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        for v in 0..m {
            out[(self.perm.apply(v), v)] = self.radicands[v].to_f64().unwrap_or(f64::NAN).sqrt();
        }
        out
    }

    /// `{"size", "perm", "entries": [{"radicand", "coeff"}]}`, entries by
    /// source column, each `coeff · √radicand` with square-free radicand.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .radicands
            .iter()
            .map(|r| {
                let s = SqrtSum::sqrt(r).expect("positive radicand");
                let (rad, coeff) = s.terms().next().expect("nonzero entry");
                serde_json::json!({ "radicand": rad.to_string(), "coeff": coeff.to_string() })
            })
            .collect();
        serde_json::json!({
            "size": self.size(),
            "basis": self.basis,
            "perm": self.perm.images(),
            "entries": entries,
        })
    }

    /// Dense matrix, one row per line, decimal entries.
    pub fn to_csv(&self) -> String {
        let dense = self.to_dense();
        let mut out = String::new();
        for i in 0..dense.nrows() {
            let row: Vec<String> = (0..dense.ncols()).map(|j| format_decimal(dense[(i, j)])).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.15}")
    }
}

fn check_depth(g: &FinitaryAutomorphism, n: usize) -> Result<()> {
    if g.effective_depth() > n {
        return Err(Error::Precondition(format!(
            "level {n} is above the depth {} of the automorphism",
            g.effective_depth()
        )));
    }
    Ok(())
}

/// `κ_p(g)` on level-`N` cylinder functions: column `v` carries
/// `√(μ_p(X_v)/μ_p(X_{gv}))` in row `gv` (raw) or `1` (normalized).
pub fn koopman_level_matrix(
    g: &FinitaryAutomorphism,
    p: &BernoulliDistribution,
    n: usize,
    basis: Basis,
) -> Result<MonomialMatrix> {
    g.degree().check(p.degree())?;
    check_depth(g, n)?;
    let degree = g.degree();
    let level: Vec<Vertex> = Vertex::level_vertices(degree, n).collect();
    let perm = g.level_perm(n);
    let radicands = match basis {
        Basis::Normalized => vec![BigRational::one(); level.len()],
        Basis::Raw => level
            .iter()
            .enumerate()
            .map(|(i, v)| p.cylinder_measure(v) / p.cylinder_measure(&level[perm.apply(i)]))
            .collect(),
    };
    Ok(MonomialMatrix {
        degree,
        level: n,
        basis,
        perm,
        radicands,
    })
}

/// `(κ_p(g) ξ_A, ξ_A) = Σ √(μ_p(X_v) μ_p(X_{gv}))` over level-`N` cylinders
/// `v` of `A` with `gv` in `A`.
pub fn koopman_inner(
    g: &FinitaryAutomorphism,
    region: &CylinderSet,
    p: &BernoulliDistribution,
    n: usize,
) -> Result<SqrtSum> {
    g.degree().check(region.degree())?;
    g.degree().check(p.degree())?;
    check_depth(g, n)?;
    let mut products: BTreeMap<BigRational, usize> = BTreeMap::new();
    for v in region.refine(n)? {
        let w = g.apply(&v);
        if region.contains_cylinder(&w) {
            *products
                .entry(p.cylinder_measure(&v) * p.cylinder_measure(&w))
                .or_default() += 1;
        }
    }
    let mut total = SqrtSum::zero();
    for (product, count) in products {
        total = &total + &SqrtSum::term(BigRational::from_integer(count.into()), &product)?;
    }
    Ok(total)
}

/// Both sides of the decay inequality `(κ_p(g)ξ_A, ξ_A) ≤ γ^k μ_p(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaDecay {
    pub k: usize,
    pub level: usize,
    pub lhs: SqrtSum,
    pub rhs: SqrtSum,
    pub comparison: Comparison,
}

impl GammaDecay {
    pub fn holds(&self) -> bool {
        self.comparison.ordering.is_le()
    }

    pub fn is_equality(&self) -> bool {
        self.comparison.ordering.is_eq()
    }
}

/// Checks the decay inequality after certifying `g(A) = A` and `N_g ≥ k` on
/// every level-`N` cylinder of `A`.
pub fn gamma_decay_check(
    g: &FinitaryAutomorphism,
    region: &CylinderSet,
    p: &BernoulliDistribution,
    k: usize,
    n: usize,
) -> Result<GammaDecay> {
    check_depth(g, n)?;
    for v in region.refine(n)? {
        if !region.contains_cylinder(&g.apply(&v)) {
            return Err(Error::Precondition(format!(
                "the automorphism maps '{v}' out of the region"
            )));
        }
        let count = n_g(g, &v);
        if count < k {
            return Err(Error::Precondition(format!(
                "N_g = {count} < {k} on the cylinder '{v}'"
            )));
        }
    }
    let lhs = koopman_inner(g, region, p, n)?;
    let mass = SqrtSum::rational(p.set_measure(region)?);
    let rhs = if k == 0 {
        mass
    } else {
        let power = u32::try_from(k).map_err(|_| Error::Precondition(format!("k = {k} too large")))?;
        &p.a_gamma()?.gamma_pow(power) * &mass
    };
    let comparison = lhs.compare(&rhs);
    Ok(GammaDecay {
        k,
        level: n,
        lhs,
        rhs,
        comparison,
    })
}

/// The largest union of level-`N` cylinders inside `A` that `g` maps onto
/// itself and on which `N_g ≥ k`: the `g`-cycles on `V_N` lying entirely in
/// `{v ⊆ A : N_g(v) ≥ k}`.
pub fn decay_domain(
    g: &FinitaryAutomorphism,
    region: &CylinderSet,
    k: usize,
    n: usize,
) -> Result<CylinderSet> {
    check_depth(g, n)?;
    let good: std::collections::BTreeSet<Vertex> = region
        .refine(n)?
        .into_iter()
        .filter(|v| n_g(g, v) >= k)
        .collect();
    let mut keep = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in &good {
        if seen.contains(v) {
            continue;
        }
        let mut cycle = vec![v.clone()];
        let mut w = g.apply(v);
        while w != *v {
            cycle.push(w.clone());
            w = g.apply(&w);
        }
        let inside = cycle.iter().all(|u| good.contains(u));
        seen.extend(cycle.iter().cloned());
        if inside {
            keep.extend(cycle);
        }
    }
    CylinderSet::normalize(g.degree(), keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2() -> Degree {
        Degree::new(2).unwrap()
    }

    fn swap() -> FinitaryAutomorphism {
        FinitaryAutomorphism::at_vertex(d2(), Vertex::root(), Perm::transposition(2, 0, 1)).unwrap()
    }

    fn skewed() -> BernoulliDistribution {
        "[1/3, 2/3]".parse().unwrap()
    }

    #[test]
    fn swap_matrix_entries() {
        let raw = koopman_level_matrix(&swap(), &skewed(), 1, Basis::Raw).unwrap();
        assert_eq!(raw.radicand(0), &BigRational::new(1.into(), 2.into()));
        assert_eq!(raw.radicand(1), &BigRational::from_integer(2.into()));
        assert!(raw.entry(0, 0).is_zero());
        assert!(raw.is_unitary(&skewed()));
        let norm = koopman_level_matrix(&swap(), &skewed(), 1, Basis::Normalized).unwrap();
        assert!(norm.is_permutation_matrix());
        assert!(norm.is_unitary(&skewed()));
    }

    #[test]
    fn swap_attains_gamma() {
        let whole = CylinderSet::whole(d2());
        let decay = gamma_decay_check(&swap(), &whole, &skewed(), 1, 1).unwrap();
        assert!(decay.is_equality());
        assert!(decay.comparison.exact);
        let expected = SqrtSum::term(BigRational::new(2.into(), 3.into()), &BigRational::from_integer(2.into())).unwrap();
        assert_eq!(decay.lhs, expected);
    }

    #[test]
    fn depth_precondition() {
        let deep = FinitaryAutomorphism::at_vertex(d2(), Vertex::parse("01", d2()).unwrap(), Perm::transposition(2, 0, 1)).unwrap();
        assert!(koopman_level_matrix(&deep, &skewed(), 2, Basis::Raw).is_err());
        assert!(koopman_level_matrix(&deep, &skewed(), 3, Basis::Raw).is_ok());
    }

    #[test]
    fn json_export_shape() {
        let raw = koopman_level_matrix(&swap(), &skewed(), 1, Basis::Raw).unwrap();
        let json = raw.to_json();
        assert_eq!(json["size"], 2);
        assert_eq!(json["entries"][0]["radicand"], "2");
        assert_eq!(json["entries"][0]["coeff"], "1/2");
        assert!(raw.to_csv().starts_with("0,1.414"));
    }
}
