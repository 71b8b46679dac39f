use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Singular values at or below this are treated as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-8;

/// Singular values this close above the threshold trigger a conditioning warning.
const WARNING_BAND: f64 = 1e-5;

/// Orthonormal basis of a kernel, with the smallest singular value kept.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub basis: DMatrix<f64>,
    /// Smallest singular value above the threshold, if any.
    pub gap: Option<f64>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ill_conditioned(&self) -> bool {
        self.gap.is_some_and(|s| s < WARNING_BAND)
    }
}

/// Kernel of `a` from its singular value decomposition.
pub fn kernel(a: &DMatrix<f64>) -> Kernel {
    let cols = a.ncols();
    if cols == 0 {
        return Kernel { basis: DMatrix::zeros(0, 0), gap: None };
    }
    // pad to at least as many rows as columns so that Vᵀ is square
    let a = if a.nrows() < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested Vᵀ");
    let mut null = Vec::new();
    let mut gap: Option<f64> = None;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= KERNEL_THRESHOLD {
            null.push(v_t.row(i).transpose());
        } else {
            gap = Some(gap.map_or(s, |g: f64| g.min(s)));
        }
    }
    let basis = if null.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&null)
    };
    Kernel { basis, gap }
}

/// Joint fixed space `{η : Mη = η for all M}`.
#[derive(Clone, Debug)]
pub struct FixedSpace {
    pub basis: DMatrix<f64>,
    /// Orthogonal projection onto the fixed space.
    pub projection: DMatrix<f64>,
    pub ill_conditioned: bool,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `max |P² − P|` and `max |Pᵀ − P|`.
    pub fn projection_defects(&self) -> (f64, f64) {
        let p = &self.projection;
        let idem = (p * p - p).abs().max();
        let sym = (p.transpose() - p).abs().max();
        (idem, sym)
    }
}

/// Kernel of the stacked `M_i − I`. With no matrices the whole space is fixed.
pub fn fixed_space(size: usize, mats: &[DMatrix<f64>]) -> Result<FixedSpace> {
    if let Some(m) = mats.iter().find(|m| m.nrows() != size || m.ncols() != size) {
        return Err(Error::SizeMismatch(format!(
            "{}x{} matrix in a family of size {size}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut stacked = DMatrix::zeros(size * mats.len().max(1), size);
    let id = DMatrix::<f64>::identity(size, size);
    for (i, m) in mats.iter().enumerate() {
        stacked
            .view_mut((i * size, 0), (size, size))
            .copy_from(&(m - &id));
    }
    let k = kernel(&stacked);
    let projection = &k.basis * k.basis.transpose();
    Ok(FixedSpace {
        ill_conditioned: k.ill_conditioned(),
        basis: k.basis,
        projection,
    })
}

/// Fixed space of permutation matrices in exact arithmetic: the projection
/// averages over each orbit of the generated group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactFixedSpace {
    pub orbits: Vec<Vec<usize>>,
    pub projection: Vec<Vec<BigRational>>,
}

impl ExactFixedSpace {
    pub fn dim(&self) -> usize {
        self.orbits.len()
    }
}

pub fn fixed_space_exact(size: usize, perms: &[Perm]) -> Result<ExactFixedSpace> {
    if let Some(p) = perms.iter().find(|p| p.len() != size) {
        return Err(Error::SizeMismatch(format!("permutation of {} points, expected {size}", p.len())));
    }
    let mut seen = vec![false; size];
    let mut orbits = Vec::new();
    for start in 0..size {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = BTreeSet::from([start]);
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for p in perms {
                let y = p.apply(x);
                if orbit.insert(y) {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        orbits.push(orbit.into_iter().collect::<Vec<_>>());
    }
    let mut projection = vec![vec![BigRational::zero(); size]; size];
    for orbit in &orbits {
        let w = BigRational::new(1.into(), orbit.len().into());
        for &i in orbit {
            for &j in orbit {
                projection[i][j] = w.clone();
            }
        }
    }
    Ok(ExactFixedSpace { orbits, projection })
}

/// Dimension of `{X : A_i X = X B_i for all i}`.
pub fn intertwiner_dim(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(format!(
            "{} generators against {}",
            a.len(),
            b.len()
        )));
    }
    let m = a.first().map_or(0, |x| x.nrows());
    let n = b.first().map_or(0, |x| x.nrows());
    for x in a.iter().chain(b) {
        if !x.is_square() {
            return Err(Error::SizeMismatch(format!("{}x{} matrix is not square", x.nrows(), x.ncols())));
        }
    }
    if a.iter().any(|x| x.nrows() != m) || b.iter().any(|x| x.nrows() != n) {
        return Err(Error::SizeMismatch("matrices of one family differ in size".into()));
    }
    if a.is_empty() {
        return Ok(m * n);
    }
    // vec(A X − X B) = (I_n ⊗ A − Bᵀ ⊗ I_m) vec X
    let unknowns = m * n;
    let mut stacked = DMatrix::zeros(unknowns * a.len(), unknowns);
    let id_m = DMatrix::<f64>::identity(m, m);
    let id_n = DMatrix::<f64>::identity(n, n);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let block = id_n.kronecker(ai) - bi.transpose().kronecker(&id_m);
        stacked
            .view_mut((i * unknowns, 0), (unknowns, unknowns))
            .copy_from(&block);
    }
    Ok(kernel(&stacked).dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_matrix(p: &Perm) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(p.len(), p.len());
        for i in 0..p.len() {
            m[(p.apply(i), i)] = 1.0;
        }
        m
    }

    #[test]
    fn identity_fixes_everything() {
        let f = fixed_space(4, &[DMatrix::identity(4, 4)]).unwrap();
        assert_eq!(f.dim(), 4);
        assert_eq!(fixed_space(3, &[]).unwrap().dim(), 3);
    }

    #[test]
    fn cycle_fixes_constants() {
        let c = Perm::cycle(8);
        let f = fixed_space(8, &[perm_matrix(&c)]).unwrap();
        assert_eq!(f.dim(), 1);
        let exact = fixed_space_exact(8, &[c]).unwrap();
        assert_eq!(exact.dim(), 1);
        let q = exact.projection[0][5].clone();
        assert_eq!(q, BigRational::new(1.into(), 8.into()));
        assert!((f.projection[(0, 5)] - 0.125).abs() < 1e-12);
        let (idem, sym) = f.projection_defects();
        assert!(idem < 1e-10 && sym < 1e-10);
    }

    #[test]
    fn characters_of_order_two() {
        let plus = vec![DMatrix::from_element(1, 1, 1.0)];
        let minus = vec![DMatrix::from_element(1, 1, -1.0)];
        assert_eq!(intertwiner_dim(&plus, &minus).unwrap(), 0);
        assert_eq!(intertwiner_dim(&plus, &plus).unwrap(), 1);
        assert!(intertwiner_dim(&plus, &[]).is_err());
    }

    #[test]
    fn size_mismatch() {
        assert!(fixed_space(3, &[DMatrix::identity(2, 2)]).is_err());
    }
}
