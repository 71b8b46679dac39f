//! Bernoulli measures on the boundary of the tree.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::autom::FinitaryAutomorphism;
use crate::error::{Error, Result};
use crate::rep::SqrtSum;
use crate::tree::{CylinderSet, Degree, Vertex};

/// A rational probability vector `p` on the alphabet, inducing the product
/// measure `μ_p` on the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BernoulliDistribution {
    p: Vec<BigRational>,
}

/// `a(p) = min{p_i/p_j : p_i > p_j}` and `γ(p) = 2√a/(a+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaConstants {
    pub a: BigRational,
    /// `γ` as an exact radical.
    pub gamma: SqrtSum,
    pub gamma_f64: f64,
}

/// Level-`n` Hellinger affinity between two Bernoulli measures.
#[derive(Clone, Debug, PartialEq)]
pub struct HellingerAffinity {
    pub level: u32,
    pub exact: SqrtSum,
    pub value: f64,
}

impl BernoulliDistribution {
    pub fn new(p: Vec<BigRational>) -> Result<Self> {
        Degree::new(p.len())?;
        if let Some(bad) = p.iter().find(|x| !x.is_positive()) {
            return Err(Error::InvalidDistribution(format!(
                "weight {bad} is not positive"
            )));
        }
        let total: BigRational = p.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(BernoulliDistribution { p })
    }

    pub fn uniform(degree: Degree) -> Self {
        let d = degree.get();
        BernoulliDistribution {
            p: vec![BigRational::new(1.into(), d.into()); d],
        }
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        if pairs.iter().any(|&(_, den)| den == 0) {
            return Err(Error::InvalidDistribution("zero denominator".into()));
        }
        Self::new(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    pub fn degree(&self) -> Degree {
        Degree::new(self.p.len()).expect("validated at construction")
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.p
    }

    pub fn weight(&self, letter: usize) -> &BigRational {
        &self.p[letter]
    }

    /// Always true: construction enforces positivity and normalization.
    pub fn in_p(&self) -> bool {
        true
    }

    /// Pairwise distinct weights.
    pub fn in_p_star(&self) -> bool {
        let mut sorted = self.p.clone();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_uniform(&self) -> bool {
        self.p.windows(2).all(|w| w[0] == w[1])
    }

    /// The distribution with the letters relabelled by `perm`: weight `i`
    /// becomes the weight of letter `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.p.len() {
            return Err(Error::DegreeMismatch(self.p.len(), perm.len()));
        }
        Self::new(perm.iter().map(|&i| self.p[i].clone()).collect())
    }

    pub fn cylinder_measure(&self, v: &Vertex) -> BigRational {
        v.letters()
            .iter()
            .fold(BigRational::one(), |acc, &x| acc * &self.p[x as usize])
    }

    pub fn set_measure(&self, set: &CylinderSet) -> Result<BigRational> {
        self.degree().check(set.degree())?;
        Ok(set
            .vertices()
            .map(|v| self.cylinder_measure(v))
            .sum())
    }

    /// `dμ_p(g⁻¹x)/dμ_p(x)` on `X_v`, which equals
    /// `μ_p(X_{g⁻¹v}) / μ_p(X_v)` once `v` lies at or below the depth of `g`.
    pub fn rn_derivative(&self, g: &FinitaryAutomorphism, v: &Vertex) -> Result<BigRational> {
        self.degree().check(g.degree())?;
        let depth = g.effective_depth();
        if v.level() < depth {
            return Err(Error::Precondition(format!(
                "vertex '{v}' lies above the depth {depth} of the automorphism"
            )));
        }
        let pre = g.inverse().apply(v);
        Ok(self.cylinder_measure(&pre) / self.cylinder_measure(v))
    }

    pub fn a_gamma(&self) -> Result<GammaConstants> {
        if !self.in_p_star() {
            return Err(Error::NotInPStar);
        }
        let mut a: Option<BigRational> = None;
        for pi in &self.p {
            for pj in &self.p {
                if pi > pj {
                    let r = pi / pj;
                    if a.as_ref().is_none_or(|m| r < *m) {
                        a = Some(r);
                    }
                }
            }
        }
        let a = a.ok_or(Error::NotInPStar)?;
        let coeff = BigRational::from_integer(2.into()) / (&a + BigRational::one());
        let gamma = SqrtSum::term(coeff, &a)?;
        let gamma_f64 = gamma.to_f64();
        Ok(GammaConstants {
            a,
            gamma,
            gamma_f64,
        })
    }

    /// `(Σ √(p_i q_i))^n`.
    pub fn hellinger_affinity(&self, other: &Self, n: u32) -> Result<HellingerAffinity> {
        if self.p.len() != other.p.len() {
            return Err(Error::DegreeMismatch(self.p.len(), other.p.len()));
        }
        let mut base = SqrtSum::zero();
        for (pi, qi) in self.p.iter().zip(&other.p) {
            base = &base + &SqrtSum::sqrt(&(pi * qi))?;
        }
        let value = base.to_f64().powi(n as i32);
        Ok(HellingerAffinity {
            level: n,
            exact: base.pow(n),
            value,
        })
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl GammaConstants {
    /// `γ^k` as an exact radical.
    pub fn gamma_pow(&self, k: u32) -> SqrtSum {
        self.gamma.pow(k)
    }
}

impl fmt::Display for BernoulliDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.p.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Parses `"[1/3, 2/3]"`, `"1/3,2/3"` or `"p = [1/3, 2/3]"`.
impl FromStr for BernoulliDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body
            .strip_prefix("p")
            .map(|r| r.trim_start())
            .and_then(|r| r.strip_prefix('='))
            .unwrap_or(body)
            .trim();
        let body = body
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(body);
        let p = body
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<BigRational>()
                    .map_err(|_| Error::InvalidDistribution(format!("bad rational '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }
}
