use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_DIVISION_LIMIT: u32 = 10_000;
/// Tolerance used when a sign cannot be decided exactly.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A finite sum `Σ c_r √r` with rational coefficients and distinct
/// square-free integer radicands `r ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SqrtSum {
    terms: BTreeMap<BigInt, BigRational>,
}

/// Outcome of comparing two radical sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub ordering: Ordering,
    /// False when the answer came from the floating-point fallback.
    pub exact: bool,
}

/// Writes `n = s² · f` with `f` square-free when all prime factors of `n`
/// above the trial-division limit occur at most once or as a perfect square
/// cofactor.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut i: u32 = 2;
    while i <= TRIAL_DIVISION_LIMIT {
        let bi = BigInt::from(i);
        if &bi * &bi > rest {
            break;
        }
        if (&rest % &bi).is_zero() {
            rest /= &bi;
            if (&rest % &bi).is_zero() {
                rest /= &bi;
                outside *= &bi;
                continue;
            }
            inside *= &bi;
        }
        i += 1;
    }
    if rest > BigInt::one() {
        let root = rest.sqrt();
        if &root * &root == rest {
            outside *= root;
        } else {
            inside *= rest;
        }
    }
    (outside, inside)
}

impl SqrtSum {
    pub fn zero() -> Self {
        SqrtSum::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> Self {
        let mut s = SqrtSum::zero();
        s.add_term(BigInt::one(), q);
        s
    }

    /// `√q` for a nonnegative rational `q`.
    pub fn sqrt(q: &BigRational) -> Result<Self> {
        Self::term(BigRational::one(), q)
    }

    /// `coeff · √radicand`.
    pub fn term(coeff: BigRational, radicand: &BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Precondition(format!(
                "negative radicand {radicand}"
            )));
        }
        if radicand.is_zero() || coeff.is_zero() {
            return Ok(SqrtSum::zero());
        }
        // √(n/m) = √(n·m) / m
        let n = radicand.numer() * radicand.denom();
        let (outside, inside) = square_free_split(&n);
        let c = coeff * BigRational::new(outside, radicand.denom().clone());
        let mut s = SqrtSum::zero();
        s.add_term(inside, c);
        Ok(s)
    }

    fn add_term(&mut self, radicand: BigInt, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational when no irrational radicand survives.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .get(&BigInt::one())
                .cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, q: &BigRational) -> SqrtSum {
        if q.is_zero() {
            return SqrtSum::zero();
        }
        SqrtSum {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> SqrtSum {
        let mut acc = SqrtSum::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) * r.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    /// Sign of the value: exact for at most two radicands, otherwise decided
    /// in floating point with values within [`FLOAT_TOLERANCE`] reported as
    /// zero.
    pub fn signum(&self) -> Comparison {
        let terms: Vec<_> = self.terms.iter().collect();
        match terms.as_slice() {
            [] => Comparison {
                ordering: Ordering::Equal,
                exact: true,
            },
            [(_, c)] => Comparison {
                ordering: sign_of(c),
                exact: true,
            },
            [(r1, c1), (r2, c2)] => {
                let s1 = sign_of(c1);
                let s2 = sign_of(c2);
                let ordering = if s1 == s2 {
                    s1
                } else {
                    // compare |c1|√r1 against |c2|√r2 by squaring
                    let m1 = *c1 * *c1 * BigRational::from_integer((*r1).clone());
                    let m2 = *c2 * *c2 * BigRational::from_integer((*r2).clone());
                    match m1.cmp(&m2) {
                        Ordering::Greater => s1,
                        Ordering::Less => s2,
                        Ordering::Equal => Ordering::Equal,
                    }
                };
                Comparison {
                    ordering,
                    exact: true,
                }
            }
            _ => {
                let v = self.to_f64();
                let ordering = if v.abs() <= FLOAT_TOLERANCE {
                    Ordering::Equal
                } else if v > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
                Comparison {
                    ordering,
                    exact: false,
                }
            }
        }
    }

    /// Compares `self` with `other` via the sign of the difference.
    pub fn compare(&self, other: &SqrtSum) -> Comparison {
        (self - other).signum()
    }
}

fn sign_of(q: &BigRational) -> Ordering {
    q.cmp(&BigRational::zero())
}

impl From<BigRational> for SqrtSum {
    fn from(q: BigRational) -> Self {
        SqrtSum::rational(q)
    }
}

impl Add<&SqrtSum> for &SqrtSum {
    type Output = SqrtSum;
    fn add(self, rhs: &SqrtSum) -> SqrtSum {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.add_term(r.clone(), c.clone());
        }
        out
    }
}

impl Add for SqrtSum {
    type Output = SqrtSum;
    fn add(self, rhs: SqrtSum) -> SqrtSum {
        &self + &rhs
    }
}

impl Neg for &SqrtSum {
    type Output = SqrtSum;
    fn neg(self) -> SqrtSum {
        SqrtSum {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

impl Neg for SqrtSum {
    type Output = SqrtSum;
    fn neg(self) -> SqrtSum {
        -&self
    }
}

impl Sub<&SqrtSum> for &SqrtSum {
    type Output = SqrtSum;
    fn sub(self, rhs: &SqrtSum) -> SqrtSum {
        self + &(-rhs)
    }
}

impl Sub for SqrtSum {
    type Output = SqrtSum;
    fn sub(self, rhs: SqrtSum) -> SqrtSum {
        &self - &rhs
    }
}

impl Mul<&SqrtSum> for &SqrtSum {
    type Output = SqrtSum;
    fn mul(self, rhs: &SqrtSum) -> SqrtSum {
        let mut out = SqrtSum::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                // √r1·√r2 = g·√(r1 r2 / g²) with g = gcd(r1, r2)
                let g = num_integer::Integer::gcd(r1, r2);
                let radicand = (r1 / &g) * (r2 / &g);
                out.add_term(radicand, c1 * c2 * BigRational::from_integer(g));
            }
        }
        out
    }
}

impl Mul for SqrtSum {
    type Output = SqrtSum;
    fn mul(self, rhs: SqrtSum) -> SqrtSum {
        &self * &rhs
    }
}

impl fmt::Display for SqrtSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if r.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalizes_radicands() {
        let a = SqrtSum::sqrt(&q(2, 9)).unwrap();
        let b = SqrtSum::term(q(1, 3), &q(2, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(SqrtSum::sqrt(&q(4, 9)).unwrap().as_rational(), Some(q(2, 3)));
        assert_eq!(
            SqrtSum::sqrt(&q(18, 1)).unwrap(),
            SqrtSum::term(q(3, 1), &q(2, 1)).unwrap()
        );
    }

    #[test]
    fn large_square_cofactor_is_extracted() {
        let p = BigInt::from(1_000_003u64);
        let n = BigRational::from_integer(&p * &p * BigInt::from(3));
        let s = SqrtSum::sqrt(&n).unwrap();
        let (r, c) = s.terms().next().unwrap();
        assert_eq!(*r, BigInt::from(3));
        assert_eq!(*c, BigRational::from_integer(p));
    }

    #[test]
    fn products_combine_radicands() {
        let s2 = SqrtSum::sqrt(&q(2, 1)).unwrap();
        let s6 = SqrtSum::sqrt(&q(6, 1)).unwrap();
        let prod = &s2 * &s6;
        assert_eq!(prod, SqrtSum::term(q(2, 1), &q(3, 1)).unwrap());
        assert_eq!((&s2 * &s2).as_rational(), Some(q(2, 1)));
    }

    #[test]
    fn exact_two_term_signs() {
        // 2√2/3 < 1 since 8/9 < 1
        let gamma = SqrtSum::term(q(2, 3), &q(2, 1)).unwrap();
        let c = gamma.compare(&SqrtSum::one());
        assert_eq!(c.ordering, Ordering::Less);
        assert!(c.exact);
        assert_eq!(gamma.compare(&gamma).ordering, Ordering::Equal);
    }

    #[test]
    fn three_radicands_use_float_fallback() {
        let s = &(&SqrtSum::sqrt(&q(2, 1)).unwrap() + &SqrtSum::sqrt(&q(3, 1)).unwrap())
            - &SqrtSum::sqrt(&q(5, 1)).unwrap();
        let c = s.signum();
        assert_eq!(c.ordering, Ordering::Greater);
        assert!(!c.exact);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let g = SqrtSum::term(q(2, 3), &q(2, 1)).unwrap();
        assert_eq!(g.pow(2).as_rational(), Some(q(8, 9)));
        assert_eq!(g.pow(3), &(&g * &g) * &g);
        assert_eq!(g.pow(0), SqrtSum::one());
    }

    fn arb_sum() -> impl Strategy<Value = SqrtSum> {
        proptest::collection::vec((-20i64..20, 1i64..8, 1i64..30, 1i64..30), 0..4).prop_map(
            |terms| {
                terms.into_iter().fold(SqrtSum::zero(), |acc, (c, cd, rn, rd)| {
                    &acc + &SqrtSum::term(q(c, cd), &q(rn, rd)).unwrap()
                })
            },
        )
    }

    proptest! {
        #[test]
        fn square_of_sum_expands(a in arb_sum(), b in arb_sum()) {
            let lhs = (&a + &b).pow(2);
            let two = SqrtSum::rational(q(2, 1));
            let rhs = &(&a.pow(2) + &(&two * &(&a * &b))) + &b.pow(2);
            prop_assert!((&lhs - &rhs).is_zero());
        }

        #[test]
        fn float_value_is_additive(a in arb_sum(), b in arb_sum()) {
            let s = &a + &b;
            prop_assert!((s.to_f64() - a.to_f64() - b.to_f64()).abs() < 1e-9);
        }
    }
}
