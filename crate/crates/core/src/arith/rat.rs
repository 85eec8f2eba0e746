use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational number reduced modulo 1: `num/den` with `gcd(num, den) = 1`
/// and `0 <= num < den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat {
    num: BigUint,
    den: BigUint,
}

impl Rat {
    pub fn zero() -> Self {
        Rat {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// Builds `p/q mod 1` from signed parts.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let p = p.into();
        let mut q = q.into();
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut p = p;
        if q.sign() == Sign::Minus {
            p = -p;
            q = -q;
        }
        let r = p.mod_floor(&q);
        Ok(Self::from_reduced_parts(r, q))
    }

    /// `p/q mod 1` for small unsigned parts; panics when `q == 0`.
    pub fn small(p: u64, q: u64) -> Self {
        Self::new(p, q).expect("nonzero denominator")
    }

    pub fn from_big_rational(r: &BigRational) -> Self {
        Self::new(r.numer().clone(), r.denom().clone()).expect("BigRational has nonzero denominator")
    }

    // `r` in [0, q), q > 0
    fn from_reduced_parts(r: BigInt, q: BigInt) -> Self {
        let g = r.gcd(&q);
        let (r, q) = if g.is_one() || g.is_zero() {
            (r, q)
        } else {
            (r / &g, q / &g)
        };
        let num = r.to_biguint().expect("nonnegative residue");
        let den = q.to_biguint().expect("positive denominator");
        if num.is_zero() {
            return Rat::zero();
        }
        Rat { num, den }
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `k * self mod 1`.
    pub fn mul_int(&self, k: &BigUint) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let prod = (&self.num * k) % &self.den;
        let g = prod.gcd(&self.den);
        if prod.is_zero() {
            return Rat::zero();
        }
        Rat {
            num: &prod / &g,
            den: &self.den / &g,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Rat {
        self.mul_int(&BigUint::from(k))
    }

    /// `self + other mod 1`.
    pub fn add(&self, other: &Rat) -> Rat {
        let num = &self.num * &other.den + &other.num * &self.den;
        let den = &self.den * &other.den;
        Self::from_reduced_parts(BigInt::from(num % &den), BigInt::from(den))
    }

    pub fn neg(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        Rat {
            num: &self.den - &self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    /// Signed combination `sum c_i * v_i + offset mod 1`.
    pub fn lin_comb(terms: &[(i64, &Rat)], offset: &Rat) -> Rat {
        let mut acc = offset.clone();
        for (c, v) in terms {
            let scaled = v.mul_u64(c.unsigned_abs());
            acc = if *c < 0 {
                acc.sub(&scaled)
            } else {
                acc.add(&scaled)
            };
        }
        acc
    }

    /// Distance to the nearest integer, `min(v, 1 - v)`, as an exact rational.
    pub fn dist_to_int(&self) -> BigRational {
        let twice = &self.num * 2u32;
        let n = if twice > self.den {
            &self.den - &self.num
        } else {
            self.num.clone()
        };
        BigRational::new(BigInt::from(n), BigInt::from(self.den.clone()))
    }

    /// The signed representative of `self` in `[-1/2, 1/2)`.
    pub fn centered(&self) -> BigRational {
        let r = self.to_big_rational();
        if &self.num * 2u32 >= self.den {
            r - BigRational::one()
        } else {
            r
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_big_rational().to_f64().unwrap_or(0.0)
    }

    /// Denominator as `u64` when it fits.
    pub fn denom_u64(&self) -> Option<u64> {
        self.den.to_u64()
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_mod_one() {
        assert_eq!(Rat::small(2, 6), Rat::small(1, 3));
        assert_eq!(Rat::small(7, 3), Rat::small(1, 3));
        assert_eq!(Rat::new(-1, 3).unwrap(), Rat::small(2, 3));
        assert_eq!(Rat::new(1, -3).unwrap(), Rat::small(2, 3));
        assert_eq!(Rat::small(4, 2), Rat::zero());
        assert_eq!(Rat::new(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn mul_int_examples() {
        assert_eq!(Rat::small(1, 3).mul_u64(3), Rat::zero());
        assert_eq!(Rat::small(2, 7).mul_u64(5), Rat::small(3, 7));
        assert_eq!(Rat::small(2, 7).mul_u64(5).to_string(), "3/7");
        assert_eq!(Rat::zero().to_string(), "0/1");
    }

    #[test]
    fn dist_to_int_examples() {
        assert!(Rat::zero().dist_to_int().is_zero());
        assert_eq!(
            Rat::small(3, 4).dist_to_int(),
            BigRational::new(1.into(), 4.into())
        );
        assert_eq!(
            Rat::small(1, 2).dist_to_int(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn centered_range() {
        assert_eq!(
            Rat::small(3, 4).centered(),
            BigRational::new((-1).into(), 4.into())
        );
        assert_eq!(
            Rat::small(1, 2).centered(),
            BigRational::new((-1).into(), 2.into())
        );
    }

    #[test]
    fn lin_comb_signs() {
        let x = Rat::small(1, 2);
        let y = Rat::small(1, 6);
        assert_eq!(Rat::lin_comb(&[(1, &x), (-1, &y)], &Rat::zero()), Rat::small(1, 3));
        assert_eq!(
            Rat::lin_comb(&[(3, &x), (-3, &y)], &Rat::small(1, 3)),
            Rat::small(1, 3)
        );
    }
}
