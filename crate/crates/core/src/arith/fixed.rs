use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::bound::Bound;
use super::rat::Rat;
use crate::error::{Error, Result};

/// A real number mod 1 in binary fixed point with a certified error bound.
///
/// The represented value is `mantissa / 2^bits`; the true value lies within
/// `err_mult / 2^bits` of it (modulo 1). Multiplying by an integer `k`
/// multiplies the error by exactly `k`, so certification is one bignum
/// product per step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedReal {
    mantissa: BigUint,
    bits: u32,
    err_mult: BigUint,
}

/// Bits needed so that multipliers up to `s_max` keep the error below `eps`:
/// `ceil(log2 s_max) + ceil(log2 1/eps) + 8`.
pub fn bits_for(s_max: &BigUint, eps: f64) -> u32 {
    assert!(eps > 0.0 && eps < 1.0, "target error must lie in (0, 1)");
    let log_s = if s_max <= &BigUint::one() {
        0
    } else {
        (s_max - 1u32).bits() as u32
    };
    let log_eps = (1.0 / eps).log2().ceil() as u32;
    log_s + log_eps + 8
}

impl FixedReal {
    /// Builds a value from a raw mantissa; `mantissa` is reduced mod `2^bits`.
    pub fn from_raw(mantissa: BigUint, bits: u32, err_mult: BigUint) -> Result<Self> {
        if bits < 3 {
            return Err(Error::precondition("fixed-point values need at least 3 bits"));
        }
        let modulus = BigUint::one() << bits;
        let v = FixedReal {
            mantissa: mantissa % modulus,
            bits,
            err_mult: err_mult.max(BigUint::one()),
        };
        v.check()?;
        Ok(v)
    }

    /// `floor(2^bits * r)`, error below one ulp.
    pub fn from_rat(r: &Rat, bits: u32) -> Result<Self> {
        let m = (r.numer() << bits) / r.denom();
        Self::from_raw(m, bits, BigUint::one())
    }

    /// Fractional part of `sqrt(n)` for a positive non-square `n`.
    pub fn sqrt_frac(n: u64, bits: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::PerfectSquare(n));
        }
        let big = BigUint::from(n);
        let int = big.sqrt();
        if &int * &int == big {
            return Err(Error::PerfectSquare(n));
        }
        // floor(sqrt(n * 4^bits)) = floor(2^bits * sqrt(n))
        let scaled = (big << (2 * bits as usize)).sqrt();
        let m = scaled - (int << bits);
        Self::from_raw(m, bits, BigUint::one())
    }

    fn check(&self) -> Result<()> {
        // err_mult * 2^-bits < 1/4  <=>  err_mult < 2^(bits - 2)
        if self.err_mult.bits() > u64::from(self.bits - 2) {
            return Err(Error::PrecisionExhausted {
                bits: self.bits,
                needed: self.err_mult.bits() + 2,
            });
        }
        Ok(())
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn err_mult(&self) -> &BigUint {
        &self.err_mult
    }

    fn modulus(&self) -> BigUint {
        BigUint::one() << self.bits
    }

    /// `k * self mod 1`; the error multiplier scales by `k`.
    pub fn mul_int(&self, k: &BigUint) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::precondition("multiplier must be positive"));
        }
        let v = FixedReal {
            mantissa: (&self.mantissa * k) % self.modulus(),
            bits: self.bits,
            err_mult: &self.err_mult * k,
        };
        v.check()?;
        Ok(v)
    }

    /// Signed combination `sum c_i * v_i + offset mod 1`.
    ///
    /// Errors add as `sum |c_i| err_i`, plus one ulp when `offset` is not a
    /// multiple of `2^-bits`.
    pub fn lin_comb(terms: &[(i64, &FixedReal)], offset: &Rat) -> Result<Self> {
        let bits = terms
            .first()
            .map(|(_, v)| v.bits)
            .ok_or_else(|| Error::precondition("empty linear combination"))?;
        let mut acc = BigInt::zero();
        let mut err = BigUint::zero();
        for (c, v) in terms {
            if v.bits != bits {
                return Err(Error::BitsMismatch(bits, v.bits));
            }
            acc += BigInt::from(*c) * BigInt::from(v.mantissa.clone());
            err += &v.err_mult * c.unsigned_abs();
        }
        let (off, rem) = (offset.numer() << bits).div_rem(offset.denom());
        acc += BigInt::from(off);
        if !rem.is_zero() {
            err += 1u32;
        }
        let modulus = BigInt::from(BigUint::one() << bits);
        let m = acc.mod_floor(&modulus).to_biguint().expect("nonnegative residue");
        Self::from_raw(m, bits, err)
    }

    /// Absolute error bound `err_mult / 2^bits`.
    pub fn error_bound(&self) -> BigRational {
        BigRational::new(BigInt::from(self.err_mult.clone()), BigInt::from(self.modulus()))
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(BigInt::from(self.mantissa.clone()), BigInt::from(self.modulus()))
    }

    /// Distance to the nearest integer as a certified interval.
    pub fn dist_to_int(&self) -> Bound {
        let modulus = self.modulus();
        let other = &modulus - &self.mantissa;
        let d = if other < self.mantissa {
            other
        } else {
            self.mantissa.clone()
        };
        Bound::new(
            BigRational::new(BigInt::from(d), BigInt::from(modulus)),
            self.error_bound(),
        )
    }

    /// Mantissa distance to the nearest integer, in ulps.
    pub fn dist_to_int_ulps(&self) -> BigUint {
        let other = self.modulus() - &self.mantissa;
        if other < self.mantissa {
            other
        } else {
            self.mantissa.clone()
        }
    }

    /// Signed representative in `[-1/2, 1/2)` of the stored value.
    pub fn centered(&self) -> BigRational {
        let half = BigUint::one() << (self.bits - 1);
        let v = self.value();
        if self.mantissa >= half {
            v - BigRational::one()
        } else {
            v
        }
    }

    /// `floor(g * value)` for the stored mantissa, used for grid cells.
    pub fn cell(&self, g: u32) -> u32 {
        ((&self.mantissa * g) >> self.bits)
            .to_u32()
            .expect("cell index below grid size")
    }

    pub fn to_f64(&self) -> f64 {
        // top 64 bits are plenty for an f64
        if self.bits > 64 {
            let top = (&self.mantissa >> (self.bits - 64)).to_u64().unwrap_or(0);
            top as f64 / 2f64.powi(64)
        } else {
            self.mantissa.to_f64().unwrap_or(0.0) / 2f64.powi(self.bits as i32)
        }
    }

    /// Decimal expansion of the stored value truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = (&self.mantissa * BigUint::from(10u32).pow(digits as u32)) >> self.bits;
        format!("0.{:0>width$}", scaled.to_string(), width = digits)
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_mantissa_brackets() {
        let bits = 64;
        let v = FixedReal::sqrt_frac(2, bits).unwrap();
        // (m + 2^64)^2 <= 2 * 2^128 < (m + 2^64 + 1)^2
        let m = v.mantissa() + (BigUint::one() << bits);
        let target = BigUint::from(2u32) << 128;
        assert!(&m * &m <= target);
        let m1 = &m + 1u32;
        assert!(&m1 * &m1 > target);
        assert_eq!(v.err_mult(), &BigUint::one());
    }

    #[test]
    fn sqrt_rejects_squares() {
        assert_eq!(FixedReal::sqrt_frac(4, 64), Err(Error::PerfectSquare(4)));
        assert_eq!(FixedReal::sqrt_frac(0, 64), Err(Error::PerfectSquare(0)));
    }

    #[test]
    fn mul_two_matches_double_precision() {
        let lo = FixedReal::sqrt_frac(2, 64).unwrap().mul_int(&2u32.into()).unwrap();
        let hi = FixedReal::sqrt_frac(2, 128).unwrap().mul_int(&2u32.into()).unwrap();
        let bound = lo.error_bound();
        assert_eq!(bound, BigRational::new(2.into(), BigInt::from(1u128 << 64)));
        let diff = lo.value() - hi.value();
        assert!(num_traits::Signed::abs(&diff) <= bound + hi.error_bound());
        assert!((lo.to_f64() - 0.828_427_124_746_19).abs() < 1e-12);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let v = FixedReal::sqrt_frac(2, 16).unwrap();
        assert!(v.mul_int(&BigUint::from(1u32 << 13)).is_ok());
        let err = v.mul_int(&BigUint::from(1u32 << 14)).unwrap_err();
        assert!(err.is_precision());
    }

    #[test]
    fn dist_is_symmetric_about_half() {
        let v = FixedReal::from_rat(&Rat::small(9, 10), 64).unwrap();
        let d = v.dist_to_int();
        assert!(d.contains(&BigRational::new(1.into(), 10.into())));
    }

    #[test]
    fn bits_formula() {
        assert_eq!(bits_for(&BigUint::from(1_000_000u32), 1e-12), 20 + 40 + 8);
        assert_eq!(bits_for(&BigUint::one(), 0.5), 9);
    }

    #[test]
    fn decimal_rendering() {
        let v = FixedReal::from_rat(&Rat::small(1, 4), 64).unwrap();
        assert_eq!(v.to_decimal(4), "0.2500");
    }
}
