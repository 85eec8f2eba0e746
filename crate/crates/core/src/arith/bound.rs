use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// A certified real: the true value lies in `[mid - rad, mid + rad]`.
///
/// Exact results carry `rad = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub mid: BigRational,
    pub rad: BigRational,
}

impl Bound {
    pub fn exact(value: BigRational) -> Self {
        Bound {
            mid: value,
            rad: BigRational::zero(),
        }
    }

    pub fn new(mid: BigRational, rad: BigRational) -> Self {
        debug_assert!(!rad.is_negative());
        Bound { mid, rad }
    }

    pub fn zero() -> Self {
        Self::exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lo(&self) -> BigRational {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> BigRational {
        &self.mid + &self.rad
    }

    /// Certainly `<= t`.
    pub fn certainly_le(&self, t: &BigRational) -> bool {
        &self.hi() <= t
    }

    /// Possibly `<= t` (some value in the interval is).
    pub fn possibly_le(&self, t: &BigRational) -> bool {
        &self.lo() <= t
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        (&self.mid - v).abs() <= self.rad
    }

    /// Certified square root of a nonnegative interval.
    ///
    /// Returns an exact result when both ends coincide with a perfect
    /// rational square; otherwise an f64 estimate widened until the
    /// enclosure is verified in exact arithmetic.
    pub fn sqrt(&self) -> Bound {
        let zero = BigRational::zero();
        let lo = self.lo().max(zero.clone());
        let hi = self.hi().max(zero.clone());
        if self.is_exact() {
            if let Some(r) = exact_rational_sqrt(&lo) {
                return Bound::exact(r);
            }
        }
        let guess = ((lo.to_f64().unwrap_or(0.0) + hi.to_f64().unwrap_or(0.0)) / 2.0).sqrt();
        let mid = BigRational::from_float(guess).unwrap_or(zero.clone());
        let mut rad = BigRational::from_float(guess.max(1e-300) * 1e-15).unwrap_or(zero.clone());
        loop {
            let low_end = &mid - &rad;
            let high_end = &mid + &rad;
            let low_ok = low_end <= zero || &low_end * &low_end <= lo;
            let high_ok = &high_end * &high_end >= hi;
            if low_ok && high_ok {
                return Bound::new(mid, rad);
            }
            rad = &rad * BigInt::from(2);
            if rad.is_zero() {
                rad = BigRational::new(1.into(), BigInt::from(1u64 << 60));
            }
        }
    }
}

fn exact_rational_sqrt(v: &BigRational) -> Option<BigRational> {
    let n = v.numer().to_biguint()?;
    let d = v.denom().to_biguint()?;
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == n && &sd * &sd == d {
        Some(BigRational::new(sn.into(), sd.into()))
    } else {
        None
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            if self.mid.is_integer() {
                write!(f, "{}", self.mid.numer())
            } else {
                write!(f, "{}/{} (~{})", self.mid.numer(), self.mid.denom(), self.to_f64())
            }
        } else {
            write!(f, "{} ± {:e}", self.to_f64(), self.rad_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn sqrt_exact_squares() {
        assert_eq!(Bound::exact(q(1, 25)).sqrt(), Bound::exact(q(1, 5)));
        assert_eq!(Bound::zero().sqrt(), Bound::zero());
    }

    #[test]
    fn sqrt_encloses_irrational() {
        let b = Bound::exact(q(1, 2)).sqrt();
        assert!(!b.is_exact());
        assert!(b.lo() * b.lo() <= q(1, 2));
        assert!(b.hi() * b.hi() >= q(1, 2));
        assert!((b.to_f64() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(b.rad_f64() < 1e-13);
    }

    #[test]
    fn sqrt_of_interval() {
        let b = Bound::new(q(1, 4), q(1, 1000)).sqrt();
        assert!(b.lo() * b.lo() <= q(249, 1000));
        assert!(b.hi() * b.hi() >= q(251, 1000));
    }
}
