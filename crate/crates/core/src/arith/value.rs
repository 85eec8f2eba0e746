use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::bound::Bound;
use super::fixed::FixedReal;
use super::rat::Rat;
use crate::error::{Error, Result};

/// A point of the circle `R/Z`: an exact fraction or a certified fixed-point real.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TorusValue {
    Exact(Rat),
    Fixed(FixedReal),
}

impl TorusValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, TorusValue::Exact(_))
    }

    pub fn bits(&self) -> Option<u32> {
        match self {
            TorusValue::Exact(_) => None,
            TorusValue::Fixed(f) => Some(f.bits()),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            TorusValue::Exact(r) => Some(r),
            TorusValue::Fixed(_) => None,
        }
    }

    pub fn as_fixed(&self) -> Option<&FixedReal> {
        match self {
            TorusValue::Fixed(f) => Some(f),
            TorusValue::Exact(_) => None,
        }
    }

    /// Converts an exact value to fixed point; fixed values are returned as is.
    pub fn to_fixed(&self, bits: u32) -> Result<TorusValue> {
        match self {
            TorusValue::Exact(r) => Ok(TorusValue::Fixed(FixedReal::from_rat(r, bits)?)),
            TorusValue::Fixed(f) if f.bits() == bits => Ok(self.clone()),
            TorusValue::Fixed(f) => Err(Error::BitsMismatch(f.bits(), bits)),
        }
    }

    /// `k * v mod 1`.
    pub fn mul_int(&self, k: &BigUint) -> Result<TorusValue> {
        if k.is_zero() {
            return Err(Error::precondition("multiplier must be positive"));
        }
        Ok(match self {
            TorusValue::Exact(r) => TorusValue::Exact(r.mul_int(k)),
            TorusValue::Fixed(f) => TorusValue::Fixed(f.mul_int(k)?),
        })
    }

    pub fn mul_u64(&self, k: u64) -> Result<TorusValue> {
        self.mul_int(&BigUint::from(k))
    }

    /// Translation by an exact rational.
    pub fn add_rat(&self, r: &Rat) -> Result<TorusValue> {
        Self::lin_comb(&[(1, self)], r)
    }

    /// `sum c_i * v_i + offset mod 1`; all terms must share one tag.
    pub fn lin_comb(terms: &[(i64, &TorusValue)], offset: &Rat) -> Result<TorusValue> {
        let first = terms
            .first()
            .ok_or_else(|| Error::precondition("empty linear combination"))?;
        match first.1 {
            TorusValue::Exact(_) => {
                let rats = terms
                    .iter()
                    .map(|(c, v)| v.as_rat().map(|r| (*c, r)).ok_or(Error::TagMismatch))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TorusValue::Exact(Rat::lin_comb(&rats, offset)))
            }
            TorusValue::Fixed(_) => {
                let fixed = terms
                    .iter()
                    .map(|(c, v)| v.as_fixed().map(|f| (*c, f)).ok_or(Error::TagMismatch))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TorusValue::Fixed(FixedReal::lin_comb(&fixed, offset)?))
            }
        }
    }

    /// Distance to the nearest integer: exact for fractions, an enclosure otherwise.
    pub fn dist_to_int(&self) -> Bound {
        match self {
            TorusValue::Exact(r) => Bound::exact(r.dist_to_int()),
            TorusValue::Fixed(f) => f.dist_to_int(),
        }
    }

    /// Signed representative in `[-1/2, 1/2)` with its error radius.
    pub fn centered(&self) -> Bound {
        match self {
            TorusValue::Exact(r) => Bound::exact(r.centered()),
            TorusValue::Fixed(f) => Bound::new(f.centered(), f.error_bound()),
        }
    }

    /// Certified absolute error (zero for exact values).
    pub fn error_bound(&self) -> BigRational {
        match self {
            TorusValue::Exact(_) => BigRational::zero(),
            TorusValue::Fixed(f) => f.error_bound(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            TorusValue::Exact(r) => r.to_f64(),
            TorusValue::Fixed(f) => f.to_f64(),
        }
    }

    /// `floor(g * v)` of the stored value.
    pub fn cell(&self, g: u32) -> u32 {
        match self {
            TorusValue::Exact(r) => {
                let c: BigUint = (r.numer() * g) / r.denom();
                u32::try_from(c).expect("cell below grid size")
            }
            TorusValue::Fixed(f) => f.cell(g),
        }
    }
}

impl fmt::Display for TorusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorusValue::Exact(r) => write!(f, "{r}"),
            TorusValue::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// A point of the 2-torus; both coordinates share one arithmetic tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    x: TorusValue,
    y: TorusValue,
}

impl TorusPoint {
    pub fn new(x: TorusValue, y: TorusValue) -> Result<Self> {
        match (&x, &y) {
            (TorusValue::Exact(_), TorusValue::Exact(_)) => {}
            (TorusValue::Fixed(a), TorusValue::Fixed(b)) => {
                if a.bits() != b.bits() {
                    return Err(Error::BitsMismatch(a.bits(), b.bits()));
                }
            }
            _ => return Err(Error::TagMismatch),
        }
        Ok(TorusPoint { x, y })
    }

    pub fn exact(x: Rat, y: Rat) -> Self {
        TorusPoint {
            x: TorusValue::Exact(x),
            y: TorusValue::Exact(y),
        }
    }

    pub fn origin() -> Self {
        Self::exact(Rat::zero(), Rat::zero())
    }

    /// Builds a point from two values, promoting an exact coordinate to fixed
    /// point when the other one is fixed.
    pub fn promote(x: TorusValue, y: TorusValue) -> Result<Self> {
        match (x.bits(), y.bits()) {
            (None, Some(b)) => Self::new(x.to_fixed(b)?, y),
            (Some(b), None) => Self::new(x, y.to_fixed(b)?),
            _ => Self::new(x, y),
        }
    }

    pub fn x(&self) -> &TorusValue {
        &self.x
    }

    pub fn y(&self) -> &TorusValue {
        &self.y
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact()
    }

    pub fn bits(&self) -> Option<u32> {
        self.x.bits()
    }

    /// Both coordinates as exact fractions, when available.
    pub fn as_rats(&self) -> Option<(&Rat, &Rat)> {
        Some((self.x.as_rat()?, self.y.as_rat()?))
    }

    pub fn to_fixed(&self, bits: u32) -> Result<TorusPoint> {
        Self::new(self.x.to_fixed(bits)?, self.y.to_fixed(bits)?)
    }

    /// `T_k`: multiply both coordinates by `k`.
    pub fn mul_int(&self, k: &BigUint) -> Result<TorusPoint> {
        Ok(TorusPoint {
            x: self.x.mul_int(k)?,
            y: self.y.mul_int(k)?,
        })
    }

    pub fn mul_u64(&self, k: u64) -> Result<TorusPoint> {
        self.mul_int(&BigUint::from(k))
    }

    /// Larger of the two coordinate error bounds.
    pub fn error_bound(&self) -> BigRational {
        self.x.error_bound().max(self.y.error_bound())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Euclidean distance on `R^2/Z^2`, certified for fixed-point points.
pub fn torus_distance(a: &TorusPoint, b: &TorusPoint) -> Result<Bound> {
    let dx = TorusValue::lin_comb(&[(1, a.x()), (-1, b.x())], &Rat::zero())?.centered();
    let dy = TorusValue::lin_comb(&[(1, a.y()), (-1, b.y())], &Rat::zero())?.centered();
    squared_norm(&dx, &dy).map(|sq| sq.sqrt())
}

fn squared_norm(dx: &Bound, dy: &Bound) -> Result<Bound> {
    let sq = |d: &Bound| -> (BigRational, BigRational) {
        let a = d.mid.abs();
        let lo = (&a - &d.rad).max(BigRational::zero());
        let hi = &a + &d.rad;
        (&lo * &lo, &hi * &hi)
    };
    let (xl, xh) = sq(dx);
    let (yl, yh) = sq(dy);
    let lo = xl + yl;
    let hi = xh + yh;
    let two = BigRational::from_integer(BigInt::from(2));
    let mid = (&lo + &hi) / &two;
    let rad = (&hi - &lo) / two;
    Ok(Bound::new(mid, rad))
}

/// Parses an exact rational literal: `p/q`, an integer, or a decimal such
/// as `0.25` or `1e-5`. The result is not reduced mod 1.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if t.starts_with('-') {
        return Err(Error::Negative(t.to_string()));
    }
    let bad = || Error::Malformed(t.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if p.is_negative() || q.is_negative() {
            return Err(Error::Negative(t.to_string()));
        }
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Parses a torus value.
///
/// Accepted forms: `p/q` and plain integers (exact), decimal literals
/// (fixed point), `sqrt(n)` (fractional part of the square root, fixed
/// point), and `sqrt(n)+p/q` (translated by an exact fraction). Values are
/// taken mod 1.
pub fn parse_value(text: &str, bits: u32) -> Result<TorusValue> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("sqrt(") {
        let (inner, tail) = rest
            .split_once(')')
            .ok_or_else(|| Error::Malformed(t.to_string()))?;
        let inner = inner.trim();
        if inner.starts_with('-') {
            return Err(Error::Negative(t.to_string()));
        }
        let n: u64 = inner.parse().map_err(|_| Error::Malformed(t.to_string()))?;
        let base = TorusValue::Fixed(FixedReal::sqrt_frac(n, bits)?);
        let tail = tail.trim();
        if tail.is_empty() {
            return Ok(base);
        }
        let shift = tail
            .strip_prefix('+')
            .ok_or_else(|| Error::Malformed(t.to_string()))?;
        let r = parse_rational(shift)?;
        return base.add_rat(&Rat::from_big_rational(&r));
    }
    let r = parse_rational(t)?;
    let exact = Rat::from_big_rational(&r);
    if t.contains('/') || t.chars().all(|c| c.is_ascii_digit()) {
        Ok(TorusValue::Exact(exact))
    } else {
        Ok(TorusValue::Fixed(FixedReal::from_rat(&exact, bits)?))
    }
}

/// Parses `x,y` into a point, promoting to fixed point if either side is fixed.
pub fn parse_point(text: &str, bits: u32) -> Result<TorusPoint> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| Error::Malformed(text.to_string()))?;
    TorusPoint::promote(parse_value(x, bits)?, parse_value(y, bits)?)
}
