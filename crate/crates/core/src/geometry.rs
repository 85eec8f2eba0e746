//! Rational directions, rational lines and `SL2(Z)` changes of coordinates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;

use crate::arith::{Rat, TorusPoint, TorusValue};
use crate::error::{Error, Result};

/// A primitive integer vector `(p, q)` up to sign: `gcd(p, q) = 1` and
/// either `p > 0`, or `p = 0` and `q = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    p: i64,
    q: i64,
}

impl Direction {
    /// Normalizes any nonzero integer vector.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::precondition("direction (0,0) is undefined"));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if p < 0 || (p == 0 && q < 0) {
            p = -p;
            q = -q;
        }
        Ok(Direction { p, q })
    }

    pub const HORIZONTAL: Direction = Direction { p: 1, q: 0 };
    pub const VERTICAL: Direction = Direction { p: 0, q: 1 };

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Angle in `[0, pi)`.
    pub fn angle(&self) -> f64 {
        let a = (self.q as f64).atan2(self.p as f64);
        if a < 0.0 {
            a + PI
        } else {
            a
        }
    }

    /// `max(|p|, |q|)`.
    pub fn height(&self) -> u64 {
        self.p.unsigned_abs().max(self.q.unsigned_abs())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = parse_int_pair(s)?;
        Direction::new(p, q)
    }
}

fn parse_int_pair(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Malformed(s.to_string());
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// The set `{(x, y) : a x + b y = c mod 1}` with `gcd(a, b) = 1`.
///
/// Stored sign-normalized (`a > 0`, or `a = 0` and `b = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalLine {
    a: i64,
    b: i64,
    c: Rat,
}

impl RationalLine {
    pub fn new(a: i64, b: i64, c: Rat) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::precondition("linear form (0,0) is degenerate"));
        }
        if a.gcd(&b) != 1 {
            return Err(Error::precondition(format!("gcd({a},{b}) must be 1")));
        }
        if a < 0 || (a == 0 && b < 0) {
            Ok(RationalLine {
                a: -a,
                b: -b,
                c: c.neg(),
            })
        } else {
            Ok(RationalLine { a, b, c })
        }
    }

    /// The homogeneous line through the origin with direction `t`.
    pub fn through_origin(t: Direction) -> Self {
        RationalLine::new(t.q, -t.p, Rat::zero()).expect("primitive direction")
    }

    /// The vertical axis `{0} x [0, 1]`.
    pub fn vertical_axis() -> Self {
        RationalLine::new(1, 0, Rat::zero()).expect("valid form")
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn is_homogeneous(&self) -> bool {
        self.c.is_zero()
    }

    pub fn direction(&self) -> Direction {
        Direction::new(self.b, -self.a).expect("nonzero form")
    }

    /// Image under `T_k`: the line `(a, b; k c)`.
    pub fn mul_int(&self, k: u64) -> RationalLine {
        RationalLine {
            a: self.a,
            b: self.b,
            c: self.c.mul_u64(k),
        }
    }

    /// `a x + b y - c mod 1` at a point.
    pub fn residual(&self, pt: &TorusPoint) -> Result<TorusValue> {
        TorusValue::lin_comb(&[(self.a, pt.x()), (self.b, pt.y())], &self.c.neg())
    }
}

impl fmt::Display for RationalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for RationalLine {
    type Err = Error;

    /// `a,b,c` where `c` is a fraction such as `1/3` (or an integer).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(s.to_string());
        let mut parts = s.splitn(3, ',');
        let a: i64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let b: i64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let c = parts.next().map(str::trim).unwrap_or("0");
        let (c, negative) = match c.strip_prefix('-') {
            Some(rest) => (rest, true),
            None => (c, false),
        };
        let c = Rat::from_big_rational(&crate::arith::parse_rational(c)?);
        RationalLine::new(a, b, if negative { c.neg() } else { c })
    }
}

/// `true` iff `dist_to_int(a x + b y - c) <= tol`.
///
/// Exact for fractions. For fixed-point points `tol` should be at least the
/// certified error of the combination; the stored midpoint is compared.
pub fn line_contains(l: &RationalLine, pt: &TorusPoint, tol: &BigRational) -> Result<bool> {
    Ok(&l.residual(pt)?.dist_to_int().mid <= tol)
}

/// A 2x2 integer matrix with determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UniMatrix {
    m: [[i64; 2]; 2],
}

impl UniMatrix {
    pub fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> Result<Self> {
        if m11 * m22 - m12 * m21 != 1 {
            return Err(Error::precondition("matrix determinant must be 1"));
        }
        Ok(UniMatrix {
            m: [[m11, m12], [m21, m22]],
        })
    }

    pub const IDENTITY: UniMatrix = UniMatrix { m: [[1, 0], [0, 1]] };

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> UniMatrix {
        let [[a, b], [c, d]] = self.m;
        UniMatrix {
            m: [[d, -b], [-c, a]],
        }
    }

    pub fn apply_vec(&self, v: (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.m;
        (a * v.0 + b * v.1, c * v.0 + d * v.1)
    }

    /// Image of a direction (as an unoriented primitive vector).
    pub fn apply_direction(&self, t: Direction) -> Direction {
        let (p, q) = self.apply_vec((t.p, t.q));
        Direction::new(p, q).expect("unimodular maps keep vectors nonzero")
    }
}

impl fmt::Display for UniMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// `L` in `SL2(Z)` with `L (p, q)^T = (1, 0)^T`, built as `[[u, v], [-q, p]]`
/// from `u p + v q = 1`.
pub fn direction_to_horizontal(t: Direction) -> UniMatrix {
    let (g, mut u, mut v) = extended_gcd(t.p, t.q);
    if g < 0 {
        u = -u;
        v = -v;
    }
    debug_assert_eq!(u * t.p + v * t.q, 1);
    UniMatrix {
        m: [[u, v], [-t.q, t.p]],
    }
}

/// Matrix-vector product mod 1. Exact for fractions; for fixed point each
/// coordinate's error becomes `|m_i1| err_x + |m_i2| err_y`.
pub fn apply_matrix(l: &UniMatrix, pt: &TorusPoint) -> Result<TorusPoint> {
    let [[a, b], [c, d]] = l.m;
    let zero = Rat::zero();
    let x = TorusValue::lin_comb(&[(a, pt.x()), (b, pt.y())], &zero)?;
    let y = TorusValue::lin_comb(&[(c, pt.x()), (d, pt.y())], &zero)?;
    TorusPoint::new(x, y)
}

/// Covering radius `1 / (2 sqrt(p^2 + q^2))` of the homogeneous line with
/// direction `t`: the farthest any torus point gets from the closed line.
pub fn covering_radius(t: Direction) -> f64 {
    let n2 = (t.p * t.p + t.q * t.q) as f64;
    0.5 / n2.sqrt()
}

/// Outcome of [`rationalize_slope`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeVerdict {
    Rational(Direction),
    /// No direction with `max(|p|, |q|) <= D` lies within the tolerance.
    Irrational,
}

impl SlopeVerdict {
    pub fn direction(&self) -> Option<Direction> {
        match self {
            SlopeVerdict::Rational(d) => Some(*d),
            SlopeVerdict::Irrational => None,
        }
    }
}

/// Angle of `(x, y)` folded into `[0, pi)`.
pub fn unoriented_angle(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    let a = if a < 0.0 { a + PI } else { a };
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Distance between two unoriented angles (mod pi).
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

// Stern-Brocot descent in the first quadrant: the first node whose angle
// lies in [lo, hi] has the smallest p and q of all fractions there.
fn simplest_in_quadrant(lo: f64, hi: f64, max_height: u64) -> Option<(i64, i64)> {
    let inside = |p: i64, q: i64| {
        let a = (q as f64).atan2(p as f64);
        a >= lo && a <= hi
    };
    if inside(1, 0) {
        return Some((1, 0));
    }
    if inside(0, 1) {
        return Some((0, 1));
    }
    let (mut left, mut right) = ((1i64, 0i64), (0i64, 1i64));
    loop {
        let med = (left.0 + right.0, left.1 + right.1);
        if med.0.unsigned_abs().max(med.1.unsigned_abs()) > max_height {
            return None;
        }
        let a = (med.1 as f64).atan2(med.0 as f64);
        if a >= lo && a <= hi {
            return Some(med);
        }
        if a < lo {
            left = med;
        } else {
            right = med;
        }
    }
}

/// Smallest rational direction within `tol` (angular) of the vector `v`.
///
/// Candidates are bounded by `max(|p|, |q|) <= max_height`. The search walks
/// the Stern-Brocot tree, which visits the convergents and intermediate
/// fractions of the slope in order of increasing size.
pub fn rationalize_slope(v: (f64, f64), max_height: u64, tol: f64) -> SlopeVerdict {
    let theta = unoriented_angle(v.0, v.1);
    let mut best: Option<Direction> = None;
    for shift in [-PI, 0.0, PI] {
        let (lo, hi) = (theta - tol + shift, theta + tol + shift);
        // first quadrant: angles in [0, pi/2]
        let (l1, h1) = (lo.max(0.0), hi.min(FRAC_PI_2));
        if l1 <= h1 {
            if let Some((p, q)) = simplest_in_quadrant(l1, h1, max_height) {
                consider(&mut best, Direction::new(p, q).expect("nonzero"), theta);
            }
        }
        // second quadrant, reflected: angle phi -> pi - phi, (p, q) -> (p, -q)
        let (l2, h2) = (lo.max(FRAC_PI_2), hi.min(PI));
        if l2 <= h2 {
            if let Some((p, q)) = simplest_in_quadrant(PI - h2, PI - l2, max_height) {
                consider(&mut best, Direction::new(p, -q).expect("nonzero"), theta);
            }
        }
    }
    best.map_or(SlopeVerdict::Irrational, SlopeVerdict::Rational)
}

fn consider(best: &mut Option<Direction>, cand: Direction, theta: f64) {
    let key = |d: &Direction| {
        (
            d.height(),
            d.p.unsigned_abs() + d.q.unsigned_abs(),
            angle_gap(d.angle(), theta),
        )
    };
    match best {
        Some(b) if key(b) <= key(&cand) => {}
        _ => *best = Some(cand),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_point;

    #[test]
    fn direction_normalization() {
        assert_eq!(Direction::new(-2, -4).unwrap(), Direction::new(1, 2).unwrap());
        assert_eq!(Direction::new(0, -3).unwrap(), Direction::VERTICAL);
        assert_eq!(Direction::new(-3, 2).unwrap().p(), 3);
        assert!(Direction::new(0, 0).is_err());
    }

    #[test]
    fn horizontal_examples() {
        let t = direction_to_horizontal(Direction::HORIZONTAL);
        assert_eq!(t, UniMatrix::IDENTITY);
        let t = direction_to_horizontal(Direction::VERTICAL);
        assert_eq!(t.entries(), [[0, 1], [-1, 0]]);
        let t = direction_to_horizontal(Direction::new(2, 3).unwrap());
        assert_eq!(t.entries(), [[-1, 1], [-3, 2]]);
        assert_eq!(t.apply_vec((2, 3)), (1, 0));
        assert_eq!(t.det(), 1);
    }

    #[test]
    fn horizontal_all_small_directions() {
        for p in -50i64..=50 {
            for q in -50i64..=50 {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let t = Direction::new(p, q).unwrap();
                let l = direction_to_horizontal(t);
                assert_eq!(l.det(), 1, "{t}");
                assert_eq!(l.apply_vec((t.p(), t.q())), (1, 0), "{t}");
            }
        }
    }

    #[test]
    fn quarter_turn() {
        let l = UniMatrix::new(0, 1, -1, 0).unwrap();
        let pt = parse_point("1/3,1/4", 64).unwrap();
        let img = apply_matrix(&l, &pt).unwrap();
        assert_eq!(img, parse_point("1/4,2/3", 64).unwrap());
        assert_eq!(apply_matrix(&UniMatrix::IDENTITY, &pt).unwrap(), pt);
        assert!(UniMatrix::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn line_examples() {
        let zero = BigRational::from_integer(0.into());
        let diag = RationalLine::new(1, -1, Rat::zero()).unwrap();
        assert!(line_contains(&diag, &parse_point("1/3,1/3", 64).unwrap(), &zero).unwrap());
        assert!(!line_contains(&diag, &parse_point("1/3,1/2", 64).unwrap(), &zero).unwrap());
        let shifted = RationalLine::new(1, -1, Rat::small(1, 3)).unwrap();
        assert!(line_contains(&shifted, &parse_point("1/2,1/6", 64).unwrap(), &zero).unwrap());
        assert!(RationalLine::new(2, 4, Rat::zero()).is_err());
        assert_eq!(diag.direction(), Direction::new(1, 1).unwrap());
        assert_eq!(RationalLine::vertical_axis().direction(), Direction::VERTICAL);
    }

    #[test]
    fn line_parsing_and_sign() {
        let l: RationalLine = "-1,1,1/3".parse().unwrap();
        assert_eq!((l.a(), l.b()), (1, -1));
        assert_eq!(l.c(), &Rat::small(2, 3));
        assert_eq!(l.to_string(), "1,-1,2/3");
        let l: RationalLine = "3,2".parse().unwrap();
        assert!(l.is_homogeneous());
    }

    #[test]
    fn covering_radius_examples() {
        assert_eq!(covering_radius(Direction::HORIZONTAL), 0.5);
        assert!((covering_radius(Direction::new(1, 1).unwrap()) - 0.353_553_390_593).abs() < 1e-9);
        assert!((covering_radius(Direction::new(3, 2).unwrap()) - 0.138_675_049_056).abs() < 1e-9);
    }

    // exhaustive oracle over every direction with max(|p|,|q|) <= d
    fn exhaustive(v: (f64, f64), d: i64, tol: f64) -> Option<Direction> {
        let theta = unoriented_angle(v.0, v.1);
        let mut best: Option<Direction> = None;
        for p in -d..=d {
            for q in -d..=d {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let t = Direction::new(p, q).unwrap();
                if angle_gap(t.angle(), theta) <= tol {
                    consider(&mut best, t, theta);
                }
            }
        }
        best
    }

    #[test]
    fn rationalize_examples() {
        assert_eq!(
            rationalize_slope((1.0, 0.0), 10, 1e-9),
            SlopeVerdict::Rational(Direction::HORIZONTAL)
        );
        let v = (0.83205, 0.55470);
        assert_eq!(exhaustive(v, 10, 1e-3), Some(Direction::new(3, 2).unwrap()));
        assert_eq!(
            rationalize_slope(v, 10, 1e-3),
            SlopeVerdict::Rational(Direction::new(3, 2).unwrap())
        );
        let v = (1f64.cos(), 1f64.sin());
        assert_eq!(exhaustive(v, 10, 1e-6), None);
        assert_eq!(rationalize_slope(v, 10, 1e-6), SlopeVerdict::Irrational);
    }

    #[test]
    fn rationalize_matches_exhaustive_search() {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..2000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let theta = (state >> 11) as f64 / (1u64 << 53) as f64 * PI;
            let tol = 0.001 + ((state & 0xff) as f64) / 2550.0;
            let v = (theta.cos(), theta.sin());
            let want = exhaustive(v, 12, tol);
            let got = rationalize_slope(v, 12, tol).direction();
            assert_eq!(
                got.map(|d| (d.height(), d.p().unsigned_abs() + d.q().unsigned_abs())),
                want.map(|d| (d.height(), d.p().unsigned_abs() + d.q().unsigned_abs())),
                "theta={theta} tol={tol}"
            );
        }
    }
}
