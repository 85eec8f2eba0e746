//! The rhombus chain `E` along the vertical axis and its pre-image property.
//!
//! `E` is `N` rhombi of height `1/N` stacked on `{0} x [0, 1]`, each with
//! half-width `delta/N` at mid-height. In closed form,
//!
//! ```text
//! (x, y) in E  <=>  ||x|| <= (2 delta / N) * ||N y||
//! ```
//!
//! where `||.||` is the distance to the nearest integer. For `k` in
//! `{2, 3, 5}` and `||x|| <= delta`, multiplying by `k` scales `||x||` by
//! exactly `k` (no wrap, since `5 delta < 1/2`) while the half-width grows by
//! at most `k`. So a point near the axis but outside `E` never maps into `E`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arith::{Bound, FixedReal, Rat, TorusPoint, TorusValue};
use crate::error::{Error, Result};
use crate::geometry::RationalLine;
use crate::orbit::OrbitSample;
use crate::smooth::{ExpTriple, Generators};

/// `E_{delta,N}` with `0 < delta < 1/10000`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhombusSet {
    delta: Rat,
    n: u64,
}

impl RhombusSet {
    pub fn new(delta: Rat, n: u64) -> Result<Self> {
        if delta.is_zero() || delta >= Rat::small(1, 10_000) {
            return Err(Error::precondition(format!("delta = {delta} outside (0, 1/10000)")));
        }
        Self::checked_n(delta, n)
    }

    /// Wider rhombi for pictures. Only `5 delta < 1/2` is required, which is
    /// all the pre-image property needs.
    pub fn wide(delta: Rat, n: u64) -> Result<Self> {
        if delta.is_zero() || delta >= Rat::small(1, 10) {
            return Err(Error::precondition(format!("delta = {delta} outside (0, 1/10)")));
        }
        Self::checked_n(delta, n)
    }

    fn checked_n(delta: Rat, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("N must be positive"));
        }
        Ok(RhombusSet { delta, n })
    }

    pub fn delta(&self) -> &Rat {
        &self.delta
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `2 delta / N`, the slope of the rhombus sides in `||N y||`.
    fn slope(&self) -> BigRational {
        self.delta.to_big_rational() * BigInt::from(2u32) / BigInt::from(self.n)
    }

    /// Half-width of `E` at height `y`.
    pub fn half_width(&self, y: &TorusValue) -> Bound {
        let dy = match y {
            TorusValue::Exact(r) => Bound::exact(r.mul_u64(self.n).dist_to_int()),
            TorusValue::Fixed(f) => scaled_dist(f, self.n),
        };
        let s = self.slope();
        Bound::new(&dy.mid * &s, &dy.rad * &s)
    }
}

impl fmt::Display for RhombusSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E(delta={}, N={})", self.delta, self.n)
    }
}

/// `||n v||` for a fixed-point `v`, computed without the error cap of
/// [`FixedReal::mul_int`]: the distance is 1-Lipschitz, so the enclosure is
/// the stored distance widened by `n * err`.
fn scaled_dist(v: &FixedReal, n: u64) -> Bound {
    let modulus = BigUint::one() << v.bits();
    let m = (v.mantissa() * n) % &modulus;
    let other = &modulus - &m;
    let d = if other < m { other } else { m };
    let den = BigInt::from(modulus);
    Bound::new(
        BigRational::new(BigInt::from(d), den.clone()),
        BigRational::new(BigInt::from(v.err_mult() * n), den),
    )
}

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Inside,
    Outside,
    /// The certified interval straddles the rhombus edge.
    Boundary,
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self == Membership::Inside
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Inside => "in",
            Membership::Outside => "out",
            Membership::Boundary => "boundary",
        })
    }
}

/// Evaluates the closed-form predicate, exactly for fractions.
pub fn in_rhombus_set(e: &RhombusSet, a: &TorusPoint) -> Membership {
    if let Some((x, y)) = a.as_rats() {
        return if exact_member(e, x, y) {
            Membership::Inside
        } else {
            Membership::Outside
        };
    }
    let dx = a.x().dist_to_int();
    let w = e.half_width(a.y());
    if dx.hi() <= w.lo() {
        Membership::Inside
    } else if dx.lo() > w.hi() {
        Membership::Outside
    } else {
        Membership::Boundary
    }
}

// ||p1/q1|| * dden * N * q2 <= 2 dnum * ||N p2/q2|| * q1, with gcd(q1, q2) cancelled
fn exact_member(e: &RhombusSet, x: &Rat, y: &Rat) -> bool {
    let (p1, q1) = (x.numer(), x.denom());
    let (p2, q2) = (y.numer(), y.denom());
    let dx = (q1 - p1).min(p1.clone());
    let ny = (p2 * e.n) % q2;
    let dy = (q2 - &ny).min(ny);
    let g = q1.gcd(q2);
    let lhs = [dx, e.delta.denom().clone(), BigUint::from(e.n), q2 / &g];
    let rhs = [dy, e.delta.numer() * 2u32, q1 / &g];
    product_le(&lhs, &rhs)
}

fn product_le(lhs: &[BigUint], rhs: &[BigUint]) -> bool {
    let small = |v: &[BigUint]| -> Option<u128> {
        v.iter()
            .try_fold(1u128, |acc, x| acc.checked_mul(x.to_u128()?))
    };
    if let (Some(l), Some(r)) = (small(lhs), small(rhs)) {
        return l <= r;
    }
    let big = |v: &[BigUint]| v.iter().fold(BigUint::one(), |acc, x| acc * x);
    big(lhs) <= big(rhs)
}

/// A point violating the pre-image property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpViolation {
    pub index: u64,
    pub point: TorusPoint,
    pub generator: u64,
}

/// Summary of a randomized pre-image check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpReport {
    pub seed: u64,
    pub samples: u64,
    /// Samples already in `E`, dropped by the premise.
    pub in_e: u64,
    /// Samples outside `E`, each tested under every generator.
    pub tested: u64,
    pub violations: u64,
    /// Lowest-index violation, if any.
    pub first: Option<PpViolation>,
}

impl PpReport {
    fn merge(mut self, other: PpReport) -> PpReport {
        self.samples += other.samples;
        self.in_e += other.in_e;
        self.tested += other.tested;
        self.violations += other.violations;
        if self.first.is_none() {
            self.first = other.first;
        }
        self
    }
}

impl fmt::Display for PpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} samples={} in_e={} tested={} violations={}",
            self.seed, self.samples, self.in_e, self.tested, self.violations
        )?;
        if let Some(v) = &self.first {
            write!(f, " first={} x{} at sample {}", v.point, v.generator, v.index)?;
        }
        Ok(())
    }
}

/// Pseudo-random points for the pre-image check: numerators over `2^64`
/// with `||x|| <= delta` and `y` uniform. Sample `i` uses ChaCha8 words
/// `4i..4i+4` of the stream seeded by `seed`, so any index range can be
/// replayed on its own.
pub struct PpSampler {
    rng: ChaCha8Rng,
    width: u64,
}

impl PpSampler {
    pub fn new(e: &RhombusSet, seed: u64) -> Self {
        PpSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            width: dyadic_floor(&e.delta),
        }
    }

    /// Positions the stream at sample `i`.
    pub fn seek(&mut self, i: u64) {
        self.rng.set_word_pos(4 * u128::from(i));
    }

    pub fn next_sample(&mut self) -> (u64, u64) {
        let u = self.rng.next_u64();
        let v = self.rng.next_u64();
        let mag = (u >> 1) % (self.width + 1);
        let x = if u & 1 == 1 { mag.wrapping_neg() } else { mag };
        (x, v)
    }

    /// Sample `i`, independent of the current position.
    pub fn sample(&mut self, i: u64) -> (u64, u64) {
        self.seek(i);
        self.next_sample()
    }
}

// floor(delta * 2^64), below 2^63 since delta < 1/10
fn dyadic_floor(delta: &Rat) -> u64 {
    ((delta.numer() << 64u32) / delta.denom())
        .to_u64()
        .expect("delta below 1")
}

/// Exact point `(x / 2^64, y / 2^64)`.
pub fn dyadic_point(x: u64, y: u64) -> TorusPoint {
    let two64 = BigInt::one() << 64u32;
    let r = |n: u64| Rat::new(BigInt::from(n), two64.clone()).expect("nonzero denominator");
    TorusPoint::exact(r(x), r(y))
}

/// Membership of `(x / 2^64, y / 2^64)`; agrees with [`in_rhombus_set`].
fn dyadic_member(e: &RhombusSet, dnum2: u128, dden_n: Option<u128>, x: u64, y: u64) -> bool {
    let dx = x.min(x.wrapping_neg()) as u128;
    let ny = y.wrapping_mul(e.n);
    let dy = ny.min(ny.wrapping_neg()) as u128;
    match dden_n.and_then(|c| c.checked_mul(dx)) {
        Some(l) => match dnum2.checked_mul(dy) {
            Some(r) => l <= r,
            None => true,
        },
        None => {
            let l = BigUint::from(dx) * e.delta.denom() * e.n;
            let r = BigUint::from(dy) * e.delta.numer() * 2u32;
            l <= r
        }
    }
}

fn pp_range(e: &RhombusSet, seed: u64, range: std::ops::Range<u64>, gens: &[u64]) -> PpReport {
    let dnum2 = (e.delta.numer() * 2u32).to_u128().unwrap_or(u128::MAX);
    let dden_n = (e.delta.denom() * e.n).to_u128();
    let mut rep = PpReport {
        seed,
        samples: range.end - range.start,
        in_e: 0,
        tested: 0,
        violations: 0,
        first: None,
    };
    let mut sampler = PpSampler::new(e, seed);
    sampler.seek(range.start);
    for i in range {
        let (x, y) = sampler.next_sample();
        if dyadic_member(e, dnum2, dden_n, x, y) {
            rep.in_e += 1;
            continue;
        }
        rep.tested += 1;
        for &k in gens {
            if dyadic_member(e, dnum2, dden_n, x.wrapping_mul(k), y.wrapping_mul(k)) {
                rep.violations += 1;
                if rep.first.is_none() {
                    rep.first = Some(PpViolation {
                        index: i,
                        point: dyadic_point(x, y),
                        generator: k,
                    });
                }
            }
        }
    }
    rep
}

/// Draws `samples` points with `||x|| <= delta`, keeps those outside `E` and
/// checks that `T_2`, `T_3`, `T_5` of each stay outside. Deterministic in
/// `seed` for any thread count.
pub fn check_preimage_property(e: &RhombusSet, samples: u64, seed: u64, threads: usize) -> Result<PpReport> {
    if samples == 0 {
        return Err(Error::precondition("samples must be at least 1"));
    }
    const GENS: [u64; 3] = [2, 3, 5];
    let threads = threads.max(1) as u64;
    if threads == 1 {
        return Ok(pp_range(e, seed, 0..samples, &GENS));
    }
    let chunk = samples.div_ceil(threads);
    let parts: Vec<PpReport> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = (t * chunk).min(samples);
                let hi = ((t + 1) * chunk).min(samples);
                s.spawn(move || pp_range(e, seed, lo..hi, &GENS))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("pp worker panicked"))
            .collect()
    });
    Ok(parts.into_iter().reduce(PpReport::merge).expect("at least one part"))
}

/// Whether distance to the axis at least halved between consecutive steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halving {
    /// First step of the chain, nothing to compare with.
    Start,
    Holds,
    Fails,
    /// Fixed-point enclosures too wide to decide.
    Undecided,
}

impl fmt::Display for Halving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Halving::Start => "start",
            Halving::Holds => "yes",
            Halving::Fails => "no",
            Halving::Undecided => "undecided",
        })
    }
}

/// One point on the walk from an orbit sample back to its start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackStep {
    pub triple: ExpTriple,
    pub point: TorusPoint,
    pub in_e: Membership,
    /// `||x||`, distance to the vertical axis.
    pub dist_to_l0: Bound,
    /// `dist(this) <= dist(previous) / 2`.
    pub halved: Halving,
}

/// Walks `sample` back to `start` by repeated [`ExpTriple::pre_image`],
/// recomputing each point from the start. Returns `total + 1` steps, from
/// the sample itself down to the start.
pub fn track_preimages(
    start: &TorusPoint,
    sample: &OrbitSample,
    e: &RhombusSet,
    gens: &Generators,
) -> Result<Vec<TrackStep>> {
    if sample.triple.exps().len() != gens.len() {
        return Err(Error::precondition("triple does not match the generator set"));
    }
    if start.mul_int(sample.triple.multiplier())? != sample.point {
        return Err(Error::precondition("sample is not in the orbit of start"));
    }
    let mut steps: Vec<TrackStep> = Vec::with_capacity(sample.triple.total() as usize + 1);
    let mut triple = sample.triple.clone();
    loop {
        let point = start.mul_int(triple.multiplier())?;
        let dist = point.x().dist_to_int();
        let halved = match steps.last() {
            None => Halving::Start,
            Some(prev) => halving(&prev.dist_to_l0, &dist),
        };
        steps.push(TrackStep {
            triple: triple.clone(),
            in_e: in_rhombus_set(e, &point),
            point,
            dist_to_l0: dist,
            halved,
        });
        if triple.is_identity() {
            return Ok(steps);
        }
        triple = triple.pre_image(gens)?;
    }
}

fn halving(prev: &Bound, next: &Bound) -> Halving {
    let two = BigRational::from_integer(BigInt::from(2u32));
    if next.hi() * &two <= prev.lo() {
        Halving::Holds
    } else if next.lo() * &two > prev.hi() {
        Halving::Fails
    } else {
        Halving::Undecided
    }
}

/// Homogeneous rational lines, the first being the vertical axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormSystem {
    lines: Vec<RationalLine>,
}

impl LinearFormSystem {
    /// The vertical axis followed by `others`.
    pub fn new(others: Vec<RationalLine>) -> Result<Self> {
        let mut lines = vec![RationalLine::vertical_axis()];
        for l in others {
            if !l.is_homogeneous() {
                return Err(Error::precondition(format!("line {l} does not pass through the origin")));
            }
            if lines.contains(&l) {
                return Err(Error::precondition(format!("line {l} listed twice")));
            }
            lines.push(l);
        }
        Ok(LinearFormSystem { lines })
    }

    pub fn lines(&self) -> &[RationalLine] {
        &self.lines
    }

    /// Exact membership of a rational point in the union of the lines.
    pub fn contains(&self, x: &Rat, y: &Rat) -> bool {
        self.lines
            .iter()
            .any(|l| Rat::lin_comb(&[(l.a(), x), (l.b(), y)], &l.c().neg()).is_zero())
    }
}

/// Reduced fractions in `[0, 1)` with denominator at most `qmax`, sorted.
pub fn farey_fractions(qmax: u64) -> Vec<Rat> {
    let mut out = vec![Rat::zero()];
    for q in 2..=qmax {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(Rat::small(p, q));
            }
        }
    }
    out.sort();
    out
}

/// Rational points with both denominators `<= qmax` on some line of the system,
/// sorted by `(x, y)`.
pub fn rational_points_on_system(s: &LinearFormSystem, qmax: u64) -> Result<Vec<TorusPoint>> {
    if qmax == 0 {
        return Err(Error::precondition("Qmax must be at least 1"));
    }
    let fr = farey_fractions(qmax);
    let mut out = Vec::new();
    for x in &fr {
        for y in &fr {
            if s.contains(x, y) {
                out.push(TorusPoint::exact(x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}
