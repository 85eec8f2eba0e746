//! Orbits of a point under the semigroup, and the three-way classification
//! of their closures.
//!
//! For `(x, y)` on the torus and generators `{2, 3, 5}` the closure of the
//! orbit is
//!
//! - a finite set of rational points when `x` and `y` are both rational,
//! - a finite union of lines when `m x + n y = k` for integers with
//!   `gcd(m, n, k) = 1` (the relation is preserved along the orbit),
//! - the whole torus otherwise.
//!
//! Only the first case is decidable from finite data. Relations are
//! searched up to a coefficient bound, so line and dense verdicts for
//! fixed-point input carry [`Certainty::BoundedSearch`].

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{Bound, Rat, TorusPoint, TorusValue};
use crate::error::{Error, Result};
use crate::smooth::{enumerate_smooth, ExpTriple, Generators, SmoothNumbers};

/// One orbit element: the exponent vector and `multiplier * start mod 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSample {
    pub triple: ExpTriple,
    pub point: TorusPoint,
}

/// Streams `T^k start` in increasing multiplier order.
pub struct Orbit {
    start: TorusPoint,
    triples: SmoothNumbers,
}

impl Iterator for Orbit {
    type Item = Result<OrbitSample>;

    fn next(&mut self) -> Option<Self::Item> {
        let triple = self.triples.next()?;
        Some(sample_at(&self.start, triple))
    }
}

fn sample_at(start: &TorusPoint, triple: ExpTriple) -> Result<OrbitSample> {
    let point = start.mul_int(triple.multiplier())?;
    Ok(OrbitSample { triple, point })
}

/// Orbit samples for every exponent vector with multiplier `<= s_max`.
///
/// Each point is computed directly from the start, so a fixed-point sample
/// with multiplier `S` carries error `S * err(start)`.
pub fn enumerate_orbit(start: &TorusPoint, gens: &Generators, s_max: &BigUint) -> Orbit {
    Orbit {
        start: start.clone(),
        triples: enumerate_smooth(gens, s_max),
    }
}

/// Collects the orbit, failing on the first precision error.
pub fn collect_orbit(start: &TorusPoint, gens: &Generators, s_max: &BigUint) -> Result<Vec<OrbitSample>> {
    enumerate_orbit(start, gens, s_max).collect()
}

/// Same output as [`collect_orbit`], with the point computations split into
/// contiguous slices across `threads` workers. Order is preserved.
pub fn collect_orbit_parallel(
    start: &TorusPoint,
    gens: &Generators,
    s_max: &BigUint,
    threads: usize,
) -> Result<Vec<OrbitSample>> {
    let triples: Vec<ExpTriple> = enumerate_smooth(gens, s_max).collect();
    let threads = threads.max(1);
    if threads == 1 || triples.len() < 2 * threads {
        return triples.into_iter().map(|t| sample_at(start, t)).collect();
    }
    let chunk = triples.len().div_ceil(threads);
    let parts: Vec<Result<Vec<OrbitSample>>> = std::thread::scope(|s| {
        let handles: Vec<_> = triples
            .chunks(chunk)
            .map(|slice| {
                s.spawn(move || {
                    slice
                        .iter()
                        .map(|t| sample_at(start, t.clone()))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("orbit worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(triples.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Distinct points of a sample list, first occurrence kept.
pub fn distinct_points(samples: &[OrbitSample]) -> Vec<OrbitSample> {
    let mut seen = std::collections::HashSet::new();
    samples
        .iter()
        .filter(|s| seen.insert(s.point.clone()))
        .cloned()
        .collect()
}

/// The exact closure of a rational start: all points reachable by
/// generator multiplications. Denominators never grow, so the search ends.
/// Points come back sorted by `(x, y)`.
pub fn rational_closure(start: &TorusPoint, gens: &Generators) -> Result<Vec<TorusPoint>> {
    Ok(closure_with_hits(start, gens)?.into_keys().map(|(x, y)| TorusPoint::exact(x, y)).collect())
}

/// Closure points with the multiplier of the breadth-first path that first reached them.
fn closure_with_hits(start: &TorusPoint, gens: &Generators) -> Result<BTreeMap<(Rat, Rat), BigUint>> {
    let (x, y) = start
        .as_rats()
        .ok_or_else(|| Error::precondition("closure needs an exact rational start"))?;
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert((x.clone(), y.clone()), BigUint::one());
    queue.push_back((x.clone(), y.clone(), BigUint::one()));
    while let Some((x, y, m)) = queue.pop_front() {
        for &g in gens.as_slice() {
            let key = (x.mul_u64(g), y.mul_u64(g));
            if !seen.contains_key(&key) {
                let mg = &m * g;
                seen.insert(key.clone(), mg.clone());
                queue.push_back((key.0, key.1, mg));
            }
        }
    }
    Ok(seen)
}

/// Smallest multiplier at which each closure point first appears in the
/// orbit, and the largest of these: beyond it the orbit adds no new points.
pub fn closure_first_hits(start: &TorusPoint, gens: &Generators) -> Result<(Vec<(TorusPoint, BigUint)>, BigUint)> {
    let bfs = closure_with_hits(start, gens)?;
    let bound = bfs.values().max().cloned().unwrap_or_else(BigUint::one);
    let (x, y) = start.as_rats().expect("checked by closure_with_hits");
    let mut hits: BTreeMap<(Rat, Rat), BigUint> = BTreeMap::new();
    for t in enumerate_smooth(gens, &bound) {
        let key = (x.mul_int(t.multiplier()), y.mul_int(t.multiplier()));
        hits.entry(key).or_insert_with(|| t.multiplier().clone());
        if hits.len() == bfs.len() {
            break;
        }
    }
    let max = hits.values().max().cloned().unwrap_or_else(BigUint::one);
    let list = hits
        .into_iter()
        .map(|((x, y), m)| (TorusPoint::exact(x, y), m))
        .collect();
    Ok((list, max))
}

/// How much of a verdict is proven.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Exact,
    /// Holds for the searched coefficient range only.
    BoundedSearch,
}

impl fmt::Display for Certainty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certainty::Exact => "exact",
            Certainty::BoundedSearch => "bounded-search",
        })
    }
}

/// An integer relation `m x + n y = k` with `gcd(m, n, k) = 1`, `(m, n) != (0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pub m: i64,
    pub n: i64,
    pub k: i64,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.m, self.n, self.k)
    }
}

/// A relation found by [`find_relation`], with its residual `|m x + n y - k|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFit {
    pub relation: Relation,
    pub residual: Bound,
}

fn real_value(v: &TorusValue) -> (BigRational, BigRational) {
    match v {
        TorusValue::Exact(r) => (r.to_big_rational(), BigRational::zero()),
        TorusValue::Fixed(f) => (f.value(), f.error_bound()),
    }
}

/// Searches `|m|, |n| <= c_bound` for a relation with residual at most `tau`.
///
/// Candidates are ordered by `max(|m|, |n|)`, then `|k|`, then `(m, n)`;
/// signs are canonical (`m > 0`, or `m = 0` and `n > 0`).
pub fn find_relation(
    x: &TorusValue,
    y: &TorusValue,
    c_bound: u32,
    tau: &BigRational,
) -> Result<Option<RelationFit>> {
    if x.is_exact() != y.is_exact() {
        return Err(Error::TagMismatch);
    }
    let (xv, xe) = real_value(x);
    let (yv, ye) = real_value(y);
    let worst = (&xe).max(&ye) * BigRational::from_integer(BigInt::from(2 * c_bound));
    if tau < &worst {
        return Err(Error::precondition(
            "tolerance is below the certified error of the search",
        ));
    }
    let c = i64::from(c_bound);
    for h in 1..=c {
        let mut best: Option<(i64, i64, i64, Bound)> = None;
        for m in 0..=h {
            for n in -h..=h {
                if m.abs().max(n.abs()) != h || (m == 0 && n <= 0) {
                    continue;
                }
                let s = BigRational::from_integer(m.into()) * &xv
                    + BigRational::from_integer(n.into()) * &yv;
                let k = s.round();
                let resid = (&s - &k).abs();
                if &resid > tau {
                    continue;
                }
                let k: i64 = i64::try_from(k.to_integer()).map_err(|_| Error::precondition("relation constant overflow"))?;
                if m.gcd(&n).gcd(&k) != 1 {
                    continue;
                }
                let rad = BigRational::from_integer(m.abs().into()) * &xe
                    + BigRational::from_integer(n.abs().into()) * &ye;
                let cand = (m, n, k, Bound::new(resid, rad));
                let better = match &best {
                    None => true,
                    Some(b) => (k.abs(), m, n) < (b.2.abs(), b.0, b.1),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        if let Some((m, n, k, residual)) = best {
            return Ok(Some(RelationFit {
                relation: Relation { m, n, k },
                residual,
            }));
        }
    }
    Ok(None)
}

/// Predicted orbit closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureClass {
    Finite(Vec<TorusPoint>),
    LineUnion { relation: Relation, certainty: Certainty },
    Dense { certainty: Certainty },
}

impl fmt::Display for ClosureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureClass::Finite(pts) => write!(f, "Finite (exact), {} points", pts.len()),
            ClosureClass::LineUnion { relation, certainty } => {
                write!(f, "LineUnion ({certainty}), relation m,n,k = {relation}")
            }
            ClosureClass::Dense { certainty } => write!(f, "Dense ({certainty})"),
        }
    }
}

/// Classifies the closure of the orbit of `start`.
pub fn classify(
    start: &TorusPoint,
    gens: &Generators,
    c_bound: u32,
    tau: &BigRational,
) -> Result<ClosureClass> {
    if start.is_exact() {
        return Ok(ClosureClass::Finite(rational_closure(start, gens)?));
    }
    Ok(match find_relation(start.x(), start.y(), c_bound, tau)? {
        Some(fit) => {
            let certainty = if fit.residual.is_exact() && fit.residual.mid.is_zero() {
                Certainty::Exact
            } else {
                Certainty::BoundedSearch
            };
            ClosureClass::LineUnion {
                relation: fit.relation,
                certainty,
            }
        }
        None => ClosureClass::Dense {
            certainty: Certainty::BoundedSearch,
        },
    })
}

/// Exponent vector one generator step closer to the start.
pub fn pre_image(t: &ExpTriple, gens: &Generators) -> Result<ExpTriple> {
    t.pre_image(gens)
}
