//! How densely a finite orbit fills the torus, and how well it approximates
//! a target.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{Bound, TorusPoint, TorusValue};
use crate::error::{Error, Result};
use crate::orbit::{enumerate_orbit, OrbitSample};
use crate::smooth::{ExpTriple, Generators};

/// Occupancy of a `g x g` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridStats {
    pub g: u32,
    pub total: u64,
    pub coverage: f64,
    pub empty_cells: u64,
    /// `max |count / total - 1/g^2|` over cells.
    pub max_deviation: f64,
    /// Row-major counts, `counts[j * g + i]` for the cell `floor(g x) = i`,
    /// `floor(g y) = j`.
    pub counts: Vec<u64>,
}

impl GridStats {
    pub fn count(&self, i: u32, j: u32) -> u64 {
        self.counts[(j * self.g + i) as usize]
    }
}

/// Histograms the samples over the `g x g` grid.
///
/// Each sample's certified error must stay below `1/(4g)`. A sample whose
/// error band crosses a cell edge is counted in the cell of its stored value.
pub fn grid_coverage(samples: &[OrbitSample], g: u32) -> Result<GridStats> {
    if g == 0 {
        return Err(Error::precondition("grid size must be at least 1"));
    }
    let limit = BigRational::new(BigInt::from(1u32), BigInt::from(4 * u64::from(g)));
    let cells = u64::from(g) * u64::from(g);
    let mut counts = vec![0u64; cells as usize];
    for s in samples {
        if s.point.error_bound() >= limit {
            return Err(Error::PrecisionTooCoarse { grid: g });
        }
        let i = s.point.x().cell(g);
        let j = s.point.y().cell(g);
        counts[(j * g + i) as usize] += 1;
    }
    let total = samples.len() as u64;
    let empty = counts.iter().filter(|&&c| c == 0).count() as u64;
    let uniform = 1.0 / cells as f64;
    let max_deviation = counts
        .iter()
        .map(|&c| {
            let share = if total == 0 { 0.0 } else { c as f64 / total as f64 };
            (share - uniform).abs()
        })
        .fold(0.0, f64::max);
    Ok(GridStats {
        g,
        total,
        coverage: 1.0 - empty as f64 / cells as f64,
        empty_cells: empty,
        max_deviation,
        counts,
    })
}

// shortest lift of a - b on the unit circle
fn wrap(d: f64) -> f64 {
    let d = d.rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Largest distance from a grid center to the nearest sample, plus the cell
/// diagonal `sqrt(2)/g`. Every torus point is within this of some sample.
pub fn covering_radius_estimate(samples: &[OrbitSample], g: u32) -> Result<f64> {
    if g < 8 {
        return Err(Error::precondition("grid size must be at least 8"));
    }
    if samples.is_empty() {
        return Err(Error::precondition("no samples"));
    }
    Ok(max_center_distance(samples, g) + 2f64.sqrt() / f64::from(g))
}

/// `max` over grid centers of the distance to the nearest sample.
pub fn max_center_distance(samples: &[OrbitSample], g: u32) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| s.point.to_f64()).collect();
    let gf = f64::from(g);
    let mut worst: f64 = 0.0;
    for j in 0..g {
        let cy = (f64::from(j) + 0.5) / gf;
        for i in 0..g {
            let cx = (f64::from(i) + 0.5) / gf;
            let near = pts
                .iter()
                .map(|&(x, y)| {
                    let (dx, dy) = (wrap(x - cx), wrap(y - cy));
                    dx * dx + dy * dy
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(near.sqrt());
        }
    }
    worst
}

/// Best simultaneous approximation of a target by the orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxRecord {
    pub target: TorusPoint,
    /// `max(||S x - alpha||, ||S y - beta||)` at the argmin.
    pub best: Bound,
    pub argmin: ExpTriple,
    pub s_max: BigUint,
}

fn offset_dist(v: &TorusValue, target: &TorusValue) -> Result<Bound> {
    match target {
        TorusValue::Exact(r) => Ok(v.add_rat(&r.neg())?.dist_to_int()),
        TorusValue::Fixed(_) => {
            let t = match v.bits() {
                Some(b) => target.to_fixed(b)?,
                None => target.clone(),
            };
            let v = match t.bits() {
                Some(b) if v.is_exact() => v.to_fixed(b)?,
                _ => v.clone(),
            };
            Ok(TorusValue::lin_comb(&[(1, &v), (-1, &t)], &crate::arith::Rat::zero())?.dist_to_int())
        }
    }
}

fn bound_max(a: Bound, b: Bound) -> Bound {
    if a.mid >= b.mid {
        Bound::new(a.mid, a.rad.max(b.rad))
    } else {
        Bound::new(b.mid, a.rad.max(b.rad))
    }
}

/// Approximation error of one sample, certified.
pub fn approx_error(point: &TorusPoint, target: &TorusPoint) -> Result<Bound> {
    Ok(bound_max(
        offset_dist(point.x(), target.x())?,
        offset_dist(point.y(), target.y())?,
    ))
}

/// Minimum approximation error over the orbit up to `s_max`; the first
/// minimizer in enumeration order wins ties.
pub fn best_approx(
    start: &TorusPoint,
    target: &TorusPoint,
    gens: &Generators,
    s_max: &BigUint,
) -> Result<ApproxRecord> {
    Ok(best_approx_profile(start, target, gens, std::slice::from_ref(s_max))?
        .pop()
        .expect("one checkpoint"))
}

/// [`best_approx`] at each checkpoint, in one pass over the largest.
/// Checkpoints must be increasing.
pub fn best_approx_profile(
    start: &TorusPoint,
    target: &TorusPoint,
    gens: &Generators,
    checkpoints: &[BigUint],
) -> Result<Vec<ApproxRecord>> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("checkpoints must be nonempty and increasing"));
    }
    if checkpoints[0].is_zero() {
        return Err(Error::precondition("S_max must be at least 1"));
    }
    let last = checkpoints.last().expect("nonempty");
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut best: Option<(Bound, ExpTriple)> = None;
    let mut next = 0;
    let record = |best: &Option<(Bound, ExpTriple)>, s: &BigUint| {
        let (b, t) = best.clone().expect("identity always enumerated");
        ApproxRecord {
            target: target.clone(),
            best: b,
            argmin: t,
            s_max: s.clone(),
        }
    };
    for sample in enumerate_orbit(start, gens, last) {
        let sample = sample?;
        while sample.triple.multiplier() > &checkpoints[next] {
            out.push(record(&best, &checkpoints[next]));
            next += 1;
        }
        let err = approx_error(&sample.point, target)?;
        if best.as_ref().is_none_or(|(b, _)| err.mid < b.mid) {
            best = Some((err, sample.triple));
        }
    }
    while next < checkpoints.len() {
        out.push(record(&best, &checkpoints[next]));
        next += 1;
    }
    Ok(out)
}

/// Weight in front of the Littlewood-type product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// `log(k2 k3 k5 + 2)`, or the product of all exponents for other sets.
    LogProduct,
    Constant,
}

impl Weight {
    pub fn eval(self, exps: &[u32]) -> f64 {
        match self {
            Weight::LogProduct => {
                let prod: f64 = exps.iter().map(|&k| f64::from(k)).product();
                (prod + 2.0).ln()
            }
            Weight::Constant => 1.0,
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-product" => Ok(Weight::LogProduct),
            "constant-1" | "constant" => Ok(Weight::Constant),
            _ => Err(Error::Malformed(s.to_string())),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::LogProduct => "log-product",
            Weight::Constant => "constant-1",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LittlewoodRecord {
    pub triple: ExpTriple,
    /// `f(k) ||S x|| ||S y||`.
    pub product: f64,
    /// Minimum of `product` over all records so far.
    pub running_min: f64,
    /// All exponents positive; only these enter the headline minimum.
    pub included: bool,
    /// Minimum over included records so far.
    pub headline_min: Option<f64>,
}

/// Products `f(k) ||S x|| ||S y||` along the orbit with running minima.
pub fn littlewood_track(
    start: &TorusPoint,
    gens: &Generators,
    s_max: &BigUint,
    weight: Weight,
) -> Result<Vec<LittlewoodRecord>> {
    let mut out: Vec<LittlewoodRecord> = Vec::new();
    let mut running = f64::INFINITY;
    let mut headline: Option<f64> = None;
    for sample in enumerate_orbit(start, gens, s_max) {
        let sample = sample?;
        let dx = sample.point.x().dist_to_int().mid;
        let dy = sample.point.y().dist_to_int().mid;
        let d = (dx * dy).to_f64().unwrap_or(0.0);
        let product = weight.eval(sample.triple.exps()) * d;
        let included = sample.triple.exps().iter().all(|&k| k > 0);
        running = running.min(product);
        if included {
            headline = Some(headline.map_or(product, |h| h.min(product)));
        }
        out.push(LittlewoodRecord {
            triple: sample.triple,
            product,
            running_min: running,
            included,
            headline_min: headline,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_point, Rat};
    use crate::orbit::{closure_first_hits, collect_orbit};

    fn orbit(start: &str, s_max: u64, bits: u32) -> Vec<OrbitSample> {
        let p = parse_point(start, bits).unwrap();
        collect_orbit(&p, &Generators::default(), &BigUint::from(s_max)).unwrap()
    }

    fn at(x: Rat, y: Rat) -> OrbitSample {
        OrbitSample {
            triple: ExpTriple::identity(&Generators::default()),
            point: TorusPoint::exact(x, y),
        }
    }

    #[test]
    fn coverage_basics() {
        let one = grid_coverage(&orbit("1/3,1/5", 1, 64), 1).unwrap();
        assert_eq!(one.coverage, 1.0);
        let fin = grid_coverage(&orbit("1/2,1/3", 1_000_000_000, 64), 10).unwrap();
        assert_eq!(fin.empty_cells, 94);
        assert_eq!(fin.counts.iter().sum::<u64>(), fin.total);
        assert!((fin.coverage - (1.0 - fin.empty_cells as f64 / 100.0)).abs() < 1e-15);
    }

    #[test]
    fn coverage_cells_match_floor() {
        let s = vec![at(Rat::small(1, 4), Rat::small(3, 4)), at(Rat::small(1, 3), Rat::small(1, 8))];
        let st = grid_coverage(&s, 4).unwrap();
        assert_eq!(st.count(1, 3), 1);
        assert_eq!(st.count(1, 0), 1);
        assert_eq!(st.empty_cells, 14);
        // max deviation is from an occupied cell: 1/2 - 1/16
        assert!((st.max_deviation - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn coverage_rejects_coarse_samples() {
        let s = orbit("sqrt(2),sqrt(3)", 1_000_000, 24);
        assert_eq!(grid_coverage(&s, 8), Err(Error::PrecisionTooCoarse { grid: 8 }));
    }

    #[test]
    fn coverage_monotone() {
        let s = orbit("sqrt(2),sqrt(3)", 10_000_000, 96);
        let mut prev = 0.0;
        for n in (0..=s.len()).step_by(37) {
            let c = grid_coverage(&s[..n], 16).unwrap().coverage;
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn finite_plateau() {
        let start = parse_point("1/2,1/3", 64).unwrap();
        let (_, max_hit) = closure_first_hits(&start, &Generators::default()).unwrap();
        let g = Generators::default();
        let at_hit = grid_coverage(&collect_orbit(&start, &g, &max_hit).unwrap(), 10).unwrap();
        let before = grid_coverage(&collect_orbit(&start, &g, &(&max_hit - 1u32)).unwrap(), 10).unwrap();
        let later = grid_coverage(&collect_orbit(&start, &g, &BigUint::from(1_000_000u32)).unwrap(), 10).unwrap();
        assert_eq!(at_hit.coverage, later.coverage);
        assert!(before.empty_cells >= at_hit.empty_cells);
    }

    #[test]
    fn covering_of_cell_centers() {
        let g = 16;
        let s: Vec<OrbitSample> = (0..g)
            .flat_map(|j| (0..g).map(move |i| at(Rat::small(2 * i + 1, 2 * g), Rat::small(2 * j + 1, 2 * g))))
            .collect();
        let r = covering_radius_estimate(&s, g as u32).unwrap();
        assert!(r <= 2f64.sqrt() / g as f64 + 1e-15);
        assert!(covering_radius_estimate(&s, 4).is_err());
    }

    #[test]
    fn covering_of_diagonal() {
        let s: Vec<OrbitSample> = (0..4000).map(|k| at(Rat::small(k, 4000), Rat::small(k, 4000))).collect();
        let target = 1.0 / (2.0 * 2f64.sqrt());
        let mut prev = f64::INFINITY;
        for g in [16, 64, 256] {
            let r = covering_radius_estimate(&s, g).unwrap();
            assert!(r >= target - 1e-3);
            assert!(r - target < 2.0 / g as f64);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn finite_covering_stays_large() {
        let s = orbit("1/2,1/3", 1_000_000, 64);
        for g in [8, 32, 64] {
            assert!(covering_radius_estimate(&s, g).unwrap() > 0.3);
        }
    }

    #[test]
    fn covering_bound_is_witnessed() {
        let s = orbit("sqrt(2),sqrt(3)", 1_000_000, 96);
        let g = 12;
        let r = covering_radius_estimate(&s, g).unwrap();
        // random probes, not just centers
        for k in 0..500u64 {
            let (px, py) = ((k as f64 * 0.618034).fract(), (k as f64 * 0.414214).fract());
            let near = s
                .iter()
                .map(|smp| {
                    let (x, y) = smp.point.to_f64();
                    (wrap(x - px).powi(2) + wrap(y - py).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(near <= r);
        }
    }

    #[test]
    fn approx_identity_and_antitone() {
        let g = Generators::default();
        let start = parse_point("sqrt(2),sqrt(3)", 96).unwrap();
        let rec = best_approx(&start, &start, &g, &BigUint::from(1000u32)).unwrap();
        assert!(rec.best.mid.is_zero());
        assert!(rec.argmin.is_identity());

        let target = parse_point("1/2,1/2", 96).unwrap();
        let cps: Vec<BigUint> = [1_000u64, 1_000_000, 1_000_000_000].iter().map(|&v| v.into()).collect();
        let prof = best_approx_profile(&start, &target, &g, &cps).unwrap();
        assert!(prof[1].best.mid <= prof[0].best.mid && prof[2].best.mid <= prof[1].best.mid);
        for (rec, s) in prof.iter().zip(&cps) {
            assert_eq!(rec, &best_approx(&start, &target, &g, s).unwrap());
        }
    }

    #[test]
    fn approx_matches_brute_force() {
        let g = Generators::default();
        let start = parse_point("3/17,5/19", 64).unwrap();
        let target = parse_point("1/2,1/4", 64).unwrap();
        let rec = best_approx(&start, &target, &g, &BigUint::from(5000u32)).unwrap();
        let mut best = (f64::INFINITY, 0u64);
        for m in 1..=5000u64 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r != 1 {
                continue;
            }
            let e = wrap(3.0 * m as f64 / 17.0 - 0.5).max(wrap(5.0 * m as f64 / 19.0 - 0.25));
            if e < best.0 - 1e-12 {
                best = (e, m);
            }
        }
        assert!((rec.best.to_f64() - best.0).abs() < 1e-12);
        assert_eq!(rec.argmin.multiplier(), &BigUint::from(best.1));
    }

    #[test]
    fn approx_off_the_line() {
        // x - y = 0 is kept by the orbit; target (1/2, 0) is 1/4 away in sup norm
        let g = Generators::default();
        let start = parse_point("sqrt(2),sqrt(2)", 96).unwrap();
        let target = parse_point("1/2,0", 96).unwrap();
        let rec = best_approx(&start, &target, &g, &BigUint::from(1_000_000u32)).unwrap();
        assert!(rec.best.lo() >= BigRational::new(1.into(), 4.into()) - rec.best.rad.clone() * BigInt::from(2));
    }

    #[test]
    fn littlewood_rational_hits_zero() {
        let g = Generators::default();
        // a dyadic x survives promotion to fixed point exactly
        let start = parse_point("1/4,sqrt(2)", 96).unwrap();
        let recs = littlewood_track(&start, &g, &BigUint::from(1000u32), Weight::LogProduct).unwrap();
        assert_eq!(recs.last().unwrap().running_min, 0.0);
    }

    #[test]
    fn littlewood_antitone_positive() {
        let g = Generators::default();
        let start = parse_point("sqrt(2),sqrt(3)", 96).unwrap();
        let recs = littlewood_track(&start, &g, &BigUint::from(1_000_000u32), Weight::Constant).unwrap();
        assert!(recs.windows(2).all(|w| w[1].running_min <= w[0].running_min));
        assert!(recs.iter().all(|r| r.running_min > 0.0));
        let first_inc = recs.iter().position(|r| r.included).unwrap();
        assert_eq!(recs[first_inc].triple.to_string(), "(1,1,1)");
        assert!(recs[..first_inc].iter().all(|r| r.headline_min.is_none()));
    }

    #[test]
    fn weights() {
        assert_eq!(Weight::Constant.eval(&[3, 4, 5]), 1.0);
        assert!((Weight::LogProduct.eval(&[1, 2, 3]) - 8f64.ln()).abs() < 1e-15);
        assert_eq!("log-product".parse::<Weight>().unwrap(), Weight::LogProduct);
        assert!("log".parse::<Weight>().is_err());
    }
}
