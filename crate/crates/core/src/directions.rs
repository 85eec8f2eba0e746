//! Local direction sets estimated from finite orbit samples.
//!
//! Around an anchor `a`, each sample `b` with `0 < |b - a| <= epsilon`
//! contributes the unoriented angle of `b - a`. Angles are grouped by
//! single linkage on the circle `[0, pi)` and each group's mean is matched
//! against small rational directions. The output is an estimate: a limit
//! direction cannot be certified from finitely many points.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::arith::{torus_distance, Rat, TorusPoint, TorusValue};
use crate::construct::farey_fractions;
use crate::error::{Error, Result};
use crate::geometry::{rationalize_slope, unoriented_angle, Direction, SlopeVerdict};
use crate::orbit::OrbitSample;

/// Largest `max(|p|, |q|)` tried when rationalizing a cluster mean.
pub const RATIONAL_HEIGHT: u64 = 8;

/// Default angular linkage threshold in radians.
pub const DEFAULT_THETA_TOL: f64 = 0.02;

/// A group of nearby angles.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Circular mean in `[0, pi)`.
    pub mean_angle: f64,
    pub weight: usize,
    /// First and last angle going counterclockwise; `lo > hi` when the arc
    /// crosses the seam at 0.
    pub lo: f64,
    pub hi: f64,
    pub rational: SlopeVerdict,
}

impl Cluster {
    /// Angular length of the arc.
    pub fn extent(&self) -> f64 {
        (self.hi - self.lo).rem_euclid(PI)
    }

    /// Whether `theta` lies on the arc.
    pub fn covers(&self, theta: f64) -> bool {
        (theta - self.lo).rem_euclid(PI) <= self.extent()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionEstimate {
    pub anchor: TorusPoint,
    pub clusters: Vec<Cluster>,
    pub epsilon: f64,
    pub theta_tol: f64,
}

impl DirectionEstimate {
    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Samples that fell in the annulus.
    pub fn weight(&self) -> usize {
        self.clusters.iter().map(|c| c.weight).sum()
    }

    /// Rational directions among the clusters, in order of mean angle.
    pub fn directions(&self) -> Vec<Direction> {
        self.clusters.iter().filter_map(|c| c.rational.direction()).collect()
    }
}

// Displacement `b - a` as a centered f64 vector; the anchor is lifted to the
// sample's precision when the tags differ.
fn displacement(b: &TorusPoint, a: &TorusPoint) -> Result<Option<(f64, f64)>> {
    let a = match (a.bits(), b.bits()) {
        (None, Some(bits)) => a.to_fixed(bits)?,
        _ => a.clone(),
    };
    let d = torus_distance(b, &a)?;
    if d.mid == num_rational::BigRational::default() {
        return Ok(None);
    }
    let dx = TorusValue::lin_comb(&[(1, b.x()), (-1, a.x())], &Rat::zero())?.centered();
    let dy = TorusValue::lin_comb(&[(1, b.y()), (-1, a.y())], &Rat::zero())?.centered();
    Ok(Some((dx.to_f64(), dy.to_f64())))
}

/// Estimates the local direction set at a rational `anchor`.
pub fn estimate_der(
    anchor: &TorusPoint,
    samples: &[OrbitSample],
    epsilon: f64,
    theta_tol: f64,
) -> Result<DirectionEstimate> {
    if !anchor.is_exact() {
        return Err(Error::precondition("anchor must be rational"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::precondition("epsilon must be positive"));
    }
    if !(theta_tol > 0.0 && theta_tol < PI / 8.0) {
        return Err(Error::precondition("thetaTol must lie in (0, pi/8)"));
    }
    let eps2 = epsilon * epsilon;
    let mut angles = Vec::new();
    for s in samples {
        if let Some((dx, dy)) = displacement(&s.point, anchor)? {
            if dx * dx + dy * dy <= eps2 {
                angles.push(unoriented_angle(dx, dy));
            }
        }
    }
    Ok(DirectionEstimate {
        anchor: anchor.clone(),
        clusters: cluster_angles(angles, theta_tol),
        epsilon,
        theta_tol,
    })
}

/// Single-linkage clustering on the circle of circumference `pi`.
pub fn cluster_angles(mut angles: Vec<f64>, theta_tol: f64) -> Vec<Cluster> {
    if angles.is_empty() {
        return Vec::new();
    }
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let gap = |i: usize| (angles[(i + 1) % n] - angles[i]).rem_euclid(PI);
    // cut after every index whose gap to the next angle is too wide
    let cuts: Vec<usize> = (0..n).filter(|&i| n > 1 && gap(i) > theta_tol).collect();
    let groups: Vec<Vec<f64>> = if cuts.is_empty() {
        vec![angles.clone()]
    } else {
        cuts.iter()
            .enumerate()
            .map(|(j, &c)| {
                let end = cuts[(j + 1) % cuts.len()];
                let mut g = Vec::new();
                let mut i = (c + 1) % n;
                loop {
                    g.push(angles[i]);
                    if i == end {
                        break;
                    }
                    i = (i + 1) % n;
                }
                g
            })
            .collect()
    };
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|g| {
            // mean of doubled angles, halved back
            let (s, c) = g
                .iter()
                .fold((0.0, 0.0), |(s, c), a| (s + (2.0 * a).sin(), c + (2.0 * a).cos()));
            let mean = (s.atan2(c) / 2.0).rem_euclid(PI);
            let mean = if mean >= PI { 0.0 } else { mean };
            Cluster {
                mean_angle: mean,
                weight: g.len(),
                lo: g[0],
                hi: g[g.len() - 1],
                rational: rationalize_slope((mean.cos(), mean.sin()), RATIONAL_HEIGHT, theta_tol / 2.0),
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.mean_angle.total_cmp(&b.mean_angle));
    clusters
}

/// Runs [`estimate_der`] at every rational anchor with denominators
/// `<= qmax` and keeps the non-empty estimates. Anchors are split over
/// `threads` workers; output order does not depend on the split.
pub fn estimate_der_q(
    samples: &[OrbitSample],
    qmax: u64,
    epsilon: f64,
    theta_tol: f64,
    threads: usize,
) -> Result<Vec<(TorusPoint, DirectionEstimate)>> {
    if qmax == 0 {
        return Err(Error::precondition("Qmax must be at least 1"));
    }
    let fr = farey_fractions(qmax);
    let anchors: Vec<TorusPoint> = fr
        .iter()
        .flat_map(|x| fr.iter().map(move |y| TorusPoint::exact(x.clone(), y.clone())))
        .collect();
    let run = |chunk: &[TorusPoint]| -> Result<Vec<(TorusPoint, DirectionEstimate)>> {
        let mut out = Vec::new();
        for a in chunk {
            let est = estimate_der(a, samples, epsilon, theta_tol)?;
            if !est.is_empty() {
                out.push((a.clone(), est));
            }
        }
        Ok(out)
    };
    let threads = threads.max(1);
    if threads == 1 {
        return run(&anchors);
    }
    let size = anchors.len().div_ceil(threads);
    let parts: Vec<Result<Vec<_>>> = std::thread::scope(|s| {
        let handles: Vec<_> = anchors.chunks(size).map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("anchor worker panicked"))
            .collect()
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Distinct rational directions across a set of estimates.
pub fn union_directions(estimates: &[(TorusPoint, DirectionEstimate)]) -> BTreeSet<Direction> {
    estimates.iter().flat_map(|(_, e)| e.directions()).collect()
}
